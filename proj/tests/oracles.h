// tests/oracles.h
//
// Independent reference implementations used to freeze expected values.
// Everything here is deliberately naive (quadratic DFT, Gauss-Jordan solve,
// long-double accumulation) and must stay decoupled from the library code
// paths it checks.

#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace oracles {

// O(n^2) DFT of a real input zero-padded to length n_fft.
inline std::vector<std::complex<double>> naive_dft(std::span<const double> x, int n_fft) {
  std::vector<std::complex<double>> out(n_fft);
  for (int k = 0; k < n_fft; ++k) {
    std::complex<long double> acc = 0.0L;
    for (size_t n = 0; n < x.size(); ++n) {
      const long double angle = -2.0L * M_PIl * k * static_cast<long double>(n) / n_fft;
      acc += static_cast<long double>(x[n]) *
             std::complex<long double>(std::cos(angle), std::sin(angle));
    }
    out[k] = {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
  }
  return out;
}

// Raw moment via long-double accumulation.
inline double moment_sum(std::span<const double> proj, int order) {
  long double acc = 0.0L;
  for (double p : proj) {
    long double term = 1.0L;
    for (int i = 0; i < order; ++i) term *= p;
    acc += term;
  }
  return static_cast<double>(acc / static_cast<long double>(proj.size()));
}

// Sigmoid-CDF bin via long-double accumulation.
inline double sigmoid_bin_sum(std::span<const double> proj, int bin, double delta, double beta) {
  long double acc = 0.0L;
  for (double p : proj) {
    const long double z = static_cast<long double>(beta) * (p + bin * delta);
    acc += 1.0L / (1.0L + std::exp(-z));
  }
  return static_cast<double>(acc / static_cast<long double>(proj.size()));
}

// Fraction of projections >= threshold (the beta -> infinity limit of a
// sigmoid bin at threshold -n*delta), by sorting.
inline double empirical_cdf_above(std::vector<double> proj, double threshold) {
  std::sort(proj.begin(), proj.end());
  size_t count = 0;
  for (double p : proj) {
    if (p >= threshold) ++count;
  }
  return static_cast<double>(count) / proj.size();
}

// Gauss-Jordan solve with partial pivoting; A is square.
inline Eigen::MatrixXd gauss_jordan_solve(Eigen::MatrixXd a, Eigen::MatrixXd b) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n || b.rows() != n) throw std::invalid_argument("gauss_jordan_solve: shape");
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    }
    if (a(pivot, col) == 0.0) throw std::runtime_error("gauss_jordan_solve: singular");
    a.row(col).swap(a.row(pivot));
    b.row(col).swap(b.row(pivot));
    const double inv = 1.0 / a(col, col);
    a.row(col) *= inv;
    b.row(col) *= inv;
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      if (f != 0.0) {
        a.row(r) -= f * a.row(col);
        b.row(r) -= f * b.row(col);
      }
    }
  }
  return b;
}

// Linear interpolation of x at a fractional position, zero outside [0, n-1].
inline double interp_at(std::span<const double> x, double pos) {
  if (pos < 0.0 || pos > static_cast<double>(x.size() - 1)) return 0.0;
  const auto i0 = static_cast<size_t>(pos);
  const double frac = pos - static_cast<double>(i0);
  if (frac == 0.0) return x[i0];
  return (1.0 - frac) * x[i0] + frac * x[i0 + 1];
}

}  // namespace oracles
