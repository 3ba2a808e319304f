// tests/test-transforms.cc

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "orbitsig/transforms.h"
#include "orbitsig/util.h"
#include "oracles.h"

using namespace orbitsig;

TEST_CASE("time_warp: epsilon 0 is bit-identical") {
  Rng rng(1);
  std::vector<double> x(333);
  for (double& v : x) v = rng.normal();
  const auto y = time_warp(x, 0.0);
  CHECK(y == x);
}

TEST_CASE("time_warp: integer rate subsamples with zero extension") {
  const std::vector<double> x = {0, 1, 2, 3, 4, 5, 6, 7};
  const auto y = time_warp(x, 1.0);
  CHECK(y == std::vector<double>{0, 2, 4, 6, 0, 0, 0, 0});
}

TEST_CASE("time_warp: linear ramp stays linear under fractional rate") {
  std::vector<double> x(64);
  for (size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
  const auto y = time_warp(x, 0.5);
  for (size_t i = 0; i < y.size(); ++i) {
    const double pos = 1.5 * static_cast<double>(i);
    if (pos <= 63.0) {
      CHECK(y[i] == doctest::Approx(pos).epsilon(1e-12));
    } else {
      CHECK(y[i] == 0.0);
    }
  }
}

TEST_CASE("time_warp matches the interpolation oracle on random signals") {
  Rng rng(2);
  std::vector<double> x(200);
  for (double& v : x) v = rng.normal();
  for (double eps : {-0.4, -0.15, 0.07, 0.33}) {
    const auto y = time_warp(x, eps);
    REQUIRE(y.size() == x.size());
    for (size_t i = 0; i < y.size(); ++i) {
      CHECK(y[i] == doctest::Approx(oracles::interp_at(x, (1.0 + eps) * i)).epsilon(1e-12));
    }
  }
}

TEST_CASE("time_warp: interpolation error bounded for bandlimited tones") {
  // Linear interpolation error of f(t)=sin(w t) is at most w^2/8 per unit
  // grid step.
  const double omega = 0.2;
  std::vector<double> x(512);
  for (size_t i = 0; i < x.size(); ++i) x[i] = std::sin(omega * static_cast<double>(i));
  const double bound = omega * omega / 8.0 + 1e-12;
  for (double eps : {-0.4, -0.2, 0.1, 0.4}) {
    const auto y = time_warp(x, eps);
    for (size_t i = 0; i < y.size(); ++i) {
      const double pos = (1.0 + eps) * static_cast<double>(i);
      if (pos > static_cast<double>(x.size() - 1)) break;
      CHECK(std::abs(y[i] - std::sin(omega * pos)) <= bound);
    }
  }
}

TEST_CASE("time_warp: parameter validation") {
  const std::vector<double> x = {1, 2, 3};
  CHECK_THROWS_AS(time_warp(x, std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(time_warp(x, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(time_warp({}, 0.1), std::invalid_argument);
  CHECK_NOTHROW(time_warp(x, -0.999));
}

TEST_CASE("cyclic_shift: identities and the definition") {
  const std::vector<double> x = {1, 2, 3, 4};
  CHECK(cyclic_shift(x, 0) == x);
  CHECK(cyclic_shift(x, 4) == x);
  CHECK(cyclic_shift(x, -4) == x);
  CHECK(cyclic_shift(x, 1) == std::vector<double>{4, 1, 2, 3});
  CHECK(cyclic_shift(x, -1) == std::vector<double>{2, 3, 4, 1});
}

TEST_CASE("cyclic_shift: composition is exact for all offsets") {
  Rng rng(3);
  std::vector<double> x(17);
  for (double& v : x) v = rng.normal();
  for (long long a = -20; a <= 20; a += 7) {
    for (long long b = -20; b <= 20; b += 5) {
      CHECK(cyclic_shift(cyclic_shift(x, a), b) == cyclic_shift(x, a + b));
    }
  }
}

TEST_CASE("pitch_shift_frame: translation semantics") {
  std::vector<double> bins(32, -10.0);
  bins[10] = 3.0;
  const double fill = -13.8;

  CHECK(pitch_shift_frame(bins, 0, fill) == bins);

  const auto up = pitch_shift_frame(bins, 3, fill);
  CHECK(up[13] == 3.0);
  CHECK(up[0] == fill);
  CHECK(up[1] == fill);
  CHECK(up[2] == fill);

  // Shift up then down: identity except the boundary bins at each end.
  const auto back = pitch_shift_frame(up, -3, fill);
  for (int i = 0; i < 32; ++i) {
    if (i < 3 || i >= 29) continue;
    CHECK(back[i] == bins[i]);
  }
  CHECK(back[29] == fill);

  CHECK_THROWS_AS(pitch_shift_frame(bins, 32, fill), std::invalid_argument);
  CHECK_THROWS_AS(pitch_shift_frame(bins, -32, fill), std::invalid_argument);
}

TEST_CASE("pitch_shift_frame preserves the multiset of interior values") {
  Rng rng(4);
  std::vector<double> bins(40);
  for (double& v : bins) v = rng.normal();
  const int s = 5;
  const auto shifted = pitch_shift_frame(bins, s, 0.0);
  std::multiset<double> before(bins.begin(), bins.end() - s);
  std::multiset<double> after(shifted.begin() + s, shifted.end());
  CHECK(before == after);
}

TEST_CASE("apply_orbit: member order follows the parameters") {
  const std::vector<double> x = {1, 2, 3, 4, 5, 6};

  TransformSpec identity;
  identity.kind = TransformKind::TimeWarp;
  identity.parameters = {0.0};
  const auto single = apply_orbit(x, identity);
  REQUIRE(single.size() == 1);
  CHECK(single[0] == x);

  const auto spec = shift_grid(0, 5, 1, TransformKind::CyclicShift);
  const auto rotations = apply_orbit(x, spec);
  REQUIRE(rotations.size() == 6);
  std::multiset<double> original(x.begin(), x.end());
  for (size_t k = 0; k < rotations.size(); ++k) {
    CHECK(rotations[k] == cyclic_shift(x, static_cast<long long>(k)));
    CHECK(std::multiset<double>(rotations[k].begin(), rotations[k].end()) == original);
  }

  const auto grid = warp_grid(17, 0.4);
  CHECK(apply_orbit(x, grid).size() == 17);
}

TEST_CASE("warp_grid: uniform, symmetric, contains zero") {
  const auto spec = warp_grid(17, 0.4);
  REQUIRE(spec.parameters.size() == 17);
  CHECK(spec.parameters.front() == doctest::Approx(-0.4));
  CHECK(spec.parameters.back() == doctest::Approx(0.4));
  CHECK(spec.parameters[8] == doctest::Approx(0.0));
  for (size_t i = 1; i < spec.parameters.size(); ++i) {
    CHECK(spec.parameters[i] - spec.parameters[i - 1] == doctest::Approx(0.05));
  }
}

TEST_CASE("TransformSpec: validation and JSON round-trip") {
  TransformSpec spec;
  spec.kind = TransformKind::TimeWarp;
  spec.parameters = {};
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.parameters = {0.1, 0.1};
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.parameters = {-1.5};
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

  const auto grid = warp_grid(5, 0.3);
  const TransformSpec copy = TransformSpec::from_json(grid.to_json());
  CHECK(copy.kind == grid.kind);
  CHECK(copy.parameters == grid.parameters);
}

TEST_CASE("resample_linear: identity and ramp behavior") {
  const std::vector<double> x = {0, 1, 2, 3, 4, 5, 6, 7};
  CHECK(resample_linear(x, 8000, 8000) == x);

  const auto up = resample_linear(x, 8000, 16000);
  CHECK(up.size() == 16);
  for (size_t i = 0; i + 2 < up.size(); ++i) {
    CHECK(up[i] == doctest::Approx(0.5 * static_cast<double>(i)).epsilon(1e-12));
  }
  const auto down = resample_linear(x, 8000, 4000);
  CHECK(down.size() == 4);
  CHECK(down[1] == doctest::Approx(2.0));
}
