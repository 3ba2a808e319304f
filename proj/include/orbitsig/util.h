// orbitsig/util.h

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbitsig {

// User-facing failures: missing files, malformed containers, bad settings.
// Anything else escaping the library is treated as an internal error by the
// CLI (exit code 2).
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Counter-based seed derivation so that independent sampling stages never
// share a stream.
uint64_t splitmix64(uint64_t x);

// Deterministic RNG with a stable cross-platform stream. std::mt19937_64 has
// a pinned algorithm, but the std distributions do not, so bounded draws and
// shuffles are implemented here.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(splitmix64(seed ^ 0x9e3779b97f4a7c15ULL)) {}

  uint64_t next_u64();

  // Uniform index in [0, n). n must be > 0.
  size_t uniform_index(size_t n);

  // Uniform double in [0, 1) with 53 bits of precision.
  double uniform01();

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller (two uniforms per pair, cached).
  double normal();

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = uniform_index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t state_;
  bool have_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

// Little-endian scalar IO used by the TFM and TBK containers.
void put_u64_le(std::string& out, uint64_t v);
void put_f64_le(std::string& out, double v);
uint64_t get_u64_le(const unsigned char* p);
double get_f64_le(const unsigned char* p);

std::string read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, const std::string& bytes);

// SHA-256 of a byte string, lowercase hex.
std::string sha256_hex(const std::string& bytes);

std::string to_lower(std::string s);

}  // namespace orbitsig
