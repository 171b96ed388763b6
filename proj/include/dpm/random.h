// Copyright 2026 The DPM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPM_RANDOM_H_
#define DPM_RANDOM_H_

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace dpm {

// A seeded random stream addressed by a derivation path.
//
// The stream is a pure function of (seed, path): deriving "a/b" from a root
// yields the same draws no matter how many other streams were derived or
// consumed before. Sibling computations therefore never share a generator
// and may run in any order.
//
// All variates are produced by code in this file rather than the
// <random> distributions, whose output is implementation-defined.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed, std::string path = "");

  // Child stream at path() + "/" + label.
  RandomSource Derive(std::string_view label) const;

  std::uint64_t seed() const { return seed_; }
  const std::string& path() const { return path_; }

  std::uint64_t NextU64() { return engine_(); }

  // Uniform on the open interval (0, 1), 53 bits of resolution.
  double Uniform();

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t UniformInt(std::uint64_t bound);

  double StandardNormal();

 private:
  std::uint64_t seed_;
  std::string path_;
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

// Mixes a seed and a path into a 64-bit engine seed.
std::uint64_t DeriveStreamSeed(std::uint64_t seed, std::string_view path);

}  // namespace dpm

#endif  // DPM_RANDOM_H_
