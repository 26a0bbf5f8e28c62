// Copyright 2026 The dqsrw developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>

namespace dqsr::noise {

/// Philox4x64 with 10 rounds: a counter-based generator. One (counter, key)
/// pair maps to four 64-bit words, so streams are pure functions of their
/// key and position -- identical output no matter which thread runs them.
struct Philox4x64 {
  static std::array<std::uint64_t, 4> block(
      const std::array<std::uint64_t, 4>& counter, std::uint64_t key0,
      std::uint64_t key1);
};

/// Deterministic random stream keyed by (master_seed, stream_id); one stream
/// per trajectory. The word/normal sequence depends only on the key and the
/// number of values drawn so far.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : key0_(master_seed), key1_(stream_id) {}

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform01();

  /// Standard normal via Box-Muller; consumes two words per pair, the
  /// second value of each pair is buffered.
  double normal();

  std::uint64_t master_seed() const { return key0_; }
  std::uint64_t stream_id() const { return key1_; }

 private:
  void refill();

  std::uint64_t key0_;
  std::uint64_t key1_;
  std::array<std::uint64_t, 4> counter_{{0, 0, 0, 0}};
  std::array<std::uint64_t, 4> buf_{};
  int pos_ = 4;
  double pending_normal_ = 0.0;
  bool has_pending_normal_ = false;
};

/// Gaussian increment of a standard Wiener process: mean 0, variance dt.
double wiener_increment(RngStream& rng, double dt);

}  // namespace dqsr::noise
