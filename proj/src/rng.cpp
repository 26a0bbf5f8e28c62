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

#include "dqsr/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dqsr::noise {

namespace {

constexpr std::uint64_t kMult0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMult1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void round_once(std::array<std::uint64_t, 4>& c, std::uint64_t k0,
                       std::uint64_t k1) {
  const unsigned __int128 p0 = static_cast<unsigned __int128>(kMult0) * c[0];
  const unsigned __int128 p1 = static_cast<unsigned __int128>(kMult1) * c[2];
  const std::uint64_t hi0 = static_cast<std::uint64_t>(p0 >> 64);
  const std::uint64_t lo0 = static_cast<std::uint64_t>(p0);
  const std::uint64_t hi1 = static_cast<std::uint64_t>(p1 >> 64);
  const std::uint64_t lo1 = static_cast<std::uint64_t>(p1);
  c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
}

}  // namespace

std::array<std::uint64_t, 4> Philox4x64::block(
    const std::array<std::uint64_t, 4>& counter, std::uint64_t key0,
    std::uint64_t key1) {
  std::array<std::uint64_t, 4> c = counter;
  std::uint64_t k0 = key0;
  std::uint64_t k1 = key1;
  for (int r = 0; r < 10; ++r) {
    round_once(c, k0, k1);
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return c;
}

void RngStream::refill() {
  // 256-bit little-endian counter increment
  if (++counter_[0] == 0)
    if (++counter_[1] == 0)
      if (++counter_[2] == 0) ++counter_[3];
  buf_ = Philox4x64::block(counter_, key0_, key1_);
  pos_ = 0;
}

std::uint64_t RngStream::next_u64() {
  if (pos_ >= 4) refill();
  return buf_[pos_++];
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_pending_normal_) {
    has_pending_normal_ = false;
    return pending_normal_;
  }
  // u1 in (0, 1] keeps the log finite
  const double u1 =
      (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  pending_normal_ = r * std::sin(theta);
  has_pending_normal_ = true;
  return r * std::cos(theta);
}

double wiener_increment(RngStream& rng, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("wiener_increment: dt <= 0");
  return rng.normal() * std::sqrt(dt);
}

}  // namespace dqsr::noise
