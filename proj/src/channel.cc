// Copyright 2026 The bwsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bwsim/channel.h"

#include <cmath>
#include <string>

namespace bwsim {
namespace {

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError(std::string(name) + " must lie in [0, 1], got " +
                      std::to_string(p));
  }
}

}  // namespace

int ofdm_symbols_per_frame(const PhyProfile& profile) {
  if (profile.channel_bandwidth_hz <= 0.0) {
    throw ConfigError("channel_bandwidth_hz must be positive");
  }
  if (profile.fft_size <= 0) throw ConfigError("fft_size must be positive");
  if (profile.frame_duration_s <= 0.0) {
    throw ConfigError("frame_duration_s must be positive");
  }
  // Sampling frequency is rounded down to a multiple of 8 kHz.
  const double fs =
      std::floor(profile.sampling_factor * profile.channel_bandwidth_hz /
                 8000.0) *
      8000.0;
  const double useful_symbol_s = profile.fft_size / fs;
  const double symbol_s = useful_symbol_s * (1.0 + profile.guard_fraction);
  // Small epsilon so that exact multiples are not lost to rounding.
  return static_cast<int>(
      std::floor(profile.frame_duration_s / symbol_s + 1e-9));
}

SubframeCapacities subframe_capacities(const PhyProfile& profile) {
  if (!(profile.dl_fraction > 0.0 && profile.dl_fraction < 1.0)) {
    throw ConfigError("dl_fraction must lie strictly between 0 and 1");
  }
  if (profile.contention_slots_per_frame < 0) {
    throw ConfigError("contention_slots must be non-negative");
  }
  SubframeCapacities caps;
  if (profile.dl_capacity && profile.ul_capacity) {
    caps.dl = *profile.dl_capacity;
    caps.ul = *profile.ul_capacity;
  } else {
    const int symbols = ofdm_symbols_per_frame(profile);
    const double symbols_per_second = symbols / profile.frame_duration_s;
    const double raw_rate = symbols_per_second *
                            profile.modulation_bits_per_symbol *
                            profile.data_subcarriers * profile.coding_rate /
                            8.0;
    const auto total = static_cast<Bytes>(
        std::floor(raw_rate * profile.frame_duration_s + 1e-9));
    const auto dl = static_cast<Bytes>(
        std::floor(static_cast<double>(total) * profile.dl_fraction));
    caps.dl = profile.dl_capacity.value_or(dl);
    caps.ul = profile.ul_capacity.value_or(
        total - dl -
        profile.contention_slots_per_frame * profile.bytes_per_contention_slot);
  }
  if (caps.dl <= 0) throw ConfigError("dl_capacity must be positive");
  if (caps.ul <= 0) throw ConfigError("ul_capacity must be positive");
  return caps;
}

StationaryDistribution steady_state(double p_gb, double p_bg) {
  check_probability(p_gb, "ge_p_gb");
  check_probability(p_bg, "ge_p_bg");
  const double sum = p_gb + p_bg;
  if (sum <= 0.0) {
    throw ConfigError("degenerate Gilbert-Elliott chain: ge_p_gb + ge_p_bg = 0");
  }
  return {p_bg / sum, p_gb / sum};
}

double average_loss(double p_g, double p_b, double pi_g, double pi_b) {
  return pi_g * p_g + pi_b * p_b;
}

void GilbertElliottParams::validate() const {
  check_probability(p_g, "ge_p_g");
  check_probability(p_b, "ge_p_b");
  steady_state(p_gb, p_bg);
}

double GilbertElliottParams::loss_rate() const {
  const auto pi = steady_state(p_gb, p_bg);
  return average_loss(p_g, p_b, pi.good, pi.bad);
}

GilbertElliottChannel::GilbertElliottChannel(const GilbertElliottParams& params,
                                             State initial)
    : params_(params), state_(initial) {
  params_.validate();
}

GilbertElliottChannel::GilbertElliottChannel(const GilbertElliottParams& params,
                                             Rng& rng)
    : params_(params), state_(State::kGood) {
  params_.validate();
  const auto pi = steady_state(params_.p_gb, params_.p_bg);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  state_ = u(rng) < pi.good ? State::kGood : State::kBad;
}

bool GilbertElliottChannel::transmit(const Transmission& /*t*/, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double loss = state_ == State::kGood ? params_.p_g : params_.p_b;
  const bool delivered = !(u(rng) < loss);
  const double leave = state_ == State::kGood ? params_.p_gb : params_.p_bg;
  if (u(rng) < leave) {
    state_ = state_ == State::kGood ? State::kBad : State::kGood;
  }
  return delivered;
}

}  // namespace bwsim
