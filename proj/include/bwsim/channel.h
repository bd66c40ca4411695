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

#ifndef BWSIM_CHANNEL_H_
#define BWSIM_CHANNEL_H_

#include <optional>
#include <random>

#include "bwsim/types.h"

namespace bwsim {

using Rng = std::mt19937_64;

// PHY parameters reduced to per-subframe byte budgets. When the explicit
// capacities are set they win over the OFDM-derived values.
struct PhyProfile {
  double channel_bandwidth_hz = 7e6;
  int modulation_bits_per_symbol = 6;  // 64-QAM
  double coding_rate = 0.75;
  double frame_duration_s = 0.005;
  double dl_fraction = 0.5;
  int contention_slots_per_frame = 8;
  Bytes bytes_per_contention_slot = 108;

  int fft_size = 256;
  int data_subcarriers = 192;
  double sampling_factor = 8.0 / 7.0;
  double guard_fraction = 1.0 / 8.0;

  std::optional<Bytes> dl_capacity;
  std::optional<Bytes> ul_capacity;
};

struct SubframeCapacities {
  Bytes dl = 0;
  Bytes ul = 0;
};

// OFDM symbols that fit in one frame (whole symbols only).
int ofdm_symbols_per_frame(const PhyProfile& profile);

// Throws ConfigError when a derived or explicit capacity is not positive or
// dl_fraction is outside (0, 1).
SubframeCapacities subframe_capacities(const PhyProfile& profile);

struct StationaryDistribution {
  double good = 0.0;
  double bad = 0.0;
};

// Stationary distribution of the two-state chain. Throws ConfigError when
// both transition probabilities are zero.
StationaryDistribution steady_state(double p_gb, double p_bg);

// Long-run packet loss probability of the chain.
double average_loss(double p_g, double p_b, double pi_g, double pi_b);

struct GilbertElliottParams {
  double p_g = 0.0;   // loss probability in the good state
  double p_b = 0.0;   // loss probability in the bad state
  double p_gb = 0.0;  // good -> bad, per transmission
  double p_bg = 1.0;  // bad -> good, per transmission

  void validate() const;
  double loss_rate() const;
  bool lossless() const { return p_g == 0.0 && p_b == 0.0; }
};

enum class TransmissionKind : std::uint8_t { kDataPdu, kBwRequest };

struct Transmission {
  Bytes payload_bytes = 0;
  TransmissionKind kind = TransmissionKind::kDataPdu;
  SsId source = 0;
  SsId destination = 0;
};

// Two-state Markov loss process. The state advances once per transmission.
class GilbertElliottChannel {
 public:
  enum class State : std::uint8_t { kGood, kBad };

  GilbertElliottChannel(const GilbertElliottParams& params, State initial);
  // Starts from a draw of the stationary distribution.
  GilbertElliottChannel(const GilbertElliottParams& params, Rng& rng);

  bool transmit(const Transmission& t, Rng& rng);

  State state() const { return state_; }
  const GilbertElliottParams& params() const { return params_; }

 private:
  GilbertElliottParams params_;
  State state_;
};

}  // namespace bwsim

#endif  // BWSIM_CHANNEL_H_
