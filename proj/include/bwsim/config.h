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

#ifndef BWSIM_CONFIG_H_
#define BWSIM_CONFIG_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bwsim/channel.h"
#include "bwsim/ss_mac.h"
#include "bwsim/tcp.h"
#include "bwsim/types.h"

namespace bwsim {

enum class Preset : std::uint8_t {
  kDownloadOnly,
  kUploadOnlyMixed,
  kQueueSweep,
  kLossSweep,
  kReplay,
  kCustom,
};

enum class Traffic : std::uint8_t { kDownload, kUpload };

// How the DL:UL ratio setting maps onto the DL share of the frame.
enum class RatioMode : std::uint8_t {
  kFraction,  // ratio is the DL fraction of the frame
  kQuotient,  // ratio is DL/UL, so DL fraction = r / (1 + r)
};

enum class ChannelScope : std::uint8_t { kShared, kPerSs };

std::string_view to_string(Preset p);

struct ScenarioConfig {
  Preset preset = Preset::kCustom;
  Traffic traffic = Traffic::kDownload;
  int n_ss = 10;
  PolicyKind policy = PolicyKind::kDdaD;
  RequestMix mix;

  std::size_t bs_queue_limit = 50;
  std::size_t ss_queue_limit = 50;

  PhyProfile phy;
  double dl_ul_ratio = 0.5;
  RatioMode ratio_mode = RatioMode::kFraction;
  Bytes dl_capacity_bytes = 7000;  // 0 derives the budget from the OFDM PHY
  Bytes ul_capacity_bytes = 7000;

  GilbertElliottParams ge;
  ChannelScope channel_scope = ChannelScope::kShared;

  int cw_min = 8;
  int cw_max = 128;
  double t16_s = 0.1;
  int map_latency_frames = 1;

  TcpConfig tcp;
  double wired_rate_bps = 100e6;
  double wired_delay_s = 0.005;
  double flow_start_max_s = 5.0;

  double warmup_s = 50.0;
  double duration_s = 1000.0;
  std::vector<std::uint64_t> seeds{1};
  bool record_events = false;

  // Replay preset only.
  std::string trace_path;
  std::string golden_path;

  FrameIndex frames() const;
  FrameIndex warmup_frames() const;
  FrameIndex t16_frames() const;
  // PHY profile with dl_fraction and explicit capacities resolved.
  PhyProfile resolved_phy() const;
  SubframeCapacities capacities() const;
  double p_loss() const { return ge.loss_rate(); }

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&);
};

// Defaults for a preset.
ScenarioConfig preset_config(Preset p);

// Sets one `key = value` pair. Throws ConfigError naming the key for unknown
// keys, malformed values or out-of-range values.
void set_config_value(ScenarioConfig& cfg, std::string_view key,
                      std::string_view value);

// Range checks across fields; throws ConfigError naming the offending key.
void validate(const ScenarioConfig& cfg);

// Flat `key = value` text, one key per line, every key present.
std::string serialize(const ScenarioConfig& cfg);

// Parses a config text. A `preset` key is applied before all other keys;
// `overrides` are applied last. The result is validated.
ScenarioConfig parse_config(
    std::istream& in,
    const std::vector<std::pair<std::string, std::string>>& overrides = {});

// Reads a file (empty path: preset defaults only) and applies overrides.
ScenarioConfig load_config(
    const std::string& path,
    const std::vector<std::pair<std::string, std::string>>& overrides = {});

// Keys accepted by set_config_value, in serialization order.
std::vector<std::string> config_keys();

}  // namespace bwsim

#endif  // BWSIM_CONFIG_H_
