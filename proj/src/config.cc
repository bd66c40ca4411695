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

#include "bwsim/config.h"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

namespace bwsim {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value,
                            std::string_view expected) {
  throw ConfigError(fmt::format("{}: expected {}, got '{}'", key, expected,
                                value));
}

double to_double(std::string_view key, std::string_view v) {
  const std::string s(v);
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(s, &used);
  } catch (const std::exception&) {
    bad_value(key, v, "a number");
  }
  if (used != s.size() || !std::isfinite(d)) bad_value(key, v, "a number");
  return d;
}

long long to_int(std::string_view key, std::string_view v) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(key, v, "an integer");
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v, "true|false");
}

void require(bool ok, std::string_view key, std::string_view what) {
  if (!ok) throw ConfigError(fmt::format("{}: {}", key, what));
}

std::string num(double d) { return fmt::format("{}", d); }

std::string_view to_string(Traffic t) {
  return t == Traffic::kDownload ? "download" : "upload";
}

std::string_view to_string(RequestMix::Mode m) {
  switch (m) {
    case RequestMix::Mode::kAggregateOnly:
      return "aggregate";
    case RequestMix::Mode::kIncrementalOnly:
      return "incremental";
    case RequestMix::Mode::kOnePerK:
      return "one_per_k";
    case RequestMix::Mode::kTimerRefresh:
      return "timer";
  }
  return "aggregate";
}

Preset parse_preset(std::string_view key, std::string_view v) {
  if (v == "download_only") return Preset::kDownloadOnly;
  if (v == "upload_only_mixed") return Preset::kUploadOnlyMixed;
  if (v == "queue_sweep") return Preset::kQueueSweep;
  if (v == "loss_sweep") return Preset::kLossSweep;
  if (v == "replay") return Preset::kReplay;
  if (v == "custom") return Preset::kCustom;
  bad_value(key, v,
            "download_only|upload_only_mixed|queue_sweep|loss_sweep|replay|custom");
}

std::string join_seeds(const std::vector<std::uint64_t>& seeds) {
  std::string out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(seeds[i]);
  }
  return out;
}

std::vector<std::uint64_t> parse_seeds(std::string_view key,
                                       std::string_view v) {
  std::vector<std::uint64_t> seeds;
  std::size_t start = 0;
  while (start <= v.size()) {
    const auto comma = v.find(',', start);
    const auto tok = trim(v.substr(start, comma == std::string_view::npos
                                              ? std::string_view::npos
                                              : comma - start));
    std::uint64_t s = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), s);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
      bad_value(key, v, "comma-separated non-negative integers");
    }
    seeds.push_back(s);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return seeds;
}

struct KeySpec {
  std::string name;
  std::function<std::string(const ScenarioConfig&)> get;
  std::function<void(ScenarioConfig&, std::string_view)> set;
};

const std::vector<KeySpec>& key_table() {
  using C = ScenarioConfig;
  using V = std::string_view;
  static const std::vector<KeySpec> table = {
      {"preset", [](const C& c) { return std::string(to_string(c.preset)); },
       [](C& c, V v) { c.preset = parse_preset("preset", v); }},
      {"traffic", [](const C& c) { return std::string(to_string(c.traffic)); },
       [](C& c, V v) {
         if (v == "download") c.traffic = Traffic::kDownload;
         else if (v == "upload") c.traffic = Traffic::kUpload;
         else bad_value("traffic", v, "download|upload");
       }},
      {"n_ss", [](const C& c) { return std::to_string(c.n_ss); },
       [](C& c, V v) {
         const auto n = to_int("n_ss", v);
         require(n >= 1 && n <= 4096, "n_ss", "must lie in [1, 4096]");
         c.n_ss = static_cast<int>(n);
       }},
      {"policy", [](const C& c) { return std::string(to_string(c.policy)); },
       [](C& c, V v) {
         auto p = parse_policy(v);
         if (!p) bad_value("policy", v, "RPG|DPG|DPG-priority|DDA-i|DDA-d");
         c.policy = *p;
       }},
      {"request_mix", [](const C& c) { return std::string(to_string(c.mix.mode)); },
       [](C& c, V v) {
         if (v == "aggregate") c.mix.mode = RequestMix::Mode::kAggregateOnly;
         else if (v == "incremental") c.mix.mode = RequestMix::Mode::kIncrementalOnly;
         else if (v == "one_per_k") c.mix.mode = RequestMix::Mode::kOnePerK;
         else if (v == "timer") c.mix.mode = RequestMix::Mode::kTimerRefresh;
         else bad_value("request_mix", v, "aggregate|incremental|one_per_k|timer");
       }},
      {"mix_k", [](const C& c) { return std::to_string(c.mix.k); },
       [](C& c, V v) {
         const auto k = to_int("mix_k", v);
         require(k >= 1, "mix_k", "must be >= 1");
         c.mix.k = static_cast<int>(k);
       }},
      {"mix_refresh_frames", [](const C& c) { return std::to_string(c.mix.refresh_frames); },
       [](C& c, V v) {
         const auto k = to_int("mix_refresh_frames", v);
         require(k >= 1, "mix_refresh_frames", "must be >= 1");
         c.mix.refresh_frames = k;
       }},
      {"bs_queue_limit", [](const C& c) { return std::to_string(c.bs_queue_limit); },
       [](C& c, V v) {
         const auto n = to_int("bs_queue_limit", v);
         require(n >= 1, "bs_queue_limit", "must be >= 1");
         c.bs_queue_limit = static_cast<std::size_t>(n);
       }},
      {"ss_queue_limit", [](const C& c) { return std::to_string(c.ss_queue_limit); },
       [](C& c, V v) {
         const auto n = to_int("ss_queue_limit", v);
         require(n >= 1, "ss_queue_limit", "must be >= 1");
         c.ss_queue_limit = static_cast<std::size_t>(n);
       }},
      {"frame_duration_ms", [](const C& c) { return num(c.phy.frame_duration_s * 1e3); },
       [](C& c, V v) {
         const double d = to_double("frame_duration_ms", v);
         require(d > 0.0, "frame_duration_ms", "must be positive");
         c.phy.frame_duration_s = d / 1e3;
       }},
      {"channel_bandwidth_mhz", [](const C& c) { return num(c.phy.channel_bandwidth_hz / 1e6); },
       [](C& c, V v) {
         const double d = to_double("channel_bandwidth_mhz", v);
         require(d > 0.0, "channel_bandwidth_mhz", "must be positive");
         c.phy.channel_bandwidth_hz = d * 1e6;
       }},
      {"modulation_bits", [](const C& c) { return std::to_string(c.phy.modulation_bits_per_symbol); },
       [](C& c, V v) {
         const auto b = to_int("modulation_bits", v);
         require(b == 1 || b == 2 || b == 4 || b == 6, "modulation_bits",
                 "must be 1, 2, 4 or 6");
         c.phy.modulation_bits_per_symbol = static_cast<int>(b);
       }},
      {"coding_rate", [](const C& c) { return num(c.phy.coding_rate); },
       [](C& c, V v) {
         const double d = to_double("coding_rate", v);
         require(d > 0.0 && d <= 1.0, "coding_rate", "must lie in (0, 1]");
         c.phy.coding_rate = d;
       }},
      {"dl_ul_ratio", [](const C& c) { return num(c.dl_ul_ratio); },
       [](C& c, V v) {
         const double d = to_double("dl_ul_ratio", v);
         require(d > 0.0, "dl_ul_ratio", "must be positive");
         c.dl_ul_ratio = d;
       }},
      {"dl_ul_ratio_mode",
       [](const C& c) {
         return std::string(c.ratio_mode == RatioMode::kFraction ? "fraction" : "quotient");
       },
       [](C& c, V v) {
         if (v == "fraction") c.ratio_mode = RatioMode::kFraction;
         else if (v == "quotient") c.ratio_mode = RatioMode::kQuotient;
         else bad_value("dl_ul_ratio_mode", v, "fraction|quotient");
       }},
      {"dl_capacity_bytes", [](const C& c) { return std::to_string(c.dl_capacity_bytes); },
       [](C& c, V v) {
         const auto n = to_int("dl_capacity_bytes", v);
         require(n >= 0, "dl_capacity_bytes", "must be >= 0 (0 derives from the PHY)");
         c.dl_capacity_bytes = n;
       }},
      {"ul_capacity_bytes", [](const C& c) { return std::to_string(c.ul_capacity_bytes); },
       [](C& c, V v) {
         const auto n = to_int("ul_capacity_bytes", v);
         require(n >= 0, "ul_capacity_bytes", "must be >= 0 (0 derives from the PHY)");
         c.ul_capacity_bytes = n;
       }},
      {"contention_slots", [](const C& c) { return std::to_string(c.phy.contention_slots_per_frame); },
       [](C& c, V v) {
         const auto n = to_int("contention_slots", v);
         require(n >= 1 && n <= 1024, "contention_slots", "must lie in [1, 1024]");
         c.phy.contention_slots_per_frame = static_cast<int>(n);
       }},
      {"bytes_per_contention_slot", [](const C& c) { return std::to_string(c.phy.bytes_per_contention_slot); },
       [](C& c, V v) {
         const auto n = to_int("bytes_per_contention_slot", v);
         require(n >= 0, "bytes_per_contention_slot", "must be >= 0");
         c.phy.bytes_per_contention_slot = n;
       }},
      {"ge_p_g", [](const C& c) { return num(c.ge.p_g); },
       [](C& c, V v) {
         const double d = to_double("ge_p_g", v);
         require(d >= 0.0 && d <= 1.0, "ge_p_g", "must lie in [0, 1]");
         c.ge.p_g = d;
       }},
      {"ge_p_b", [](const C& c) { return num(c.ge.p_b); },
       [](C& c, V v) {
         const double d = to_double("ge_p_b", v);
         require(d >= 0.0 && d <= 1.0, "ge_p_b", "must lie in [0, 1]");
         c.ge.p_b = d;
       }},
      {"ge_p_gb", [](const C& c) { return num(c.ge.p_gb); },
       [](C& c, V v) {
         const double d = to_double("ge_p_gb", v);
         require(d >= 0.0 && d <= 1.0, "ge_p_gb", "must lie in [0, 1]");
         c.ge.p_gb = d;
       }},
      {"ge_p_bg", [](const C& c) { return num(c.ge.p_bg); },
       [](C& c, V v) {
         const double d = to_double("ge_p_bg", v);
         require(d >= 0.0 && d <= 1.0, "ge_p_bg", "must lie in [0, 1]");
         c.ge.p_bg = d;
       }},
      {"channel_scope",
       [](const C& c) {
         return std::string(c.channel_scope == ChannelScope::kShared ? "shared" : "per_ss");
       },
       [](C& c, V v) {
         if (v == "shared") c.channel_scope = ChannelScope::kShared;
         else if (v == "per_ss") c.channel_scope = ChannelScope::kPerSs;
         else bad_value("channel_scope", v, "shared|per_ss");
       }},
      {"cw_min", [](const C& c) { return std::to_string(c.cw_min); },
       [](C& c, V v) {
         const auto n = to_int("cw_min", v);
         require(n >= 1 && n <= 65536, "cw_min", "must lie in [1, 65536]");
         c.cw_min = static_cast<int>(n);
       }},
      {"cw_max", [](const C& c) { return std::to_string(c.cw_max); },
       [](C& c, V v) {
         const auto n = to_int("cw_max", v);
         require(n >= 1 && n <= 65536, "cw_max", "must lie in [1, 65536]");
         c.cw_max = static_cast<int>(n);
       }},
      {"t16_ms", [](const C& c) { return num(c.t16_s * 1e3); },
       [](C& c, V v) {
         const double d = to_double("t16_ms", v);
         require(d > 0.0, "t16_ms", "must be positive");
         c.t16_s = d / 1e3;
       }},
      {"map_latency_frames", [](const C& c) { return std::to_string(c.map_latency_frames); },
       [](C& c, V v) {
         const auto n = to_int("map_latency_frames", v);
         require(n >= 1 && n <= 64, "map_latency_frames", "must lie in [1, 64]");
         c.map_latency_frames = static_cast<int>(n);
       }},
      {"tcp_mss", [](const C& c) { return std::to_string(c.tcp.mss); },
       [](C& c, V v) {
         const auto n = to_int("tcp_mss", v);
         require(n >= 1 && n <= 65535, "tcp_mss", "must lie in [1, 65535]");
         c.tcp.mss = static_cast<std::uint32_t>(n);
       }},
      {"tcp_header_bytes", [](const C& c) { return std::to_string(c.tcp.header_bytes); },
       [](C& c, V v) {
         const auto n = to_int("tcp_header_bytes", v);
         require(n >= 1 && n <= 1500, "tcp_header_bytes", "must lie in [1, 1500]");
         c.tcp.header_bytes = static_cast<std::uint32_t>(n);
       }},
      {"tcp_initial_cwnd_segments", [](const C& c) { return num(c.tcp.initial_cwnd_segments); },
       [](C& c, V v) {
         const double d = to_double("tcp_initial_cwnd_segments", v);
         require(d >= 1.0, "tcp_initial_cwnd_segments", "must be >= 1");
         c.tcp.initial_cwnd_segments = d;
       }},
      {"tcp_initial_ssthresh_bytes", [](const C& c) { return std::to_string(c.tcp.initial_ssthresh); },
       [](C& c, V v) {
         const auto n = to_int("tcp_initial_ssthresh_bytes", v);
         require(n >= 1, "tcp_initial_ssthresh_bytes", "must be positive");
         c.tcp.initial_ssthresh = n;
       }},
      {"tcp_receiver_window_bytes", [](const C& c) { return std::to_string(c.tcp.receiver_window); },
       [](C& c, V v) {
         const auto n = to_int("tcp_receiver_window_bytes", v);
         require(n >= 1, "tcp_receiver_window_bytes", "must be positive");
         c.tcp.receiver_window = n;
       }},
      {"tcp_rto_initial_ms", [](const C& c) { return num(c.tcp.rto_initial_s * 1e3); },
       [](C& c, V v) {
         const double d = to_double("tcp_rto_initial_ms", v);
         require(d > 0.0, "tcp_rto_initial_ms", "must be positive");
         c.tcp.rto_initial_s = d / 1e3;
       }},
      {"tcp_rto_min_ms", [](const C& c) { return num(c.tcp.rto_min_s * 1e3); },
       [](C& c, V v) {
         const double d = to_double("tcp_rto_min_ms", v);
         require(d > 0.0, "tcp_rto_min_ms", "must be positive");
         c.tcp.rto_min_s = d / 1e3;
       }},
      {"tcp_rto_max_s", [](const C& c) { return num(c.tcp.rto_max_s); },
       [](C& c, V v) {
         const double d = to_double("tcp_rto_max_s", v);
         require(d > 0.0, "tcp_rto_max_s", "must be positive");
         c.tcp.rto_max_s = d;
       }},
      {"tcp_delack_ms", [](const C& c) { return num(c.tcp.delack_s * 1e3); },
       [](C& c, V v) {
         const double d = to_double("tcp_delack_ms", v);
         require(d > 0.0, "tcp_delack_ms", "must be positive");
         c.tcp.delack_s = d / 1e3;
       }},
      {"wired_rate_mbps", [](const C& c) { return num(c.wired_rate_bps / 1e6); },
       [](C& c, V v) {
         const double d = to_double("wired_rate_mbps", v);
         require(d > 0.0, "wired_rate_mbps", "must be positive");
         c.wired_rate_bps = d * 1e6;
       }},
      {"wired_delay_ms", [](const C& c) { return num(c.wired_delay_s * 1e3); },
       [](C& c, V v) {
         const double d = to_double("wired_delay_ms", v);
         require(d >= 0.0, "wired_delay_ms", "must be >= 0");
         c.wired_delay_s = d / 1e3;
       }},
      {"flow_start_max_s", [](const C& c) { return num(c.flow_start_max_s); },
       [](C& c, V v) {
         const double d = to_double("flow_start_max_s", v);
         require(d >= 0.0, "flow_start_max_s", "must be >= 0");
         c.flow_start_max_s = d;
       }},
      {"warmup_s", [](const C& c) { return num(c.warmup_s); },
       [](C& c, V v) {
         const double d = to_double("warmup_s", v);
         require(d >= 0.0, "warmup_s", "must be >= 0");
         c.warmup_s = d;
       }},
      {"duration_s", [](const C& c) { return num(c.duration_s); },
       [](C& c, V v) {
         const double d = to_double("duration_s", v);
         require(d >= 0.0, "duration_s", "must be >= 0");
         c.duration_s = d;
       }},
      {"seeds", [](const C& c) { return join_seeds(c.seeds); },
       [](C& c, V v) { c.seeds = parse_seeds("seeds", v); }},
      {"record_events", [](const C& c) { return std::string(c.record_events ? "true" : "false"); },
       [](C& c, V v) { c.record_events = to_bool("record_events", v); }},
      {"trace", [](const C& c) { return c.trace_path; },
       [](C& c, V v) { c.trace_path = std::string(v); }},
      {"golden", [](const C& c) { return c.golden_path; },
       [](C& c, V v) { c.golden_path = std::string(v); }},
  };
  return table;
}

}  // namespace

std::string_view to_string(Preset p) {
  switch (p) {
    case Preset::kDownloadOnly:
      return "download_only";
    case Preset::kUploadOnlyMixed:
      return "upload_only_mixed";
    case Preset::kQueueSweep:
      return "queue_sweep";
    case Preset::kLossSweep:
      return "loss_sweep";
    case Preset::kReplay:
      return "replay";
    case Preset::kCustom:
      return "custom";
  }
  return "custom";
}

FrameIndex ScenarioConfig::frames() const {
  return std::llround(duration_s / phy.frame_duration_s);
}

FrameIndex ScenarioConfig::warmup_frames() const {
  return std::min<FrameIndex>(frames(), std::llround(warmup_s / phy.frame_duration_s));
}

FrameIndex ScenarioConfig::t16_frames() const {
  return std::max<FrameIndex>(1, std::llround(t16_s / phy.frame_duration_s));
}

PhyProfile ScenarioConfig::resolved_phy() const {
  PhyProfile p = phy;
  p.dl_fraction = ratio_mode == RatioMode::kFraction
                      ? dl_ul_ratio
                      : dl_ul_ratio / (1.0 + dl_ul_ratio);
  if (dl_capacity_bytes > 0) p.dl_capacity = dl_capacity_bytes;
  if (ul_capacity_bytes > 0) p.ul_capacity = ul_capacity_bytes;
  return p;
}

SubframeCapacities ScenarioConfig::capacities() const {
  return subframe_capacities(resolved_phy());
}

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  return serialize(a) == serialize(b);
}

ScenarioConfig preset_config(Preset p) {
  ScenarioConfig c;
  c.preset = p;
  switch (p) {
    case Preset::kDownloadOnly:
      c.traffic = Traffic::kDownload;
      c.mix.mode = RequestMix::Mode::kAggregateOnly;
      break;
    case Preset::kUploadOnlyMixed:
      c.traffic = Traffic::kUpload;
      c.mix.mode = RequestMix::Mode::kOnePerK;
      c.mix.k = 50;
      break;
    case Preset::kQueueSweep:
      c.traffic = Traffic::kDownload;
      c.mix.mode = RequestMix::Mode::kAggregateOnly;
      c.ss_queue_limit = 20;
      break;
    case Preset::kLossSweep:
      c.traffic = Traffic::kDownload;
      c.mix.mode = RequestMix::Mode::kAggregateOnly;
      c.ge = {0.0, 0.0, 0.5, 0.5};
      break;
    case Preset::kReplay:
    case Preset::kCustom:
      break;
  }
  return c;
}

void set_config_value(ScenarioConfig& cfg, std::string_view key,
                      std::string_view value) {
  const std::string k = trim(key);
  const std::string v = trim(value);
  if (k == "p_loss") {
    // Derived key: picks ge_p_b so that the average loss equals the value.
    const double target = to_double("p_loss", v);
    require(target >= 0.0 && target <= 1.0, "p_loss", "must lie in [0, 1]");
    const auto pi = steady_state(cfg.ge.p_gb, cfg.ge.p_bg);
    require(pi.bad > 0.0, "p_loss", "needs a reachable bad state (ge_p_gb > 0)");
    const double p_b = (target - pi.good * cfg.ge.p_g) / pi.bad;
    require(p_b >= -1e-12 && p_b <= 1.0 + 1e-12, "p_loss",
            "not reachable with the current ge_p_g / transition probabilities");
    cfg.ge.p_b = std::clamp(p_b, 0.0, 1.0);
    return;
  }
  for (const auto& spec : key_table()) {
    if (spec.name == k) {
      spec.set(cfg, v);
      return;
    }
  }
  throw ConfigError(fmt::format("{}: unknown key", k));
}

void validate(const ScenarioConfig& c) {
  require(c.cw_min <= c.cw_max, "cw_max", "must be >= cw_min");
  require(c.n_ss >= 1, "n_ss", "must be >= 1");
  require(c.phy.frame_duration_s > 0.0, "frame_duration_ms", "must be positive");
  require(!c.seeds.empty(), "seeds", "needs at least one seed");
  if (c.ratio_mode == RatioMode::kFraction) {
    require(c.dl_ul_ratio > 0.0 && c.dl_ul_ratio < 1.0, "dl_ul_ratio",
            "as a fraction must lie strictly between 0 and 1");
  }
  try {
    c.capacities();
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("dl_capacity_bytes/ul_capacity_bytes: {}",
                                  e.what()));
  }
  try {
    c.ge.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("ge_p_gb/ge_p_bg: {}", e.what()));
  }
  const auto caps = c.capacities();
  const Bytes largest = c.tcp.mss + c.tcp.header_bytes;
  require(caps.dl >= largest, "dl_capacity_bytes",
          "must hold at least one full TCP segment");
  require(caps.ul >= largest, "ul_capacity_bytes",
          "must hold at least one full TCP segment");
  if (c.preset == Preset::kReplay) {
    require(!c.trace_path.empty(), "trace", "is required by the replay preset");
  }
}

std::string serialize(const ScenarioConfig& cfg) {
  std::string out;
  for (const auto& spec : key_table()) {
    out += spec.name;
    out += " = ";
    out += spec.get(cfg);
    out += '\n';
  }
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& spec : key_table()) keys.push_back(spec.name);
  keys.emplace_back("p_loss");
  return keys;
}

ScenarioConfig parse_config(
    std::istream& in,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    const std::string text = trim(raw);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("line {}: expected 'key = value'", line));
    }
    pairs.emplace_back(trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
  }
  for (const auto& kv : overrides) pairs.push_back(kv);

  // The last `preset` wins and seeds the defaults.
  ScenarioConfig cfg = preset_config(Preset::kCustom);
  for (const auto& [k, v] : pairs) {
    if (k == "preset") cfg = preset_config(parse_preset("preset", v));
  }
  for (const auto& [k, v] : pairs) {
    if (k != "preset") set_config_value(cfg, k, v);
  }
  validate(cfg);
  return cfg;
}

ScenarioConfig load_config(
    const std::string& path,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
  if (path.empty()) {
    std::istringstream empty;
    return parse_config(empty, overrides);
  }
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("config: cannot open '{}'", path));
  return parse_config(in, overrides);
}

}  // namespace bwsim
