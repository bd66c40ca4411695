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

#ifndef BWSIM_ENGINE_H_
#define BWSIM_ENGINE_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bwsim/bpm.h"
#include "bwsim/bs_mac.h"
#include "bwsim/channel.h"
#include "bwsim/config.h"
#include "bwsim/metrics.h"
#include "bwsim/ss_mac.h"
#include "bwsim/tcp.h"

namespace bwsim {

struct FrameClock {
  FrameIndex frame_index = 0;
  double frame_duration_s = 0.005;

  double now() const {
    return static_cast<double>(frame_index) * frame_duration_s;
  }
};

inline double now(const FrameClock& clock) { return clock.now(); }

// Order of work inside one frame. kWired covers wired-side arrivals, TCP
// timers and flow starts, which all happen at the frame boundary.
enum class FramePhase : std::uint8_t {
  kWired = 0,
  kDownlink = 1,
  kContention = 2,
  kUplinkData = 3,
  kBsBookkeeping = 4,
};

enum class EventType : std::uint8_t {
  kFlowStart,
  kDlDelivered,
  kDlLost,
  kGrantSpent,
  kRequestSent,
  kRequestCollided,
  kRequestLost,
  kRequestDelivered,
  kUlDelivered,
  kUlLost,
  kGrantIssued,
};

std::string_view to_string(FramePhase p);
std::string_view to_string(EventType t);

struct EventRecord {
  FrameIndex frame = 0;
  std::uint32_t ordinal = 0;  // position within the frame
  FramePhase phase = FramePhase::kWired;
  EventType type = EventType::kFlowStart;
  SsId ss = 0;
  std::int64_t a = 0;
  std::int64_t b = 0;

  std::string to_line() const;
  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

// Per-frame figures for observers and invariant checks.
struct FrameStats {
  FrameIndex frame = 0;
  Bytes dl_capacity = 0;
  Bytes ul_capacity = 0;
  Bytes dl_dispatched = 0;
  Bytes granted = 0;                // grants issued in phase 4
  std::vector<Bytes> grant_spent;   // per SS, grant in effect this frame
  std::vector<Bytes> ul_sent;       // per SS, bytes sent in the UL burst
};

struct SimulationReport {
  std::uint64_t seed = 0;
  std::string scenario;
  PolicyKind policy = PolicyKind::kDdaD;
  int n_ss = 0;
  std::size_t queue_limit = 0;
  double p_loss = 0.0;

  FrameIndex frames = 0;
  double elapsed_s = 0.0;
  MetricsReport metrics;
  Counters totals;  // whole run, warm-up included
  std::int64_t protocol_errors = 0;
  std::vector<EventRecord> events;

  RunSummary summary() const;
  std::string event_log_text() const;
};

class Simulation {
 public:
  // Throws ConfigError when `cfg` does not validate.
  Simulation(const ScenarioConfig& cfg, std::uint64_t seed,
             bool record_events = false);

  bool done() const { return clock_.frame_index >= total_frames_; }
  // Executes one frame in phase order.
  void step();
  SimulationReport finish();

  const ScenarioConfig& config() const { return cfg_; }
  const FrameClock& clock() const { return clock_; }
  const PerceptionManager& bpm() const { return bpm_; }
  const std::vector<SsMac>& stations() const { return stations_; }
  const std::vector<DlQueue>& dl_queues() const { return dl_queues_; }
  const std::vector<TcpSender>& senders() const { return senders_; }
  const std::vector<TcpReceiver>& receivers() const { return receivers_; }
  const FrameStats& last_frame() const { return stats_; }
  const std::vector<EventRecord>& events() const { return events_; }
  // A grant for `ss` has been scheduled but not yet spent.
  bool grant_outstanding(SsId ss) const;
  Counters counters() const;

 private:
  void phase_wired(double t);
  void phase_downlink(double t);
  void phase_contention();
  void phase_uplink(double t);
  void phase_bookkeeping();

  void from_server(const Packet& p, double t);   // server output
  void from_station(SsId ss, const Packet& p);   // SS-side TCP output
  bool channel_delivers(std::vector<GilbertElliottChannel>& channels,
                        Rng& rng, SsId ss, Bytes bytes,
                        TransmissionKind kind);
  void log(FramePhase phase, EventType type, SsId ss, std::int64_t a,
           std::int64_t b = 0);

  ScenarioConfig cfg_;
  std::uint64_t seed_;
  bool record_;
  FrameClock clock_;
  FrameIndex total_frames_;
  FrameIndex warmup_frames_;
  SubframeCapacities caps_;
  int slots_per_frame_;
  bool lossless_;
  bool download_;

  Rng flow_rng_;
  Rng backoff_rng_;
  Rng dl_rng_;
  Rng ul_rng_;
  std::vector<GilbertElliottChannel> dl_channels_;
  std::vector<GilbertElliottChannel> ul_channels_;

  PerceptionManager bpm_;
  std::vector<SsMac> stations_;
  std::vector<DlQueue> dl_queues_;
  RoundRobinCursor dl_cursor_;
  RoundRobinCursor ul_cursor_;
  std::vector<std::vector<Grant>> map_ring_;  // indexed by frame % size

  std::vector<TcpSender> senders_;
  std::vector<TcpReceiver> receivers_;
  std::vector<double> start_times_;
  WiredLink to_bs_;      // server -> BS
  WiredLink to_server_;  // BS -> server

  Counters counters_;
  Counters warm_;
  bool warm_taken_ = false;

  FrameStats stats_;
  std::vector<GrantUse> uses_;
  std::vector<const Grant*> grant_for_;
  std::vector<std::vector<ContentionAttempt>> slots_;
  std::vector<DlDispatch> dispatch_;
  std::vector<Packet> scratch_;
  std::vector<Packet> wired_;

  std::vector<EventRecord> events_;
  std::uint32_t ordinal_ = 0;
};

struct RunOptions {
  bool record_events = false;
  // Called after every frame.
  std::function<void(const Simulation&)> observer;
};

// Runs frames 0..F-1. Equal (scenario, seed) pairs give identical reports.
SimulationReport run(const ScenarioConfig& cfg, std::uint64_t seed,
                     const RunOptions& options = {});

// Independent seed for one random stream of a run.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace bwsim

#endif  // BWSIM_ENGINE_H_
