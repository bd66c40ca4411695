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

#ifndef BWSIM_METRICS_H_
#define BWSIM_METRICS_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bwsim/types.h"

namespace bwsim {

// Sum of in-order delivered payload over the window, in bit/s. Throws
// std::invalid_argument for a non-positive window.
double aggregated_throughput(std::span<const Bytes> per_flow_delivered,
                             double window_s);

// Collided BW-REQ transmissions over all BW-REQ transmissions; 0 when idle.
double collision_probability(std::int64_t collided_tx, std::int64_t total_tx);

// T16 expirations per SS per second.
double t16_rate(std::int64_t expirations, int n_ss, double window_s);

// Monotone event counters of one run. Metrics are differences of two
// snapshots (measurement start and end).
struct Counters {
  std::int64_t request_attempts = 0;
  std::int64_t request_collided = 0;
  std::int64_t requests_lost = 0;
  std::int64_t contention_periods_active = 0;
  std::int64_t contention_periods_collided = 0;
  std::int64_t t16_expirations = 0;
  std::int64_t desync_events = 0;
  Bytes wasted_grant_bytes = 0;
  Bytes granted_bytes = 0;
  std::int64_t bs_drops = 0;
  std::int64_t ss_drops = 0;
  std::int64_t tcp_timeouts = 0;
  std::vector<Bytes> delivered;  // per flow, payload bytes

  Counters minus(const Counters& earlier) const;
};

struct MetricsReport {
  double window_s = 0.0;
  double aggregated_throughput_bps = 0.0;
  double collision_probability = 0.0;
  // Alternative reading: collided contention periods / active periods.
  double collision_probability_per_period = 0.0;
  double t16_expirations_per_ss_per_s = 0.0;
  std::vector<double> per_flow_goodput_bps;
  Counters counts;  // over the measurement window

  static MetricsReport from_counters(const Counters& window, int n_ss,
                                     double window_s);
};

// One CSV row. Column order is fixed by csv_header().
struct RunSummary {
  std::string scenario;
  PolicyKind policy = PolicyKind::kDdaD;
  int n_ss = 0;
  std::uint64_t seed = 0;
  std::size_t queue_limit = 0;
  double p_loss = 0.0;
  MetricsReport metrics;
};

std::string csv_header();
std::string csv_row(const RunSummary& run);
void write_csv(std::ostream& os, std::span<const RunSummary> runs);

}  // namespace bwsim

#endif  // BWSIM_METRICS_H_
