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

#include "bwsim/metrics.h"

#include <fmt/format.h>

#include <ostream>
#include <stdexcept>

namespace bwsim {

double aggregated_throughput(std::span<const Bytes> per_flow_delivered,
                             double window_s) {
  if (!(window_s > 0.0)) {
    throw std::invalid_argument("measurement window must be positive");
  }
  Bytes total = 0;
  for (Bytes b : per_flow_delivered) total += b;
  return static_cast<double>(total) * 8.0 / window_s;
}

double collision_probability(std::int64_t collided_tx, std::int64_t total_tx) {
  if (total_tx <= 0) return 0.0;
  return static_cast<double>(collided_tx) / static_cast<double>(total_tx);
}

double t16_rate(std::int64_t expirations, int n_ss, double window_s) {
  if (n_ss <= 0 || !(window_s > 0.0)) {
    throw std::invalid_argument("t16_rate needs n_ss > 0 and a positive window");
  }
  return static_cast<double>(expirations) / (n_ss * window_s);
}

Counters Counters::minus(const Counters& e) const {
  Counters d;
  d.request_attempts = request_attempts - e.request_attempts;
  d.request_collided = request_collided - e.request_collided;
  d.requests_lost = requests_lost - e.requests_lost;
  d.contention_periods_active =
      contention_periods_active - e.contention_periods_active;
  d.contention_periods_collided =
      contention_periods_collided - e.contention_periods_collided;
  d.t16_expirations = t16_expirations - e.t16_expirations;
  d.desync_events = desync_events - e.desync_events;
  d.wasted_grant_bytes = wasted_grant_bytes - e.wasted_grant_bytes;
  d.granted_bytes = granted_bytes - e.granted_bytes;
  d.bs_drops = bs_drops - e.bs_drops;
  d.ss_drops = ss_drops - e.ss_drops;
  d.tcp_timeouts = tcp_timeouts - e.tcp_timeouts;
  d.delivered.resize(delivered.size());
  for (std::size_t i = 0; i < delivered.size(); ++i) {
    d.delivered[i] =
        delivered[i] - (i < e.delivered.size() ? e.delivered[i] : 0);
  }
  return d;
}

MetricsReport MetricsReport::from_counters(const Counters& window, int n_ss,
                                           double window_s) {
  MetricsReport r;
  r.window_s = window_s;
  r.counts = window;
  if (window_s <= 0.0 || n_ss <= 0) return r;
  r.aggregated_throughput_bps = aggregated_throughput(window.delivered, window_s);
  r.collision_probability =
      bwsim::collision_probability(window.request_collided, window.request_attempts);
  r.collision_probability_per_period = bwsim::collision_probability(
      window.contention_periods_collided, window.contention_periods_active);
  r.t16_expirations_per_ss_per_s = t16_rate(window.t16_expirations, n_ss, window_s);
  r.per_flow_goodput_bps.reserve(window.delivered.size());
  for (Bytes b : window.delivered) {
    r.per_flow_goodput_bps.push_back(static_cast<double>(b) * 8.0 / window_s);
  }
  return r;
}

std::string csv_header() {
  return "scenario,policy,n_ss,seed,queue_limit,p_loss,throughput_bps,"
         "collision_prob,t16_rate,desync_events,wasted_grant_bytes,drops";
}

std::string csv_row(const RunSummary& run) {
  const auto& m = run.metrics;
  return fmt::format("{},{},{},{},{},{:.6f},{:.3f},{:.6f},{:.6f},{},{},{}",
                     run.scenario, to_string(run.policy), run.n_ss, run.seed,
                     run.queue_limit, run.p_loss, m.aggregated_throughput_bps,
                     m.collision_probability, m.t16_expirations_per_ss_per_s,
                     m.counts.desync_events, m.counts.wasted_grant_bytes,
                     m.counts.bs_drops + m.counts.ss_drops);
}

void write_csv(std::ostream& os, std::span<const RunSummary> runs) {
  os << csv_header() << '\n';
  for (const auto& r : runs) os << csv_row(r) << '\n';
}

}  // namespace bwsim
