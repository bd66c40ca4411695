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

#include "bwsim/engine.h"

#include <fmt/format.h>

#include <algorithm>
#include <random>

namespace bwsim {
namespace {

enum Stream : std::uint64_t {
  kFlowStream = 1,
  kBackoffStream = 2,
  kDlChannelStream = 3,
  kUlChannelStream = 4,
};

Cid cid_of(SsId ss) { return ss + 1; }

}  // namespace

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  // SplitMix64 finalizer over the (seed, stream) pair.
  std::uint64_t z = seed + stream * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string_view to_string(FramePhase p) {
  switch (p) {
    case FramePhase::kWired:
      return "wired";
    case FramePhase::kDownlink:
      return "downlink";
    case FramePhase::kContention:
      return "contention";
    case FramePhase::kUplinkData:
      return "uplink";
    case FramePhase::kBsBookkeeping:
      return "bs";
  }
  return "?";
}

std::string_view to_string(EventType t) {
  switch (t) {
    case EventType::kFlowStart:
      return "flow_start";
    case EventType::kDlDelivered:
      return "dl_delivered";
    case EventType::kDlLost:
      return "dl_lost";
    case EventType::kGrantSpent:
      return "grant_spent";
    case EventType::kRequestSent:
      return "request_sent";
    case EventType::kRequestCollided:
      return "request_collided";
    case EventType::kRequestLost:
      return "request_lost";
    case EventType::kRequestDelivered:
      return "request_delivered";
    case EventType::kUlDelivered:
      return "ul_delivered";
    case EventType::kUlLost:
      return "ul_lost";
    case EventType::kGrantIssued:
      return "grant_issued";
  }
  return "?";
}

std::string EventRecord::to_line() const {
  return fmt::format("{} {} {} {} ss={} {} {}", frame, ordinal, to_string(phase),
                     to_string(type), ss, a, b);
}

RunSummary SimulationReport::summary() const {
  RunSummary s;
  s.scenario = scenario;
  s.policy = policy;
  s.n_ss = n_ss;
  s.seed = seed;
  s.queue_limit = queue_limit;
  s.p_loss = p_loss;
  s.metrics = metrics;
  return s;
}

std::string SimulationReport::event_log_text() const {
  std::string out;
  for (const auto& e : events) {
    out += e.to_line();
    out += '\n';
  }
  return out;
}

Simulation::Simulation(const ScenarioConfig& cfg, std::uint64_t seed,
                       bool record_events)
    : cfg_(cfg),
      seed_(seed),
      record_(record_events),
      bpm_(cfg.policy),
      to_bs_(cfg.wired_rate_bps, cfg.wired_delay_s),
      to_server_(cfg.wired_rate_bps, cfg.wired_delay_s) {
  validate(cfg_);
  clock_.frame_duration_s = cfg_.phy.frame_duration_s;
  total_frames_ = cfg_.frames();
  warmup_frames_ = cfg_.warmup_frames();
  caps_ = cfg_.capacities();
  slots_per_frame_ = cfg_.phy.contention_slots_per_frame;
  lossless_ = cfg_.ge.lossless();
  download_ = cfg_.traffic == Traffic::kDownload;

  flow_rng_.seed(stream_seed(seed, kFlowStream));
  backoff_rng_.seed(stream_seed(seed, kBackoffStream));
  dl_rng_.seed(stream_seed(seed, kDlChannelStream));
  ul_rng_.seed(stream_seed(seed, kUlChannelStream));

  const auto n = static_cast<std::size_t>(cfg_.n_ss);
  if (!lossless_) {
    const std::size_t channels =
        cfg_.channel_scope == ChannelScope::kShared ? 1 : n;
    for (std::size_t i = 0; i < channels; ++i) {
      dl_channels_.emplace_back(cfg_.ge, dl_rng_);
      ul_channels_.emplace_back(cfg_.ge, ul_rng_);
    }
  }

  SsMacConfig mac;
  mac.mix = cfg_.mix;
  mac.cw_min = cfg_.cw_min;
  mac.cw_max = cfg_.cw_max;
  mac.t16_frames = cfg_.t16_frames();

  std::uniform_real_distribution<double> start(0.0, cfg_.flow_start_max_s);
  for (SsId ss = 0; ss < n; ++ss) {
    stations_.emplace_back(ss, mac);
    stations_.back().add_connection(cid_of(ss), 0, cfg_.ss_queue_limit);
    bpm_.table().add_connection(cid_of(ss), ss, 0);
    DlQueue q;
    q.cid = cid_of(ss);
    q.ss = ss;
    q.limit = cfg_.bs_queue_limit;
    dl_queues_.push_back(std::move(q));
    senders_.emplace_back(ss, cfg_.tcp);
    receivers_.emplace_back(ss, cfg_.tcp);
    start_times_.push_back(cfg_.flow_start_max_s > 0.0 ? start(flow_rng_)
                                                       : 0.0);
  }

  map_ring_.resize(static_cast<std::size_t>(cfg_.map_latency_frames) + 1);
  slots_.resize(static_cast<std::size_t>(slots_per_frame_));
  uses_.resize(n);
  grant_for_.assign(n, nullptr);
  stats_.grant_spent.assign(n, 0);
  stats_.ul_sent.assign(n, 0);
  stats_.dl_capacity = caps_.dl;
  stats_.ul_capacity = caps_.ul;
  counters_.delivered.assign(n, 0);
}

void Simulation::log(FramePhase phase, EventType type, SsId ss,
                     std::int64_t a, std::int64_t b) {
  if (!record_) return;
  events_.push_back({clock_.frame_index, ordinal_++, phase, type, ss, a, b});
}

bool Simulation::channel_delivers(std::vector<GilbertElliottChannel>& channels,
                                  Rng& rng, SsId ss, Bytes bytes,
                                  TransmissionKind kind) {
  if (lossless_) return true;
  auto& ch = channels.size() == 1 ? channels.front() : channels[ss];
  return ch.transmit({bytes, kind, ss, 0}, rng);
}

void Simulation::from_server(const Packet& p, double t) { to_bs_.send(p, t); }

void Simulation::from_station(SsId ss, const Packet& p) {
  stations_[ss].enqueue(cid_of(ss), p);
}

void Simulation::phase_wired(double t) {
  wired_.clear();
  to_bs_.deliver_due(t, wired_);
  for (const Packet& p : wired_) enqueue_dl(dl_queues_[p.flow], p);

  wired_.clear();
  to_server_.deliver_due(t, wired_);
  for (const Packet& p : wired_) {
    if (download_) {
      scratch_.clear();
      senders_[p.flow].on_ack(p.seq, t, scratch_);
      for (const Packet& out : scratch_) from_server(out, t);
    } else if (auto ack = receivers_[p.flow].on_segment(p, t)) {
      from_server(*ack, t);
    }
  }

  for (SsId ss = 0; ss < stations_.size(); ++ss) {
    TcpSender& snd = senders_[ss];
    scratch_.clear();
    if (!snd.started()) {
      if (t + 1e-12 >= start_times_[ss]) {
        snd.start(t, scratch_);
        log(FramePhase::kWired, EventType::kFlowStart, ss, 0);
      }
    } else {
      snd.check_timer(t, scratch_);
    }
    for (const Packet& out : scratch_) {
      if (download_) {
        from_server(out, t);
      } else {
        from_station(ss, out);
      }
    }
    if (auto ack = receivers_[ss].check_timer(t)) {
      if (download_) {
        from_station(ss, *ack);
      } else {
        from_server(*ack, t);
      }
    }
  }
}

void Simulation::phase_downlink(double t) {
  dl_schedule(dl_queues_, caps_.dl, dl_cursor_, dispatch_);
  stats_.dl_dispatched = 0;
  for (const DlDispatch& d : dispatch_) {
    const SsId ss = dl_queues_[d.queue].ss;
    for (const Packet& p : d.packets) {
      stats_.dl_dispatched += p.wire_bytes;
      if (!channel_delivers(dl_channels_, dl_rng_, ss, p.wire_bytes,
                            TransmissionKind::kDataPdu)) {
        log(FramePhase::kDownlink, EventType::kDlLost, ss, p.seq);
        continue;
      }
      log(FramePhase::kDownlink, EventType::kDlDelivered, ss, p.seq);
      if (download_) {
        if (auto ack = receivers_[p.flow].on_segment(p, t)) {
          from_station(ss, *ack);
        }
      } else {
        scratch_.clear();
        senders_[p.flow].on_ack(p.seq, t, scratch_);
        for (const Packet& out : scratch_) from_station(ss, out);
      }
    }
  }

  // SS schedulers spend the grants announced for this frame.
  auto& due = map_ring_[static_cast<std::size_t>(clock_.frame_index) %
                        map_ring_.size()];
  std::fill(stats_.grant_spent.begin(), stats_.grant_spent.end(), 0);
  std::fill(grant_for_.begin(), grant_for_.end(), nullptr);
  for (const Grant& g : due) {
    if (g.effective_frame == clock_.frame_index) grant_for_[g.ss] = &g;
  }
  for (SsId ss = 0; ss < stations_.size(); ++ss) {
    const Grant* g = grant_for_[ss];
    uses_[ss] = stations_[ss].on_frame(clock_.frame_index, g);
    stats_.ul_sent[ss] = uses_[ss].sent_bytes;
    if (g != nullptr) {
      stats_.grant_spent[ss] = g->bytes;
      counters_.wasted_grant_bytes += uses_[ss].wasted_bytes;
      log(FramePhase::kDownlink, EventType::kGrantSpent, ss, g->bytes,
          uses_[ss].sent_bytes);
    }
  }
  due.clear();
}

void Simulation::phase_contention() {
  for (auto& s : slots_) s.clear();
  for (auto& st : stations_) {
    st.contend(clock_.frame_index, slots_per_frame_, backoff_rng_, slots_);
  }
  ContentionOutcome out;
  if (lossless_) {
    out = resolve_contention(slots_);
  } else {
    out = resolve_contention(slots_, [this](const ContentionAttempt& a) {
      return channel_delivers(ul_channels_, ul_rng_, a.ss, a.request.size,
                              TransmissionKind::kBwRequest);
    });
  }
  counters_.request_attempts += out.attempts;
  counters_.request_collided += out.collided;
  counters_.requests_lost += out.lost;
  if (out.attempts > 0) ++counters_.contention_periods_active;
  if (out.any_collision) ++counters_.contention_periods_collided;

  if (record_) {
    for (std::size_t slot = 0; slot < slots_.size(); ++slot) {
      for (const auto& a : slots_[slot]) {
        log(FramePhase::kContention, EventType::kRequestSent, a.ss,
            static_cast<std::int64_t>(slot), a.request.size);
        if (slots_[slot].size() > 1) {
          log(FramePhase::kContention, EventType::kRequestCollided, a.ss,
              static_cast<std::int64_t>(slot));
        }
      }
    }
  }
  for (const auto& a : out.delivered) {
    log(FramePhase::kContention, EventType::kRequestDelivered, a.ss,
        a.request.size,
        a.request.kind == RequestKind::kAggregate ? 1 : 0);
    bpm_.apply_request(a.request);
  }
}

void Simulation::phase_uplink(double t) {
  for (SsId ss = 0; ss < stations_.size(); ++ss) {
    for (const SentPacket& sp : uses_[ss].sent) {
      const Packet& p = sp.packet;
      if (!channel_delivers(ul_channels_, ul_rng_, ss, p.wire_bytes,
                            TransmissionKind::kDataPdu)) {
        log(FramePhase::kUplinkData, EventType::kUlLost, ss, p.seq);
        continue;
      }
      log(FramePhase::kUplinkData, EventType::kUlDelivered, ss, p.seq,
          p.wire_bytes);
      bpm_.on_data_arrival(sp.cid, p.wire_bytes);
      to_server_.send(p, t);
    }
    uses_[ss].sent.clear();
  }
}

void Simulation::phase_bookkeeping() {
  bpm_.flush_pending();
  const FrameIndex effective = clock_.frame_index + cfg_.map_latency_frames;
  auto grants = ul_schedule(bpm_, caps_.ul, ul_cursor_, effective);
  stats_.granted = 0;
  for (const Grant& g : grants) {
    stats_.granted += g.bytes;
    log(FramePhase::kBsBookkeeping, EventType::kGrantIssued, g.ss, g.bytes,
        g.effective_frame);
  }
  counters_.granted_bytes += stats_.granted;
  auto& slot =
      map_ring_[static_cast<std::size_t>(effective) % map_ring_.size()];
  slot.insert(slot.end(), grants.begin(), grants.end());
}

void Simulation::step() {
  if (done()) return;
  if (!warm_taken_ && clock_.frame_index >= warmup_frames_) {
    warm_ = counters();
    warm_taken_ = true;
  }
  ordinal_ = 0;
  stats_.frame = clock_.frame_index;
  const double t = clock_.now();
  phase_wired(t);
  phase_downlink(t);
  phase_contention();
  phase_uplink(t);
  phase_bookkeeping();
  ++clock_.frame_index;
}

bool Simulation::grant_outstanding(SsId ss) const {
  for (const auto& slot : map_ring_) {
    for (const Grant& g : slot) {
      if (g.ss == ss && g.effective_frame >= clock_.frame_index) return true;
    }
  }
  return false;
}

Counters Simulation::counters() const {
  Counters c = counters_;
  c.desync_events = bpm_.table().clamp_events();
  for (std::size_t i = 0; i < stations_.size(); ++i) {
    c.t16_expirations += stations_[i].t16_expirations();
    c.ss_drops += stations_[i].drops();
    c.bs_drops += dl_queues_[i].drops;
    c.tcp_timeouts += senders_[i].timeouts();
    c.delivered[i] = receivers_[i].delivered_bytes();
  }
  return c;
}

SimulationReport Simulation::finish() {
  while (!done()) step();
  if (!warm_taken_) {
    warm_ = counters();
    warm_taken_ = true;
  }
  SimulationReport r;
  r.seed = seed_;
  r.scenario = std::string(to_string(cfg_.preset));
  r.policy = cfg_.policy;
  r.n_ss = cfg_.n_ss;
  r.queue_limit = cfg_.bs_queue_limit;
  r.p_loss = cfg_.p_loss();
  r.frames = total_frames_;
  r.elapsed_s = clock_.now();
  r.totals = counters();
  const double window =
      static_cast<double>(total_frames_ - warmup_frames_) *
      cfg_.phy.frame_duration_s;
  r.metrics = MetricsReport::from_counters(r.totals.minus(warm_), cfg_.n_ss,
                                           window);
  r.protocol_errors = bpm_.table().protocol_errors();
  for (const auto& s : senders_) r.protocol_errors += s.protocol_errors();
  r.events = std::move(events_);
  events_.clear();
  return r;
}

SimulationReport run(const ScenarioConfig& cfg, std::uint64_t seed,
                     const RunOptions& options) {
  Simulation sim(cfg, seed, options.record_events);
  while (!sim.done()) {
    sim.step();
    if (options.observer) options.observer(sim);
  }
  return sim.finish();
}

}  // namespace bwsim
