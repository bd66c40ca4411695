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

#include "bwsim/ss_mac.h"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace bwsim {

bool enqueue_ss(SsQueue& q, const Packet& packet) {
  ++q.offered;
  if (q.packets.size() >= q.limit) {
    ++q.dropped;
    return false;
  }
  q.packets.push_back(packet);
  q.backlog += packet.wire_bytes;
  return true;
}

std::optional<int> contention_tick(BackoffState& b, int contention_slots,
                                   Rng& rng) {
  if (!b.pending) return std::nullopt;
  if (!b.drawn) {
    std::uniform_int_distribution<int> draw(0, b.cw - 1);
    b.countdown = draw(rng);
    b.drawn = true;
  }
  if (b.countdown < contention_slots) {
    const int slot = b.countdown;
    b.countdown = 0;
    b.pending = false;
    b.drawn = false;
    return slot;
  }
  b.countdown -= contention_slots;
  return std::nullopt;
}

void on_t16_expiry(BackoffState& b) {
  b.cw = std::min(2 * b.cw, b.cw_max);
  ++b.retries;
}

bool next_request_is_aggregate(const RequestMix& mix,
                               const RequestCounter& counter, FrameIndex now,
                               bool force_aggregate) {
  if (force_aggregate) return true;
  switch (mix.mode) {
    case RequestMix::Mode::kAggregateOnly:
      return true;
    case RequestMix::Mode::kIncrementalOnly:
      return false;
    case RequestMix::Mode::kOnePerK:
      return (counter.issued + 1) % mix.k == 0;
    case RequestMix::Mode::kTimerRefresh:
      return !counter.last_aggregate ||
             now - *counter.last_aggregate >= mix.refresh_frames;
  }
  return true;
}

BwRequest generate_request(const SsQueue& q, Bytes new_bytes,
                           const RequestMix& mix, RequestCounter& counter,
                           FrameIndex now, bool force_aggregate) {
  const bool aggregate =
      next_request_is_aggregate(mix, counter, now, force_aggregate);
  ++counter.issued;
  if (aggregate) {
    counter.last_aggregate = now;
    return {q.cid, q.backlog, RequestKind::kAggregate, now};
  }
  return {q.cid, new_bytes, RequestKind::kIncremental, now};
}

GrantUse spend_grant(std::vector<SsQueue>& queues, Bytes granted) {
  GrantUse use;
  Bytes left = granted;
  for (auto& q : queues) {
    while (!q.packets.empty() &&
           static_cast<Bytes>(q.packets.front().wire_bytes) <= left) {
      const Packet p = q.packets.front();
      q.packets.pop_front();
      q.backlog -= p.wire_bytes;
      ++q.sent;
      left -= p.wire_bytes;
      use.sent_bytes += p.wire_bytes;
      use.sent.push_back({q.cid, p});
    }
    if (!q.packets.empty()) break;
  }
  use.wasted_bytes = left;
  return use;
}

SsMac::SsMac(SsId id, const SsMacConfig& config) : id_(id), config_(config) {
  if (config_.cw_min < 1 || config_.cw_max < config_.cw_min) {
    throw ConfigError("cw_min must be >= 1 and <= cw_max");
  }
}

void SsMac::add_connection(Cid cid, int priority, std::size_t queue_limit) {
  SsQueue q;
  q.cid = cid;
  q.priority = priority;
  q.limit = queue_limit;
  Agent a;
  a.backoff.cw = a.backoff.cw_min = config_.cw_min;
  a.backoff.cw_max = config_.cw_max;
  a.timer.timeout = config_.t16_frames;
  // Keep both vectors ordered by priority rank.
  auto pos = std::upper_bound(
      queues_.begin(), queues_.end(), priority,
      [](int p, const SsQueue& other) { return p < other.priority; });
  const auto offset = pos - queues_.begin();
  queues_.insert(pos, std::move(q));
  agents_.insert(agents_.begin() + offset, a);
}

std::size_t SsMac::index_of(Cid cid) const {
  for (std::size_t i = 0; i < queues_.size(); ++i) {
    if (queues_[i].cid == cid) return i;
  }
  throw std::out_of_range("SS " + std::to_string(id_) +
                          " has no connection " + std::to_string(cid));
}

bool SsMac::enqueue(Cid cid, const Packet& packet) {
  const std::size_t i = index_of(cid);
  if (!enqueue_ss(queues_[i], packet)) return false;
  Agent& a = agents_[i];
  a.unrequested += packet.wire_bytes;
  if (!a.backoff.pending && !a.timer.armed()) start_contention(i);
  return true;
}

void SsMac::start_contention(std::size_t i) {
  agents_[i].backoff.pending = true;
  agents_[i].backoff.drawn = false;
}

bool SsMac::wants_request(std::size_t i, FrameIndex now) const {
  const Agent& a = agents_[i];
  if (next_request_is_aggregate(config_.mix, a.counter, now,
                                a.force_aggregate)) {
    return queues_[i].backlog > 0 || a.force_aggregate;
  }
  return a.unrequested > 0;
}

GrantUse SsMac::on_frame(FrameIndex now, const Grant* grant) {
  GrantUse use;
  if (grant != nullptr) {
    use = spend_grant(queues_, grant->bytes);
    wasted_bytes_ += use.wasted_bytes;
    // Grants are per SS. A grant resets backoff for every connection; the
    // timer is released once the requested bytes are covered and restarted
    // otherwise, so a forgotten remainder ends in a T16 expiry.
    Bytes left = grant->bytes;
    for (auto& a : agents_) {
      const Bytes used = std::min(left, a.outstanding);
      a.outstanding -= used;
      left -= used;
      a.backoff.cw = a.backoff.cw_min;
      a.backoff.retries = 0;
      if (a.outstanding == 0) {
        a.timer.disarm();
      } else if (a.timer.armed()) {
        a.timer.arm(now);
      }
    }
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      if (!agents_[i].backoff.pending && wants_request(i, now)) {
        start_contention(i);
      }
    }
  }
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    Agent& a = agents_[i];
    if (!a.timer.expired(now)) continue;
    ++t16_expirations_;
    a.timer.disarm();
    on_t16_expiry(a.backoff);
    a.force_aggregate = true;
    start_contention(i);
  }
  return use;
}

void SsMac::contend(FrameIndex now, int contention_slots, Rng& rng,
                    std::vector<std::vector<ContentionAttempt>>& slots) {
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    Agent& a = agents_[i];
    const auto slot = contention_tick(a.backoff, contention_slots, rng);
    if (!slot) continue;
    const SsQueue& q = queues_[i];
    const bool aggregate = next_request_is_aggregate(config_.mix, a.counter,
                                                     now, a.force_aggregate);
    // Nothing left to report: the slot goes unused.
    if (aggregate ? (q.backlog == 0 && !a.force_aggregate)
                  : a.unrequested == 0) {
      continue;
    }
    const BwRequest req = generate_request(q, a.unrequested, config_.mix,
                                           a.counter, now, a.force_aggregate);
    slots[static_cast<std::size_t>(*slot)].push_back({id_, req});
    ++requests_sent_;
    a.outstanding = req.kind == RequestKind::kAggregate
                        ? req.size
                        : a.outstanding + req.size;
    a.unrequested = 0;
    a.force_aggregate = false;
    a.timer.arm(now);
  }
}

Bytes SsMac::backlog() const {
  Bytes sum = 0;
  for (const auto& q : queues_) sum += q.backlog;
  return sum;
}

std::int64_t SsMac::drops() const {
  std::int64_t sum = 0;
  for (const auto& q : queues_) sum += q.dropped;
  return sum;
}

const BackoffState& SsMac::backoff(Cid cid) const {
  return agents_[index_of(cid)].backoff;
}

const ReservationTimer& SsMac::timer(Cid cid) const {
  return agents_[index_of(cid)].timer;
}

bool SsMac::waiting_for_grant() const {
  return std::any_of(agents_.begin(), agents_.end(),
                     [](const Agent& a) { return a.timer.armed(); });
}

bool SsMac::quiescent() const {
  return std::none_of(agents_.begin(), agents_.end(), [](const Agent& a) {
    return a.backoff.pending || a.unrequested > 0 || a.force_aggregate;
  });
}

}  // namespace bwsim
