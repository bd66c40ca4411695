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

#ifndef BWSIM_SS_MAC_H_
#define BWSIM_SS_MAC_H_

#include <cstddef>
#include <deque>
#include <optional>
#include <vector>

#include "bwsim/bs_mac.h"
#include "bwsim/channel.h"
#include "bwsim/types.h"

namespace bwsim {

// Per-connection transmit queue at the SS (drop-tail).
struct SsQueue {
  Cid cid = 0;
  int priority = 0;
  std::size_t limit = 50;
  std::deque<Packet> packets;
  Bytes backlog = 0;  // wire bytes queued
  std::int64_t offered = 0;  // accepted + dropped
  std::int64_t sent = 0;
  std::int64_t dropped = 0;
};

bool enqueue_ss(SsQueue& q, const Packet& packet);

// Truncated binary exponential backoff over contention slots.
struct BackoffState {
  int cw = 8;
  int cw_min = 8;
  int cw_max = 128;
  int countdown = 0;
  int retries = 0;
  bool pending = false;  // a request waits for a contention slot
  bool drawn = false;    // countdown has been drawn for this attempt
};

// Draws the countdown on the first call of an attempt, then consumes up to
// `contention_slots` per frame. Returns the slot used this frame, if any.
std::optional<int> contention_tick(BackoffState& b, int contention_slots,
                                   Rng& rng);

// Doubles the window up to cw_max after a presumed request loss.
void on_t16_expiry(BackoffState& b);

struct ReservationTimer {
  std::optional<FrameIndex> armed_at;
  FrameIndex timeout = 20;

  void arm(FrameIndex now) { armed_at = now; }
  void disarm() { armed_at.reset(); }
  bool armed() const { return armed_at.has_value(); }
  bool expired(FrameIndex now) const {
    return armed_at && now - *armed_at >= timeout;
  }
};

struct RequestMix {
  enum class Mode : std::uint8_t {
    kAggregateOnly,
    kIncrementalOnly,
    kOnePerK,
    kTimerRefresh,
  };
  Mode mode = Mode::kAggregateOnly;
  int k = 50;                           // kOnePerK
  FrameIndex refresh_frames = 20;       // kTimerRefresh
};

// Per-connection request bookkeeping used by generate_request.
struct RequestCounter {
  std::int64_t issued = 0;
  std::optional<FrameIndex> last_aggregate;
};

// True when the next request of this connection would be aggregate.
bool next_request_is_aggregate(const RequestMix& mix,
                               const RequestCounter& counter, FrameIndex now,
                               bool force_aggregate);

// Builds the next request: incremental(new_bytes) or, when the mix calls for
// it (or `force_aggregate`), aggregate(current backlog).
BwRequest generate_request(const SsQueue& q, Bytes new_bytes,
                           const RequestMix& mix, RequestCounter& counter,
                           FrameIndex now, bool force_aggregate = false);

struct SentPacket {
  Cid cid = 0;
  Packet packet;
};

struct GrantUse {
  std::vector<SentPacket> sent;
  Bytes sent_bytes = 0;
  Bytes wasted_bytes = 0;
};

// Drains queues in ascending priority rank, FIFO within a queue, whole
// packets only; stops at the first packet that does not fit.
GrantUse spend_grant(std::vector<SsQueue>& queues, Bytes granted);

struct SsMacConfig {
  RequestMix mix;
  int cw_min = 8;
  int cw_max = 128;
  FrameIndex t16_frames = 20;
};

// Subscriber-station MAC: queues, request generation, contention and T16.
class SsMac {
 public:
  SsMac(SsId id, const SsMacConfig& config);

  SsId id() const { return id_; }
  void add_connection(Cid cid, int priority, std::size_t queue_limit);

  // Queues a packet; on acceptance the connection starts contending if it
  // is idle. Returns false when the packet is dropped.
  bool enqueue(Cid cid, const Packet& packet);

  // SS scheduler for one frame: spends `grant` (if any), handles T16 and
  // schedules follow-up requests. Returns the uplink burst.
  GrantUse on_frame(FrameIndex now, const Grant* grant);

  // Contention phase: appends this SS's transmissions to `slots`.
  void contend(FrameIndex now, int contention_slots, Rng& rng,
               std::vector<std::vector<ContentionAttempt>>& slots);

  const std::vector<SsQueue>& queues() const { return queues_; }
  Bytes backlog() const;

  std::int64_t t16_expirations() const { return t16_expirations_; }
  std::int64_t requests_sent() const { return requests_sent_; }
  std::int64_t drops() const;
  Bytes wasted_grant_bytes() const { return wasted_bytes_; }

  // Inspection for tests.
  const BackoffState& backoff(Cid cid) const;
  const ReservationTimer& timer(Cid cid) const;
  bool waiting_for_grant() const;
  // No connection is contending and every queued byte has been reported.
  bool quiescent() const;

 private:
  struct Agent {
    BackoffState backoff;
    ReservationTimer timer;
    RequestCounter counter;
    Bytes unrequested = 0;
    Bytes outstanding = 0;  // requested bytes not yet answered by grants
    bool force_aggregate = false;
  };

  std::size_t index_of(Cid cid) const;
  bool wants_request(std::size_t i, FrameIndex now) const;
  void start_contention(std::size_t i);

  SsId id_;
  SsMacConfig config_;
  std::vector<SsQueue> queues_;  // sorted by priority rank
  std::vector<Agent> agents_;    // parallel to queues_
  std::int64_t t16_expirations_ = 0;
  std::int64_t requests_sent_ = 0;
  Bytes wasted_bytes_ = 0;
};

}  // namespace bwsim

#endif  // BWSIM_SS_MAC_H_
