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

#ifndef BWSIM_BS_MAC_H_
#define BWSIM_BS_MAC_H_

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <vector>

#include "bwsim/bpm.h"
#include "bwsim/channel.h"
#include "bwsim/types.h"

namespace bwsim {

// Uplink allocation for one SS, announced in a UL-MAP.
struct Grant {
  SsId ss = 0;
  Bytes bytes = 0;
  FrameIndex effective_frame = 0;

  friend bool operator==(const Grant&, const Grant&) = default;
};

// Drop-tail FIFO of packets waiting for the downlink subframe.
struct DlQueue {
  Cid cid = 0;
  SsId ss = 0;
  std::size_t limit = 50;
  std::deque<Packet> packets;
  std::int64_t drops = 0;
  std::int64_t offered = 0;  // accepted + dropped
};

bool enqueue_dl(DlQueue& q, const Packet& packet);

struct ContentionAttempt {
  SsId ss = 0;
  BwRequest request;
};

struct ContentionOutcome {
  std::vector<ContentionAttempt> delivered;  // in slot order
  std::int64_t attempts = 0;
  std::int64_t collided = 0;   // transmissions that shared a slot
  std::int64_t lost = 0;       // sole occupants dropped by the channel
  bool any_collision = false;  // at least one slot collided this period
};

// Decides whether a lone request survives the air interface.
using ChannelFilter = std::function<bool(const ContentionAttempt&)>;

// One entry per contention slot. A request gets through only when it is
// alone in its slot and `survives` (if set) delivers it. Collided requests
// do not touch the channel.
ContentionOutcome resolve_contention(
    std::span<const std::vector<ContentionAttempt>> slots,
    const ChannelFilter& survives = {});

// Same, through a single Gilbert-Elliott channel.
ContentionOutcome resolve_contention(
    std::span<const std::vector<ContentionAttempt>> slots,
    GilbertElliottChannel& channel, Rng& rng);

// Position in a round-robin rotation.
struct RoundRobinCursor {
  std::size_t position = 0;
};

// Round-robin over stations with full-demand grants. The cursor moves past
// the last fully served SS (or past a partially served first SS, so that no
// station keeps the head of the round). Calls on_grant for every grant.
std::vector<Grant> ul_schedule(PerceptionManager& bpm, Bytes ul_capacity,
                               RoundRobinCursor& cursor,
                               FrameIndex effective_frame);

struct DlDispatch {
  std::size_t queue = 0;  // index into the scheduled queue span
  Cid cid = 0;
  std::vector<Packet> packets;
};

// Fills the subframe from one queue at a time. A queue that cannot be
// drained completely ends the subframe and waits a whole round.
void dl_schedule(std::span<DlQueue> queues, Bytes dl_capacity,
                 RoundRobinCursor& cursor, std::vector<DlDispatch>& out);

inline std::vector<DlDispatch> dl_schedule(std::span<DlQueue> queues,
                                           Bytes dl_capacity,
                                           RoundRobinCursor& cursor) {
  std::vector<DlDispatch> out;
  dl_schedule(queues, dl_capacity, cursor, out);
  return out;
}

}  // namespace bwsim

#endif  // BWSIM_BS_MAC_H_
