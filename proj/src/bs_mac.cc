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

#include "bwsim/bs_mac.h"

#include <algorithm>

namespace bwsim {

bool enqueue_dl(DlQueue& q, const Packet& packet) {
  ++q.offered;
  if (q.packets.size() >= q.limit) {
    ++q.drops;
    return false;
  }
  q.packets.push_back(packet);
  return true;
}

ContentionOutcome resolve_contention(
    std::span<const std::vector<ContentionAttempt>> slots,
    const ChannelFilter& survives) {
  ContentionOutcome out;
  for (const auto& slot : slots) {
    out.attempts += static_cast<std::int64_t>(slot.size());
    if (slot.size() > 1) {
      out.collided += static_cast<std::int64_t>(slot.size());
      out.any_collision = true;
      continue;
    }
    if (slot.empty()) continue;
    const auto& a = slot.front();
    if (survives && !survives(a)) {
      ++out.lost;
      continue;
    }
    out.delivered.push_back(a);
  }
  return out;
}

ContentionOutcome resolve_contention(
    std::span<const std::vector<ContentionAttempt>> slots,
    GilbertElliottChannel& channel, Rng& rng) {
  return resolve_contention(slots, [&](const ContentionAttempt& a) {
    return channel.transmit(
        {a.request.size, TransmissionKind::kBwRequest, a.ss, 0}, rng);
  });
}

std::vector<Grant> ul_schedule(PerceptionManager& bpm, Bytes ul_capacity,
                               RoundRobinCursor& cursor,
                               FrameIndex effective_frame) {
  std::vector<Grant> grants;
  const auto stations = bpm.table().stations();
  const std::size_t n = stations.size();
  if (n == 0 || ul_capacity <= 0) return grants;

  const std::size_t start = cursor.position % n;
  Bytes remaining = ul_capacity;
  std::size_t next = start;
  bool moved = false;
  for (std::size_t i = 0; i < n && remaining > 0; ++i) {
    const std::size_t pos = (start + i) % n;
    const SsId ss = stations[pos];
    const Bytes demand = bpm.table().total_for(ss);
    if (demand <= 0) continue;
    const Bytes g = std::min(demand, remaining);
    grants.push_back({ss, g, effective_frame});
    remaining -= g;
    if (g == demand) {
      next = (pos + 1) % n;
      moved = true;
    } else if (!moved) {
      // Partially served at the head of the round: it moves to the back.
      next = (pos + 1) % n;
      moved = true;
    }
  }
  cursor.position = next;
  for (const auto& g : grants) bpm.on_grant(g.ss, g.bytes);
  return grants;
}

void dl_schedule(std::span<DlQueue> queues, Bytes dl_capacity,
                 RoundRobinCursor& cursor, std::vector<DlDispatch>& out) {
  out.clear();
  const std::size_t n = queues.size();
  if (n == 0) return;
  Bytes remaining = dl_capacity;
  const std::size_t start = cursor.position % n;
  std::size_t next = start;
  for (std::size_t i = 0; i < n && remaining > 0; ++i) {
    const std::size_t pos = (start + i) % n;
    DlQueue& q = queues[pos];
    if (q.packets.empty()) continue;
    DlDispatch d{pos, q.cid, {}};
    while (!q.packets.empty() &&
           static_cast<Bytes>(q.packets.front().wire_bytes) <= remaining) {
      remaining -= q.packets.front().wire_bytes;
      d.packets.push_back(q.packets.front());
      q.packets.pop_front();
    }
    const bool partial = !q.packets.empty();
    if (d.packets.empty()) {
      // Nothing fitted: this queue heads the next subframe instead.
      next = pos;
      break;
    }
    next = (pos + 1) % n;
    out.push_back(std::move(d));
    if (partial) break;
  }
  cursor.position = next;
}

}  // namespace bwsim
