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

#ifndef BWSIM_BPM_H_
#define BWSIM_BPM_H_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bwsim/types.h"

namespace bwsim {

// BS-side view of every connection's backlog. Entries never go negative:
// underflows clamp to zero and bump `clamp_events()`.
class AllocationTable {
 public:
  struct Entry {
    Cid cid = 0;
    SsId ss = 0;
    int priority = 0;  // lower rank = higher QoS
    Bytes perceived = 0;
  };

  // Throws std::invalid_argument when the CID is already registered.
  void add_connection(Cid cid, SsId ss, int priority);

  bool contains(Cid cid) const { return index_.count(cid) != 0; }
  Bytes perceived(Cid cid) const;
  void set_perceived(Cid cid, Bytes value);
  // Subtracts with clamping; returns true when the result was clamped.
  bool decrease(Cid cid, Bytes amount);

  Bytes total_for(SsId ss) const;
  Bytes total() const;

  // Entries of one SS ordered by ascending priority rank (then CID).
  std::span<const std::size_t> entries_of(SsId ss) const;
  const Entry& entry(std::size_t i) const { return entries_[i]; }
  Entry& entry(std::size_t i) { return entries_[i]; }
  std::span<const Entry> entries() const { return entries_; }

  // Station ids in registration order.
  std::span<const SsId> stations() const { return stations_; }

  std::int64_t clamp_events() const { return clamp_events_; }
  std::int64_t protocol_errors() const { return protocol_errors_; }
  void note_clamp() { ++clamp_events_; }
  void note_protocol_error() { ++protocol_errors_; }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<Cid, std::size_t> index_;
  std::unordered_map<SsId, std::vector<std::size_t>> by_ss_;
  std::vector<SsId> stations_;
  std::int64_t clamp_events_ = 0;
  std::int64_t protocol_errors_ = 0;
};

// Requests held back until just before the uplink scheduler runs (DDA-d).
using PendingRequests = std::vector<BwRequest>;

// Incremental requests add to the perception, aggregate ones overwrite it.
// Under DDA-d the request is parked in `pending` instead. Returns false and
// counts a protocol error when the CID is unknown.
bool apply_request(AllocationTable& table, const BwRequest& req,
                   PolicyKind policy, PendingRequests& pending);

// Applies parked requests in arrival order. No-op unless policy is DDA-d.
void flush_pending(AllocationTable& table, PendingRequests& pending,
                   PolicyKind policy);

void on_grant(AllocationTable& table, SsId ss, Bytes granted,
              PolicyKind policy);

// Returns false (protocol error) when the CID is unknown.
bool on_data_arrival(AllocationTable& table, Cid cid, Bytes bytes_received,
                     PolicyKind policy);

// The Bandwidth Perception Manager owned by the BS of one run.
class PerceptionManager {
 public:
  explicit PerceptionManager(PolicyKind policy) : policy_(policy) {}

  PolicyKind policy() const { return policy_; }
  AllocationTable& table() { return table_; }
  const AllocationTable& table() const { return table_; }
  const PendingRequests& pending() const { return pending_; }

  bool apply_request(const BwRequest& req) {
    return bwsim::apply_request(table_, req, policy_, pending_);
  }
  void flush_pending() { bwsim::flush_pending(table_, pending_, policy_); }
  void on_grant(SsId ss, Bytes granted) {
    bwsim::on_grant(table_, ss, granted, policy_);
  }
  bool on_data_arrival(Cid cid, Bytes bytes) {
    return bwsim::on_data_arrival(table_, cid, bytes, policy_);
  }

 private:
  PolicyKind policy_;
  AllocationTable table_;
  PendingRequests pending_;
};

// ---------------------------------------------------------------------------
// Scripted replay of request/grant/data exchanges between one SS and the BS.
//
// Script lines: `<frame> <event> [args]`, `#` starts a comment.
//   connection <cid> <priority>
//   enqueue <cid> <bytes>
//   request <cid> aggregate|incremental <bytes>
//   grant <bytes>
//   data <cid> <bytes>
//   tick
// ---------------------------------------------------------------------------

struct TraceEvent {
  enum class Type : std::uint8_t {
    kConnection,
    kEnqueue,
    kRequest,
    kGrant,
    kData,
    kTick,
  };
  FrameIndex frame = 0;
  Type type = Type::kTick;
  Cid cid = 0;
  int priority = 0;
  RequestKind kind = RequestKind::kAggregate;
  Bytes bytes = 0;
  int line = 0;

  std::string describe() const;
};

struct TraceScript {
  std::vector<TraceEvent> events;
};

// Throws ParseError with the offending line number.
TraceScript parse_trace(std::istream& in);
TraceScript parse_trace_file(const std::string& path);

struct TraceSnapshot {
  FrameIndex frame = 0;
  std::string event;
  Bytes perceived = 0;
  Bytes actual = 0;
  struct PerCid {
    Cid cid = 0;
    Bytes perceived = 0;
    Bytes actual = 0;
  };
  std::vector<PerCid> cids;
  bool clamped = false;  // this event clamped a perception at zero
  bool stall = false;    // BS sees and holds nothing while the SS has data

  // Canonical one-line rendering used by golden files.
  std::string to_line() const;
};

using PerceptionTimeline = std::vector<TraceSnapshot>;

// Throws ParseError when an event names an undeclared connection or takes
// more data than is queued.
PerceptionTimeline replay_trace(const TraceScript& script, PolicyKind policy);

}  // namespace bwsim

#endif  // BWSIM_BPM_H_
