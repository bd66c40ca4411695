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

#include "bwsim/bpm.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace bwsim {

std::string_view to_string(PolicyKind p) {
  switch (p) {
    case PolicyKind::kRpg:
      return "RPG";
    case PolicyKind::kDpgPriority:
      return "DPG-priority";
    case PolicyKind::kDpgGrouped:
      return "DPG";
    case PolicyKind::kDdaI:
      return "DDA-i";
    case PolicyKind::kDdaD:
      return "DDA-d";
  }
  return "?";
}

std::optional<PolicyKind> parse_policy(std::string_view s) {
  std::string lower;
  for (char c : s) {
    if (c == '_') c = '-';
    lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (lower == "rpg") return PolicyKind::kRpg;
  if (lower == "dpg" || lower == "dpg-grouped") return PolicyKind::kDpgGrouped;
  if (lower == "dpg-priority") return PolicyKind::kDpgPriority;
  if (lower == "dda-i" || lower == "ddai") return PolicyKind::kDdaI;
  if (lower == "dda-d" || lower == "ddad") return PolicyKind::kDdaD;
  return std::nullopt;
}

// --- AllocationTable -------------------------------------------------------

void AllocationTable::add_connection(Cid cid, SsId ss, int priority) {
  if (contains(cid)) {
    throw std::invalid_argument("connection " + std::to_string(cid) +
                                " registered twice");
  }
  const std::size_t idx = entries_.size();
  entries_.push_back({cid, ss, priority, 0});
  index_.emplace(cid, idx);
  auto [it, inserted] = by_ss_.try_emplace(ss);
  if (inserted) stations_.push_back(ss);
  auto& list = it->second;
  list.push_back(idx);
  std::stable_sort(list.begin(), list.end(), [this](std::size_t a, std::size_t b) {
    const auto& ea = entries_[a];
    const auto& eb = entries_[b];
    if (ea.priority != eb.priority) return ea.priority < eb.priority;
    return ea.cid < eb.cid;
  });
}

Bytes AllocationTable::perceived(Cid cid) const {
  return entries_.at(index_.at(cid)).perceived;
}

void AllocationTable::set_perceived(Cid cid, Bytes value) {
  entries_.at(index_.at(cid)).perceived = std::max<Bytes>(value, 0);
}

bool AllocationTable::decrease(Cid cid, Bytes amount) {
  auto& e = entries_.at(index_.at(cid));
  if (amount > e.perceived) {
    e.perceived = 0;
    ++clamp_events_;
    return true;
  }
  e.perceived -= amount;
  return false;
}

Bytes AllocationTable::total_for(SsId ss) const {
  Bytes sum = 0;
  for (std::size_t i : entries_of(ss)) sum += entries_[i].perceived;
  return sum;
}

Bytes AllocationTable::total() const {
  Bytes sum = 0;
  for (const auto& e : entries_) sum += e.perceived;
  return sum;
}

std::span<const std::size_t> AllocationTable::entries_of(SsId ss) const {
  auto it = by_ss_.find(ss);
  if (it == by_ss_.end()) return {};
  return it->second;
}

// --- Policy operations -----------------------------------------------------

namespace {

void apply_now(AllocationTable& table, const BwRequest& req) {
  if (req.kind == RequestKind::kAggregate) {
    table.set_perceived(req.cid, req.size);
  } else {
    table.set_perceived(req.cid, table.perceived(req.cid) + req.size);
  }
}

}  // namespace

bool apply_request(AllocationTable& table, const BwRequest& req,
                   PolicyKind policy, PendingRequests& pending) {
  if (!table.contains(req.cid)) {
    table.note_protocol_error();
    return false;
  }
  if (policy == PolicyKind::kDdaD) {
    pending.push_back(req);
  } else {
    apply_now(table, req);
  }
  return true;
}

void flush_pending(AllocationTable& table, PendingRequests& pending,
                   PolicyKind policy) {
  if (policy != PolicyKind::kDdaD) return;
  for (const auto& req : pending) {
    if (table.contains(req.cid)) apply_now(table, req);
  }
  pending.clear();
}

void on_grant(AllocationTable& table, SsId ss, Bytes granted,
              PolicyKind policy) {
  const auto idx = table.entries_of(ss);
  switch (policy) {
    case PolicyKind::kRpg:
      for (std::size_t i : idx) table.entry(i).perceived = 0;
      break;
    case PolicyKind::kDpgPriority: {
      Bytes left = granted;
      for (std::size_t i : idx) {
        auto& e = table.entry(i);
        const Bytes take = std::min(e.perceived, left);
        e.perceived -= take;
        left -= take;
      }
      if (left > 0) table.note_clamp();
      break;
    }
    case PolicyKind::kDpgGrouped: {
      // The per-SS pool is decremented; what is left is handed back to the
      // connections, highest QoS first, up to each one's previous value.
      Bytes pool = 0;
      for (std::size_t i : idx) pool += table.entry(i).perceived;
      if (granted > pool) table.note_clamp();
      pool = std::max<Bytes>(pool - granted, 0);
      for (std::size_t i : idx) {
        auto& e = table.entry(i);
        const Bytes keep = std::min(e.perceived, pool);
        e.perceived = keep;
        pool -= keep;
      }
      break;
    }
    case PolicyKind::kDdaI:
    case PolicyKind::kDdaD:
      break;
  }
}

bool on_data_arrival(AllocationTable& table, Cid cid, Bytes bytes_received,
                     PolicyKind policy) {
  if (!table.contains(cid)) {
    table.note_protocol_error();
    return false;
  }
  if (decreases_on_data(policy)) table.decrease(cid, bytes_received);
  return true;
}

// --- Replay ----------------------------------------------------------------

std::string TraceEvent::describe() const {
  std::ostringstream os;
  switch (type) {
    case Type::kConnection:
      os << "connection " << cid << ' ' << priority;
      break;
    case Type::kEnqueue:
      os << "enqueue " << cid << ' ' << bytes;
      break;
    case Type::kRequest:
      os << "request " << cid << ' '
         << (kind == RequestKind::kAggregate ? "aggregate" : "incremental")
         << ' ' << bytes;
      break;
    case Type::kGrant:
      os << "grant " << bytes;
      break;
    case Type::kData:
      os << "data " << cid << ' ' << bytes;
      break;
    case Type::kTick:
      os << "tick";
      break;
  }
  return os.str();
}

namespace {

long long parse_integer(const std::string& tok, int line, const char* what) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(tok, &used);
  } catch (const std::exception&) {
    throw ParseError(line, std::string("expected integer ") + what + ", got '" +
                               tok + "'");
  }
  if (used != tok.size()) {
    throw ParseError(line, std::string("expected integer ") + what + ", got '" +
                               tok + "'");
  }
  return v;
}

}  // namespace

TraceScript parse_trace(std::istream& in) {
  TraceScript script;
  std::string raw;
  int line = 0;
  FrameIndex last_frame = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() < 2) throw ParseError(line, "expected '<frame> <event>'");

    TraceEvent ev;
    ev.line = line;
    ev.frame = parse_integer(tok[0], line, "frame");
    if (ev.frame < 0) throw ParseError(line, "negative frame");
    if (ev.frame < last_frame) {
      throw ParseError(line, "frames must be non-decreasing");
    }
    last_frame = ev.frame;

    const std::string& name = tok[1];
    auto want = [&](std::size_t n) {
      if (tok.size() != n + 2) {
        throw ParseError(line, "'" + name + "' takes " + std::to_string(n) +
                                   " argument(s)");
      }
    };
    auto non_negative = [&](const std::string& t, const char* what) {
      const long long v = parse_integer(t, line, what);
      if (v < 0) throw ParseError(line, std::string(what) + " must be >= 0");
      return v;
    };
    if (name == "connection") {
      want(2);
      ev.type = TraceEvent::Type::kConnection;
      ev.cid = static_cast<Cid>(non_negative(tok[2], "cid"));
      ev.priority = static_cast<int>(non_negative(tok[3], "priority"));
    } else if (name == "enqueue") {
      want(2);
      ev.type = TraceEvent::Type::kEnqueue;
      ev.cid = static_cast<Cid>(non_negative(tok[2], "cid"));
      ev.bytes = non_negative(tok[3], "bytes");
    } else if (name == "request") {
      want(3);
      ev.type = TraceEvent::Type::kRequest;
      ev.cid = static_cast<Cid>(non_negative(tok[2], "cid"));
      if (tok[3] == "aggregate" || tok[3] == "agg") {
        ev.kind = RequestKind::kAggregate;
      } else if (tok[3] == "incremental" || tok[3] == "inc") {
        ev.kind = RequestKind::kIncremental;
      } else {
        throw ParseError(line, "request kind must be aggregate|incremental");
      }
      ev.bytes = non_negative(tok[4], "bytes");
      if (ev.kind == RequestKind::kIncremental && ev.bytes == 0) {
        throw ParseError(line, "incremental request size must be positive");
      }
    } else if (name == "grant") {
      want(1);
      ev.type = TraceEvent::Type::kGrant;
      ev.bytes = non_negative(tok[2], "bytes");
    } else if (name == "data") {
      want(2);
      ev.type = TraceEvent::Type::kData;
      ev.cid = static_cast<Cid>(non_negative(tok[2], "cid"));
      ev.bytes = non_negative(tok[3], "bytes");
      if (ev.bytes == 0) throw ParseError(line, "data size must be positive");
    } else if (name == "tick" || name == "scheduler_tick") {
      want(0);
      ev.type = TraceEvent::Type::kTick;
    } else {
      throw ParseError(line, "unknown event '" + name + "'");
    }
    script.events.push_back(ev);
  }
  return script;
}

TraceScript parse_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace file '" + path + "'");
  return parse_trace(in);
}

std::string TraceSnapshot::to_line() const {
  std::ostringstream os;
  os << frame << ' ' << event << " -> perceived=" << perceived
     << " actual=" << actual << " [";
  for (std::size_t i = 0; i < cids.size(); ++i) {
    if (i) os << ' ';
    os << cids[i].cid << ':' << cids[i].perceived << '/' << cids[i].actual;
  }
  os << "] clamp=" << (clamped ? 1 : 0) << " stall=" << (stall ? 1 : 0);
  return os.str();
}

PerceptionTimeline replay_trace(const TraceScript& script, PolicyKind policy) {
  constexpr SsId kStation = 0;
  PerceptionManager bpm(policy);
  std::map<Cid, Bytes> actual;
  PerceptionTimeline timeline;
  timeline.reserve(script.events.size());

  auto require = [&](const TraceEvent& ev) {
    if (!actual.count(ev.cid)) {
      throw ParseError(ev.line,
                       "undeclared connection " + std::to_string(ev.cid));
    }
  };

  for (const auto& ev : script.events) {
    const auto clamps_before = bpm.table().clamp_events();
    switch (ev.type) {
      case TraceEvent::Type::kConnection:
        if (actual.count(ev.cid)) {
          throw ParseError(ev.line,
                           "connection " + std::to_string(ev.cid) + " redeclared");
        }
        bpm.table().add_connection(ev.cid, kStation, ev.priority);
        actual[ev.cid] = 0;
        break;
      case TraceEvent::Type::kEnqueue:
        require(ev);
        actual[ev.cid] += ev.bytes;
        break;
      case TraceEvent::Type::kRequest:
        require(ev);
        bpm.apply_request({ev.cid, ev.bytes, ev.kind, ev.frame});
        break;
      case TraceEvent::Type::kGrant:
        bpm.on_grant(kStation, ev.bytes);
        break;
      case TraceEvent::Type::kData:
        require(ev);
        if (ev.bytes > actual[ev.cid]) {
          throw ParseError(ev.line, "data exceeds queued bytes on connection " +
                                        std::to_string(ev.cid));
        }
        actual[ev.cid] -= ev.bytes;
        bpm.on_data_arrival(ev.cid, ev.bytes);
        break;
      case TraceEvent::Type::kTick:
        bpm.flush_pending();
        break;
    }

    TraceSnapshot snap;
    snap.frame = ev.frame;
    snap.event = ev.describe();
    for (const auto& [cid, a] : actual) {
      const Bytes p = bpm.table().perceived(cid);
      snap.cids.push_back({cid, p, a});
      snap.perceived += p;
      snap.actual += a;
    }
    snap.clamped = bpm.table().clamp_events() > clamps_before;
    snap.stall =
        snap.perceived == 0 && snap.actual > 0 && bpm.pending().empty();
    timeline.push_back(std::move(snap));
  }
  return timeline;
}

}  // namespace bwsim
