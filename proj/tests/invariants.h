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

// Per-frame invariant checks and random scenarios shared by the property
// tests and the acceptance run.

#ifndef BWSIM_TESTS_INVARIANTS_H_
#define BWSIM_TESTS_INVARIANTS_H_

#include <bit>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "bwsim/config.h"
#include "bwsim/engine.h"

namespace bwsim::testing {

constexpr PolicyKind kPolicies[] = {PolicyKind::kRpg, PolicyKind::kDpgPriority,
                                    PolicyKind::kDpgGrouped, PolicyKind::kDdaI,
                                    PolicyKind::kDdaD};

inline ScenarioConfig random_scenario(std::mt19937_64& rng) {
  auto pick = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  auto c = preset_config(pick(0, 1) ? Preset::kDownloadOnly
                                    : Preset::kUploadOnlyMixed);
  c.n_ss = pick(1, 12);
  c.policy = kPolicies[pick(0, 4)];
  c.bs_queue_limit = static_cast<std::size_t>(pick(3, 50));
  c.ss_queue_limit = static_cast<std::size_t>(pick(3, 50));
  c.mix.mode = static_cast<RequestMix::Mode>(pick(0, 3));
  c.mix.k = pick(2, 20);
  c.cw_min = 1 << pick(1, 3);
  c.cw_max = c.cw_min << pick(0, 4);
  c.phy.contention_slots_per_frame = pick(1, 8);
  c.ge = {0.0, pick(0, 1) ? 0.3 : 0.0, 0.2, 0.6};
  c.channel_scope = pick(0, 1) ? ChannelScope::kPerSs : ChannelScope::kShared;
  c.duration_s = 8.0;
  c.warmup_s = 1.0;
  c.flow_start_max_s = 1.0;
  return c;
}

// Records the first violated invariant instead of aborting, so callers
// can report it their own way.
struct InvariantObserver {
  std::int64_t checks = 0;
  std::string failure;
  std::vector<std::int64_t> dl_sent_before;

  bool ok() const { return failure.empty(); }

  void operator()(const Simulation& sim) {
    if (!failure.empty()) return;
    const auto fail = [&](const char* what) {
      failure = "frame " + std::to_string(sim.clock().frame_index) + ": " + what;
    };
    const auto& cfg = sim.config();
    const auto& st = sim.last_frame();

    for (const auto& e : sim.bpm().table().entries()) {
      if (e.perceived < 0) return fail("negative perception");
      ++checks;
    }

    if (st.dl_dispatched > st.dl_capacity) return fail("DL over capacity");
    if (st.granted > st.ul_capacity) return fail("UL grants over capacity");
    Bytes spent = 0;
    for (std::size_t i = 0; i < st.grant_spent.size(); ++i) {
      if (st.ul_sent[i] > st.grant_spent[i]) return fail("burst exceeds grant");
      spent += st.grant_spent[i];
      ++checks;
    }
    if (spent > st.ul_capacity) return fail("UL bursts over capacity");

    for (const auto& ss : sim.stations()) {
      for (const auto& q : ss.queues()) {
        if (q.offered - q.sent - q.dropped !=
            static_cast<std::int64_t>(q.packets.size())) {
          return fail("SS queue conservation");
        }
        if (q.packets.size() > q.limit) return fail("SS queue over limit");
        Bytes backlog = 0;
        for (const auto& p : q.packets) backlog += p.wire_bytes;
        if (backlog != q.backlog) return fail("SS backlog bytes");
        const auto& b = ss.backoff(q.cid);
        if (b.cw < cfg.cw_min || b.cw > cfg.cw_max || b.cw % cfg.cw_min != 0 ||
            !std::has_single_bit(static_cast<unsigned>(b.cw / cfg.cw_min))) {
          return fail("backoff window");
        }
        checks += 3;
      }
    }

    const auto& dl = sim.dl_queues();
    dl_sent_before.resize(dl.size(), 0);
    for (std::size_t i = 0; i < dl.size(); ++i) {
      const auto sent = dl[i].offered - dl[i].drops -
                        static_cast<std::int64_t>(dl[i].packets.size());
      if (sent < dl_sent_before[i]) return fail("BS queue conservation");
      if (dl[i].packets.size() > dl[i].limit) return fail("BS queue over limit");
      dl_sent_before[i] = sent;
      ++checks;
    }

    for (const auto& s : sim.senders()) {
      if (!s.started()) continue;
      if (s.snd_una() > s.snd_nxt()) return fail("snd_una past snd_nxt");
      if (s.cwnd() < cfg.tcp.mss - 1e-9) return fail("cwnd below one MSS");
      if (s.flight() > static_cast<Bytes>(cfg.tcp.receiver_window)) {
        return fail("flight over the receiver window");
      }
      ++checks;
    }
  }
};

// Counts stations whose perceived backlog matched their queue while idle;
// sets `failure` on the first mismatch.
struct IdleSyncObserver {
  std::int64_t compared = 0;
  std::string failure;

  void operator()(const Simulation& sim) {
    if (!failure.empty() || !sim.bpm().pending().empty()) return;
    for (const auto& ss : sim.stations()) {
      if (!ss.quiescent() || ss.waiting_for_grant() ||
          sim.grant_outstanding(ss.id())) {
        continue;
      }
      for (const auto& q : ss.queues()) {
        if (sim.bpm().table().perceived(q.cid) != q.backlog) {
          failure = "frame " + std::to_string(sim.clock().frame_index) +
                    ": SS " + std::to_string(ss.id()) + " perceived " +
                    std::to_string(sim.bpm().table().perceived(q.cid)) +
                    " backlog " + std::to_string(q.backlog);
          return;
        }
        ++compared;
      }
    }
  }
};

}  // namespace bwsim::testing

#endif  // BWSIM_TESTS_INVARIANTS_H_
