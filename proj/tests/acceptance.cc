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

// Acceptance run: one PASS/FAIL line per criterion.
//
// Environment overrides for quick runs:
//   BWSIM_ACCEPT_FRAMES  frames per run (default 200000)
//   BWSIM_ACCEPT_SEEDS   seeds per cell (default 10)
//   BWSIM_ACCEPT_JOBS    worker threads (default: hardware threads)
// Pass --strict to exit non-zero when a criterion fails, and --report FILE to
// keep a copy of the output.

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "bwsim/config.h"
#include "bwsim/engine.h"
#include "bwsim/scenario.h"
#include "invariants.h"

namespace {

using namespace bwsim;

constexpr PolicyKind kRpg = PolicyKind::kRpg;
constexpr PolicyKind kDpg = PolicyKind::kDpgPriority;
constexpr PolicyKind kDdaI = PolicyKind::kDdaI;
constexpr PolicyKind kDdaD = PolicyKind::kDdaD;
constexpr PolicyKind kFour[] = {kRpg, kDpg, kDdaI, kDdaD};
constexpr PolicyKind kSync[] = {kRpg, kDpg, kDdaD};

long env_or(const char* name, long fallback) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return fallback;
  return std::strtol(v, nullptr, 10);
}

struct Settings {
  FrameIndex frames = 200'000;
  int seeds = 10;
  unsigned jobs = 1;
};

// Per-seed samples of one (axis value, policy) cell.
struct Samples {
  std::vector<double> thr;
  std::vector<double> col;
  std::vector<double> t16;
};

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_error(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) /
                   static_cast<double>(v.size()));
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

// Spearman rank correlation; 0 when either side is constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double mx = mean(rx);
  const double my = mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

using Grid = std::map<std::string, std::map<PolicyKind, Samples>>;

ScenarioConfig base_config(Preset preset, const Settings& s) {
  auto c = preset_config(preset);
  c.duration_s = static_cast<double>(s.frames) * c.phy.frame_duration_s;
  c.warmup_s = std::min(c.warmup_s, c.duration_s / 10.0);
  c.seeds.clear();
  for (int i = 1; i <= s.seeds; ++i) c.seeds.push_back(static_cast<std::uint64_t>(i));
  return c;
}

// Runs every (value, policy) cell and groups the per-seed metrics.
Grid sweep(const ScenarioConfig& base, const std::string& key,
           const std::vector<std::string>& values,
           std::span<const PolicyKind> policies, const Settings& s) {
  std::vector<ScenarioConfig> cells;
  std::vector<std::pair<std::string, PolicyKind>> labels;
  for (const auto& v : values) {
    for (PolicyKind p : policies) {
      ScenarioConfig c = base;
      c.policy = p;
      set_config_value(c, key, v);
      validate(c);
      cells.push_back(c);
      labels.emplace_back(v, p);
    }
  }
  const auto reports = run_cells(cells, s.jobs);
  Grid grid;
  std::size_t i = 0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    auto& cell = grid[labels[c].first][labels[c].second];
    for (std::size_t k = 0; k < cells[c].seeds.size(); ++k, ++i) {
      const auto& m = reports[i].metrics;
      cell.thr.push_back(m.aggregated_throughput_bps);
      cell.col.push_back(m.collision_probability);
      cell.t16.push_back(m.t16_expirations_per_ss_per_s);
    }
  }
  return grid;
}

std::vector<std::string> to_strings(std::initializer_list<double> xs) {
  std::vector<std::string> out;
  for (double x : xs) out.push_back(fmt::format("{}", x));
  return out;
}

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, std::string what) {
    if (!ok) {
      pass = false;
      notes.push_back(std::move(what));
    }
  }
};

std::ofstream report_file;

void emit(const std::string& line) {
  fmt::print("{}\n", line);
  std::fflush(stdout);
  if (report_file.is_open()) report_file << line << '\n' << std::flush;
}

void report(int n, const Verdict& v, double seconds, bool& all) {
  all = all && v.pass;
  std::string line =
      fmt::format("criterion {}: {} ({:.1f} s)", n, v.pass ? "PASS" : "FAIL", seconds);
  if (!v.pass) {
    const std::size_t shown = std::min<std::size_t>(v.notes.size(), 6);
    for (std::size_t i = 0; i < shown; ++i) {
      line += (i ? "; " : " - ") + v.notes[i];
    }
    if (v.notes.size() > shown) line += fmt::format("; +{} more", v.notes.size() - shown);
  }
  emit(line);
}

std::string name(PolicyKind p) { return std::string(to_string(p)); }

// --- criteria ---------------------------------------------------------------

Verdict golden_traces() {
  struct Case {
    const char* trace;
    PolicyKind policy;
    const char* golden;
  };
  const Case cases[] = {
      {"rpg_partial_grant.trace", kRpg, "rpg_partial_grant.golden"},
      {"dpg_priority_preemption.trace", kDpg, "dpg_priority_preemption.golden"},
      {"request_before_data.trace", kDdaI, "request_before_data.immediate.golden"},
      {"shrinking_request_underflow.trace", kDdaI,
       "shrinking_request_underflow.golden"},
      {"request_before_data.trace", kDdaD, "request_before_data.delayed.golden"},
  };
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const std::string dir = BWSIM_DATA_DIR;
  for (const auto& c : cases) {
    const auto r = run_replay(dir + "/" + c.trace, c.policy, dir + "/" + c.golden);
    v.require(r.compared && r.matches,
              fmt::format("{} under {}: {}", c.trace, name(c.policy), r.divergence));
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.require(s < 1.0, fmt::format("replays took {:.3f} s", s));
  return v;
}

Verdict download_only(const Settings& s) {
  const auto base = base_config(Preset::kDownloadOnly, s);
  const auto grid = sweep(base, "n_ss", to_strings({1, 2, 3, 5, 10, 15, 20}), kFour, s);
  Verdict v;
  for (const auto& [n_text, cells] : grid) {
    const int n = std::stoi(n_text);
    const double i_thr = mean(cells.at(kDdaI).thr);
    double lo = 1e300, hi = 0.0, other_col = 0.0, other_t16 = 0.0;
    for (PolicyKind p : kSync) {
      lo = std::min(lo, mean(cells.at(p).thr));
      hi = std::max(hi, mean(cells.at(p).thr));
      other_col = std::max(other_col, mean(cells.at(p).col));
      other_t16 = std::max(other_t16, mean(cells.at(p).t16));
    }
    if (n <= 3) {
      v.require(i_thr <= 0.9 * lo,
                fmt::format("(a) N={}: DDA-i {:.2f} Mbps vs lowest other {:.2f}", n,
                            i_thr / 1e6, lo / 1e6));
    }
    v.require(hi - lo <= 0.05 * hi,
              fmt::format("(b) N={}: sync policies span {:.2f}..{:.2f} Mbps", n,
                          lo / 1e6, hi / 1e6));
    if (n <= 5) {
      const double i_col = mean(cells.at(kDdaI).col);
      const double i_t16 = mean(cells.at(kDdaI).t16);
      // A lone station cannot collide, so the collision part starts at N=2.
      if (n >= 2) {
        v.require(i_col > 0.0 && i_col >= 2.0 * other_col,
                  fmt::format("(c) N={}: collision DDA-i {:.4f} vs {:.4f}", n, i_col,
                              other_col));
      }
      v.require(i_t16 > 0.0 && i_t16 >= 2.0 * other_t16,
                fmt::format("(c) N={}: T16 DDA-i {:.3f} vs {:.3f}", n, i_t16, other_t16));
    }
    if (n == 20) {
      const double bound = static_cast<double>(base.capacities().dl) * 8.0 /
                           base.phy.frame_duration_s;
      for (PolicyKind p : kFour) {
        const double t = mean(cells.at(p).thr);
        v.require(t >= 0.9 * bound, fmt::format("(d) {} at N=20: {:.2f} of {:.2f} Mbps",
                                                name(p), t / 1e6, bound / 1e6));
      }
    }
  }
  return v;
}

Verdict upload_mixed(const Settings& s) {
  const auto base = base_config(Preset::kUploadOnlyMixed, s);
  std::vector<std::string> ns;
  for (int n = 1; n <= 20; ++n) ns.push_back(std::to_string(n));
  const auto grid = sweep(base, "n_ss", ns, kFour, s);
  Verdict v;
  for (const auto& [n_text, cells] : grid) {
    const int n = std::stoi(n_text);
    const double rpg = mean(cells.at(kRpg).thr);
    const double dda = mean(cells.at(kDdaD).thr);
    if (n >= 5) {
      v.require(rpg <= 0.8 * dda, fmt::format("N={}: RPG at {:.0f}% of DDA-d", n,
                                              100.0 * rpg / dda));
    }
    for (PolicyKind p : {kDpg, kDdaI, kDdaD}) {
      if (n >= 2) {
        v.require(mean(cells.at(kRpg).col) > mean(cells.at(p).col),
                  fmt::format("N={}: collision RPG {:.4f} vs {} {:.4f}", n,
                              mean(cells.at(kRpg).col), name(p),
                              mean(cells.at(p).col)));
      }
      v.require(mean(cells.at(kRpg).t16) > mean(cells.at(p).t16),
                fmt::format("N={}: T16 RPG {:.3f} vs {} {:.3f}", n,
                            mean(cells.at(kRpg).t16), name(p), mean(cells.at(p).t16)));
    }
  }
  return v;
}

Verdict upload_aggregate(const Settings& s) {
  auto base = base_config(Preset::kUploadOnlyMixed, s);
  base.mix.mode = RequestMix::Mode::kAggregateOnly;
  const auto grid = sweep(base, "n_ss", to_strings({1, 2, 3, 5, 10, 15, 20}), kFour, s);
  std::map<PolicyKind, double> best;
  for (const auto& [n, cells] : grid) {
    for (PolicyKind p : kFour) best[p] = std::max(best[p], mean(cells.at(p).thr));
  }
  double top = 0.0;
  for (const auto& [p, t] : best) top = std::max(top, t);
  Verdict v;
  for (const auto& [p, t] : best) {
    v.require(t >= 0.95 * top, fmt::format("{} peaks at {:.2f} of {:.2f} Mbps", name(p),
                                           t / 1e6, top / 1e6));
  }
  return v;
}

Verdict queue_sweep(const Settings& s) {
  auto base = base_config(Preset::kQueueSweep, s);
  base.n_ss = 10;
  const std::vector<std::string> queues = {"5", "10", "20", "50"};
  const auto grid = sweep(base, "bs_queue_limit", queues, kFour, s);
  Verdict v;
  for (PolicyKind p : kSync) {
    const double at50 = mean(grid.at("50").at(p).thr);
    for (const char* q : {"10", "20"}) {
      const double t = mean(grid.at(q).at(p).thr);
      v.require(std::abs(t - at50) <= 0.05 * at50,
                fmt::format("{} queue {}: {:.2f} vs {:.2f} Mbps at 50", name(p), q,
                            t / 1e6, at50 / 1e6));
    }
    std::vector<double> x, col, t16;
    for (const auto& q : queues) {
      const auto& cell = grid.at(q).at(p);
      for (std::size_t i = 0; i < cell.col.size(); ++i) {
        x.push_back(std::stod(q));
        col.push_back(cell.col[i]);
        t16.push_back(cell.t16[i]);
      }
    }
    const double rc = spearman(x, col);
    const double rt = spearman(x, t16);
    v.require(rc <= 0.0, fmt::format("{} collision rho {:.2f}", name(p), rc));
    v.require(rt <= 0.0, fmt::format("{} T16 rho {:.2f}", name(p), rt));
  }
  const double i10 = mean(grid.at("10").at(kDdaI).thr);
  for (PolicyKind p : kSync) {
    v.require(i10 < mean(grid.at("10").at(p).thr),
              fmt::format("queue 10: DDA-i {:.2f} vs {} {:.2f} Mbps", i10 / 1e6,
                          name(p), mean(grid.at("10").at(p).thr) / 1e6));
  }
  return v;
}

Verdict loss_sweep(const Settings& s) {
  auto base = base_config(Preset::kLossSweep, s);
  base.n_ss = 10;
  const std::vector<std::string> grid_p = {"0", "0.01", "0.02", "0.05", "0.1"};
  const auto grid = sweep(base, "p_loss", grid_p, kFour, s);
  Verdict v;
  // Step from a to b moves in `dir` (+1 up, -1 down) within one standard error.
  auto step = [](const std::vector<double>& a, const std::vector<double>& b, int dir) {
    const double se = std::hypot(std_error(a), std_error(b));
    return dir > 0 ? mean(b) > mean(a) - se : mean(b) < mean(a) + se;
  };
  for (PolicyKind p : kFour) {
    const int dir = p == kDdaI ? -1 : +1;
    for (std::size_t i = 0; i + 1 < grid_p.size(); ++i) {
      const auto& a = grid.at(grid_p[i]).at(p);
      const auto& b = grid.at(grid_p[i + 1]).at(p);
      const auto span = fmt::format("{} {}->{}", name(p), grid_p[i], grid_p[i + 1]);
      v.require(step(a.thr, b.thr, -1),
                fmt::format("{}: throughput {:.2f} -> {:.2f} Mbps", span,
                            mean(a.thr) / 1e6, mean(b.thr) / 1e6));
      v.require(step(a.col, b.col, dir),
                fmt::format("{}: collision {:.4f} -> {:.4f}", span, mean(a.col),
                            mean(b.col)));
      v.require(step(a.t16, b.t16, dir),
                fmt::format("{}: T16 {:.3f} -> {:.3f}", span, mean(a.t16),
                            mean(b.t16)));
    }
  }
  return v;
}

Verdict invariants(const Settings& s) {
  Verdict v;
  std::mt19937_64 rng(20240611);
  std::int64_t checks = 0;
  std::int64_t events = 0;
  for (int trial = 0; trial < 40; ++trial) {
    auto cfg = testing::random_scenario(rng);
    cfg.duration_s = std::min(20.0, static_cast<double>(s.frames) * 0.005);
    testing::InvariantObserver obs;
    RunOptions opts;
    opts.record_events = true;
    opts.observer = std::ref(obs);
    const auto r = run(cfg, static_cast<std::uint64_t>(trial) + 1, opts);
    v.require(obs.ok(), fmt::format("trial {}: {}", trial, obs.failure));
    v.require(r.protocol_errors == 0, fmt::format("trial {}: protocol errors", trial));
    checks += obs.checks;
    events += static_cast<std::int64_t>(r.events.size());
  }
  v.require(events >= 100'000, fmt::format("only {} events", events));

  for (auto preset : {Preset::kDownloadOnly, Preset::kUploadOnlyMixed}) {
    auto c = preset_config(preset);
    c.n_ss = 6;
    c.duration_s = 30.0;
    c.warmup_s = 0.0;
    RunOptions opts;
    opts.record_events = true;
    c.policy = PolicyKind::kDpgPriority;
    const auto a = run(c, 3, opts);
    c.policy = PolicyKind::kDpgGrouped;
    const auto b = run(c, 3, opts);
    v.require(a.event_log_text() == b.event_log_text(), "DPG variants diverge");

    c.policy = kDdaD;
    testing::IdleSyncObserver sync;
    RunOptions sopts;
    sopts.observer = std::ref(sync);
    run(c, 9, sopts);
    v.require(sync.failure.empty(), "DDA-d idle sync: " + sync.failure);
    v.require(sync.compared > 0, "DDA-d idle sync never observed");
  }

  for (double p_b : {0.1, 0.4, 0.8}) {
    const GilbertElliottParams params{0.0, p_b, 0.5, 0.5};
    Rng rng2(static_cast<std::uint64_t>(p_b * 1000) + 17);
    GilbertElliottChannel ch(params, rng2);
    const int n = 1'000'000;
    int lost = 0;
    for (int i = 0; i < n; ++i) {
      lost += !ch.transmit({1000, TransmissionKind::kDataPdu, 0, 1}, rng2);
    }
    const double expected = params.loss_rate();
    const double se = std::sqrt(expected * (1 - expected) / n);
    const double got = static_cast<double>(lost) / n;
    v.require(std::abs(got - expected) < 3 * se,
              fmt::format("channel loss {:.5f} vs {:.5f}", got, expected));
  }
  return v;
}

Verdict determinism(const Settings& s) {
  Verdict v;
  for (auto preset : {Preset::kDownloadOnly, Preset::kUploadOnlyMixed, Preset::kLossSweep}) {
    auto c = preset_config(preset);
    c.n_ss = 7;
    c.duration_s = std::min(60.0, static_cast<double>(s.frames) * 0.005);
    c.warmup_s = 5.0;
    if (preset == Preset::kLossSweep) set_config_value(c, "p_loss", "0.02");
    for (PolicyKind p : kFour) {
      c.policy = p;
      RunOptions opts;
      opts.record_events = true;
      const auto a = run(c, 7, opts);
      const auto b = run(c, 7, opts);
      v.require(csv_row(a.summary()) == csv_row(b.summary()),
                fmt::format("{} {}: CSV differs", to_string(preset), name(p)));
      v.require(a.event_log_text() == b.event_log_text(),
                fmt::format("{} {}: event log differs", to_string(preset), name(p)));
    }
  }
  auto c = preset_config(Preset::kDownloadOnly);
  c.duration_s = 10.0;
  c.warmup_s = 1.0;
  c.seeds = {1, 2, 3};
  const SweepAxis axis{"n_ss", {"2", "5"}};
  std::ostringstream serial, parallel;
  auto rows = run_sweep(c, axis, {kDdaI, kDdaD}, 1);
  write_csv(serial, rows);
  rows = run_sweep(c, axis, {kDdaI, kDdaD}, 4);
  write_csv(parallel, rows);
  v.require(serial.str() == parallel.str(), "sweep output depends on job count");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  for (int i = 1; i < argc; ++i) {
    const std::string_view arg = argv[i];
    if (arg == "--strict") strict = true;
    if (arg == "--report" && i + 1 < argc) report_file.open(argv[++i]);
  }
  Settings s;
  s.frames = env_or("BWSIM_ACCEPT_FRAMES", 200'000);
  s.seeds = static_cast<int>(env_or("BWSIM_ACCEPT_SEEDS", 10));
  s.jobs = static_cast<unsigned>(
      env_or("BWSIM_ACCEPT_JOBS", std::max(1u, std::thread::hardware_concurrency())));
  emit(fmt::format("acceptance: {} frames per run, {} seeds, {} jobs", s.frames,
                   s.seeds, s.jobs));

  const std::vector<std::function<Verdict()>> criteria = {
      [] { return golden_traces(); },
      [&] { return download_only(s); },
      [&] { return upload_mixed(s); },
      [&] { return upload_aggregate(s); },
      [&] { return queue_sweep(s); },
      [&] { return loss_sweep(s); },
      [&] { return invariants(s); },
      [&] { return determinism(s); },
  };
  bool all = true;
  try {
    for (std::size_t i = 0; i < criteria.size(); ++i) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto verdict = criteria[i]();
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      report(static_cast<int>(i + 1), verdict, secs, all);
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "acceptance aborted: {}\n", e.what());
    return 2;
  }
  emit(fmt::format("acceptance: {}", all ? "all criteria pass" : "some criteria fail"));
  return strict && !all ? 1 : 0;
}
