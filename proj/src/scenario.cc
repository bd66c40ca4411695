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

#include "bwsim/scenario.h"

#include <fmt/format.h>

#include <atomic>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <thread>

namespace bwsim {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos
                                           ? std::string_view::npos
                                           : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

SweepAxis parse_axis(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError(fmt::format("axis: expected key=v1,v2,..., got '{}'", text));
  }
  SweepAxis axis;
  axis.key = trim(text.substr(0, eq));
  axis.values = split(text.substr(eq + 1), ',');
  for (const auto& v : axis.values) {
    if (v.empty()) throw ConfigError(fmt::format("axis: empty value in '{}'", text));
  }
  return axis;
}

std::vector<PolicyKind> parse_policy_list(std::string_view text) {
  std::vector<PolicyKind> out;
  for (const auto& name : split(text, ',')) {
    auto p = parse_policy(name);
    if (!p) throw ConfigError(fmt::format("policies: unknown policy '{}'", name));
    out.push_back(*p);
  }
  return out;
}

std::vector<SimulationReport> run_cells(
    const std::vector<ScenarioConfig>& cells, unsigned jobs) {
  struct Task {
    std::size_t cell;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (auto seed : cells[i].seeds) tasks.push_back({i, seed});
  }
  std::vector<SimulationReport> reports(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::string error;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        reports[i] = run(cells[tasks[i].cell], tasks[i].seed);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (error.empty()) {
          error = fmt::format("cell {} seed {}: {}", tasks[i].cell,
                              tasks[i].seed, e.what());
        }
        next = tasks.size();
      }
    }
  };

  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size())));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (!error.empty()) throw SweepError(error);
  return reports;
}

std::vector<RunSummary> run_sweep(const ScenarioConfig& base,
                                  const SweepAxis& axis,
                                  const std::vector<PolicyKind>& policies,
                                  unsigned jobs) {
  std::vector<std::string> values = axis.values;
  if (axis.key.empty()) values = {""};
  std::vector<PolicyKind> pols = policies;
  if (pols.empty()) pols = {base.policy};

  std::vector<ScenarioConfig> cells;
  for (const auto& v : values) {
    for (PolicyKind p : pols) {
      ScenarioConfig c = base;
      c.policy = p;
      try {
        if (!axis.key.empty()) set_config_value(c, axis.key, v);
        validate(c);
      } catch (const ConfigError& e) {
        throw SweepError(fmt::format("{}={} policy {}: {}", axis.key, v,
                                     to_string(p), e.what()));
      }
      cells.push_back(std::move(c));
    }
  }
  std::vector<RunSummary> rows;
  for (const auto& r : run_cells(cells, jobs)) rows.push_back(r.summary());
  return rows;
}

std::vector<std::string> read_golden(std::istream& in) {
  std::vector<std::string> lines;
  std::string raw;
  while (std::getline(in, raw)) {
    const std::string text = trim(raw);
    if (text.empty() || text.front() == '#') continue;
    lines.push_back(text);
  }
  return lines;
}

ReplayResult compare_timeline(const PerceptionTimeline& timeline,
                              const std::vector<std::string>& golden) {
  ReplayResult r;
  r.timeline = timeline;
  for (const auto& s : timeline) r.lines.push_back(s.to_line());
  r.compared = true;
  const std::size_t n = std::max(r.lines.size(), golden.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::string got = i < r.lines.size() ? r.lines[i] : "<end>";
    const std::string want = i < golden.size() ? golden[i] : "<end>";
    if (got != want) {
      r.matches = false;
      r.divergence = fmt::format("event {}:\n  expected: {}\n  actual:   {}",
                                 i + 1, want, got);
      break;
    }
  }
  return r;
}

ReplayResult run_replay(const std::string& trace_path, PolicyKind policy,
                        const std::string& golden_path) {
  const TraceScript script = parse_trace_file(trace_path);
  const PerceptionTimeline timeline = replay_trace(script, policy);
  if (golden_path.empty()) {
    ReplayResult r;
    r.timeline = timeline;
    for (const auto& s : timeline) r.lines.push_back(s.to_line());
    return r;
  }
  std::ifstream in(golden_path);
  if (!in) throw ConfigError(fmt::format("golden: cannot open '{}'", golden_path));
  return compare_timeline(timeline, read_golden(in));
}

}  // namespace bwsim
