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

#ifndef BWSIM_SCENARIO_H_
#define BWSIM_SCENARIO_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bwsim/bpm.h"
#include "bwsim/config.h"
#include "bwsim/engine.h"
#include "bwsim/metrics.h"

namespace bwsim {

struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

// Parses "key=v1,v2,...". Throws ConfigError.
SweepAxis parse_axis(std::string_view text);

// Parses "p1,p2,...". Throws ConfigError on an unknown policy name.
std::vector<PolicyKind> parse_policy_list(std::string_view text);

// Raised when one cell of a sweep fails; names the cell.
class SweepError : public std::runtime_error {
 public:
  explicit SweepError(const std::string& what) : std::runtime_error(what) {}
};

// One run per (axis value, policy, seed). Rows come back in that nesting
// order whatever `jobs` is. An empty axis key runs the base config only; an
// empty policy list keeps the configured policy.
std::vector<RunSummary> run_sweep(const ScenarioConfig& base,
                                  const SweepAxis& axis,
                                  const std::vector<PolicyKind>& policies,
                                  unsigned jobs = 1);

// Lower-level form: runs every config of `cells` for each of its seeds.
std::vector<SimulationReport> run_cells(
    const std::vector<ScenarioConfig>& cells, unsigned jobs = 1);

struct ReplayResult {
  PerceptionTimeline timeline;
  std::vector<std::string> lines;  // timeline rendered with to_line()
  bool compared = false;
  bool matches = true;
  std::string divergence;  // first divergent event, empty on a match
};

// Golden files hold one rendered snapshot per line; blank lines and `#`
// comments are ignored.
std::vector<std::string> read_golden(std::istream& in);

ReplayResult compare_timeline(const PerceptionTimeline& timeline,
                              const std::vector<std::string>& golden);

ReplayResult run_replay(const std::string& trace_path, PolicyKind policy,
                        const std::string& golden_path = {});

}  // namespace bwsim

#endif  // BWSIM_SCENARIO_H_
