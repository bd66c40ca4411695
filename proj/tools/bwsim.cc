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

// Command-line front end: simulate, sweep and replay.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <thread>

#include "bwsim/config.h"
#include "bwsim/engine.h"
#include "bwsim/metrics.h"
#include "bwsim/scenario.h"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kGoldenMismatch = 2;

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::string seeds;
  std::string out;
  unsigned jobs = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "Config file (key = value lines)");
  cmd->add_option("--set", c.sets, "Override, key=value (repeatable)");
  cmd->add_option("--seed", c.seeds, "Seed list, e.g. 1,2,3");
  cmd->add_option("--out", c.out, "CSV output path (default: stdout)");
  cmd->add_option("--jobs", c.jobs, "Parallel runs (default: hardware threads)");
}

bwsim::ScenarioConfig load(const Common& c) {
  std::vector<std::pair<std::string, std::string>> overrides;
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw bwsim::ConfigError(fmt::format("--set: expected key=value, got '{}'", s));
    }
    overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  if (!c.seeds.empty()) overrides.emplace_back("seeds", c.seeds);
  return bwsim::load_config(c.config, overrides);
}

unsigned jobs_for(const Common& c) {
  if (c.jobs > 0) return c.jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

void emit_csv(const Common& c, const std::vector<bwsim::RunSummary>& rows) {
  if (c.out.empty() || c.out == "-") {
    bwsim::write_csv(std::cout, rows);
    return;
  }
  std::ofstream out(c.out);
  if (!out) throw bwsim::ConfigError(fmt::format("--out: cannot write '{}'", c.out));
  bwsim::write_csv(out, rows);
}

int replay_and_report(const std::string& trace, bwsim::PolicyKind policy,
                      const std::string& golden, const std::string& out_path) {
  const auto result = bwsim::run_replay(trace, policy, golden);
  std::string text;
  for (const auto& line : result.lines) text += line + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) throw bwsim::ConfigError(fmt::format("--out: cannot write '{}'", out_path));
    out << text;
  }
  if (result.compared && !result.matches) {
    std::cerr << "golden mismatch at " << result.divergence << "\n";
    return kGoldenMismatch;
  }
  if (result.compared) std::cerr << "golden: PASS\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bwsim: 802.16 uplink request-grant simulator"};
  app.require_subcommand(1);

  Common sim_opts;
  std::string events_path;
  auto* simulate = app.add_subcommand("simulate", "Run one scenario for each seed");
  add_common(simulate, sim_opts);
  simulate->add_option("--events", events_path,
                       "Write the event log of the first seed to this file");

  Common sweep_opts;
  std::string axis_text;
  std::string policies_text;
  auto* sweep = app.add_subcommand("sweep", "Sweep one key across policies");
  add_common(sweep, sweep_opts);
  sweep->add_option("--axis", axis_text, "key=v1,v2,...");
  sweep->add_option("--policies", policies_text, "RPG,DPG,DDA-i,DDA-d");

  std::string trace_path;
  std::string policy_name = "DDA-d";
  std::string golden_path;
  std::string timeline_out;
  auto* replay = app.add_subcommand("replay", "Replay a request/grant script");
  replay->add_option("--trace", trace_path, "Trace script")->required();
  replay->add_option("--policy", policy_name, "Perception policy");
  replay->add_option("--golden", golden_path, "Expected timeline");
  replay->add_option("--out", timeline_out, "Write the timeline here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*simulate) {
      const auto cfg = load(sim_opts);
      if (cfg.preset == bwsim::Preset::kReplay) {
        return replay_and_report(cfg.trace_path, cfg.policy, cfg.golden_path,
                                 sim_opts.out);
      }
      std::vector<bwsim::RunSummary> rows;
      if (!events_path.empty()) {
        bwsim::RunOptions opts;
        opts.record_events = true;
        const auto report = bwsim::run(cfg, cfg.seeds.front(), opts);
        std::ofstream ev(events_path);
        if (!ev) {
          throw bwsim::ConfigError(
              fmt::format("--events: cannot write '{}'", events_path));
        }
        ev << report.event_log_text();
      }
      rows = bwsim::run_sweep(cfg, {}, {}, jobs_for(sim_opts));
      emit_csv(sim_opts, rows);
      return kOk;
    }
    if (*sweep) {
      const auto cfg = load(sweep_opts);
      bwsim::SweepAxis axis;
      if (!axis_text.empty()) axis = bwsim::parse_axis(axis_text);
      std::vector<bwsim::PolicyKind> policies;
      if (!policies_text.empty()) policies = bwsim::parse_policy_list(policies_text);
      emit_csv(sweep_opts,
               bwsim::run_sweep(cfg, axis, policies, jobs_for(sweep_opts)));
      return kOk;
    }
    if (*replay) {
      const auto policy = bwsim::parse_policy(policy_name);
      if (!policy) {
        throw bwsim::ConfigError(fmt::format("--policy: unknown policy '{}'", policy_name));
      }
      return replay_and_report(trace_path, *policy, golden_path, timeline_out);
    }
  } catch (const bwsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const bwsim::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kConfigError;
  } catch (const bwsim::SweepError& e) {
    std::cerr << "sweep failed: " << e.what() << "\n";
    return kConfigError;
  }
  return kOk;
}
