// Copyright 2026 The stochrabi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line parsing for stochrabi_cli. Values from --config are applied
// first, then explicit flags override them.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stochrabi/error.hpp"
#include "stochrabi/run.hpp"

namespace stochrabi::cli {

struct ParseResult {
  run::RunConfig config;
  std::optional<int> exit_code;  // set when parsing ends the program (help, errors)
  std::string message;
};

/// args excludes the program name.
inline ParseResult parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Rabi dynamics of a three-level system interrupted by random pulses", "stochrabi_cli"};
  app.option_defaults()->always_capture_default();

  // Flag name -> config key, in declaration order.
  const std::vector<std::pair<std::string, std::string>> keys{
      {"--mode", "mode"},       {"--delta", "delta"},     {"--deps", "deps"},
      {"--lambda", "lambda"},   {"--t-max", "t_max"},     {"--n-points", "n_points"},
      {"--spacing", "spacing"}, {"--n-traj", "n_traj"},   {"--seed", "seed"},
      {"--talbot-nodes", "talbot_nodes"}, {"--out", "out"}};
  std::map<std::string, std::string> given;
  const std::map<std::string, std::string> help{
      {"mode", "analytic|resolvent|talbot|mc|compare|limits|spectrum|fig1|fig2 (default analytic)"},
      {"delta", "coupling between levels 1 and 2 (required except fig1/fig2)"},
      {"deps", "half the 1-2 energy gap (required except fig1/fig2)"},
      {"lambda", "mean pulse rate, >= 0 (required except fig1/fig2)"},
      {"t_max", "end of the time grid, > 0 (default 20)"},
      {"n_points", "number of grid points, >= 2 (default 200)"},
      {"spacing", "linear (0..t_max) or log (t_max*1e-4..t_max) (default linear)"},
      {"n_traj", "Monte Carlo trajectories, >= 1 (default 100000)"},
      {"seed", "Monte Carlo seed (default " + std::to_string(run::kDefaultSeed) + ")"},
      {"talbot_nodes", "minimum Talbot contour nodes, >= 1 (default 64)"},
      {"out", "CSV path, '-' for stdout; output stem for fig2 (default -)"}};
  for (const auto& [flag, key] : keys) {
    app.add_option_function<std::string>(
        flag, [&given, key = key](const std::string& v) { given[key] = v; }, help.at(key));
  }
  std::string config_path;
  app.add_option("--config", config_path, "flat key = value file; flags override its values");
  bool gnuplot = false;
  app.add_flag("--gnuplot", gnuplot, "also write a gnuplot script next to the CSV");

  ParseResult res;
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    res.exit_code = 0;
    res.message = app.help();
    return res;
  } catch (const CLI::ParseError& e) {
    res.exit_code = 1;
    res.message = std::string("error: ") + e.what();
    return res;
  }
  try {
    if (!config_path.empty()) run::apply_ini_file(res.config, config_path);
    for (const auto& [flag, key] : keys) {
      if (const auto it = given.find(key); it != given.end()) run::apply_key(res.config, key, it->second);
    }
    if (gnuplot) res.config.gnuplot = true;
    res.config.validate();
  } catch (const ConfigError& e) {
    res.exit_code = 1;
    res.message = std::string("error: ") + e.what();
  } catch (const DomainError& e) {
    res.exit_code = 1;
    res.message = std::string("error: ") + e.what();
  }
  return res;
}

}  // namespace stochrabi::cli
