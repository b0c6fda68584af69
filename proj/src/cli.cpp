// SPDX-License-Identifier: Apache-2.0
//
// gbsim: group-blind detection for pilot-contaminated massive MIMO uplinks
// Copyright 2026 The gbsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "gbsim/cli.hpp"

#include "gbsim/asymptotics.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace gbsim::cli {

namespace {

using nlohmann::json;

int report(std::ostream& err, ExitCode code, std::string_view kind, const std::string& message,
           const std::string& key = {}) {
  json e{{"code", static_cast<int>(code)}, {"kind", kind}, {"message", message}};
  if (!key.empty()) e["key"] = key;
  err << json{{"error", e}}.dump() << '\n';
  return static_cast<int>(code);
}

// Runs `body`, translating library exceptions into exit codes and an error
// report on `err`.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    return report(err, ExitCode::ConfigError, "config", e.what(), e.key());
  } catch (const IoError& e) {
    return report(err, ExitCode::IoError, "io", e.what());
  } catch (const PlanError& e) {
    return report(err, ExitCode::InfeasiblePlan, "infeasible_plan", e.what());
  } catch (const DimensionError& e) {
    return report(err, ExitCode::InfeasiblePlan, "infeasible_plan", e.what());
  } catch (const DomainError& e) {
    return report(err, ExitCode::ConfigError, "domain", e.what());
  } catch (const Error& e) {
    return report(err, ExitCode::InfeasiblePlan, "runtime", e.what());
  }
}

unsigned resolve_threads(std::optional<unsigned> flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("GBSIM_THREADS"); env && *env) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
  }
  return 1;
}

struct RunOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<unsigned> threads;
};

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    RunConfig rc = load_run_config(opt.config);
    if (opt.seed) rc.plan.seed = *opt.seed;
    if (opt.out) rc.output_path = *opt.out;
    if (opt.format) {
      const auto f = parse_output_format(*opt.format);
      if (!f) throw ConfigError("--format", "expected csv or json");
      rc.format = *f;
    }
    rc.plan.threads = resolve_threads(opt.threads);
    rc.plan.validate();

    const std::vector<MetricsRecord> records = run_plan(rc.plan);

    std::ostringstream buf;
    if (rc.format == OutputFormat::Csv) {
      write_csv(buf, records);
    } else {
      write_json(buf, records);
    }
    if (rc.output_path && *rc.output_path != "-") {
      std::ofstream file(*rc.output_path, std::ios::binary | std::ios::trunc);
      if (!file) throw IoError("cannot open output file '" + *rc.output_path + "'");
      file << buf.str();
      if (!file.flush()) throw IoError("failed writing '" + *rc.output_path + "'");
    } else {
      out << buf.str();
    }
    return 0;
  });
}

int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    const RunConfig rc = load_run_config(path);
    rc.plan.validate();
    std::size_t infeasible = 0;
    const Index kl = rc.plan.base.num_cells * rc.plan.base.num_users;
    const bool has_gb = std::find(rc.plan.detectors.begin(), rc.plan.detectors.end(),
                                  DetectorKind::GroupBlind) != rc.plan.detectors.end();
    for (Index n : rc.plan.antenna_counts) {
      if (has_gb && n < kl) ++infeasible;
    }
    out << json{{"valid", true},
                {"points", rc.plan.antenna_counts.size()},
                {"infeasible_gb_points", infeasible}}
               .dump()
        << '\n';
    return 0;
  });
}

int cmd_asymptotics(double beta1, double beta2, double eps, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    const AsymptoticReport<double> r = asymptotic_report(beta1, beta2, eps);
    json doc{{"gamma_bar", r.gamma_bar},
             {"gamma_bar_prime", r.gamma_bar_prime},
             {"eta_bar", r.eta_bar},
             {"delta_R", r.delta_rate},
             {"rho", r.rho},
             {"lemma1",
              {{"a_sig", r.coefficients.signal},
               {"a_contam", r.coefficients.contamination},
               {"a_err", r.coefficients.error},
               {"lambda", r.coefficients.lambda}}}};
    out << doc.dump(2) << '\n';
    return 0;
  });
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Group-blind detection simulator for pilot-contaminated massive MIMO uplinks",
               "gbsim"};
  app.require_subcommand(1);

  RunOptions run_opt;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment plan and write per-point metrics");
  run_cmd->add_option("--config", run_opt.config, "RunConfig JSON file")->required();
  run_cmd->add_option("--seed", run_opt.seed, "Override the master seed");
  run_cmd->add_option("--out", run_opt.out, "Output path ('-' for stdout)");
  run_cmd->add_option("--format", run_opt.format, "csv or json");
  run_cmd->add_option("--threads", run_opt.threads, "Worker threads (env GBSIM_THREADS)")
      ->check(CLI::PositiveNumber);

  std::string validate_path;
  auto* val_cmd = app.add_subcommand("validate", "Check a RunConfig without simulating");
  val_cmd->add_option("--config", validate_path, "RunConfig JSON file")->required();

  double beta1 = 0, beta2 = 0, eps = 0;
  auto* asym_cmd = app.add_subcommand("asymptotics", "Print the two-cell large-n limits as JSON");
  asym_cmd->add_option("--beta1", beta1, "In-cell gain")->required();
  asym_cmd->add_option("--beta2", beta2, "Interfering-cell gain on the same pilot")->required();
  asym_cmd->add_option("--eps", eps, "Inverse effective training SNR")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return report(err, ExitCode::ConfigError, "usage", e.what());
  }

  if (*run_cmd) return cmd_run(run_opt, out, err);
  if (*val_cmd) return cmd_validate(validate_path, out, err);
  return cmd_asymptotics(beta1, beta2, eps, out, err);
}

}  // namespace gbsim::cli
