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

#ifndef GBSIM_CLI_HPP
#define GBSIM_CLI_HPP

#include "gbsim/engine.hpp"

#include "json.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gbsim::cli {

inline constexpr std::string_view kCsvHeader =
    "scenario,detector,cov_mode,L,K,n,user,snr_db,eps,trials,mean_sinr,mean_rate,rate_ci95,"
    "asym_sinr,asym_rate,degenerate_trials";

enum class ExitCode : int { Ok = 0, ConfigError = 2, InfeasiblePlan = 3, IoError = 4 };

enum class OutputFormat { Csv, Json };

/// Schema violation in a run configuration. `key` is the dotted path of the
/// offending entry.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Reading the configuration or writing results failed.
class IoError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  ExperimentPlan plan;
  std::optional<std::string> output_path;
  OutputFormat format = OutputFormat::Csv;
};

/// Parses and schema-checks a configuration document. dB quantities are
/// converted to linear scale here and nowhere else.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::string& path);

std::optional<OutputFormat> parse_output_format(std::string_view s);

void write_csv(std::ostream& os, const std::vector<MetricsRecord>& records);
void write_json(std::ostream& os, const std::vector<MetricsRecord>& records);

/// 17 significant digits, so every double round-trips.
std::string format_number(double v);

/// Entry point behind the gbsim executable. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gbsim::cli

#endif  // GBSIM_CLI_HPP
