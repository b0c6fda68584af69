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

#include <cstdio>
#include <ostream>

namespace gbsim::cli {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string_view status_word(RecordStatus s) {
  switch (s) {
    case RecordStatus::Ok: return "ok";
    case RecordStatus::Infeasible: return "infeasible";
    case RecordStatus::Failed: return "failed";
  }
  return "?";
}

std::string optional_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<MetricsRecord>& records) {
  os << kCsvHeader << '\n';
  for (const auto& r : records) {
    os << r.scenario << ',' << to_string(r.detector) << ',' << to_string(r.covariance_mode) << ','
       << r.cells << ',' << r.users << ',' << r.antennas << ',' << r.user << ','
       << format_number(r.snr_db) << ',' << format_number(r.eps) << ',' << r.trials << ',';
    if (r.status == RecordStatus::Ok) {
      os << format_number(r.mean_sinr) << ',' << format_number(r.mean_rate) << ','
         << format_number(r.rate_ci95);
    } else {
      // infeasible / failed points keep their row, flagged in the numeric columns
      const auto w = status_word(r.status);
      os << w << ',' << w << ',' << w;
    }
    os << ',' << optional_number(r.asym_sinr) << ',' << optional_number(r.asym_rate) << ','
       << r.degenerate_trials << '\n';
  }
}

void write_json(std::ostream& os, const std::vector<MetricsRecord>& records) {
  using nlohmann::json;
  json arr = json::array();
  for (const auto& r : records) {
    json o;
    o["scenario"] = r.scenario;
    o["detector"] = std::string(to_string(r.detector));
    o["cov_mode"] = std::string(to_string(r.covariance_mode));
    o["L"] = r.cells;
    o["K"] = r.users;
    o["n"] = r.antennas;
    o["user"] = r.user;
    o["snr_db"] = r.snr_db;
    o["eps"] = r.eps;
    o["trials"] = r.trials;
    o["status"] = std::string(status_word(r.status));
    const bool ok = r.status == RecordStatus::Ok;
    o["mean_sinr"] = ok ? json(r.mean_sinr) : json(nullptr);
    o["mean_rate"] = ok ? json(r.mean_rate) : json(nullptr);
    o["rate_ci95"] = ok ? json(r.rate_ci95) : json(nullptr);
    o["asym_sinr"] = r.asym_sinr ? json(*r.asym_sinr) : json(nullptr);
    o["asym_rate"] = r.asym_rate ? json(*r.asym_rate) : json(nullptr);
    o["degenerate_trials"] = r.degenerate_trials;
    if (!r.message.empty()) o["message"] = r.message;
    arr.push_back(std::move(o));
  }
  os << arr.dump(2) << '\n';
}

}  // namespace gbsim::cli
