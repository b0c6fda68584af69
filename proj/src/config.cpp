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

#include <algorithm>
#include <cmath>
#include <fstream>

namespace gbsim::cli {

namespace {

using nlohmann::json;

const json& require(const json& obj, const std::string& parent, const char* key) {
  const std::string path = parent.empty() ? key : parent + "." + key;
  if (!obj.is_object()) throw ConfigError(parent, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(path, "missing required key");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
  return x;
}

Index as_count(const json& v, const std::string& path, Index min) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  const auto x = v.get<long long>();
  if (x < min) throw ConfigError(path, "must be >= " + std::to_string(min));
  return static_cast<Index>(x);
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  return v.get<std::string>();
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

RMatrix<double> parse_gain_matrix(const json& v, const std::string& path, Index L, Index K,
                                  bool in_db) {
  if (!v.is_array() || static_cast<Index>(v.size()) != L) {
    throw ConfigError(path, "expected " + std::to_string(L) + " rows");
  }
  RMatrix<double> b(L, K);
  for (Index l = 0; l < L; ++l) {
    const json& row = v[static_cast<std::size_t>(l)];
    const std::string rp = path + "[" + std::to_string(l) + "]";
    if (!row.is_array() || static_cast<Index>(row.size()) != K) {
      throw ConfigError(rp, "expected " + std::to_string(K) + " columns");
    }
    for (Index k = 0; k < K; ++k) {
      const std::string ep = rp + "[" + std::to_string(k) + "]";
      const double x = as_number(row[static_cast<std::size_t>(k)], ep);
      b(l, k) = in_db ? db_to_linear(x) : x;
      if (!(b(l, k) > 0.0)) throw ConfigError(ep, "gain must be > 0");
    }
  }
  return b;
}

void parse_scenario(const json& s, ExperimentPlan& plan) {
  const std::string p = "scenario";
  auto& cfg = plan.base;
  if (auto it = s.find("id"); it != s.end()) plan.scenario_id = as_string(*it, p + ".id");
  cfg.num_cells = as_count(require(s, p, "L"), p + ".L", 1);
  cfg.num_users = as_count(require(s, p, "K"), p + ".K", 1);
  cfg.power = db_to_linear(as_number(require(s, p, "P_dB"), p + ".P_dB"));
  cfg.training_eps = as_number(require(s, p, "eps"), p + ".eps");
  if (cfg.training_eps < 0) throw ConfigError(p + ".eps", "must be >= 0");

  const bool has_db = s.contains("beta_dB");
  const bool has_ratio = s.contains("beta_ratio_dB");
  const bool has_linear = s.contains("beta");
  const int given = int(has_db) + int(has_ratio) + int(has_linear);
  if (given == 0) throw ConfigError(p + ".beta_dB", "missing required key (or beta_ratio_dB / beta)");
  if (given > 1) throw ConfigError(p, "give exactly one of beta_dB, beta_ratio_dB, beta");

  const Index L = cfg.num_cells;
  const Index K = cfg.num_users;
  if (has_ratio) {
    // in-cell gains are 1, every out-of-cell gain is ratio dB below
    const double ratio = as_number(s.at("beta_ratio_dB"), p + ".beta_ratio_dB");
    cfg.gains = RMatrix<double>::Constant(L, K, db_to_linear(-ratio));
    cfg.gains.row(0).setOnes();
  } else if (has_db) {
    cfg.gains = parse_gain_matrix(s.at("beta_dB"), p + ".beta_dB", L, K, true);
  } else {
    cfg.gains = parse_gain_matrix(s.at("beta"), p + ".beta", L, K, false);
  }
}

void parse_sweep(const json& s, ExperimentPlan& plan) {
  const std::string p = "sweep";
  const json& list = require(s, p, "n_list");
  if (!list.is_array() || list.empty()) throw ConfigError(p + ".n_list", "expected a non-empty array");
  plan.antenna_counts.clear();
  for (std::size_t i = 0; i < list.size(); ++i) {
    plan.antenna_counts.push_back(
        as_count(list[i], p + ".n_list[" + std::to_string(i) + "]", 1));
  }
  plan.trials = as_count(require(s, p, "trials"), p + ".trials", 1);
  if (auto it = s.find("frames"); it != s.end()) plan.frames = as_count(*it, p + ".frames", 0);
}

}  // namespace

std::optional<OutputFormat> parse_output_format(std::string_view s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  return std::nullopt;
}

RunConfig parse_run_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "configuration must be a JSON object");
  RunConfig rc;
  ExperimentPlan& plan = rc.plan;

  parse_scenario(require(doc, "", "scenario"), plan);
  parse_sweep(require(doc, "", "sweep"), plan);

  const json& dets = require(doc, "", "detectors");
  if (!dets.is_array() || dets.empty()) throw ConfigError("detectors", "expected a non-empty array");
  plan.detectors.clear();
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const std::string path = "detectors[" + std::to_string(i) + "]";
    const auto kind = parse_detector_kind(as_string(dets[i], path));
    if (!kind) throw ConfigError(path, "expected one of mf, ngb_mmse, gb");
    if (std::find(plan.detectors.begin(), plan.detectors.end(), *kind) != plan.detectors.end()) {
      throw ConfigError(path, "duplicate detector");
    }
    plan.detectors.push_back(*kind);
  }

  const auto mode = parse_covariance_mode(as_string(require(doc, "", "cov_mode"), "cov_mode"));
  if (!mode) throw ConfigError("cov_mode", "expected one of genie, sample, conditional");
  plan.covariance_mode = *mode;

  if (auto it = doc.find("basis_mode"); it != doc.end()) {
    const auto b = parse_basis_mode(as_string(*it, "basis_mode"));
    if (!b) throw ConfigError("basis_mode", "expected one of genie, eigen");
    plan.basis_mode = *b;
  }
  if (auto it = doc.find("sinr_eval"); it != doc.end()) {
    const std::string v = as_string(*it, "sinr_eval");
    if (v == "realized") {
      plan.sinr_evaluation = SinrEvaluation::Realized;
    } else if (v == "conditional") {
      plan.sinr_evaluation = SinrEvaluation::Conditional;
    } else {
      throw ConfigError("sinr_eval", "expected one of realized, conditional");
    }
  }

  const json& seed = require(doc, "", "seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
    throw ConfigError("seed", "expected a non-negative integer");
  }
  plan.seed = seed.get<std::uint64_t>();

  if (auto it = doc.find("output"); it != doc.end()) {
    if (!it->is_object()) throw ConfigError("output", "expected an object");
    if (auto p = it->find("path"); p != it->end()) rc.output_path = as_string(*p, "output.path");
    if (auto f = it->find("format"); f != it->end()) {
      const auto fmt = parse_output_format(as_string(*f, "output.format"));
      if (!fmt) throw ConfigError("output.format", "expected csv or json");
      rc.format = *fmt;
    }
  }
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_run_config(doc);
}

}  // namespace gbsim::cli
