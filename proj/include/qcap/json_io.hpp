/*
 * This file is part of the oneshot-qcap library.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QCAP_JSON_IO_HPP
#define QCAP_JSON_IO_HPP

#include <json.hpp>
#include <string>
#include <vector>

#include "qcap/capacity.hpp"
#include "qcap/channel.hpp"
#include "qcap/coding.hpp"
#include "qcap/spectrum.hpp"

namespace qcap {

using json = nlohmann::json;

struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

//==============================================================================
// Matrices serialize as nested arrays of [re, im] pairs, row-major.
//==============================================================================

inline json mat_to_json(const cmat& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j)
      row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline cmat mat_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty())
    throw parse_error(field + ": expected a nonempty array of rows");
  Index rows = static_cast<Index>(j.size());
  if (!j[0].is_array() || j[0].empty())
    throw parse_error(field + ": rows must be nonempty arrays");
  Index cols = static_cast<Index>(j[0].size());
  cmat m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      throw parse_error(field + ": row " + std::to_string(i) + " has inconsistent length");
    for (Index c = 0; c < cols; ++c) {
      const json& e = row[static_cast<std::size_t>(c)];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw parse_error(field + ": entry (" + std::to_string(i) + ", " +
                          std::to_string(c) + ") must be a [re, im] pair");
      m(i, c) = cplx(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

inline json factors_to_json(const FactorSpec& f) {
  return json{{"dims", f.dims}, {"labels", f.labels}};
}

inline FactorSpec factors_from_json(const json& j) {
  FactorSpec f;
  if (!j.contains("dims") || !j.contains("labels"))
    throw parse_error("factors: need 'dims' and 'labels'");
  for (const auto& d : j.at("dims")) f.dims.push_back(d.get<Index>());
  for (const auto& l : j.at("labels")) f.labels.push_back(l.get<std::string>());
  f.validate();
  return f;
}

// +/-infinity sentinels survive serialization as strings.
inline json real_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? json("+inf") : json("-inf");
  return json(v);
}

//==============================================================================
// Channels and sequences
//==============================================================================

inline json channel_to_json(const KrausChannel& phi) {
  json ops = json::array();
  for (const auto& k : phi.kraus()) ops.push_back(mat_to_json(k));
  return json{{"in_dim", phi.in_dim()}, {"out_dim", phi.out_dim()}, {"kraus", std::move(ops)}};
}

inline KrausChannel channel_from_json(const json& j) {
  for (const char* key : {"in_dim", "out_dim", "kraus"})
    if (!j.contains(key)) throw parse_error(std::string("channel: missing field '") + key + "'");
  Index in = j.at("in_dim").get<Index>();
  Index out = j.at("out_dim").get<Index>();
  if (!j.at("kraus").is_array() || j.at("kraus").empty())
    throw parse_error("channel: 'kraus' must be a nonempty array");
  std::vector<cmat> ops;
  std::size_t idx = 0;
  for (const auto& kj : j.at("kraus")) {
    cmat k = mat_from_json(kj, "channel.kraus[" + std::to_string(idx) + "]");
    if (k.rows() != out || k.cols() != in)
      throw parse_error("channel.kraus[" + std::to_string(idx) +
                        "]: shape does not match (out_dim, in_dim)");
    ops.push_back(std::move(k));
    ++idx;
  }
  try {
    return KrausChannel::from_kraus(std::move(ops));
  } catch (const std::exception& e) {
    throw parse_error(std::string("channel: ") + e.what());
  }
}

inline ChannelSequence sequence_from_json(const json& j) {
  for (const char* key : {"kind", "params", "n_max"})
    if (!j.contains(key)) throw parse_error(std::string("sequence: missing field '") + key + "'");
  std::string kind = j.at("kind").get<std::string>();
  int n_max = j.at("n_max").get<int>();
  const json& params = j.at("params");
  if (kind == "iid") {
    if (!params.contains("channel")) throw parse_error("sequence.params: missing 'channel'");
    return iid_sequence(channel_from_json(params.at("channel")), n_max);
  }
  if (kind == "markov_depolarizing") {
    MarkovDepolarizingParams mk;
    if (params.contains("d")) mk.d = params.at("d").get<Index>();
    for (const char* key : {"p0", "p1", "transition", "initial"})
      if (!params.contains(key))
        throw parse_error(std::string("sequence.params: missing '") + key + "'");
    mk.p0 = params.at("p0").get<double>();
    mk.p1 = params.at("p1").get<double>();
    const json& t = params.at("transition");
    if (!t.is_array() || t.size() != 2 || !t[0].is_array() || t[0].size() != 2 ||
        !t[1].is_array() || t[1].size() != 2)
      throw parse_error("sequence.params.transition: expected a 2x2 matrix of reals");
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c)
        mk.transition[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
            t[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
    const json& init = params.at("initial");
    if (!init.is_array() || init.size() != 2)
      throw parse_error("sequence.params.initial: expected two reals");
    mk.initial = {init[0].get<double>(), init[1].get<double>()};
    try {
      return markov_depolarizing_sequence(mk, n_max);
    } catch (const domain_error& e) {
      throw parse_error(std::string("sequence.params: ") + e.what());
    }
  }
  throw parse_error("sequence.kind: expected 'iid' or 'markov_depolarizing'");
}

//==============================================================================
// Reports
//==============================================================================

inline const char* method_name(SmoothMethod m) {
  switch (m) {
    case SmoothMethod::exact:
      return "exact";
    case SmoothMethod::oracle:
      return "oracle";
    case SmoothMethod::heuristic:
    default:
      return "heuristic";
  }
}

inline json smoothed_to_json(const SmoothedResult& r) {
  return json{{"value", real_to_json(r.value)},
              {"method", method_name(r.method)},
              {"certified_lower", real_to_json(r.lower)},
              {"certified_upper", real_to_json(r.upper)},
              {"witness", mat_to_json(r.witness)}};
}

inline json bound_side_to_json(const BoundSide& s) {
  return json{{"bits", s.bits},
              {"raw", s.raw},
              {"delta_correction", s.delta_correction},
              {"code_dim", s.code_dim},
              {"isometry", mat_to_json(s.witness.isometry())},
              {"smoothing", smoothed_to_json(s.smoothing)},
              {"rate_clamped", s.rate_clamped},
              {"ball_saturated", s.ball_saturated}};
}

inline json bound_report_to_json(const BoundReport& rep) {
  return json{{"epsilon", rep.epsilon},
              {"lower_bits", rep.lower_bits},
              {"upper_bits", rep.upper_bits},
              {"upper_bits_note", "witnessed lower estimate of the converse side"},
              {"upper_cap_bits", rep.upper_cap_bits},
              {"delta_correction", rep.delta_correction},
              {"search_slack", rep.search_slack},
              {"epsilon_degenerate", rep.epsilon_degenerate},
              {"lower_witness", bound_side_to_json(rep.lower)},
              {"upper_witness", bound_side_to_json(rep.upper)},
              {"budget",
               json{{"trials", rep.budget.trials},
                    {"refine", rep.budget.refine},
                    {"seed", rep.budget.seed}}}};
}

inline json achievability_report_to_json(const AchievabilityReport& rep, std::uint64_t seed) {
  return json{{"s", rep.s},           {"m", rep.m},
              {"delta", rep.delta},   {"ic2_delta", real_to_json(rep.ic2_delta)},
              {"rhs", rep.rhs},       {"mc_mean", rep.mc_mean},
              {"mc_se", rep.mc_se},   {"trials", rep.trials},
              {"pass", rep.pass},     {"seed", seed}};
}

inline json stein_trend_to_json(const SteinTrend& trend, double tol_window) {
  json rows = json::array();
  for (const auto& row : trend.rows)
    rows.push_back(json{{"n", row.n},
                        {"gamma_lo", row.window.gamma_lo},
                        {"gamma_hi", row.window.gamma_hi},
                        {"oracle", real_to_json(row.oracle)},
                        {"distance", row.distance}});
  return json{{"rows", std::move(rows)},
              {"shrinking", trend.shrinking},
              {"tol_window", tol_window}};
}

inline json per_use_to_json(const std::vector<PerUseRow>& rows, double eps) {
  json out = json::array();
  for (const auto& row : rows) {
    json r{{"n", row.n},
           {"lower_per_use", row.lower_per_use},
           {"upper_per_use", row.upper_per_use},
           {"upper_cap_per_use", row.upper_cap_per_use}};
    if (row.has_coherent_info) r["coherent_info_per_use"] = row.coherent_info_per_use;
    out.push_back(std::move(r));
  }
  return json{{"epsilon", eps}, {"rows", std::move(out)}};
}

}  // namespace qcap

#endif  // QCAP_JSON_IO_HPP
