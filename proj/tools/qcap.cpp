/*
 * This file is part of the oneshot-qcap library.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

// Command-line surface for batch experiments: one-shot capacity bounds,
// entropic quantities, random-coding simulation, and finite-n spectral
// divergence windows. All randomness is seeded through flags; outputs are
// deterministic given the configuration and independent of --threads.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "qcap/json_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 2;
constexpr int kExitGuard = 3;
constexpr int kExitTrials = 4;

qcap::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qcap::parse_error(path + ": cannot open file");
  try {
    return qcap::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw qcap::parse_error(path + ": " + e.what());
  }
}

void emit(const qcap::json& j, const std::string& out_path) {
  std::string text = j.dump(2);
  text.push_back('\n');
  std::cout << text;
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    out << text;
  }
}

void emit_lines(const std::vector<qcap::json>& lines, const std::string& out_path) {
  std::ostringstream oss;
  for (const auto& j : lines) oss << j.dump() << '\n';
  std::string text = oss.str();
  std::cout << text;
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    out << text;
  }
}

struct Config {
  std::string channel_path;
  std::string states_path;
  std::string pair_path;
  std::string sequence_path;
  std::string out_path;
  double epsilon = 0.1;
  double delta = 0.0;
  std::uint64_t seed = 1;
  int trials = 0;
  int n_max = 0;
  int threads = 0;
  qcap::Index s = 0;
  qcap::Index m = 0;
  double tol_window = qcap::k_tol_window;
  double gamma_lo = -2.0;
  double gamma_hi = 2.0;
  int gamma_points = 64;
};

int run_bounds(const Config& cfg) {
  qcap::KrausChannel phi = qcap::channel_from_json(load_json_file(cfg.channel_path));
  qcap::SearchParams params;
  if (cfg.trials > 0) params.trials = cfg.trials;
  params.seed = cfg.seed;
  params.threads = qcap::resolve_thread_count(cfg.threads);
  qcap::BoundReport rep = qcap::capacity_bounds(phi, cfg.epsilon, params);
  emit(qcap::bound_report_to_json(rep), cfg.out_path);
  return kExitOk;
}

qcap::json entropy_line(const qcap::json& entry, std::size_t index, double delta) {
  using namespace qcap;
  cmat rho = mat_from_json(entry.at("rho"), "states[" + std::to_string(index) + "].rho");
  json line{{"index", index}};

  Index dA = 0, dB = 0;
  if (entry.contains("dims")) {
    const json& dims = entry.at("dims");
    if (!dims.is_array() || dims.size() != 2)
      throw parse_error("states[" + std::to_string(index) + "].dims: expected [dA, dB]");
    dA = dims[0].get<Index>();
    dB = dims[1].get<Index>();
    if (dA * dB != rho.rows())
      throw parse_error("states[" + std::to_string(index) +
                        "].dims: product does not match the state dimension");
    line["H0"] = real_to_json(cond_H0(rho, dA, dB));
    line["H2"] = real_to_json(cond_H2(rho, dA, dB));
    line["coherent_information"] = real_to_json(coherent_information(rho, dA, dB));
    HminResult hm = cond_Hmin(rho, dA, dB);
    line["Hmin"] = json{{"value", real_to_json(hm.value)},
                        {"certified_lower", real_to_json(hm.lower)},
                        {"certified_upper", real_to_json(hm.upper)},
                        {"converged", hm.converged}};
    SmoothedResult st = smooth_Ic0_state(rho, dA, dB, delta);
    line["Ic0_state_smoothed"] = smoothed_to_json(st);
    SmoothedResult op = smooth_Ic0_operator(rho, dA, dB, delta);
    line["Ic0_operator_smoothed"] = smoothed_to_json(op);
    if (entry.contains("sigma_b")) {
      cmat sb = mat_from_json(entry.at("sigma_b"),
                              "states[" + std::to_string(index) + "].sigma_b");
      line["Hmin_fixed"] = real_to_json(cond_Hmin_fixed(rho, dA, dB, sb));
    }
  }
  if (entry.contains("sigma")) {
    cmat sigma =
        mat_from_json(entry.at("sigma"), "states[" + std::to_string(index) + "].sigma");
    line["relative_entropy"] = real_to_json(relative_entropy(rho, sigma));
    line["dmax"] = real_to_json(dmax(rho, sigma));
    if (entry.contains("alpha")) {
      double alpha = entry.at("alpha").get<double>();
      cmat p = entry.contains("P")
                   ? mat_from_json(entry.at("P"), "states[" + std::to_string(index) + "].P")
                   : cmat(cmat::Identity(rho.rows(), rho.rows()));
      double value = (alpha == 0.0)   ? quasi_entropy_order0(rho, sigma, p)
                     : (alpha == 1.0) ? s1_p(rho, sigma, p)
                                      : quasi_entropy(rho, sigma, p, alpha);
      line["quasi_entropy"] = real_to_json(value);
      line["alpha"] = alpha;
    }
  }
  return line;
}

int run_entropy(const Config& cfg) {
  qcap::json doc = load_json_file(cfg.states_path);
  if (!doc.contains("states") || !doc.at("states").is_array())
    throw qcap::parse_error(cfg.states_path + ": expected a top-level 'states' array");
  std::vector<qcap::json> lines;
  std::size_t index = 0;
  for (const auto& entry : doc.at("states")) {
    lines.push_back(entropy_line(entry, index, cfg.delta));
    ++index;
  }
  emit_lines(lines, cfg.out_path);
  return kExitOk;
}

int run_simulate(const Config& cfg) {
  if (cfg.trials < 100) {
    std::cerr << "simulate-coding: at least 100 trials required\n";
    return kExitTrials;
  }
  qcap::KrausChannel phi = qcap::channel_from_json(load_json_file(cfg.channel_path));
  qcap::Index s = cfg.s > 0 ? cfg.s : phi.in_dim();
  qcap::Index m = cfg.m > 0 ? cfg.m : s;
  qcap::CodeSubspace code = qcap::CodeSubspace::standard(phi.in_dim(), s);
  qcap::AchievabilityReport rep = qcap::verify_achievability_bound(phi, code, m, cfg.delta, cfg.trials, cfg.seed,
                                               qcap::resolve_thread_count(cfg.threads));
  emit(qcap::achievability_report_to_json(rep, cfg.seed), cfg.out_path);
  return kExitOk;
}

int run_spectrum(const Config& cfg) {
  qcap::json doc = load_json_file(cfg.pair_path);
  for (const char* key : {"kind", "rho", "sigma", "n_max"})
    if (!doc.contains(key))
      throw qcap::parse_error(cfg.pair_path + ": missing field '" + key + "'");
  if (doc.at("kind").get<std::string>() != "iid")
    throw qcap::parse_error(cfg.pair_path + ": only 'iid' pairs are supported");
  qcap::cmat rho = qcap::mat_from_json(doc.at("rho"), "pair.rho");
  qcap::cmat sigma = qcap::mat_from_json(doc.at("sigma"), "pair.sigma");
  int n_max = cfg.n_max > 0 ? cfg.n_max : doc.at("n_max").get<int>();

  qcap::SequencePair pair = qcap::iid_pair(rho, sigma, n_max);
  std::vector<int> ns;
  for (int n = 2; n <= n_max; n += 2) ns.push_back(n);
  if (ns.empty()) ns.push_back(n_max);
  qcap::GammaGrid grid{cfg.gamma_lo, cfg.gamma_hi, cfg.gamma_points};
  qcap::SteinTrend trend = qcap::stein_trend(pair, ns, grid, cfg.tol_window);
  emit(qcap::stein_trend_to_json(trend, cfg.tol_window), cfg.out_path);
  return kExitOk;
}

int run_per_use(const Config& cfg) {
  qcap::ChannelSequence seq = qcap::sequence_from_json(load_json_file(cfg.sequence_path));
  int n_max = cfg.n_max > 0 ? std::min(cfg.n_max, seq.n_max) : seq.n_max;
  qcap::SearchParams params;
  if (cfg.trials > 0) params.trials = cfg.trials;
  params.seed = cfg.seed;
  params.threads = qcap::resolve_thread_count(cfg.threads);
  auto rows = qcap::per_use_rates(seq, cfg.epsilon, n_max, params);
  emit(qcap::per_use_to_json(rows, cfg.epsilon), cfg.out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"one-shot quantum capacity toolbox"};
  app.require_subcommand(1);
  Config cfg;

  app.add_option("--threads", cfg.threads,
                 "worker threads (default: ONESHOT_QCAP_THREADS or 1)");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--out", cfg.out_path, "also write the JSON output to this file");
  };

  CLI::App* bounds = app.add_subcommand("bounds", "one-shot capacity bounds for a channel");
  bounds->add_option("--channel", cfg.channel_path, "channel JSON file")->required();
  bounds->add_option("--epsilon", cfg.epsilon, "error budget in (0, 1]")->required();
  bounds->add_option("--trials", cfg.trials, "subspace search trials");
  add_common(bounds);

  CLI::App* entropy = app.add_subcommand("entropy", "entropic quantities for a batch of states");
  entropy->add_option("--states", cfg.states_path, "states JSON file")->required();
  entropy->add_option("--delta", cfg.delta, "smoothing radius for the smoothed values");
  add_common(entropy);

  CLI::App* simulate =
      app.add_subcommand("simulate-coding", "random-coding fidelity simulation");
  simulate->add_option("--channel", cfg.channel_path, "channel JSON file")->required();
  simulate->add_option("--trials", cfg.trials, "Monte-Carlo trials (>= 100)")->required();
  simulate->add_option("--delta", cfg.delta, "smoothing radius");
  simulate->add_option("--s", cfg.s, "code-space dimension (default: full input)");
  simulate->add_option("--m", cfg.m, "transmitted rank (default: s)");
  add_common(simulate);

  CLI::App* spectrum = app.add_subcommand("spectrum", "finite-n divergence windows");
  spectrum->add_option("--pair", cfg.pair_path, "state-pair JSON file")->required();
  spectrum->add_option("--n-max", cfg.n_max, "largest block length");
  spectrum->add_option("--tol", cfg.tol_window, "window tolerance");
  spectrum->add_option("--gamma-lo", cfg.gamma_lo, "grid lower edge");
  spectrum->add_option("--gamma-hi", cfg.gamma_hi, "grid upper edge");
  spectrum->add_option("--gamma-points", cfg.gamma_points, "grid points");
  add_common(spectrum);

  CLI::App* per_use = app.add_subcommand("per-use", "per-use rates for a channel sequence");
  per_use->add_option("--sequence", cfg.sequence_path, "sequence JSON file")->required();
  per_use->add_option("--epsilon", cfg.epsilon, "error budget in (0, 1]")->required();
  per_use->add_option("--n-max", cfg.n_max, "truncate the sequence at this n");
  per_use->add_option("--trials", cfg.trials, "subspace search trials");
  add_common(per_use);

  CLI11_PARSE(app, argc, argv);

  try {
    if (bounds->parsed()) return run_bounds(cfg);
    if (entropy->parsed()) return run_entropy(cfg);
    if (simulate->parsed()) return run_simulate(cfg);
    if (spectrum->parsed()) return run_spectrum(cfg);
    if (per_use->parsed()) return run_per_use(cfg);
  } catch (const qcap::parse_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const qcap::resource_error& e) {
    std::cerr << "resource guard: " << e.what() << "\n";
    return kExitGuard;
  } catch (const qcap::grid_error& e) {
    std::cerr << "grid error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
