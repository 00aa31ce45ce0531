/*
 * This file is part of the oneshot-qcap library.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QCAP_SPECTRUM_HPP
#define QCAP_SPECTRUM_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qcap/entropy.hpp"

namespace qcap {

//==============================================================================
// Finite-n information-spectrum estimators. The asymptotic divergence rates
// are limits; everything here is a grid-window proxy at finite n, labelled as
// such in the outputs.
//==============================================================================

inline constexpr double k_spectrum_dim_guard = 4096.5;

struct SequencePair {
  std::string kind;
  int n_max = 1;
  std::function<cmat(int)> rho_n;    // n in [1, n_max]
  std::function<cmat(int)> sigma_n;
};

namespace detail {

inline cmat tensor_power(const cmat& m, int n) {
  cmat out = m;
  for (int i = 1; i < n; ++i) out = kron(out, m);
  return out;
}

inline bool is_diagonal(const cmat& m, double tol = 1e-14) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (i != j && std::abs(m(i, j)) > tol) return false;
  return true;
}

}  // namespace detail

inline SequencePair iid_pair(const cmat& rho, const cmat& sigma, int n_max) {
  if (rho.rows() != sigma.rows()) throw dimension_error("iid_pair: dim mismatch");
  double total = std::pow(static_cast<double>(rho.rows()), n_max);
  if (total > k_spectrum_dim_guard)
    throw resource_error("iid_pair: n_max exceeds the dimension guard");
  return SequencePair{"iid", n_max, [rho](int n) { return detail::tensor_power(rho, n); },
                      [sigma](int n) { return detail::tensor_power(sigma, n); }};
}

// Tr[{rho_n - 2^(n gamma) sigma_n >= 0}(rho_n - 2^(n gamma) sigma_n)],
// bounded by Tr[rho_n]. Commuting diagonal pairs take a direct path.
inline double divergence_trace(const cmat& rho_n, const cmat& sigma_n, double gamma, int n) {
  if (rho_n.rows() != sigma_n.rows()) throw dimension_error("divergence_trace: dim mismatch");
  double c = std::exp2(gamma * static_cast<double>(n));
  if (detail::is_diagonal(rho_n) && detail::is_diagonal(sigma_n)) {
    double total = 0.0;
    for (Index i = 0; i < rho_n.rows(); ++i) {
      double v = std::real(rho_n(i, i)) - c * std::real(sigma_n(i, i));
      if (v > 0.0) total += v;
    }
    return total;
  }
  return positive_part_trace(rho_n - c * sigma_n);
}

struct GammaGrid {
  double lo = -2.0;
  double hi = 2.0;
  int points = 64;

  std::vector<double> values() const {
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
      v[static_cast<std::size_t>(i)] =
          lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    return v;
  }
};

struct Window {
  double gamma_lo = 0.0;  // largest grid gamma with trace >= 1 - tol
  double gamma_hi = 0.0;  // smallest grid gamma with trace <= tol
};

inline constexpr double k_tol_window = 0.05;

// Scans the monotone trace over the gamma grid; the grid widens up to a cap
// when a crossing lies outside it.
inline Window scan_rates(const std::function<double(double)>& trace_at, GammaGrid grid,
                         double tol_window = k_tol_window) {
  for (int attempt = 0; attempt < 7; ++attempt) {
    std::vector<double> gammas = grid.values();
    bool have_lo = false, have_hi = false;
    Window w;
    for (double g : gammas) {
      double t = trace_at(g);
      if (t >= 1.0 - tol_window) {
        w.gamma_lo = g;
        have_lo = true;
      }
      if (!have_hi && t <= tol_window) {
        w.gamma_hi = g;
        have_hi = true;
      }
    }
    if (have_lo && have_hi && w.gamma_lo <= w.gamma_hi) return w;
    grid.lo = 2.0 * grid.lo - 1.0;
    grid.hi = 2.0 * grid.hi + 1.0;
    grid.points = 2 * grid.points;
    if (grid.hi - grid.lo > 260.0)
      throw grid_error("scan_rates: transition window not found on any widened grid");
  }
  throw grid_error("scan_rates: transition window not found");
}

inline Window scan_rates(const SequencePair& pair, int n, GammaGrid grid = {},
                         double tol_window = k_tol_window) {
  if (n < 1 || n > pair.n_max) throw dimension_error("scan_rates: n out of range");
  cmat rho = pair.rho_n(n);
  cmat sigma = pair.sigma_n(n);
  return scan_rates([&](double g) { return divergence_trace(rho, sigma, g, n); }, grid,
                    tol_window);
}

//==============================================================================
// Spectral coherent-information rate proxy
//==============================================================================

struct SpectralRateCandidate {
  std::string label;
  Window window;
};

struct SpectralRateResult {
  int n = 0;
  Window inf_window;      // window of the conditioner minimizing gamma_lo
  double inf_proxy = 0.0;  // min over candidates of gamma_lo
  double sup_proxy = 0.0;  // min over candidates of gamma_hi
  std::vector<SpectralRateCandidate> candidates;
};

// The inner minimization over the conditioner is restricted to iid product
// candidates (maximally mixed, the single-site marginal, and mixtures) plus
// the exact n-fold marginal; a refinement grid walks the mixing weight.
inline SpectralRateResult spectral_coherent_rate(const cmat& rho_rb_site, Index dR, Index dB,
                                                 int n, GammaGrid grid = {},
                                                 double tol_window = k_tol_window) {
  if (rho_rb_site.rows() != dR * dB)
    throw dimension_error("spectral_coherent_rate: dims mismatch");
  double total = std::pow(static_cast<double>(dR * dB), n);
  if (total > k_spectrum_dim_guard)
    throw resource_error("spectral_coherent_rate: n exceeds the dimension guard");

  cmat rho_n = detail::tensor_power(rho_rb_site, n);
  cmat rho_b_site = partial_trace(rho_rb_site, {dR, dB}, {false, true});
  cmat tau = cmat::Identity(dB, dB) / static_cast<double>(dB);

  std::vector<std::pair<std::string, cmat>> site_candidates;
  site_candidates.emplace_back("maximally-mixed", tau);
  site_candidates.emplace_back("site-marginal", rho_b_site);
  for (double w : {0.25, 0.5, 0.75})
    site_candidates.emplace_back("mixture-" + std::to_string(w),
                                 (1.0 - w) * rho_b_site + w * tau);

  // interleave the reference and conditioner factors per site:
  // rho_n factors are ((R B)^n); the conditioner acts on each B slot
  std::vector<Index> dims;
  std::vector<bool> keep_b;
  for (int i = 0; i < n; ++i) {
    dims.push_back(dR);
    dims.push_back(dB);
  }

  SpectralRateResult res;
  res.n = n;
  double best_lo = k_inf, best_hi = k_inf;
  for (const auto& [label, site] : site_candidates) {
    cmat sigma_site = kron(cmat::Identity(dR, dR), site);
    cmat sigma_n = detail::tensor_power(sigma_site, n);
    Window w = scan_rates(
        [&](double g) { return divergence_trace(rho_n, sigma_n, g, n); }, grid, tol_window);
    res.candidates.push_back({label, w});
    if (w.gamma_lo < best_lo) {
      best_lo = w.gamma_lo;
      res.inf_window = w;
    }
    best_hi = std::min(best_hi, w.gamma_hi);
  }
  res.inf_proxy = best_lo;
  res.sup_proxy = best_hi;
  return res;
}

//==============================================================================
// Convergence trend towards the relative-entropy rate
//==============================================================================

struct SteinRow {
  int n = 0;
  Window window;
  double oracle = 0.0;    // S(rho || sigma) per use
  double distance = 0.0;  // max one-sided distance of the window to the oracle
};

struct SteinTrend {
  std::vector<SteinRow> rows;
  bool shrinking = false;  // distance at n_max below distance at n_min
};

inline SteinTrend stein_trend(const SequencePair& pair, const std::vector<int>& n_list,
                              GammaGrid grid = {}, double tol_window = k_tol_window) {
  if (pair.kind != "iid") throw domain_error("stein_trend: iid pairs only");
  if (n_list.empty()) throw dimension_error("stein_trend: empty n list");
  double oracle = relative_entropy(pair.rho_n(1), pair.sigma_n(1));
  SteinTrend trend;
  for (int n : n_list) {
    SteinRow row;
    row.n = n;
    row.window = scan_rates(pair, n, grid, tol_window);
    row.oracle = oracle;
    row.distance = std::max(oracle - row.window.gamma_lo, row.window.gamma_hi - oracle);
    trend.rows.push_back(row);
  }
  trend.shrinking = trend.rows.back().distance < trend.rows.front().distance;
  return trend;
}

}  // namespace qcap

#endif  // QCAP_SPECTRUM_HPP
