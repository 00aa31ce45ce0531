/*
 * This file is part of the oneshot-qcap library.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QCAP_SMOOTHING_HPP
#define QCAP_SMOOTHING_HPP

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "qcap/entropy.hpp"

namespace qcap {

//==============================================================================
// Smoothing balls
//==============================================================================

enum class BallKind { state_ball, operator_ball };

struct SmoothingBudget {
  double delta = 0.0;
  BallKind ball = BallKind::state_ball;

  void validate() const {
    if (delta < 0.0 || delta > 1.0)
      throw domain_error("SmoothingBudget: delta must lie in [0, 1]");
  }
};

// {sigma >= 0, Tr sigma <= 1, F^2(rho, sigma) >= 1 - delta^2}
inline bool state_ball_membership(const cmat& rho, const cmat& candidate, double delta) {
  if (rho.rows() != candidate.rows())
    throw dimension_error("state_ball_membership: dim mismatch");
  if (lambda_min(candidate) < -k_psd_tol) return false;
  if (std::real(candidate.trace()) > 1.0 + k_trace_tol) return false;
  double f = fidelity_mat(rho, candidate);
  return f * f >= 1.0 - delta * delta - 1e-9;
}

// {0 <= P <= 1, Tr[P rho] >= 1 - delta}
inline bool operator_ball_membership(const cmat& rho, const cmat& p, double delta) {
  if (rho.rows() != p.rows()) throw dimension_error("operator_ball_membership: dim mismatch");
  rvec v = eigh_values(p);
  if (v[0] < -1e-9 || v[v.size() - 1] > 1.0 + 1e-9) return false;
  return std::real((p * rho).trace()) >= 1.0 - delta - 1e-9;
}

enum class SmoothMethod { exact, heuristic, oracle };

struct SmoothedResult {
  double value = 0.0;
  cmat witness;            // the optimizing state (or test operator)
  SmoothMethod method = SmoothMethod::exact;
  double lower = 0.0;      // certified_bounds: lower <= value <= upper
  double upper = 0.0;
};

struct SmoothOpts {
  int oracle_trials = 0;       // >0 enables the randomized oracle at small dims
  std::uint64_t seed = 1;
  int refine_steps = 20;
  int t_grid = 32;
  int ascent_rounds = 3;
};

//==============================================================================
// State-smoothed 0-coherent information
//   max over the state ball of -log2 lambda_max(Tr_A Pi)
//==============================================================================

namespace detail {

inline double ic0_of_projector(const cmat& pi, Index dA, Index dB) {
  cmat t = partial_trace(pi, {dA, dB}, {false, true});
  return -std::log2(std::max(lambda_max(t), 1e-300));
}

struct SpectrumDesc {
  rvec values;   // descending
  cmat vectors;  // matching columns
};

inline SpectrumDesc descending_spectrum(const cmat& rho) {
  EigH e = eigh(rho);
  Index n = e.values.size();
  SpectrumDesc d;
  d.values = rvec(n);
  d.vectors = cmat(n, n);
  for (Index i = 0; i < n; ++i) {
    d.values[i] = e.values[n - 1 - i];
    d.vectors.col(i) = e.vectors.col(n - 1 - i);
  }
  return d;
}

}  // namespace detail

// The search walks (a) hard truncations of the eigenvalue tail and (b)
// mixtures with the truncated complement; the oracle adds random subspace
// compressions with local refinement. The returned bracket is
// [achieved value, log2 dB]; the upper end is the dimension cap satisfied by
// every ball member.
inline SmoothedResult smooth_Ic0_state(const cmat& rho_rb, Index dA, Index dB, double delta,
                                       const SmoothOpts& opts = {}) {
  if (rho_rb.rows() != dA * dB) throw dimension_error("smooth_Ic0_state: dims mismatch");
  SmoothingBudget{delta, BallKind::state_ball}.validate();

  double base = -cond_H0(rho_rb, dA, dB);
  if (delta <= 1e-15) {
    return SmoothedResult{base, rho_rb, SmoothMethod::exact, base, base};
  }

  detail::SpectrumDesc sp = detail::descending_spectrum(rho_rb);
  Index rank = 0;
  double lmax = sp.values.size() ? std::max(sp.values[0], 0.0) : 0.0;
  for (Index i = 0; i < sp.values.size(); ++i)
    if (sp.values[i] > k_rank_tol * std::max(lmax, 1e-300)) ++rank;

  double best = base;
  cmat best_witness = rho_rb;
  SmoothMethod method = SmoothMethod::heuristic;

  // (a) hard truncations: keep the top k eigenvectors
  double kept_mass = 0.0;
  std::vector<double> prefix(static_cast<std::size_t>(rank));
  for (Index k = 0; k < rank; ++k) {
    kept_mass += sp.values[k];
    prefix[static_cast<std::size_t>(k)] = kept_mass;
  }
  for (Index k = 1; k <= rank; ++k) {
    double f = prefix[static_cast<std::size_t>(k - 1)];
    if (f * f < 1.0 - delta * delta - 1e-12) continue;  // tail too heavy
    cmat vk = sp.vectors.leftCols(k);
    double val = detail::ic0_of_projector(vk * vk.adjoint(), dA, dB);
    if (val > best) {
      best = val;
      best_witness = vk * sp.values.head(k).asDiagonal() * vk.adjoint();
    }
  }

  // (b) mixtures with the truncated complement share the full support, so
  // they cannot improve on (a); walked for completeness of the ball family.
  for (double t : {0.25, 0.75}) {
    cmat mixed = rho_rb;
    if (rank < rho_rb.rows()) {
      mixed = sp.vectors.leftCols(rank) * sp.values.head(rank).asDiagonal() *
              sp.vectors.leftCols(rank).adjoint() * (1.0 - t) + t * rho_rb;
    }
    if (!state_ball_membership(rho_rb, mixed, delta)) continue;
    double val = detail::ic0_of_projector(support_projector(mixed), dA, dB);
    if (val > best) {
      best = val;
      best_witness = mixed;
    }
  }

  // randomized oracle: projector compressions onto random subspaces; tiny
  // systems are always probed
  int oracle_trials = opts.oracle_trials;
  if (oracle_trials == 0 && rho_rb.rows() <= 4) oracle_trials = 8;
  if (oracle_trials > 0 && rho_rb.rows() <= 16) {
    Rng rng(opts.seed);
    for (int trial = 0; trial < oracle_trials; ++trial) {
      Index r = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(rank)));
      cmat v = haar_isometry(rho_rb.rows(), r, rng);
      for (int step = 0; step <= opts.refine_steps; ++step) {
        cmat cand = v * v.adjoint() * rho_rb * v * v.adjoint();
        cand = hermitize(cand);
        if (state_ball_membership(rho_rb, cand, delta)) {
          double val = detail::ic0_of_projector(support_projector(cand), dA, dB);
          if (val > best) {
            best = val;
            best_witness = cand;
            method = SmoothMethod::oracle;
          }
        }
        // local refinement: nudge one column and reorthonormalize
        cmat pert = v;
        Index col = static_cast<Index>(rng.below(static_cast<std::uint64_t>(r)));
        pert.col(col) += 0.15 * gaussian_matrix(rho_rb.rows(), 1, rng);
        Eigen::HouseholderQR<cmat> qr(pert);
        v = qr.householderQ() * cmat::Identity(rho_rb.rows(), r);
      }
    }
  }

  return SmoothedResult{best, best_witness, method, best, std::log2(static_cast<double>(dB))};
}

//==============================================================================
// Operator-smoothed 0-coherent information
//   max over the operator ball of -log2 lambda_max(Tr_A sqrt(P) Pi sqrt(P))
//==============================================================================

// Value of the order-0 objective at a fixed test operator P.
inline double operator_smoothed_value_at(const cmat& rho, Index dA, Index dB, const cmat& p) {
  cmat sp = msqrt_psd(p);
  cmat core = hermitize(sp * support_projector(rho) * sp);
  cmat t = partial_trace(core, {dA, dB}, {false, true});
  return -std::log2(std::max(lambda_max(t), 1e-300));
}

namespace detail {

// Feasible test-operator candidates for the operator ball: the identity,
// truncation projectors onto leading eigenvectors, and graded cuts
// P = 1 - sum_i t_i v_i v_i^dag grown by coordinate ascent on the order-0
// objective. The t scan is linear in the feasibility constraint.
inline std::vector<cmat> operator_ball_candidates(const cmat& rho, Index dA, Index dB,
                                                  double delta, const SmoothOpts& opts) {
  const Index d = rho.rows();
  std::vector<cmat> cands;
  cands.push_back(cmat::Identity(d, d));
  if (delta <= 1e-15) return cands;

  SpectrumDesc sp = descending_spectrum(rho);
  double lmax = std::max(sp.values[0], 0.0);
  Index rank = 0;
  for (Index i = 0; i < d; ++i)
    if (sp.values[i] > k_rank_tol * std::max(lmax, 1e-300)) ++rank;

  double mass = 0.0;
  for (Index k = 1; k <= rank; ++k) {
    mass += sp.values[k - 1];
    if (mass < 1.0 - delta - 1e-12) continue;
    cmat vk = sp.vectors.leftCols(k);
    cands.push_back(vk * vk.adjoint());
  }

  // graded multi-cuts grown greedily
  cmat pi = support_projector(rho);
  cmat p_cur = cmat::Identity(d, d);
  double budget_used = 0.0;
  std::vector<cmat> cut_dirs;
  for (int round = 0; round < opts.ascent_rounds; ++round) {
    cmat sp_cur = msqrt_psd(p_cur);
    cmat core = hermitize(sp_cur * pi * sp_cur);
    cmat tb = partial_trace(core, {dA, dB}, {false, true});
    EigH eb = eigh(tb);
    cvec w = eb.vectors.col(tb.rows() - 1);  // offending conditioner direction

    cmat x = hermitize(pi * kron(cmat::Identity(dA, dA), w * w.adjoint()) * pi);
    EigH ex = eigh(x);
    double best_val = operator_smoothed_value_at(rho, dA, dB, p_cur);
    cmat best_p = p_cur;
    bool improved = false;
    for (Index j = 0; j < std::min<Index>(dA, x.rows()); ++j) {
      cvec v = ex.vectors.col(x.rows() - 1 - j);
      // orthogonalize against existing cut directions so the cut sum stays
      // a valid effect
      for (const auto& dir : cut_dirs) v -= dir.col(0).dot(v) * dir.col(0);
      double n = v.norm();
      if (n < 1e-8) continue;
      v /= n;
      double load = std::real(cplx(v.adjoint() * rho * v));
      double t_max = (load > 1e-14) ? std::min(1.0, (delta - budget_used) / load) : 1.0;
      if (t_max <= 0.0) continue;
      for (int g = 1; g <= opts.t_grid; ++g) {
        double t = t_max * static_cast<double>(g) / static_cast<double>(opts.t_grid);
        cmat p_try = p_cur - t * (v * v.adjoint());
        if (!operator_ball_membership(rho, p_try, delta)) continue;
        double val = operator_smoothed_value_at(rho, dA, dB, p_try);
        if (val > best_val + 1e-12) {
          best_val = val;
          best_p = p_try;
          improved = true;
        }
      }
      if (improved) {
        cands.push_back(best_p);
        p_cur = best_p;
        budget_used = 1.0 - std::real((p_cur * rho).trace());
        cmat dir(d, 1);
        dir.col(0) = v;
        cut_dirs.push_back(dir);
        break;
      }
    }
    if (!improved) break;
  }
  return cands;
}

}  // namespace detail

inline SmoothedResult smooth_Ic0_operator(const cmat& rho_rb, Index dA, Index dB, double delta,
                                          const SmoothOpts& opts = {}) {
  if (rho_rb.rows() != dA * dB) throw dimension_error("smooth_Ic0_operator: dims mismatch");
  SmoothingBudget{delta, BallKind::operator_ball}.validate();

  double base = -cond_H0(rho_rb, dA, dB);
  if (delta <= 1e-15) {
    return SmoothedResult{base, cmat::Identity(rho_rb.rows(), rho_rb.rows()),
                          SmoothMethod::exact, base, base};
  }

  double best = base;
  cmat best_p = cmat::Identity(rho_rb.rows(), rho_rb.rows());
  for (const auto& p : detail::operator_ball_candidates(rho_rb, dA, dB, delta, opts)) {
    if (!operator_ball_membership(rho_rb, p, delta)) continue;
    double val = operator_smoothed_value_at(rho_rb, dA, dB, p);
    if (val > best) {
      best = val;
      best_p = p;
    }
  }
  double cap = std::log2(static_cast<double>(dB)) -
               std::log2(std::max(1.0 - delta, 1e-12));
  return SmoothedResult{best, best_p, SmoothMethod::heuristic, best, std::max(best, cap)};
}

//==============================================================================
// Operator-smoothed 1-coherent information
//   max over P of min over sigma of the order-1 quasi entropy
//==============================================================================

// Heuristic inner minimization over the conditioner for a fixed P. The
// leading candidate is the Gibbs optimizer of the dominant term,
// sigma* = Tr_A[sqrt(P) rho sqrt(P)] normalized, refined by mixing with the
// maximally mixed state and the bare marginal.
inline double s1_min_sigma_at(const cmat& rho, Index dA, Index dB, const cmat& p) {
  cmat sp = msqrt_psd(p);
  cmat compressed = hermitize(sp * rho * sp);
  cmat m = partial_trace(compressed, {dA, dB}, {false, true});
  double tm = std::real(m.trace());
  cmat tau = cmat::Identity(dB, dB) / static_cast<double>(dB);
  cmat rho_b = partial_trace(rho, {dA, dB}, {false, true});

  std::vector<cmat> sigmas;
  if (tm > 1e-14) sigmas.push_back(m / tm);
  for (double w : {1e-6, 1e-3, 1e-2, 0.1, 0.4}) {
    if (tm > 1e-14) sigmas.push_back((1.0 - w) * (m / tm) + w * tau);
  }
  sigmas.push_back(tau);
  sigmas.push_back(rho_b);

  double best = k_inf;
  for (const auto& s : sigmas) {
    try {
      double v = s1_p(rho, kron(cmat::Identity(dA, dA), s), p);
      best = std::min(best, v);
    } catch (const domain_error&) {
      // degenerate conditioner; skip
    }
  }
  return best;
}

inline SmoothedResult smooth_Ic1_operator(const cmat& rho_rb, Index dA, Index dB, double delta,
                                          const SmoothOpts& opts = {}) {
  if (rho_rb.rows() != dA * dB) throw dimension_error("smooth_Ic1_operator: dims mismatch");
  SmoothingBudget{delta, BallKind::operator_ball}.validate();

  if (delta <= 1e-15) {
    double ic = coherent_information(rho_rb, dA, dB);
    return SmoothedResult{ic, cmat::Identity(rho_rb.rows(), rho_rb.rows()),
                          SmoothMethod::exact, ic, ic};
  }

  double best = -k_inf;
  cmat best_p = cmat::Identity(rho_rb.rows(), rho_rb.rows());
  for (const auto& p : detail::operator_ball_candidates(rho_rb, dA, dB, delta, opts)) {
    if (!operator_ball_membership(rho_rb, p, delta)) continue;
    double val = s1_min_sigma_at(rho_rb, dA, dB, p);
    if (std::isfinite(val) && val > best) {
      best = val;
      best_p = p;
    }
  }
  // No cheap certificate for the order-1 outer maximum; the bracket records
  // only that the reported value was achieved by the witness.
  return SmoothedResult{best, best_p, SmoothMethod::heuristic, best, k_inf};
}

//==============================================================================
// Smoothed min-entropy with the conditioner pinned to the candidate marginal
//==============================================================================

inline SmoothedResult smooth_Hmin_fixed(const cmat& omega_re, Index dR, Index dE, double delta,
                                        const SmoothOpts& opts = {}) {
  if (omega_re.rows() != dR * dE) throw dimension_error("smooth_Hmin_fixed: dims mismatch");
  SmoothingBudget{delta, BallKind::state_ball}.validate();
  (void)opts;

  auto value_at = [&](const cmat& cand) {
    cmat ce = partial_trace(cand, {dR, dE}, {false, true});
    return -dmax(cand, kron(cmat::Identity(dR, dR), ce));
  };

  double best = value_at(omega_re);
  cmat best_w = omega_re;
  if (delta > 1e-15) {
    detail::SpectrumDesc sp = detail::descending_spectrum(omega_re);
    double lmax = std::max(sp.values[0], 0.0);
    Index rank = 0;
    for (Index i = 0; i < omega_re.rows(); ++i)
      if (sp.values[i] > k_rank_tol * std::max(lmax, 1e-300)) ++rank;
    double mass = 0.0;
    for (Index k = 1; k <= rank; ++k) {
      mass += sp.values[k - 1];
      if (mass * mass < 1.0 - delta * delta - 1e-12) continue;
      cmat vk = sp.vectors.leftCols(k);
      cmat cand = vk * sp.values.head(k).asDiagonal() * vk.adjoint();
      double val = value_at(cand);
      if (val > best) {
        best = val;
        best_w = cand;
      }
    }
  }
  double method_exact = (delta <= 1e-15);
  return SmoothedResult{best, best_w,
                        method_exact ? SmoothMethod::exact : SmoothMethod::heuristic, best,
                        method_exact ? best : std::log2(static_cast<double>(dR))};
}

// Diagnostic gap between the pinned-conditioner smoothed min-entropy of the
// reference-environment state and the state-smoothed order-0 value of the
// reference-output state; zero at delta = 0 by the purification duality, a
// heuristic-vs-heuristic gap otherwise.
inline double hmin_duality_gap(const OmegaStates& om, double delta,
                               const SmoothOpts& opts = {}) {
  SmoothedResult hm = smooth_Hmin_fixed(om.omega_re.mat(), om.s, om.dE, delta, opts);
  SmoothedResult ic = smooth_Ic0_state(om.omega_rb.mat(), om.s, om.dB, delta, opts);
  return std::abs(hm.value - ic.value);
}

//==============================================================================
// Smoothed order-2 coherent information (minimum over the state ball)
//==============================================================================

// I^c_2 smoothing takes the minimum over the ball; any feasible witness gives
// a sound value for downstream achievability bounds.
inline SmoothedResult smooth_Ic2_state(const cmat& omega_re, Index dR, Index dE, double delta,
                                       const SmoothOpts& opts = {}) {
  if (omega_re.rows() != dR * dE) throw dimension_error("smooth_Ic2_state: dims mismatch");
  SmoothingBudget{delta, BallKind::state_ball}.validate();
  (void)opts;

  auto ic2_of = [&](const cmat& cand) { return -cond_H2(cand, dR, dE); };

  double best = ic2_of(omega_re);
  cmat best_w = omega_re;
  if (delta > 1e-15) {
    detail::SpectrumDesc sp = detail::descending_spectrum(omega_re);
    double lmax = std::max(sp.values[0], 0.0);
    Index rank = 0;
    for (Index i = 0; i < omega_re.rows(); ++i)
      if (sp.values[i] > k_rank_tol * std::max(lmax, 1e-300)) ++rank;
    double mass = 0.0;
    for (Index k = 1; k <= rank; ++k) {
      mass += sp.values[k - 1];
      if (mass * mass < 1.0 - delta * delta - 1e-12) continue;
      cmat vk = sp.vectors.leftCols(k);
      cmat cand = vk * sp.values.head(k).asDiagonal() * vk.adjoint();
      double val = ic2_of(cand);
      if (val < best) {
        best = val;
        best_w = cand;
      }
    }
  }
  double floor = -std::log2(static_cast<double>(dE)) - 1.0;
  return SmoothedResult{best, best_w,
                        delta <= 1e-15 ? SmoothMethod::exact : SmoothMethod::heuristic,
                        std::min(best, floor), best};
}

//==============================================================================
// Data-processing check with the pulled-back witness
//==============================================================================

inline cmat apply_on_second(const KrausChannel& phi, const cmat& x, Index dA) {
  if (x.rows() != dA * phi.in_dim())
    throw dimension_error("apply_on_second: dims mismatch");
  cmat out = cmat::Zero(dA * phi.out_dim(), dA * phi.out_dim());
  cmat id_a = cmat::Identity(dA, dA);
  for (const auto& k : phi.kraus()) {
    cmat big = kron(id_a, k);
    out += big * x * big.adjoint();
  }
  return hermitize(out);
}

inline cmat apply_adjoint_on_second(const KrausChannel& phi, const cmat& x, Index dA) {
  if (x.rows() != dA * phi.out_dim())
    throw dimension_error("apply_adjoint_on_second: dims mismatch");
  cmat out = cmat::Zero(dA * phi.in_dim(), dA * phi.in_dim());
  cmat id_a = cmat::Identity(dA, dA);
  for (const auto& k : phi.kraus()) {
    cmat big = kron(id_a, k);
    out += big.adjoint() * x * big;
  }
  return hermitize(out);
}

struct DataProcessingReport {
  double delta = 0.0;
  double rhs_value = 0.0;        // order-0 value of the witness P on the processed state
  double lhs_at_pullback = 0.0;  // order-0 value of the pulled-back Q on the input state
  double q_overlap = 0.0;        // Tr[Q rho]
  bool q_feasible = false;       // Q in the 2 sqrt(delta) operator ball
  bool inequality_ok = false;
  cmat p_witness;
  cmat q_pullback;
};

// Verifies the processed-state value never exceeds the input-state value when
// the input side is evaluated at Q = (id (x) Phi*)(sqrt(P) Pi sqrt(P)); the
// pullback lies in the wider operator ball of radius 2 sqrt(delta).
inline DataProcessingReport data_processing_check(const cmat& rho_ab, Index dA, Index dB,
                                                  const KrausChannel& phi_on_b, double delta,
                                                  const SmoothOpts& opts = {}) {
  if (rho_ab.rows() != dA * dB || phi_on_b.in_dim() != dB)
    throw dimension_error("data_processing_check: dims mismatch");
  if (delta < 0.0 || delta > 0.25)
    throw domain_error("data_processing_check: delta must lie in [0, 0.25]");

  DataProcessingReport rep;
  rep.delta = delta;
  cmat gamma = apply_on_second(phi_on_b, rho_ab, dA);
  Index dC = phi_on_b.out_dim();

  SmoothedResult sm = smooth_Ic0_operator(gamma, dA, dC, delta, opts);
  rep.p_witness = sm.witness;
  rep.rhs_value = sm.value;

  cmat sp = msqrt_psd(sm.witness);
  cmat core = hermitize(sp * support_projector(gamma) * sp);
  cmat q = apply_adjoint_on_second(phi_on_b, core, dA);
  // clamp round-off so Q stays a valid effect
  q = herm_func(q, [](double x) { return std::clamp(x, 0.0, 1.0); });
  rep.q_pullback = q;

  rep.q_overlap = std::real((q * rho_ab).trace());
  double dprime = 2.0 * std::sqrt(delta);
  rep.q_feasible = rep.q_overlap >= 1.0 - dprime - 1e-9;
  rep.lhs_at_pullback = operator_smoothed_value_at(rho_ab, dA, dB, q);
  rep.inequality_ok = rep.lhs_at_pullback >= rep.rhs_value - 1e-8;
  return rep;
}

}  // namespace qcap

#endif  // QCAP_SMOOTHING_HPP
