/*
 * This file is part of the oneshot-qcap library.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QCAP_ENTROPY_HPP
#define QCAP_ENTROPY_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "qcap/channel.hpp"
#include "qcap/qmatrix.hpp"

namespace qcap {

// All quantities in bits. +infinity is the support-violation sentinel.

inline double von_neumann_entropy(const cmat& rho) {
  rvec v = eigh_values(rho);
  double s = 0.0;
  for (Index i = 0; i < v.size(); ++i)
    if (v[i] > 0.0) s -= v[i] * std::log2(v[i]);
  return s;
}

// Tr[rho (log rho - log sigma)]; finite iff supp rho is contained in supp
// sigma. Valid for subnormalized rho.
inline double relative_entropy(const cmat& rho, const cmat& sigma,
                               double support_leak_tol = 1e-9) {
  if (rho.rows() != sigma.rows()) throw dimension_error("relative_entropy: dim mismatch");
  EigH es = eigh(sigma);
  double smax = es.values.size() ? es.values.cwiseAbs().maxCoeff() : 0.0;
  double cut = k_rank_tol * std::max(smax, 1e-300);
  double cross = 0.0;
  double leak = 0.0;
  for (Index j = 0; j < es.values.size(); ++j) {
    double w = std::real(cplx(es.vectors.col(j).adjoint() * rho * es.vectors.col(j)));
    if (es.values[j] > cut)
      cross += w * std::log2(es.values[j]);
    else
      leak += std::max(0.0, w);
  }
  if (leak > support_leak_tol) return k_inf;
  rvec vr = eigh_values(rho);
  double self = 0.0;
  for (Index i = 0; i < vr.size(); ++i)
    if (vr[i] > 0.0) self += vr[i] * std::log2(vr[i]);
  return self - cross;
}

//==============================================================================
// Quasi-entropies of order alpha with a test operator 0 <= P <= 1
//==============================================================================

// log2 Tr[sqrt(P) rho^alpha sqrt(P) sigma^(1-alpha)], alpha > 0. Matrix powers
// are taken on the support; off-support weight with a negative sigma power
// yields +infinity.
inline double psi_alpha(const cmat& rho, const cmat& sigma, const cmat& p, double alpha) {
  if (rho.rows() != sigma.rows() || rho.rows() != p.rows())
    throw dimension_error("psi_alpha: dim mismatch");
  cmat sp = msqrt_psd(p);
  cmat core = hermitize(sp * mpow_support(rho, alpha) * sp);
  if (alpha > 1.0) {
    cmat off = cmat::Identity(sigma.rows(), sigma.rows()) - support_projector(sigma);
    double leak = std::real((core * off).trace());
    double scale = std::max(std::real(core.trace()), 1e-300);
    if (leak > 1e-9 * scale) return k_inf;
  }
  double t = std::real((core * mpow_support(sigma, 1.0 - alpha)).trace());
  return log2_positive(t);
}

// Order-alpha quasi-entropy, alpha in (0, inf) \ {1}.
inline double quasi_entropy(const cmat& rho, const cmat& sigma, const cmat& p, double alpha) {
  if (alpha <= 0.0 || alpha == 1.0)
    throw domain_error("quasi_entropy: alpha must be positive and != 1");
  double psi = psi_alpha(rho, sigma, p, alpha);
  if (std::isinf(psi)) {
    if (psi < 0.0)
      throw domain_error("quasi_entropy: orthogonal supports");
    return k_inf;  // alpha > 1 support violation
  }
  return psi / (alpha - 1.0);
}

// Order-0 value: -log2 Tr[sqrt(P) Pi_rho sqrt(P) sigma].
inline double quasi_entropy_order0(const cmat& rho, const cmat& sigma, const cmat& p) {
  cmat sp = msqrt_psd(p);
  double t = std::real((sp * support_projector(rho) * sp * sigma).trace());
  if (t < 1e-300) throw domain_error("quasi_entropy_order0: orthogonal supports");
  return -std::log2(t);
}

// Query bundle for the order-alpha family; alpha = 0 selects the order-0
// value through its own formula.
struct QuasiEntropyQuery {
  DensityOperator rho;
  HermitianOperator sigma;
  HermitianOperator p;
  double alpha = 0.0;

  void validate() const {
    if (rho.dim() != sigma.dim() || rho.dim() != p.dim())
      throw dimension_error("QuasiEntropyQuery: dims must agree");
    if (alpha < 0.0 || alpha == 1.0)
      throw domain_error("QuasiEntropyQuery: alpha must be 0 or positive and != 1");
    rvec pv = eigh_values(p.mat());
    if (pv[0] < -1e-9 || pv[pv.size() - 1] > 1.0 + 1e-9)
      throw domain_error("QuasiEntropyQuery: test operator must satisfy 0 <= P <= 1");
  }
};

inline double quasi_entropy(const QuasiEntropyQuery& q) {
  q.validate();
  if (q.alpha == 0.0) return quasi_entropy_order0(q.rho.mat(), q.sigma.mat(), q.p.mat());
  return quasi_entropy(q.rho.mat(), q.sigma.mat(), q.p.mat(), q.alpha);
}

// Order-1 value (the derivative of psi at alpha = 1):
//   [Tr(sqrt(P) rho log rho sqrt(P) Pi_sigma) - Tr(sqrt(P) rho sqrt(P) log sigma)]
//   / Tr[sqrt(P) rho sqrt(P) Pi_sigma].
inline double s1_p(const cmat& rho, const cmat& sigma, const cmat& p) {
  if (rho.rows() != sigma.rows() || rho.rows() != p.rows())
    throw dimension_error("s1_p: dim mismatch");
  cmat sp = msqrt_psd(p);
  cmat pis = support_projector(sigma);
  cmat rho_log = herm_func(rho, [](double x) { return x > 0.0 ? x * std::log2(x) : 0.0; });
  double denom = std::real((sp * rho * sp * pis).trace());
  if (denom < 1e-12) throw domain_error("s1_p: vanishing denominator");
  double num = std::real((sp * rho_log * sp * pis).trace()) -
               std::real((sp * rho * sp * mlog2_support(sigma)).trace());
  return num / denom;
}

// log2 of the least lambda with rho <= lambda sigma.
inline double dmax(const cmat& rho, const cmat& sigma, double support_leak_tol = 1e-9) {
  if (rho.rows() != sigma.rows()) throw dimension_error("dmax: dim mismatch");
  cmat pis = support_projector(sigma);
  cmat off = cmat::Identity(sigma.rows(), sigma.rows()) - pis;
  double leak = std::real((off * rho).trace());
  if (leak > support_leak_tol) return k_inf;
  cmat isq = mpow_support(sigma, -0.5);
  return log2_positive(lambda_max(hermitize(isq * rho * isq)));
}

//==============================================================================
// Conditional entropies of a bipartite state (conditioning on the second
// factor)
//==============================================================================

// Bipartite state with explicit factor bookkeeping for the conditional
// entropies; the conditioned system is the second factor.
struct ConditionalQuery {
  DensityOperator rho_ab;
  FactorSpec factors;

  void validate() const {
    factors.validate_against(rho_ab.dim());
    if (factors.dims.size() != 2)
      throw dimension_error("ConditionalQuery: a bipartite factor spec is required");
  }
  Index dA() const { return factors.dims[0]; }
  Index dB() const { return factors.dims[1]; }
};

// H_0(rho|B) = log2 lambda_max(Tr_A Pi_rho): the inner optimization over
// sigma_B in closed form.
inline double cond_H0(const cmat& rho_ab, Index dA, Index dB) {
  if (rho_ab.rows() != dA * dB) throw dimension_error("cond_H0: dims mismatch");
  cmat pi = support_projector(rho_ab);
  cmat t = partial_trace(pi, {dA, dB}, {false, true});
  return std::log2(std::max(lambda_max(t), 1e-300));
}

// H_2(rho|B) = -2 log2 Tr sqrt(Tr_A rho^2): the optimum of the order-2
// optimization, attained at sigma proportional to sqrt(Tr_A rho^2).
inline double cond_H2(const cmat& rho_ab, Index dA, Index dB) {
  if (rho_ab.rows() != dA * dB) throw dimension_error("cond_H2: dims mismatch");
  cmat m = partial_trace(hermitize(rho_ab * rho_ab), {dA, dB}, {false, true});
  rvec v = eigh_values(m);
  double s = 0.0;
  for (Index i = 0; i < v.size(); ++i)
    if (v[i] > 0.0) s += std::sqrt(v[i]);
  return -2.0 * std::log2(std::max(s, 1e-300));
}

// sqrt-trace of Tr_A rho^2, i.e. 2^(I^c_2 / 2); exposed so callers can avoid
// the log/exp round trip where cancellation matters.
inline double sqrt_trace_conditional_order2(const cmat& rho_ab, Index dA, Index dB) {
  cmat m = partial_trace(hermitize(rho_ab * rho_ab), {dA, dB}, {false, true});
  rvec v = eigh_values(m);
  double s = 0.0;
  for (Index i = 0; i < v.size(); ++i)
    if (v[i] > 0.0) s += std::sqrt(v[i]);
  return s;
}

inline double cond_Hmin_fixed(const cmat& rho_ab, Index dA, Index dB, const cmat& sigma_b) {
  if (rho_ab.rows() != dA * dB || sigma_b.rows() != dB)
    throw dimension_error("cond_Hmin_fixed: dims mismatch");
  return -dmax(rho_ab, kron(cmat::Identity(dA, dA), sigma_b));
}

struct HminOptions {
  double tol_log2 = 1e-7;
  int max_outer = 24;
  int max_newton = 60;
};

struct HminResult {
  double value = 0.0;   // certified achievable value (from the primal witness)
  double lower = 0.0;   // value <= true H_min <= upper
  double upper = 0.0;
  bool converged = false;
  cmat sigma_witness;
  int outer_iterations = 0;
};

namespace detail {

inline std::vector<cmat> hermitian_basis(Index d) {
  std::vector<cmat> basis;
  basis.reserve(static_cast<std::size_t>(d * d));
  const double inv_sqrt2 = 0.7071067811865475244;
  for (Index i = 0; i < d; ++i) {
    cmat e = cmat::Zero(d, d);
    e(i, i) = 1.0;
    basis.push_back(e);
  }
  for (Index i = 0; i < d; ++i)
    for (Index j = i + 1; j < d; ++j) {
      cmat e = cmat::Zero(d, d);
      e(i, j) = inv_sqrt2;
      e(j, i) = inv_sqrt2;
      basis.push_back(e);
      cmat f = cmat::Zero(d, d);
      f(i, j) = cplx(0.0, -inv_sqrt2);
      f(j, i) = cplx(0.0, inv_sqrt2);
      basis.push_back(f);
    }
  return basis;
}

inline cmat psd_inverse(const cmat& s) {
  EigH e = eigh(s);
  rvec inv(e.values.size());
  for (Index i = 0; i < e.values.size(); ++i)
    inv[i] = (e.values[i] > 0.0) ? 1.0 / e.values[i] : 0.0;
  return e.vectors * inv.asDiagonal() * e.vectors.adjoint();
}

}  // namespace detail

// Full optimization H_min(rho|B) = -log2 min{Tr Y : 1_A (x) Y >= rho} by a
// log-barrier Newton method on Y. Every iteration yields a strictly feasible
// primal (upper bound on the optimal trace) and a rescaled dual witness
// (lower bound), so the returned bracket is certified.
inline HminResult cond_Hmin(const cmat& rho_ab, Index dA, Index dB,
                            const HminOptions& opts = {}) {
  if (rho_ab.rows() != dA * dB) throw dimension_error("cond_Hmin: dims mismatch");
  const Index d = dA * dB;
  const cmat id_a = cmat::Identity(dA, dA);
  const auto basis = detail::hermitian_basis(dB);
  const Index nh = static_cast<Index>(basis.size());

  cmat y = (std::max(lambda_max(rho_ab), 0.0) + 1.0) * cmat::Identity(dB, dB);
  double t = 1.0;
  const double mu = 10.0;

  double best_primal = k_inf;   // min Tr Y seen (feasible)
  double best_dual = 0.0;       // max certified lower bound on Tr Y*
  cmat best_y = y;
  HminResult res;

  auto s_of = [&](const cmat& yy) { return cmat(kron(id_a, yy) - rho_ab); };

  for (int outer = 0; outer < opts.max_outer; ++outer) {
    res.outer_iterations = outer + 1;
    for (int it = 0; it < opts.max_newton; ++it) {
      cmat s = s_of(y);
      cmat sinv = detail::psd_inverse(s);
      cmat grad = t * cmat::Identity(dB, dB) - partial_trace(sinv, {dA, dB}, {false, true});
      Eigen::VectorXd gv(nh);
      for (Index k = 0; k < nh; ++k) gv[k] = std::real((basis[k] * grad).trace());

      Eigen::MatrixXd hess(nh, nh);
      std::vector<cmat> mk(static_cast<std::size_t>(nh));
      for (Index k = 0; k < nh; ++k) {
        cmat kb = kron(id_a, basis[k]);
        cmat m = sinv * kb * sinv;
        mk[k] = partial_trace(m, {dA, dB}, {false, true});
      }
      for (Index k = 0; k < nh; ++k)
        for (Index l = 0; l < nh; ++l) hess(l, k) = std::real((basis[l] * mk[k]).trace());
      hess = 0.5 * (hess + hess.transpose());
      hess.diagonal().array() += 1e-12 * hess.diagonal().cwiseAbs().maxCoeff();

      Eigen::VectorXd delta = hess.ldlt().solve(-gv);
      double decrement = -gv.dot(delta);
      cmat dmatrix = cmat::Zero(dB, dB);
      for (Index k = 0; k < nh; ++k) dmatrix += delta[k] * basis[k];

      double phi0 = t * std::real(y.trace());
      {
        rvec ev = eigh_values(s);
        for (Index i = 0; i < ev.size(); ++i) phi0 -= std::log(std::max(ev[i], 1e-300));
      }
      double beta = 1.0;
      bool stepped = false;
      for (int ls = 0; ls < 60; ++ls) {
        cmat yc = y + beta * dmatrix;
        cmat sc = s_of(yc);
        rvec ev = eigh_values(sc);
        if (ev[0] > 0.0) {
          double phic = t * std::real(yc.trace());
          for (Index i = 0; i < ev.size(); ++i) phic -= std::log(ev[i]);
          if (phic <= phi0 - 1e-14 * std::abs(phi0) || beta < 1e-8) {
            y = yc;
            stepped = true;
            break;
          }
        }
        beta *= 0.5;
      }
      if (!stepped || decrement < 1e-11) break;
    }

    // Certified bounds at the current point.
    cmat s = s_of(y);
    double smin = lambda_min(s);
    if (smin >= 0.0) best_primal = std::min(best_primal, std::real(y.trace()));
    if (smin > 0.0) {
      cmat sinv = detail::psd_inverse(s);
      cmat tb = partial_trace(sinv, {dA, dB}, {false, true}) / t;
      double c = lambda_max(tb);
      if (c > 0.0) {
        double lb = std::real((rho_ab * sinv).trace()) / (t * c);
        best_dual = std::max(best_dual, lb);
      }
    }
    if (std::real(y.trace()) <= best_primal + 1e-15) best_y = y;

    if (best_dual > 0.0 && best_primal < k_inf &&
        std::log2(best_primal / best_dual) < opts.tol_log2) {
      res.converged = true;
      break;
    }
    t *= mu;
    if (t > static_cast<double>(d) * 1e14) break;
  }

  res.lower = -std::log2(std::max(best_primal, 1e-300));
  res.upper = (best_dual > 0.0) ? -std::log2(best_dual) : k_inf;
  res.value = res.lower;
  double tr = std::real(best_y.trace());
  res.sigma_witness = (tr > 0.0) ? cmat(best_y / tr) : cmat::Identity(dB, dB);
  return res;
}

//==============================================================================
// Coherent information
//==============================================================================

inline double coherent_information(const cmat& rho_rb, Index dR, Index dB) {
  if (rho_rb.rows() != dR * dB) throw dimension_error("coherent_information: dims mismatch");
  cmat rho_b = partial_trace(rho_rb, {dR, dB}, {false, true});
  return von_neumann_entropy(rho_b) - von_neumann_entropy(rho_rb);
}

inline double channel_coherent_information(const KrausChannel& phi, const CodeSubspace& code) {
  cmat rb = omega_rb_matrix(phi, code);
  return coherent_information(rb, code.code_dim(), phi.out_dim());
}

//==============================================================================
// ConditionalQuery entry points
//==============================================================================

inline double cond_H0(const ConditionalQuery& q) {
  q.validate();
  return cond_H0(q.rho_ab.mat(), q.dA(), q.dB());
}

inline double cond_H2(const ConditionalQuery& q) {
  q.validate();
  return cond_H2(q.rho_ab.mat(), q.dA(), q.dB());
}

inline HminResult cond_Hmin(const ConditionalQuery& q, const HminOptions& opts = {}) {
  q.validate();
  return cond_Hmin(q.rho_ab.mat(), q.dA(), q.dB(), opts);
}

inline double coherent_information(const ConditionalQuery& q) {
  q.validate();
  return coherent_information(q.rho_ab.mat(), q.dA(), q.dB());
}

// S(rho_AB || sigma_A (x) rho_B): the optimum of the marginal minimization.
inline double min_relative_entropy_marginal(const cmat& rho_ab, Index dA, Index dB,
                                            const cmat& sigma_a) {
  if (rho_ab.rows() != dA * dB || sigma_a.rows() != dA)
    throw dimension_error("min_relative_entropy_marginal: dims mismatch");
  cmat rho_a = partial_trace(rho_ab, {dA, dB}, {true, false});
  cmat off = cmat::Identity(dA, dA) - support_projector(sigma_a);
  if (std::real((off * rho_a).trace()) > 1e-9) return k_inf;
  cmat rho_b = partial_trace(rho_ab, {dA, dB}, {false, true});
  return relative_entropy(rho_ab, kron(sigma_a, rho_b));
}

}  // namespace qcap

#endif  // QCAP_ENTROPY_HPP
