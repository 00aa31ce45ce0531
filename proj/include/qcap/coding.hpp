/*
 * This file is part of the oneshot-qcap library.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QCAP_CODING_HPP
#define QCAP_CODING_HPP

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "qcap/smoothing.hpp"

namespace qcap {

//==============================================================================
// Random code sampling
//==============================================================================

// One random rank-m code drawn from the group orbit on the reference system:
// |omega_{m,g}> = sqrt(s/m) (P_m U_g (x) 1 (x) 1)|omega_S>.
struct CodeSample {
  std::uint64_t seed = 0;
  Index m = 0;
  Index s = 0, dA = 0, dB = 0, dE = 0;
  cmat omega_re;  // on R (x) E, R of dim s supported on the first m dims
  cmat omega_rb;
  cvec psi_ra;    // matching rank-m maximally entangled target
};

inline CodeSample sample_code(const OmegaStates& om, Index m, std::uint64_t seed) {
  if (m < 1 || m > om.s) throw dimension_error("sample_code: need 1 <= m <= s");
  Rng rng(seed);
  cmat u = haar_unitary(om.s, rng);
  cmat proj_u = u.topRows(m);  // P_m U_g, nonzero rows only
  double scale = std::sqrt(static_cast<double>(om.s) / static_cast<double>(m));

  // amplitudes are contracted on the reference factor only
  auto rotate_reference = [&](const cvec& amp, Index rest) {
    cvec out = cvec::Zero(om.s * rest);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < om.s; ++j) {
        cplx w = scale * proj_u(i, j);
        if (w == cplx(0.0, 0.0)) continue;
        out.segment(i * rest, rest) += w * amp.segment(j * rest, rest);
      }
    return out;
  };

  CodeSample sample;
  sample.seed = seed;
  sample.m = m;
  sample.s = om.s;
  sample.dA = om.dA;
  sample.dB = om.dB;
  sample.dE = om.dE;
  cvec omega = rotate_reference(om.omega_rbe.amplitudes(), om.dB * om.dE);
  sample.omega_re = pure_marginal(omega, {om.s, om.dB, om.dE}, {true, false, true});
  sample.omega_rb = pure_marginal(omega, {om.s, om.dB, om.dE}, {true, true, false});
  sample.psi_ra = rotate_reference(om.psi_ra.amplitudes(), om.dA);
  return sample;
}

// F^2 between omega_RE and tau_m (x) omega_E.
inline double decoupling_fidelity(const CodeSample& sample) {
  cmat tau = cmat::Zero(sample.s, sample.s);
  for (Index i = 0; i < sample.m; ++i) tau(i, i) = 1.0 / static_cast<double>(sample.m);
  cmat omega_e = partial_trace(sample.omega_re, {sample.s, sample.dE}, {false, true});
  double f = fidelity_mat(sample.omega_re, kron(tau, omega_e));
  return std::min(f * f, 1.0);
}

//==============================================================================
// Constructive decoder
//==============================================================================

// Builds the recovery map B -> A whose decoded overlap with the pure target
// is at least the decoupling fidelity: purify omega_RB, align the purification
// with target (x) environment copy by the optimal isometry from the SVD of
// the overlap matrix, then trace out the ancilla.
inline KrausChannel uhlmann_decoder(const cmat& omega_rb, Index dR, Index dB,
                                    const cvec& psi_ra, Index dA) {
  if (omega_rb.rows() != dR * dB || psi_ra.size() != dR * dA)
    throw dimension_error("uhlmann_decoder: dims mismatch");

  cmat omega_r = partial_trace(omega_rb, {dR, dB}, {true, false});
  cmat target_r = pure_marginal(psi_ra, {dR, dA}, {true, false});
  if (max_abs(omega_r - target_r) > 1e-8)
    throw domain_error("uhlmann_decoder: target does not purify the reference marginal");

  // purification of omega_RB with purifier E'
  PureState purified = purify(DensityOperator::from_matrix(omega_rb, true));
  Index dEp = purified.dim() / (dR * dB);
  const cvec& omega_vec = purified.amplitudes();  // factors (R, B, E')

  // purification chi of omega_E' with purifier A'
  cmat omega_ep = pure_marginal(omega_vec, {dR * dB, dEp}, {false, true});
  PureState chi = purify(DensityOperator::from_matrix(omega_ep, true));
  Index d_chi = chi.dim() / dEp;
  const cvec& chi_vec = chi.amplitudes();  // factors (E', A')

  // pad A' so the aligning isometry B -> A (x) A' exists
  Index dApr = d_chi;
  while (dA * dApr < dB) ++dApr;

  // overlap matrix C(a a', b) = sum_{r e} conj(psi(r,a) chi(e,a')) omega(r,b,e)
  cmat c = cmat::Zero(dA * dApr, dB);
  for (Index r = 0; r < dR; ++r)
    for (Index a = 0; a < dA; ++a) {
      cplx pa = psi_ra[r * dA + a];
      if (pa == cplx(0.0, 0.0)) continue;
      for (Index e = 0; e < dEp; ++e)
        for (Index ap = 0; ap < d_chi; ++ap) {
          cplx t = std::conj(pa * chi_vec[e * d_chi + ap]);
          if (t == cplx(0.0, 0.0)) continue;
          for (Index b = 0; b < dB; ++b)
            c(a * dApr + ap, b) += t * omega_vec[(r * dB + b) * dEp + e];
        }
    }

  // the aligning isometry from the complete singular bases; the overlap is a
  // bilinear (unconjugated) pairing, hence the final conjugation
  Eigen::JacobiSVD<cmat> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
  cmat w = (svd.matrixU().leftCols(dB) * svd.matrixV().adjoint()).conjugate();

  // decoder Kraus operators: D(rho) = Tr_A'[W rho W^dag]
  std::vector<cmat> kraus;
  kraus.reserve(static_cast<std::size_t>(dApr));
  for (Index ap = 0; ap < dApr; ++ap) {
    cmat k(dA, dB);
    for (Index a = 0; a < dA; ++a) k.row(a) = w.row(a * dApr + ap);
    kraus.push_back(std::move(k));
  }
  return KrausChannel::from_kraus(std::move(kraus));
}

// Decoded overlap F^2((id (x) D)(omega_RB), psi_RA).
inline double decoded_fidelity(const cmat& omega_rb, Index dR, Index dB,
                               const KrausChannel& decoder, const cvec& psi_ra) {
  cmat decoded = apply_on_second(decoder, omega_rb, dR);
  double f = std::real(cplx(psi_ra.adjoint() * decoded * psi_ra));
  return std::clamp(f, 0.0, 1.0);
}

//==============================================================================
// Achievability simulation
//==============================================================================

struct AchievabilityReport {
  Index s = 0, m = 0;
  double delta = 0.0;
  double ic2_delta = 0.0;   // smoothed order-2 coherent information of omega_RE
  double rhs = 0.0;         // 1 - 4 delta - sqrt(m (2^ic2 - 1/s))
  double mc_mean = 0.0;     // group-averaged decoded fidelity estimate
  double mc_se = 0.0;
  int trials = 0;
  bool pass = false;        // mc_mean >= rhs - 3 se
};

inline AchievabilityReport verify_achievability_bound(const KrausChannel& phi, const CodeSubspace& code, Index m,
                                  double delta, int trials, std::uint64_t seed,
                                  int threads = 1) {
  if (m < 1 || m > code.code_dim()) throw dimension_error("verify_achievability_bound: need 1 <= m <= s");
  if (trials < 100) throw domain_error("verify_achievability_bound: need at least 100 trials");

  OmegaStates om = omega_states(phi, code);
  AchievabilityReport rep;
  rep.s = om.s;
  rep.m = m;
  rep.delta = delta;
  rep.trials = trials;

  // sqrt-trace form of 2^(smoothed I^c_2), avoiding the log/exp round trip;
  // values below the eigensolver noise floor are snapped to zero
  SmoothedResult ic2 = smooth_Ic2_state(om.omega_re.mat(), om.s, om.dE, delta);
  rep.ic2_delta = ic2.value;
  double st = sqrt_trace_conditional_order2(ic2.witness, om.s, om.dE);
  double inner = st * st - 1.0 / static_cast<double>(om.s);
  if (inner < 1e-12) inner = 0.0;
  rep.rhs = 1.0 - 4.0 * delta - std::sqrt(static_cast<double>(m) * inner);

  std::vector<double> values = parallel_map(
      static_cast<std::size_t>(trials), threads, [&](std::size_t trial) {
        CodeSample sample = sample_code(om, m, substream_seed(seed, trial));
        KrausChannel dec =
            uhlmann_decoder(sample.omega_rb, om.s, om.dB, sample.psi_ra, om.dA);
        return decoded_fidelity(sample.omega_rb, om.s, om.dB, dec, sample.psi_ra);
      });
  MeanSe ms = mean_and_se(values);
  rep.mc_mean = ms.mean;
  rep.mc_se = ms.se;
  rep.pass = rep.mc_mean >= rep.rhs - 3.0 * std::max(rep.mc_se, 1e-12);
  return rep;
}

//==============================================================================
// Average-fidelity identity
//==============================================================================

struct AvgFidelityReport {
  Index m = 0;
  double entanglement_fidelity = 0.0;
  double predicted_avg = 0.0;  // (m F_e + 1) / (m + 1)
  double mc_avg = 0.0;
  double mc_se = 0.0;
  int trials = 0;
  bool within_3se = false;
};

// Haar-average of the output overlap of a channel m -> m versus the value
// predicted from the entanglement fidelity.
inline AvgFidelityReport avg_fidelity_identity_check(const KrausChannel& lambda, int trials,
                                                     std::uint64_t seed, int threads = 1) {
  if (lambda.in_dim() != lambda.out_dim())
    throw dimension_error("avg_fidelity_identity_check: map must preserve the space");
  Index m = lambda.in_dim();
  AvgFidelityReport rep;
  rep.m = m;
  rep.trials = trials;

  PureState mes = max_entangled(m, m);
  cmat joint = apply_on_second(lambda, mes.projector(), m);
  rep.entanglement_fidelity =
      std::real(cplx(mes.amplitudes().adjoint() * joint * mes.amplitudes()));
  rep.predicted_avg = (static_cast<double>(m) * rep.entanglement_fidelity + 1.0) /
                      (static_cast<double>(m) + 1.0);

  std::vector<double> values = parallel_map(
      static_cast<std::size_t>(trials), threads, [&](std::size_t trial) {
        Rng rng(substream_seed(seed, trial));
        cvec phi = haar_state(m, rng);
        cmat out = lambda.apply(phi * phi.adjoint());
        return std::real(cplx(phi.adjoint() * out * phi));
      });
  MeanSe ms = mean_and_se(values);
  rep.mc_avg = ms.mean;
  rep.mc_se = ms.se;
  rep.within_3se = std::abs(rep.mc_avg - rep.predicted_avg) <= 3.0 * std::max(ms.se, 1e-12);
  return rep;
}

//==============================================================================
// Minimum-fidelity probe
//==============================================================================

struct PruningReport {
  Index m = 0;
  double f_ent_estimate = 0.0;    // decoded entanglement fidelity on the code
  double bound = 0.0;             // 1 - 2 (1 - F_ent)
  double sampled_min = 0.0;       // over pure states in the half-dimensional block
  int samples = 0;
  bool direction_consistent = false;  // sampled_min >= bound (evidence only)
};

// Samples worst-case output overlaps on a half-dimensional code block with a
// fixed decoder; the sampled minimum upper-bounds the true minimum, so the
// report states the direction of evidence rather than verifying the bound.
inline PruningReport pruning_probe(const KrausChannel& phi, const CodeSubspace& code, Index m,
                                   const KrausChannel& decoder, int samples,
                                   std::uint64_t seed) {
  if (m < 2 || m % 2 != 0 || m > code.code_dim())
    throw dimension_error("pruning_probe: need even m with 2 <= m <= s");
  if (decoder.in_dim() != phi.out_dim() || decoder.out_dim() != phi.in_dim())
    throw dimension_error("pruning_probe: decoder must map channel output back to its input");
  PruningReport rep;
  rep.m = m;
  rep.samples = samples;

  // decoded entanglement fidelity on the rank-m code block
  cmat block = code.isometry().leftCols(m);
  PureState mes = max_entangled(m, m);
  cvec psi = cvec::Zero(m * phi.in_dim());
  for (Index i = 0; i < m; ++i)
    psi.segment(i * phi.in_dim(), phi.in_dim()) =
        mes.amplitudes()[i * m + i] * block.col(i);
  cmat channel_out = apply_on_second(phi, psi * psi.adjoint(), m);
  cmat decoded = apply_on_second(decoder, channel_out, m);
  rep.f_ent_estimate = std::real(cplx(psi.adjoint() * decoded * psi));
  rep.bound = 1.0 - 2.0 * (1.0 - rep.f_ent_estimate);

  // half-dimensional block: first m/2 code vectors; adversarial sampling
  Index h = m / 2;
  Rng rng(seed);
  auto overlap_of = [&](const cvec& in_code) {
    cvec enc = cvec::Zero(phi.in_dim());
    for (Index i = 0; i < h; ++i) enc += in_code[i] * block.col(i);
    cmat out = decoder.apply(phi.apply(enc * enc.adjoint()));
    return std::real(cplx(enc.adjoint() * out * enc));
  };
  double worst = 1.0;
  for (int trial = 0; trial < samples; ++trial) {
    cvec v = haar_state(h, rng);
    double f = overlap_of(v);
    // hill climbing towards lower overlap
    for (int step = 0; step < 25; ++step) {
      cvec cand = v + 0.2 * haar_state(h, rng);
      cand /= cand.norm();
      double fc = overlap_of(cand);
      if (fc < f) {
        f = fc;
        v = cand;
      }
    }
    worst = std::min(worst, f);
  }
  rep.sampled_min = worst;
  rep.direction_consistent = rep.sampled_min >= rep.bound - 1e-9;
  return rep;
}

}  // namespace qcap

#endif  // QCAP_CODING_HPP
