/*
 * This file is part of the oneshot-qcap library.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "qcap/coding.hpp"

using namespace qcap;

namespace {

// Two-sample Kolmogorov-Smirnov statistic; ties advance both sides.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    double fa = static_cast<double>(i) / static_cast<double>(a.size());
    double fb = static_cast<double>(j) / static_cast<double>(b.size());
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

}  // namespace

TEST_CASE("sample_code") {
  KrausChannel phi = amplitude_damping_channel(0.3);
  OmegaStates om = omega_states(phi, CodeSubspace::full(2));

  SUBCASE("m = s preserves the spectra of the subspace states") {
    CodeSample sample = sample_code(om, 2, 7);
    rvec base = eigh_values(om.omega_re.mat());
    rvec got = eigh_values(sample.omega_re);
    CHECK((base - got).cwiseAbs().maxCoeff() < 1e-10);
  }

  SUBCASE("reference marginal is P_m / m for 100 seeds") {
    OmegaStates om4 = omega_states(identity_channel(4), CodeSubspace::full(4));
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Index m = 1 + static_cast<Index>(seed % 4);
      CodeSample sample = sample_code(om4, m, seed);
      cmat omega_r = partial_trace(sample.omega_re, {sample.s, sample.dE}, {true, false});
      cmat expect = cmat::Zero(4, 4);
      for (Index i = 0; i < m; ++i) expect(i, i) = 1.0 / static_cast<double>(m);
      CHECK(max_abs(omega_r - expect) < 1e-9);
    }
  }

}

TEST_CASE("sampling distribution invariance under pre-rotation") {
  KrausChannel phi = amplitude_damping_channel(0.35);
  CodeSubspace base = CodeSubspace::full(2);
  Rng rot_rng(99);
  cmat v = haar_unitary(2, rot_rng);
  CodeSubspace rotated = CodeSubspace::from_isometry(base.isometry() * v);
  OmegaStates om_a = omega_states(phi, base);
  OmegaStates om_b = omega_states(phi, rotated);

  // m < s keeps the sampled statistic genuinely g-dependent
  const int n = 500;
  std::vector<double> purity_a(n), purity_b(n);
  for (int i = 0; i < n; ++i) {
    CodeSample sa = sample_code(om_a, 1, substream_seed(1, static_cast<std::uint64_t>(i)));
    CodeSample sb = sample_code(om_b, 1, substream_seed(2, static_cast<std::uint64_t>(i)));
    cmat ea = partial_trace(sa.omega_re, {sa.s, sa.dE}, {false, true});
    cmat eb = partial_trace(sb.omega_re, {sb.s, sb.dE}, {false, true});
    purity_a[static_cast<std::size_t>(i)] = std::real((ea * ea).trace());
    purity_b[static_cast<std::size_t>(i)] = std::real((eb * eb).trace());
  }
  CHECK(ks_statistic(purity_a, purity_b) < 0.12);
}

TEST_CASE("decoupling fidelity") {
  SUBCASE("noiseless channel decouples exactly for every draw") {
    OmegaStates om = omega_states(identity_channel(3), CodeSubspace::standard(3, 2));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      CodeSample sample = sample_code(om, 2, seed);
      CHECK(decoupling_fidelity(sample) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  SUBCASE("fully depolarizing channel pins the decoupling fidelity at 1/d^2") {
    // explicit Kraus computation: the environment keeps a faithful copy of
    // the input, so omega_RE has d flat eigenvalues 1/d against the flat
    // product reference 1/d^3, giving F^2 = (d sqrt(1/d^4))^2 = 1/d^2 for
    // every group element
    OmegaStates om = omega_states(depolarizing_channel(2, 1.0), CodeSubspace::full(2));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      CodeSample sample = sample_code(om, 2, seed);
      CHECK(decoupling_fidelity(sample) == doctest::Approx(0.25).epsilon(1e-7));
    }
  }

  SUBCASE("Monte-Carlo mean is stable across seeds") {
    OmegaStates om = omega_states(amplitude_damping_channel(0.3), CodeSubspace::full(2));
    auto mean_for = [&](std::uint64_t seed) {
      std::vector<double> v(2000);
      for (std::size_t i = 0; i < v.size(); ++i) {
        CodeSample s = sample_code(om, 2, substream_seed(seed, i));
        v[i] = decoupling_fidelity(s);
      }
      return mean_and_se(v).mean;
    };
    double m1 = mean_for(11), m2 = mean_for(22);
    CHECK(std::abs(m1 - m2) < 0.01);
  }
}

TEST_CASE("uhlmann decoder") {
  SUBCASE("identity channel decodes perfectly") {
    OmegaStates om = omega_states(identity_channel(2), CodeSubspace::full(2));
    KrausChannel dec = uhlmann_decoder(om.omega_rb.mat(), om.s, om.dB,
                                       om.psi_ra.amplitudes(), om.dA);
    double f = decoded_fidelity(om.omega_rb.mat(), om.s, om.dB, dec,
                                om.psi_ra.amplitudes());
    CHECK(f == doctest::Approx(1.0).epsilon(1e-10));
  }

  SUBCASE("per-sample decoded fidelity dominates the decoupling fidelity") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      KrausChannel phi = random_channel(2, 2, 2, seed + 1);
      OmegaStates om = omega_states(phi, CodeSubspace::full(2));
      CodeSample sample = sample_code(om, 2, seed * 31 + 7);
      KrausChannel dec =
          uhlmann_decoder(sample.omega_rb, om.s, om.dB, sample.psi_ra, om.dA);
      double dec_f = decoded_fidelity(sample.omega_rb, om.s, om.dB, dec, sample.psi_ra);
      double dcp_f = decoupling_fidelity(sample);
      CHECK(dec_f >= dcp_f - 1e-8);
    }
  }

  SUBCASE("decoder is trace preserving") {
    KrausChannel phi = random_channel(2, 2, 2, 5);
    OmegaStates om = omega_states(phi, CodeSubspace::full(2));
    KrausChannel dec = uhlmann_decoder(om.omega_rb.mat(), om.s, om.dB,
                                       om.psi_ra.amplitudes(), om.dA);
    cmat acc = cmat::Zero(dec.in_dim(), dec.in_dim());
    for (const auto& k : dec.kraus()) acc += k.adjoint() * k;
    CHECK(max_abs(acc - cmat::Identity(dec.in_dim(), dec.in_dim())) < 1e-9);
  }

  SUBCASE("marginal mismatch is rejected") {
    OmegaStates om = omega_states(identity_channel(2), CodeSubspace::full(2));
    cvec bad = cvec::Zero(4);
    bad[0] = 1.0;  // purifies a pure reference, not the maximally mixed one
    CHECK_THROWS_AS(uhlmann_decoder(om.omega_rb.mat(), 2, 2, bad, 2), domain_error);
  }
}

TEST_CASE("achievability simulation") {
  SUBCASE("noiseless channel saturates the bound") {
    for (Index s : {2, 3}) {
      AchievabilityReport rep = verify_achievability_bound(identity_channel(4), CodeSubspace::standard(4, s), s,
                                       0.0, 100, 3);
      CHECK(rep.rhs == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(rep.mc_mean == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(rep.pass);
    }
  }

  SUBCASE("weakly depolarizing qubit channel") {
    AchievabilityReport rep = verify_achievability_bound(depolarizing_channel(2, 0.02), CodeSubspace::full(2), 2,
                                     0.0, 300, 9);
    CHECK(rep.mc_mean >= rep.rhs - 3.0 * rep.mc_se);
  }

  SUBCASE("smoothing the reference-environment state keeps the bound sound") {
    AchievabilityReport rep = verify_achievability_bound(depolarizing_channel(2, 0.05), CodeSubspace::full(2), 2,
                                     0.05, 300, 6);
    CHECK(rep.delta == 0.05);
    CHECK(std::isfinite(rep.ic2_delta));
    // the smoothed witness can only lower the order-2 value
    OmegaStates om = omega_states(depolarizing_channel(2, 0.05), CodeSubspace::full(2));
    CHECK(rep.ic2_delta <= -cond_H2(om.omega_re.mat(), om.s, om.dE) + 1e-12);
    CHECK(rep.mc_mean >= rep.rhs - 3.0 * rep.mc_se);
  }

  SUBCASE("rank-one codes decode almost perfectly") {
    AchievabilityReport rep = verify_achievability_bound(depolarizing_channel(2, 0.1), CodeSubspace::full(2), 1,
                                     0.0, 150, 4);
    CHECK(rep.mc_mean > 0.9);
    CHECK(rep.pass);
  }

  SUBCASE("bound is monotone nonincreasing in the code rank") {
    OmegaStates om = omega_states(depolarizing_channel(2, 0.05), CodeSubspace::full(2));
    double st = sqrt_trace_conditional_order2(om.omega_re.mat(), om.s, om.dE);
    double inner = std::max(0.0, st * st - 0.5);
    double rhs1 = 1.0 - std::sqrt(1.0 * inner);
    double rhs2 = 1.0 - std::sqrt(2.0 * inner);
    CHECK(rhs2 <= rhs1 + 1e-12);
  }

  SUBCASE("standard error scales as the inverse square root of the trial count") {
    // m < s so the sampled fidelity genuinely varies across group elements
    KrausChannel phi = random_channel(3, 3, 2, 5);
    AchievabilityReport small = verify_achievability_bound(phi, CodeSubspace::full(3), 2, 0.0, 400, 17);
    AchievabilityReport large = verify_achievability_bound(phi, CodeSubspace::full(3), 2, 0.0, 1600, 17);
    double ratio = small.mc_se / std::max(large.mc_se, 1e-15);
    CHECK(ratio > 1.4);
    CHECK(ratio < 2.9);
  }

  SUBCASE("estimator is reproducible by seed") {
    KrausChannel phi = amplitude_damping_channel(0.2);
    AchievabilityReport a = verify_achievability_bound(phi, CodeSubspace::full(2), 2, 0.0, 200, 123);
    AchievabilityReport b = verify_achievability_bound(phi, CodeSubspace::full(2), 2, 0.0, 200, 123);
    CHECK(a.mc_mean == b.mc_mean);
    CHECK(a.mc_se == b.mc_se);
  }

  SUBCASE("trial floor is enforced") {
    CHECK_THROWS_AS(
        verify_achievability_bound(identity_channel(2), CodeSubspace::full(2), 2, 0.0, 50, 1),
        domain_error);
  }
}

TEST_CASE("decoded fidelity chain against the trace-norm estimate") {
  KrausChannel phi = random_channel(2, 2, 2, 42);
  OmegaStates om = omega_states(phi, CodeSubspace::full(2));
  std::vector<double> decs, dcps, tns;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    CodeSample sample = sample_code(om, 2, seed);
    KrausChannel dec = uhlmann_decoder(sample.omega_rb, om.s, om.dB, sample.psi_ra, om.dA);
    decs.push_back(decoded_fidelity(sample.omega_rb, om.s, om.dB, dec, sample.psi_ra));
    double f2 = decoupling_fidelity(sample);
    dcps.push_back(f2);
    cmat tau = cmat::Zero(sample.s, sample.s);
    for (Index i = 0; i < sample.m; ++i) tau(i, i) = 1.0 / static_cast<double>(sample.m);
    cmat omega_e = partial_trace(sample.omega_re, {sample.s, sample.dE}, {false, true});
    double tn = trace_norm_herm(sample.omega_re - kron(tau, omega_e));
    tns.push_back(tn);
    CHECK(f2 >= 1.0 - tn - 1e-9);  // F^2 >= 1 - trace distance
  }
  double mean_dec = mean_and_se(decs).mean;
  double mean_dcp = mean_and_se(dcps).mean;
  double mean_tn = mean_and_se(tns).mean;
  CHECK(mean_dec >= mean_dcp - 1e-9);
  CHECK(mean_dcp >= 1.0 - mean_tn - 1e-9);
}

TEST_CASE("average-fidelity identity") {
  SUBCASE("identity map gives unity on both sides") {
    AvgFidelityReport rep = avg_fidelity_identity_check(identity_channel(2), 500, 3);
    CHECK(rep.predicted_avg == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.mc_avg == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("depolarizing qubit map matches the closed form") {
    for (double p : {0.2, 0.6}) {
      AvgFidelityReport rep =
          avg_fidelity_identity_check(depolarizing_channel(2, p), 4000, 11);
      double f_e = 1.0 - 0.75 * p;
      CHECK(rep.entanglement_fidelity == doctest::Approx(f_e).epsilon(1e-10));
      CHECK(rep.predicted_avg == doctest::Approx((2.0 * f_e + 1.0) / 3.0).epsilon(1e-10));
      CHECK(rep.within_3se);
    }
  }

  SUBCASE("random qubit maps stay within three standard errors") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      KrausChannel lambda = random_channel(2, 2, 2, seed + 60);
      AvgFidelityReport rep = avg_fidelity_identity_check(lambda, 5000, seed + 1);
      CHECK(rep.within_3se);
    }
  }
}

TEST_CASE("pruning probe") {
  SUBCASE("noiseless channel gives unity on both sides") {
    KrausChannel id = identity_channel(2);
    PruningReport rep = pruning_probe(id, CodeSubspace::full(2), 2, identity_channel(2),
                                      20, 5);
    CHECK(rep.f_ent_estimate == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rep.sampled_min == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.direction_consistent);
  }

  SUBCASE("weak depolarizing noise keeps the direction of evidence") {
    KrausChannel phi = depolarizing_channel(2, 0.01);
    OmegaStates om = omega_states(phi, CodeSubspace::full(2));
    KrausChannel dec = uhlmann_decoder(om.omega_rb.mat(), om.s, om.dB,
                                       om.psi_ra.amplitudes(), om.dA);
    PruningReport rep = pruning_probe(phi, CodeSubspace::full(2), 2, dec, 50, 8);
    CHECK(rep.direction_consistent);
    CHECK(rep.sampled_min > 0.9);
  }

  SUBCASE("odd code ranks are rejected") {
    CHECK_THROWS_AS(pruning_probe(identity_channel(4), CodeSubspace::full(4), 3,
                                  identity_channel(4), 10, 1),
                    dimension_error);
  }
}
