/*
 * This file is part of the oneshot-qcap library.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qcap/dense.hpp"

using namespace qcap;

TEST_CASE("eigh reconstructs the input matrix") {
  Rng rng(11);
  for (int d : {2, 3, 5, 8, 16}) {
    cmat m = random_hermitian(d, rng);
    EigH e = eigh(m);
    cmat back = e.vectors * e.values.asDiagonal() * e.vectors.adjoint();
    CHECK(max_abs(back - m) < 1e-10 * std::max(1.0, max_abs(m)));
    cmat gram = e.vectors.adjoint() * e.vectors;
    CHECK(max_abs(gram - cmat::Identity(d, d)) < 1e-12);
  }
}

TEST_CASE("haar isometry has orthonormal columns") {
  Rng rng(5);
  for (auto [r, c] : std::vector<std::pair<Index, Index>>{{2, 2}, {4, 2}, {6, 3}, {8, 8}}) {
    cmat q = haar_isometry(r, c, rng);
    CHECK(max_abs(q.adjoint() * q - cmat::Identity(c, c)) < 1e-12);
  }
}

TEST_CASE("haar unitary sampling is reproducible by seed") {
  Rng a(77), b(77);
  cmat u1 = haar_unitary(4, a);
  cmat u2 = haar_unitary(4, b);
  CHECK(max_abs(u1 - u2) == 0.0);
}

TEST_CASE("spectral helpers") {
  Rng rng(3);
  cmat rho = random_density(4, rng);
  cmat s = msqrt_psd(rho);
  CHECK(max_abs(s * s - rho) < 1e-12);

  cmat inv_half = mpow_support(rho, -0.5);
  cmat should_be_id = inv_half * rho * inv_half;
  CHECK(max_abs(should_be_id - cmat::Identity(4, 4)) < 1e-9);

  SUBCASE("positive part trace of a diagonal matrix") {
    cmat m = cmat::Zero(3, 3);
    m(0, 0) = 1.5;
    m(1, 1) = -0.5;
    m(2, 2) = 0.25;
    CHECK(positive_part_trace(m) == doctest::Approx(1.75).epsilon(1e-14));
    CHECK(trace_norm_herm(m) == doctest::Approx(2.25).epsilon(1e-14));
  }
}

TEST_CASE("random effect has spectrum in [0, 1]") {
  Rng rng(9);
  for (int i = 0; i < 20; ++i) {
    cmat p = random_effect(4, rng);
    rvec v = eigh_values(p);
    CHECK(v[0] > -1e-12);
    CHECK(v[v.size() - 1] < 1.0 + 1e-12);
  }
}

TEST_CASE("gaussian stream is deterministic") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.gaussian() == b.gaussian());
}
