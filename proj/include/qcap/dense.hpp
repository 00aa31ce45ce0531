/*
 * This file is part of the oneshot-qcap library.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QCAP_DENSE_HPP
#define QCAP_DENSE_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "qcap/common.hpp"
#include "qcap/rng.hpp"

namespace qcap {

using cplx = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;
using rvec = Eigen::VectorXd;
using Eigen::Index;

inline cmat hermitize(const cmat& m) { return 0.5 * (m + m.adjoint()); }

inline double max_abs(const cmat& m) { return m.cwiseAbs().maxCoeff(); }

inline double hermiticity_defect(const cmat& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

struct EigH {
  rvec values;  // ascending
  cmat vectors; // columns
};

inline EigH eigh(const cmat& m) {
  Eigen::SelfAdjointEigenSolver<cmat> solver(hermitize(m));
  return EigH{solver.eigenvalues(), solver.eigenvectors()};
}

inline rvec eigh_values(const cmat& m) {
  Eigen::SelfAdjointEigenSolver<cmat> solver(hermitize(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

// f applied to the spectrum of a Hermitian matrix.
inline cmat herm_func(const cmat& m, const std::function<double(double)>& f) {
  EigH e = eigh(m);
  rvec fv(e.values.size());
  for (Index i = 0; i < e.values.size(); ++i) fv[i] = f(e.values[i]);
  return e.vectors * fv.asDiagonal() * e.vectors.adjoint();
}

inline cmat msqrt_psd(const cmat& m) {
  return herm_func(m, [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
}

// x^p on the support (eigenvalues above rel_tol * lambda_max), 0 elsewhere.
// Negative p is the pseudo-inverse power.
inline cmat mpow_support(const cmat& m, double p, double rel_tol = k_rank_tol) {
  EigH e = eigh(m);
  double lmax = e.values.size() ? e.values.cwiseAbs().maxCoeff() : 0.0;
  double cut = rel_tol * std::max(lmax, 1e-300);
  rvec fv(e.values.size());
  for (Index i = 0; i < e.values.size(); ++i)
    fv[i] = (e.values[i] > cut) ? std::pow(e.values[i], p) : 0.0;
  return e.vectors * fv.asDiagonal() * e.vectors.adjoint();
}

// log2 on the support, 0 elsewhere.
inline cmat mlog2_support(const cmat& m, double rel_tol = k_rank_tol) {
  EigH e = eigh(m);
  double lmax = e.values.size() ? e.values.cwiseAbs().maxCoeff() : 0.0;
  double cut = rel_tol * std::max(lmax, 1e-300);
  rvec fv(e.values.size());
  for (Index i = 0; i < e.values.size(); ++i)
    fv[i] = (e.values[i] > cut) ? std::log2(e.values[i]) : 0.0;
  return e.vectors * fv.asDiagonal() * e.vectors.adjoint();
}

inline double lambda_max(const cmat& m) {
  rvec v = eigh_values(m);
  return v.size() ? v[v.size() - 1] : 0.0;
}

inline double lambda_min(const cmat& m) {
  rvec v = eigh_values(m);
  return v.size() ? v[0] : 0.0;
}

// Sum of positive eigenvalues.
inline double positive_part_trace(const cmat& m) {
  rvec v = eigh_values(m);
  double s = 0.0;
  for (Index i = 0; i < v.size(); ++i)
    if (v[i] > 0.0) s += v[i];
  return s;
}

// Trace norm of a Hermitian matrix.
inline double trace_norm_herm(const cmat& m) {
  rvec v = eigh_values(m);
  double s = 0.0;
  for (Index i = 0; i < v.size(); ++i) s += std::abs(v[i]);
  return s;
}

inline cmat kron(const cmat& a, const cmat& b) {
  cmat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline cvec kron_vec(const cvec& a, const cvec& b) {
  cvec out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}

inline cmat gaussian_matrix(Index rows, Index cols, Rng& rng) {
  cmat g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i)
      g(i, j) = cplx(rng.gaussian(), rng.gaussian());
  return g;
}

// Haar isometry via QR of a complex Gaussian matrix, with the R-diagonal
// phases absorbed so the distribution is exactly Haar.
inline cmat haar_isometry(Index rows, Index cols, Rng& rng) {
  cmat g = gaussian_matrix(rows, cols, rng);
  Eigen::HouseholderQR<cmat> qr(g);
  cmat q = qr.householderQ() * cmat::Identity(rows, cols);
  cmat r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Index j = 0; j < cols; ++j) {
    cplx d = r(j, j);
    double a = std::abs(d);
    cplx phase = (a > 0.0) ? d / a : cplx(1.0, 0.0);
    q.col(j) *= phase;
  }
  return q;
}

inline cmat haar_unitary(Index dim, Rng& rng) { return haar_isometry(dim, dim, rng); }

inline cvec haar_state(Index dim, Rng& rng) {
  cvec v(dim);
  for (Index i = 0; i < dim; ++i) v[i] = cplx(rng.gaussian(), rng.gaussian());
  double n = v.norm();
  while (n == 0.0) {
    for (Index i = 0; i < dim; ++i) v[i] = cplx(rng.gaussian(), rng.gaussian());
    n = v.norm();
  }
  return v / n;
}

inline cmat random_hermitian(Index dim, Rng& rng) {
  return hermitize(gaussian_matrix(dim, dim, rng));
}

inline cmat random_density(Index dim, Rng& rng, Index rank = 0) {
  if (rank <= 0 || rank > dim) rank = dim;
  cmat g = gaussian_matrix(dim, rank, rng);
  cmat rho = g * g.adjoint();
  return rho / rho.trace().real();
}

// Random operator with spectrum in [0, 1].
inline cmat random_effect(Index dim, Rng& rng) {
  cmat u = haar_unitary(dim, rng);
  rvec d(dim);
  for (Index i = 0; i < dim; ++i) d[i] = rng.uniform();
  return u * d.asDiagonal() * u.adjoint();
}

}  // namespace qcap

#endif  // QCAP_DENSE_HPP
