/*
 * This file is part of the oneshot-qcap library.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QCAP_QMATRIX_HPP
#define QCAP_QMATRIX_HPP

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qcap/dense.hpp"

namespace qcap {

//==============================================================================
// Domain types
//==============================================================================

class HermitianOperator {
 public:
  explicit HermitianOperator(cmat m, double hermiticity_tol = k_herm_tol)
      : mat_(std::move(m)) {
    if (mat_.rows() < 1 || mat_.rows() != mat_.cols())
      throw dimension_error("HermitianOperator: matrix must be square with dim >= 1");
    if (hermiticity_defect(mat_) > hermiticity_tol)
      throw domain_error("HermitianOperator: hermiticity defect exceeds tolerance");
    mat_ = hermitize(mat_);
  }

  Index dim() const { return mat_.rows(); }
  const cmat& mat() const { return mat_; }

 private:
  cmat mat_;
};

// Positive-semidefinite operator with trace 1 (or trace <= 1 when the
// subnormalized flag is set).
class DensityOperator {
 public:
  explicit DensityOperator(HermitianOperator op, bool subnormalized = false)
      : op_(std::move(op)), subnormalized_(subnormalized) {
    double lmin = lambda_min(op_.mat());
    if (lmin < -k_psd_tol)
      throw domain_error("DensityOperator: negative eigenvalue beyond tolerance");
    double tr = op_.mat().trace().real();
    if (subnormalized_) {
      if (tr > 1.0 + k_trace_tol || tr < -k_trace_tol)
        throw domain_error("DensityOperator: trace must lie in [0, 1] (subnormalized)");
    } else {
      if (std::abs(tr - 1.0) > k_trace_tol)
        throw domain_error("DensityOperator: trace must be 1 within tolerance");
    }
  }

  static DensityOperator from_matrix(cmat m, bool subnormalized = false) {
    return DensityOperator(HermitianOperator(std::move(m)), subnormalized);
  }

  Index dim() const { return op_.dim(); }
  const cmat& mat() const { return op_.mat(); }
  const HermitianOperator& op() const { return op_; }
  bool subnormalized() const { return subnormalized_; }
  double trace() const { return op_.mat().trace().real(); }

 private:
  HermitianOperator op_;
  bool subnormalized_;
};

class PureState {
 public:
  explicit PureState(cvec amplitudes) : amp_(std::move(amplitudes)) {
    if (amp_.size() < 1) throw dimension_error("PureState: dim >= 1 required");
    double n = amp_.norm();
    if (std::abs(n - 1.0) > k_psd_tol)
      throw domain_error("PureState: norm must be 1 within tolerance");
  }

  Index dim() const { return amp_.size(); }
  const cvec& amplitudes() const { return amp_; }
  cmat projector() const { return amp_ * amp_.adjoint(); }
  DensityOperator density() const { return DensityOperator::from_matrix(projector()); }

 private:
  cvec amp_;
};

// Tensor-factor bookkeeping: an ordered list of factor dimensions with labels.
struct FactorSpec {
  std::vector<Index> dims;
  std::vector<std::string> labels;

  Index total_dim() const {
    Index p = 1;
    for (Index d : dims) p *= d;
    return p;
  }

  std::size_t index_of(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == label) return i;
    throw dimension_error("FactorSpec: unknown label '" + label + "'");
  }

  void validate() const {
    if (dims.size() != labels.size() || dims.empty())
      throw dimension_error("FactorSpec: dims and labels must be nonempty and aligned");
    for (Index d : dims)
      if (d < 1) throw dimension_error("FactorSpec: factor dims must be positive");
  }

  void validate_against(Index operator_dim) const {
    validate();
    if (total_dim() != operator_dim)
      throw dimension_error("FactorSpec: product of dims does not match operator dim");
  }
};

//==============================================================================
// Partial traces
//==============================================================================

namespace detail {

// Composite row index for a multi-index split into kept/traced factors; the
// kept factors preserve their original order.
inline void factor_offsets(const std::vector<Index>& dims, const std::vector<bool>& keep,
                           std::vector<Index>& kept_offsets, std::vector<Index>& traced_offsets) {
  std::size_t k = dims.size();
  std::vector<Index> strides(k, 1);
  for (std::size_t j = k; j-- > 1;) strides[j - 1] = strides[j] * dims[j];

  kept_offsets.assign(1, 0);
  traced_offsets.assign(1, 0);
  for (std::size_t j = 0; j < k; ++j) {
    auto& target = keep[j] ? kept_offsets : traced_offsets;
    std::vector<Index> next;
    next.reserve(target.size() * static_cast<std::size_t>(dims[j]));
    for (Index base : target)
      for (Index x = 0; x < dims[j]; ++x) next.push_back(base + x * strides[j]);
    target = std::move(next);
  }
}

}  // namespace detail

inline cmat partial_trace(const cmat& op, const std::vector<Index>& dims,
                          const std::vector<bool>& keep) {
  if (dims.size() != keep.size())
    throw dimension_error("partial_trace: keep mask must match factor count");
  Index total = 1;
  for (Index d : dims) total *= d;
  if (op.rows() != total || op.cols() != total)
    throw dimension_error("partial_trace: factor product does not match operator dim");

  std::vector<Index> kept, traced;
  detail::factor_offsets(dims, keep, kept, traced);
  Index p = static_cast<Index>(kept.size());
  cmat out = cmat::Zero(p, p);
  for (Index r = 0; r < p; ++r)
    for (Index c = 0; c < p; ++c) {
      cplx s(0.0, 0.0);
      for (Index e : traced) s += op(kept[r] + e, kept[c] + e);
      out(r, c) = s;
    }
  return out;
}

inline HermitianOperator partial_trace(const HermitianOperator& op, const FactorSpec& factors,
                                       const std::set<std::string>& keep_labels) {
  factors.validate_against(op.dim());
  std::vector<bool> keep(factors.dims.size(), false);
  for (const auto& l : keep_labels) keep[factors.index_of(l)] = true;
  return HermitianOperator(partial_trace(op.mat(), factors.dims, keep));
}

// Marginal of a pure state without materializing the full projector.
inline cmat pure_marginal(const cvec& amp, const std::vector<Index>& dims,
                          const std::vector<bool>& keep) {
  Index total = 1;
  for (Index d : dims) total *= d;
  if (amp.size() != total)
    throw dimension_error("pure_marginal: factor product does not match state dim");
  std::vector<Index> kept, traced;
  detail::factor_offsets(dims, keep, kept, traced);
  Index p = static_cast<Index>(kept.size());
  cmat out = cmat::Zero(p, p);
  for (Index r = 0; r < p; ++r)
    for (Index c = 0; c <= r; ++c) {
      cplx s(0.0, 0.0);
      for (Index e : traced) s += amp[kept[r] + e] * std::conj(amp[kept[c] + e]);
      out(r, c) = s;
      out(c, r) = std::conj(s);
    }
  return out;
}

//==============================================================================
// Distances, fidelity, projectors
//==============================================================================

// Tr sqrt(sqrt(rho) sigma sqrt(rho)); valid for subnormalized inputs.
inline double fidelity_mat(const cmat& rho, const cmat& sigma) {
  if (rho.rows() != sigma.rows())
    throw dimension_error("fidelity: dimension mismatch");
  cmat sr = msqrt_psd(rho);
  cmat inner = hermitize(sr * sigma * sr);
  rvec v = eigh_values(inner);
  double f = 0.0;
  for (Index i = 0; i < v.size(); ++i)
    if (v[i] > 0.0) f += std::sqrt(v[i]);
  return f;
}

inline double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
  double f = fidelity_mat(rho.mat(), sigma.mat());
  return std::clamp(f, 0.0, 1.0);
}

inline double trace_distance(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.dim() != b.dim()) throw dimension_error("trace_distance: dimension mismatch");
  return trace_norm_herm(a.mat() - b.mat());
}

inline double trace_distance_mat(const cmat& a, const cmat& b) {
  if (a.rows() != b.rows()) throw dimension_error("trace_distance: dimension mismatch");
  return trace_norm_herm(a - b);
}

// Projector onto the subspace where A - B is nonnegative. Eigenvalues in
// [-tie_tol, tie_tol] count as nonnegative.
inline cmat positive_part_projector(const cmat& a, const cmat& b, double tie_tol = k_tie_tol) {
  if (a.rows() != b.rows())
    throw dimension_error("positive_part_projector: dimension mismatch");
  EigH e = eigh(a - b);
  cmat p = cmat::Zero(a.rows(), a.rows());
  for (Index i = 0; i < e.values.size(); ++i)
    if (e.values[i] >= -tie_tol) p += e.vectors.col(i) * e.vectors.col(i).adjoint();
  return p;
}

inline HermitianOperator positive_part_projector(const HermitianOperator& a,
                                                 const HermitianOperator& b,
                                                 double tie_tol = k_tie_tol) {
  return HermitianOperator(positive_part_projector(a.mat(), b.mat(), tie_tol));
}

// Projector onto the support; rank_tol is relative to the largest eigenvalue.
inline cmat support_projector(const cmat& rho, double rank_tol = k_rank_tol) {
  EigH e = eigh(rho);
  double lmax = e.values.size() ? e.values.cwiseAbs().maxCoeff() : 0.0;
  double cut = rank_tol * std::max(lmax, 1e-300);
  cmat p = cmat::Zero(rho.rows(), rho.rows());
  for (Index i = 0; i < e.values.size(); ++i)
    if (e.values[i] > cut) p += e.vectors.col(i) * e.vectors.col(i).adjoint();
  return p;
}

inline HermitianOperator support_projector(const DensityOperator& rho,
                                           double rank_tol = k_rank_tol) {
  return HermitianOperator(support_projector(rho.mat(), rank_tol));
}

inline Index support_rank(const cmat& rho, double rank_tol = k_rank_tol) {
  rvec v = eigh_values(rho);
  double lmax = v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
  double cut = rank_tol * std::max(lmax, 1e-300);
  Index r = 0;
  for (Index i = 0; i < v.size(); ++i)
    if (v[i] > cut) ++r;
  return r;
}

//==============================================================================
// Purification and maximally entangled states
//==============================================================================

// Schmidt-form purification; the purifying system is the second factor and
// has dimension rank(rho).
inline PureState purify(const DensityOperator& rho, double rank_tol = 1e-12) {
  EigH e = eigh(rho.mat());
  Index d = rho.dim();
  double lmax = e.values.size() ? e.values.maxCoeff() : 0.0;
  double cut = rank_tol * std::max(lmax, 1e-300);
  std::vector<Index> kept;
  for (Index i = e.values.size(); i-- > 0;)
    if (e.values[i] > cut) kept.push_back(i);  // descending
  Index r = static_cast<Index>(kept.size());
  if (r == 0) throw domain_error("purify: zero operator has no purification");
  cvec amp = cvec::Zero(d * r);
  for (Index k = 0; k < r; ++k) {
    double w = std::sqrt(e.values[kept[k]]);
    for (Index a = 0; a < d; ++a) amp[a * r + k] = w * e.vectors(a, kept[k]);
  }
  amp /= amp.norm();
  return PureState(amp);
}

// (1/sqrt(m)) sum_{i<m} |i>|i> in C^d (x) C^d.
inline PureState max_entangled(Index m, Index d) {
  if (m < 1 || d < 1) throw dimension_error("max_entangled: dims must be positive");
  if (m > d) throw domain_error("max_entangled: rank m must not exceed d");
  cvec amp = cvec::Zero(d * d);
  double w = 1.0 / std::sqrt(static_cast<double>(m));
  for (Index i = 0; i < m; ++i) amp[i * d + i] = w;
  return PureState(amp);
}

inline cmat transpose_in_basis(const cmat& a) { return a.transpose(); }

}  // namespace qcap

#endif  // QCAP_QMATRIX_HPP
