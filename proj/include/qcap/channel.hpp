/*
 * This file is part of the oneshot-qcap library.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QCAP_CHANNEL_HPP
#define QCAP_CHANNEL_HPP

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qcap/qmatrix.hpp"

namespace qcap {

class CodeSubspace;

// Completely positive map as a list of Kraus operators; the trace-preserving
// check lives in from_kraus. Operators with norm below k_kraus_trim_tol are
// dropped so the environment dimension stays minimal.
inline constexpr double k_kraus_trim_tol = 1e-12;
inline constexpr double k_tp_tol = 1e-9;

class KrausChannel {
 public:
  static KrausChannel from_kraus(std::vector<cmat> ops, double tp_tol = k_tp_tol) {
    if (ops.empty()) throw dimension_error("KrausChannel: empty Kraus list");
    Index out = ops.front().rows();
    Index in = ops.front().cols();
    std::vector<cmat> kept;
    kept.reserve(ops.size());
    for (auto& k : ops) {
      if (k.rows() != out || k.cols() != in)
        throw dimension_error("KrausChannel: inconsistent Kraus shapes");
      if (k.norm() >= k_kraus_trim_tol) kept.push_back(std::move(k));
    }
    if (kept.empty()) throw dimension_error("KrausChannel: all Kraus operators are null");
    cmat acc = cmat::Zero(in, in);
    for (const auto& k : kept) acc += k.adjoint() * k;
    if (max_abs(acc - cmat::Identity(in, in)) > tp_tol)
      throw domain_error("KrausChannel: Kraus operators do not sum to the identity");
    return KrausChannel(in, out, std::move(kept));
  }

  Index in_dim() const { return in_; }
  Index out_dim() const { return out_; }
  Index env_dim() const { return static_cast<Index>(kraus_.size()); }
  const std::vector<cmat>& kraus() const { return kraus_; }

  cmat apply(const cmat& rho) const {
    if (rho.rows() != in_) throw dimension_error("KrausChannel::apply: dimension mismatch");
    cmat out = cmat::Zero(out_, out_);
    for (const auto& k : kraus_) out += k * rho * k.adjoint();
    return hermitize(out);
  }

  DensityOperator apply(const DensityOperator& rho) const {
    return DensityOperator::from_matrix(apply(rho.mat()), rho.subnormalized());
  }

  // Identity-preserving adjoint: X on the output space -> sum K^dag X K.
  cmat apply_adjoint(const cmat& x) const {
    if (x.rows() != out_)
      throw dimension_error("KrausChannel::apply_adjoint: dimension mismatch");
    cmat out = cmat::Zero(in_, in_);
    for (const auto& k : kraus_) out += k.adjoint() * x * k;
    return hermitize(out);
  }

  // Isometry V: in -> out (x) env with V rho V^dag tracing to the channel
  // output over env. Row index packs (b, e) as b * env_dim + e.
  cmat stinespring() const {
    Index ne = env_dim();
    cmat v = cmat::Zero(out_ * ne, in_);
    for (Index e = 0; e < ne; ++e)
      for (Index b = 0; b < out_; ++b) v.row(b * ne + e) = kraus_[e].row(b);
    return v;
  }

  // Complementary channel to the environment: rho -> Tr_B[V rho V^dag].
  KrausChannel complement() const {
    Index ne = env_dim();
    std::vector<cmat> comp;
    comp.reserve(static_cast<std::size_t>(out_));
    for (Index b = 0; b < out_; ++b) {
      cmat l(ne, in_);
      for (Index e = 0; e < ne; ++e) l.row(e) = kraus_[e].row(b);
      comp.push_back(std::move(l));
    }
    return from_kraus(std::move(comp));
  }

  KrausChannel restricted(const CodeSubspace& s) const;

  // Choi state (id (x) channel) applied to the normalized rank-d MES;
  // factors ordered (input, output).
  cmat choi() const {
    cmat c = cmat::Zero(in_ * out_, in_ * out_);
    for (const auto& k : kraus_) {
      // (id (x) K)|MES> has amplitude K(b,a)/sqrt(d) at (a,b)
      cvec v(in_ * out_);
      for (Index a = 0; a < in_; ++a)
        for (Index b = 0; b < out_; ++b) v[a * out_ + b] = k(b, a);
      c += v * v.adjoint();
    }
    return c / static_cast<double>(in_);
  }

 private:
  KrausChannel(Index in, Index out, std::vector<cmat> ops)
      : in_(in), out_(out), kraus_(std::move(ops)) {}

  Index in_;
  Index out_;
  std::vector<cmat> kraus_;
};

// Isometric embedding of an s-dimensional code space into a d-dimensional
// input space; columns are the code basis vectors.
class CodeSubspace {
 public:
  static CodeSubspace from_isometry(cmat w, double tol = 1e-10) {
    Index d = w.rows(), s = w.cols();
    if (s < 1 || s > d) throw dimension_error("CodeSubspace: need 1 <= s <= d");
    if (max_abs(w.adjoint() * w - cmat::Identity(s, s)) > tol)
      throw domain_error("CodeSubspace: columns are not orthonormal");
    return CodeSubspace(std::move(w));
  }

  // Embedding of the first s computational basis vectors.
  static CodeSubspace standard(Index d, Index s) {
    return from_isometry(cmat::Identity(d, d).leftCols(s));
  }

  static CodeSubspace full(Index d) { return standard(d, d); }

  static CodeSubspace haar(Index d, Index s, Rng& rng) {
    return from_isometry(haar_isometry(d, s, rng));
  }

  Index ambient_dim() const { return isometry_.rows(); }
  Index code_dim() const { return isometry_.cols(); }
  const cmat& isometry() const { return isometry_; }
  cmat projector() const { return isometry_ * isometry_.adjoint(); }

 private:
  explicit CodeSubspace(cmat w) : isometry_(std::move(w)) {}
  cmat isometry_;
};

inline KrausChannel KrausChannel::restricted(const CodeSubspace& s) const {
  if (s.ambient_dim() != in_)
    throw dimension_error("KrausChannel::restricted: subspace ambient dim mismatch");
  std::vector<cmat> ops;
  ops.reserve(kraus_.size());
  for (const auto& k : kraus_) ops.push_back(k * s.isometry());
  return from_kraus(std::move(ops));
}

//==============================================================================
// Reference/output/environment states of a channel on a code subspace
//==============================================================================

// |psi_RA> = s^{-1/2} sum_i |i_R> (x) |basis_i_A>, |omega_RBE> = (1 (x) V)|psi_RA>;
// the reference system R has dimension s, so the R-marginal is maximally mixed.
struct OmegaStates {
  Index s = 0, dA = 0, dB = 0, dE = 0;
  PureState psi_ra;
  PureState omega_rbe;
  FactorSpec rbe_factors;
  DensityOperator omega_rb;
  DensityOperator omega_re;
};

inline cvec psi_ra_vector(const CodeSubspace& code) {
  Index d = code.ambient_dim(), s = code.code_dim();
  cvec psi = cvec::Zero(s * d);
  double w = 1.0 / std::sqrt(static_cast<double>(s));
  for (Index i = 0; i < s; ++i)
    for (Index a = 0; a < d; ++a) psi[i * d + a] = w * code.isometry()(a, i);
  return psi;
}

inline cvec omega_rbe_vector(const KrausChannel& phi, const CodeSubspace& code) {
  if (code.ambient_dim() != phi.in_dim())
    throw dimension_error("omega_states: code ambient dim must match channel input");
  Index s = code.code_dim();
  cmat v = phi.stinespring();          // (dB*dE) x dA
  Index dbe = v.rows();
  cvec psi = psi_ra_vector(code);      // s * dA
  cvec omega = cvec::Zero(s * dbe);
  for (Index i = 0; i < s; ++i)
    omega.segment(i * dbe, dbe) = v * psi.segment(i * phi.in_dim(), phi.in_dim());
  return omega;
}

inline cmat omega_rb_matrix(const KrausChannel& phi, const CodeSubspace& code) {
  cvec omega = omega_rbe_vector(phi, code);
  std::vector<Index> dims{code.code_dim(), phi.out_dim(), phi.env_dim()};
  return pure_marginal(omega, dims, {true, true, false});
}

inline OmegaStates omega_states(const KrausChannel& phi, const CodeSubspace& code) {
  cvec omega = omega_rbe_vector(phi, code);
  Index s = code.code_dim(), dB = phi.out_dim(), dE = phi.env_dim();
  std::vector<Index> dims{s, dB, dE};
  cmat rb = pure_marginal(omega, dims, {true, true, false});
  cmat re = pure_marginal(omega, dims, {true, false, true});
  return OmegaStates{
      s,
      phi.in_dim(),
      dB,
      dE,
      PureState(psi_ra_vector(code)),
      PureState(omega),
      FactorSpec{{s, dB, dE}, {"R", "B", "E"}},
      DensityOperator::from_matrix(rb),
      DensityOperator::from_matrix(re)};
}

//==============================================================================
// Standard constructors
//==============================================================================

inline KrausChannel identity_channel(Index d) {
  return KrausChannel::from_kraus({cmat::Identity(d, d)});
}

// (1-p) rho + p Tr[rho] 1/d.
inline KrausChannel depolarizing_channel(Index d, double p) {
  if (p < 0.0 || p > 1.0) throw domain_error("depolarizing_channel: p must be in [0, 1]");
  std::vector<cmat> ops;
  ops.push_back(std::sqrt(1.0 - p) * cmat::Identity(d, d));
  double w = std::sqrt(p / static_cast<double>(d));
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) {
      cmat k = cmat::Zero(d, d);
      k(i, j) = w;
      ops.push_back(std::move(k));
    }
  return KrausChannel::from_kraus(std::move(ops));
}

inline KrausChannel amplitude_damping_channel(double gamma) {
  if (gamma < 0.0 || gamma > 1.0)
    throw domain_error("amplitude_damping_channel: gamma must be in [0, 1]");
  cmat k0 = cmat::Zero(2, 2), k1 = cmat::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - gamma);
  k1(0, 1) = std::sqrt(gamma);
  return KrausChannel::from_kraus({k0, k1});
}

// (1-p) rho + p Z rho Z.
inline KrausChannel dephasing_channel(double p) {
  if (p < 0.0 || p > 1.0) throw domain_error("dephasing_channel: p must be in [0, 1]");
  cmat z = cmat::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  return KrausChannel::from_kraus(
      {std::sqrt(1.0 - p) * cmat::Identity(2, 2), std::sqrt(p) * z});
}

// Channel drawn from a Haar Stinespring isometry into out (x) rank.
inline KrausChannel random_channel(Index d_in, Index d_out, Index kraus_rank,
                                   std::uint64_t seed) {
  if (kraus_rank < 1 || d_out * kraus_rank < d_in)
    throw dimension_error("random_channel: need d_out * kraus_rank >= d_in >= 1");
  Rng rng(seed);
  cmat v = haar_isometry(d_out * kraus_rank, d_in, rng);
  std::vector<cmat> ops;
  ops.reserve(static_cast<std::size_t>(kraus_rank));
  for (Index e = 0; e < kraus_rank; ++e) {
    cmat k(d_out, d_in);
    for (Index b = 0; b < d_out; ++b) k.row(b) = v.row(b * kraus_rank + e);
    ops.push_back(std::move(k));
  }
  return KrausChannel::from_kraus(std::move(ops));
}

//==============================================================================
// Channel sequences (finite truncation of a noise process)
//==============================================================================

inline constexpr double k_dim_guard_bits = 12.0;
inline constexpr std::size_t k_kraus_guard = 20000;

inline void check_dimension_guard(Index d, int n) {
  if (static_cast<double>(n) * std::log2(static_cast<double>(d)) > k_dim_guard_bits + 1e-9)
    throw resource_error("channel sequence: n * log2(d) exceeds the dimension guard");
}

struct ChannelSequence {
  std::string kind;
  int n_max = 1;
  std::function<KrausChannel(int)> generator;  // n in [1, n_max]

  KrausChannel at(int n) const {
    if (n < 1 || n > n_max) throw dimension_error("ChannelSequence: n out of range");
    return generator(n);
  }
};

namespace detail {

inline std::vector<cmat> kraus_tensor(const std::vector<cmat>& a, const std::vector<cmat>& b) {
  std::vector<cmat> out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) out.push_back(kron(x, y));
  if (out.size() > k_kraus_guard)
    throw resource_error("channel sequence: Kraus operator count exceeds guard");
  return out;
}

}  // namespace detail

inline KrausChannel tensor_power_channel(const KrausChannel& phi, int n) {
  check_dimension_guard(phi.in_dim(), n);
  std::vector<cmat> ops = phi.kraus();
  for (int i = 1; i < n; ++i) ops = detail::kraus_tensor(ops, phi.kraus());
  return KrausChannel::from_kraus(std::move(ops));
}

inline ChannelSequence iid_sequence(const KrausChannel& phi, int n_max) {
  check_dimension_guard(phi.in_dim(), n_max);
  return ChannelSequence{
      "iid", n_max, [phi](int n) { return tensor_power_channel(phi, n); }};
}

// Two-state Markov chain modulating the depolarizing strength per use.
struct MarkovDepolarizingParams {
  Index d = 2;
  double p0 = 0.0;
  double p1 = 0.0;
  std::array<std::array<double, 2>, 2> transition{{{1.0, 0.0}, {0.0, 1.0}}};
  std::array<double, 2> initial{1.0, 0.0};

  void validate() const {
    auto prob = [](double x) { return x >= -1e-12 && x <= 1.0 + 1e-12; };
    if (!prob(p0) || !prob(p1))
      throw domain_error("markov_depolarizing: depolarizing strengths must be in [0, 1]");
    for (int r = 0; r < 2; ++r) {
      if (!prob(transition[r][0]) || !prob(transition[r][1]) ||
          std::abs(transition[r][0] + transition[r][1] - 1.0) > 1e-9)
        throw domain_error("markov_depolarizing: transition rows must be distributions");
    }
    if (!prob(initial[0]) || !prob(initial[1]) ||
        std::abs(initial[0] + initial[1] - 1.0) > 1e-9)
      throw domain_error("markov_depolarizing: initial vector must be a distribution");
  }
};

inline ChannelSequence markov_depolarizing_sequence(const MarkovDepolarizingParams& params,
                                                    int n_max) {
  params.validate();
  check_dimension_guard(params.d, n_max);
  return ChannelSequence{
      "markov_depolarizing", n_max, [params](int n) {
        check_dimension_guard(params.d, n);
        const std::array<KrausChannel, 2> site{depolarizing_channel(params.d, params.p0),
                                               depolarizing_channel(params.d, params.p1)};
        std::vector<cmat> total;
        // Paths over the hidden state; each path contributes
        // Pr[path] * tensor product of per-site depolarizing channels.
        for (int path = 0; path < (1 << n); ++path) {
          double pr = 0.0;
          std::vector<int> states(n);
          for (int i = 0; i < n; ++i) states[i] = (path >> i) & 1;
          pr = params.initial[states[0]];
          for (int i = 1; i < n; ++i) pr *= params.transition[states[i - 1]][states[i]];
          if (pr <= 0.0) continue;
          std::vector<cmat> ops = site[states[0]].kraus();
          for (int i = 1; i < n; ++i) ops = detail::kraus_tensor(ops, site[states[i]].kraus());
          double w = std::sqrt(pr);
          for (auto& k : ops) {
            k *= w;
            total.push_back(std::move(k));
          }
          if (total.size() > k_kraus_guard)
            throw resource_error("markov_depolarizing: Kraus operator count exceeds guard");
        }
        return KrausChannel::from_kraus(std::move(total));
      }};
}

}  // namespace qcap

#endif  // QCAP_CHANNEL_HPP
