#pragma once

// Quantum channels in Kraus form, their Choi matrices, and the metrics used to
// compare them.
//
// Choi convention (used everywhere): unnormalized, output factor first,
//   J(L) = sum_ij L(|i><j|) (x) |i><j|,
// so that J = sum_m vec(F_m) vec(F_m)^dagger with vec(F)[o * d_in + i] = F(o, i).
// Channel equality means Frobenius distance between Choi matrices <= abs_eps.

#include "qct/matrix_core.hpp"
#include "qct/weyl_ops.hpp"

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qct {

class KrausChannel {
 public:
  KrausChannel(std::vector<ComplexMatrix> kraus, std::string label = {})
      : kraus_(std::move(kraus)), label_(std::move(label)) {
    if (kraus_.empty()) throw DimensionError("KrausChannel: Kraus list must not be empty");
    const auto& first = kraus_.front();
    for (const auto& k : kraus_) {
      if (k.rows() != first.rows() || k.cols() != first.cols()) {
        throw DimensionError("KrausChannel: Kraus operators have mixed shapes");
      }
    }
  }

  const std::vector<ComplexMatrix>& kraus() const noexcept { return kraus_; }
  const std::string& label() const noexcept { return label_; }
  const Dims& in_dims() const noexcept { return kraus_.front().in_dims(); }
  const Dims& out_dims() const noexcept { return kraus_.front().out_dims(); }
  std::size_t d_in() const noexcept { return static_cast<std::size_t>(kraus_.front().cols()); }
  std::size_t d_out() const noexcept { return static_cast<std::size_t>(kraus_.front().rows()); }
  std::size_t size() const noexcept { return kraus_.size(); }

 private:
  std::vector<ComplexMatrix> kraus_;
  std::string label_;
};

struct ChoiMatrix {
  ComplexMatrix matrix;  // on (output (x) input)
  std::size_t d_in = 0;
  std::size_t d_out = 0;
};

/// Hermitian, PSD and unit-trace density operator.
class DensityState {
 public:
  explicit DensityState(ComplexMatrix m, Tolerance tol = {}) : m_(std::move(m)) {
    if (!m_.is_square()) throw DimensionError("DensityState: matrix must be square");
    if (!is_hermitian(m_, tol)) throw std::domain_error("DensityState: matrix is not Hermitian");
    if (std::abs(m_.trace() - 1.0) > tol.abs_eps) throw std::domain_error("DensityState: trace is not 1");
    if (hermitian_eigenvalues(m_).minCoeff() < -tol.abs_eps) {
      throw std::domain_error("DensityState: matrix is not positive semidefinite");
    }
  }

  static DensityState pure(const Vector& psi, const Dims& dims, Tolerance tol = {}) {
    return DensityState(ComplexMatrix::projector(psi / psi.norm(), dims), tol);
  }

  const ComplexMatrix& matrix() const noexcept { return m_; }
  const Dims& dims() const noexcept { return m_.dims(); }

 private:
  ComplexMatrix m_;
};

// ---------------------------------------------------------------------------
// validation and representations

struct CptpReport {
  double deviation = 0.0;  // ||sum F^dagger F - 1||_F
  bool pass = false;
};

inline CptpReport validate_cptp(const KrausChannel& c, Tolerance tol = {}) {
  const auto n = static_cast<Eigen::Index>(c.d_in());
  Matrix acc = Matrix::Zero(n, n);
  for (const auto& k : c.kraus()) acc += k.mat().adjoint() * k.mat();
  CptpReport r;
  r.deviation = (acc - Matrix::Identity(n, n)).norm();
  r.pass = r.deviation <= tol.abs_eps;
  return r;
}

inline ChoiMatrix choi_of(const KrausChannel& c) {
  const auto din = static_cast<Eigen::Index>(c.d_in());
  const auto dout = static_cast<Eigen::Index>(c.d_out());
  const auto n = din * dout;
  Matrix j = Matrix::Zero(n, n);
  Vector v(n);
  for (const auto& k : c.kraus()) {
    for (Eigen::Index o = 0; o < dout; ++o) {
      for (Eigen::Index i = 0; i < din; ++i) v(o * din + i) = k.mat()(o, i);
    }
    j.noalias() += v * v.adjoint();
  }
  auto join = [](const Dims& out, const Dims& in) {
    if (in == Dims{1}) return out;
    if (out == Dims{1}) return in;
    return concat_dims(out, in);
  };
  return {ComplexMatrix(std::move(j), join(c.out_dims(), c.in_dims())), c.d_in(), c.d_out()};
}

inline double choi_distance(const KrausChannel& a, const KrausChannel& b) {
  return frobenius_distance(choi_of(a).matrix, choi_of(b).matrix);
}

/// sum_m F_m X F_m^dagger for an arbitrary operator X (not necessarily a state).
inline ComplexMatrix apply_map(const KrausChannel& c, const ComplexMatrix& x) {
  if (static_cast<std::size_t>(x.rows()) != c.d_in() || !x.is_square()) {
    throw DimensionError("apply: operator dimension does not match channel input");
  }
  const auto dout = static_cast<Eigen::Index>(c.d_out());
  Matrix acc = Matrix::Zero(dout, dout);
  for (const auto& k : c.kraus()) acc.noalias() += k.mat() * x.mat() * k.mat().adjoint();
  return {std::move(acc), c.out_dims()};
}

inline DensityState apply(const KrausChannel& c, const DensityState& rho, Tolerance tol = {}) {
  return DensityState(apply_map(c, rho.matrix()), tol);
}

// ---------------------------------------------------------------------------
// constructors for common channels

inline KrausChannel identity_channel(const Dims& dims) {
  return KrausChannel({ComplexMatrix::identity(dims)}, "identity");
}

inline KrausChannel unitary_channel(const ComplexMatrix& u, std::string label = "unitary") {
  return KrausChannel({u}, std::move(label));
}

/// {E_mu (x) F_m}, outer loop over a.
inline KrausChannel channel_tensor(const KrausChannel& a, const KrausChannel& b) {
  std::vector<ComplexMatrix> out;
  out.reserve(a.size() * b.size());
  for (const auto& ea : a.kraus()) {
    for (const auto& fb : b.kraus()) out.push_back(tensor_product(ea, fb));
  }
  return KrausChannel(std::move(out), a.label() + "(x)" + b.label());
}

/// after o before, Kraus set {A_i B_j}.
inline KrausChannel channel_compose(const KrausChannel& after, const KrausChannel& before) {
  if (after.d_in() != before.d_out()) {
    throw DimensionError("channel_compose: inner dimensions do not match");
  }
  std::vector<ComplexMatrix> out;
  out.reserve(after.size() * before.size());
  for (const auto& a : after.kraus()) {
    for (const auto& b : before.kraus()) out.push_back(a * b);
  }
  return KrausChannel(std::move(out), after.label() + "o" + before.label());
}

/// <Phi|(c (x) id)(|Phi><Phi|)|Phi> = sum_m |tr F_m|^2 / d^2.
inline double entanglement_fidelity(const KrausChannel& c) {
  if (c.d_in() != c.d_out()) {
    throw DimensionError("entanglement_fidelity: channel must map a space to itself");
  }
  double acc = 0.0;
  for (const auto& k : c.kraus()) acc += std::norm(k.trace());
  const double d = static_cast<double>(c.d_in());
  return acc / (d * d);
}

/// Stinespring sampling: the first d columns of a Haar unitary on d * rank,
/// cut into rank blocks of d rows, form the Kraus operators.
inline KrausChannel random_cptp(std::size_t d, std::size_t rank, std::uint64_t seed) {
  if (rank < 1) throw std::invalid_argument("random_cptp: rank must be >= 1");
  if (d < 2) throw std::invalid_argument("random_cptp: dimension must be >= 2");
  const auto u = haar_random_unitary(d * rank, seed);
  const auto n = static_cast<Eigen::Index>(d);
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(rank);
  for (std::size_t j = 0; j < rank; ++j) {
    kraus.emplace_back(Matrix(u.mat().block(static_cast<Eigen::Index>(j) * n, 0, n, n)), Dims{d});
  }
  return KrausChannel(std::move(kraus), "random_cptp(rank=" + std::to_string(rank) + ")");
}

enum class NamedNoise { depolarizing, amplitude_damping, phase_damping, bit_flip };

inline std::string to_string(NamedNoise n) {
  switch (n) {
    case NamedNoise::depolarizing: return "depolarizing";
    case NamedNoise::amplitude_damping: return "amplitude_damping";
    case NamedNoise::phase_damping: return "phase_damping";
    case NamedNoise::bit_flip: return "bit_flip";
  }
  return "unknown";
}

/// Textbook Kraus sets. Depolarizing is defined for any d via the Weyl frame,
///   rho -> (1 - p) rho + p 1/d;
/// the damping and bit-flip channels are qubit-only.
inline KrausChannel named_channel(NamedNoise kind, double p, std::size_t d = 2) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::out_of_range("named_channel: parameter must lie in [0, 1]");
  }
  if (kind != NamedNoise::depolarizing && d != 2) {
    throw std::invalid_argument("named_channel: " + to_string(kind) + " is defined for qubits only");
  }
  std::vector<ComplexMatrix> k;
  const auto label = to_string(kind) + "(" + std::to_string(p) + ")";
  switch (kind) {
    case NamedNoise::depolarizing: {
      const WeylFrame frame(d);
      const double dd = static_cast<double>(d * d);
      const auto& els = frame.elements();
      k.push_back(cplx(std::sqrt(1.0 - (dd - 1.0) * p / dd)) * els[0]);
      for (std::size_t i = 1; i < els.size(); ++i) k.push_back(cplx(std::sqrt(p / dd)) * els[i]);
      break;
    }
    case NamedNoise::amplitude_damping: {
      Matrix k0(2, 2), k1(2, 2);
      k0 << 1, 0, 0, std::sqrt(1.0 - p);
      k1 << 0, std::sqrt(p), 0, 0;
      k.emplace_back(k0);
      k.emplace_back(k1);
      break;
    }
    case NamedNoise::phase_damping: {
      Matrix k0(2, 2), k1(2, 2);
      k0 << 1, 0, 0, std::sqrt(1.0 - p);
      k1 << 0, 0, 0, std::sqrt(p);
      k.emplace_back(k0);
      k.emplace_back(k1);
      break;
    }
    case NamedNoise::bit_flip:
      k.push_back(cplx(std::sqrt(1.0 - p)) * pauli::identity());
      k.push_back(cplx(std::sqrt(p)) * pauli::x());
      break;
  }
  return KrausChannel(std::move(k), label);
}

// ---------------------------------------------------------------------------
// states and entanglement

/// |Phi> = sum_k |k,k> / sqrt(d).
inline Vector maximally_entangled_vector(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  Vector v = Vector::Zero(n * n);
  for (Eigen::Index k = 0; k < n; ++k) v(k * n + k) = 1.0 / std::sqrt(static_cast<double>(d));
  return v;
}

/// Split of a state's factor list into [0, split) | [split, n).
struct Bipartition {
  std::size_t split = 1;
};

/// Sum of |negative eigenvalues| of the partial transpose on the second part.
inline double negativity(const DensityState& rho, Bipartition cut = {}) {
  const auto& dims = rho.dims();
  if (cut.split == 0 || cut.split >= dims.size()) {
    throw DimensionError("negativity: cut must leave factors on both sides");
  }
  ComplexMatrix pt = rho.matrix();
  for (std::size_t f = cut.split; f < dims.size(); ++f) pt = partial_transpose(pt, f);
  const auto ev = hermitian_eigenvalues(pt);
  double neg = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < 0.0) neg -= ev(i);
  }
  return neg;
}

}  // namespace qct
