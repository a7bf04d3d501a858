#pragma once

// Channel transparency pipeline on A (x) B (x) S, for any system dimension d.
//
//   1. ancilla A, B prepared in |psi0>|psi0>, psi0 the uniform superposition
//   2. entangling unitary U = (1_B (x) C_X^{AS}) (1_A (x) C_Z^{BS})
//   3. system noise L on S, ancilla noise Phi on AB
//   4. U^dagger, then the correction V (unitary or projective Kraus form)
//
// The ancilla preparation is absorbed as the isometry W = |psi0 psi0> (x) 1_S,
// so the assembled pipeline is a channel from S to A (x) B (x) S.
//
// Label basis: after U^dagger, a frame component Z^m X^n of a system Kraus
// operator leaves the ancilla in |psi_m>_A |psi_n>_B with
//   |psi_m>_A = Z^m |psi0>,  |psi_n>_B = Z^{n(d-1) mod d} |psi0>.

#include "qct/channel_model.hpp"
#include "qct/matrix_core.hpp"
#include "qct/weyl_ops.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qct {

enum class VVariant { eq3_unitary, hadamard_conjugated, projective_kraus };
enum class AbOrder { AB, BA };
enum class AncillaNoiseKind {
  identity,
  mixed_unitary_in_class,
  unitary_in_class,
  general_in_class,
  out_of_class_control,
};

inline std::string to_string(VVariant v) {
  switch (v) {
    case VVariant::eq3_unitary: return "eq3_unitary";
    case VVariant::hadamard_conjugated: return "hadamard_conjugated";
    case VVariant::projective_kraus: return "projective_kraus";
  }
  return "unknown";
}

inline std::string to_string(AbOrder o) { return o == AbOrder::AB ? "AB" : "BA"; }

inline std::string to_string(AncillaNoiseKind k) {
  switch (k) {
    case AncillaNoiseKind::identity: return "identity";
    case AncillaNoiseKind::mixed_unitary_in_class: return "mixed_unitary_in_class";
    case AncillaNoiseKind::unitary_in_class: return "unitary_in_class";
    case AncillaNoiseKind::general_in_class: return "general_in_class";
    case AncillaNoiseKind::out_of_class_control: return "out_of_class_control";
  }
  return "unknown";
}

inline VVariant parse_v_variant(std::string_view s) {
  for (auto v : {VVariant::eq3_unitary, VVariant::hadamard_conjugated, VVariant::projective_kraus}) {
    if (s == to_string(v)) return v;
  }
  throw std::invalid_argument("unknown V variant: " + std::string(s));
}

inline AbOrder parse_ab_order(std::string_view s) {
  if (s == "AB") return AbOrder::AB;
  if (s == "BA") return AbOrder::BA;
  throw std::invalid_argument("unknown ab order: " + std::string(s));
}

inline AncillaNoiseKind parse_ancilla_noise(std::string_view s) {
  for (auto k : {AncillaNoiseKind::identity, AncillaNoiseKind::mixed_unitary_in_class,
                 AncillaNoiseKind::unitary_in_class, AncillaNoiseKind::general_in_class,
                 AncillaNoiseKind::out_of_class_control}) {
    if (s == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown ancilla noise kind: " + std::string(s));
}

// ---------------------------------------------------------------------------
// states and building blocks

/// |psi0> = sum_k |k> / sqrt(d)
inline Vector uniform_superposition(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  return Vector::Constant(n, cplx(1.0 / std::sqrt(static_cast<double>(d))));
}

/// |psi_m>_A (x) |psi_n>_B, the ancilla record of frame element Z^m X^n.
inline Vector label_state(const WeylFrame& frame, std::size_t m, std::size_t n) {
  const std::size_t d = frame.d();
  const Vector psi0 = uniform_superposition(d);
  const Vector a = frame.z_pow(static_cast<long>(m)).mat() * psi0;
  const Vector b = frame.z_pow(static_cast<long>((n * (d - 1)) % d)).mat() * psi0;
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

/// (m, n) exponents of each frame element, in frame order.
/// Qubit frame (1, sigma_x, sigma_y, sigma_z) maps to (0,0), (0,1), (1,1), (1,0).
inline std::vector<std::pair<std::size_t, std::size_t>> frame_labels(std::size_t d) {
  if (d == 2) return {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t m = 0; m < d; ++m) {
    for (std::size_t n = 0; n < d; ++n) out.emplace_back(m, n);
  }
  return out;
}

inline DensityState ancilla_state(std::size_t d) {
  const Vector psi0 = uniform_superposition(d);
  Vector both(static_cast<Eigen::Index>(d * d));
  for (Eigen::Index i = 0; i < psi0.size(); ++i) both.segment(i * psi0.size(), psi0.size()) = psi0(i) * psi0;
  return DensityState::pure(both, {d, d});
}

/// sum_k |k><k|_control (x) powers[k]
inline ComplexMatrix controlled_power(const WeylFrame& frame, bool shift) {
  const std::size_t d = frame.d();
  ComplexMatrix acc = ComplexMatrix::zero({d, d});
  for (std::size_t k = 0; k < d; ++k) {
    Vector e = Vector::Zero(static_cast<Eigen::Index>(d));
    e(static_cast<Eigen::Index>(k)) = 1.0;
    const auto& target = shift ? frame.x_pow(static_cast<long>(k)) : frame.z_pow(static_cast<long>(k));
    acc = acc + tensor_product(ComplexMatrix::projector(e, {d}), target);
  }
  return acc;
}

/// U = (1_B (x) C_X^{AS}) (1_A (x) C_Z^{BS}) on A (x) B (x) S.
/// Block on |m,n><m,n|_AB is X^m Z^n; for d = 2 this is the qubit blocks
/// (1, sigma_z, sigma_x, -i sigma_y) on |00>, |01>, |10>, |11>.
inline ComplexMatrix build_u(std::size_t d) {
  if (d < 2) throw std::invalid_argument("build_u: d must be >= 2");
  const WeylFrame frame(d);
  const auto id = ComplexMatrix::identity({d});
  const auto cz_bs = tensor_product(id, controlled_power(frame, false));                           // A,B,S
  const auto cx_as = permute_factors(tensor_product(id, controlled_power(frame, true)), {1, 0, 2});  // B,A,S -> A,B,S
  return cx_as * cz_bs;
}

/// The qubit U written term by term as projectors on AB times Pauli blocks.
inline ComplexMatrix qubit_u_projector_sum() {
  auto proj = [](int a, int b) {
    Vector e = Vector::Zero(4);
    e(2 * a + b) = 1.0;
    return ComplexMatrix::projector(e, {2, 2});
  };
  return tensor_product(proj(0, 0), pauli::identity()) + tensor_product(proj(0, 1), pauli::z()) +
         tensor_product(proj(1, 0), pauli::x()) + cplx(-1i) * tensor_product(proj(1, 1), pauli::y());
}

/// Correction applied on S when the ancilla is found in label (m, n).
/// Qubit: the Pauli that undoes the frame element (1, sigma_x, sigma_y, sigma_z).
/// Qudit: (Z^m X^n)^dagger.
inline ComplexMatrix label_correction(const WeylFrame& frame, std::size_t frame_index) {
  if (frame.d() == 2) return frame.elements()[frame_index];
  return frame.elements()[frame_index].adjoint();
}

inline ComplexMatrix swap_ab(const ComplexMatrix& m) { return permute_factors(m, {1, 0, 2}); }

/// Step-4 correction, either a unitary or a Kraus set on A (x) B (x) S.
struct CorrectionStep {
  VVariant variant;
  AbOrder order;
  std::optional<ComplexMatrix> unitary;
  std::vector<ComplexMatrix> kraus;  // projective variant only

  /// Kraus operators of the step viewed as a channel.
  std::vector<ComplexMatrix> operators() const {
    if (unitary) return {*unitary};
    return kraus;
  }

  KrausChannel as_channel() const { return KrausChannel(operators(), "V:" + to_string(variant)); }
};

inline CorrectionStep build_v(std::size_t d, VVariant variant, AbOrder order = AbOrder::AB) {
  if (d < 2) throw std::invalid_argument("build_v: d must be >= 2");
  if (variant == VVariant::hadamard_conjugated && d != 2) {
    throw std::invalid_argument("build_v: hadamard_conjugated variant is defined for d = 2 only");
  }
  const WeylFrame frame(d);
  CorrectionStep step{variant, order, std::nullopt, {}};
  auto reorder = [order](ComplexMatrix m) { return order == AbOrder::BA ? swap_ab(m) : m; };

  if (variant == VVariant::hadamard_conjugated) {
    const auto h = pauli::hadamard();
    const auto hhh = tensor_product({h, h, h});
    step.unitary = reorder(hhh * build_u(2) * hhh);
    return step;
  }

  const auto labels = frame_labels(d);
  std::vector<ComplexMatrix> terms;
  terms.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto [m, n] = labels[i];
    const auto p = ComplexMatrix::projector(label_state(frame, m, n), {d, d});
    terms.push_back(reorder(tensor_product(p, label_correction(frame, i))));
  }
  if (variant == VVariant::projective_kraus) {
    step.kraus = std::move(terms);
  } else {
    ComplexMatrix sum = terms.front();
    for (std::size_t i = 1; i < terms.size(); ++i) sum = sum + terms[i];
    step.unitary = std::move(sum);
  }
  return step;
}

struct ProtocolAssembly {
  std::size_t d;
  ComplexMatrix u;
  CorrectionStep v;
  DensityState ancilla;
  VVariant variant;
  AbOrder order;
};

inline ProtocolAssembly make_protocol(std::size_t d, VVariant variant = VVariant::eq3_unitary,
                                      AbOrder order = AbOrder::AB) {
  return {d, build_u(d), build_v(d, variant, order), ancilla_state(d), variant, order};
}

/// W = |psi0 psi0>_AB (x) 1_S, a d^3 x d isometry.
inline ComplexMatrix ancilla_isometry(std::size_t d) {
  Vector psi0 = uniform_superposition(d);
  Vector both(static_cast<Eigen::Index>(d * d));
  for (Eigen::Index i = 0; i < psi0.size(); ++i) both.segment(i * psi0.size(), psi0.size()) = psi0(i) * psi0;
  const auto ket = ComplexMatrix::ket(both, {d, d});
  return tensor_product(ket, ComplexMatrix::identity({d}));
}

// ---------------------------------------------------------------------------
// ancilla noise

/// Spanning operators of the tolerated ancilla noise class.
/// Qubit: 1(x)1, sigma_x(x)1, sigma_y(x)sigma_x, sigma_z(x)sigma_x.
/// Qudit: Z^i X^j (x) X^{d-i}, 0 <= i, j < d, lexicographic.
inline std::vector<ComplexMatrix> ancilla_span_basis(std::size_t d) {
  if (d == 2) {
    const auto i = pauli::identity(), x = pauli::x(), y = pauli::y(), z = pauli::z();
    return {tensor_product(i, i), tensor_product(x, i), tensor_product(y, x), tensor_product(z, x)};
  }
  const WeylFrame frame(d);
  std::vector<ComplexMatrix> out;
  out.reserve(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      out.push_back(tensor_product(frame_element(frame, i, j),
                                   frame.x_pow(static_cast<long>(d) - static_cast<long>(i))));
    }
  }
  return out;
}

/// ||K - P(K)||_F / sqrt(side), P the orthogonal projection onto the span.
/// The basis elements are mutually Hilbert-Schmidt orthogonal.
inline double span_residual(const ComplexMatrix& k, const std::vector<ComplexMatrix>& basis) {
  Matrix proj = Matrix::Zero(k.rows(), k.cols());
  for (const auto& b : basis) {
    const cplx num = (b.mat().adjoint() * k.mat()).trace();
    const double den = b.mat().squaredNorm();
    proj += (num / den) * b.mat();
  }
  return (k.mat() - proj).norm() / std::sqrt(static_cast<double>(k.rows()));
}

struct AncillaNoiseSpec {
  AncillaNoiseKind kind = AncillaNoiseKind::identity;
  std::uint64_t seed = 0;
  std::size_t d = 2;
};

inline bool is_in_class(AncillaNoiseKind k) { return k != AncillaNoiseKind::out_of_class_control; }

class ResamplingExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<cplx> gaussian_coeffs(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<cplx> c(n);
  for (auto& v : c) {
    const double re = normal(rng);
    const double im = normal(rng);
    v = cplx(re, im);
  }
  return c;
}

inline ComplexMatrix combine(const std::vector<ComplexMatrix>& basis, const std::vector<cplx>& c) {
  Matrix acc = Matrix::Zero(basis.front().rows(), basis.front().cols());
  for (std::size_t i = 0; i < basis.size(); ++i) acc += c[i] * basis[i].mat();
  return {std::move(acc), basis.front().dims()};
}

}  // namespace detail

inline KrausChannel sample_ancilla_noise(const AncillaNoiseSpec& spec, Tolerance tol = {}) {
  const std::size_t d = spec.d;
  if (d < 2) throw std::invalid_argument("sample_ancilla_noise: d must be >= 2");
  const Dims ab{d, d};
  std::mt19937_64 rng(spec.seed);
  const auto label = to_string(spec.kind);

  switch (spec.kind) {
    case AncillaNoiseKind::identity:
      return KrausChannel({ComplexMatrix::identity(ab)}, label);

    case AncillaNoiseKind::mixed_unitary_in_class: {
      const auto basis = ancilla_span_basis(d);
      std::exponential_distribution<double> expo(1.0);
      std::vector<double> w(basis.size());
      double total = 0.0;
      for (auto& x : w) total += (x = expo(rng));
      std::vector<ComplexMatrix> k;
      for (std::size_t i = 0; i < basis.size(); ++i) k.push_back(cplx(std::sqrt(w[i] / total)) * basis[i]);
      return KrausChannel(std::move(k), label);
    }

    case AncillaNoiseKind::unitary_in_class: {
      // exp(iH) with H Hermitian in the span; the span is a *-algebra.
      const auto basis = ancilla_span_basis(d);
      const auto c = detail::gaussian_coeffs(rng, basis.size());
      const auto g = detail::combine(basis, c);
      const ComplexMatrix h(Matrix(0.5 * (g.mat() + g.mat().adjoint())), ab);
      return KrausChannel({unitary_exp(h)}, label);
    }

    case AncillaNoiseKind::general_in_class: {
      const auto basis = ancilla_span_basis(d);
      std::uniform_int_distribution<std::size_t> count(1, 4);
      for (int attempt = 0; attempt < 16; ++attempt) {
        const std::size_t n = count(rng);
        std::vector<ComplexMatrix> e;
        Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d * d), static_cast<Eigen::Index>(d * d));
        for (std::size_t j = 0; j < n; ++j) {
          e.push_back(detail::combine(basis, detail::gaussian_coeffs(rng, basis.size())));
          m += e.back().mat().adjoint() * e.back().mat();
        }
        try {
          const auto r = psd_inverse_sqrt(ComplexMatrix(std::move(m), ab), tol);
          for (auto& k : e) k = k * r;
          return KrausChannel(std::move(e), label);
        } catch (const SingularMatrixError&) {
          continue;
        }
      }
      throw ResamplingExhausted("sample_ancilla_noise: normalization matrix singular on every attempt");
    }

    case AncillaNoiseKind::out_of_class_control: {
      const WeylFrame frame(d);
      const auto id = ComplexMatrix::identity({d});
      return KrausChannel({cplx(std::sqrt(0.5)) * tensor_product(id, id),
                           cplx(std::sqrt(0.5)) * tensor_product(id, frame.z())},
                          label);
    }
  }
  throw std::invalid_argument("sample_ancilla_noise: unknown kind");
}

// ---------------------------------------------------------------------------
// assembly and analysis

/// The pipeline as a channel S -> A (x) B (x) S with Kraus operators
///   C U^dagger (E (x) F) U W
/// for every correction operator C, ancilla Kraus E and system Kraus F.
inline KrausChannel assemble(const ProtocolAssembly& protocol, const KrausChannel& system_noise,
                             const KrausChannel& ancilla_noise) {
  const std::size_t d = protocol.d;
  if (system_noise.d_in() != d || system_noise.d_out() != d) {
    throw DimensionError("assemble: system noise must act on a d-dimensional space");
  }
  if (ancilla_noise.d_in() != d * d || ancilla_noise.d_out() != d * d) {
    throw DimensionError("assemble: ancilla noise must act on a d^2-dimensional space");
  }
  const Dims abs{d, d, d};
  const auto uw = protocol.u * ancilla_isometry(d);
  const auto u_dag = protocol.u.adjoint();

  std::vector<ComplexMatrix> middle;  // U^dagger (E (x) F) U W
  middle.reserve(ancilla_noise.size() * system_noise.size());
  for (const auto& e : ancilla_noise.kraus()) {
    const ComplexMatrix e_ab = e.with_dims({d, d}, {d, d});
    for (const auto& f : system_noise.kraus()) {
      middle.push_back(u_dag * (tensor_product(e_ab, f.with_dims({d}, {d})) * uw));
    }
  }
  const auto corrections = protocol.v.operators();
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(corrections.size() * middle.size());
  for (const auto& c : corrections) {
    for (const auto& k : middle) kraus.push_back(c * k);
  }
  return KrausChannel(std::move(kraus), "qct[" + system_noise.label() + "|" + ancilla_noise.label() + "]");
}

inline KrausChannel assemble(const KrausChannel& system_noise, const KrausChannel& ancilla_noise, std::size_t d,
                             VVariant variant = VVariant::eq3_unitary, AbOrder order = AbOrder::AB) {
  return assemble(make_protocol(d, variant, order), system_noise, ancilla_noise);
}

/// S -> S channel left after discarding A (x) B: Kraus set {(<ab| (x) 1) K}.
inline KrausChannel system_marginal(const KrausChannel& assembled) {
  const std::size_t d = assembled.d_in();
  if (assembled.d_out() != d * d * d) {
    throw DimensionError("system_marginal: expected a channel from S to A (x) B (x) S");
  }
  const auto n = static_cast<Eigen::Index>(d);
  std::vector<ComplexMatrix> out;
  out.reserve(assembled.size() * d * d);
  for (const auto& k : assembled.kraus()) {
    for (Eigen::Index ab = 0; ab < n * n; ++ab) {
      out.emplace_back(Matrix(k.mat().block(ab * n, 0, n, n)), Dims{d});
    }
  }
  return KrausChannel(std::move(out), "marginal:" + assembled.label());
}

inline ChoiMatrix effective_system_channel(const KrausChannel& assembled) {
  return choi_of(system_marginal(assembled));
}

struct FactorizationReport {
  double system_fidelity = 0.0;
  std::optional<double> factorization_residual;  // empty: skipped for dimension
  std::optional<ComplexMatrix> ancilla_choi;     // the AB output Psi
};

/// Compares the joint Choi matrix on AB (x) S_out (x) S_in against
/// Psi_AB (x) J(id_S), where Psi_AB = tr_{S_out S_in}(J) / d is the Choi
/// matrix of the ancilla output map (trivial input). Joint checks above
/// max_joint_d are skipped; the system fidelity is always computed.
inline FactorizationReport factorization_report(const KrausChannel& assembled, std::size_t max_joint_d = 3) {
  const std::size_t d = assembled.d_in();
  FactorizationReport r;
  r.system_fidelity = entanglement_fidelity(system_marginal(assembled));
  if (d > max_joint_d) return r;

  const auto joint = choi_of(assembled).matrix.with_dims({d, d, d, d}, {d, d, d, d});
  auto psi = partial_trace(joint, {0, 1});
  psi = cplx(1.0 / static_cast<double>(d)) * psi;
  const auto id_choi = choi_of(identity_channel({d})).matrix.with_dims({d, d}, {d, d});
  r.factorization_residual = frobenius_distance(joint, tensor_product(psi, id_choi));
  r.ancilla_choi = std::move(psi);
  return r;
}

/// Probability of each ancilla label after the pipeline, for one (possibly
/// unnormalized) system Kraus operator f, identity ancilla noise and a pure
/// input psi. Indexed in frame order.
inline std::vector<double> branch_weights(const ProtocolAssembly& protocol, const ComplexMatrix& f,
                                          const Vector& psi) {
  if (protocol.order != AbOrder::AB) {
    throw std::invalid_argument("branch_weights: labels are defined in AB order");
  }
  const std::size_t d = protocol.d;
  const WeylFrame frame(d);
  const auto k = protocol.v.operators();
  const auto id_ab = ComplexMatrix::identity({d, d});
  const auto core = protocol.u.adjoint() * (tensor_product(id_ab, f.with_dims({d}, {d})) *
                                            (protocol.u * ancilla_isometry(d)));
  const auto labels = frame_labels(d);
  std::vector<double> w(labels.size(), 0.0);
  for (const auto& c : k) {
    const Vector out = (c * core).mat() * psi;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const Vector lab = label_state(frame, labels[i].first, labels[i].second);
      const auto proj = tensor_product(ComplexMatrix::projector(lab, {d, d}), ComplexMatrix::identity({d}));
      w[i] += (proj.mat() * out).squaredNorm();
    }
  }
  return w;
}

}  // namespace qct
