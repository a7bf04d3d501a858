#pragma once

// Dense complex linear algebra on multi-qudit spaces.
//
// A ComplexMatrix is an Eigen matrix tagged with the tensor-factor structure
// of its output (row) and input (column) spaces. Factor 0 is the most
// significant index, i.e. |a,b,c> has flat index (a * d_b + b) * d_c + c.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qct {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Dims = std::vector<std::size_t>;

using namespace std::complex_literals;

inline constexpr double kPi = 3.14159265358979323846;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Absolute epsilon applied to Frobenius-norm comparisons.
struct Tolerance {
  double abs_eps = 1e-9;

  constexpr Tolerance() = default;
  explicit Tolerance(double eps) : abs_eps(eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) {
      throw std::invalid_argument("tolerance must be a positive finite number");
    }
  }
};

inline std::size_t dims_product(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

inline Dims concat_dims(const Dims& a, const Dims& b) {
  Dims out(a);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

/// Dense complex matrix with tensor-factor bookkeeping on both sides.
///
/// Square operators carry identical row and column dims. Maps between
/// different spaces (isometries, Kraus operators of dimension-changing
/// channels) carry distinct dims. A factor of size 1 is only allowed as the
/// sole factor of a side, standing for the trivial one-dimensional space.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;

  ComplexMatrix(Matrix m, Dims dims) : ComplexMatrix(std::move(m), dims, dims) {}

  ComplexMatrix(Matrix m, Dims out_dims, Dims in_dims)
      : m_(std::move(m)), out_dims_(std::move(out_dims)), in_dims_(std::move(in_dims)) {
    check_dims(out_dims_, static_cast<std::size_t>(m_.rows()), "row");
    check_dims(in_dims_, static_cast<std::size_t>(m_.cols()), "column");
  }

  /// Single-factor square matrix.
  explicit ComplexMatrix(Matrix m)
      : m_(std::move(m)),
        out_dims_{static_cast<std::size_t>(m_.rows())},
        in_dims_{static_cast<std::size_t>(m_.cols())} {
    check_dims(out_dims_, static_cast<std::size_t>(m_.rows()), "row");
    check_dims(in_dims_, static_cast<std::size_t>(m_.cols()), "column");
  }

  static ComplexMatrix identity(const Dims& dims) {
    const auto n = static_cast<Eigen::Index>(dims_product(dims));
    return {Matrix::Identity(n, n), dims};
  }

  static ComplexMatrix zero(const Dims& dims) {
    const auto n = static_cast<Eigen::Index>(dims_product(dims));
    return {Matrix::Zero(n, n), dims};
  }

  /// |v><v| for a column vector v.
  static ComplexMatrix projector(const Vector& v, const Dims& dims) {
    return {v * v.adjoint(), dims};
  }

  /// Column vector |v> as an n x 1 map from the trivial space.
  static ComplexMatrix ket(const Vector& v, const Dims& dims) {
    return {Matrix(v), dims, Dims{1}};
  }

  const Matrix& mat() const noexcept { return m_; }
  const Dims& dims() const noexcept { return out_dims_; }
  const Dims& out_dims() const noexcept { return out_dims_; }
  const Dims& in_dims() const noexcept { return in_dims_; }
  Eigen::Index rows() const noexcept { return m_.rows(); }
  Eigen::Index cols() const noexcept { return m_.cols(); }
  bool is_square() const noexcept { return m_.rows() == m_.cols(); }

  cplx operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }

  ComplexMatrix adjoint() const { return {m_.adjoint(), in_dims_, out_dims_}; }

  cplx trace() const { return m_.trace(); }

  double frobenius_norm() const { return m_.norm(); }

  ComplexMatrix operator*(const ComplexMatrix& rhs) const {
    if (m_.cols() != rhs.m_.rows()) {
      throw DimensionError("matrix product: inner dimensions differ");
    }
    return {m_ * rhs.m_, out_dims_, rhs.in_dims_};
  }

  ComplexMatrix operator+(const ComplexMatrix& rhs) const {
    require_same_shape(rhs, "sum");
    return {m_ + rhs.m_, out_dims_, in_dims_};
  }

  ComplexMatrix operator-(const ComplexMatrix& rhs) const {
    require_same_shape(rhs, "difference");
    return {m_ - rhs.m_, out_dims_, in_dims_};
  }

  friend ComplexMatrix operator*(cplx s, const ComplexMatrix& a) {
    return {s * a.m_, a.out_dims_, a.in_dims_};
  }

  /// Same matrix, relabeled factor structure (sizes must agree).
  ComplexMatrix with_dims(Dims out_dims, Dims in_dims) const {
    return {m_, std::move(out_dims), std::move(in_dims)};
  }

 private:
  static void check_dims(const Dims& dims, std::size_t side, const char* which) {
    if (dims.empty()) {
      throw DimensionError(std::string(which) + " dims must not be empty");
    }
    for (auto d : dims) {
      if (d < 2 && !(d == 1 && dims.size() == 1)) {
        throw DimensionError(std::string(which) + " dims entries must be >= 2");
      }
    }
    if (dims_product(dims) != side) {
      throw DimensionError(std::string(which) + " dims product does not match matrix side");
    }
  }

  void require_same_shape(const ComplexMatrix& rhs, const char* op) const {
    if (m_.rows() != rhs.m_.rows() || m_.cols() != rhs.m_.cols()) {
      throw DimensionError(std::string("matrix ") + op + ": shapes differ");
    }
  }

  Matrix m_;
  Dims out_dims_;
  Dims in_dims_;
};

inline double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("frobenius_distance: shapes differ");
  }
  return (a.mat() - b.mat()).norm();
}

inline bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, Tolerance tol = {}) {
  return frobenius_distance(a, b) <= tol.abs_eps;
}

/// Kronecker product; dims are concatenated on both sides.
inline ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  const auto ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
  Matrix out(ar * br, ac * bc);
  for (Eigen::Index i = 0; i < ar; ++i) {
    for (Eigen::Index j = 0; j < ac; ++j) {
      out.block(i * br, j * bc, br, bc) = a.mat()(i, j) * b.mat();
    }
  }
  auto join = [](const Dims& x, const Dims& y) {
    // the trivial space is the tensor unit
    if (x == Dims{1}) return y;
    if (y == Dims{1}) return x;
    return concat_dims(x, y);
  };
  return {std::move(out), join(a.out_dims(), b.out_dims()), join(a.in_dims(), b.in_dims())};
}

inline ComplexMatrix tensor_product(std::initializer_list<std::reference_wrapper<const ComplexMatrix>> factors) {
  auto it = factors.begin();
  if (it == factors.end()) {
    throw DimensionError("tensor_product: no factors");
  }
  ComplexMatrix out = it->get();
  for (++it; it != factors.end(); ++it) {
    out = tensor_product(out, it->get());
  }
  return out;
}

namespace detail {

inline std::vector<std::size_t> strides_of(const Dims& dims) {
  std::vector<std::size_t> strides(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) {
    strides[k - 1] = strides[k] * dims[k];
  }
  return strides;
}

inline void unflatten(std::size_t flat, const Dims& dims, std::vector<std::size_t>& digits) {
  digits.resize(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    digits[k] = flat % dims[k];
    flat /= dims[k];
  }
}

}  // namespace detail

/// Trace out every factor not listed in `keep`. Kept factors retain their order.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, const std::set<std::size_t>& keep) {
  if (!m.is_square() || m.out_dims() != m.in_dims()) {
    throw DimensionError("partial_trace: operator must be square with matching dims");
  }
  const Dims& dims = m.dims();
  if (dims.size() < 2) {
    throw DimensionError("partial_trace: need at least two factors");
  }
  if (keep.empty() || keep.size() >= dims.size()) {
    throw std::out_of_range("partial_trace: keep must be a nonempty proper subset");
  }
  for (auto k : keep) {
    if (k >= dims.size()) throw std::out_of_range("partial_trace: factor index out of range");
  }

  Dims kept_dims, traced_dims;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    (keep.count(k) ? kept_dims : traced_dims).push_back(dims[k]);
  }
  const auto kept_n = dims_product(kept_dims);
  const auto traced_n = dims_product(traced_dims);
  const auto strides = detail::strides_of(dims);

  // flat index for each (kept, traced) digit combination
  std::vector<std::size_t> flat(kept_n * traced_n);
  std::vector<std::size_t> kd, td;
  for (std::size_t ki = 0; ki < kept_n; ++ki) {
    detail::unflatten(ki, kept_dims, kd);
    for (std::size_t ti = 0; ti < traced_n; ++ti) {
      detail::unflatten(ti, traced_dims, td);
      std::size_t f = 0, kpos = 0, tpos = 0;
      for (std::size_t k = 0; k < dims.size(); ++k) {
        f += strides[k] * (keep.count(k) ? kd[kpos++] : td[tpos++]);
      }
      flat[ki * traced_n + ti] = f;
    }
  }

  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(kept_n), static_cast<Eigen::Index>(kept_n));
  for (std::size_t r = 0; r < kept_n; ++r) {
    for (std::size_t c = 0; c < kept_n; ++c) {
      cplx acc = 0.0;
      for (std::size_t t = 0; t < traced_n; ++t) {
        acc += m.mat()(static_cast<Eigen::Index>(flat[r * traced_n + t]),
                       static_cast<Eigen::Index>(flat[c * traced_n + t]));
      }
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = acc;
    }
  }
  return {std::move(out), kept_dims};
}

/// Reorder tensor factors: factor k of the result is factor perm[k] of the input.
/// Applied to both sides of a square operator.
inline ComplexMatrix permute_factors(const ComplexMatrix& m, const std::vector<std::size_t>& perm) {
  if (!m.is_square() || m.out_dims() != m.in_dims()) {
    throw DimensionError("permute_factors: operator must be square with matching dims");
  }
  const Dims& dims = m.dims();
  if (perm.size() != dims.size()) {
    throw DimensionError("permute_factors: permutation size mismatch");
  }
  std::vector<bool> seen(perm.size(), false);
  for (auto p : perm) {
    if (p >= perm.size() || seen[p]) throw std::out_of_range("permute_factors: not a permutation");
    seen[p] = true;
  }
  Dims new_dims(dims.size());
  for (std::size_t k = 0; k < perm.size(); ++k) new_dims[k] = dims[perm[k]];
  const auto old_strides = detail::strides_of(dims);
  const auto n = dims_product(dims);

  // map[new_flat] = old_flat
  std::vector<Eigen::Index> map(n);
  std::vector<std::size_t> digits;
  for (std::size_t i = 0; i < n; ++i) {
    detail::unflatten(i, new_dims, digits);
    std::size_t old = 0;
    for (std::size_t k = 0; k < perm.size(); ++k) old += old_strides[perm[k]] * digits[k];
    map[i] = static_cast<Eigen::Index>(old);
  }
  Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m.mat()(map[r], map[c]);
    }
  }
  return {std::move(out), new_dims};
}

/// Transpose the listed factor (row and column index swapped on that factor only).
inline ComplexMatrix partial_transpose(const ComplexMatrix& m, std::size_t factor) {
  if (!m.is_square() || m.out_dims() != m.in_dims()) {
    throw DimensionError("partial_transpose: operator must be square with matching dims");
  }
  const Dims& dims = m.dims();
  if (factor >= dims.size()) throw std::out_of_range("partial_transpose: factor out of range");
  const auto strides = detail::strides_of(dims);
  const auto n = static_cast<Eigen::Index>(dims_product(dims));
  Matrix out(n, n);
  std::vector<std::size_t> rd, cd;
  for (Eigen::Index r = 0; r < n; ++r) {
    detail::unflatten(static_cast<std::size_t>(r), dims, rd);
    for (Eigen::Index c = 0; c < n; ++c) {
      detail::unflatten(static_cast<std::size_t>(c), dims, cd);
      const auto shift = static_cast<Eigen::Index>(strides[factor]);
      const auto dr = static_cast<Eigen::Index>(rd[factor]), dc = static_cast<Eigen::Index>(cd[factor]);
      out(r - dr * shift + dc * shift, c - dc * shift + dr * shift) = m.mat()(r, c);
    }
  }
  return {std::move(out), dims};
}

/// Haar-distributed unitary: QR of a standard complex Gaussian matrix with
/// the phases of R's diagonal moved into Q.
inline ComplexMatrix haar_random_unitary(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("haar_random_unitary: n must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto side = static_cast<Eigen::Index>(n);
  Matrix g(side, side);
  // column-major fill order is part of the determinism contract
  for (Eigen::Index c = 0; c < side; ++c) {
    for (Eigen::Index r = 0; r < side; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(r, c) = cplx(re, im) / std::sqrt(2.0);
    }
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(side, side);
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < side; ++k) {
    const cplx diag = r(k, k);
    const double mag = std::abs(diag);
    q.col(k) *= (mag > 0.0 ? diag / mag : cplx(1.0));
  }
  return ComplexMatrix(std::move(q));
}

inline bool is_hermitian(const ComplexMatrix& m, Tolerance tol = {}) {
  return m.is_square() && (m.mat() - m.mat().adjoint()).norm() <= tol.abs_eps;
}

inline bool is_unitary(const ComplexMatrix& m, Tolerance tol = {}) {
  if (!m.is_square()) return false;
  const auto n = m.rows();
  return (m.mat().adjoint() * m.mat() - Matrix::Identity(n, n)).norm() <= tol.abs_eps;
}

/// Eigenvalues of the Hermitian part, ascending.
inline Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& m) {
  if (!m.is_square()) throw DimensionError("hermitian_eigenvalues: matrix must be square");
  const Matrix h = 0.5 * (m.mat() + m.mat().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// R = m^{-1/2} for Hermitian positive definite m, via eigendecomposition.
/// Eigenvalues below tol.abs_eps raise SingularMatrixError; nothing is clamped.
inline ComplexMatrix psd_inverse_sqrt(const ComplexMatrix& m, Tolerance tol = {}) {
  if (!m.is_square()) throw DimensionError("psd_inverse_sqrt: matrix must be square");
  if (!is_hermitian(m, tol)) throw std::domain_error("psd_inverse_sqrt: matrix is not Hermitian");
  const Matrix h = 0.5 * (m.mat() + m.mat().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Eigen::VectorXd& ev = es.eigenvalues();
  if (ev.minCoeff() < tol.abs_eps) {
    throw SingularMatrixError("psd_inverse_sqrt: smallest eigenvalue " + std::to_string(ev.minCoeff()) +
                              " below tolerance");
  }
  const Eigen::VectorXd inv_sqrt = ev.array().rsqrt();
  Matrix r = es.eigenvectors() * inv_sqrt.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  return {std::move(r), m.out_dims(), m.in_dims()};
}

/// exp(i h) for Hermitian h.
inline ComplexMatrix unitary_exp(const ComplexMatrix& h) {
  if (!h.is_square()) throw DimensionError("unitary_exp: matrix must be square");
  const Matrix herm = 0.5 * (h.mat() + h.mat().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
  Vector phases = (1i * es.eigenvalues().cast<cplx>()).array().exp();
  Matrix u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  return {std::move(u), h.out_dims(), h.in_dims()};
}

/// Seeded matrix with i.i.d. standard complex Gaussian entries.
inline ComplexMatrix random_gaussian_matrix(const Dims& dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(dims_product(dims));
  Matrix g(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(r, c) = cplx(re, im);
    }
  }
  return {std::move(g), dims};
}

/// min over global phases of ||a - e^{i phi} b||_F.
inline double phase_aligned_residual(const ComplexMatrix& a, const ComplexMatrix& b) {
  const cplx overlap = (b.mat().adjoint() * a.mat()).trace();
  const cplx phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx(1.0);
  return (a.mat() - phase * b.mat()).norm();
}

/// |tr(a^dagger b)| / n: equals 1 iff two unitaries agree up to global phase.
inline double normalized_trace_overlap(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("normalized_trace_overlap: shapes differ");
  }
  return std::abs((a.mat().adjoint() * b.mat()).trace()) / static_cast<double>(a.rows());
}

}  // namespace qct
