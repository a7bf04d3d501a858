#pragma once

// Generalized Pauli (clock and shift) operators, frame decomposition and the
// full-frame twirl.

#include "qct/matrix_core.hpp"

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qct {

namespace pauli {

inline ComplexMatrix identity() { return ComplexMatrix::identity({2}); }

inline ComplexMatrix x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return ComplexMatrix(m);
}

inline ComplexMatrix y() {
  Matrix m(2, 2);
  m << 0, -1i, 1i, 0;
  return ComplexMatrix(m);
}

inline ComplexMatrix z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return ComplexMatrix(m);
}

inline ComplexMatrix hadamard() {
  Matrix m(2, 2);
  m << 1, 1, 1, -1;
  return ComplexMatrix(Matrix(m / std::sqrt(2.0)));
}

/// (1, sigma_x, sigma_y, sigma_z)
inline std::array<ComplexMatrix, 4> all() { return {identity(), x(), y(), z()}; }

}  // namespace pauli

/// Clock Z = sum_k w^k |k><k| and shift X = sum_k |k+1 mod d><k| with w = e^{2 pi i / d}.
///
/// Frame ordering: for d = 2 the elements are (1, sigma_x, sigma_y, sigma_z)
/// with sigma_y stored directly; for d >= 3 they are Z^m X^n in lexicographic
/// (m, n) order.
class WeylFrame {
 public:
  explicit WeylFrame(std::size_t d) : d_(d) {
    if (d < 2) throw std::invalid_argument("WeylFrame: dimension must be >= 2");
    omega_ = std::polar(1.0, 2.0 * kPi / static_cast<double>(d));
    const auto n = static_cast<Eigen::Index>(d);
    Matrix z = Matrix::Zero(n, n), x = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      z(k, k) = std::polar(1.0, 2.0 * kPi * static_cast<double>(k) / static_cast<double>(d));
      x((k + 1) % n, k) = 1.0;
    }
    z_ = ComplexMatrix(std::move(z));
    x_ = ComplexMatrix(std::move(x));

    z_pow_.reserve(d);
    x_pow_.reserve(d);
    z_pow_.push_back(ComplexMatrix::identity({d}));
    x_pow_.push_back(ComplexMatrix::identity({d}));
    for (std::size_t k = 1; k < d; ++k) {
      z_pow_.push_back(z_pow_.back() * z_);
      x_pow_.push_back(x_pow_.back() * x_);
    }

    if (d == 2) {
      auto p = pauli::all();
      elements_.assign(p.begin(), p.end());
    } else {
      elements_.reserve(d * d);
      for (std::size_t m = 0; m < d; ++m) {
        for (std::size_t k = 0; k < d; ++k) elements_.push_back(z_pow_[m] * x_pow_[k]);
      }
    }
  }

  std::size_t d() const noexcept { return d_; }
  cplx omega() const noexcept { return omega_; }
  const ComplexMatrix& z() const noexcept { return z_; }
  const ComplexMatrix& x() const noexcept { return x_; }

  /// Z^k with k reduced mod d (negative k allowed).
  const ComplexMatrix& z_pow(long k) const { return z_pow_[reduce(k)]; }
  const ComplexMatrix& x_pow(long k) const { return x_pow_[reduce(k)]; }

  /// The d^2 frame elements in frame order.
  const std::vector<ComplexMatrix>& elements() const noexcept { return elements_; }

  std::size_t reduce(long k) const {
    const auto dd = static_cast<long>(d_);
    return static_cast<std::size_t>(((k % dd) + dd) % dd);
  }

 private:
  std::size_t d_;
  cplx omega_;
  ComplexMatrix z_, x_;
  std::vector<ComplexMatrix> z_pow_, x_pow_;
  std::vector<ComplexMatrix> elements_;
};

/// Z^m X^n for 0 <= m, n < d.
inline ComplexMatrix frame_element(const WeylFrame& frame, std::size_t m, std::size_t n) {
  if (m >= frame.d() || n >= frame.d()) {
    throw std::out_of_range("frame_element: indices must lie in [0, d)");
  }
  return frame.z_pow(static_cast<long>(m)) * frame.x_pow(static_cast<long>(n));
}

/// Coefficients c_i of f = sum_i c_i G_i over the frame elements G_i.
struct PauliCoefficients {
  std::vector<cplx> coeffs;

  ComplexMatrix reconstruct(const WeylFrame& frame) const {
    const auto& els = frame.elements();
    if (coeffs.size() != els.size()) throw DimensionError("PauliCoefficients: size does not match frame");
    Matrix acc = Matrix::Zero(els.front().rows(), els.front().cols());
    for (std::size_t i = 0; i < els.size(); ++i) acc += coeffs[i] * els[i].mat();
    return ComplexMatrix(std::move(acc));
  }
};

inline void require_frame_shape(const ComplexMatrix& f, const WeylFrame& frame, const char* who) {
  const auto d = static_cast<Eigen::Index>(frame.d());
  if (f.rows() != d || f.cols() != d) {
    throw DimensionError(std::string(who) + ": matrix must be d x d for the frame dimension");
  }
}

/// c_i = tr(G_i^dagger f) / d.
inline PauliCoefficients decompose_in_frame(const ComplexMatrix& f, const WeylFrame& frame) {
  require_frame_shape(f, frame, "decompose_in_frame");
  PauliCoefficients out;
  out.coeffs.reserve(frame.elements().size());
  const double d = static_cast<double>(frame.d());
  for (const auto& g : frame.elements()) {
    out.coeffs.push_back((g.mat().adjoint() * f.mat()).trace() / d);
  }
  return out;
}

/// sum over all d^2 frame elements of G f G^dagger. Equals d * tr(f) * 1.
inline ComplexMatrix twirl(const ComplexMatrix& f, const WeylFrame& frame) {
  require_frame_shape(f, frame, "twirl");
  Matrix acc = Matrix::Zero(f.rows(), f.cols());
  for (const auto& g : frame.elements()) acc += g.mat() * f.mat() * g.mat().adjoint();
  return ComplexMatrix(std::move(acc));
}

}  // namespace qct
