#include "oracles.hpp"

#include "qct/qct_protocol.hpp"

#include <gtest/gtest.h>

using namespace qct;

namespace {

Matrix u_block(const ComplexMatrix& u, std::size_t d, std::size_t a, std::size_t b) {
  const auto n = static_cast<Eigen::Index>(d);
  const auto off = static_cast<Eigen::Index>(a * d + b) * n;
  return u.mat().block(off, off, n, n);
}

KrausChannel in_class_noise(std::size_t d, std::uint64_t seed) {
  static const AncillaNoiseKind kinds[] = {AncillaNoiseKind::mixed_unitary_in_class,
                                           AncillaNoiseKind::unitary_in_class,
                                           AncillaNoiseKind::general_in_class};
  return sample_ancilla_noise({kinds[seed % 3], seed, d});
}

}  // namespace

TEST(build_u, qubit_blocks) {
  const auto u = build_u(2);
  EXPECT_TRUE(is_unitary(u));
  EXPECT_LE((u_block(u, 2, 0, 0) - Matrix::Identity(2, 2)).norm(), 1e-15);
  EXPECT_LE((u_block(u, 2, 1, 1) + 1i * pauli::y().mat()).norm(), 1e-15);
  EXPECT_LE((u_block(u, 2, 1, 0) - pauli::x().mat()).norm(), 1e-15);
  EXPECT_LE((u_block(u, 2, 0, 1) - pauli::z().mat()).norm(), 1e-15);
  EXPECT_LE(frobenius_distance(u, qubit_u_projector_sum()), 1e-12);
}

TEST(build_u, qutrit_action) {
  const auto u = build_u(3);
  const WeylFrame f(3);
  for (std::size_t m = 0; m < 3; ++m) {
    for (std::size_t n = 0; n < 3; ++n) {
      for (std::size_t k = 0; k < 3; ++k) {
        const auto col = static_cast<Eigen::Index>((m * 3 + n) * 3 + k);
        const auto row = static_cast<Eigen::Index>((m * 3 + n) * 3 + (k + m) % 3);
        const cplx expected = std::pow(f.omega(), static_cast<double>(n * k));
        EXPECT_NEAR(std::abs(u.mat()(row, col) - expected), 0.0, 1e-12);
        EXPECT_NEAR(u.mat().col(col).norm(), 1.0, 1e-12);
      }
    }
  }
}

TEST(build_u, unitary_for_all_d) {
  for (std::size_t d = 2; d <= 5; ++d) EXPECT_TRUE(is_unitary(build_u(d))) << d;
}

TEST(label_states, orthonormal_basis) {
  for (std::size_t d = 2; d <= 5; ++d) {
    const WeylFrame f(d);
    const auto labels = frame_labels(d);
    ASSERT_EQ(labels.size(), d * d);
    Matrix gram(static_cast<Eigen::Index>(d * d), static_cast<Eigen::Index>(d * d));
    for (std::size_t i = 0; i < labels.size(); ++i) {
      for (std::size_t j = 0; j < labels.size(); ++j) {
        gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            label_state(f, labels[i].first, labels[i].second).dot(label_state(f, labels[j].first, labels[j].second));
      }
    }
    EXPECT_LE((gram - Matrix::Identity(gram.rows(), gram.cols())).norm(), 1e-12) << d;
  }
  const std::vector<std::pair<std::size_t, std::size_t>> qubit{{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  EXPECT_EQ(frame_labels(2), qubit);
}

TEST(build_v, qubit_plus_minus_block_is_sigma_x) {
  const auto v = *build_v(2, VVariant::eq3_unitary).unitary;
  EXPECT_TRUE(is_unitary(v));
  const auto h = pauli::hadamard();
  const auto id = pauli::identity();
  const auto hh = tensor_product({h, h, id});
  // in the Hadamard basis on A B, |+ -> sits at computational index (0, 1)
  const auto rotated = hh * v * hh;
  EXPECT_LE((u_block(rotated, 2, 0, 1) - pauli::x().mat()).norm(), 1e-14);
  EXPECT_LE((u_block(rotated, 2, 0, 0) - Matrix::Identity(2, 2)).norm(), 1e-14);
}

TEST(build_v, variants_are_valid) {
  for (std::size_t d = 2; d <= 4; ++d) {
    EXPECT_TRUE(is_unitary(*build_v(d, VVariant::eq3_unitary).unitary));
    const auto proj = build_v(d, VVariant::projective_kraus);
    EXPECT_FALSE(proj.unitary.has_value());
    EXPECT_EQ(proj.kraus.size(), d * d);
    EXPECT_TRUE(validate_cptp(proj.as_channel()).pass);
  }
  const auto h = pauli::hadamard();
  const auto hhh = tensor_product({h, h, h});
  EXPECT_LE(frobenius_distance(*build_v(2, VVariant::hadamard_conjugated).unitary, hhh * build_u(2) * hhh), 1e-14);
  EXPECT_THROW(build_v(3, VVariant::hadamard_conjugated), std::invalid_argument);
}

TEST(build_v, hadamard_variant_differs_by_block_phase) {
  const auto h = pauli::hadamard();
  const auto id = pauli::identity();
  const auto hh = tensor_product({h, h, id});
  const auto a = hh * *build_v(2, VVariant::eq3_unitary).unitary * hh;
  const auto b = hh * *build_v(2, VVariant::hadamard_conjugated).unitary * hh;
  const cplx i(0.0, 1.0);
  EXPECT_LE((u_block(b, 2, 1, 1) - i * u_block(a, 2, 1, 1)).norm(), 1e-12);
  for (auto [x, y] : {std::pair{0, 0}, {0, 1}, {1, 0}}) EXPECT_LE((u_block(a, 2, x, y) - u_block(b, 2, x, y)).norm(), 1e-12);
  EXPECT_GT(frobenius_distance(a, b), 1.0);
}

TEST(ancilla_class, membership_and_closure) {
  for (std::size_t d = 2; d <= 4; ++d) {
    const auto basis = ancilla_span_basis(d);
    ASSERT_EQ(basis.size(), d * d);
    for (const auto& x : basis) {
      EXPECT_LE(span_residual(x, basis), 1e-12);
      EXPECT_LE(span_residual(x.adjoint(), basis), 1e-12);
      for (const auto& y : basis) EXPECT_LE(span_residual(x * y, basis), 1e-12) << d;
    }
  }
}

TEST(ancilla_class, samples_are_cptp_and_in_span) {
  for (std::size_t d = 2; d <= 4; ++d) {
    const auto basis = ancilla_span_basis(d);
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
      const auto c = in_class_noise(d, seed);
      EXPECT_TRUE(validate_cptp(c).pass);
      for (const auto& k : c.kraus()) EXPECT_LE(span_residual(k, basis), 1e-9);
    }
  }
  EXPECT_EQ(sample_ancilla_noise({AncillaNoiseKind::identity, 0, 3}).size(), 1u);
}

TEST(ancilla_class, control_is_out_of_class) {
  const auto c = sample_ancilla_noise({AncillaNoiseKind::out_of_class_control, 0, 2});
  EXPECT_TRUE(validate_cptp(c).pass);
  double worst = 0.0;
  for (const auto& k : c.kraus()) worst = std::max(worst, span_residual(k, ancilla_span_basis(2)));
  EXPECT_NEAR(worst, std::sqrt(0.5), 1e-12);
}

TEST(assemble, matches_step_by_step_simulation) {
  for (std::size_t d : {2, 3}) {
    for (auto variant : {VVariant::eq3_unitary, VVariant::projective_kraus}) {
      const auto p = make_protocol(d, variant);
      for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto lambda = random_cptp(d, 1 + seed, seed);
        const auto phi = in_class_noise(d, seed + 50);
        const auto joint = assemble(p, lambda, phi);
        const Matrix rho = oracle::random_density(static_cast<Eigen::Index>(d), seed + 9);
        const auto got = apply_map(joint, ComplexMatrix(rho));
        EXPECT_LE((got.mat() - oracle::simulate_pipeline(p, lambda, phi, rho)).norm(), 1e-9);
      }
    }
  }
  EXPECT_THROW(assemble(make_protocol(2), random_cptp(3, 1, 0), sample_ancilla_noise({})), DimensionError);
}

TEST(effective_channel, identity_noise_is_identity) {
  for (std::size_t d = 2; d <= 4; ++d) {
    const auto joint = assemble(make_protocol(d), identity_channel({d}), sample_ancilla_noise({AncillaNoiseKind::identity, 0, d}));
    EXPECT_TRUE(validate_cptp(joint).pass);
    const auto eff = effective_system_channel(joint);
    EXPECT_LE(frobenius_distance(eff.matrix, choi_of(identity_channel({d})).matrix), 1e-9);
  }
}

TEST(effective_channel, random_noise_is_removed) {
  for (std::size_t d = 2; d <= 3; ++d) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto joint = assemble(make_protocol(d), random_cptp(d, 1 + seed % 4, seed), in_class_noise(d, seed));
      const auto rep = factorization_report(joint);
      EXPECT_NEAR(rep.system_fidelity, 1.0, 1e-9);
      ASSERT_TRUE(rep.factorization_residual.has_value());
      EXPECT_LE(*rep.factorization_residual, 1e-9);
      EXPECT_NEAR(rep.ancilla_choi->trace().real(), 1.0, 1e-9);
    }
  }
  const auto big = factorization_report(assemble(make_protocol(4), random_cptp(4, 2, 1), in_class_noise(4, 1)));
  EXPECT_FALSE(big.factorization_residual.has_value());
  EXPECT_NEAR(big.system_fidelity, 1.0, 1e-9);
}

TEST(effective_channel, variants_agree) {
  const auto lambda = random_cptp(2, 4, 3);
  const auto phi = in_class_noise(2, 4);
  const auto ref = effective_system_channel(assemble(make_protocol(2, VVariant::eq3_unitary), lambda, phi));
  for (auto v : {VVariant::hadamard_conjugated, VVariant::projective_kraus}) {
    const auto eff = effective_system_channel(assemble(make_protocol(2, v), lambda, phi));
    EXPECT_LE(frobenius_distance(eff.matrix, ref.matrix), 1e-9);
  }
}

TEST(effective_channel, ba_order_fails) {
  for (auto v : {VVariant::eq3_unitary, VVariant::hadamard_conjugated, VVariant::projective_kraus}) {
    const auto rep = factorization_report(assemble(make_protocol(2, v, AbOrder::BA), random_cptp(2, 4, 1),
                                                   sample_ancilla_noise({})));
    EXPECT_LT(rep.system_fidelity, 0.999) << to_string(v);
  }
}

TEST(effective_channel, control_is_detected) {
  int detected = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto rep = factorization_report(assemble(
        make_protocol(2), random_cptp(2, 1 + seed % 4, seed),
        sample_ancilla_noise({AncillaNoiseKind::out_of_class_control, seed, 2})));
    if (rep.system_fidelity < 0.999) ++detected;
  }
  EXPECT_GE(detected, 18);
}

TEST(branch_weights, match_frame_coefficients) {
  for (std::size_t d = 2; d <= 4; ++d) {
    const WeylFrame f(d);
    const auto p = make_protocol(d);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto g = haar_random_unitary(d, seed);
      const auto coeffs = decompose_in_frame(g, f);
      const auto w = branch_weights(p, g, oracle::random_pure(static_cast<Eigen::Index>(d), seed + 3));
      double total = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        EXPECT_NEAR(w[i], std::norm(coeffs.coeffs[i]), 1e-9);
        total += w[i];
      }
      EXPECT_NEAR(total, 1.0, 1e-9);
    }
  }
  EXPECT_THROW(branch_weights(make_protocol(2, VVariant::eq3_unitary, AbOrder::BA), pauli::x(), Vector::Ones(2)),
               std::invalid_argument);
}

TEST(parsing, names_round_trip) {
  for (auto v : {VVariant::eq3_unitary, VVariant::hadamard_conjugated, VVariant::projective_kraus})
    EXPECT_EQ(parse_v_variant(to_string(v)), v);
  for (auto o : {AbOrder::AB, AbOrder::BA}) EXPECT_EQ(parse_ab_order(to_string(o)), o);
  for (auto k : {AncillaNoiseKind::identity, AncillaNoiseKind::mixed_unitary_in_class,
                 AncillaNoiseKind::unitary_in_class, AncillaNoiseKind::general_in_class,
                 AncillaNoiseKind::out_of_class_control})
    EXPECT_EQ(parse_ancilla_noise(to_string(k)), k);
  EXPECT_THROW(parse_ab_order("CA"), std::invalid_argument);
}
