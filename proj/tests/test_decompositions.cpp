#include "oracles.hpp"

#include "qct/decompositions.hpp"

#include <gtest/gtest.h>

using namespace qct;

TEST(elements, unitary) {
  for (auto kind : {ElementKind::dove_prism, ElementKind::psdp, ElementKind::hwp, ElementKind::bs,
                    ElementKind::pi_converter, ElementKind::phase_plate}) {
    for (double p : {0.0, 0.3, kPi / 4.0, kHadamardHwpAngle}) {
      EXPECT_TRUE(is_unitary(make_element(kind, p).matrix, Tolerance(1e-12)));
    }
  }
}

TEST(elements, dove_prism_examples) {
  EXPECT_LE(frobenius_distance(dove_prism_matrix(0.0), pauli::x()), 1e-15);
  const auto q = dove_prism_matrix(kPi / 4.0);
  EXPECT_NEAR(std::abs(q(1, 0) - cplx(0.0, 1.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(q(0, 1) - cplx(0.0, -1.0)), 0.0, 1e-15);
  EXPECT_LE(frobenius_distance(dove_prism_matrix(0.0) * dove_prism_matrix(kPi / 4.0), cplx(0.0, 1.0) * pauli::z()),
            1e-15);
}

TEST(elements, hwp_at_pi_over_8_is_hadamard) {
  EXPECT_LE(frobenius_distance(hwp_matrix(kHadamardHwpAngle), pauli::hadamard()), 1e-15);
  EXPECT_LE(frobenius_distance(hwp_matrix(0.0), pauli::z()), 1e-15);
}

TEST(elements, psdp_is_controlled_flip) {
  EXPECT_LE(frobenius_distance(psdp_matrix(), controlled_x()), 1e-15);
}

TEST(optical_u, matches_u_and_miswiring_is_caught) {
  EXPECT_LE(phase_aligned_residual(optical_u(), build_u(2)), 1e-9);
  EXPECT_GT(frobenius_distance(optical_u(true), build_u(2)), 0.1);
  EXPECT_GT(phase_aligned_residual(optical_u(true), build_u(2)), 0.1);
  const auto train = compose_train(optical_u_stage_train());
  EXPECT_TRUE(is_unitary(train));
  EXPECT_NEAR(normalized_trace_overlap(train, build_u(2)), 1.0, 1e-9);
}

TEST(hadamard_conjugation, report) {
  const auto rep = hadamard_conjugation_report();
  EXPECT_NEAR(rep.exact_residual, 2.0, 1e-12);
  EXPECT_GT(rep.phase_insensitive_residual, 0.1);
  ASSERT_EQ(rep.block_phases.size(), 4u);
  // frame order (0,0), (0,1), (1,1), (1,0): only the |--> block picks up i
  for (std::size_t i : {0, 1, 3}) EXPECT_NEAR(std::abs(rep.block_phases[i] - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(rep.block_phases[2] - cplx(0.0, 1.0)), 0.0, 1e-12);
  EXPECT_NEAR(rep.protocol_fidelity_projector_sum, 1.0, 1e-9);
  EXPECT_NEAR(rep.protocol_fidelity_hadamard, 1.0, 1e-9);
}

TEST(atomic_u, exact) {
  EXPECT_LE(frobenius_distance(atomic_u(), build_u(2)), 1e-15);
  EXPECT_LE(frobenius_distance(atomic_u(), qubit_u_projector_sum()), 1e-12);
}

TEST(cavity, reflection_examples) {
  EXPECT_NEAR(cavity_reflection({1.0, 10.0, 1.0}), 399.0 / 401.0, 1e-15);
  EXPECT_NEAR(cavity_reflection({1.0, 0.5, 1.0}), 0.0, 1e-15);
  EXPECT_EQ(cavity_reflection({1.0, 0.0, 1.0}), -1.0);
  EXPECT_NEAR(cavity_reflection({1.0, 100.0, 1.0}), 1.0 - 4.99987e-5, 1e-9);
  EXPECT_THROW(cavity_reflection({0.0, 0.0, 1.0}), std::domain_error);
  EXPECT_THROW(cavity_reflection({1.0, std::nan(""), 1.0}), std::invalid_argument);
}

TEST(cavity, reflection_monotone_in_coupling) {
  double prev = -2.0;
  for (double g = 0.0; g <= 50.0; g += 0.25) {
    const double r = cavity_reflection({1.0, g, 1.0});
    EXPECT_GT(r, prev);
    EXPECT_LE(r, 1.0);
    prev = r;
  }
}

TEST(cavity, regimes) {
  EXPECT_TRUE((CavityParams{1.0, 10.0, 1.0}).purcell_regime());
  EXPECT_FALSE((CavityParams{1.0, 1.0, 1.0}).purcell_regime());
  EXPECT_TRUE((CavityParams{100.0, 5.0, 0.1}).hierarchy_regime());
  EXPECT_FALSE((CavityParams{1.0, 10.0, 1.0}).hierarchy_regime());
  EXPECT_TRUE(cavity_limit_check().pass);
}

TEST(atom_photon, minus_cz_and_hadamard_conjugates) {
  const auto m = atom_photon_cz_in_qubit_basis();
  EXPECT_LE(frobenius_distance(m, cplx(-1.0) * controlled_z()), 1e-15);
  EXPECT_LE(frobenius_distance(atom_photon_cz_map() * atom_photon_cz_map(), ComplexMatrix::identity({2, 2})), 0.0);

  const auto h = pauli::hadamard(), id = pauli::identity();
  const auto on_atom = tensor_product(id, h);
  EXPECT_LE(frobenius_distance(on_atom * m * on_atom, cplx(-1.0) * controlled_x()), 1e-12);
  const auto on_photon = tensor_product(h, id);
  const auto atom_control = permute_factors(controlled_x(), {1, 0});
  EXPECT_LE(frobenius_distance(on_photon * m * on_photon, cplx(-1.0) * atom_control), 1e-12);
}

TEST(certificates, all_pass) {
  const auto checks = run_all_decomposition_checks();
  EXPECT_EQ(checks.size(), 9u);
  for (const auto& c : checks) EXPECT_TRUE(c.pass) << c.name << ": " << c.note;
}
