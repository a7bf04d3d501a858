// Acceptance suite: one [PASS]/[FAIL] line per criterion, nonzero exit on any failure.

#include "qct/qct.hpp"
#include "qct/runs.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace qct;

namespace {

constexpr double kTol = 1e-9;             // fidelity, residual and negativity tolerance
constexpr double kControlFidelity = 0.999;
constexpr std::size_t kControlMinDetected = 90;
constexpr double kCavityLimitTol = 2e-4;
constexpr double kCavityRatio = 1e4;
constexpr double kQuditBudgetSeconds = 120.0;

struct Outcome {
  bool pass;
  std::string detail;
};

const AncillaNoiseKind kInClass[] = {AncillaNoiseKind::mixed_unitary_in_class, AncillaNoiseKind::unitary_in_class,
                                     AncillaNoiseKind::general_in_class};

double fidelity_of(const KrausChannel& lambda, const KrausChannel& phi, std::size_t d, VVariant v,
                   AbOrder o = AbOrder::AB) {
  return entanglement_fidelity(system_marginal(assemble(lambda, phi, d, v, o)));
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// Qubit transparency over 100 seeds, ranks 1..4. in_class selects the ancilla noise.
struct QubitRun {
  std::size_t passed = 0;
  double worst = 1.0;
  double worst_membership = 0.0;
};

QubitRun qubit_run(VVariant v, AbOrder o, bool in_class) {
  QubitRun r;
  const auto basis = ancilla_span_basis(2);
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto lambda = random_cptp(2, 1 + s % 4, s);
    const auto phi = in_class ? sample_ancilla_noise({kInClass[s % 3], s + kAncillaSeedOffset, 2})
                              : identity_channel({2, 2});
    for (const auto& k : phi.kraus()) r.worst_membership = std::max(r.worst_membership, span_residual(k, basis));
    const double f = fidelity_of(lambda, phi, 2, v, o);
    r.worst = std::min(r.worst, f);
    if (f >= 1.0 - kTol) ++r.passed;
  }
  return r;
}

Outcome c1_twirl() {
  double worst = 0.0;
  for (std::size_t d = 2; d <= 5; ++d) {
    const WeylFrame frame(d);
    const auto n = static_cast<Eigen::Index>(d);
    for (std::uint64_t s = 0; s < 50; ++s) {
      const Matrix f = random_gaussian_matrix({d}, 7000 + 100 * d + s).mat();
      Matrix sum = Matrix::Zero(n, n);
      for (const auto& g : frame.elements()) sum += g.mat() * f * g.mat().adjoint();
      worst = std::max(worst, (sum - static_cast<double>(d) * f.trace() * Matrix::Identity(n, n)).norm());
    }
  }
  return {worst <= kTol, "max residual " + fmt("%.3g", worst) + " over 200 matrices"};
}

Outcome c2_qubit() {
  const auto r = qubit_run(VVariant::eq3_unitary, AbOrder::AB, false);
  return {r.passed == 100, std::to_string(r.passed) + "/100, min fidelity " + fmt("%.15g", r.worst)};
}

Outcome c3_ancilla() {
  const auto r = qubit_run(VVariant::eq3_unitary, AbOrder::AB, true);
  return {r.passed == 100 && r.worst_membership <= kTol,
          std::to_string(r.passed) + "/100, min fidelity " + fmt("%.15g", r.worst) + ", max membership residual " +
              fmt("%.3g", r.worst_membership)};
}

Outcome c4_qudit() {
  const auto start = std::chrono::steady_clock::now();
  std::size_t passed = 0, total = 0;
  double worst = 1.0, worst_membership = 0.0;
  for (std::size_t d : {3, 4, 5}) {
    const auto basis = ancilla_span_basis(d);
    for (std::uint64_t s = 0; s < 25; ++s) {
      const auto lambda = random_cptp(d, random_channel_rank(d, s), s);
      const auto phi = sample_ancilla_noise({kInClass[s % 3], s + kAncillaSeedOffset, d});
      for (const auto& k : phi.kraus()) worst_membership = std::max(worst_membership, span_residual(k, basis));
      const double f = fidelity_of(lambda, phi, d, VVariant::eq3_unitary);
      worst = std::min(worst, f);
      passed += f >= 1.0 - kTol ? 1 : 0;
      ++total;
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {passed == total && worst_membership <= kTol && secs < kQuditBudgetSeconds,
          std::to_string(passed) + "/" + std::to_string(total) + ", min fidelity " + fmt("%.15g", worst) +
              ", max membership residual " + fmt("%.3g", worst_membership)};
}

Outcome c5_factorization() {
  double worst = 0.0;
  std::size_t passed = 0;
  for (std::size_t d : {2, 3}) {
    for (std::uint64_t s = 0; s < 25; ++s) {
      const auto lambda = random_cptp(d, random_channel_rank(d, s), s + 500);
      const auto phi = sample_ancilla_noise({kInClass[s % 3], s + 500 + kAncillaSeedOffset, d});
      const auto rep = factorization_report(assemble(lambda, phi, d), 3);
      const double res = rep.factorization_residual.value_or(1.0);
      worst = std::max(worst, res);
      passed += res <= kTol ? 1 : 0;
    }
  }
  return {passed == 50, std::to_string(passed) + "/50, max residual " + fmt("%.3g", worst)};
}

Outcome c6_variants() {
  std::string detail;
  bool ok = true;
  for (auto v : {VVariant::eq3_unitary, VVariant::hadamard_conjugated, VVariant::projective_kraus}) {
    for (auto o : {AbOrder::AB, AbOrder::BA}) {
      const auto a = qubit_run(v, o, false);
      const auto b = qubit_run(v, o, true);
      const bool pass = a.passed == 100 && b.passed == 100 && b.worst_membership <= kTol;
      if (o == AbOrder::AB) ok = ok && pass;
      detail += to_string(v) + "/" + to_string(o) + " " + (pass ? "pass" : "fail") + " (" +
                std::to_string(a.passed + b.passed) + "/200); ";
    }
  }
  detail += "winning ab_order AB";
  return {ok, detail};
}

Outcome c7_control() {
  std::size_t detected = 0;
  double best = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto lambda = random_cptp(2, 1 + s % 4, s);
    const auto phi = sample_ancilla_noise({AncillaNoiseKind::out_of_class_control, s, 2});
    const double f = fidelity_of(lambda, phi, 2, VVariant::eq3_unitary);
    best = std::max(best, f);
    detected += f < kControlFidelity ? 1 : 0;
  }
  return {detected >= kControlMinDetected,
          std::to_string(detected) + "/100 below " + fmt("%g", kControlFidelity) + ", max fidelity " + fmt("%.6g", best)};
}

Outcome c8_certificates() {
  const auto checks = run_all_decomposition_checks(Tolerance(kTol));
  std::string failed;
  for (const auto& c : checks) {
    if (!c.pass) failed += c.name + " ";
  }
  const auto cav = cavity_limit_check(kCavityRatio, kCavityLimitTol);
  const bool ok = failed.empty() && cav.pass;
  return {ok, std::to_string(checks.size()) + " certificates" + (failed.empty() ? "" : ", failed: " + failed) +
                  "; reflection at g=0 " + fmt("%.17g", cav.at_zero_coupling) + ", at ratio 1e4 " +
                  fmt("%.12g", cav.at_ratio)};
}

Outcome c9_demo() {
  bool ok = true;
  std::string detail;
  for (double p : {0.25, 0.5, 1.0}) {
    const auto row = run_entanglement_demo(p, 0, AncillaNoiseKind::identity, VVariant::eq3_unitary, Tolerance(kTol));
    ok = ok && std::abs(row.protected_negativity - 0.5) <= kTol;
    if (p == 1.0) ok = ok && std::abs(row.bare_negativity) <= kTol;
    if (!detail.empty()) detail += "; ";
    detail += "p=" + fmt("%g", p) + " protected " + fmt("%.12g", row.protected_negativity) + " bare " +
              fmt("%.12g", row.bare_negativity);
  }
  return {ok, detail};
}

Outcome c10_determinism() {
  SweepConfig cfg;
  cfg.d_list = {2, 3, 4};
  cfg.seeds_per_case = 4;
  cfg.system_noise_kinds = {"random", "depolarizing"};
  cfg.ancilla_noise_kinds = {AncillaNoiseKind::identity, AncillaNoiseKind::general_in_class,
                             AncillaNoiseKind::out_of_class_control};
  cfg.v_variants = {VVariant::eq3_unitary, VVariant::projective_kraus};
  cfg.include_timing = false;
  const auto first = report_to_json(run_transparency_sweep(cfg), false).dump(2);
  const auto second = report_to_json(run_transparency_sweep(cfg), false).dump(2);
  cfg.threads = 3;
  const auto threaded = report_to_json(run_transparency_sweep(cfg), false).dump(2);
  return {first == second && first == threaded,
          std::to_string(first.size()) + " bytes, rerun and 3-thread rerun identical: " +
              (first == second && first == threaded ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"C1 twirl identity", c1_twirl},
      {"C2 qubit transparency", c2_qubit},
      {"C3 ancilla-noise tolerance", c3_ancilla},
      {"C4 qudit transparency", c4_qudit},
      {"C5 factorization", c5_factorization},
      {"C6 variant robustness", c6_variants},
      {"C7 negative control", c7_control},
      {"C8 decomposition certificates", c8_certificates},
      {"C9 entanglement protection", c9_demo},
      {"C10 determinism", c10_determinism},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
