// Command-line front end: transparency sweeps, the entanglement-protection
// demo and the decomposition certificates.

#include "qct/qct.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

void emit_json(const nlohmann::ordered_json& doc, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report to " + path);
  out << doc.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noisy-channel transparency simulator and verifier"};
  app.require_subcommand(1);

  // sweep ------------------------------------------------------------------
  auto* sweep = app.add_subcommand("sweep", "Run a transparency sweep and write a report");
  std::string config_path;
  std::map<std::string, std::string> overrides;
  struct Flag {
    const char* name;
    const char* key;
    const char* help;
  };
  const std::vector<Flag> flags = {
      {"--dims", "dims", "Comma-separated system dimensions from {2,3,4,5}"},
      {"--seeds", "seeds", "Seeds per case"},
      {"--seed-base", "seed_base", "First seed"},
      {"--system-noise", "system_noise", "random, depolarizing, amplitude_damping, phase_damping, bit_flip"},
      {"--system-noise-param", "system_noise_param", "Strength of named system noise"},
      {"--ancilla-noise", "ancilla_noise",
       "identity, mixed_unitary_in_class, unitary_in_class, general_in_class, out_of_class_control"},
      {"--variant", "variant", "eq3_unitary, hadamard_conjugated, projective_kraus"},
      {"--ab-order", "ab_order", "AB, BA"},
      {"--tolerance", "tolerance", "Absolute tolerance"},
      {"--out", "out", "Report path ('-' for stdout)"},
      {"--format", "format", "json or csv"},
      {"--threads", "threads", "Worker threads"},
      {"--max-joint-d", "max_joint_d", "Largest d for the joint factorization check"},
  };
  std::vector<std::string> flag_values(flags.size());
  sweep->add_option("--config", config_path, "Flat key = value config file; flags override it");
  for (std::size_t i = 0; i < flags.size(); ++i) sweep->add_option(flags[i].name, flag_values[i], flags[i].help);
  bool no_timing = false;
  sweep->add_flag("--no-timing", no_timing, "Omit wall times so reports are byte-reproducible");

  // demo -------------------------------------------------------------------
  auto* demo = app.add_subcommand("demo-entanglement", "Bell pair protected by two independent pipelines");
  std::vector<double> demo_p{0.25, 0.5, 1.0};
  std::uint64_t demo_seed = 0;
  std::string demo_ancilla = "identity", demo_variant = "eq3_unitary", demo_out;
  double demo_tol = 1e-9;
  demo->add_option("--p", demo_p, "Depolarizing strengths")->delimiter(',');
  demo->add_option("--seed", demo_seed, "Seed for ancilla noise sampling");
  demo->add_option("--ancilla-noise", demo_ancilla, "Ancilla noise kind");
  demo->add_option("--variant", demo_variant, "Correction variant");
  demo->add_option("--tolerance", demo_tol, "Absolute tolerance");
  demo->add_option("--out", demo_out, "Report path ('-' for stdout)");

  // certificates -----------------------------------------------------------
  auto* certs = app.add_subcommand("certify-decompositions", "Check the optical and atomic gate identities");
  std::string certs_out;
  double certs_tol = 1e-9;
  certs->add_option("--out", certs_out, "Report path ('-' for stdout)");
  certs->add_option("--tolerance", certs_tol, "Absolute tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sweep) {
      qct::SweepConfig cfg;
      if (!config_path.empty()) cfg = qct::load_config_file(config_path, cfg);
      for (std::size_t i = 0; i < flags.size(); ++i) {
        if (sweep->count(flags[i].name) > 0) qct::apply_config_value(cfg, flags[i].key, flag_values[i]);
      }
      if (no_timing) cfg.include_timing = false;
      const auto report = qct::run_transparency_sweep(cfg);
      qct::write_report(report);
      std::cerr << "sweep: " << report.summary.pass_count << " pass, " << report.summary.fail_count << " fail, "
                << report.summary.control_count << " control (" << report.summary.control_detected
                << " detected)\n";
      return report.exit_status();
    }
    if (*demo) {
      std::vector<qct::DemoRow> rows;
      for (double p : demo_p) {
        rows.push_back(qct::run_entanglement_demo(p, demo_seed, qct::parse_ancilla_noise(demo_ancilla),
                                                  qct::parse_v_variant(demo_variant), qct::Tolerance(demo_tol)));
      }
      emit_json(qct::demo_to_json(rows), demo_out);
      for (const auto& r : rows) {
        if (!r.pass) return 1;
      }
      return 0;
    }
    if (*certs) {
      const auto checks = qct::run_all_decomposition_checks(qct::Tolerance(certs_tol));
      emit_json(qct::certificates_to_json(checks), certs_out);
      for (const auto& c : checks) {
        if (!c.pass) return 1;
      }
      return 0;
    }
  } catch (const qct::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
