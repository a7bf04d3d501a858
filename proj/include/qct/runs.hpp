#pragma once

// Batch runs behind the command-line front end: transparency sweeps, the
// entanglement-protection demo and the decomposition certificates, with JSON
// and CSV report emission.

#include "qct/channel_model.hpp"
#include "qct/decompositions.hpp"
#include "qct/qct_protocol.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

namespace qct {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class OutputFormat { json, csv };

/// Report numbers carry 12 significant digits.
inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

inline double round_sig12(double x) { return std::strtod(format_number(x).c_str(), nullptr); }

struct SweepConfig {
  std::vector<std::size_t> d_list{2};
  std::size_t seeds_per_case = 100;
  std::uint64_t seed_base = 0;
  std::vector<std::string> system_noise_kinds{"random"};
  double system_noise_param = 0.5;  // strength for named channels
  std::vector<AncillaNoiseKind> ancilla_noise_kinds{AncillaNoiseKind::identity};
  std::vector<VVariant> v_variants{VVariant::eq3_unitary};
  std::vector<AbOrder> ab_orders{AbOrder::AB};
  double tolerance = 1e-9;
  std::size_t max_joint_d = 3;
  std::string output_path;
  OutputFormat output_format = OutputFormat::json;
  std::size_t threads = 1;
  bool include_timing = true;

  void validate() const {
    if (d_list.empty()) throw ConfigError("d_list must not be empty");
    for (auto d : d_list) {
      if (d < 2 || d > 5) throw ConfigError("d_list entries must lie in {2,3,4,5}");
    }
    if (seeds_per_case < 1) throw ConfigError("seeds_per_case must be >= 1");
    if (system_noise_kinds.empty() || ancilla_noise_kinds.empty() || v_variants.empty() || ab_orders.empty()) {
      throw ConfigError("noise kinds, variants and ab orders must not be empty");
    }
    for (const auto& k : system_noise_kinds) {
      if (k != "random" && k != "depolarizing" && k != "amplitude_damping" && k != "phase_damping" &&
          k != "bit_flip") {
        throw ConfigError("unknown system noise kind: " + k);
      }
    }
    if (!(system_noise_param >= 0.0 && system_noise_param <= 1.0)) {
      throw ConfigError("system_noise_param must lie in [0, 1]");
    }
    if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");
    if (threads < 1) throw ConfigError("threads must be >= 1");
  }
};

// ---------------------------------------------------------------------------
// flat key-value config documents

inline std::string trim(std::string s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

/// Applies one key to the config. Keys mirror the command-line flag names.
inline void apply_config_value(SweepConfig& cfg, const std::string& key, const std::string& value) {
  auto to_size = [&](const std::string& v) -> std::size_t {
    try {
      std::size_t pos = 0;
      const auto x = std::stoll(v, &pos);
      if (pos != v.size() || x < 0) throw ConfigError("");
      return static_cast<std::size_t>(x);
    } catch (const std::exception&) {
      throw ConfigError("invalid integer for " + key + ": " + v);
    }
  };
  auto to_double = [&](const std::string& v) {
    try {
      std::size_t pos = 0;
      const double x = std::stod(v, &pos);
      if (pos != v.size()) throw ConfigError("");
      return x;
    } catch (const std::exception&) {
      throw ConfigError("invalid number for " + key + ": " + v);
    }
  };
  try {
    if (key == "dims") {
      cfg.d_list.clear();
      for (const auto& s : split_list(value)) cfg.d_list.push_back(to_size(s));
    } else if (key == "seeds") {
      cfg.seeds_per_case = to_size(value);
    } else if (key == "seed_base") {
      cfg.seed_base = to_size(value);
    } else if (key == "system_noise") {
      cfg.system_noise_kinds = split_list(value);
    } else if (key == "system_noise_param") {
      cfg.system_noise_param = to_double(value);
    } else if (key == "ancilla_noise") {
      cfg.ancilla_noise_kinds.clear();
      for (const auto& s : split_list(value)) cfg.ancilla_noise_kinds.push_back(parse_ancilla_noise(s));
    } else if (key == "variant") {
      cfg.v_variants.clear();
      for (const auto& s : split_list(value)) cfg.v_variants.push_back(parse_v_variant(s));
    } else if (key == "ab_order") {
      cfg.ab_orders.clear();
      for (const auto& s : split_list(value)) cfg.ab_orders.push_back(parse_ab_order(s));
    } else if (key == "tolerance") {
      cfg.tolerance = to_double(value);
    } else if (key == "out") {
      cfg.output_path = value;
    } else if (key == "format") {
      if (value == "json") {
        cfg.output_format = OutputFormat::json;
      } else if (value == "csv") {
        cfg.output_format = OutputFormat::csv;
      } else {
        throw ConfigError("format must be json or csv");
      }
    } else if (key == "threads") {
      cfg.threads = to_size(value);
    } else if (key == "max_joint_d") {
      cfg.max_joint_d = to_size(value);
    } else if (key == "timing") {
      cfg.include_timing = value == "true" || value == "1" || value == "yes";
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

/// Parses `key = value` lines; '#' starts a comment.
inline SweepConfig parse_config(std::istream& in, SweepConfig cfg = {}) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    apply_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

inline SweepConfig load_config_file(const std::string& path, SweepConfig cfg = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in, std::move(cfg));
}

inline nlohmann::ordered_json config_to_json(const SweepConfig& cfg) {
  nlohmann::ordered_json j;
  j["d_list"] = cfg.d_list;
  j["seeds_per_case"] = cfg.seeds_per_case;
  j["seed_base"] = cfg.seed_base;
  j["system_noise_kinds"] = cfg.system_noise_kinds;
  j["system_noise_param"] = round_sig12(cfg.system_noise_param);
  std::vector<std::string> anc, var, ord;
  for (auto k : cfg.ancilla_noise_kinds) anc.push_back(to_string(k));
  for (auto v : cfg.v_variants) var.push_back(to_string(v));
  for (auto o : cfg.ab_orders) ord.push_back(to_string(o));
  j["ancilla_noise_kinds"] = anc;
  j["v_variants"] = var;
  j["ab_orders"] = ord;
  j["tolerance"] = round_sig12(cfg.tolerance);
  j["max_joint_d"] = cfg.max_joint_d;
  j["output_format"] = cfg.output_format == OutputFormat::json ? "json" : "csv";
  return j;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepCell {
  std::size_t d;
  std::size_t seed_index;
  std::string system_noise;
  AncillaNoiseKind ancilla_noise;
  VVariant variant;
  AbOrder order;
};

struct ReportRecord {
  std::string case_id;
  std::size_t d = 2;
  std::uint64_t seed = 0;
  std::string system_noise;
  std::string ancilla_noise;
  std::string v_variant;
  std::string ab_order;
  std::size_t system_kraus_rank = 0;
  double system_fidelity = 0.0;
  std::optional<double> factorization_residual;  // empty: "skipped:dim"
  bool control = false;
  bool pass = false;
  double wall_time_s = 0.0;
};

struct SweepSummary {
  std::size_t pass_count = 0;
  std::size_t fail_count = 0;
  std::size_t control_count = 0;
  std::size_t control_detected = 0;  // control cells whose fidelity dropped below 0.999
  std::map<std::string, std::pair<std::size_t, std::size_t>> ab_order_results;  // order -> (pass, total)
};

struct SweepReport {
  SweepConfig config;
  std::vector<ReportRecord> records;
  SweepSummary summary;

  /// 0 iff every non-control cell passes.
  int exit_status() const { return summary.fail_count == 0 ? 0 : 1; }
};

inline bool system_noise_supported(const std::string& kind, std::size_t d) {
  return d == 2 || kind == "random" || kind == "depolarizing";
}

inline std::vector<SweepCell> enumerate_cells(const SweepConfig& cfg) {
  std::vector<SweepCell> cells;
  for (auto d : cfg.d_list) {
    for (const auto& sys : cfg.system_noise_kinds) {
      if (!system_noise_supported(sys, d)) continue;
      for (auto anc : cfg.ancilla_noise_kinds) {
        for (auto var : cfg.v_variants) {
          if (var == VVariant::hadamard_conjugated && d != 2) continue;
          for (auto ord : cfg.ab_orders) {
            for (std::size_t s = 0; s < cfg.seeds_per_case; ++s) cells.push_back({d, s, sys, anc, var, ord});
          }
        }
      }
    }
  }
  return cells;
}

/// Kraus rank of the random system channel for a seed index:
/// qubits cycle 1..4, qudits cycle {1, 2, d, d^2}.
inline std::size_t random_channel_rank(std::size_t d, std::size_t seed_index) {
  if (d == 2) return 1 + seed_index % 4;
  const std::size_t ranks[4] = {1, 2, d, d * d};
  return ranks[seed_index % 4];
}

inline constexpr std::uint64_t kAncillaSeedOffset = 1'000'003;

inline KrausChannel make_system_noise(const std::string& kind, std::size_t d, std::uint64_t seed,
                                      std::size_t seed_index, double param) {
  if (kind == "random") return random_cptp(d, random_channel_rank(d, seed_index), seed);
  if (kind == "depolarizing") return named_channel(NamedNoise::depolarizing, param, d);
  if (kind == "amplitude_damping") return named_channel(NamedNoise::amplitude_damping, param, d);
  if (kind == "phase_damping") return named_channel(NamedNoise::phase_damping, param, d);
  if (kind == "bit_flip") return named_channel(NamedNoise::bit_flip, param, d);
  throw ConfigError("unknown system noise kind: " + kind);
}

inline ReportRecord run_cell(const SweepConfig& cfg, const SweepCell& cell) {
  const auto start = std::chrono::steady_clock::now();
  ReportRecord r;
  r.d = cell.d;
  r.seed = cfg.seed_base + cell.seed_index;
  r.system_noise = cell.system_noise;
  r.ancilla_noise = to_string(cell.ancilla_noise);
  r.v_variant = to_string(cell.variant);
  r.ab_order = to_string(cell.order);
  r.control = !is_in_class(cell.ancilla_noise);
  r.case_id = "d" + std::to_string(cell.d) + "-s" + std::to_string(r.seed) + "-" + r.system_noise + "-" +
              r.ancilla_noise + "-" + r.v_variant + "-" + r.ab_order;

  const auto lambda = make_system_noise(cell.system_noise, cell.d, r.seed, cell.seed_index, cfg.system_noise_param);
  r.system_kraus_rank = lambda.size();
  const auto phi = sample_ancilla_noise({cell.ancilla_noise, r.seed + kAncillaSeedOffset, cell.d});
  const auto assembled = assemble(lambda, phi, cell.d, cell.variant, cell.order);
  const auto fr = factorization_report(assembled, cfg.max_joint_d);
  r.system_fidelity = round_sig12(fr.system_fidelity);
  if (fr.factorization_residual) r.factorization_residual = round_sig12(*fr.factorization_residual);
  r.pass = fr.system_fidelity >= 1.0 - cfg.tolerance &&
           (!fr.factorization_residual || *fr.factorization_residual <= cfg.tolerance);
  if (cfg.include_timing) {
    r.wall_time_s = round_sig12(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return r;
}

inline SweepSummary summarize(const std::vector<ReportRecord>& records) {
  SweepSummary s;
  for (const auto& r : records) {
    if (r.control) {
      ++s.control_count;
      if (r.system_fidelity < 0.999) ++s.control_detected;
      continue;
    }
    (r.pass ? s.pass_count : s.fail_count)++;
    auto& [p, total] = s.ab_order_results[r.ab_order];
    p += r.pass ? 1 : 0;
    ++total;
  }
  return s;
}

/// Cells run on cfg.threads workers; records are merged in cell order.
inline SweepReport run_transparency_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const auto cells = enumerate_cells(cfg);
  if (cells.empty()) throw ConfigError("configuration produces no runnable cells");
  std::vector<ReportRecord> records(cells.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(cfg.threads);
  auto worker = [&](std::size_t w) {
    try {
      for (std::size_t i = next++; i < cells.size(); i = next++) records[i] = run_cell(cfg, cells[i]);
    } catch (...) {
      errors[w] = std::current_exception();
      next = cells.size();
    }
  };
  {
    std::vector<std::jthread> pool;
    const auto n = std::min(cfg.threads, cells.size());
    for (std::size_t w = 1; w < n; ++w) pool.emplace_back(worker, w);
    worker(0);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  SweepReport rep{cfg, std::move(records), {}};
  rep.summary = summarize(rep.records);
  return rep;
}

// ---------------------------------------------------------------------------
// emission

inline nlohmann::ordered_json record_to_json(const ReportRecord& r, bool include_timing = true) {
  nlohmann::ordered_json j;
  j["case_id"] = r.case_id;
  j["d"] = r.d;
  j["seed"] = r.seed;
  j["system_noise"] = r.system_noise;
  j["ancilla_noise"] = r.ancilla_noise;
  j["v_variant"] = r.v_variant;
  j["ab_order"] = r.ab_order;
  j["system_kraus_rank"] = r.system_kraus_rank;
  j["system_fidelity"] = r.system_fidelity;
  if (r.factorization_residual) {
    j["factorization_residual"] = *r.factorization_residual;
  } else {
    j["factorization_residual"] = "skipped:dim";
  }
  j["control"] = r.control;
  j["pass"] = r.pass;
  if (include_timing) j["wall_time_s"] = r.wall_time_s;
  return j;
}

inline nlohmann::ordered_json summary_to_json(const SweepSummary& s) {
  nlohmann::ordered_json j;
  j["pass_count"] = s.pass_count;
  j["fail_count"] = s.fail_count;
  j["control_count"] = s.control_count;
  j["control_detected"] = s.control_detected;
  nlohmann::ordered_json orders = nlohmann::ordered_json::object();
  for (const auto& [order, pt] : s.ab_order_results) {
    orders[order] = {{"pass", pt.first}, {"total", pt.second}};
  }
  j["ab_order_results"] = orders;
  return j;
}

/// {config, records[], summary}. Without timing the document is a pure
/// function of the configuration.
inline nlohmann::ordered_json report_to_json(const SweepReport& rep, bool include_timing = true) {
  nlohmann::ordered_json j;
  j["config"] = config_to_json(rep.config);
  j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : rep.records) j["records"].push_back(record_to_json(r, include_timing));
  j["summary"] = summary_to_json(rep.summary);
  return j;
}

inline void write_csv(std::ostream& out, const SweepReport& rep) {
  out << "case_id,d,seed,system_noise,ancilla_noise,v_variant,ab_order,system_kraus_rank,system_fidelity,"
         "factorization_residual,control,pass,wall_time_s\n";
  for (const auto& r : rep.records) {
    out << r.case_id << ',' << r.d << ',' << r.seed << ',' << r.system_noise << ',' << r.ancilla_noise << ','
        << r.v_variant << ',' << r.ab_order << ',' << r.system_kraus_rank << ',' << format_number(r.system_fidelity)
        << ',' << (r.factorization_residual ? format_number(*r.factorization_residual) : "skipped:dim") << ','
        << (r.control ? "true" : "false") << ',' << (r.pass ? "true" : "false") << ','
        << format_number(r.wall_time_s) << '\n';
  }
}

inline void write_report(const SweepReport& rep) {
  const auto& cfg = rep.config;
  auto emit = [&](std::ostream& out) {
    if (cfg.output_format == OutputFormat::json) {
      out << report_to_json(rep, cfg.include_timing).dump(2) << '\n';
    } else {
      write_csv(out, rep);
    }
  };
  if (cfg.output_path.empty() || cfg.output_path == "-") {
    emit(std::cout);
    return;
  }
  std::ofstream out(cfg.output_path);
  if (!out) throw std::runtime_error("cannot write report to " + cfg.output_path);
  emit(out);
  if (!out) throw std::runtime_error("failed while writing report to " + cfg.output_path);
}

// ---------------------------------------------------------------------------
// entanglement protection demo

struct DemoRow {
  double p = 0.0;
  double input_negativity = 0.0;
  double bare_negativity = 0.0;       // depolarizing on both halves, no protocol
  double protected_negativity = 0.0;  // each half through its own pipeline
  double protected_bell_fidelity = 0.0;
  bool pass = false;
};

/// Bell pair |Phi+> on S1 (x) S2, each half sent through an independent
/// pipeline with local depolarizing noise of strength p. The full state of
/// A1 B1 S1 A2 B2 S2 is simulated and the ancillas traced out.
inline DemoRow run_entanglement_demo(double p, std::uint64_t seed = 0,
                                     AncillaNoiseKind ancilla = AncillaNoiseKind::identity,
                                     VVariant variant = VVariant::eq3_unitary, Tolerance tol = {}) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::out_of_range("run_entanglement_demo: p must lie in [0, 1]");
  const auto bell = DensityState::pure(maximally_entangled_vector(2), {2, 2});
  const auto noise = named_channel(NamedNoise::depolarizing, p, 2);

  DemoRow row;
  row.p = p;
  row.input_negativity = negativity(bell);
  row.bare_negativity = negativity(apply(channel_tensor(noise, noise), bell, tol));

  const auto half1 = assemble(noise, sample_ancilla_noise({ancilla, seed, 2}), 2, variant);
  const auto half2 = assemble(noise, sample_ancilla_noise({ancilla, seed + 1, 2}), 2, variant);
  const auto joint_out = apply_map(channel_tensor(half1, half2), bell.matrix());
  const DensityState s1s2(partial_trace(joint_out, {2, 5}), tol);
  row.protected_negativity = negativity(s1s2);
  row.protected_bell_fidelity = (bell.matrix().mat() * s1s2.matrix().mat()).trace().real();
  row.pass = std::abs(row.protected_negativity - 0.5) <= tol.abs_eps;
  return row;
}

inline nlohmann::ordered_json demo_to_json(const std::vector<DemoRow>& rows) {
  nlohmann::ordered_json j;
  j["records"] = nlohmann::ordered_json::array();
  std::size_t pass = 0;
  for (const auto& r : rows) {
    j["records"].push_back({{"p", round_sig12(r.p)},
                            {"input_negativity", round_sig12(r.input_negativity)},
                            {"bare_negativity", round_sig12(r.bare_negativity)},
                            {"protected_negativity", round_sig12(r.protected_negativity)},
                            {"protected_bell_fidelity", round_sig12(r.protected_bell_fidelity)},
                            {"pass", r.pass}});
    pass += r.pass ? 1 : 0;
  }
  j["summary"] = {{"pass_count", pass}, {"fail_count", rows.size() - pass}};
  return j;
}

// ---------------------------------------------------------------------------
// decomposition certificates

inline nlohmann::ordered_json certificates_to_json(const std::vector<CheckResult>& checks) {
  nlohmann::ordered_json j;
  j["records"] = nlohmann::ordered_json::array();
  std::size_t pass = 0;
  for (const auto& c : checks) {
    j["records"].push_back({{"check", c.name},
                            {"pass", c.pass},
                            {"residual", round_sig12(c.residual)},
                            {"phase_insensitive_residual", round_sig12(c.phase_insensitive_residual)},
                            {"note", c.note}});
    pass += c.pass ? 1 : 0;
  }
  j["summary"] = {{"pass_count", pass}, {"fail_count", checks.size() - pass}};
  return j;
}

}  // namespace qct
