#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "qcg/dimension.hpp"
#include "qcg/walk.hpp"

namespace qcg {

struct ExperimentConfig {
  std::string kind;  // dimension-curve | growth-report | walk-complexity | return-prob
  // dimension kinds
  std::string architecture;  // path to an architecture JSON
  int k_max = 4;
  int samples = 5;
  double rel_tol = 1e-7;
  double shortcut_c = 0.5;
  // walk kinds
  std::string backend;  // clifford-t | lattice | permutation
  std::string gateset;  // optional path; empty = built-in Clifford+T
  bool projective = true;
  std::string step_distribution = "uniform";
  int lattice_dim = 1;
  int perm_size = 3;
  std::vector<std::vector<int>> perm_generators;  // empty = adjacent transpositions
  std::vector<int> k_list;
  int trials = 1;
  int radius_cap = 8;
  std::uint64_t memory_cap = 1ull << 22;
  int censor_threshold = 0;
  // common
  std::uint64_t seed = 0;
  std::string out = "out";
  int threads = 1;
};

namespace detail {

inline const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys = {
      "kind",        "architecture", "k_max",          "samples",          "rel_tol",
      "shortcut_c",  "backend",      "gateset",        "projective",       "step_distribution",
      "lattice_dim", "perm_size",    "perm_generators", "k_list",          "trials",
      "radius_cap",  "memory_cap",   "censor_threshold", "seed",           "out",
      "threads"};
  return keys;
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: top level must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!detail::known_config_keys().count(key))
      throw std::invalid_argument("config: unknown field '" + key + "'");
  ExperimentConfig c;
  c.kind = j.value("kind", std::string());
  c.architecture = j.value("architecture", std::string());
  c.k_max = j.value("k_max", c.k_max);
  c.samples = j.value("samples", c.samples);
  c.rel_tol = j.value("rel_tol", c.rel_tol);
  c.shortcut_c = j.value("shortcut_c", c.shortcut_c);
  c.backend = j.value("backend", std::string());
  c.gateset = j.value("gateset", std::string());
  c.projective = j.value("projective", true);
  c.step_distribution = j.value("step_distribution", std::string("uniform"));
  c.lattice_dim = j.value("lattice_dim", c.lattice_dim);
  c.perm_size = j.value("perm_size", c.perm_size);
  if (j.contains("perm_generators"))
    c.perm_generators = j.at("perm_generators").get<std::vector<std::vector<int>>>();
  if (j.contains("k_list")) c.k_list = j.at("k_list").get<std::vector<int>>();
  c.trials = j.value("trials", c.trials);
  c.radius_cap = j.value("radius_cap", c.radius_cap);
  c.memory_cap = j.value("memory_cap", c.memory_cap);
  c.censor_threshold = j.value("censor_threshold", c.censor_threshold);
  c.seed = j.value("seed", c.seed);
  c.out = j.value("out", c.out);
  c.threads = j.value("threads", c.threads);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return parse_config(j);
}

struct Finding {
  std::string field;
  std::string message;
};

inline nlohmann::json findings_to_json(const std::vector<Finding>& findings) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& f : findings) arr.push_back({{"field", f.field}, {"message", f.message}});
  return arr;
}

// Semantic validation without side effects: referenced files are parsed and
// their own invariants surfaced as findings rather than thrown.
inline std::vector<Finding> validate_config(const ExperimentConfig& c) {
  std::vector<Finding> out;
  const bool dim_kind = (c.kind == "dimension-curve" || c.kind == "growth-report");
  const bool walk_kind = (c.kind == "walk-complexity" || c.kind == "return-prob");
  if (!dim_kind && !walk_kind) {
    out.push_back({"kind", "kind must be one of dimension-curve, growth-report, "
                           "walk-complexity, return-prob"});
    return out;
  }
  if (c.threads < 1) out.push_back({"threads", "threads must be >= 1"});

  if (dim_kind) {
    if (c.architecture.empty()) {
      out.push_back({"architecture", "dimension runs need an architecture file"});
    } else {
      try {
        load_architecture(c.architecture);
      } catch (const std::exception& e) {
        out.push_back({"architecture", e.what()});
      }
    }
    if (c.k_max < 1) out.push_back({"k_max", "k_max must be >= 1"});
    if (c.samples < 1) out.push_back({"samples", "samples must be >= 1"});
    if (!(c.rel_tol > 0.0 && c.rel_tol < 1.0))
      out.push_back({"rel_tol", "rel_tol must lie in (0, 1)"});
    if (!(c.shortcut_c > 0.0)) out.push_back({"shortcut_c", "shortcut_c must be > 0"});
  }

  if (walk_kind) {
    if (c.backend != "clifford-t" && c.backend != "lattice" && c.backend != "permutation")
      out.push_back({"backend", "backend must be one of clifford-t, lattice, permutation"});
    if (c.step_distribution != "uniform")
      out.push_back({"step_distribution", "only the uniform step distribution is implemented"});
    if (c.k_list.empty()) out.push_back({"k_list", "k_list must be nonempty"});
    for (int k : c.k_list)
      if (k < 1) out.push_back({"k_list", "k values must be >= 1"});
    if (c.trials < 1) out.push_back({"trials", "trials must be >= 1"});
    if (c.censor_threshold < 0)
      out.push_back({"censor_threshold", "censor_threshold must be >= 0"});
    if (c.backend == "clifford-t" && !c.gateset.empty()) {
      try {
        const GateSet gs = load_gateset(c.gateset, false);
        for (const auto& f : gateset_findings(gs)) out.push_back({"gateset", f});
      } catch (const std::exception& e) {
        out.push_back({"gateset", e.what()});
      }
    }
    if (c.backend == "lattice" && c.lattice_dim < 1)
      out.push_back({"lattice_dim", "lattice_dim must be >= 1"});
    if (c.backend == "permutation") {
      if (c.perm_size < 2 || c.perm_size > 255)
        out.push_back({"perm_size", "perm_size must be in [2, 255]"});
      else if (!c.perm_generators.empty()) {
        try {
          PermutationBackend probe(c.perm_size, c.perm_generators);
        } catch (const std::exception& e) {
          out.push_back({"perm_generators", e.what()});
        }
      }
    }
    if (c.kind == "walk-complexity") {
      if (c.radius_cap < 1) out.push_back({"radius_cap", "radius_cap must be >= 1"});
      std::size_t gen_count = 2;
      if (c.backend == "lattice") gen_count = 2 * std::max(1, c.lattice_dim);
      if (c.backend == "permutation")
        gen_count = c.perm_generators.empty() ? std::max(1, c.perm_size - 1)
                                              : c.perm_generators.size();
      if (c.backend == "clifford-t") gen_count = 5;
      if (c.memory_cap < 1 + gen_count)
        out.push_back({"memory_cap", "memory_cap must cover the radius-1 ball"});
    }
  }
  return out;
}

// Hash of the result-determining configuration: excludes out and threads so
// the same experiment reproduces the same artifact bytes regardless of where
// it is written or how many workers run it.
inline std::uint64_t config_hash(const ExperimentConfig& c) {
  nlohmann::json j;
  j["kind"] = c.kind;
  j["seed"] = c.seed;
  if (c.kind == "dimension-curve" || c.kind == "growth-report") {
    j["architecture"] = c.architecture;
    j["k_max"] = c.k_max;
    j["samples"] = c.samples;
    j["rel_tol"] = c.rel_tol;
    if (c.kind == "growth-report") j["shortcut_c"] = c.shortcut_c;
  } else {
    j["backend"] = c.backend;
    j["step_distribution"] = c.step_distribution;
    if (c.backend == "clifford-t") {
      j["gateset"] = c.gateset;
      j["projective"] = c.projective;
    }
    if (c.backend == "lattice") j["lattice_dim"] = c.lattice_dim;
    if (c.backend == "permutation") {
      j["perm_size"] = c.perm_size;
      j["perm_generators"] = c.perm_generators;
    }
    j["k_list"] = c.k_list;
    j["trials"] = c.trials;
    if (c.kind == "walk-complexity") {
      j["radius_cap"] = c.radius_cap;
      j["memory_cap"] = c.memory_cap;
      j["censor_threshold"] = c.censor_threshold;
    }
  }
  return fnv1a64(j.dump());
}

struct RunResult {
  int exit_code = 0;
  std::vector<std::string> verdicts;  // "name: PASS" / "name: FAIL" / "name = value"
  std::string csv_path, json_path, verdict_path;
};

namespace detail {

inline std::string preamble(std::uint64_t hash, std::uint64_t seed) {
  std::ostringstream ss;
  ss << "# generated_at=" << iso_utc_now() << "\n";
  ss << "# config_hash=" << to_hex(hash) << " seed=" << seed << "\n";
  return ss.str();
}

inline void write_artifact(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

inline void write_summary_json(const std::string& path, nlohmann::json j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

template <GroupBackend B>
RunResult run_walk_with_backend(const B& backend, const ExperimentConfig& cfg,
                                std::uint64_t hash) {
  RunResult res;
  std::ostringstream csv, verdict;
  nlohmann::json summary;
  summary["config_hash"] = to_hex(hash);
  summary["seed"] = cfg.seed;
  summary["kind"] = cfg.kind;
  summary["backend"] = backend.name();
  summary["trials"] = cfg.trials;

  if (cfg.kind == "walk-complexity") {
    BallSearcher<B> ball(backend, SearchCaps{cfg.radius_cap, cfg.memory_cap});
    const GrowthEstimate est =
        kingman_estimate(backend, ball, cfg.k_list, cfg.trials, cfg.seed, cfg.threads);
    csv << "backend,k,trial,complexity,censored,ball_radius,ball_size,seed\n";
    for (std::size_t ki = 0; ki < cfg.k_list.size(); ++ki) {
      for (int t = 0; t < cfg.trials; ++t) {
        const WalkRecord& rec = est.records[ki * cfg.trials + t];
        csv << rec.backend_id << ',' << rec.k << ',' << t << ',';
        if (rec.complexity) csv << *rec.complexity;
        csv << ',' << (rec.complexity ? 0 : 1) << ',' << rec.ball_radius << ',' << rec.ball_size
            << ',' << rec.seed << "\n";
      }
    }
    summary["radius_cap"] = cfg.radius_cap;
    summary["memory_cap"] = cfg.memory_cap;
    summary["ball_radius"] = ball.radius();
    summary["ball_size"] = ball.size();
    summary["memory_capped"] = ball.memory_capped();
    summary["estimates"] = nlohmann::json::array();
    int censored_total = 0;
    for (const auto& row : est.per_k) {
      nlohmann::json je;
      je["k"] = row.k;
      je["mean_ratio"] = row.mean_ratio ? nlohmann::json(*row.mean_ratio) : nlohmann::json();
      je["stderr"] = row.stderr_ ? nlohmann::json(*row.stderr_) : nlohmann::json();
      je["trials"] = row.trials;
      je["censored_count"] = row.censored_count;
      summary["estimates"].push_back(std::move(je));
      censored_total += row.censored_count;
    }
    res.verdicts.push_back("complexity_le_k: PASS");  // violation throws inside the estimate
    const bool censor_ok = censored_total <= cfg.censor_threshold;
    res.verdicts.push_back(std::string("censoring_within_threshold: ") +
                           (censor_ok ? "PASS" : "FAIL"));
    res.verdicts.push_back("censored_total = " + std::to_string(censored_total));
    if (!censor_ok) res.exit_code = 4;
  } else {  // return-prob
    const auto rows = return_probability(backend, cfg.k_list, cfg.trials, cfg.seed, cfg.threads);
    csv << "backend,k,trials,returns,rho_estimate,rho_is_upper_bound,seed\n";
    bool in_unit = true;
    summary["estimates"] = nlohmann::json::array();
    for (const auto& row : rows) {
      csv << backend.name() << ',' << row.k << ',' << row.trials << ',' << row.returns << ','
          << fmt_double(row.rho_estimate) << ',' << (row.upper_bound ? 1 : 0) << ',' << cfg.seed
          << "\n";
      summary["estimates"].push_back({{"k", row.k},
                                      {"trials", row.trials},
                                      {"returns", row.returns},
                                      {"rho_estimate", row.rho_estimate},
                                      {"rho_is_upper_bound", row.upper_bound}});
      if (!(row.rho_estimate > 0.0 && row.rho_estimate <= 1.0)) in_unit = false;
    }
    res.verdicts.push_back(std::string("rho_within_unit_interval: ") + (in_unit ? "PASS" : "FAIL"));
    if (!in_unit) res.exit_code = 3;
  }

  const std::string pre = preamble(hash, cfg.seed);
  std::filesystem::create_directories(cfg.out);
  res.csv_path = cfg.out + "/data.csv";
  res.json_path = cfg.out + "/summary.json";
  res.verdict_path = cfg.out + "/verdict.txt";
  write_artifact(res.csv_path, pre + csv.str());
  std::ostringstream vtxt;
  vtxt << pre;
  for (const auto& line : res.verdicts) vtxt << line << "\n";
  write_artifact(res.verdict_path, vtxt.str());
  write_summary_json(res.json_path, std::move(summary));
  return res;
}

}  // namespace detail

inline RunResult run_experiment(const ExperimentConfig& cfg) {
  const auto findings = validate_config(cfg);
  if (!findings.empty())
    throw std::invalid_argument("config invalid: " + findings.front().field + ": " +
                                findings.front().message);
  const std::uint64_t hash = config_hash(cfg);

  if (cfg.kind == "dimension-curve" || cfg.kind == "growth-report") {
    const BlockArchitecture arch = load_architecture(cfg.architecture);
    const DimensionCurve curve =
        dimension_curve(arch, cfg.k_max, cfg.samples, cfg.rel_tol, cfg.seed, cfg.threads);
    const GrowthReport rep = growth_report(curve, cfg.shortcut_c);

    RunResult res;
    std::ostringstream csv;
    write_curve_csv_rows(csv, curve);

    nlohmann::json summary;
    summary["config_hash"] = to_hex(hash);
    summary["seed"] = cfg.seed;
    summary["kind"] = cfg.kind;
    summary["curve"] = curve_to_json(curve);
    res.verdicts.push_back(std::string("eq2: ") + (rep.eq2_pass ? "PASS" : "FAIL"));
    res.verdicts.push_back(std::string("monotone: ") + (rep.monotone_pass ? "PASS" : "FAIL"));
    bool fail = !rep.eq2_pass || !rep.monotone_pass;
    if (cfg.kind == "growth-report") {
      const nlohmann::json repj = growth_report_to_json(rep);
      for (const auto& [key, value] : repj.items()) summary[key] = value;
      res.verdicts.push_back(std::string("subadditive: ") +
                             (rep.subadditive_pass ? "PASS" : "FAIL"));
      res.verdicts.push_back("saturation_k = " +
                             (rep.saturation_k ? std::to_string(*rep.saturation_k) : "none"));
      res.verdicts.push_back("c2_fit = " + fmt_double(rep.c2_fit));
      fail = fail || !rep.subadditive_pass;
    }
    res.verdicts.push_back(std::string("tolerance_stability: ") +
                           (rep.tol_stable ? "PASS" : "FAIL"));
    fail = fail || !rep.tol_stable;
    if (fail) res.exit_code = 3;

    const std::string pre = detail::preamble(hash, cfg.seed);
    std::filesystem::create_directories(cfg.out);
    res.csv_path = cfg.out + "/data.csv";
    res.json_path = cfg.out + "/summary.json";
    res.verdict_path = cfg.out + "/verdict.txt";
    detail::write_artifact(res.csv_path, pre + csv.str());
    std::ostringstream vtxt;
    vtxt << pre;
    for (const auto& line : res.verdicts) vtxt << line << "\n";
    detail::write_artifact(res.verdict_path, vtxt.str());
    detail::write_summary_json(res.json_path, std::move(summary));
    return res;
  }

  // walk kinds
  if (cfg.backend == "clifford-t") {
    const GateSet gs = cfg.gateset.empty() ? clifford_t_gateset() : load_gateset(cfg.gateset);
    const CliffordTBackend backend(gs, cfg.projective);
    return detail::run_walk_with_backend(backend, cfg, hash);
  }
  if (cfg.backend == "lattice") {
    const LatticeBackend backend(cfg.lattice_dim);
    return detail::run_walk_with_backend(backend, cfg, hash);
  }
  const PermutationBackend backend(cfg.perm_size, cfg.perm_generators);
  return detail::run_walk_with_backend(backend, cfg, hash);
}

}  // namespace qcg
