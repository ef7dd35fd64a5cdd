#include "test_util.hpp"

#include <filesystem>
#include <regex>

#include "qcg/experiment.hpp"

using namespace qcg;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) lines.push_back(line);
  return lines;
}

// Everything except the volatile timestamp comment.
std::string drop_timestamp(const std::string& text) {
  const auto pos = text.find('\n');
  REQUIRE(pos != std::string::npos);
  REQUIRE(text.rfind("# generated_at=", 0) == 0);
  return text.substr(pos + 1);
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string str(const std::string& sub = "") const {
    return (sub.empty() ? path : path / sub).string();
  }
};

bool has_finding(const std::vector<Finding>& fs, const std::string& field) {
  for (const auto& f : fs)
    if (f.field == field) return true;
  return false;
}

std::string finding_message(const std::vector<Finding>& fs, const std::string& field) {
  for (const auto& f : fs)
    if (f.field == field) return f.message;
  return "";
}

}  // namespace

TEST_CASE("io primitives", "[experiment][io]") {
  CHECK(fmt_double(0.5) == "0.5");
  CHECK(fmt_double(63.0) == "63");
  CHECK(fmt_double(7.875) == "7.875");
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(to_hex(0) == "0000000000000000");
  CHECK(to_hex(0xdeadbeefull) == "00000000deadbeef");
  CHECK(std::regex_match(iso_utc_now(),
                         std::regex(R"(\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z)")));

  std::vector<int> out(100, 0);
  parallel_for(100, 4, [&](std::size_t i) { out[i] = static_cast<int>(2 * i); });
  for (int i = 0; i < 100; ++i) REQUIRE(out[i] == 2 * i);
  CHECK_THROWS_AS(parallel_for(10, 0, [](std::size_t) {}), std::invalid_argument);
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                    if (i == 7) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}

TEST_CASE("config parsing applies defaults and rejects unknown fields", "[experiment]") {
  const ExperimentConfig c = parse_config(nlohmann::json::parse(R"({
    "kind": "walk-complexity",
    "backend": "lattice",
    "lattice_dim": 2,
    "k_list": [1, 2],
    "trials": 7,
    "seed": 42
  })"));
  CHECK(c.kind == "walk-complexity");
  CHECK(c.backend == "lattice");
  CHECK(c.lattice_dim == 2);
  CHECK(c.k_list == std::vector<int>{1, 2});
  CHECK(c.trials == 7);
  CHECK(c.seed == 42);
  // defaults
  CHECK(c.radius_cap == 8);
  CHECK(c.memory_cap == (1ull << 22));
  CHECK(c.censor_threshold == 0);
  CHECK(c.projective);
  CHECK(c.step_distribution == "uniform");
  CHECK(c.out == "out");
  CHECK(c.threads == 1);
  CHECK(c.samples == 5);
  CHECK(c.rel_tol == 1e-7);

  CHECK_THROWS_WITH(parse_config(nlohmann::json::parse(R"({"kind":"x","typo_field":1})")),
                    Catch::Matchers::ContainsSubstring("typo_field"));
  CHECK_THROWS(parse_config(nlohmann::json::parse("[1,2]")));
  CHECK_THROWS(load_config("no_such_config.json"));
}

TEST_CASE("config validation findings", "[experiment]") {
  ExperimentConfig c;
  c.kind = "bogus";
  auto fs = validate_config(c);
  REQUIRE(fs.size() == 1);
  CHECK(fs[0].field == "kind");

  // dimension kind without a real architecture file
  c.kind = "dimension-curve";
  c.architecture = "";
  fs = validate_config(c);
  CHECK(has_finding(fs, "architecture"));

  c.architecture = "no_such_arch.json";
  fs = validate_config(c);
  CHECK(finding_message(fs, "architecture").find("cannot open") != std::string::npos);

  TempDir tmp("qcg_validate_tmp");
  {
    std::ofstream bad(tmp.str("bad_arch.json"));
    bad << R"({"n": 3, "name": "bad", "slots": [[0, 0]]})" << "\n";
  }
  c.architecture = tmp.str("bad_arch.json");
  fs = validate_config(c);
  CHECK(finding_message(fs, "architecture").find("slot indices must differ") !=
        std::string::npos);

  {
    std::ofstream good(tmp.str("arch.json"));
    good << R"({"n": 2, "name": "single2", "slots": [[0, 1]]})" << "\n";
  }
  c.architecture = tmp.str("arch.json");
  c.k_max = 0;
  c.samples = 0;
  c.rel_tol = 2.0;
  c.shortcut_c = 0.0;
  fs = validate_config(c);
  CHECK(has_finding(fs, "k_max"));
  CHECK(has_finding(fs, "samples"));
  CHECK(has_finding(fs, "rel_tol"));
  CHECK(has_finding(fs, "shortcut_c"));

  c = ExperimentConfig{};
  c.kind = "growth-report";
  c.architecture = tmp.str("arch.json");
  CHECK(validate_config(c).empty());
}

TEST_CASE("walk config validation findings", "[experiment]") {
  ExperimentConfig c;
  c.kind = "walk-complexity";
  c.backend = "quantum";
  c.k_list = {};
  auto fs = validate_config(c);
  CHECK(has_finding(fs, "backend"));
  CHECK(has_finding(fs, "k_list"));

  c.backend = "lattice";
  c.k_list = {1, 0};
  c.trials = 0;
  c.censor_threshold = -1;
  c.step_distribution = "gaussian";
  fs = validate_config(c);
  CHECK(has_finding(fs, "k_list"));
  CHECK(has_finding(fs, "trials"));
  CHECK(has_finding(fs, "censor_threshold"));
  CHECK(has_finding(fs, "step_distribution"));

  c = ExperimentConfig{};
  c.kind = "walk-complexity";
  c.backend = "lattice";
  c.lattice_dim = 0;
  c.k_list = {1};
  fs = validate_config(c);
  CHECK(has_finding(fs, "lattice_dim"));

  c.lattice_dim = 2;
  c.radius_cap = 0;
  c.memory_cap = 2;
  fs = validate_config(c);
  CHECK(has_finding(fs, "radius_cap"));
  CHECK(has_finding(fs, "memory_cap"));

  c = ExperimentConfig{};
  c.kind = "return-prob";
  c.backend = "permutation";
  c.perm_size = 1;
  c.k_list = {1};
  fs = validate_config(c);
  CHECK(has_finding(fs, "perm_size"));

  c.perm_size = 3;
  c.perm_generators = {{1, 2, 0}};  // lone 3-cycle: not inverse-closed
  fs = validate_config(c);
  CHECK(finding_message(fs, "perm_generators").find("inverse-closed") != std::string::npos);

  // gate set findings surface under the gateset field
  TempDir tmp("qcg_walkcfg_tmp");
  {
    nlohmann::json open;
    open["name"] = "open";
    open["elements"] = gateset_to_json(clifford_t_gateset()).at("elements");
    open["elements"].erase(4);  // drop Tdg: T loses its inverse
    std::ofstream out(tmp.str("open.json"));
    out << open.dump(2) << "\n";
  }
  c = ExperimentConfig{};
  c.kind = "return-prob";
  c.backend = "clifford-t";
  c.gateset = tmp.str("open.json");
  c.k_list = {1};
  fs = validate_config(c);
  CHECK(finding_message(fs, "gateset") == "not inverse-closed: missing inverse of T");

  // built-in gate set needs no file
  c.gateset = "";
  CHECK(validate_config(c).empty());
}

TEST_CASE("config hash tracks semantic fields only", "[experiment]") {
  ExperimentConfig a;
  a.kind = "walk-complexity";
  a.backend = "lattice";
  a.lattice_dim = 2;
  a.k_list = {1, 2};
  a.trials = 5;
  a.seed = 9;

  ExperimentConfig b = a;
  b.out = "elsewhere";
  b.threads = 16;
  CHECK(config_hash(a) == config_hash(b));

  b = a;
  b.seed = 10;
  CHECK(config_hash(a) != config_hash(b));
  b = a;
  b.trials = 6;
  CHECK(config_hash(a) != config_hash(b));
  b = a;
  b.radius_cap = 5;
  CHECK(config_hash(a) != config_hash(b));  // caps shape walk-complexity results

  // return-prob never consults the ball, so caps do not enter its hash
  a.kind = "return-prob";
  b = a;
  b.radius_cap = 5;
  b.memory_cap = 99;
  CHECK(config_hash(a) == config_hash(b));

  // dimension hashes ignore walk fields and vice versa
  ExperimentConfig d;
  d.kind = "dimension-curve";
  d.architecture = "arch.json";
  ExperimentConfig d2 = d;
  d2.backend = "lattice";
  d2.k_list = {7};
  CHECK(config_hash(d) == config_hash(d2));
  d2 = d;
  d2.samples = 11;
  CHECK(config_hash(d) != config_hash(d2));
  d2 = d;
  d2.shortcut_c = 0.25;
  CHECK(config_hash(d) == config_hash(d2));  // shortcut only shapes growth-report
  d2.kind = "growth-report";
  d = d2;
  d.shortcut_c = 0.5;
  CHECK(config_hash(d) != config_hash(d2));
}

TEST_CASE("dimension-curve run writes coherent artifacts", "[experiment]") {
  TempDir tmp("qcg_dimrun_tmp");
  {
    std::ofstream out(tmp.str("arch.json"));
    out << R"({"n": 3, "name": "brickwork3", "slots": [[0, 1], [1, 2]]})" << "\n";
  }
  ExperimentConfig c;
  c.kind = "dimension-curve";
  c.architecture = tmp.str("arch.json");
  c.k_max = 2;
  c.samples = 2;
  c.seed = 2024;
  c.out = tmp.str("run1");

  const RunResult res = run_experiment(c);
  CHECK(res.exit_code == 0);
  REQUIRE(res.verdicts.size() == 3);
  CHECK(res.verdicts[0] == "eq2: PASS");
  CHECK(res.verdicts[1] == "monotone: PASS");
  CHECK(res.verdicts[2] == "tolerance_stability: PASS");

  const std::string csv = read_file_text(res.csv_path);
  const auto csv_lines = lines_of(csv);
  REQUIRE(csv_lines.size() == 2 + 1 + 3);  // preamble, header, k = 0..2
  CHECK(csv_lines[0].rfind("# generated_at=", 0) == 0);
  CHECK(std::regex_match(
      csv_lines[1], std::regex(R"(# config_hash=[0-9a-f]{16} seed=\d+)")));
  CHECK(csv_lines[1].find(to_hex(config_hash(c))) != std::string::npos);
  CHECK(csv_lines[1].find("seed=2024") != std::string::npos);
  CHECK(csv_lines[2] == "k,d_estimate,samples,deficient_count,tol_stable,seed");
  CHECK(csv_lines[3].rfind("0,0,2,", 0) == 0);
  CHECK(csv_lines[4].rfind("1,27,2,", 0) == 0);
  CHECK(csv_lines[5].rfind("2,45,2,", 0) == 0);

  const std::string verdict = read_file_text(res.verdict_path);
  const auto vlines = lines_of(verdict);
  REQUIRE(vlines.size() == 5);
  CHECK(vlines[2] == "eq2: PASS");

  const nlohmann::json summary = nlohmann::json::parse(read_file_text(res.json_path));
  CHECK(summary.at("config_hash") == to_hex(config_hash(c)));
  CHECK(summary.at("seed") == 2024);
  CHECK(summary.at("kind") == "dimension-curve");
  CHECK_FALSE(summary.contains("generated_at"));
  REQUIRE(summary.at("curve").at("entries").size() == 3);
  CHECK(summary.at("curve").at("entries")[1].at("d_estimate") == 27);

  // identical config, different destination: identical bytes modulo timestamp
  ExperimentConfig c2 = c;
  c2.out = tmp.str("run2");
  c2.threads = 2;
  const RunResult res2 = run_experiment(c2);
  CHECK(drop_timestamp(read_file_text(res2.csv_path)) == drop_timestamp(csv));
  CHECK(drop_timestamp(read_file_text(res2.verdict_path)) == drop_timestamp(verdict));
  CHECK(read_file_text(res2.json_path) == read_file_text(res.json_path));
}

TEST_CASE("growth-report run reports the fitted rate", "[experiment]") {
  TempDir tmp("qcg_reprun_tmp");
  {
    std::ofstream out(tmp.str("arch.json"));
    out << R"({"n": 2, "name": "single2", "slots": [[0, 1]]})" << "\n";
  }
  ExperimentConfig c;
  c.kind = "growth-report";
  c.architecture = tmp.str("arch.json");
  c.k_max = 2;
  c.samples = 2;
  c.seed = 55;
  c.out = tmp.str("run");

  const RunResult res = run_experiment(c);
  CHECK(res.exit_code == 0);
  REQUIRE(res.verdicts.size() == 6);
  CHECK(res.verdicts[0] == "eq2: PASS");
  CHECK(res.verdicts[1] == "monotone: PASS");
  CHECK(res.verdicts[2] == "subadditive: PASS");
  CHECK(res.verdicts[3] == "saturation_k = 1");
  CHECK(res.verdicts[4] == "c2_fit = 7.5");
  CHECK(res.verdicts[5] == "tolerance_stability: PASS");

  const nlohmann::json summary = nlohmann::json::parse(read_file_text(res.json_path));
  CHECK(summary.at("eq2_pass") == true);
  CHECK(summary.at("monotone_pass") == true);
  CHECK(summary.at("subadditive_pass") == true);
  CHECK(summary.at("saturation_k") == 1);
  CHECK(summary.at("c2_fit") == 7.5);
}

TEST_CASE("walk-complexity run writes records and verdicts", "[experiment]") {
  TempDir tmp("qcg_walkrun_tmp");
  ExperimentConfig c;
  c.kind = "walk-complexity";
  c.backend = "lattice";
  c.lattice_dim = 1;
  c.k_list = {1, 2};
  c.trials = 5;
  c.radius_cap = 4;
  c.seed = 7;
  c.out = tmp.str("run");

  const RunResult res = run_experiment(c);
  CHECK(res.exit_code == 0);
  REQUIRE(res.verdicts.size() == 3);
  CHECK(res.verdicts[0] == "complexity_le_k: PASS");
  CHECK(res.verdicts[1] == "censoring_within_threshold: PASS");
  CHECK(res.verdicts[2] == "censored_total = 0");

  const auto csv_lines = lines_of(read_file_text(res.csv_path));
  REQUIRE(csv_lines.size() == 2 + 1 + 10);
  CHECK(csv_lines[2] == "backend,k,trial,complexity,censored,ball_radius,ball_size,seed");
  // row shape: lattice1,k,trial,c,0,4,9,seed
  CHECK(std::regex_match(csv_lines[3],
                         std::regex(R"(lattice1,1,0,\d+,0,4,9,\d+)")));

  const nlohmann::json summary = nlohmann::json::parse(read_file_text(res.json_path));
  CHECK(summary.at("backend") == "lattice1");
  CHECK(summary.at("ball_radius") == 4);
  CHECK(summary.at("ball_size") == 9);
  CHECK(summary.at("memory_capped") == false);
  REQUIRE(summary.at("estimates").size() == 2);
  const auto& e0 = summary.at("estimates")[0];
  CHECK(e0.at("k") == 1);
  CHECK(e0.at("mean_ratio") == 1.0);
  CHECK(e0.at("stderr") == 0.0);
  CHECK(e0.at("trials") == 5);
  CHECK(e0.at("censored_count") == 0);
}

TEST_CASE("walk-complexity censoring drives the exit code", "[experiment]") {
  TempDir tmp("qcg_censor_tmp");
  ExperimentConfig c;
  c.kind = "walk-complexity";
  c.backend = "lattice";
  c.lattice_dim = 1;
  c.k_list = {15};
  c.trials = 20;
  c.radius_cap = 1;  // certifiable only out to length 2
  c.seed = 3;
  c.out = tmp.str("run");

  const RunResult res = run_experiment(c);
  // read the censored column and the verdict line; they must agree, and the
  // exit code follows the threshold comparison
  const auto csv_lines = lines_of(read_file_text(res.csv_path));
  int censored = 0;
  for (std::size_t i = 3; i < csv_lines.size(); ++i) {
    std::istringstream row(csv_lines[i]);
    std::string field;
    for (int f = 0; f < 5; ++f) std::getline(row, field, ',');
    censored += (field == "1");
  }
  CHECK(censored > 0);  // walks of length 15 land beyond distance 2 routinely
  bool found = false;
  for (const auto& v : res.verdicts)
    if (v == "censored_total = " + std::to_string(censored)) found = true;
  CHECK(found);
  CHECK(res.exit_code == 4);

  c.censor_threshold = c.trials;
  c.out = tmp.str("run2");
  CHECK(run_experiment(c).exit_code == 0);
}

TEST_CASE("return-prob run writes rho rows", "[experiment]") {
  TempDir tmp("qcg_return_tmp");
  ExperimentConfig c;
  c.kind = "return-prob";
  c.backend = "permutation";
  c.perm_size = 3;
  c.k_list = {1, 2};
  c.trials = 100;
  c.seed = 11;
  c.out = tmp.str("run");

  const RunResult res = run_experiment(c);
  CHECK(res.exit_code == 0);
  REQUIRE(res.verdicts.size() == 1);
  CHECK(res.verdicts[0] == "rho_within_unit_interval: PASS");

  const auto csv_lines = lines_of(read_file_text(res.csv_path));
  REQUIRE(csv_lines.size() == 2 + 1 + 2);
  CHECK(csv_lines[2] == "backend,k,trials,returns,rho_estimate,rho_is_upper_bound,seed");
  CHECK(std::regex_match(
      csv_lines[3], std::regex(R"(permutation3,1,100,\d+,[0-9.]+,0,11)")));

  const nlohmann::json summary = nlohmann::json::parse(read_file_text(res.json_path));
  REQUIRE(summary.at("estimates").size() == 2);
  for (const auto& row : summary.at("estimates")) {
    CHECK(row.at("rho_estimate").get<double>() > 0.0);
    CHECK(row.at("rho_estimate").get<double>() <= 1.0);
    CHECK(row.contains("rho_is_upper_bound"));
    CHECK(row.at("trials") == 100);
  }
}

TEST_CASE("runs are byte-stable across thread counts", "[experiment]") {
  TempDir tmp("qcg_threads_tmp");
  ExperimentConfig c;
  c.kind = "walk-complexity";
  c.backend = "clifford-t";
  c.k_list = {2, 4};
  c.trials = 6;
  c.radius_cap = 4;
  c.seed = 606;
  c.threads = 1;
  c.out = tmp.str("t1");
  const RunResult r1 = run_experiment(c);
  c.threads = 4;
  c.out = tmp.str("t4");
  const RunResult r4 = run_experiment(c);
  CHECK(drop_timestamp(read_file_text(r1.csv_path)) ==
        drop_timestamp(read_file_text(r4.csv_path)));
  CHECK(read_file_text(r1.json_path) == read_file_text(r4.json_path));
  CHECK(drop_timestamp(read_file_text(r1.verdict_path)) ==
        drop_timestamp(read_file_text(r4.verdict_path)));
}

TEST_CASE("run_experiment rejects invalid configs", "[experiment]") {
  ExperimentConfig c;
  c.kind = "walk-complexity";
  c.backend = "nope";
  c.k_list = {1};
  CHECK_THROWS_AS(run_experiment(c), std::invalid_argument);
}
