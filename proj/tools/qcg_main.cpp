#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "qcg/experiment.hpp"

namespace {

struct CliOverrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
};

void add_common(CLI::App* sub, CliOverrides& ov) {
  sub->add_option("--config", ov.config_path, "experiment config JSON")->required();
  sub->add_option("--seed", ov.seed, "override the config seed");
  sub->add_option("--out", ov.out, "override the output directory");
  sub->add_option("--threads", ov.threads, "override the worker count");
}

int fail_config(const std::string& message) {
  nlohmann::json err;
  err["error"] = "config";
  err["detail"] = message;
  std::cerr << err.dump(2) << "\n";
  return 2;
}

int run_kind(const CliOverrides& ov, const std::string& kind) {
  qcg::ExperimentConfig cfg;
  try {
    cfg = qcg::load_config(ov.config_path);
  } catch (const std::exception& e) {
    return fail_config(e.what());
  }
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.out) cfg.out = *ov.out;
  if (ov.threads) cfg.threads = *ov.threads;
  if (cfg.kind != kind)
    return fail_config("config kind '" + cfg.kind + "' does not match subcommand '" + kind + "'");
  const auto findings = qcg::validate_config(cfg);
  if (!findings.empty()) {
    std::cerr << qcg::findings_to_json(findings).dump(2) << "\n";
    return 2;
  }
  try {
    const qcg::RunResult res = qcg::run_experiment(cfg);
    for (const auto& line : res.verdicts) std::cout << line << "\n";
    std::cout << "wrote " << res.csv_path << ", " << res.json_path << ", " << res.verdict_path
              << "\n";
    return res.exit_code;
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = "runtime";
    err["detail"] = e.what();
    std::cerr << err.dump(2) << "\n";
    return 1;
  }
}

int run_validate(const CliOverrides& ov) {
  qcg::ExperimentConfig cfg;
  try {
    cfg = qcg::load_config(ov.config_path);
  } catch (const std::exception& e) {
    return fail_config(e.what());
  }
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.out) cfg.out = *ov.out;
  if (ov.threads) cfg.threads = *ov.threads;
  const auto findings = qcg::validate_config(cfg);
  std::cout << qcg::findings_to_json(findings).dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"circuit dimension growth and group walk experiments"};
  app.require_subcommand(1);

  const std::vector<std::string> kinds = {"dimension-curve", "growth-report", "walk-complexity",
                                          "return-prob"};
  std::vector<CliOverrides> ovs(kinds.size());
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    CLI::App* sub = app.add_subcommand(kinds[i], "run a " + kinds[i] + " experiment");
    add_common(sub, ovs[i]);
  }
  CliOverrides validate_ov;
  CLI::App* validate_sub = app.add_subcommand("validate", "check a config and print findings");
  add_common(validate_sub, validate_ov);

  CLI11_PARSE(app, argc, argv);

  for (std::size_t i = 0; i < kinds.size(); ++i)
    if (app.got_subcommand(kinds[i])) return run_kind(ovs[i], kinds[i]);
  if (app.got_subcommand("validate")) return run_validate(validate_ov);
  return 2;
}
