// Batch driver: idslab <subcommand> [--config path] [--out dir] [--jobs k] [--seed u64]

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

#include "idslab/acceptance.hpp"
#include "idslab/config.hpp"
#include "idslab/driver.hpp"

namespace {

int run_verify(const idslab::ExperimentConfig& cfg, const std::filesystem::path& out) {
  std::filesystem::create_directories(out);
  const auto results = idslab::acceptance::run_all(cfg, &std::cout);
  int failed = 0;
  for (const auto& r : results) failed += !r.passed;
  std::cout << "\n" << results.size() - failed << "/" << results.size() << " acceptance criteria pass\n";
  idslab::write_json(out / "acceptance.json", idslab::acceptance::to_json(results));
  idslab::write_manifest(out, "verify", cfg, {"acceptance.json"}, failed ? 1 : 0);
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Integrated density of states experiments for colored Schroedinger operators"};
  std::string sub;
  std::optional<std::string> config_path, out_dir;
  std::optional<unsigned> jobs;
  std::optional<std::uint64_t> seed;
  app.add_option("subcommand", sub, "patterns | ids | ssf | weyl | random | verify")
      ->required()
      ->check(CLI::IsMember({"patterns", "ids", "ssf", "weyl", "random", "verify"}));
  app.add_option("--config", config_path, "experiment config (JSON, comments allowed)");
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  app.add_option("--jobs", jobs, "parallel tasks")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "master seed (overrides the config)");
  CLI11_PARSE(app, argc, argv);

  idslab::ExperimentConfig cfg;
  try {
    cfg = config_path ? idslab::load_config(*config_path) : idslab::parse_config("{}");
  } catch (const std::exception& e) {
    std::cerr << (config_path ? *config_path : std::string("<defaults>")) << ": " << e.what() << "\n";
    return 2;
  }
  if (jobs) cfg.jobs = *jobs;
  if (seed) cfg.seed = *seed;
  const std::filesystem::path out = out_dir ? std::filesystem::path(*out_dir) : std::filesystem::path(cfg.output);

  try {
    if (sub == "verify") return run_verify(cfg, out);
    return idslab::run_data_subcommand(sub, cfg, out, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << sub << " failed: " << e.what() << "\n";
    return 4;
  }
}
