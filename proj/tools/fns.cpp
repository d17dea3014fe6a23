#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "fns/run.hpp"

namespace {

struct Common {
  std::string config_path;
  std::string out_dir;
  std::string format;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool quiet = false;
  bool verify = false;
};

void add_common(CLI::App* cmd, Common& common, bool config_required = true) {
  auto* c = cmd->add_option("--config", common.config_path, "experiment config (JSON)");
  if (config_required) c->required();
  cmd->add_option("--out-dir", common.out_dir, "output directory (overrides config)");
  cmd->add_option("--format", common.format, "csv or json (overrides config)")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", common.seed, "seed override")->each([&common](const std::string&) {
    common.seed_set = true;
  });
  cmd->add_flag("--quiet", common.quiet, "suppress console output");
}

int dispatch(const std::string& name, const Common& common) {
  fns::cli::ExperimentConfig cfg;
  if (!common.config_path.empty()) {
    const auto parsed = fns::cli::parse_config(common.config_path);
    if (!parsed.ok()) {
      for (const auto& err : parsed.errors) std::fprintf(stderr, "error: %s\n", err.c_str());
      return fns::cli::exit_config;
    }
    cfg = *parsed.config;
  }
  fns::cli::RunOptions opt;
  if (!common.out_dir.empty()) opt.out_dir = common.out_dir;
  if (!common.format.empty()) opt.format = common.format;
  if (common.seed_set) opt.seed = common.seed;
  opt.quiet = common.quiet;
  opt.verify = common.verify;
  return fns::cli::run(name, cfg, opt);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "fractional Navier-Stokes mild-solution toolbox: spectral solver, "
      "variable-exponent norms, kernel and operator diagnostics"};
  app.require_subcommand(1);

  Common common;
  const char* names[] = {"norm",   "kernel",   "operators-check", "solve",
                         "picard", "theorem1", "theorem2",        "report"};
  const char* descs[] = {
      "variable-exponent norms of a stored field",
      "fractional heat kernel table (CSV); --verify adds decay reports",
      "operator boundedness and invariant ratios (JSON)",
      "time-marching integrator; writes a trajectory directory",
      "trajectory fixed-point solver; writes trajectory + report",
      "local-statement exponent check, horizon sweep and smallness verdict",
      "global-statement horizon sweep and smallness verdict",
      "verify checksums of a finished output directory"};
  for (int i = 0; i < 8; ++i) {
    auto* cmd = app.add_subcommand(names[i], descs[i]);
    add_common(cmd, common, std::string(names[i]) != "report");
    if (std::string(names[i]) == "kernel")
      cmd->add_flag("--verify", common.verify, "emit decay verification reports");
    const std::string sub = names[i];
    cmd->callback([&common, sub] { std::exit(dispatch(sub, common)); });
  }

  CLI11_PARSE(app, argc, argv);
  return 0;
}
