#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "fns/config.hpp"
#include "fns/kernels.hpp"
#include "fns/mild.hpp"
#include "fns/operators.hpp"
#include "fns/presets.hpp"
#include "fns/sha256.hpp"
#include "fns/theorems.hpp"

namespace fns::cli {

// exit codes: 0 ok, 2 config error, 3 numerical failure, 4 I/O error
enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_numerical = 3, exit_io = 4 };

struct RunOptions {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> format;
  bool quiet = false;
  bool verify = false;
};

namespace detail {

struct ArtifactSink {
  std::filesystem::path dir;
  json manifest;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

  explicit ArtifactSink(const std::string& out_dir, const ExperimentConfig& cfg) : dir(out_dir) {
    std::filesystem::create_directories(dir);
    manifest["config"] = cfg.to_json();
    manifest["config_hash"] = Sha256::of(cfg.to_json().dump());
    manifest["format_version"] = 1;
    manifest["files"] = json::array();
    manifest["status"] = "incomplete";
  }

  void write(const std::string& name, const std::string& bytes, bool complete = true) {
    const auto path = dir / name;
    std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os.write(bytes.data(), std::streamsize(bytes.size()));
    if (!os) throw std::runtime_error("write failed: " + path.string());
    manifest["files"].push_back(json{{"path", name},
                                     {"bytes", bytes.size()},
                                     {"sha256", Sha256::of(bytes)},
                                     {"complete", complete}});
  }
  void write_json(const std::string& name, const json& doc) { write(name, doc.dump(2) + "\n"); }

  void mark_incomplete(const std::string& name) {
    for (auto& entry : manifest["files"])
      if (entry["path"] == name) entry["complete"] = false;
  }

  // the wall clock is the single volatile field; everything else is a pure
  // function of config + seed
  void finalize(const std::string& status) {
    manifest["status"] = status;
    manifest["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    const auto path = dir / "manifest.json";
    std::ofstream os(path, std::ios::trunc);
    os << manifest.dump(2) << "\n";
  }
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline mild::SolverConfig solver_config(const ExperimentConfig& cfg) {
  mild::SolverConfig sc;
  sc.alpha = cfg.alpha;
  sc.horizon = cfg.horizon;
  sc.time_points = cfg.time_points;
  sc.grid = cfg.grid();
  sc.dealias = cfg.dealias;
  sc.viscosity = cfg.viscosity;
  sc.tolerance = cfg.tolerance;
  sc.max_iterations = cfg.max_iterations;
  return sc;
}

inline mild::Forcing make_forcing(const ExperimentConfig& cfg) {
  if (cfg.forcing == "zero" || cfg.forcing_amplitude == 0.0) return mild::Forcing::zero();
  if (cfg.forcing == "velocity") {
    const Field f =
        make_preset("random_divfree", cfg.grid(), cfg.forcing_amplitude, cfg.seed + 7777u);
    return mild::Forcing::velocity(f);
  }
  // tensor_bump: a single-bump tensor with fixed entry weights
  const Field bump = make_preset("bump", cfg.grid(), 1.0);
  const int d = cfg.dimension;
  Field tensor(cfg.grid(), d * d);
  SplitMix64 rng(cfg.seed + 4242u);
  for (int c = 0; c < d * d; ++c) {
    const double w = cfg.forcing_amplitude * rng.symmetric();
    for (std::size_t i = 0; i < tensor.grid.site_count(); ++i)
      tensor.at(c, i) = w * bump.at(0, i);
  }
  return mild::Forcing::tensor(tensor);
}

inline json picard_report_json(const mild::PicardReport& rep) {
  return json{{"iterations", rep.iterations},
              {"converged", rep.converged},
              {"diverged", rep.diverged},
              {"preprojected", rep.preprojected},
              {"delta", rep.delta},
              {"final_norm", rep.final_norm},
              {"two_delta_ok", rep.two_delta_ok},
              {"c_bilinear", rep.c_bilinear},
              {"max_divergence_defect", rep.max_divergence_defect},
              {"increments", rep.increments},
              {"contraction_ratios", rep.ratios}};
}

inline void write_trajectory(ArtifactSink& sink, const std::string& subdir,
                             const mild::Trajectory& traj) {
  json tman;
  tman["times"] = traj.times;
  tman["files"] = json::array();
  tman["complete"] = false;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "%s/u_%06zu.fnsv", subdir.c_str(), i);
    const Field u = inverse_transform_lenient(traj.snaps[i]);
    sink.write(name, encode_field(u));
    tman["files"].push_back(name);
  }
  tman["complete"] = true;
  sink.write_json(subdir + "/trajectory.json", tman);
}

inline json sweep_row_json(const theorems::SweepRow& row) {
  return json{{"horizon", row.horizon},
              {"initial_ratio", row.initial_ratio},
              {"force_ratio", row.force_ratio},
              {"bilinear_ratio", row.bilinear_ratio},
              {"bilinear_growth", row.bilinear_growth},
              {"initial_constant", row.initial_constant},
              {"force_constant", row.force_constant},
              {"bilinear_constant", row.bilinear_constant}};
}

inline std::string sweep_csv(const theorems::PropReport& rep) {
  std::string csv =
      "horizon,initial_ratio,force_ratio,bilinear_ratio,bilinear_growth,initial_constant,"
      "force_constant,bilinear_constant\n";
  for (const auto& row : rep.rows) {
    csv += format_double(row.horizon) + "," + format_double(row.initial_ratio) + "," +
           format_double(row.force_ratio) + "," + format_double(row.bilinear_ratio) + "," +
           format_double(row.bilinear_growth) + "," + format_double(row.initial_constant) + "," +
           format_double(row.force_constant) + "," + format_double(row.bilinear_constant) + "\n";
  }
  return csv;
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

inline int run_norm(const ExperimentConfig& cfg, ArtifactSink& sink, bool quiet) {
  if (cfg.input.empty()) throw std::runtime_error("norm: data.input field file required");
  const Field f = read_field(cfg.input);
  const auto dom = varlp::SampleDomain::on_grid(f.grid);
  const auto p = cfg.space_exponent.instantiate(dom);
  json out;
  out["input"] = cfg.input;
  out["modular"] = varlp::modular(f, p);
  out["luxemburg"] = varlp::luxemburg_norm(f, p);
  if (cfg.frak_p) out["mixed"] = varlp::mixed_norm(f, p, *cfg.frak_p);
  sink.write_json("norm.json", out);
  if (!quiet) std::printf("%.17g\n", out["luxemburg"].get<double>());
  return exit_ok;
}

inline int run_kernel(const ExperimentConfig& cfg, ArtifactSink& sink, bool verify) {
  const auto radii = kernels::decay_radii(cfg.alpha, cfg.times);
  std::string csv = "alpha,t,r,g,grad_g,decay_ratio\n";
  for (double t : cfg.times) {
    const double scale = std::pow(t, 0.5 / cfg.alpha);
    for (double r : radii) {
      const double g = kernels::heat_kernel_radial(cfg.alpha, t, r);
      const double dg = kernels::grad_heat_kernel(cfg.alpha, t, r);
      const double ratio = std::abs(dg) * std::pow(scale + r, 4.0);
      csv += format_double(cfg.alpha) + "," + format_double(t) + "," + format_double(r) + "," +
             format_double(g) + "," + format_double(dg) + "," + format_double(ratio) + "\n";
    }
  }
  sink.write("kernel.csv", csv);
  if (verify) {
    const auto grad = kernels::verify_decay(kernels::DecayKernel::GradHeat, cfg.alpha, cfg.times,
                                            radii);
    const auto oseen = kernels::verify_decay(kernels::DecayKernel::Oseen, cfg.alpha, cfg.times,
                                             radii);
    auto decay_json = [](const kernels::DecayReport& rep) {
      return json{{"kernel", rep.kernel},      {"alpha", rep.alpha},
                  {"dim", rep.dim},            {"times", rep.times},
                  {"radii", rep.radii},        {"slice_sup", rep.slice_sup},
                  {"global_sup", rep.global_sup}, {"max_drift", rep.max_drift}};
    };
    sink.write_json("decay_report.json",
                    json{{"grad_heat", decay_json(grad)}, {"oseen", decay_json(oseen)}});
  }
  return exit_ok;
}

inline int run_operators_check(const ExperimentConfig& cfg, ArtifactSink& sink) {
  json reports = json::array();

  // maximal-function boundedness over the seeded ensemble
  {
    const GridSpec g(1, 1024, cfg.length);
    const auto dom = varlp::SampleDomain::on_grid(g);
    const auto p = cfg.space_exponent.instantiate(dom);
    double sup = 0.0, half_sup = 0.0;
    for (int s = 0; s < cfg.trials; ++s) {
      Field f(g, 1);
      SplitMix64 rng(cfg.seed + std::uint64_t(s));
      for (double& v : f.samples) v = rng.symmetric();
      const double ratio = ops::maximal_bound_check(f, p);
      sup = std::max(sup, ratio);
      if (s < cfg.trials / 2) half_sup = std::max(half_sup, ratio);
    }
    reports.push_back(json{{"operator", "maximal"},
                           {"exponent_preset", cfg.space_exponent.kind},
                           {"ensemble", cfg.trials},
                           {"seed", cfg.seed},
                           {"ratio_sup", sup},
                           {"drift", half_sup > 0.0 ? sup / half_sup : 0.0}});
  }

  // Riesz potential: direct vs FFT fast path agreement on bump data
  {
    const GridSpec g(2, 64, cfg.length);
    double worst = 0.0;
    for (int s = 0; s < cfg.trials; ++s) {
      Field f = make_preset("bump", g, 1.0);
      SplitMix64 rng(cfg.seed + 100u + std::uint64_t(s));
      const double a = 0.5 + rng.uniform();
      for (std::size_t i = 0; i < g.site_count(); ++i)
        f.at(0, i) *= 1.0 + 0.5 * std::sin(a * g.position(i)[0]);
      const Field direct = ops::riesz_potential_direct(f, cfg.beta);
      const Field fast = ops::riesz_potential_fft(f, cfg.beta);
      double diff = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < g.site_count(); ++i) {
        diff = std::max(diff, std::abs(direct.at(0, i) - fast.at(0, i)));
        scale = std::max(scale, std::abs(direct.at(0, i)));
      }
      worst = std::max(worst, scale > 0.0 ? diff / scale : 0.0);
    }
    reports.push_back(json{{"operator", "riesz_potential_two_routes"},
                           {"exponent_preset", "n/a"},
                           {"ensemble", cfg.trials},
                           {"seed", cfg.seed},
                           {"ratio_sup", worst},
                           {"drift", 0.0}});
  }

  // Leray projection: idempotence residual over the ensemble
  {
    const GridSpec g = cfg.grid();
    double worst = 0.0;
    for (int s = 0; s < cfg.trials; ++s) {
      Field f(g, g.dim);
      SplitMix64 rng(cfg.seed + 200u + std::uint64_t(s));
      for (double& v : f.samples) v = rng.symmetric();
      const SpectralField once = leray_project(forward_transform(f));
      SpectralField twice = leray_project(once);
      twice -= once;
      worst = std::max(worst, once.max_abs() > 0.0 ? twice.max_abs() / once.max_abs() : 0.0);
    }
    reports.push_back(json{{"operator", "leray_idempotence"},
                           {"exponent_preset", "n/a"},
                           {"ensemble", cfg.trials},
                           {"seed", cfg.seed},
                           {"ratio_sup", worst},
                           {"drift", 0.0}});
  }

  sink.write_json("operators_check.json", reports);
  return exit_ok;
}

inline int run_solve(const ExperimentConfig& cfg, ArtifactSink& sink) {
  const auto sc = solver_config(cfg);
  const Field u0 = make_preset(cfg.initial, sc.grid, cfg.amplitude, cfg.seed);
  try {
    const mild::Trajectory traj = mild::time_march(sc, u0, make_forcing(cfg));
    write_trajectory(sink, "trajectory", traj);
  } catch (const std::runtime_error&) {
    sink.mark_incomplete("trajectory/trajectory.json");
    throw;
  }
  return exit_ok;
}

inline int run_picard(const ExperimentConfig& cfg, ArtifactSink& sink, bool quiet) {
  const auto sc = solver_config(cfg);
  const Field u0 = make_preset(cfg.initial, sc.grid, cfg.amplitude, cfg.seed);
  const auto p_time =
      cfg.time_exponent.instantiate(varlp::SampleDomain::interval_nodes(sc.horizon,
                                                                        std::size_t(sc.time_points)));
  const mild::TrajectoryNorm norm = [&](const mild::Trajectory& tr) {
    return theorems::ET_norm(tr, p_time, cfg.q);
  };
  const auto res = mild::picard_iterate(sc, u0, make_forcing(cfg), norm);
  sink.write_json("picard_report.json", picard_report_json(res.report));
  if (!quiet)
    std::printf("picard: %s in %d iterations, delta=%.6g final=%.6g\n",
                res.report.converged ? "converged" : "not converged", res.report.iterations,
                res.report.delta, res.report.final_norm);
  if (!res.trajectory.has_value()) return exit_numerical;
  write_trajectory(sink, "trajectory", *res.trajectory);
  return exit_ok;
}

inline int run_theorem1(const ExperimentConfig& cfg, ArtifactSink& sink) {
  auto sc = solver_config(cfg);
  std::vector<double> horizons = cfg.horizons;
  if (horizons.empty()) horizons = {sc.horizon / 4.0, sc.horizon / 2.0, sc.horizon};
  sc.horizon = horizons.back();

  const auto p_time = cfg.time_exponent.instantiate(
      varlp::SampleDomain::interval_nodes(sc.horizon, std::size_t(sc.time_points)));
  const auto exps = theorems::check_thm1_exponents(cfg.alpha, cfg.q, p_time);

  json out;
  out["admissible"] = exps.admissible;
  out["margin"] = exps.margin;
  out["beta"] = exps.beta;
  out["q"] = cfg.q;
  out["force_hypothesis_note"] =
      "the force is measured in both L1_t(Lq_x) and Lp(.)_t(Lq_x); the verdict uses L1_t";
  out["dimension_note"] =
      "exponent arithmetic is three-dimensional; the experiment grid has dimension " +
      std::to_string(cfg.dimension);
  if (!exps.admissible) {
    sink.write_json("theorem1.json", out);
    return exit_ok;  // inadmissible is a verdict, not an error
  }

  const Field u0 = make_preset(cfg.initial, sc.grid, cfg.amplitude, cfg.seed);
  const auto forcing = make_forcing(cfg);
  const auto rep = theorems::verify_prop_thm1(sc, u0, forcing, p_time, cfg.q, horizons);
  const auto cb = mild::estimate_cb(sc, cfg.trials, cfg.seed, [&](const mild::Trajectory& tr) {
    return theorems::ET_norm(tr, p_time, cfg.q);
  });
  const double measured_c =
      std::max({rep.rows.empty() ? 0.0 : rep.rows.back().initial_constant,
                rep.rows.empty() ? 0.0 : rep.rows.back().force_constant, 1e-12});
  const auto verdict = theorems::smallness_verdict_local(
      rep.data_norm_initial + rep.data_norm_force, measured_c, cb.c_bilinear, p_time,
      cfg.horizon);

  out["slope_initial"] = rep.slope_initial;
  out["slope_force"] = rep.slope_force;
  out["slope_bilinear_growth"] = rep.slope_bilinear;
  out["force_norm_l1_t"] = rep.data_norm_force;
  out["force_norm_lp_t"] = rep.data_norm_force_lp;
  out["c_bilinear"] = cb.c_bilinear;
  out["smallness"] = json{{"small_enough", verdict.small_enough},
                          {"lhs", verdict.lhs},
                          {"threshold", verdict.threshold},
                          {"largest_horizon", verdict.largest_horizon}};
  out["rows"] = json::array();
  for (const auto& row : rep.rows) out["rows"].push_back(sweep_row_json(row));
  sink.write_json("theorem1.json", out);
  sink.write("theorem1_sweep.csv", sweep_csv(rep));
  return exit_ok;
}

inline int run_theorem2(const ExperimentConfig& cfg, ArtifactSink& sink) {
  auto sc = solver_config(cfg);
  std::vector<double> horizons = cfg.horizons;
  if (horizons.empty()) horizons = {sc.horizon / 4.0, sc.horizon / 2.0, sc.horizon};
  sc.horizon = horizons.back();

  const auto p_space = cfg.space_exponent.instantiate(varlp::SampleDomain::on_grid(sc.grid));
  const auto exps = theorems::check_thm2_exponents(cfg.alpha, p_space);

  const Field u0 = make_preset(cfg.initial, sc.grid, cfg.amplitude, cfg.seed);
  Field tensor(sc.grid, 1);  // placeholder treated as "no tensor force"
  if (cfg.forcing == "tensor_bump" && cfg.forcing_amplitude != 0.0) {
    const auto forcing = make_forcing(cfg);
    tensor = inverse_transform_lenient(forcing.data.front());
  }
  const auto rep = theorems::verify_prop_thm2(sc, u0, tensor, p_space, horizons);
  const auto cb = mild::estimate_cb(sc, cfg.trials, cfg.seed, [&](const mild::Trajectory& tr) {
    return theorems::E_script_norm(tr, p_space, cfg.alpha);
  });
  const double measured_c = std::max(
      {rep.rows.empty() ? 0.0 : rep.rows.back().initial_constant,
       rep.rows.empty() ? 0.0 : rep.rows.back().force_constant, 1e-12});
  const auto verdict = theorems::smallness_verdict_global(
      rep.data_norm_initial + rep.data_norm_force, measured_c, cb.c_bilinear);

  json out;
  out["valid_exponents"] = exps.valid;
  out["companion_exponent"] = exps.companion;
  out["tensor_companion_exponent"] = exps.tensor_companion;
  out["slope_initial"] = rep.slope_initial;
  out["slope_force"] = rep.slope_force;
  out["slope_bilinear"] = rep.slope_bilinear;
  out["c_bilinear"] = cb.c_bilinear;
  out["smallness"] = json{{"small_enough", verdict.small_enough},
                          {"lhs", verdict.lhs},
                          {"threshold", verdict.threshold}};
  out["rows"] = json::array();
  for (const auto& row : rep.rows) out["rows"].push_back(sweep_row_json(row));
  sink.write_json("theorem2.json", out);
  sink.write("theorem2_sweep.csv", sweep_csv(rep));
  return exit_ok;
}

inline int run_report(const ExperimentConfig& cfg, ArtifactSink& sink,
                      const std::string& out_dir) {
  const std::filesystem::path dir(out_dir);
  const auto manifest_path = dir / "manifest.json";
  std::ifstream is(manifest_path);
  if (!is) throw std::runtime_error("report: no manifest at " + manifest_path.string());
  json manifest = json::parse(is);
  json out;
  out["checked_manifest"] = manifest_path.string();
  out["status"] = manifest.value("status", "unknown");
  out["files_listed"] = manifest["files"].size();
  json verified = json::array();
  bool all_ok = true;
  for (const auto& entry : manifest["files"]) {
    const auto path = dir / entry["path"].get<std::string>();
    std::ifstream fs(path, std::ios::binary);
    bool ok = false;
    if (fs) {
      std::string bytes((std::istreambuf_iterator<char>(fs)), std::istreambuf_iterator<char>());
      ok = Sha256::of(bytes) == entry["sha256"].get<std::string>() &&
           entry.value("complete", true);
    }
    all_ok = all_ok && ok;
    verified.push_back(json{{"path", entry["path"]}, {"ok", ok}});
  }
  out["all_ok"] = all_ok;
  out["files"] = verified;
  sink.write_json("report.json", out);
  (void)cfg;
  return all_ok ? exit_ok : exit_io;
}

}  // namespace detail

// Dispatch a subcommand. The manifest is written in every case, including
// failures, with the failure recorded.
inline int run(const std::string& subcommand, ExperimentConfig cfg, const RunOptions& opt = {}) {
  if (opt.out_dir) cfg.output_dir = *opt.out_dir;
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.format) cfg.format = *opt.format;
  if (opt.quiet) cfg.quiet = true;
  if (opt.verify) cfg.verify = true;

  detail::ArtifactSink sink(cfg.output_dir, cfg);
  int code = exit_ok;
  std::string status = "ok";
  try {
    if (subcommand == "norm") {
      code = detail::run_norm(cfg, sink, cfg.quiet);
    } else if (subcommand == "kernel") {
      code = detail::run_kernel(cfg, sink, cfg.verify);
    } else if (subcommand == "operators-check") {
      code = detail::run_operators_check(cfg, sink);
    } else if (subcommand == "solve") {
      code = detail::run_solve(cfg, sink);
    } else if (subcommand == "picard") {
      code = detail::run_picard(cfg, sink, cfg.quiet);
    } else if (subcommand == "theorem1") {
      code = detail::run_theorem1(cfg, sink);
    } else if (subcommand == "theorem2") {
      code = detail::run_theorem2(cfg, sink);
    } else if (subcommand == "report") {
      code = detail::run_report(cfg, sink, cfg.output_dir);
    } else {
      sink.finalize("unknown subcommand");
      return exit_config;
    }
  } catch (const std::runtime_error& e) {
    status = std::string("numerical or I/O failure: ") + e.what();
    sink.manifest["failure"] = e.what();
    sink.finalize(status);
    const std::string what = e.what();
    return what.find("cannot open") != std::string::npos ||
                   what.find("write failed") != std::string::npos ||
                   what.find("field file") != std::string::npos ||
                   what.find("no manifest") != std::string::npos
               ? exit_io
               : exit_numerical;
  } catch (const std::exception& e) {
    sink.manifest["failure"] = e.what();
    sink.finalize(std::string("failure: ") + e.what());
    return exit_numerical;
  }
  if (code != exit_ok) status = "failed";
  sink.finalize(status);
  return code;
}

}  // namespace fns::cli
