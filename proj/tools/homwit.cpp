// homwit: overlap-witness toolkit.
//
// Subcommands:
//   witness    evaluate coherence/dimension witnesses for a measured triple
//   simulate   run the three-photon interference pipeline end to end
//   surface    sweep witness values over preparation grids
//   reproduce  recompute bundled published values and compare
//
// Exit codes: 0 success, 1 computation/stage failure or reference mismatch,
// 2 usage or configuration error. Failures emit a JSON object on stderr.

#include "homwit/config.hpp"
#include "homwit/errors.hpp"
#include "homwit/estimation.hpp"
#include "homwit/geometry.hpp"
#include "homwit/interference.hpp"
#include "homwit/io.hpp"
#include "homwit/pipeline.hpp"
#include "homwit/reference.hpp"
#include "homwit/rng.hpp"
#include "homwit/statemodel.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace {

using homwit::OverlapTriple;
using ordered_json = nlohmann::ordered_json;

void emit_error(const std::string& type, const std::string& message,
                const std::string& stage = "") {
  ordered_json err;
  err["error"]["type"] = type;
  if (!stage.empty()) err["error"]["stage"] = stage;
  err["error"]["message"] = message;
  std::cerr << err.dump(2) << "\n";
}

ordered_json triple_json(const OverlapTriple& t) {
  return ordered_json{{"ab", t.ab}, {"bc", t.bc}, {"ac", t.ac}};
}

ordered_json report_json(const homwit::geometry::WitnessReport& rep,
                         std::optional<double> wc_sigma, std::optional<double> wd_sigma) {
  ordered_json j;
  j["triple"] = triple_json(rep.triple);
  j["membership"] = {{"classical", rep.in_classical},
                     {"quantum", rep.in_quantum},
                     {"qubit", rep.in_qubit},
                     {"unphysical", rep.unphysical}};
  j["coherence"]["witness"] = rep.wc;
  j["coherence"]["face_slacks"] = rep.slacks;
  if (wc_sigma) j["coherence"]["significance"] = *wc_sigma;
  j["dimension"]["witness"] = rep.wd;
  j["dimension"]["nearest_qubit"] = triple_json(rep.nearest_qubit);
  if (wd_sigma) j["dimension"]["significance"] = *wd_sigma;
  return j;
}

std::string fmt(double x) { return homwit::io::format_double(x); }

void print_report_text(const homwit::geometry::WitnessReport& rep,
                       std::optional<double> wc_sigma, std::optional<double> wd_sigma) {
  const auto inout = [](bool in) { return in ? "inside" : "outside"; };
  std::cout << "triple            (" << fmt(rep.triple.ab) << ", " << fmt(rep.triple.bc) << ", "
            << fmt(rep.triple.ac) << ")\n";
  std::cout << "classical body    " << inout(rep.in_classical) << "\n";
  std::cout << "quantum body      " << inout(rep.in_quantum)
            << (rep.unphysical ? "  (no quantum states produce this triple)" : "") << "\n";
  std::cout << "qubit body        " << inout(rep.in_qubit) << "\n";
  std::cout << "coherence witness " << fmt(rep.wc);
  if (wc_sigma) std::cout << "  (" << fmt(*wc_sigma) << " sigma)";
  std::cout << "\n";
  std::cout << "dimension witness " << fmt(rep.wd);
  if (wd_sigma) std::cout << "  (" << fmt(*wd_sigma) << " sigma)";
  std::cout << "\n";
  if (rep.wd > 0.0) {
    std::cout << "nearest qubit     (" << fmt(rep.nearest_qubit.ab) << ", "
              << fmt(rep.nearest_qubit.bc) << ", " << fmt(rep.nearest_qubit.ac) << ")\n";
  }
}

int run_witness(const std::vector<double>& triple, const std::vector<double>& sigma,
                int resamples, std::uint64_t seed, int multistarts, const std::string& format,
                const std::string& out_path) {
  const OverlapTriple t(triple[0], triple[1], triple[2]);

  homwit::geometry::ProjectionOptions proj;
  proj.multistarts = multistarts;
  const auto rep = homwit::geometry::witness_report(t, proj);

  std::optional<double> wc_sigma, wd_sigma;
  if (!sigma.empty()) {
    std::array<double, 3> s{sigma[0], sigma[1], sigma[2]};
    homwit::geometry::SigmaOptions opts;
    opts.resamples = resamples;
    opts.seed = seed;
    opts.projection = proj;
    const auto res = homwit::pipeline::evaluate_witness(t, s, opts);
    wc_sigma = res.coherence_sigma;
    wd_sigma = res.dimension_sigma;
  }

  const ordered_json j = report_json(rep, wc_sigma, wd_sigma);
  if (format == "json") {
    std::cout << j.dump(2) << "\n";
  } else {
    print_report_text(rep, wc_sigma, wd_sigma);
  }
  if (!out_path.empty()) homwit::io::write_file(out_path, j.dump(2) + "\n");
  return 0;
}

int run_simulate(const std::string& config_path, std::optional<std::uint64_t> seed_override,
                 const std::string& out_dir, const std::string& format) {
  homwit::config::RunConfig cfg = homwit::config::load_run_config(config_path);
  if (seed_override) cfg.experiment.seed = *seed_override;

  const auto result = homwit::pipeline::simulate(cfg);

  namespace fs = std::filesystem;
  const fs::path out(out_dir);

  ordered_json dist_meta;
  dist_meta["seed"] = cfg.experiment.seed;
  dist_meta["predicted_triple"] = triple_json(result.predicted);
  if (format == "json") {
    homwit::io::write_file((out / "distribution.json").string(),
                           homwit::io::distribution_json(result.ideal, dist_meta));
  } else {
    homwit::io::write_file((out / "distribution.csv").string(),
                           homwit::io::distribution_csv(result.ideal));
  }
  homwit::io::write_file((out / "counts.csv").string(),
                         homwit::io::counts_csv(result.detected, result.ideal.patterns()));

  ordered_json est_meta;
  est_meta["seed"] = cfg.experiment.seed;
  est_meta["events_generated"] = result.generated_events;
  est_meta["events_detected"] = result.surviving_events;
  est_meta["anrd"] = {{"enabled", cfg.anrd.enabled},
                      {"survival", cfg.anrd.survival},
                      {"corrected", cfg.anrd.corrected}};
  homwit::io::write_file((out / "estimate.json").string(),
                         homwit::io::estimate_json(result.estimate, est_meta));

  ordered_json summary;
  summary["config"] = {{"events", cfg.experiment.events},
                       {"seed", cfg.experiment.seed},
                       {"efficiency", cfg.experiment.efficiency},
                       {"bootstrap_resamples", cfg.bootstrap_resamples}};
  summary["predicted"] = triple_json(result.predicted);
  summary["estimated"] = {{"point", triple_json(result.estimate.point)},
                          {"sigma", result.estimate.sigma},
                          {"clamped", result.estimate.clamped}};
  summary["witness"] = report_json(result.report, result.coherence_sigma, result.dimension_sigma);
  summary["events"] = {{"generated", result.generated_events},
                       {"detected", result.surviving_events}};
  summary["tvd"] = {{"raw", result.tvd_raw}, {"corrected", result.tvd_corrected}};
  homwit::io::write_file((out / "summary.json").string(), summary.dump(2) + "\n");

  std::cout << "predicted  (" << fmt(result.predicted.ab) << ", " << fmt(result.predicted.bc)
            << ", " << fmt(result.predicted.ac) << ")\n";
  std::cout << "estimated  (" << fmt(result.estimate.point.ab) << ", "
            << fmt(result.estimate.point.bc) << ", " << fmt(result.estimate.point.ac) << ")"
            << "  +- (" << fmt(result.estimate.sigma[0]) << ", " << fmt(result.estimate.sigma[1])
            << ", " << fmt(result.estimate.sigma[2]) << ")\n";
  std::cout << "events     " << result.surviving_events << " detected of "
            << result.generated_events << " generated\n";
  std::cout << "W_c        " << fmt(result.report.wc) << "  (" << fmt(result.coherence_sigma)
            << " sigma)\n";
  std::cout << "W_d        " << fmt(result.report.wd) << "  (" << fmt(result.dimension_sigma)
            << " sigma)\n";
  std::cout << "TVD        raw " << fmt(result.tvd_raw) << ", corrected "
            << fmt(result.tvd_corrected) << "\n";
  std::cout << "artifacts  " << out.string() << "\n";
  return 0;
}

struct MaxCell {
  double value = -std::numeric_limits<double>::infinity();
  double row = 0.0;
  double col = 0.0;
};

MaxCell grid_max(const homwit::statemodel::SurfaceGrid& grid) {
  MaxCell best;
  for (std::size_t i = 0; i < grid.rows.size(); ++i) {
    for (std::size_t j = 0; j < grid.cols.size(); ++j) {
      if (!grid.failed.empty() && grid.failed[i * grid.cols.size() + j]) continue;
      const double v = grid.at(i, j);
      if (v > best.value) best = {v, grid.rows[i], grid.cols[j]};
    }
  }
  return best;
}

int run_surface(const std::string& kind, const std::string& config_path,
                const std::string& out_dir, int multistarts) {
  homwit::config::RunConfig cfg;  // defaults
  if (!config_path.empty()) cfg = homwit::config::load_run_config(config_path);

  namespace fs = std::filesystem;
  const fs::path out(out_dir);
  constexpr double kDegToRad = std::numbers::pi / 180.0;

  if (kind == "wc") {
    const auto beta_deg = homwit::statemodel::linspace(cfg.surface.beta_min_deg,
                                                       cfg.surface.beta_max_deg,
                                                       cfg.surface.beta_steps);
    const auto gamma_deg = homwit::statemodel::linspace(cfg.surface.gamma_min_deg,
                                                        cfg.surface.gamma_max_deg,
                                                        cfg.surface.gamma_steps);
    std::vector<double> beta(beta_deg.size()), gamma(gamma_deg.size());
    std::transform(beta_deg.begin(), beta_deg.end(), beta.begin(),
                   [&](double d) { return d * kDegToRad; });
    std::transform(gamma_deg.begin(), gamma_deg.end(), gamma.begin(),
                   [&](double d) { return d * kDegToRad; });

    auto surfaces = homwit::statemodel::wc_surface(beta, gamma, cfg.experiment.cal);
    // Axes are emitted in degrees to match the config units.
    surfaces.signed_value.rows = beta_deg;
    surfaces.signed_value.cols = gamma_deg;
    surfaces.magnitude.rows = beta_deg;
    surfaces.magnitude.cols = gamma_deg;

    homwit::io::write_file((out / "wc_signed.csv").string(),
                           homwit::io::surface_csv(surfaces.signed_value, "beta_deg", "gamma_deg"));
    homwit::io::write_file((out / "wc_magnitude.csv").string(),
                           homwit::io::surface_csv(surfaces.magnitude, "beta_deg", "gamma_deg"));

    const MaxCell best = grid_max(surfaces.signed_value);
    ordered_json meta;
    meta["kind"] = "coherence witness, signed and magnitude";
    meta["axes"] = {{"rows", "beta_deg"}, {"cols", "gamma_deg"}};
    meta["calibration"] = {{"v_ab", cfg.experiment.cal.ab.v},
                           {"v_bc", cfg.experiment.cal.bc.v},
                           {"v_ac", cfg.experiment.cal.ac.v}};
    meta["max"] = {{"value", best.value}, {"beta_deg", best.row}, {"gamma_deg", best.col}};
    homwit::io::write_file((out / "wc_surface.json").string(),
                           homwit::io::surface_sidecar_json(meta));
    std::cout << "max W_c " << fmt(best.value) << " at beta " << fmt(best.row) << " deg, gamma "
              << fmt(best.col) << " deg\n";
    std::cout << "artifacts  " << out.string() << "\n";
    return 0;
  }

  // wd: delay sweep with equal polarizations.
  const auto dx = homwit::statemodel::linspace(cfg.surface.dx_min_um, cfg.surface.dx_max_um,
                                               cfg.surface.dx_steps);
  homwit::geometry::ProjectionOptions proj;
  proj.multistarts = multistarts;
  const auto grid = homwit::statemodel::wd_surface(dx, dx, cfg.experiment.cal, proj);

  homwit::io::write_file((out / "wd.csv").string(),
                         homwit::io::surface_csv(grid, "dx1_um", "dx2_um"));
  const MaxCell best = grid_max(grid);
  const std::size_t failures =
      static_cast<std::size_t>(std::count(grid.failed.begin(), grid.failed.end(), 1));
  ordered_json meta;
  meta["kind"] = "dimension witness";
  meta["axes"] = {{"rows", "dx1_um"}, {"cols", "dx2_um"}};
  meta["calibration"] = {{"sigma_ab", cfg.experiment.cal.ab.sigma},
                         {"sigma_bc", cfg.experiment.cal.bc.sigma},
                         {"sigma_ac", cfg.experiment.cal.ac.sigma}};
  meta["max"] = {{"value", best.value}, {"dx1_um", best.row}, {"dx2_um", best.col}};
  meta["failed_cells"] = failures;
  homwit::io::write_file((out / "wd_surface.json").string(),
                         homwit::io::surface_sidecar_json(meta));
  std::cout << "max W_d " << fmt(best.value) << " at dx1 " << fmt(best.row) << " um, dx2 "
            << fmt(best.col) << " um";
  if (failures > 0) std::cout << "  (" << failures << " cells failed to project)";
  std::cout << "\n";
  std::cout << "artifacts  " << out.string() << "\n";
  return 0;
}

int run_reproduce(const std::string& table, std::optional<double> tol_override, int multistarts) {
  std::vector<homwit::reference::ComparisonRow> rows;
  if (table == "t1" || table == "all") {
    auto r = homwit::reference::reproduce_coherence_rows();
    rows.insert(rows.end(), r.begin(), r.end());
  }
  if (table == "t2" || table == "all") {
    homwit::geometry::ProjectionOptions proj;
    proj.multistarts = multistarts;
    auto r = homwit::reference::reproduce_dimension_row(proj);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  if (table == "t3" || table == "all") {
    auto r = homwit::reference::reproduce_dip_roundtrip();
    rows.insert(rows.end(), r.begin(), r.end());
  }

  if (tol_override) {
    for (auto& row : rows) {
      row.tolerance = *tol_override;
      row.pass = std::abs(row.computed - row.expected) <= row.tolerance;
    }
  }

  bool all_pass = true;
  for (const auto& row : rows) {
    std::cout << (row.pass ? "PASS" : "FAIL") << "  " << row.label << "  " << row.quantity
              << ": expected " << fmt(row.expected) << ", computed " << fmt(row.computed)
              << ", tolerance " << fmt(row.tolerance) << "\n";
    all_pass = all_pass && row.pass;
  }
  std::cout << (all_pass ? "all rows within tolerance" : "some rows out of tolerance") << "\n";
  if (!all_pass) {
    emit_error("reference_mismatch", "recomputed values differ from bundled reference");
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Overlap witnesses for basis-independent coherence and Hilbert-space dimension,\n"
               "with an end-to-end simulator of the three-photon interference experiment\n"
               "that measures them."};
  app.require_subcommand(1);

  // witness
  auto* witness = app.add_subcommand("witness", "Evaluate witnesses for an overlap triple");
  std::vector<double> w_triple;
  std::vector<double> w_sigma;
  int w_resamples = 10000;
  std::uint64_t w_seed = 0x5eed5eed5eed5eedull;
  int w_multistarts = 16;
  std::string w_format = "text";
  std::string w_out;
  witness->add_option("triple", w_triple, "Overlaps r_ab r_bc r_ac, each in [0,1]")
      ->expected(3)
      ->required();
  witness->add_option("--sigma", w_sigma, "1-sigma uncertainties for the three overlaps")
      ->expected(3);
  witness->add_option("--resamples", w_resamples, "Monte Carlo resamples for significance")
      ->check(CLI::PositiveNumber);
  witness->add_option("--seed", w_seed, "Resampling seed");
  witness->add_option("--multistarts", w_multistarts, "Projection multistart count")
      ->check(CLI::PositiveNumber);
  witness->add_option("--format", w_format, "Report format")
      ->check(CLI::IsMember({"text", "json"}));
  witness->add_option("--out", w_out, "Also write the JSON report to this file");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run the three-photon pipeline end to end");
  std::string s_config;
  std::string s_out = "out";
  std::string s_format = "csv";
  std::uint64_t s_seed = 0;
  bool s_seed_set = false;
  simulate->add_option("--config", s_config, "Run configuration JSON")
      ->required()
      ->check(CLI::ExistingFile);
  simulate->add_option("--out", s_out, "Artifact directory");
  simulate->add_option("--format", s_format, "Distribution artifact format")
      ->check(CLI::IsMember({"csv", "json"}));
  auto* s_seed_opt = simulate->add_option("--seed", s_seed, "Override the config seed");

  // surface
  auto* surface = app.add_subcommand("surface", "Sweep a witness over a preparation grid");
  std::string f_kind;
  std::string f_config;
  std::string f_out = "out";
  int f_multistarts = 16;
  surface->add_option("kind", f_kind, "wc: polarization-angle grid; wd: delay grid")
      ->required()
      ->check(CLI::IsMember({"wc", "wd"}));
  surface->add_option("--config", f_config, "Run configuration JSON (defaults if omitted)")
      ->check(CLI::ExistingFile);
  surface->add_option("--out", f_out, "Artifact directory");
  surface->add_option("--multistarts", f_multistarts, "Projection multistart count (wd)")
      ->check(CLI::PositiveNumber);

  // reproduce
  auto* reproduce = app.add_subcommand("reproduce", "Recompute bundled reference values");
  std::string r_table;
  double r_tol = 0.0;
  int r_multistarts = 16;
  reproduce
      ->add_option("table",
                   r_table,
                   "t1: coherence-witness rows; t2: dimension-witness row; t3: dip-fit "
                   "round-trip; all")
      ->required()
      ->check(CLI::IsMember({"t1", "t2", "t3", "all"}));
  auto* r_tol_opt = reproduce->add_option("--tol", r_tol, "Override the bundled tolerance")
                        ->check(CLI::PositiveNumber);
  reproduce->add_option("--multistarts", r_multistarts, "Projection multistart count (t2)")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::cerr << e.what() << "\n";
    emit_error("usage", e.what());
    return 2;
  }

  try {
    if (*witness) {
      return run_witness(w_triple, w_sigma, w_resamples, w_seed, w_multistarts, w_format, w_out);
    }
    if (*simulate) {
      s_seed_set = s_seed_opt->count() > 0;
      return run_simulate(s_config,
                          s_seed_set ? std::optional<std::uint64_t>(s_seed) : std::nullopt, s_out,
                          s_format);
    }
    if (*surface) {
      return run_surface(f_kind, f_config, f_out, f_multistarts);
    }
    if (*reproduce) {
      return run_reproduce(r_table,
                           r_tol_opt->count() > 0 ? std::optional<double>(r_tol) : std::nullopt,
                           r_multistarts);
    }
  } catch (const homwit::ConfigError& e) {
    emit_error("config", e.what());
    return 2;
  } catch (const homwit::StageError& e) {
    emit_error("stage", e.what(), e.stage());
    return 1;
  } catch (const std::invalid_argument& e) {
    emit_error("usage", e.what());
    return 2;
  } catch (const std::exception& e) {
    emit_error("runtime", e.what());
    return 1;
  }
  return 0;
}
