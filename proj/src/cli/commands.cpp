#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "lmgd/analysis.hpp"
#include "lmgd/cli.hpp"

#ifndef LMGD_VERSION
#define LMGD_VERSION "0.0.0"
#endif

namespace lmgd::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OutputFile {
  std::string name;
  std::size_t rows;
};

struct RunContext {
  std::string subcommand;
  json parameters = json::object();
  std::vector<OutputFile> outputs;
  std::vector<std::string> notes;
};

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw UsageError("--format must be csv or json");
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_manifest(const fs::path& dir, const RunContext& ctx) {
  json m;
  m["tool_version"] = LMGD_VERSION;
  m["subcommand"] = ctx.subcommand;
  m["parameters"] = ctx.parameters;
  m["timestamp"] = utc_timestamp();
  json outs = json::array();
  for (const auto& o : ctx.outputs) outs.push_back({{"file", o.name}, {"rows", o.rows}});
  m["outputs"] = outs;
  m["notes"] = ctx.notes;
  std::ofstream os(dir / "manifest.json", std::ios::binary);
  os << m.dump(1) << '\n';
}

void save(RunContext& ctx, const Table& t, const fs::path& dir, const std::string& stem, Format fmt) {
  ctx.outputs.push_back({t.save(dir, stem, fmt), t.size()});
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

Table fixed_point_table(const std::vector<FixedPoint>& fps) {
  Table t({"z", "phi", "energy", "classification", "branch_sign"});
  for (const auto& f : fps)
    t.add_row({f.z, f.phi, f.energy, std::string(to_string(f.stability)), std::string(to_string(f.branch))});
  return t;
}

std::vector<double> axis_values(const std::vector<double>& explicit_values, double from, double to,
                                std::size_t steps, const char* name) {
  if (!explicit_values.empty()) return explicit_values;
  if (steps < 1 || !std::isfinite(from) || !std::isfinite(to))
    throw UsageError(std::string("invalid range for ") + name);
  std::vector<double> v(steps);
  for (std::size_t i = 0; i < steps; ++i)
    v[i] = steps == 1 ? from : from + (to - from) * static_cast<double>(i) / static_cast<double>(steps - 1);
  return v;
}

struct ModelFlags {
  double delta = 0.0;
  double lambda_ratio = 0.0;
  double k = 0.0;

  void add(CLI::App* app, bool with_k = true) {
    app->add_option("--delta", delta, "dimensionless detuning (omega - omega_f) / lambda")->required();
    app->add_option("--lambda-ratio", lambda_ratio, "couplings ratio eta / lambda")->required();
    if (with_k) app->add_option("--k", k, "excitation ratio 2N / N_q")->required();
  }
  ModelParams params() const { return ModelParams{delta, lambda_ratio, k}; }
  void record(json& j) const {
    j["delta"] = delta;
    j["lambda_ratio"] = lambda_ratio;
    j["k"] = k;
  }
};

struct CommonFlags {
  std::string out = ".";
  std::string format = "csv";
  void add(CLI::App* app, const char* default_format = "csv") {
    format = default_format;
    app->add_option("--out", out, "output directory")->capture_default_str();
    app->add_option("--format", format, "csv or json")->capture_default_str();
  }
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mean-field fixed points, trajectories and bifurcations of a two-species "
               "condensate driven by a quantized field.\n"
               "Parameters: --delta = (omega - omega_f)/lambda, --lambda-ratio = eta/lambda, "
               "--k = 2N/N_q.",
               "lmgd"};
  app.set_version_flag("--version", LMGD_VERSION);
  app.require_subcommand(1);

  RunContext ctx;
  std::size_t samples = 100000;

  // fixed-points
  ModelFlags fp_model;
  CommonFlags fp_common;
  auto* fp_cmd = app.add_subcommand("fixed-points", "stationary states on the phi = 0 and phi = pi lines");
  fp_model.add(fp_cmd);
  fp_common.add(fp_cmd);
  fp_cmd->add_option("--samples", samples, "sign-scan samples per phase line")->capture_default_str();

  // critical
  double crit_lambda = 0.0;
  CommonFlags crit_common;
  auto* crit_cmd = app.add_subcommand("critical", "root of the critical cubic and the k_c window (delta = 0)");
  crit_cmd->add_option("--lambda-ratio", crit_lambda, "couplings ratio eta / lambda")->required();
  crit_common.add(crit_cmd);

  // bounds
  ModelFlags bounds_model;
  CommonFlags bounds_common;
  auto* bounds_cmd = app.add_subcommand("bounds", "edges z_- and z_+ of the band without real k");
  bounds_model.add(bounds_cmd, false);
  bounds_common.add(bounds_cmd);

  // trajectory
  ModelFlags traj_model;
  CommonFlags traj_common;
  double z0 = 0.0, phi0 = 0.0;
  IntegratorConfig icfg;
  icfg.output_stride = 0.01;
  auto* traj_cmd = app.add_subcommand("trajectory", "integrate the mean-field equations of motion");
  traj_model.add(traj_cmd);
  traj_common.add(traj_cmd);
  traj_cmd->add_option("--z0", z0, "initial population difference")->required();
  traj_cmd->add_option("--phi0", phi0, "initial phase")->capture_default_str();
  traj_cmd->add_option("--tau-max", icfg.tau_max, "final dimensionless time lambda t")->capture_default_str();
  traj_cmd->add_option("--abs-tol", icfg.abs_tol)->capture_default_str();
  traj_cmd->add_option("--rel-tol", icfg.rel_tol)->capture_default_str();
  traj_cmd->add_option("--stride", icfg.output_stride, "sampling interval in tau (0: every step)")
      ->capture_default_str();
  traj_cmd->add_option("--boundary-margin", icfg.boundary_margin)->capture_default_str();

  // portrait
  ModelFlags por_model;
  CommonFlags por_common;
  std::size_t survey_points = 41, grid_n = 401;
  double survey_tau = 100.0;
  auto* por_cmd = app.add_subcommand("portrait", "fixed points, trajectory survey, separatrix and landscape");
  por_model.add(por_cmd);
  por_common.add(por_cmd);
  por_cmd->add_option("--survey-points", survey_points, "initial z values along phi = 0")->capture_default_str();
  por_cmd->add_option("--tau-max", survey_tau)->capture_default_str();
  por_cmd->add_option("--grid", grid_n, "landscape nodes per axis")->capture_default_str();

  // bifurcation
  ModelFlags bif_model;
  CommonFlags bif_common;
  std::string sweep_axis;
  double sweep_from = 0.0, sweep_to = 0.0;
  std::size_t sweep_steps = 0, bif_samples = 100000;
  auto* bif_cmd = app.add_subcommand("bifurcation", "fixed-point census along one parameter axis");
  bif_cmd->add_option("--delta", bif_model.delta)->capture_default_str();
  bif_cmd->add_option("--lambda-ratio", bif_model.lambda_ratio)->capture_default_str();
  bif_cmd->add_option("--k", bif_model.k)->capture_default_str();
  bif_common.add(bif_cmd);
  bif_cmd->add_option("--sweep", sweep_axis, "k, lambda-ratio or delta")->required();
  bif_cmd->add_option("--from", sweep_from)->required();
  bif_cmd->add_option("--to", sweep_to)->required();
  bif_cmd->add_option("--steps", sweep_steps)->required();
  bif_cmd->add_option("--samples", bif_samples, "sign-scan samples per phase line")->capture_default_str();

  // classify
  ModelFlags cls_model;
  CommonFlags cls_common;
  auto* cls_cmd = app.add_subcommand("classify", "Rabi / Josephson regime report");
  cls_model.add(cls_cmd);
  cls_common.add(cls_cmd, "json");

  // landscape
  ModelFlags land_model;
  CommonFlags land_common;
  std::size_t n_phi = 401, n_z = 401;
  auto* land_cmd = app.add_subcommand("landscape", "energy on the (phi, z) grid");
  land_model.add(land_cmd);
  land_common.add(land_cmd);
  land_cmd->add_option("--n-phi", n_phi)->capture_default_str();
  land_cmd->add_option("--n-z", n_z)->capture_default_str();

  // transition
  CommonFlags tr_common;
  double tr_delta = 0.0, l_from = 0.0, l_to = 0.0, k_from = 0.0, k_to = 0.0;
  std::size_t l_steps = 1, k_steps = 1;
  std::vector<double> l_values, k_values;
  auto* tr_cmd = app.add_subcommand("transition", "critical window versus fixed-point counts over (Lambda, k)");
  tr_common.add(tr_cmd);
  tr_cmd->add_option("--delta", tr_delta)->capture_default_str();
  tr_cmd->add_option("--lambda-from", l_from);
  tr_cmd->add_option("--lambda-to", l_to);
  tr_cmd->add_option("--lambda-steps", l_steps)->capture_default_str();
  tr_cmd->add_option("--lambda-values", l_values, "explicit Lambda list (overrides the range)")->delimiter(',');
  tr_cmd->add_option("--k-from", k_from);
  tr_cmd->add_option("--k-to", k_to);
  tr_cmd->add_option("--k-steps", k_steps)->capture_default_str();
  tr_cmd->add_option("--k-values", k_values, "explicit k list (overrides the range)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (fp_cmd->parsed()) {
      const Format fmt = parse_format(fp_common.format);
      if (samples < 2) throw UsageError("--samples must be >= 2");
      const fs::path dir = prepare_dir(fp_common.out);
      ctx.subcommand = "fixed-points";
      fp_model.record(ctx.parameters);
      ctx.parameters["samples"] = samples;
      const auto fps = find_fixed_points(fp_model.params(), ScanOptions{samples, Execution::parallel});
      save(ctx, fixed_point_table(fps), dir, "fixed_points", fmt);
      for (const auto& f : fps)
        if (f.near_boundary) ctx.notes.push_back("boundary root at z = " + format_double(f.z));
      write_manifest(dir, ctx);
    } else if (crit_cmd->parsed()) {
      const Format fmt = parse_format(crit_common.format);
      const fs::path dir = prepare_dir(crit_common.out);
      ctx.subcommand = "critical";
      ctx.parameters["lambda_ratio"] = crit_lambda;
      const CriticalParams c = critical_params(crit_lambda);
      const double nan = std::numeric_limits<double>::quiet_NaN();
      Table t({"lambda_ratio", "z_c", "k_c_minus", "k_c_plus"});
      t.add_row({c.lambda_ratio, c.z_c, c.k_c_minus.value_or(nan), c.k_c_plus.value_or(nan)});
      save(ctx, t, dir, "critical", fmt);
      if (!c.k_c_plus) ctx.notes.push_back("z_c > 1 (Lambda < 2): no critical window");
      write_manifest(dir, ctx);
    } else if (bounds_cmd->parsed()) {
      const Format fmt = parse_format(bounds_common.format);
      const ZBounds b = z_bounds(bounds_model.delta, bounds_model.lambda_ratio);
      if (b.kind == BandKind::none) {
        err << "no real bounds: delta * Lambda > 1\n";
        return 1;
      }
      const fs::path dir = prepare_dir(bounds_common.out);
      ctx.subcommand = "bounds";
      ctx.parameters["delta"] = bounds_model.delta;
      ctx.parameters["lambda_ratio"] = bounds_model.lambda_ratio;
      Table t({"z_minus", "z_plus"});
      t.add_row({b.z_minus, b.z_plus});
      save(ctx, t, dir, "bounds", fmt);
      if (b.kind == BandKind::one_sided) ctx.notes.push_back("Lambda = 0: real k only for z <= z_minus");
      write_manifest(dir, ctx);
    } else if (traj_cmd->parsed()) {
      const Format fmt = parse_format(traj_common.format);
      const fs::path dir = prepare_dir(traj_common.out);
      ctx.subcommand = "trajectory";
      traj_model.record(ctx.parameters);
      ctx.parameters["z0"] = z0;
      ctx.parameters["phi0"] = phi0;
      ctx.parameters["tau_max"] = icfg.tau_max;
      ctx.parameters["abs_tol"] = icfg.abs_tol;
      ctx.parameters["rel_tol"] = icfg.rel_tol;
      ctx.parameters["stride"] = icfg.output_stride;
      ctx.parameters["boundary_margin"] = icfg.boundary_margin;
      const Trajectory tr = integrate(traj_model.params(), PhasePoint{z0, phi0}, icfg);
      Table t({"tau", "z", "phi", "energy"});
      for (const auto& s : tr.samples) t.add_row({s.tau, s.z, s.phi, s.energy});
      save(ctx, t, dir, "trajectory", fmt);
      ctx.notes.push_back("termination: " + std::string(to_string(tr.termination)));
      ctx.notes.push_back("energy_drift: " + format_double(tr.energy_drift));
      write_manifest(dir, ctx);
    } else if (por_cmd->parsed()) {
      const Format fmt = parse_format(por_common.format);
      if (grid_n < 2) throw UsageError("--grid must be >= 2");
      const fs::path dir = prepare_dir((fs::path(por_common.out) / "portrait").string());
      ctx.subcommand = "portrait";
      por_model.record(ctx.parameters);
      ctx.parameters["survey_points"] = survey_points;
      ctx.parameters["tau_max"] = survey_tau;
      ctx.parameters["grid"] = grid_n;
      const ModelParams p = por_model.params();
      SurveySpec survey = default_survey(p, survey_points);
      survey.integrator.tau_max = survey_tau;
      PortraitOptions opts;
      opts.grid_phi = opts.grid_z = grid_n;
      const PortraitBundle b = portrait_bundle(p, survey, opts);

      save(ctx, fixed_point_table(b.fixed_points), dir, "fixed_points", fmt);
      Table index({"trajectory", "z0", "phi0", "highlighted", "termination", "phase_class", "energy_drift"});
      Table samples_t({"trajectory", "tau", "z", "phi", "energy"});
      for (std::size_t i = 0; i < b.trajectories.size(); ++i) {
        const auto& st = b.trajectories[i];
        const auto id = static_cast<long long>(i);
        index.add_row({id, st.start.z, st.start.phi, static_cast<long long>(st.highlighted),
                       std::string(to_string(st.trajectory.termination)),
                       std::string(to_string(st.phase_class)), st.trajectory.energy_drift});
        for (const auto& s : st.trajectory.samples) samples_t.add_row({id, s.tau, s.z, s.phi, s.energy});
      }
      save(ctx, index, dir, "trajectory_index", fmt);
      save(ctx, samples_t, dir, "trajectories", fmt);
      Table land({"phi", "z", "energy", "in_domain"});
      for (std::size_t i = 0; i < b.landscape.rows(); ++i)
        for (std::size_t j = 0; j < b.landscape.cols(); ++j) {
          const std::size_t idx = i * b.landscape.cols() + j;
          land.add_row({b.landscape.phi_axis[j], b.landscape.z_axis[i], b.landscape.values[idx],
                        static_cast<long long>(b.landscape.in_domain[idx])});
        }
      save(ctx, land, dir, "landscape", fmt);
      if (b.separatrix) {
        Table sep({"phi", "z", "energy"});
        for (const auto& x : b.separatrix_curve) sep.add_row({x.phi, x.z, b.separatrix->energy});
        save(ctx, sep, dir, "separatrix", fmt);
      }
      ctx.notes.insert(ctx.notes.end(), b.notes.begin(), b.notes.end());
      write_manifest(dir, ctx);
    } else if (bif_cmd->parsed()) {
      const Format fmt = parse_format(bif_common.format);
      const auto axis = parse_sweep_axis(sweep_axis);
      if (!axis) throw UsageError("--sweep must be k, lambda-ratio or delta");
      if (sweep_steps < 2) throw UsageError("--steps must be >= 2");
      if (!std::isfinite(sweep_from) || !std::isfinite(sweep_to)) throw UsageError("sweep range must be finite");
      if (bif_samples < 2) throw UsageError("--samples must be >= 2");
      const fs::path dir = prepare_dir(bif_common.out);
      ctx.subcommand = "bifurcation";
      bif_model.record(ctx.parameters);
      ctx.parameters["sweep"] = std::string(to_string(*axis));
      ctx.parameters["from"] = sweep_from;
      ctx.parameters["to"] = sweep_to;
      ctx.parameters["steps"] = sweep_steps;
      ctx.parameters["samples"] = bif_samples;
      const BranchTable bt = branch_sweep(bif_model.params(), *axis, sweep_from, sweep_to, sweep_steps,
                                          ScanOptions{bif_samples, Execution::parallel});
      const double nan = std::numeric_limits<double>::quiet_NaN();
      Table t({"sweep_value", "z", "phi", "classification", "error"});
      std::size_t failed = 0;
      for (const auto& row : bt.rows) {
        if (!row.error.empty()) {
          ++failed;
          t.add_row({row.value, nan, nan, std::string(), row.error});
          continue;
        }
        for (const auto& f : row.points)
          t.add_row({row.value, f.z, f.phi, std::string(to_string(f.stability)), std::string()});
      }
      if (failed == bt.rows.size()) {
        err << "every sweep point failed: " << bt.rows.front().error << '\n';
        return 1;
      }
      save(ctx, t, dir, "bifurcation", fmt);
      Table tr({"phi", "value_before", "value_after", "count_before", "count_after", "kind"});
      for (const auto& x : bt.transitions)
        tr.add_row({x.phi, x.value_before, x.value_after, static_cast<long long>(x.count_before),
                    static_cast<long long>(x.count_after),
                    std::string(x.kind == TransitionKind::fold ? "fold" : "edge")});
      save(ctx, tr, dir, "bifurcation_transitions", fmt);
      write_manifest(dir, ctx);
    } else if (cls_cmd->parsed()) {
      const Format fmt = parse_format(cls_common.format);
      const fs::path dir = prepare_dir(cls_common.out);
      ctx.subcommand = "classify";
      cls_model.record(ctx.parameters);
      const RegimeReport r = classify_regime(cls_model.params());
      const double nan = std::numeric_limits<double>::quiet_NaN();
      const double km = r.critical_window ? r.critical_window->k_minus : nan;
      const double kp = r.critical_window ? r.critical_window->k_plus : nan;
      if (fmt == Format::json) {
        json j;
        j["delta"] = r.params.delta;
        j["lambda_ratio"] = r.params.lambda_ratio;
        j["k"] = r.params.k;
        j["regime"] = std::string(to_string(r.regime));
        j["count_phi_zero"] = r.counts.phi_zero;
        j["count_phi_pi"] = r.counts.phi_pi;
        j["k_c_minus"] = number(km);
        j["k_c_plus"] = number(kp);
        json fps = json::array();
        for (const auto& f : r.fixed_points)
          fps.push_back({{"z", f.z}, {"phi", f.phi}, {"energy", f.energy},
                         {"classification", std::string(to_string(f.stability))},
                         {"label", std::string(oscillation_label(f))}});
        j["fixed_points"] = fps;
        j["notes"] = r.notes;
        std::ofstream os(dir / "regime.json", std::ios::binary);
        os << j.dump(1) << '\n';
        ctx.outputs.push_back({"regime.json", 1});
      } else {
        Table t({"delta", "lambda_ratio", "k", "regime", "count_phi_zero", "count_phi_pi", "k_c_minus",
                 "k_c_plus"});
        t.add_row({r.params.delta, r.params.lambda_ratio, r.params.k, std::string(to_string(r.regime)),
                   static_cast<long long>(r.counts.phi_zero), static_cast<long long>(r.counts.phi_pi), km, kp});
        save(ctx, t, dir, "regime", fmt);
        Table f({"z", "phi", "energy", "classification", "label"});
        for (const auto& fp : r.fixed_points)
          f.add_row({fp.z, fp.phi, fp.energy, std::string(to_string(fp.stability)),
                     std::string(oscillation_label(fp))});
        save(ctx, f, dir, "regime_fixed_points", fmt);
      }
      ctx.notes = r.notes;
      write_manifest(dir, ctx);
      out << to_string(r.regime) << '\n';
    } else if (land_cmd->parsed()) {
      const Format fmt = parse_format(land_common.format);
      if (n_phi < 2 || n_z < 2) throw UsageError("landscape grid must be at least 2x2");
      const fs::path dir = prepare_dir(land_common.out);
      ctx.subcommand = "landscape";
      land_model.record(ctx.parameters);
      ctx.parameters["n_phi"] = n_phi;
      ctx.parameters["n_z"] = n_z;
      const LandscapeGrid g = landscape(land_model.params(), n_phi, n_z);
      Table t({"phi", "z", "energy", "in_domain"});
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) {
          const std::size_t idx = i * g.cols() + j;
          t.add_row({g.phi_axis[j], g.z_axis[i], g.values[idx], static_cast<long long>(g.in_domain[idx])});
        }
      save(ctx, t, dir, "landscape", fmt);
      write_manifest(dir, ctx);
    } else if (tr_cmd->parsed()) {
      const Format fmt = parse_format(tr_common.format);
      const auto lambdas = axis_values(l_values, l_from, l_to, l_steps, "Lambda");
      const auto ks = axis_values(k_values, k_from, k_to, k_steps, "k");
      const fs::path dir = prepare_dir(tr_common.out);
      ctx.subcommand = "transition";
      ctx.parameters["delta"] = tr_delta;
      ctx.parameters["lambda_ratios"] = lambdas;
      ctx.parameters["ks"] = ks;
      const TransitionTable tt = transition_scan(lambdas, ks, tr_delta);
      const double nan = std::numeric_limits<double>::quiet_NaN();
      Table t({"lambda_ratio", "k", "z_c", "k_c_minus", "k_c_plus", "count_phi_zero", "count_phi_pi",
               "regime_by_count", "regime_by_window", "agree"});
      for (std::size_t idx = 0; idx < tt.rows.size(); ++idx) {
        const auto& r = tt.rows[idx];
        const auto& c = tt.critical[idx / ks.size()];
        t.add_row({r.lambda_ratio, r.k, c.z_c, c.k_c_minus.value_or(nan), c.k_c_plus.value_or(nan),
                   static_cast<long long>(r.counts.phi_zero), static_cast<long long>(r.counts.phi_pi),
                   std::string(to_string(r.by_count)),
                   r.by_window ? std::string(to_string(*r.by_window)) : std::string(),
                   static_cast<long long>(r.agree)});
      }
      save(ctx, t, dir, "transition", fmt);
      ctx.notes = tt.notes;
      write_manifest(dir, ctx);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace lmgd::cli
