#include "lmgd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "lmgd/roots.hpp"

namespace lmgd {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

std::optional<CriticalWindow> resonant_window(const ModelParams& p) {
  if (p.delta != 0.0 || !(p.lambda_ratio > 0.0)) return std::nullopt;
  const CriticalParams c = critical_params(p.lambda_ratio);
  if (!c.k_c_minus || !c.k_c_plus) return std::nullopt;
  return CriticalWindow{*c.k_c_minus, *c.k_c_plus};
}

Regime regime_from_counts(const BranchCounts& c) {
  return std::max(c.phi_zero, c.phi_pi) >= 3 ? Regime::josephson_bistable : Regime::rabi_single;
}

BranchCounts counts_of(const std::vector<FixedPoint>& fps) {
  return BranchCounts{count_on_branch(fps, 0.0), count_on_branch(fps, kPi)};
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

}  // namespace

std::string_view to_string(Regime r) {
  return r == Regime::josephson_bistable ? "josephson_bistable" : "rabi_single";
}

std::string_view oscillation_label(const FixedPoint& fp) {
  if (fp.stability == Stability::saddle) return "separatrix";
  return fp.phi == 0.0 ? "pi" : "plasma";
}

RegimeReport classify_regime(const ModelParams& p, const ScanOptions& opts) {
  RegimeReport r;
  r.params = p;
  r.fixed_points = find_fixed_points(p, opts);
  r.counts = counts_of(r.fixed_points);
  r.regime = regime_from_counts(r.counts);
  r.critical_window = resonant_window(p);

  if (r.critical_window) {
    const bool inside = r.critical_window->contains(p.k);
    if (inside != (r.regime == Regime::josephson_bistable))
      r.notes.push_back("fixed-point count (" + std::string(to_string(r.regime)) +
                        ") disagrees with the critical window [" +
                        fmt_double(r.critical_window->k_minus) + ", " +
                        fmt_double(r.critical_window->k_plus) + "] at k = " + fmt_double(p.k));
  } else if (p.delta == 0.0 && p.lambda_ratio > 0.0) {
    r.notes.push_back("critical cubic root lies above z = 1 for Lambda < 2; no window");
  }
  for (const FixedPoint& fp : r.fixed_points)
    if (fp.near_boundary)
      r.notes.push_back("fixed point at z = " + fmt_double(fp.z) + ", phi = " + fmt_double(fp.phi) +
                        " lies within 1e-6 of a domain edge");
  return r;
}

std::optional<double> LandscapeGrid::at(std::size_t iz, std::size_t iphi) const {
  const std::size_t idx = iz * cols() + iphi;
  if (!in_domain[idx]) return std::nullopt;
  return values[idx];
}

std::optional<double> LandscapeGrid::interpolate(const PhasePoint& x) const {
  if (rows() < 2 || cols() < 2) return std::nullopt;
  const double phi = x.phi - kTwoPi * std::floor(x.phi / kTwoPi);
  const double dphi = (phi_axis.back() - phi_axis.front()) / static_cast<double>(cols() - 1);
  const double dz = (z_axis.back() - z_axis.front()) / static_cast<double>(rows() - 1);
  const double fj = (phi - phi_axis.front()) / dphi;
  const double fi = (x.z - z_axis.front()) / dz;
  if (fi < 0.0 || fi > static_cast<double>(rows() - 1)) return std::nullopt;
  const auto j = std::min(static_cast<std::size_t>(fj), cols() - 2);
  const auto i = std::min(static_cast<std::size_t>(fi), rows() - 2);
  const double tj = fj - static_cast<double>(j);
  const double ti = fi - static_cast<double>(i);
  const auto v00 = at(i, j), v01 = at(i, j + 1), v10 = at(i + 1, j), v11 = at(i + 1, j + 1);
  if (!v00 || !v01 || !v10 || !v11) return std::nullopt;
  return (1 - ti) * ((1 - tj) * *v00 + tj * *v01) + ti * ((1 - tj) * *v10 + tj * *v11);
}

LandscapeGrid landscape(const ModelParams& p, std::size_t n_phi, std::size_t n_z, Execution exec) {
  if (n_phi < 2 || n_z < 2) throw std::invalid_argument("landscape grid must be at least 2x2");
  LandscapeGrid g;
  g.phi_axis = linspace(0.0, kTwoPi, n_phi);
  g.z_axis = linspace(-1.0, 1.0, n_z);
  g.values.resize(n_phi * n_z);
  g.in_domain.resize(n_phi * n_z);
  energy_grid(p, g.phi_axis, g.z_axis, g.values, g.in_domain, exec);
  return g;
}

std::vector<GridExtremum> local_extrema(const LandscapeGrid& grid) {
  std::vector<GridExtremum> out;
  const std::size_t rows = grid.rows();
  const std::size_t period = grid.cols() - 1;  // last column repeats the first
  if (rows < 3 || period < 2) return out;
  for (std::size_t i = 1; i + 1 < rows; ++i) {
    // Rows next to an out-of-domain row sit on the z = k edge.
    if (!grid.in_domain[(i + 1) * grid.cols()]) continue;
    if (i + 2 < rows && !grid.in_domain[(i + 2) * grid.cols()]) continue;
    for (std::size_t j = 0; j < period; ++j) {
      const double v = grid.values[i * grid.cols() + j];
      bool ge = true, le = true, gt = false, lt = false;
      for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const std::size_t ni = i + static_cast<std::size_t>(di + 1) - 1;
          const std::size_t nj = (j + period + static_cast<std::size_t>(dj + 1) - 1) % period;
          const auto w = grid.at(ni, nj);
          if (!w) {
            ge = le = false;
            continue;
          }
          ge = ge && v >= *w;
          le = le && v <= *w;
          gt = gt || v > *w;
          lt = lt || v < *w;
        }
      }
      if ((ge && gt) || (le && lt))
        out.push_back({i, j, grid.z_axis[i], grid.phi_axis[j], v, ge && gt});
    }
  }
  return out;
}

std::vector<PhasePoint> level_set(const ModelParams& p, double energy, std::size_t n_phi,
                                  std::size_t n_z, Execution exec) {
  const double z_hi = upper_z(p);
  if (!(z_hi > -1.0) || n_phi == 0 || n_z < 2) return {};
  std::vector<double> z(n_z);
  midpoint_samples(-1.0, z_hi, z);
  std::vector<std::vector<PhasePoint>> columns(n_phi);
  for_each_index(n_phi, exec, [&](std::size_t j) {
    const double phi = kTwoPi * static_cast<double>(j) / static_cast<double>(n_phi);
    auto f = [&](double zz) { return hamiltonian(p, PhasePoint{zz, phi}) - energy; };
    double prev = f(z[0]);
    for (std::size_t i = 0; i + 1 < n_z; ++i) {
      const double next = f(z[i + 1]);
      if (prev == 0.0) columns[j].push_back({z[i], phi});
      else if (opposite_signs(prev, next)) columns[j].push_back({bisect(f, z[i], z[i + 1], prev), phi});
      prev = next;
    }
  });
  std::vector<PhasePoint> out;
  for (auto& c : columns) out.insert(out.end(), c.begin(), c.end());
  return out;
}

SurveySpec default_survey(const ModelParams& p, std::size_t points) {
  SurveySpec s;
  const double z_hi = upper_z(p);
  if (z_hi > -1.0 && points > 0) {
    s.z0.resize(points);
    const double n = static_cast<double>(points + 1);
    for (std::size_t i = 0; i < points; ++i)
      s.z0[i] = -1.0 + (z_hi + 1.0) * static_cast<double>(i + 1) / n;
  }
  s.highlighted = {0.9, 0.5, -0.5, -0.9};
  return s;
}

PortraitBundle portrait_bundle(const ModelParams& p, const SurveySpec& survey,
                               const PortraitOptions& opts) {
  PortraitBundle b;
  b.params = p;
  b.fixed_points = find_fixed_points(p, opts.scan);
  for (const FixedPoint& fp : b.fixed_points) {
    if (fp.stability != Stability::saddle) continue;
    if (!b.separatrix || std::abs(fp.residual) < std::abs(b.separatrix->saddle.residual))
      b.separatrix = Separatrix{fp.energy, fp};
  }
  if (b.separatrix)
    b.separatrix_curve = level_set(p, b.separatrix->energy, opts.level_set_phi, opts.level_set_z, opts.exec);
  b.landscape = landscape(p, opts.grid_phi, opts.grid_z, opts.exec);

  std::vector<std::pair<double, bool>> starts;
  auto accept_start = [&](double z0, bool highlight) {
    if (!strictly_admissible(p, PhasePoint{z0, survey.phi0}, survey.integrator.boundary_margin)) {
      b.notes.push_back("skipped z0 = " + fmt_double(z0) + ": outside the admissible interval (-1, " +
                        fmt_double(upper_z(p)) + ")");
      return;
    }
    starts.emplace_back(z0, highlight);
  };
  for (double z0 : survey.z0) accept_start(z0, false);
  for (double z0 : survey.highlighted) accept_start(z0, true);

  b.trajectories.resize(starts.size());
  PhaseClassOptions phase = opts.phase;
  phase.exec = Execution::serial;
  for_each_index(starts.size(), opts.exec, [&](std::size_t i) {
    SurveyTrajectory& t = b.trajectories[i];
    t.start = PhasePoint{starts[i].first, survey.phi0};
    t.highlighted = starts[i].second;
    t.trajectory = integrate(p, t.start, survey.integrator);
    const PhaseClass geometric = level_set_phase_class(p, t.start, phase);
    t.phase_class = geometric == t.trajectory.phase_class ? geometric : PhaseClass::undetermined;
  });
  return b;
}

TransitionTable transition_scan(std::span<const double> lambda_ratios, std::span<const double> ks,
                                double delta, const ScanOptions& opts) {
  TransitionTable t;
  t.delta = delta;
  t.critical.resize(lambda_ratios.size());
  t.rows.resize(lambda_ratios.size() * ks.size());

  for (std::size_t a = 0; a < lambda_ratios.size(); ++a) {
    const double lr = lambda_ratios[a];
    if (lr > 0.0) t.critical[a] = critical_params(lr);
    else t.critical[a] = CriticalParams{lr, std::numeric_limits<double>::quiet_NaN(), {}, {}};
  }

  const ScanOptions inner{opts.samples, Execution::serial};
  for_each_index(t.rows.size(), opts.exec, [&](std::size_t idx) {
    const std::size_t a = idx / ks.size();
    TransitionRow& row = t.rows[idx];
    row.lambda_ratio = lambda_ratios[a];
    row.k = ks[idx % ks.size()];
    row.counts = counts_of(find_fixed_points(ModelParams{delta, row.lambda_ratio, row.k}, inner));
    row.by_count = regime_from_counts(row.counts);
    const CriticalParams& c = t.critical[a];
    if (delta == 0.0 && c.k_c_minus && c.k_c_plus) {
      row.by_window = CriticalWindow{*c.k_c_minus, *c.k_c_plus}.contains(row.k)
                          ? Regime::josephson_bistable
                          : Regime::rabi_single;
      row.agree = *row.by_window == row.by_count;
    }
  });

  for (const CriticalParams& c : t.critical) {
    if (!(c.lambda_ratio >= 10.0)) continue;
    const double estimate = 3.0 / (c.lambda_ratio * c.lambda_ratio);
    t.notes.push_back("Lambda = " + fmt_double(c.lambda_ratio) + ": cubic root z_c = " +
                      fmt_double(c.z_c) + "; the small-root estimate 3/Lambda^2 = " +
                      fmt_double(estimate) + " does not solve the cubic (root scales as Lambda^(-2/3))");
  }
  for (const TransitionRow& r : t.rows)
    if (!r.agree)
      t.notes.push_back("Lambda = " + fmt_double(r.lambda_ratio) + ", k = " + fmt_double(r.k) +
                        ": fixed-point count gives " + std::string(to_string(r.by_count)) +
                        " but the critical window gives " + std::string(to_string(*r.by_window)));
  return t;
}

}  // namespace lmgd
