#include "lmgd/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <optional>

namespace lmgd {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// A controller stall this close to a singular edge is attributed to the edge.
constexpr double kEdgeStall = 1e-4;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct State {
  double z;
  double phi;
};

// Velocity, or nothing if the stage point left the open domain.
std::optional<State> rhs(const ModelParams& p, double z, double phi) {
  if (!(boundary_distance(p, z) > 0.0)) return std::nullopt;
  const double u = 1.0 - z * z;
  const double w = p.k - z;
  const double S = std::sqrt(2.0 * u * w);
  const double dS = -(1.0 + 2.0 * p.k * z - 3.0 * z * z) / S;
  return State{S * std::sin(phi), p.delta + p.lambda_ratio * z + dS * std::cos(phi)};
}

struct StepResult {
  State y;
  State f_end;
  double err;
};

std::optional<StepResult> dopri_step(const ModelParams& p, const State& y, const State& k1,
                                     double h, const IntegratorConfig& cfg) {
  auto stage = [&](double dz, double dphi) { return rhs(p, y.z + h * dz, y.phi + h * dphi); };
  const auto k2 = stage(a21 * k1.z, a21 * k1.phi);
  if (!k2) return std::nullopt;
  const auto k3 = stage(a31 * k1.z + a32 * k2->z, a31 * k1.phi + a32 * k2->phi);
  if (!k3) return std::nullopt;
  const auto k4 = stage(a41 * k1.z + a42 * k2->z + a43 * k3->z,
                        a41 * k1.phi + a42 * k2->phi + a43 * k3->phi);
  if (!k4) return std::nullopt;
  const auto k5 = stage(a51 * k1.z + a52 * k2->z + a53 * k3->z + a54 * k4->z,
                        a51 * k1.phi + a52 * k2->phi + a53 * k3->phi + a54 * k4->phi);
  if (!k5) return std::nullopt;
  const auto k6 = stage(a61 * k1.z + a62 * k2->z + a63 * k3->z + a64 * k4->z + a65 * k5->z,
                        a61 * k1.phi + a62 * k2->phi + a63 * k3->phi + a64 * k4->phi +
                            a65 * k5->phi);
  if (!k6) return std::nullopt;
  const State y1{y.z + h * (b1 * k1.z + b3 * k3->z + b4 * k4->z + b5 * k5->z + b6 * k6->z),
                 y.phi + h * (b1 * k1.phi + b3 * k3->phi + b4 * k4->phi + b5 * k5->phi +
                              b6 * k6->phi)};
  const auto k7 = rhs(p, y1.z, y1.phi);
  if (!k7) return std::nullopt;
  const double err_z =
      h * (e1 * k1.z + e3 * k3->z + e4 * k4->z + e5 * k5->z + e6 * k6->z + e7 * k7->z);
  const double err_phi = h * (e1 * k1.phi + e3 * k3->phi + e4 * k4->phi + e5 * k5->phi +
                              e6 * k6->phi + e7 * k7->phi);
  // The phase is an angle: its relative scale uses the reduced value, not
  // the unbounded unwrapped one.
  const double sc_z = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y.z), std::abs(y1.z));
  const double sc_phi =
      cfg.abs_tol + cfg.rel_tol * std::max(std::abs(std::remainder(y.phi, kTwoPi)),
                                           std::abs(std::remainder(y1.phi, kTwoPi)));
  // Error per unit step: the bound on the accumulated error scales with tau,
  // not with the number of steps taken.
  return StepResult{y1, *k7, std::max(std::abs(err_z) / sc_z, std::abs(err_phi) / sc_phi) / h};
}

void validate(const IntegratorConfig& cfg) {
  if (!(cfg.abs_tol > 0.0) || !(cfg.rel_tol > 0.0) || !(cfg.tau_max > 0.0) ||
      !(cfg.output_stride >= 0.0) || !(cfg.boundary_margin >= kDomainTolerance) ||
      !(cfg.min_step > 0.0))
    throw DomainError("integrator config: tolerances, tau_max and margins must be positive");
}

PhaseClass winding_class(const Trajectory& t) {
  const double phi0 = t.front().phi;
  if (std::abs(t.back().phi - phi0) > 4.0 * std::numbers::pi) return PhaseClass::unbounded;
  if (t.termination != Termination::completed) return PhaseClass::undetermined;
  double lo = phi0, hi = phi0;
  for (const auto& s : t.samples) {
    lo = std::min(lo, s.phi);
    hi = std::max(hi, s.phi);
  }
  return hi - lo < kTwoPi ? PhaseClass::bounded : PhaseClass::undetermined;
}

}  // namespace

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::boundary_hit: return "boundary_hit";
    case Termination::step_underflow: return "step_underflow";
  }
  return "?";
}

std::string_view to_string(PhaseClass c) {
  switch (c) {
    case PhaseClass::bounded: return "bounded";
    case PhaseClass::unbounded: return "unbounded";
    case PhaseClass::undetermined: return "undetermined";
  }
  return "?";
}

Velocity eom(const ModelParams& p, const PhasePoint& x) {
  const Gradient g = gradient(p, x);
  return Velocity{-g.dphi, g.dz};
}

Trajectory integrate(const ModelParams& p, const PhasePoint& x0, const IntegratorConfig& cfg) {
  validate(cfg);
  if (!strictly_admissible(p, x0, cfg.boundary_margin))
    throw DomainError("initial point is not strictly inside the physical domain");

  Trajectory traj;
  const double e0 = hamiltonian(p, x0);
  traj.samples.push_back({0.0, x0.z, x0.phi, e0});

  State y{x0.z, x0.phi};
  State f = *rhs(p, y.z, y.phi);
  double tau = 0.0;
  const double speed = std::max(std::abs(f.z), std::abs(f.phi));
  double h = std::min({1e-2, cfg.tau_max, speed > 0.0 ? 1e-2 / speed : 1e-2});
  double next_out = cfg.output_stride > 0.0 ? cfg.output_stride : cfg.tau_max;
  std::size_t out_index = 1;

  while (tau < cfg.tau_max) {
    if (traj.accepted_steps + traj.rejected_steps >= cfg.max_steps) {
      traj.termination = Termination::step_underflow;
      break;
    }
    const double target = std::min(next_out, cfg.tau_max);
    bool hits_target = false;
    double h_try = h;
    if (tau + h_try >= target) {
      h_try = target - tau;
      hits_target = true;
    }
    if (h_try < cfg.min_step && !hits_target) {
      traj.termination = boundary_distance(p, y.z) < kEdgeStall
                             ? Termination::boundary_hit
                             : Termination::step_underflow;
      break;
    }

    const auto step = dopri_step(p, y, f, h_try, cfg);
    if (!step || !(step->err <= 1.0)) {
      ++traj.rejected_steps;
      const double shrink =
          step && std::isfinite(step->err) ? std::max(0.2, 0.9 * std::pow(step->err, -0.25)) : 0.25;
      h = h_try * shrink;
      continue;
    }

    ++traj.accepted_steps;
    tau = hits_target ? target : tau + h_try;
    y = step->y;
    f = step->f_end;
    const double energy = hamiltonian(p, PhasePoint{y.z, y.phi});
    traj.energy_drift = std::max(traj.energy_drift, std::abs(energy - e0));

    const bool at_edge = boundary_distance(p, y.z) < cfg.boundary_margin;
    if (cfg.output_stride == 0.0 || hits_target || at_edge) traj.samples.push_back({tau, y.z, y.phi, energy});
    if (hits_target && cfg.output_stride > 0.0) {
      ++out_index;
      next_out = cfg.output_stride * static_cast<double>(out_index);
    }
    if (at_edge) {
      traj.termination = Termination::boundary_hit;
      break;
    }

    const double grow = step->err > 0.0 ? std::min(5.0, std::max(0.2, 0.9 * std::pow(step->err, -0.25))) : 5.0;
    // Keep the untruncated step size when the last step was shortened to hit an output time.
    h = (hits_target ? std::max(h, h_try) : h_try) * grow;
  }
  traj.phase_class = winding_class(traj);
  return traj;
}

ZRange z_excursion(const Trajectory& t) {
  ZRange r{t.front().z, t.front().z};
  for (const auto& s : t.samples) {
    r.lo = std::min(r.lo, s.z);
    r.hi = std::max(r.hi, s.z);
  }
  return r;
}

double mirror_asymmetry(const ZRange& a, const ZRange& b) {
  return std::max(std::abs(a.hi + b.lo), std::abs(a.lo + b.hi));
}

PhaseClass level_set_phase_class(const ModelParams& p, const PhasePoint& x0,
                                 const PhaseClassOptions& opts) {
  const std::size_t m = std::max<std::size_t>(opts.phi_samples, 8);
  const std::size_t n = std::max<std::size_t>(opts.z_samples, 8);
  const double energy = hamiltonian(p, x0);

  // Rows strictly inside (-1, z_hi), with z0 exactly between two rows.
  const double z_hi = upper_z(p);
  std::vector<double> z(n);
  midpoint_samples(-1.0, z_hi, z);
  std::vector<double> phi(m);
  for (std::size_t j = 0; j < m; ++j) phi[j] = x0.phi + kTwoPi * static_cast<double>(j) / static_cast<double>(m);

  std::vector<double> h(n * m);
  std::vector<unsigned char> mask(n * m);
  energy_grid(p, phi, z, h, mask, opts.exec);
  auto positive = [&](std::size_t i, std::size_t j) { return h[i * m + j] - energy >= 0.0; };

  const auto it = std::upper_bound(z.begin(), z.end(), x0.z);
  if (it == z.begin() || it == z.end()) return PhaseClass::bounded;  // sub-grid sliver at an edge
  const std::size_t row = static_cast<std::size_t>(it - z.begin()) - 1;
  // Sub-grid orbit: too small to wrap.
  if (positive(row, 0) == positive(row + 1, 0)) return PhaseClass::bounded;

  // Flood fill over cells (i, j) = [z_i, z_i+1] x [phi_j, phi_j+1], moving
  // only across cell edges the contour crosses, tracking how many times the
  // walk wrapped in phi. Reaching a cell with two different wrap counts means
  // the component is non-contractible on the cylinder.
  constexpr int kUnvisited = std::numeric_limits<int>::min();
  std::vector<int> wraps((n - 1) * m, kUnvisited);
  auto crossed_vertical = [&](std::size_t i, std::size_t j) {  // edge at phi_j between rows i, i+1
    return positive(i, j % m) != positive(i + 1, j % m);
  };
  auto crossed_horizontal = [&](std::size_t i, std::size_t j) {  // edge at z_i between phi_j, phi_j+1
    return positive(i, j) != positive(i, (j + 1) % m);
  };

  struct Cell {
    std::size_t i, j;
    int wrap;
  };
  std::deque<Cell> queue{{row, 0, 0}, {row, m - 1, -1}};
  wraps[row * m + 0] = 0;
  wraps[row * m + m - 1] = -1;
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    auto visit = [&](std::size_t i, std::size_t j, int wrap) {
      int& w = wraps[i * m + j];
      if (w == kUnvisited) {
        w = wrap;
        queue.push_back({i, j, wrap});
        return false;
      }
      return w != wrap;
    };
    // Right neighbour through the edge at phi_{j+1}.
    if (crossed_vertical(c.i, c.j + 1)) {
      const bool wrapped = c.j + 1 == m;
      if (visit(c.i, (c.j + 1) % m, c.wrap + (wrapped ? 1 : 0))) return PhaseClass::unbounded;
    }
    // Left neighbour through the edge at phi_j.
    if (crossed_vertical(c.i, c.j)) {
      const bool wrapped = c.j == 0;
      if (visit(c.i, wrapped ? m - 1 : c.j - 1, c.wrap - (wrapped ? 1 : 0)))
        return PhaseClass::unbounded;
    }
    if (c.i + 2 < n && crossed_horizontal(c.i + 1, c.j))
      if (visit(c.i + 1, c.j, c.wrap)) return PhaseClass::unbounded;
    if (c.i > 0 && crossed_horizontal(c.i, c.j))
      if (visit(c.i - 1, c.j, c.wrap)) return PhaseClass::unbounded;
  }
  return PhaseClass::bounded;
}

PhaseClass classify_phase(const ModelParams& p, const PhasePoint& x0, const PhaseClassOptions& opts) {
  const PhaseClass geometric = level_set_phase_class(p, x0, opts);
  const Trajectory t = integrate(p, x0, opts.integrator);
  return t.phase_class == geometric ? geometric : PhaseClass::undetermined;
}

std::optional<Separatrix> separatrix_energy(const ModelParams& p, const ScanOptions& opts) {
  std::optional<Separatrix> best;
  for (const FixedPoint& fp : find_fixed_points(p, opts)) {
    if (fp.stability != Stability::saddle) continue;
    if (!best || std::abs(fp.residual) < std::abs(best->saddle.residual)) best = Separatrix{fp.energy, fp};
  }
  return best;
}

}  // namespace lmgd
