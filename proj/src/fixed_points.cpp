#include "lmgd/fixed_points.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lmgd/roots.hpp"

namespace lmgd {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = std::numbers::pi;
constexpr int kEdgeProbes = 40;

// Excitation ratio without argument checks; NaN where undefined. The minus
// branch uses the cancellation-free form
//   k_- = z (|a| + 3 sqrt(D)) / (2 (|a| + sqrt(D))) + 2 / (|a| + sqrt(D))^2.
double excitation_ratio(double delta, double lambda_ratio, double z, RootBranch branch) {
  if (std::abs(z) == 1.0) return (3.0 * z * z - 1.0) / (2.0 * z);
  const double a = std::abs(delta + lambda_ratio * z);
  double disc = a * a - 4.0 * z;
  if (disc < 0.0) {
    // Round-off at a band edge, where the two branches meet.
    if (disc < -1e-14 * (a * a + 4.0 * std::abs(z))) return kNaN;
    disc = 0.0;
  }
  const double root = std::sqrt(disc);
  if (branch == RootBranch::plus) {
    if (z == 0.0) return kNaN;
    return (3.0 * z * z - 1.0) / (2.0 * z) + (1.0 - z * z) * a * (a + root) / (4.0 * z * z);
  }
  const double sum = a + root;
  if (sum == 0.0) return kNaN;
  return z * (a + 3.0 * root) / (2.0 * sum) + 2.0 / (sum * sum);
}

Stability classify(const Hessian& h) {
  if (h.zz < 0.0 && h.phiphi < 0.0) return Stability::maximum;
  if (h.zz > 0.0 && h.phiphi > 0.0) return Stability::minimum;
  return Stability::saddle;
}

BranchOrigin match_branch(const ModelParams& p, double z) {
  if (z == 0.0) return BranchOrigin::oracle;
  const double scale = std::max(1.0, std::abs(p.k));
  double best = 1e-6;
  BranchOrigin origin = BranchOrigin::oracle;
  for (RootBranch b : {RootBranch::plus, RootBranch::minus}) {
    const double kb = excitation_ratio(p.delta, p.lambda_ratio, z, b);
    if (!std::isfinite(kb)) continue;
    const double err = std::abs(kb - p.k) / scale;
    if (err < best) {
      best = err;
      origin = b == RootBranch::plus ? BranchOrigin::plus : BranchOrigin::minus;
    }
  }
  return origin;
}

// Walk from the outermost sample towards the open edge at `edge`, halving the
// gap, looking for a sign change hidden in the unsampled sliver.
template <class F>
std::optional<double> sliver_root(F&& g, double edge, double z_in, double g_in) {
  double prev = z_in;
  double g_prev = g_in;
  for (int j = 1; j <= 60; ++j) {
    const double z = edge + (z_in - edge) / std::ldexp(1.0, j);
    if (z == edge) break;
    const double gz = g(z);
    if (!std::isfinite(gz)) break;
    if (gz == 0.0) return z;
    if (opposite_signs(gz, g_prev)) {
      const double lo = std::min(z, prev);
      const double hi = std::max(z, prev);
      return bisect(g, lo, hi, g(lo));
    }
    prev = z;
    g_prev = gz;
  }
  return std::nullopt;
}

FixedPoint make_fixed_point(const ModelParams& p, double z, double phi, double cos_phi) {
  FixedPoint fp;
  fp.z = z;
  fp.phi = phi;
  fp.energy = hamiltonian(p, PhasePoint{z, phi});
  fp.residual = stationarity_residual(p, z, cos_phi);
  fp.near_boundary = boundary_distance(p, z) < kBoundaryFlagDistance;
  PhasePoint probe{z, phi};
  if (!strictly_admissible(p, probe)) {
    // Within round-off of the edge; classify from just inside.
    probe.z = z < 0.0 ? -1.0 + 2.0 * kDomainTolerance : upper_z(p) - 2.0 * kDomainTolerance;
  }
  fp.stability = classify(hessian(p, probe));
  fp.branch = match_branch(p, z);
  return fp;
}

std::vector<double> merge_close(std::vector<double> roots,
                                const std::function<double(double)>& residual) {
  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double r : roots) {
    if (!out.empty() && r - out.back() < kMergeDistance) {
      if (std::abs(residual(r)) < std::abs(residual(out.back()))) out.back() = r;
      continue;
    }
    out.push_back(r);
  }
  return out;
}

bool fixed_point_less(const FixedPoint& a, const FixedPoint& b) {
  return a.phi != b.phi ? a.phi < b.phi : a.z < b.z;
}

}  // namespace

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::minimum: return "minimum";
    case Stability::maximum: return "maximum";
    case Stability::saddle: return "saddle";
  }
  return "?";
}

std::string_view to_string(BranchOrigin b) {
  switch (b) {
    case BranchOrigin::plus: return "+";
    case BranchOrigin::minus: return "-";
    case BranchOrigin::oracle: return "oracle";
  }
  return "?";
}

double k_of_z(double delta, double lambda_ratio, double z, RootBranch branch) {
  if (!std::isfinite(z) || std::abs(z) > 1.0) throw DomainError("k_of_z: |z| must be <= 1");
  if (z == 0.0) throw DomainError("k_of_z: singular at z = 0");
  const double k = excitation_ratio(delta, lambda_ratio, z, branch);
  if (std::isnan(k)) throw DomainError("k_of_z: z inside the excluded band, no real excitation ratio");
  return k;
}

ZBounds z_bounds(double delta, double lambda_ratio) {
  if (lambda_ratio == 0.0)
    return ZBounds{BandKind::one_sided, 0.25 * delta * delta,
                   std::numeric_limits<double>::infinity()};
  const double dl = delta * lambda_ratio;
  if (dl > 1.0) return ZBounds{BandKind::none, kNaN, kNaN};
  const double root = std::sqrt(1.0 - dl);
  const double upper = 2.0 - dl + 2.0 * root;
  // z_minus * z_plus = delta^2 / Lambda^2 avoids the cancellation in z_minus.
  return ZBounds{BandKind::band, delta * delta / upper, upper / (lambda_ratio * lambda_ratio)};
}

std::vector<ZInterval> admissible_z_range(double delta, double lambda_ratio) {
  const ZBounds b = z_bounds(delta, lambda_ratio);
  std::vector<ZInterval> out{{-1.0, 0.0, false, true}};
  const double upper_low = b.kind == BandKind::none ? 1.0 : std::min(b.z_minus, 1.0);
  if (upper_low > 0.0) out.push_back({0.0, upper_low, true, false});
  if (b.kind == BandKind::band && b.z_plus <= 1.0) {
    if (b.z_plus <= upper_low)
      out.back().hi = 1.0;  // degenerate band, z_minus == z_plus
    else
      out.push_back({b.z_plus, 1.0, false, false});
  }
  return out;
}

std::vector<FixedPoint> find_fixed_points(const ModelParams& p, const ScanOptions& opts) {
  if (!std::isfinite(p.delta) || !std::isfinite(p.lambda_ratio) || !std::isfinite(p.k))
    throw DomainError("model parameters must be finite");
  const double z_hi = upper_z(p);
  std::vector<FixedPoint> result;
  if (!(z_hi > -1.0) || opts.samples < 2) return result;

  std::vector<double> z(opts.samples);
  std::vector<double> g(opts.samples);
  midpoint_samples(-1.0, z_hi, z);

  for (const double phi : {0.0, kPi}) {
    const double cos_phi = phi == 0.0 ? 1.0 : -1.0;
    auto residual = [&](double x) { return stationarity_residual(p, x, cos_phi); };
    stationarity_samples(p, cos_phi, z, g, opts.exec);

    std::vector<double> roots;
    if (auto r = sliver_root(residual, -1.0, z.front(), g.front())) roots.push_back(*r);
    for (std::size_t i = 0; i + 1 < z.size(); ++i) {
      if (g[i] == 0.0) roots.push_back(z[i]);
      else if (opposite_signs(g[i], g[i + 1]))
        roots.push_back(bisect(residual, z[i], z[i + 1], g[i]));
    }
    if (g.back() == 0.0) roots.push_back(z.back());
    if (auto r = sliver_root(residual, z_hi, z.back(), g.back())) roots.push_back(*r);

    for (double r : merge_close(std::move(roots), residual))
      result.push_back(make_fixed_point(p, r, phi, cos_phi));
  }
  std::sort(result.begin(), result.end(), fixed_point_less);
  return result;
}

std::vector<StationaryPoint> invert_excitation_ratio(const ModelParams& p, std::size_t samples) {
  const double z_hi = upper_z(p);
  std::vector<StationaryPoint> out;
  if (!(z_hi > -1.0)) return out;

  for (const ZInterval& iv : admissible_z_range(p.delta, p.lambda_ratio)) {
    const double lo = std::max(iv.lo, -1.0);
    const double hi = std::min(iv.hi, z_hi);
    if (!(hi > lo)) continue;
    auto n = std::max<std::size_t>(
        64, static_cast<std::size_t>(static_cast<double>(samples) * (hi - lo) / 2.0));
    std::vector<double> mid(n);
    midpoint_samples(lo, hi, mid);
    // Refine geometrically towards both ends so roots in the outer half cells
    // are bracketed; closed ends are sampled exactly.
    std::vector<double> z;
    z.reserve(n + 2 * kEdgeProbes + 2);
    if (!iv.lo_open) z.push_back(lo);
    for (int j = kEdgeProbes; j >= 1; --j) z.push_back(lo + (mid.front() - lo) / std::ldexp(1.0, j));
    z.insert(z.end(), mid.begin(), mid.end());
    for (int j = 1; j <= kEdgeProbes; ++j) z.push_back(hi - (hi - mid.back()) / std::ldexp(1.0, j));
    if (!iv.hi_open) z.push_back(hi);
    z.erase(std::unique(z.begin(), z.end()), z.end());
    n = z.size();

    for (RootBranch b : {RootBranch::plus, RootBranch::minus}) {
      auto h = [&](double x) { return excitation_ratio(p.delta, p.lambda_ratio, x, b) - p.k; };
      std::vector<double> hv(n);
      for (std::size_t i = 0; i < n; ++i) hv[i] = h(z[i]);
      for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!std::isfinite(hv[i]) || !std::isfinite(hv[i + 1])) continue;
        double root;
        if (hv[i] == 0.0) root = z[i];
        else if (opposite_signs(hv[i], hv[i + 1])) root = bisect(h, z[i], z[i + 1], hv[i]);
        else continue;
        // Reject sign flips across a pole.
        if (!(std::abs(h(root)) < 1e-6 * std::max(1.0, std::abs(p.k)))) continue;
        const double a = p.delta + p.lambda_ratio * root;
        const double q = 1.0 + 2.0 * p.k * root - 3.0 * root * root;
        if (a == 0.0) {
          out.push_back({root, 0.0, b});
          out.push_back({root, kPi, b});
        } else {
          out.push_back({root, (a > 0.0) == (q > 0.0) ? 0.0 : kPi, b});
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const StationaryPoint& a, const StationaryPoint& b) {
    return a.phi != b.phi ? a.phi < b.phi : a.z < b.z;
  });
  // Coincident roots from both branches at a fold.
  std::vector<StationaryPoint> merged;
  for (const auto& s : out) {
    if (!merged.empty() && merged.back().phi == s.phi && s.z - merged.back().z < kMergeDistance)
      continue;
    merged.push_back(s);
  }
  return merged;
}

double critical_cubic_root(double lambda_ratio) {
  if (!(lambda_ratio > 0.0)) throw DomainError("critical cubic needs Lambda > 0");
  const double l2 = lambda_ratio * lambda_ratio;
  auto f = [l2](double z) { return l2 * z * z * z - 3.0 * z * z - 1.0; };
  double lo = 0.0;
  double hi = 1.0;
  while (f(hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-6 * hi) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    (fm < 0.0 ? lo : hi) = mid;
  }
  double z = 0.5 * (lo + hi);
  for (int it = 0; it < 50; ++it) {
    const double step = f(z) / (3.0 * l2 * z * z - 6.0 * z);
    z -= step;
    if (std::abs(step) <= 1e-12 * std::max(1.0, std::abs(z))) break;
  }
  return z;
}

CriticalParams critical_params(double lambda_ratio) {
  CriticalParams c;
  c.lambda_ratio = lambda_ratio;
  c.z_c = critical_cubic_root(lambda_ratio);
  // Lambda = 2 puts the root at the z = 1 edge; absorb Newton round-off.
  const double z = (c.z_c > 1.0 && c.z_c - 1.0 < 1e-12) ? 1.0 : c.z_c;
  if (z <= 1.0) {
    c.k_c_minus = k_of_z(0.0, lambda_ratio, z, RootBranch::minus);
    c.k_c_plus = k_of_z(0.0, lambda_ratio, z, RootBranch::plus);
  }
  return c;
}

double k_at_zplus(double lambda_ratio) {
  if (lambda_ratio == 0.0) throw DomainError("k_at_zplus needs Lambda != 0");
  const double l2 = lambda_ratio * lambda_ratio;
  return (16.0 + l2 * l2) / (8.0 * l2);
}

std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::k: return "k";
    case SweepAxis::lambda_ratio: return "lambda-ratio";
    case SweepAxis::delta: return "delta";
  }
  return "?";
}

std::optional<SweepAxis> parse_sweep_axis(std::string_view s) {
  if (s == "k") return SweepAxis::k;
  if (s == "lambda-ratio" || s == "lambda_ratio") return SweepAxis::lambda_ratio;
  if (s == "delta") return SweepAxis::delta;
  return std::nullopt;
}

std::size_t count_on_branch(const std::vector<FixedPoint>& points, double phi) {
  return static_cast<std::size_t>(
      std::count_if(points.begin(), points.end(), [phi](const FixedPoint& f) { return f.phi == phi; }));
}

BranchTable branch_sweep(const ModelParams& base, SweepAxis axis, double from, double to,
                         std::size_t steps, const ScanOptions& opts) {
  if (steps < 2 || !std::isfinite(from) || !std::isfinite(to))
    throw std::invalid_argument("branch_sweep needs a finite range and steps >= 2");
  BranchTable table;
  table.axis = axis;
  table.rows.resize(steps);
  const ScanOptions inner{opts.samples, Execution::serial};

  for_each_index(steps, opts.exec, [&](std::size_t i) {
    SweepRow& row = table.rows[i];
    row.value = from + (to - from) * static_cast<double>(i) / static_cast<double>(steps - 1);
    row.params = base;
    switch (axis) {
      case SweepAxis::k: row.params.k = row.value; break;
      case SweepAxis::lambda_ratio: row.params.lambda_ratio = row.value; break;
      case SweepAxis::delta: row.params.delta = row.value; break;
    }
    try {
      row.points = find_fixed_points(row.params, inner);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });

  for (const double phi : {0.0, kPi}) {
    const SweepRow* prev = nullptr;
    for (const SweepRow& row : table.rows) {
      if (!row.error.empty()) continue;
      if (prev) {
        const std::size_t before = count_on_branch(prev->points, phi);
        const std::size_t after = count_on_branch(row.points, phi);
        if (before != after) {
          const std::size_t diff = before > after ? before - after : after - before;
          table.transitions.push_back({phi, prev->value, row.value, before, after,
                                       diff % 2 == 0 ? TransitionKind::fold : TransitionKind::edge});
        }
      }
      prev = &row;
    }
  }
  return table;
}

}  // namespace lmgd
