// Stationary states of the mean-field flow.
//
// Fixed points sit on the phase lines phi = 0 and phi = pi, where dH/dphi
// vanishes identically; along each line they are the roots of
//   g(z) = delta + Lambda z - (1 + 2kz - 3z^2) / sqrt(2 (1 - z^2)(k - z)) cos(phi).
// The primary solver is a dense sign-change scan of g with bisection. The
// closed-form excitation ratio k(z) (obtained by squaring g = 0) is inverted
// independently as a cross-check.
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lmgd/core.hpp"
#include "lmgd/kernels.hpp"

namespace lmgd {

enum class Stability { minimum, maximum, saddle };

/// Sign in front of the square root in the excitation-ratio formula.
enum class RootBranch { plus, minus };

/// Which excitation-ratio branch reproduces a scanned root, or `oracle`
/// when neither does (singular cases such as delta = Lambda = 0 at z = 0).
enum class BranchOrigin { plus, minus, oracle };

std::string_view to_string(Stability s);
std::string_view to_string(BranchOrigin b);

struct FixedPoint {
  double z = 0.0;
  double phi = 0.0;  // exactly 0 or pi
  double energy = 0.0;
  Stability stability = Stability::saddle;
  BranchOrigin branch = BranchOrigin::oracle;
  bool near_boundary = false;  // within kBoundaryFlagDistance of {-1, 1, k}
  double residual = 0.0;       // dH/dz at the refined root
};

/// Roots closer than this to a singular edge carry `near_boundary`.
inline constexpr double kBoundaryFlagDistance = 1e-6;
/// Roots closer than this are merged.
inline constexpr double kMergeDistance = 1e-8;

/// Excitation ratio that makes z stationary:
///   k = (3z^2 - 1)/(2z) + (1 - z^2)|a| (|a| +- sqrt(a^2 - 4z)) / (4z^2),  a = delta + Lambda z.
/// Throws DomainError for z = 0, |z| > 1 or a^2 - 4z < 0. At |z| = 1 the
/// second term vanishes and the result is exactly z.
double k_of_z(double delta, double lambda_ratio, double z, RootBranch branch);

enum class BandKind {
  band,       // real k excluded for z_minus < z < z_plus
  one_sided,  // Lambda = 0: real k only for z <= z_minus = delta^2 / 4
  none,       // delta * Lambda > 1: real k everywhere
};

struct ZBounds {
  BandKind kind = BandKind::none;
  double z_minus = 0.0;
  double z_plus = 0.0;
};

/// Roots of (delta + Lambda z)^2 - 4z = 0:
///   z_pm = (2 - delta Lambda +- 2 sqrt(1 - delta Lambda)) / Lambda^2.
ZBounds z_bounds(double delta, double lambda_ratio);

struct ZInterval {
  double lo = -1.0;
  double hi = 1.0;
  bool lo_open = false;
  bool hi_open = false;
};

/// Where the excitation-ratio formula is real, clipped to [-1, 1], with z = 0
/// removed.
std::vector<ZInterval> admissible_z_range(double delta, double lambda_ratio);

struct ScanOptions {
  std::size_t samples = 100000;
  Execution exec = Execution::parallel;
};

/// All fixed points, sorted by (phi, z).
std::vector<FixedPoint> find_fixed_points(const ModelParams& p, const ScanOptions& opts = {});

struct StationaryPoint {
  double z = 0.0;
  double phi = 0.0;
  RootBranch branch = RootBranch::plus;
};

/// Independent route: roots of k_of_z(z, +-) = p.k over the admissible z
/// range, each assigned to its phase line by the sign of the unsquared
/// condition. Sorted by (phi, z).
std::vector<StationaryPoint> invert_excitation_ratio(const ModelParams& p,
                                                     std::size_t samples = 20000);

struct CriticalParams {
  double lambda_ratio = 0.0;
  double z_c = 0.0;
  // Defined only when z_c <= 1 (Lambda >= 2).
  std::optional<double> k_c_minus;
  std::optional<double> k_c_plus;
};

/// Real root of Lambda^2 z^3 - 3 z^2 - 1 = 0 (Lambda > 0).
double critical_cubic_root(double lambda_ratio);

/// Extrema of the on-resonance k(z) curve. Throws DomainError for Lambda <= 0.
CriticalParams critical_params(double lambda_ratio);

/// On resonance, k at the edge of the excluded band, (16 + Lambda^4) / (8 Lambda^2).
double k_at_zplus(double lambda_ratio);

enum class SweepAxis { k, lambda_ratio, delta };
std::string_view to_string(SweepAxis a);
std::optional<SweepAxis> parse_sweep_axis(std::string_view s);

struct SweepRow {
  double value = 0.0;
  ModelParams params;
  std::vector<FixedPoint> points;
  std::string error;
};

enum class TransitionKind {
  fold,  // a pair of roots appears or annihilates (count changes by an even number)
  edge,  // a root crosses a singular edge of the domain
};

struct BranchTransition {
  double phi = 0.0;
  double value_before = 0.0;
  double value_after = 0.0;
  std::size_t count_before = 0;
  std::size_t count_after = 0;
  TransitionKind kind = TransitionKind::fold;
};

struct BranchTable {
  SweepAxis axis = SweepAxis::k;
  std::vector<SweepRow> rows;
  std::vector<BranchTransition> transitions;
};

std::size_t count_on_branch(const std::vector<FixedPoint>& points, double phi);

/// Pointwise fixed-point census along one parameter axis, with
/// `steps` equally spaced values from `from` to `to` inclusive. Rows are
/// evaluated independently (in parallel when opts.exec says so); a failing
/// row records its error and the sweep continues.
BranchTable branch_sweep(const ModelParams& base, SweepAxis axis, double from, double to,
                         std::size_t steps, const ScanOptions& opts = {});

}  // namespace lmgd
