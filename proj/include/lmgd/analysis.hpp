// Products assembled from the fixed-point and dynamics modules: regime
// reports, energy landscapes, phase-portrait bundles and resonant
// (Lambda, k) transition scans.
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lmgd/dynamics.hpp"
#include "lmgd/fixed_points.hpp"

namespace lmgd {

enum class Regime { rabi_single, josephson_bistable };
std::string_view to_string(Regime r);

/// "pi" for centers on the phi = 0 line, "plasma" for centers on phi = pi,
/// "separatrix" for saddles.
std::string_view oscillation_label(const FixedPoint& fp);

struct BranchCounts {
  std::size_t phi_zero = 0;
  std::size_t phi_pi = 0;
};

struct CriticalWindow {
  double k_minus = 0.0;
  double k_plus = 0.0;
  bool contains(double k) const { return k >= k_minus && k <= k_plus; }
};

struct RegimeReport {
  ModelParams params;
  Regime regime = Regime::rabi_single;
  BranchCounts counts;
  std::optional<CriticalWindow> critical_window;  // delta == 0 and Lambda >= 2 only
  std::vector<FixedPoint> fixed_points;
  std::vector<std::string> notes;
};

/// Josephson (bistable) iff some phase line carries three or more fixed
/// points. The resonant critical window is attached as a cross-check and any
/// disagreement is recorded in `notes`.
RegimeReport classify_regime(const ModelParams& p, const ScanOptions& opts = {});

/// Energy sampled on phi in [0, 2pi] x z in [-1, 1], both endpoint-inclusive.
/// Cells with k - z < 0 are out of domain: in_domain = 0, value NaN.
struct LandscapeGrid {
  std::vector<double> phi_axis;
  std::vector<double> z_axis;
  std::vector<double> values;  // row-major by z
  std::vector<unsigned char> in_domain;

  std::size_t rows() const { return z_axis.size(); }
  std::size_t cols() const { return phi_axis.size(); }
  std::optional<double> at(std::size_t iz, std::size_t iphi) const;
  /// Bilinear; nullopt if any surrounding node is out of domain.
  std::optional<double> interpolate(const PhasePoint& x) const;
};

LandscapeGrid landscape(const ModelParams& p, std::size_t n_phi, std::size_t n_z,
                        Execution exec = Execution::parallel);

struct GridExtremum {
  std::size_t iz = 0;
  std::size_t iphi = 0;
  double z = 0.0;
  double phi = 0.0;
  double value = 0.0;
  bool maximum = false;
};

/// Local extrema over the 8-neighbourhood (periodic in phi, rows touching a
/// domain edge excluded). A node qualifies when it is >= (or <=) every
/// neighbour and strictly so for at least one.
std::vector<GridExtremum> local_extrema(const LandscapeGrid& grid);

/// Points of the level set H = energy: the z-roots on each of n_phi phase
/// columns in [0, 2pi), found by sign scan over n_z samples.
std::vector<PhasePoint> level_set(const ModelParams& p, double energy, std::size_t n_phi,
                                  std::size_t n_z, Execution exec = Execution::parallel);

struct SurveySpec {
  std::vector<double> z0;
  double phi0 = 0.0;
  std::vector<double> highlighted;  // extra starting z, kept only where admissible
  IntegratorConfig integrator{1e-10, 1e-10, 100.0, 0.05, 1e-9, 1e-12, 50'000'000};
};

/// z0 on a uniform grid of `points` values strictly inside the admissible
/// interval (-1, min(k, 1)), phi0 = 0, highlights at z0 = +-0.9, +-0.5.
SurveySpec default_survey(const ModelParams& p, std::size_t points = 41);

struct SurveyTrajectory {
  PhasePoint start;
  bool highlighted = false;
  Trajectory trajectory;
  PhaseClass phase_class = PhaseClass::undetermined;
};

struct PortraitOptions {
  std::size_t grid_phi = 401;
  std::size_t grid_z = 401;
  std::size_t level_set_phi = 720;
  std::size_t level_set_z = 4000;
  ScanOptions scan;
  PhaseClassOptions phase;
  Execution exec = Execution::parallel;
};

struct PortraitBundle {
  ModelParams params;
  std::vector<FixedPoint> fixed_points;
  std::vector<SurveyTrajectory> trajectories;
  std::optional<Separatrix> separatrix;
  std::vector<PhasePoint> separatrix_curve;
  LandscapeGrid landscape;
  std::vector<std::string> notes;
};

PortraitBundle portrait_bundle(const ModelParams& p, const SurveySpec& survey,
                               const PortraitOptions& opts = {});

struct TransitionRow {
  double lambda_ratio = 0.0;
  double k = 0.0;
  Regime by_count = Regime::rabi_single;
  BranchCounts counts;
  std::optional<Regime> by_window;
  bool agree = true;
};

struct TransitionTable {
  double delta = 0.0;
  std::vector<CriticalParams> critical;  // one per Lambda
  std::vector<TransitionRow> rows;       // Lambda-major
  std::vector<std::string> notes;
};

/// For each Lambda, the critical window plus the count-based regime at each
/// sampled k. Rows where the two classifications disagree are listed in
/// `notes` as well as flagged.
TransitionTable transition_scan(std::span<const double> lambda_ratios, std::span<const double> ks,
                                double delta = 0.0, const ScanOptions& opts = {});

}  // namespace lmgd
