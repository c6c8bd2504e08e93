// Mean-field flow on the phase cylinder, in dimensionless time tau = lambda t:
//   dz/dtau   = -dH/dphi =  sqrt(2 (1 - z^2)(k - z)) sin(phi)
//   dphi/dtau = +dH/dz   =  delta + Lambda z - (1 + 2kz - 3z^2) / sqrt(2 (1 - z^2)(k - z)) cos(phi)
// H is conserved along the flow.
#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "lmgd/core.hpp"
#include "lmgd/fixed_points.hpp"
#include "lmgd/kernels.hpp"

namespace lmgd {

struct Velocity {
  double dz = 0.0;
  double dphi = 0.0;
};

/// Throws DomainError unless x is strictly admissible.
Velocity eom(const ModelParams& p, const PhasePoint& x);

/// The local error of each step, divided by the step length, is held below
/// abs_tol + rel_tol * |y| (error per unit step), so the accumulated error
/// grows with tau rather than with the number of steps.
struct IntegratorConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double tau_max = 100.0;
  /// Sample spacing in tau; 0 records every accepted step.
  double output_stride = 0.0;
  /// Stop once z is this close to -1, 1 or k.
  double boundary_margin = 1e-9;
  double min_step = 1e-12;
  std::size_t max_steps = 50'000'000;
};

enum class Termination { completed, boundary_hit, step_underflow };
enum class PhaseClass { bounded, unbounded, undetermined };

std::string_view to_string(Termination t);
std::string_view to_string(PhaseClass c);

struct TrajectorySample {
  double tau = 0.0;
  double z = 0.0;
  double phi = 0.0;  // unwrapped
  double energy = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  double energy_drift = 0.0;  // max |H(tau) - H(0)| over accepted steps
  Termination termination = Termination::completed;
  /// From the phase winding of this run alone.
  PhaseClass phase_class = PhaseClass::undetermined;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;

  const TrajectorySample& front() const { return samples.front(); }
  const TrajectorySample& back() const { return samples.back(); }
};

/// Adaptive Dormand-Prince 5(4) with local extrapolation. Stops with
/// boundary_hit within boundary_margin of an edge, or when the step
/// collapses within 1e-4 of one. Throws
/// DomainError if x0 is not strictly admissible or the config is invalid.
Trajectory integrate(const ModelParams& p, const PhasePoint& x0, const IntegratorConfig& cfg = {});

struct ZRange {
  double lo = 0.0;
  double hi = 0.0;
};
ZRange z_excursion(const Trajectory& t);

/// max(|hi_a + lo_b|, |lo_a + hi_b|): zero when the z-excursion of b is the
/// mirror image (z -> -z) of that of a.
double mirror_asymmetry(const ZRange& a, const ZRange& b);

struct PhaseClassOptions {
  std::size_t phi_samples = 720;
  std::size_t z_samples = 2000;
  IntegratorConfig integrator{1e-10, 1e-10, 200.0, 0.0, 1e-9, 1e-12, 50'000'000};
  Execution exec = Execution::parallel;
};

/// Geometric test alone: does the connected component of the level set
/// H = H(x0) through x0 wrap around the cylinder?
PhaseClass level_set_phase_class(const ModelParams& p, const PhasePoint& x0,
                                 const PhaseClassOptions& opts = {});

/// Level-set test confirmed by integration; `undetermined` when the two
/// disagree or the run cannot finish.
PhaseClass classify_phase(const ModelParams& p, const PhasePoint& x0,
                          const PhaseClassOptions& opts = {});

struct Separatrix {
  double energy = 0.0;
  FixedPoint saddle;
};

/// The saddle with the smallest stationarity residual, if any.
std::optional<Separatrix> separatrix_energy(const ModelParams& p, const ScanOptions& opts = {});

}  // namespace lmgd
