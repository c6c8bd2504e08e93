// Mean-field model of a two-species condensate driven by a single quantized
// field mode (LMG-Dicke coupling, rotating-wave form).
//
// State lives on the phase cylinder (z, phi):
//   z   = cos(theta), fractional population difference, -1 <= z <= 1
//   phi = total (field + ensemble) phase, kept unwrapped
//
// Energy, in units of hbar * N_q * lambda / 2:
//   H(z, phi) = (delta + Lambda z / 2) z + sqrt(2 (1 - z^2)(k - z)) cos(phi)
//
// The square-root factor vanishes on the domain edges z = -1, z = 1 and
// z = k (empty field). Points with k - z < 0 are not physical.
#pragma once

#include <stdexcept>
#include <string>

namespace lmgd {

/// Slack allowed below the k - z >= 0 and |z| <= 1 edges before a point
/// is rejected. Points inside the slack are clamped onto the edge.
inline constexpr double kDomainTolerance = 1e-12;

class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Physical parameters (angular frequencies in rad/s).
struct PhysicalConfig {
  double omega = 0.0;    // hyperfine transition
  double omega_f = 0.0;  // field mode
  double eta = 0.0;      // intra-ensemble coupling
  double lambda = 1.0;   // field-ensemble coupling, > 0
  double n_qubits = 1.0;
  double total_excitations = 0.0;
};

/// Dimensionless model parameters.
struct ModelParams {
  double delta = 0.0;         // (omega - omega_f) / lambda
  double lambda_ratio = 0.0;  // eta / lambda
  double k = 0.0;             // 2 N / N_q

  bool operator==(const ModelParams&) const = default;
};

struct PhasePoint {
  double z = 0.0;
  double phi = 0.0;
};

struct Gradient {
  double dz = 0.0;    // dH/dz
  double dphi = 0.0;  // dH/dphi
};

struct Hessian {
  double zz = 0.0;
  double zphi = 0.0;
  double phiphi = 0.0;
};

/// Rejects lambda <= 0 and n_qubits < 1.
ModelParams to_model_params(const PhysicalConfig& cfg);

/// Field occupation per half condensate, n / (N_q / 2) = k - z.
inline double field_fraction(const ModelParams& p, double z) { return p.k - z; }

/// Largest physical z, min(k, 1).
double upper_z(const ModelParams& p);

/// |z| <= 1 and k - z >= 0.
bool admissible(const ModelParams& p, const PhasePoint& x);

/// Distance from x to the nearest singular edge {-1, 1, k}.
double boundary_distance(const ModelParams& p, double z);

/// True when x is at least `margin` away from every singular edge.
bool strictly_admissible(const ModelParams& p, const PhasePoint& x,
                         double margin = kDomainTolerance);

double hamiltonian(const ModelParams& p, const PhasePoint& x);

/// Throws DomainError unless x is strictly admissible.
Gradient gradient(const ModelParams& p, const PhasePoint& x);
Hessian hessian(const ModelParams& p, const PhasePoint& x);

/// dH/dz restricted to a stationary phase line, cos(phi) = cos_phi.
/// Unchecked: the caller guarantees -1 < z < min(k, 1).
double stationarity_residual(const ModelParams& p, double z, double cos_phi) noexcept;

}  // namespace lmgd
