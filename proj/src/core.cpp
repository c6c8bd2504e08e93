#include "lmgd/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace lmgd {
namespace {

// s(z) = 2 (1 - z^2)(k - z) and its root S = sqrt(s) with derivatives.
struct SqrtFactor {
  double S = 0.0;
  double dS = 0.0;
  double d2S = 0.0;
};

SqrtFactor sqrt_factor(double k, double z) {
  const double s = 2.0 * (1.0 - z * z) * (k - z);
  const double ds = -2.0 * (1.0 + 2.0 * k * z - 3.0 * z * z);
  const double d2s = 12.0 * z - 4.0 * k;
  SqrtFactor f;
  f.S = std::sqrt(s);
  f.dS = ds / (2.0 * f.S);
  f.d2S = d2s / (2.0 * f.S) - ds * ds / (4.0 * s * f.S);
  return f;
}

// sin/cos that are exact on the stationary lines phi = m * pi (m integer,
// pi as a double), so dH/dphi vanishes identically there.
struct Trig {
  double sin;
  double cos;
};

Trig phase_trig(double phi) {
  constexpr double pi = std::numbers::pi;
  if (std::isfinite(phi) && std::fmod(phi, pi) == 0.0) {
    const double m = phi / pi;
    return {0.0, std::fmod(m, 2.0) == 0.0 ? 1.0 : -1.0};
  }
  return {std::sin(phi), std::cos(phi)};
}

std::string describe(const ModelParams& p, const PhasePoint& x) {
  std::ostringstream os;
  os.precision(17);
  os << "(delta=" << p.delta << ", Lambda=" << p.lambda_ratio << ", k=" << p.k
     << "; z=" << x.z << ", phi=" << x.phi << ")";
  return os.str();
}

void require_strict(const ModelParams& p, const PhasePoint& x) {
  if (!strictly_admissible(p, x))
    throw DomainError("point on or beyond the singular edge " + describe(p, x));
}

}  // namespace

ModelParams to_model_params(const PhysicalConfig& cfg) {
  if (!(cfg.lambda > 0.0))
    throw DomainError("field-ensemble coupling lambda must be positive");
  if (!(cfg.n_qubits >= 1.0)) throw DomainError("condensate size N_q must be >= 1");
  return ModelParams{(cfg.omega - cfg.omega_f) / cfg.lambda, cfg.eta / cfg.lambda,
                     2.0 * cfg.total_excitations / cfg.n_qubits};
}

double upper_z(const ModelParams& p) { return std::min(p.k, 1.0); }

bool admissible(const ModelParams& p, const PhasePoint& x) {
  return std::abs(x.z) <= 1.0 && field_fraction(p, x.z) >= 0.0;
}

double boundary_distance(const ModelParams& p, double z) {
  return std::min({z + 1.0, 1.0 - z, p.k - z});
}

bool strictly_admissible(const ModelParams& p, const PhasePoint& x, double margin) {
  return std::isfinite(x.z) && boundary_distance(p, x.z) > margin;
}

double hamiltonian(const ModelParams& p, const PhasePoint& x) {
  double w = field_fraction(p, x.z);
  double u = 1.0 - x.z * x.z;
  if (!(w >= -kDomainTolerance) || !(std::abs(x.z) <= 1.0 + kDomainTolerance))
    throw DomainError("point outside the physical domain " + describe(p, x));
  w = std::max(w, 0.0);
  u = std::max(u, 0.0);
  return (p.delta + 0.5 * p.lambda_ratio * x.z) * x.z + std::sqrt(2.0 * u * w) * phase_trig(x.phi).cos;
}

Gradient gradient(const ModelParams& p, const PhasePoint& x) {
  require_strict(p, x);
  const SqrtFactor f = sqrt_factor(p.k, x.z);
  const Trig t = phase_trig(x.phi);
  return Gradient{p.delta + p.lambda_ratio * x.z + f.dS * t.cos, -f.S * t.sin};
}

Hessian hessian(const ModelParams& p, const PhasePoint& x) {
  require_strict(p, x);
  const SqrtFactor f = sqrt_factor(p.k, x.z);
  const Trig t = phase_trig(x.phi);
  return Hessian{p.lambda_ratio + f.d2S * t.cos, -f.dS * t.sin, -f.S * t.cos};
}

double stationarity_residual(const ModelParams& p, double z, double cos_phi) noexcept {
  const double num = 1.0 + 2.0 * p.k * z - 3.0 * z * z;
  const double den = std::sqrt((1.0 - z * z) * (p.k - z));
  return p.delta + p.lambda_ratio * z - num / (std::numbers::sqrt2 * den) * cos_phi;
}

}  // namespace lmgd
