#include "lmgd/kernels.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <vector>

namespace lmgd {

void for_each_index(std::size_t n, Execution exec, const std::function<void(std::size_t)>& body) {
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void stationarity_samples(const ModelParams& p, double cos_phi, std::span<const double> z,
                          std::span<double> out, Execution exec) {
  const auto n = static_cast<std::ptrdiff_t>(z.size());
  if (exec == Execution::serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = stationarity_residual(p, z[i], cos_phi);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = stationarity_residual(p, z[i], cos_phi);
}

namespace {

void energy_row(const ModelParams& p, std::span<const double> phi, double z, double* out,
                unsigned char* mask) {
  const double w = p.k - z;
  const bool inside = w >= 0.0 && std::abs(z) <= 1.0;
  for (std::size_t j = 0; j < phi.size(); ++j) {
    mask[j] = inside ? 1 : 0;
    out[j] = inside ? hamiltonian(p, PhasePoint{z, phi[j]})
                    : std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

void energy_grid(const ModelParams& p, std::span<const double> phi, std::span<const double> z,
                 std::span<double> out, std::span<unsigned char> in_domain, Execution exec) {
  const auto rows = static_cast<std::ptrdiff_t>(z.size());
  const std::size_t cols = phi.size();
  if (exec == Execution::serial) {
    for (std::ptrdiff_t i = 0; i < rows; ++i)
      energy_row(p, phi, z[i], out.data() + i * cols, in_domain.data() + i * cols);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i)
    energy_row(p, phi, z[i], out.data() + i * cols, in_domain.data() + i * cols);
}

void midpoint_samples(double lo, double hi, std::span<double> out) {
  const double n = static_cast<double>(out.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = lo + (hi - lo) * (static_cast<double>(i) + 0.5) / n;
}

}  // namespace lmgd
