// Data-parallel inner loops. Every kernel has a serial reference path and an
// OpenMP path; both write each output slot exactly once, so the results are
// bitwise identical regardless of thread count or schedule.
#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "lmgd/core.hpp"

namespace lmgd {

enum class Execution { serial, parallel };

/// Calls body(i) for i in [0, n). The body must only touch slot i of any
/// shared output. Exceptions escaping the body are rethrown after the loop
/// (the first one by index).
void for_each_index(std::size_t n, Execution exec, const std::function<void(std::size_t)>& body);

/// out[i] = stationarity_residual(p, z[i], cos_phi).
void stationarity_samples(const ModelParams& p, double cos_phi, std::span<const double> z,
                          std::span<double> out, Execution exec);

/// Energy on a (z, phi) grid, row-major by z: out[iz * phi.size() + iphi].
/// Cells with k - z < 0 get in_domain = 0 and value NaN.
void energy_grid(const ModelParams& p, std::span<const double> phi, std::span<const double> z,
                 std::span<double> out, std::span<unsigned char> in_domain, Execution exec);

/// Uniformly spaced samples strictly inside (lo, hi): lo + (hi - lo)(i + 1/2)/n.
void midpoint_samples(double lo, double hi, std::span<double> out);

}  // namespace lmgd
