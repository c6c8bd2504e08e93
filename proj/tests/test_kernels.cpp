#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <doctest.h>

#include "lmgd/kernels.hpp"

using namespace lmgd;

namespace {

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("midpoint samples") {
  std::vector<double> z(4);
  midpoint_samples(-1.0, 1.0, z);
  CHECK(z[0] == -0.75);
  CHECK(z[1] == -0.25);
  CHECK(z[2] == 0.25);
  CHECK(z[3] == 0.75);
}

TEST_CASE("stationarity samples: serial and parallel agree bitwise") {
  const ModelParams p{0.2, 6.0, 10.0};
  std::vector<double> z(50001);
  midpoint_samples(-1.0, 1.0, z);
  std::vector<double> a(z.size()), b(z.size());
  stationarity_samples(p, 1.0, z, a, Execution::serial);
  stationarity_samples(p, 1.0, z, b, Execution::parallel);
  CHECK(bitwise_equal(a, b));
  CHECK(a[1234] == stationarity_residual(p, z[1234], 1.0));
}

TEST_CASE("energy grid: domain mask and serial/parallel agreement") {
  const ModelParams p{0.0, 0.0, 0.1};
  std::vector<double> phi(33), z(41);
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = 2 * std::numbers::pi * i / 32.0;
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = -1.0 + 2.0 * i / 40.0;
  std::vector<double> a(phi.size() * z.size()), b(a.size());
  std::vector<unsigned char> ma(a.size()), mb(a.size());
  energy_grid(p, phi, z, a, ma, Execution::serial);
  energy_grid(p, phi, z, b, mb, Execution::parallel);
  CHECK(ma == mb);
  CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
  for (std::size_t iz = 0; iz < z.size(); ++iz) {
    for (std::size_t ip = 0; ip < phi.size(); ++ip) {
      const std::size_t idx = iz * phi.size() + ip;
      if (z[iz] > 0.1) {
        CHECK(ma[idx] == 0);
        CHECK(std::isnan(a[idx]));
      } else {
        CHECK(ma[idx] == 1);
        CHECK(a[idx] == hamiltonian(p, {z[iz], phi[ip]}));
      }
    }
  }
}

TEST_CASE("for_each_index visits every index once and rethrows the first failure") {
  for (Execution e : {Execution::serial, Execution::parallel}) {
    std::vector<int> hits(1000, 0);
    for_each_index(hits.size(), e, [&](std::size_t i) { ++hits[i]; });
    CHECK(std::count(hits.begin(), hits.end(), 1) == 1000);

    try {
      for_each_index(100, e, [](std::size_t i) {
        if (i == 17 || i == 60) throw std::runtime_error("fail " + std::to_string(i));
      });
      FAIL("expected an exception");
    } catch (const std::runtime_error& err) {
      CHECK(std::string(err.what()) == "fail 17");
    }
  }
}
