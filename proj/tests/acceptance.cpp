// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "cli_support.hpp"
#include "lmgd/analysis.hpp"
#include "lmgd/roots.hpp"
#include "oracle_compare.hpp"
#include "test_support.hpp"

using namespace lmgd;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Outcome endpoint_identities() {
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  int bad = 0;
  for (int i = 0; i < 100; ++i) {
    const double d = u(rng), l = u(rng);
    for (RootBranch b : {RootBranch::plus, RootBranch::minus}) {
      bad += k_of_z(d, l, 1.0, b) != 1.0;
      bad += k_of_z(d, l, -1.0, b) != -1.0;
    }
  }
  return {bad == 0, fmt("%d of 400 evaluations differ from +-1", bad)};
}

Outcome resonance_bounds() {
  double worst = 0.0;
  for (double l : {2.0, 6.0, 10.0}) {
    const ZBounds b = z_bounds(0.0, l);
    worst = std::max(worst, rel(b.z_plus, 4.0 / (l * l)));
    worst = std::max(worst, rel(k_at_zplus(l), (16.0 + l * l * l * l) / (8.0 * l * l)));
  }
  return {worst < 1e-12, fmt("max relative error %.3g (limit 1e-12)", worst)};
}

Outcome critical_cubic() {
  const double e6 = std::abs(critical_params(6.0).z_c - 1.0 / 3.0);
  const double e2 = std::abs(critical_params(2.0).z_c - 1.0);
  const auto big = critical_params(5000.0);
  const double e5000 = big.k_c_plus ? rel(*big.k_c_plus, 1.25e7) : INFINITY;
  return {e6 < 1e-10 && e2 < 1e-10 && e5000 < 5e-4,
          fmt("|z_c - 1/3| = %.3g, |z_c - 1| = %.3g, k_c+(5000) = %.10g (rel. %.3g, limit 5e-4)", e6, e2,
              big.k_c_plus.value_or(NAN), e5000)};
}

Outcome census() {
  std::string detail;
  bool ok = true;
  const auto pts = find_fixed_points({0, 6, 10});
  std::vector<Stability> zero, half;
  for (const auto& f : pts) (f.phi == 0.0 ? zero : half).push_back(f.stability);
  ok = ok && zero == std::vector<Stability>{Stability::maximum, Stability::saddle, Stability::maximum};
  ok = ok && half == std::vector<Stability>{Stability::minimum};
  detail += fmt("k=10: {%zu, %zu}", zero.size(), half.size());

  const auto low = find_fixed_points({0, 6, 0.1});
  const auto c0 = count_on_branch(low, 0.0), cpi = count_on_branch(low, pi);
  ok = ok && c0 == 1 && cpi == 1;
  detail += fmt("; k=0.1: {%zu, %zu}", c0, cpi);

  double worst = 0.0;
  for (double k : {0.1, 10.0}) {
    const double zc = (k - std::sqrt(k * k + 3.0)) / 3.0;
    const auto f = find_fixed_points({0, 0, k});
    ok = ok && count_on_branch(f, 0.0) == 1 && count_on_branch(f, pi) == 1;
    for (const auto& fp : f) worst = std::max(worst, std::abs(fp.z - zc));
  }
  ok = ok && worst < 1e-9;
  detail += fmt("; Lambda=0 closed-form error %.3g (limit 1e-9)", worst);
  return {ok, detail};
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(2002);
  std::size_t mismatches = 0, roots = 0, edge_roots = 0;
  double worst_residual = 0.0;
  for (int i = 0; i < 200; ++i) {
    const ModelParams p = testing::random_oracle_params(rng);
    const auto pts = find_fixed_points(p);
    mismatches += testing::compare_with_inversion(p, pts, 1e-7).size();
    for (const auto& f : pts) {
      ++roots;
      worst_residual = std::max(worst_residual, std::abs(f.residual));
      edge_roots += f.near_boundary;
    }
  }
  return {mismatches == 0 && worst_residual < 1e-9,
          fmt("%zu roots, %zu unmatched, max |dH/dz| = %.3g (limit 1e-9), %zu near an edge", roots, mismatches,
              worst_residual, edge_roots)};
}

Outcome energy_conservation() {
  std::mt19937_64 rng(3003);
  double worst = 0.0, worst_rev = 0.0;
  int completed = 0, reversed = 0;
  for (int i = 0; i < 100; ++i) {
    const auto [p, x] = testing::random_interior_point(rng, 1e-3);
    const Trajectory t = integrate(p, x);
    worst = std::max(worst, t.energy_drift / std::max(1.0, std::abs(t.front().energy)));
    if (t.termination != Termination::completed) continue;
    ++completed;
    const Trajectory back = integrate(p, {t.back().z, -t.back().phi});
    if (back.termination != Termination::completed) continue;
    ++reversed;
    worst_rev = std::max({worst_rev, std::abs(back.back().z - x.z),
                          std::abs(std::remainder(back.back().phi + x.phi, 2 * pi))});
  }
  return {worst < 1e-8 && worst_rev < 1e-6 && reversed > 0,
          fmt("max drift %.3g (limit 1e-8), %d/100 completed tau=100; round trip over tau=100+100 "
              "max error %.3g (limit 1e-6) on %d runs",
              worst, completed, worst_rev, reversed)};
}

Outcome derivatives() {
  std::mt19937_64 rng(4004);
  double wg = 0.0, wh = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto [p, x] = testing::random_interior_point(rng, 0.05);
    const Gradient g = gradient(p, x);
    const auto fg = testing::fd_gradient(p, x, 1e-6);
    wg = std::max({wg, std::abs(g.dz - fg.dz), std::abs(g.dphi - fg.dphi)});
    const Hessian h = hessian(p, x);
    const auto fh = testing::fd_hessian(p, x, 1e-6);
    wh = std::max({wh, std::abs(h.zz - fh.zz), std::abs(h.zphi - fh.zphi), std::abs(h.phiphi - fh.phiphi)});
  }
  return {wg < 1e-6 && wh < 1e-5, fmt("gradient %.3g (limit 1e-6), Hessian %.3g (limit 1e-5)", wg, wh)};
}

Outcome drive_asymmetry() {
  IntegratorConfig cfg;
  const ModelParams p{0, 0, 10};
  const double a10 = mirror_asymmetry(z_excursion(integrate(p, {0.5, 0.0}, cfg)),
                                      z_excursion(integrate(p, {-0.5, 0.0}, cfg)));
  // Several periods (2 pi / sqrt(2k) ~ 4.4e-3) at k = 1e6.
  cfg.tau_max = 0.05;
  const ModelParams q{0, 0, 1e6};
  const double a6 = mirror_asymmetry(z_excursion(integrate(q, {0.5, 0.0}, cfg)),
                                     z_excursion(integrate(q, {-0.5, 0.0}, cfg)));
  return {a10 > 1e-2 && a6 < 1e-3,
          fmt("k=10 asymmetry %.4g (needs > 1e-2), k=1e6 asymmetry %.3g (needs < 1e-3)", a10, a6)};
}

Outcome separatrix_role() {
  const ModelParams p{0, 6, 10};
  const auto s = separatrix_energy(p);
  if (!s) return {false, "no saddle found"};
  const double ze = s->saddle.z;
  // Along phi = 0 the saddle is a minimum of H in z: E_s + 1e-3 is reached on
  // both sides of z_E, E_s - 1e-3 only off the phi = 0 line.
  const double above = s->energy + 1e-3;
  auto f = [&](double z) { return hamiltonian(p, {z, 0.0}) - above; };
  const double z_low = bisect(f, ze - 0.2, ze, f(ze - 0.2));
  const double z_high = bisect(f, ze, ze + 0.2, f(ze));
  IntegratorConfig cfg;
  cfg.tau_max = 50.0;
  auto family = [&](const ZRange& r) { return r.hi < ze ? "D" : r.lo > ze ? "F" : "both"; };
  const std::string fl = family(z_excursion(integrate(p, {z_low, 0.0}, cfg)));
  const std::string fh = family(z_excursion(integrate(p, {z_high, 0.0}, cfg)));

  const double below = s->energy - 1e-3;
  const double sf = std::sqrt(2.0 * (1 - ze * ze) * (p.k - ze));
  const double phi = std::acos((below - 0.5 * p.lambda_ratio * ze * ze) / sf);
  const std::string fb = family(z_excursion(integrate(p, {ze, phi}, cfg)));
  return {fl == "D" && fh == "F" && fb == "both",
          fmt("E_s = %.10g at z_E = %.6f; E_s+1e-3 starts at z = %.6f / %.6f librate around %s / %s; "
              "E_s-1e-3 orbit encircles %s",
              s->energy, ze, z_low, z_high, fl.c_str(), fh.c_str(), fb.c_str())};
}

Outcome fold_window() {
  const double lo = 0.01, hi = 20.0;
  const std::size_t steps = 2000;
  const double step = (hi - lo) / static_cast<double>(steps - 1);
  const BranchTable t = branch_sweep({0, 6, 0}, SweepAxis::k, lo, hi, steps);
  // Folds change the count by two; the F center touching the z = k = 1
  // corner at exactly k = 1 shows up as a pair of edge transitions.
  std::vector<BranchTransition> folds, edges;
  for (const auto& tr : t.transitions)
    if (tr.phi == 0.0) (tr.kind == TransitionKind::fold ? folds : edges).push_back(tr);
  auto brackets = [&](double k) {
    for (const auto& c : folds)
      if (c.value_before <= k && c.value_after >= k && c.value_after - c.value_before <= step * (1 + 1e-12))
        return true;
    return false;
  };
  std::string where, edge_where;
  for (const auto& c : folds) where += fmt(" [%.6f, %.6f]", c.value_before, c.value_after);
  for (const auto& c : edges) edge_where += fmt(" [%.6f, %.6f]", c.value_before, c.value_after);
  return {folds.size() == 2 && brackets(0.468027) && brackets(13.531973),
          fmt("folds on phi = 0:%s (step %.6f); edge transitions:%s", where.c_str(), step,
              edges.empty() ? " none" : edge_where.c_str())};
}

Outcome determinism() {
  testing::ScratchDir dir("acceptance");
  std::string failed;
  std::size_t files = 0;
  for (const auto& args : testing::subcommand_invocations()) {
    auto a = args, b = args;
    a.insert(a.end(), {"--out", dir / (args[0] + "_a")});
    b.insert(b.end(), {"--out", dir / (args[0] + "_b")});
    const bool ran = testing::run_cli(a).code == 0 && testing::run_cli(b).code == 0;
    const auto fa = testing::data_files(dir / (args[0] + "_a"));
    files += fa.size();
    if (!ran || fa.empty() || fa != testing::data_files(dir / (args[0] + "_b"))) failed += " " + args[0];
  }
  return {failed.empty(), failed.empty() ? fmt("%zu data files identical across 9 subcommands", files)
                                         : "differs:" + failed};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"1 endpoint identities", endpoint_identities},
      {"2 on-resonance bounds", resonance_bounds},
      {"3 critical cubic", critical_cubic},
      {"4 fixed-point census", census},
      {"5 oracle equivalence", oracle_equivalence},
      {"6 energy conservation", energy_conservation},
      {"7 derivatives vs finite differences", derivatives},
      {"8 drive asymmetry", drive_asymmetry},
      {"9 separatrix behavior", separatrix_role},
      {"10 fold/window consistency", fold_window},
      {"11 determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.pass;
    std::printf("%s  %-38s %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
