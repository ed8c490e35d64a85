// Acceptance run: one PASS/FAIL line per criterion, nonzero exit when any fails.

#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "carpetperc/branching.hpp"
#include "carpetperc/dual.hpp"
#include "carpetperc/error.hpp"
#include "carpetperc/estimator.hpp"
#include "carpetperc/lattice.hpp"
#include "carpetperc/paperevents.hpp"
#include "carpetperc/percolation.hpp"
#include "carpetperc/recursion.hpp"

using namespace carpetperc;

namespace {

const GeneratorSet kT = GeneratorSet::carpet3();

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// ---------------------------------------------------------------------------------------------
// 1. Lattice oracle

// Closed-square containment in 3^n K_n, on doubled coordinates so edge midpoints are integral.
bool in_k(Coord x2, Coord y2, Coord ox2, Coord oy2, Coord side2, int depth) {
  if (x2 < ox2 || x2 > ox2 + side2 || y2 < oy2 || y2 > oy2 + side2) return false;
  if (depth == 0) return true;
  const Coord s = side2 / 3;
  for (const auto& [i, j] : kT.cells())
    if (in_k(x2, y2, ox2 + i * s, oy2 + j * s, s, depth - 1)) return true;
  return false;
}

Outcome lattice_oracle() {
  std::string detail;
  bool ok = true;
  for (int n = 0; n <= 4; ++n) {
    const Coord side = ipow(3, n);
    auto inside = [&](Coord x2, Coord y2) { return in_k(x2, y2, 0, 0, 2 * side, n); };
    std::set<std::pair<Coord, Coord>> verts;
    std::set<std::pair<std::pair<Coord, Coord>, std::pair<Coord, Coord>>> edges;
    for (Coord x = 0; x <= side; ++x)
      for (Coord y = 0; y <= side; ++y) {
        if (!inside(2 * x, 2 * y)) continue;
        verts.insert({x, y});
        if (x < side && inside(2 * x + 1, 2 * y)) edges.insert({{x, y}, {x + 1, y}});
        if (y < side && inside(2 * x, 2 * y + 1)) edges.insert({{x, y}, {x, y + 1}});
      }
    const auto g = build_sponge(n, 1, 1, kT);
    std::set<std::pair<Coord, Coord>> gv;
    for (const auto& v : g.vertices()) gv.insert({v.x, v.y});
    std::set<std::pair<std::pair<Coord, Coord>, std::pair<Coord, Coord>>> ge;
    for (EdgeId e = 0; e < static_cast<EdgeId>(g.edge_count()); ++e) {
      const auto a = g.edge_low(e), b = g.edge_high(e);
      ge.insert({{a.x, a.y}, {b.x, b.y}});
    }
    if (gv != verts || ge != edges) {
      ok = false;
      detail += fmt("n=%d mismatch; ", n);
    }
    if (n >= 1 && n <= 2) detail += fmt("n=%d (%zu,%zu) ", n, g.vertex_count(), g.edge_count());
  }
  const auto g1 = build_sponge(1, 1, 1, kT), g2 = build_sponge(2, 1, 1, kT);
  ok = ok && g1.vertex_count() == 16 && g1.edge_count() == 24 && g2.vertex_count() == 96 && g2.edge_count() == 168;
  return {ok, detail + "sets equal for n<=4"};
}

// ---------------------------------------------------------------------------------------------
// 2. Duality

Outcome duality() {
  std::uint64_t configs = 0, bad = 0;
  const auto F = GeneratorSet::full(3);
  for (int c = 1; c <= 3; ++c)
    for (int r = 1; r <= 3; ++r) {
      const auto g = build_sponge(0, c, r, F);
      const auto d = build_dual(g);
      const std::size_t m = g.edge_count();
      BondConfiguration w(g);
      // Gray-code walk: one flip per step
      for (std::uint64_t i = 0; i < (std::uint64_t{1} << m); ++i) {
        if (i > 0) {
          const auto e = static_cast<EdgeId>(__builtin_ctzll(i));
          w.set(e, !w.open(e));
        }
        bad += has_crossing(w, Direction::LeftRight) == has_dual_crossing(w, d, Direction::UpDown);
        ++configs;
      }
    }
  std::uint64_t samples = 0, carpet_bad = 0;
  for (int n = 1; n <= 3; ++n) {
    const auto g = build_sponge(n, 2, 2, kT);
    const auto d = build_dual(g);
    for (double p : {0.3, 0.5, 0.7})
      for (std::uint64_t s = 0; s < 2000; ++s) {
        const auto w = sample_config(g, p, 21, s);
        carpet_bad += has_crossing(w, Direction::LeftRight) == has_dual_crossing(w, d, Direction::UpDown);
        carpet_bad += has_crossing(w, Direction::UpDown) == has_dual_crossing(w, d, Direction::LeftRight);
        ++samples;
      }
  }
  return {bad == 0 && carpet_bad == 0,
          fmt("exhaustive %llu configs, %llu violations; carpet %llu samples, %llu violations",
              static_cast<unsigned long long>(configs), static_cast<unsigned long long>(bad),
              static_cast<unsigned long long>(samples), static_cast<unsigned long long>(carpet_bad))};
}

// ---------------------------------------------------------------------------------------------
// 3. Exact vs Monte Carlo

Outcome exact_vs_mc() {
  bool ok = true;
  std::string detail;
  const GeometrySpec cell{"carpet3", 0, 1, 1};
  for (double p : {0.2, 0.5, 0.8}) {
    const double exact = 1 - (1 - p) * (1 - p);
    const auto e = estimate(EventSpec{"lr"}, cell, p, 100000, 3);
    const double sd = std::sqrt(exact * (1 - exact) / 1e5);
    const double z = (e.mean - exact) / sd;
    ok = ok && std::abs(z) <= 4;
    detail += fmt("p=%.1f %.5f vs %.5f (z=%+.2f) ", p, e.mean, exact, z);
  }
  return {ok, detail};
}

// ---------------------------------------------------------------------------------------------
// 4. Russo

Outcome russo() {
  const auto cell = russo_check(EventSpec{"lr"}, GeometrySpec{"carpet3", 0, 1, 1}, 0.5, 0.1, 100000, 4);
  const double exact = 2 * (1 - 0.5);
  const bool cell_ok = std::abs(cell.pivotal_mean - exact) <= 3 * cell.pivotal_se &&
                       std::abs(cell.derivative - exact) <= 3 * cell.derivative_se;
  const auto g = russo_check(EventSpec{"lr"}, GeometrySpec{"carpet3", 1, 2, 2}, 0.5, 0.02, 40000, 4);
  return {cell_ok && g.pass,
          fmt("cell: E[N]=%.4f+-%.4f dP/dp=%.4f+-%.4f exact 1; G_1(2,2): dP/dp=%.4f E[N]=%.4f pooled=%.4f",
              cell.pivotal_mean, cell.pivotal_se, cell.derivative, cell.derivative_se, g.derivative,
              g.pivotal_mean, g.pooled_se)};
}

// ---------------------------------------------------------------------------------------------
// 5. Recursion

Outcome recursion() {
  bool ok = eval_f(3, 0.75) == 1.0 / 8 && eval_f(4, 0.75) == 3.0 / 256;
  double worst = 0;
  for (int k = 1; k <= 16; ++k) {
    worst = std::max({worst, std::abs(eval_f(k, 1) - 1), std::abs(eval_f(k, 0))});
    if (k < 2) continue;  // g_k starts at k = 2
    worst = std::max(worst, std::abs(eval_g(k, 1, 1) - 1));
    for (double b : {0.0, 0.3, 0.7, 1.0}) worst = std::max(worst, std::abs(eval_g(k, 0, b)));
  }
  ok = ok && worst < 1e-12;
  double residual = 0;
  // x_eps exists for (1-eps)^2 > 1/2
  for (int i = 0; i <= 290; ++i) {
    residual = std::max(residual, std::abs(solve_x_eps(i / 1000.0).residual));
    residual = std::max(residual, std::abs(solve_p_eps(i / 1000.0).residual));
  }
  ok = ok && residual < 1e-12 && std::abs(gw_extinction(0.6) - 4.0 / 9) < 1e-12;
  double zmax = 0;
  for (double p : {0.6, 0.75, 0.9}) {
    const auto sim = gw_simulate(p, 15, 20000, 5);
    const double expect = 1 - gw_generation_law(p, 15);
    const double sd = std::sqrt(expect * (1 - expect) / 20000);
    zmax = std::max(zmax, std::abs(sim.survival_at_least(1) - expect) / sd);
  }
  ok = ok && zmax <= 4;
  return {ok, fmt("f_3(3/4)=%.17g f_4(3/4)=%.17g; boundary err %.1e; solver residual %.1e; GW max |z|=%.2f",
                  eval_f(3, 0.75), eval_f(4, 0.75), worst, residual, zmax)};
}

// ---------------------------------------------------------------------------------------------
// 6. psi threshold

Outcome psi_threshold() {
  int cert = 0, total = 0;
  for (int i = 1; i <= 9; ++i) {
    const auto it = iterate_threshold(i / 10.0, 10);
    ++total;
    bool ok = it.certified;
    for (std::size_t k = 0; k < it.iterates.size(); ++k) ok = ok && it.iterates[k] >= it.bounds[k];
    cert += ok;
  }
  return {cert == total, fmt("%d/%d thetas certified up to k=10", cert, total)};
}

// ---------------------------------------------------------------------------------------------
// 7. Scaling inequalities

Outcome scaling() {
  bool ok = true;
  std::string detail;
  const std::uint64_t N = 10000;
  for (int n : {1, 2})
    for (double p : {0.6, 0.7}) {
      const auto a3 = estimate(EventSpec{"lr"}, GeometrySpec{"carpet3", n, 3, 1}, p, N, 31);
      const auto a9 = estimate(EventSpec{"lr"}, GeometrySpec{"carpet3", n, 9, 1}, p, N, 32);
      const auto next = estimate(EventSpec{"lr"}, GeometrySpec{"carpet3", n + 1, 3, 1}, p, N, 33);
      const double rhs1 = std::pow(a3.mean, 5);
      const double sd1 = std::hypot(a9.stderr_, 5 * std::pow(a3.mean, 4) * a3.stderr_);
      const double rhs2 = eval_phi(a9.mean);
      const double sd2 = std::hypot(next.stderr_, 2 * (1 - a9.mean) * a9.stderr_);
      const bool ok1 = a9.mean >= rhs1 - 3 * sd1, ok2 = next.mean >= rhs2 - 3 * sd2;
      ok = ok && ok1 && ok2;
      detail += fmt("[n=%d p=%.1f %.4f>=%.4f %.4f>=%.4f] ", n, p, a9.mean, rhs1, next.mean, rhs2);
    }
  return {ok, detail};
}

// ---------------------------------------------------------------------------------------------
// 8. Implication suite

struct Tally {
  std::uint64_t samples = 0, antecedent = 0, violations = 0;
  std::string str(const char* name) const {
    return fmt("%s %llu/%llu/%llu", name, static_cast<unsigned long long>(violations),
               static_cast<unsigned long long>(antecedent), static_cast<unsigned long long>(samples));
  }
};

Outcome implications() {
  const std::uint64_t N = 10000;
  const std::vector<double> ps{0.4, 0.6};
  Tally d_impl, chain, surround, echain, annulus, chain_hi, annulus_planted;

  {
    const auto g = build_region(c_event_region(1), kT);
    const DImplicationCheck check(g, 1);
    for (double p : ps)
      for (std::uint64_t s = 0; s < N; ++s) {
        const auto r = check(sample_config(g, p, 81, s));
        ++d_impl.samples;
        d_impl.antecedent += r.top || r.bottom;
        d_impl.violations += !r.holds();
      }
  }
  {
    const auto g = build_sponge(2, 1, 1, kT);
    const Point x{7, 2};
    const DeltaChainEvent ev(g, x, 1, kT);
    auto run = [&](Tally& t, double p, std::uint64_t count) {
      for (std::uint64_t s = 0; s < count; ++s) {
        const auto w = sample_config(g, p, 82, s);
        ++t.samples;
        if (!ev(w)) continue;
        ++t.antecedent;
        t.violations += !connected(w, {0, 0}, x);
      }
    };
    for (double p : ps) run(chain, p, N);
    // the chain is vacuous at p <= 0.6
    run(chain_hi, 0.96, 2000);
  }
  {
    const auto g = build_region({-6, -6, 9, 9}, kT);
    const SurroundEvent ev(g, {1, 1}, 1, kT);
    for (double p : ps)
      for (std::uint64_t s = 0; s < N; ++s) {
        const auto w = sample_config(g, p, 83, s);
        ++surround.samples;
        if (!ev(w)) continue;
        ++surround.antecedent;
        surround.violations += !ev.audit(w);
      }
  }
  {
    const int n = 1, k = 3;
    const auto g = build_sponge(n - 1, k + 2, 1, kT, {-1, 0});
    const EChain ev(g, n, k);
    for (double p : ps)
      for (std::uint64_t s = 0; s < N; ++s) {
        const auto a = ev(sample_config(g, p, 84, s));
        ++echain.samples;
        echain.antecedent += a.chain;
        echain.violations += !a.holds();
      }
  }
  {
    const auto g = build_sponge(2, 2, 2, kT);
    auto scan_into = [&](Tally& t, const BondConfiguration& w, const std::vector<int>& scales) {
      ++t.samples;
      if (!has_crossing(w, Direction::LeftRight)) return;
      const auto scan = annulus_pivotal_scan(w, scales);
      for (const auto& rep : scan.scales) {
        t.antecedent += rep.c_event;
        t.violations += !rep.holds();
      }
      if (scan.psi) t.violations += !scan.e_psi_pivotal;
    };
    for (double p : ps)
      for (std::uint64_t s = 0; s < N; ++s) scan_into(annulus, sample_config(g, p, 85, s), {0});
    // sparse edges over a planted bottom crossing make the C-events common
    const auto g3 = build_sponge(3, 2, 2, kT);
    for (std::uint64_t s = 0; s < 2000; ++s) {
      auto w = sample_config(g3, 0.15, 86, s);
      for (EdgeId e = 0; e < static_cast<EdgeId>(g3.edge_count()); ++e)
        if (g3.edge_low(e).y == 0 && g3.edge_high(e).y == 0) w.set(e, true);
      scan_into(annulus_planted, w, {0, 1});
    }
  }
  const bool ok = d_impl.violations + chain.violations + surround.violations + echain.violations +
                      annulus.violations + chain_hi.violations + annulus_planted.violations ==
                  0;
  return {ok, "violations/antecedents/samples: " + d_impl.str("D(n=1)") + "; " + chain.str("delta-chain") + "; " +
                  surround.str("surround") + "; " + echain.str("E-chain") + "; " + annulus.str("C-annulus") +
                  "; extra: " + chain_hi.str("delta-chain p=0.96") + ", " +
                  annulus_planted.str("C-annulus G_3(2,2) planted p=0.15")};
}

// ---------------------------------------------------------------------------------------------
// 9. Branching geometry

Outcome branching_geometry() {
  bool ok = true;
  std::string detail;
  for (int N : {3, 4}) {
    const auto r = geometry_audit(N, 2);
    ok = ok && r.clean();
    detail += fmt("N=%d boxes=%d boundary=%d overlap=%d Q=%d; ", N, r.boxes, r.boundary_violations,
                  r.overlap_violations, r.q_violations);
  }
  return {ok, detail};
}

// ---------------------------------------------------------------------------------------------
// 10. Domination

Outcome domination_at(const SpongeGraph& g, const BranchingField& field, double p, std::uint64_t S) {
  const auto& nodes = field.nodes();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < nodes.size(); ++a)
    for (std::size_t b = a + 1; b < nodes.size(); ++b)
      if (tree_distance(nodes[a], nodes[b]) == 2) pairs.emplace_back(a, b);

  std::vector<std::vector<std::uint8_t>> z(S);
  std::vector<std::uint64_t> piece(8, 0);
  std::uint64_t root = 0;
  for (std::uint64_t s = 0; s < S; ++s) {
    const auto w = sample_config(g, p, 91, s);
    const auto f = field(w);
    z[s].resize(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) z[s][i] = f.z(i);
    root += f.z(0);
    const auto c = field.constituents(w, 0);
    for (std::size_t i = 0; i < 8; ++i) piece[i] += c[i];
  }
  const double zr = static_cast<double>(root) / S;
  const double zsd = std::sqrt(zr * (1 - zr) / S);
  double product = 1;
  for (auto k : piece) product *= static_cast<double>(k) / S;
  bool ok = zr >= product - 3 * zsd;

  double worst = 0;
  for (auto [a, b] : pairs) {
    double ma = 0, mb = 0;
    for (const auto& row : z) {
      ma += row[a];
      mb += row[b];
    }
    ma /= S;
    mb /= S;
    double cov = 0, var = 0;
    std::vector<double> t(S);
    for (std::uint64_t s = 0; s < S; ++s) {
      t[s] = (z[s][a] - ma) * (z[s][b] - mb);
      cov += t[s];
    }
    cov /= S;
    for (double v : t) var += (v - cov) * (v - cov);
    const double se = std::sqrt(var / (S - 1) / S);
    const double ratio = se > 0 ? std::abs(cov) / se : (cov == 0 ? 0 : INFINITY);
    worst = std::max(worst, ratio);
  }
  ok = ok && worst <= 4;
  return {ok, fmt("p=%.2f P[Z(0)]=%.4f+-%.4f product of 8 constituents=%.4f, %zu distance-2 pairs max |cov|/se=%.2f",
                  p, zr, zsd, product, pairs.size(), worst)};
}

Outcome domination() {
  const int N = 4, m = 2;
  const auto g = build_branching_window(N, m, kT);
  const BranchingField field(g, N, m);
  const auto main = domination_at(g, field, 0.95, 4000);
  // Z is almost surely 1 at p = 0.95; p = 0.6 gives a non-degenerate field
  const auto extra = domination_at(g, field, 0.6, 3000);
  return {main.pass && extra.pass, main.detail + "; extra " + extra.detail};
}

// ---------------------------------------------------------------------------------------------
// 11. Finite-size p_c

double g_pc4 = NAN;

Outcome critical_point() {
  const std::uint64_t S = 10000;
  const double tol = 0.002;
  std::vector<double> pc;
  std::string detail;
  for (int n : {2, 3, 4}) {
    pc.push_back(estimate_pc(n, 1, 1, S, tol, 111).p_hat);
    detail += fmt("n=%d %.4f ", n, pc.back());
  }
  g_pc4 = pc.back();
  const double gap1 = std::abs(pc[1] - pc[0]), gap2 = std::abs(pc[2] - pc[1]);
  const double dual = estimate_pc_dual(4, 1, 1, S, tol, 112).p_hat;
  const double full = estimate_pc(3, 1, 1, S, tol, 113, {}, "full3").p_hat;
  const bool ok = gap2 <= gap1 && std::abs(dual - pc[2]) <= 0.03 && full >= 0.45 && full <= 0.55;
  return {ok, detail + fmt("gaps %.4f %.4f; dual n=4 %.4f; full3 n=3 %.4f", gap1, gap2, dual, full)};
}

// ---------------------------------------------------------------------------------------------
// 12. theta proxy

Outcome theta_proxy() {
  const std::uint64_t S = 10000;
  bool ok = true;
  std::string detail;
  for (double p : {0.5, 0.6, 0.7, 0.8, 0.9}) {
    double prev = 2, prev_se = 0;
    for (int n = 1; n <= 4; ++n) {
      const auto e = estimate_theta(p, n, S, 121);
      ok = ok && e.mean <= prev + 3 * std::hypot(e.stderr_, prev_se);
      prev = e.mean;
      prev_se = e.stderr_;
    }
  }
  const double pc = std::isnan(g_pc4) ? estimate_pc(4, 1, 1, S, 0.002, 111).p_hat : g_pc4;
  detail += fmt("non-increasing on p in {0.5..0.9}, n=1..4: %s; at p=%.4f:", ok ? "yes" : "no", pc);
  double prev = 2;
  bool decreasing = true;
  for (int n = 1; n <= 5; ++n) {
    const auto e = estimate_theta(pc, n, S, 122);
    decreasing = decreasing && e.mean < prev;
    prev = e.mean;
    detail += fmt(" %.4f", e.mean);
  }
  return {ok && decreasing, detail};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{
      {1, "lattice oracle", 10, lattice_oracle},
      {2, "per-configuration duality", 120, duality},
      {3, "exact vs Monte Carlo", 10, exact_vs_mc},
      {4, "Russo check", 120, russo},
      {5, "recursion exactness", 10, recursion},
      {6, "psi-threshold certification", 1, psi_threshold},
      {7, "scaling inequalities", 300, scaling},
      {8, "implication suite", 600, implications},
      {9, "branching geometry audit", 60, branching_geometry},
      {10, "domination consistency", 300, domination},
      {11, "finite-size p_c consistency", 1800, critical_point},
      {12, "theta-proxy behaviour", 600, theta_proxy},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s %2d %s: %s [%.1fs / %.0fs%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                c.budget_s, in_time ? "" : " over budget");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
