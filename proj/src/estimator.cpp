#include "carpetperc/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <thread>

#include "carpetperc/dual.hpp"
#include "carpetperc/error.hpp"
#include "carpetperc/paperevents.hpp"

namespace carpetperc {

namespace {

constexpr double kZ95 = 1.959963984540054;

void check_p(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::Domain, "probability " + std::to_string(p) + " outside [0,1]");
}

void check_samples(std::uint64_t samples) {
  if (samples == 0) throw Error(ErrorKind::Argument, "samples must be at least 1");
}

BondConfiguration threshold_bits(const SpongeGraph& g, const std::vector<double>& u, double p) {
  std::vector<std::uint8_t> bits(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) bits[i] = u[i] < p ? 1 : 0;
  BondConfiguration w(g, std::move(bits));
  w.p = p;
  return w;
}

// Runs f(replica, acc) over [0, count) in contiguous chunks; acc holds k integer counters.
std::vector<std::uint64_t> parallel_sums(std::uint64_t count, int workers, std::size_t k,
                                         const std::function<void(std::uint64_t, std::uint64_t*)>& f) {
  const std::uint64_t w = std::max<std::uint64_t>(1, std::min<std::uint64_t>(static_cast<std::uint64_t>(std::max(workers, 1)), count));
  std::vector<std::vector<std::uint64_t>> acc(w, std::vector<std::uint64_t>(k, 0));
  std::vector<std::exception_ptr> errors(w);
  auto run = [&](std::uint64_t t) {
    const std::uint64_t lo = count * t / w, hi = count * (t + 1) / w;
    try {
      for (std::uint64_t r = lo; r < hi; ++r) f(r, acc[t].data());
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };
  if (w == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (std::uint64_t t = 0; t < w; ++t) pool.emplace_back(run, t);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<std::uint64_t> total(k, 0);
  for (const auto& a : acc)
    for (std::size_t i = 0; i < k; ++i) total[i] += a[i];
  return total;
}

void parallel_for(std::uint64_t count, int workers, const std::function<void(std::uint64_t)>& f) {
  parallel_sums(count, workers, 0, [&](std::uint64_t r, std::uint64_t*) { f(r); });
}

std::uint64_t grid_seed(std::uint64_t seed, std::uint64_t point) { return splitmix64(seed ^ splitmix64(point + 1)); }

}  // namespace

// ---------------------------------------------------------------------------------------------

SpongeGraph GeometrySpec::build(const Limits& limits) const {
  return build_sponge(n, cols, rows, generators(), {}, limits);
}

std::string GeometrySpec::describe() const {
  return generator + ":G_" + std::to_string(n) + "(" + std::to_string(cols) + "," + std::to_string(rows) + ")";
}

const std::vector<std::string>& EventSpec::known() {
  static const std::vector<std::string> ids{"lr", "ud", "dual-lr", "dual-ud", "below-hole", "circuit", "delta", "e", "theta"};
  return ids;
}

bool EventSpec::increasing() const { return id != "dual-lr" && id != "dual-ud"; }

Indicator compile_event(const EventSpec& e, const GeometrySpec& geo, const SpongeGraph& g) {
  const auto& ids = EventSpec::known();
  if (std::find(ids.begin(), ids.end(), e.id) == ids.end())
    throw Error(ErrorKind::Argument, "unknown event '" + e.id + "'");
  if (e.id == "lr") return [](const BondConfiguration& w) { return has_crossing(w, Direction::LeftRight); };
  if (e.id == "ud") return [](const BondConfiguration& w) { return has_crossing(w, Direction::UpDown); };
  if (e.id == "dual-lr" || e.id == "dual-ud") {
    auto d = std::make_shared<DualGraph>(g);
    const Direction dir = e.id == "dual-lr" ? Direction::LeftRight : Direction::UpDown;
    return [d, dir](const BondConfiguration& w) { return has_dual_crossing(w, *d, dir); };
  }
  const GeneratorSet T = geo.generators();
  const Coord L = T.base();
  if (e.id == "below-hole") {
    const Rect& b = g.box();
    auto probe = std::make_shared<Probe>(g, Rect{b.x0, b.y0, b.x1, b.y0 + ipow(L, geo.n - 1)});
    return [probe](const BondConfiguration& w) { return probe->crossing(w, Direction::LeftRight); };
  }
  if (e.id == "circuit") {
    if (geo.cols != 1 || geo.rows != 1) throw Error(ErrorKind::Geometry, "circuit needs a single G_n window");
    const int n = geo.n;
    return [n](const BondConfiguration& w) { return has_circuit_around(w, n, CircuitMode::Open); };
  }
  if (e.id == "delta") {
    auto ev = std::make_shared<DeltaEvent>(g, geo.n, T);
    return [ev](const BondConfiguration& w) { return (*ev)(w); };
  }
  if (e.id == "e") {
    auto ev = std::make_shared<EEvent>(g, geo.n);
    return [ev](const BondConfiguration& w) { return (*ev)(w); };
  }
  // theta
  const auto origin = g.vertex_id({0, 0});
  if (!origin) throw Error(ErrorKind::NotAVertex, "the origin is not a vertex of the window");
  const Coord far = ipow(L, geo.n);
  auto targets = std::make_shared<std::vector<VertexId>>();
  for (VertexId v = 0; v < static_cast<VertexId>(g.vertex_count()); ++v) {
    const Point& q = g.vertices()[v];
    if (q.x == far || q.y == far) targets->push_back(v);
  }
  const VertexId o = *origin;
  return [o, targets](const BondConfiguration& w) {
    const auto c = clusters(w);
    for (VertexId t : *targets)
      if (c.label[t] == c.label[o]) return true;
    return false;
  };
}

// ---------------------------------------------------------------------------------------------

double Estimate::ci_lo() const {
  const bool thin = successes < 5 || samples - successes < 5;
  return thin ? wilson_lo : normal_lo;
}

double Estimate::ci_hi() const {
  const bool thin = successes < 5 || samples - successes < 5;
  return thin ? wilson_hi : normal_hi;
}

Estimate make_estimate(std::string event, GeometrySpec geo, double p, std::uint64_t samples, std::uint64_t successes,
                       std::uint64_t seed) {
  if (successes > samples) throw Error(ErrorKind::Argument, "more successes than samples");
  Estimate e;
  e.event = std::move(event);
  e.geometry = std::move(geo);
  e.p = p;
  e.samples = samples;
  e.successes = successes;
  e.seed = seed;
  const double n = static_cast<double>(samples);
  e.mean = samples ? static_cast<double>(successes) / n : 0.0;
  e.stderr_ = samples ? std::sqrt(e.mean * (1.0 - e.mean) / n) : 0.0;
  e.normal_lo = std::max(0.0, e.mean - kZ95 * e.stderr_);
  e.normal_hi = std::min(1.0, e.mean + kZ95 * e.stderr_);
  if (samples) {
    const double z2 = kZ95 * kZ95;
    const double denom = 1.0 + z2 / n;
    const double centre = (e.mean + z2 / (2 * n)) / denom;
    const double half = kZ95 * std::sqrt(e.mean * (1 - e.mean) / n + z2 / (4 * n * n)) / denom;
    e.wilson_lo = std::max(0.0, centre - half);
    e.wilson_hi = std::min(1.0, centre + half);
  }
  return e;
}

std::uint64_t parallel_sum(std::uint64_t count, int workers, const std::function<std::uint64_t(std::uint64_t)>& f) {
  return parallel_sums(count, workers, 1, [&](std::uint64_t r, std::uint64_t* acc) { acc[0] += f(r); })[0];
}

Sampler::Sampler(const SpongeGraph& g) : g_(&g), prehash_(edge_prehash(g)) {}

std::vector<double> Sampler::uniforms(std::uint64_t seed, std::uint64_t replica, StreamTag tag) const {
  std::vector<double> u;
  fill_uniforms(prehash_, Stream{seed, tag, replica}, u);
  return u;
}

BondConfiguration Sampler::config(double p, std::uint64_t seed, std::uint64_t replica, StreamTag tag) const {
  auto w = threshold_bits(*g_, uniforms(seed, replica, tag), p);
  w.seed = seed;
  return w;
}

Estimate estimate_on(const Indicator& event, const std::string& id, const SpongeGraph& g, const GeometrySpec& geo,
                     double p, std::uint64_t samples, std::uint64_t seed, const RunOptions& opt) {
  check_p(p);
  check_samples(samples);
  const Sampler s(g);
  const auto hits = parallel_sum(samples, opt.workers, [&](std::uint64_t r) { return event(s.config(p, seed, r)) ? 1 : 0; });
  return make_estimate(id, geo, p, samples, hits, seed);
}

Estimate estimate(const EventSpec& e, const GeometrySpec& geo, double p, std::uint64_t samples, std::uint64_t seed,
                  const RunOptions& opt) {
  check_p(p);
  check_samples(samples);
  const SpongeGraph g = geo.build(opt.limits);
  return estimate_on(compile_event(e, geo, g), e.id, g, geo, p, samples, seed, opt);
}

std::vector<SweepRow> sweep(const EventSpec& e, const std::vector<double>& ps, const std::vector<int>& ns, int cols,
                            int rows, const std::string& generator, std::uint64_t samples, std::uint64_t seed,
                            bool coupled, const RunOptions& opt) {
  if (ps.empty() || ns.empty()) throw Error(ErrorKind::Argument, "sweep needs a non-empty p-grid and n-list");
  for (double p : ps) check_p(p);
  check_samples(samples);
  std::vector<double> pgrid = ps;
  std::vector<int> ngrid = ns;
  std::sort(pgrid.begin(), pgrid.end());
  std::sort(ngrid.begin(), ngrid.end());
  pgrid.erase(std::unique(pgrid.begin(), pgrid.end()), pgrid.end());
  ngrid.erase(std::unique(ngrid.begin(), ngrid.end()), ngrid.end());
  std::vector<SweepRow> out;
  std::uint64_t point = 0;
  for (int n : ngrid) {
    const GeometrySpec geo{generator, n, cols, rows};
    const SpongeGraph g = geo.build(opt.limits);
    const Indicator ev = compile_event(e, geo, g);
    for (double p : pgrid) {
      const std::uint64_t s = coupled ? seed : grid_seed(seed, point);
      out.push_back({n, cols, rows, p, estimate_on(ev, e.id, g, geo, p, samples, s, opt)});
      ++point;
    }
  }
  return out;
}

Estimate estimate_theta(double p, int n, std::uint64_t samples, std::uint64_t seed, const RunOptions& opt,
                        const std::string& generator) {
  return estimate(EventSpec{"theta"}, GeometrySpec{generator, n, 1, 1}, p, samples, seed, opt);
}

TauEstimate estimate_tau(double p, const Point& x, const Point& y, std::uint64_t samples, std::uint64_t seed,
                         const RunOptions& opt, const std::string& generator) {
  check_p(p);
  check_samples(samples);
  const GeneratorSet T = GeneratorSet::parse(generator);
  const Coord reach = std::max({std::abs(x.x), std::abs(x.y), std::abs(y.x), std::abs(y.y), Coord{1}});
  int k = 0;
  while (ipow(T.base(), k) < reach) ++k;
  const Coord half = ipow(T.base(), k + 1);
  const Rect window{-half, -half, half, half};
  const SpongeGraph g = build_region(window, T, opt.limits);
  for (const Point& q : {x, y})
    if (!g.has_vertex(q)) throw Error(ErrorKind::NotAVertex, "(" + std::to_string(q.x) + "," + std::to_string(q.y) + ") is not in S^T");
  const VertexId a = *g.vertex_id(x), b = *g.vertex_id(y);
  const Indicator ev = [a, b](const BondConfiguration& w) {
    if (a == b) return true;
    const auto c = clusters(w);
    return c.label[a] == c.label[b];
  };
  GeometrySpec geo{generator, k + 1, 2, 2};
  return {estimate_on(ev, "tau", g, geo, p, samples, seed, opt), window};
}

// ---------------------------------------------------------------------------------------------

namespace {

std::vector<std::uint32_t> order_by(const std::vector<double>& u) {
  std::vector<std::uint32_t> idx(u.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) { return u[a] < u[b] || (u[a] == u[b] && a < b); });
  return idx;
}

}  // namespace

std::vector<double> crossing_thresholds(const SpongeGraph& g, Direction d, std::uint64_t samples, std::uint64_t seed,
                                        const RunOptions& opt) {
  check_samples(samples);
  const Sampler s(g);
  const Rect& box = g.box();
  std::vector<std::uint8_t> side(g.vertex_count(), 0);
  for (std::size_t v = 0; v < side.size(); ++v) {
    const Point& q = g.vertices()[v];
    const Coord c = d == Direction::LeftRight ? q.x : q.y;
    const Coord lo = d == Direction::LeftRight ? box.x0 : box.y0;
    const Coord hi = d == Direction::LeftRight ? box.x1 : box.y1;
    side[v] = static_cast<std::uint8_t>((c == lo ? 1 : 0) | (c == hi ? 2 : 0));
  }
  std::vector<double> out(samples, 1.0);
  parallel_for(samples, opt.workers, [&](std::uint64_t r) {
    const auto u = s.uniforms(seed, r);
    DisjointSet ds(g.vertex_count());
    std::vector<std::uint8_t> flag = side;
    for (std::uint32_t e : order_by(u)) {
      const auto& edge = g.edges()[e];
      const std::size_t ra = ds.find(edge.u), rb = ds.find(edge.v);
      if (ra == rb) continue;
      const std::uint8_t f = flag[ra] | flag[rb];
      ds.unite(ra, rb);
      flag[ds.find(ra)] = f;
      if (f == 3) {
        out[r] = u[e];
        break;
      }
    }
  });
  return out;
}

std::vector<double> dual_crossing_thresholds(const SpongeGraph& g, Direction d, std::uint64_t samples,
                                             std::uint64_t seed, const RunOptions& opt) {
  check_samples(samples);
  const Sampler s(g);
  const DualGraph dual(g);
  const FaceId from = dual.sector(d == Direction::LeftRight ? Sector::Left : Sector::Bottom);
  const FaceId to = dual.sector(d == Direction::LeftRight ? Sector::Right : Sector::Top);
  const FaceId block1 = dual.sector(d == Direction::LeftRight ? Sector::Bottom : Sector::Left);
  const FaceId block2 = dual.sector(d == Direction::LeftRight ? Sector::Top : Sector::Right);
  std::vector<double> out(samples, 1.0);
  parallel_for(samples, opt.workers, [&](std::uint64_t r) {
    const auto u = s.uniforms(seed, r, StreamTag::Dual);
    DisjointSet ds(dual.face_count());
    // an edge is closed at closing probability q when u < q
    for (std::uint32_t e : order_by(u)) {
      const DualEdge& de = dual.edges()[e];
      if (de.a == block1 || de.a == block2 || de.b == block1 || de.b == block2) continue;
      ds.unite(static_cast<std::size_t>(de.a), static_cast<std::size_t>(de.b));
      if (ds.same(static_cast<std::size_t>(from), static_cast<std::size_t>(to))) {
        out[r] = u[e];
        break;
      }
    }
  });
  return out;
}

PcEstimate pc_from_thresholds(const std::vector<double>& thresholds, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::Domain, "tolerance must be positive");
  if (thresholds.empty()) throw Error(ErrorKind::Argument, "no thresholds");
  std::vector<double> t = thresholds;
  std::sort(t.begin(), t.end());
  const double n = static_cast<double>(t.size());
  auto frac = [&](double p) { return static_cast<double>(std::lower_bound(t.begin(), t.end(), p) - t.begin()) / n; };
  if (frac(0.0) > 0.5 || frac(1.0) < 0.5)
    throw Error(ErrorKind::Saturation, "crossing curve does not bracket 1/2 on [0,1]");
  PcEstimate out;
  while (out.hi - out.lo > tol) {
    const double mid = 0.5 * (out.lo + out.hi);
    (frac(mid) < 0.5 ? out.lo : out.hi) = mid;
    ++out.iterations;
  }
  out.p_hat = 0.5 * (out.lo + out.hi);
  const auto hits = static_cast<std::uint64_t>(std::lower_bound(t.begin(), t.end(), out.p_hat) - t.begin());
  out.at_p_hat = make_estimate("lr", {}, out.p_hat, t.size(), hits, 0);
  return out;
}

PcEstimate estimate_pc(int n, int cols, int rows, std::uint64_t samples, double tol, std::uint64_t seed,
                       const RunOptions& opt, const std::string& generator) {
  if (!(tol > 0.0)) throw Error(ErrorKind::Domain, "tolerance must be positive");
  const GeometrySpec geo{generator, n, cols, rows};
  const SpongeGraph g = geo.build(opt.limits);
  auto pc = pc_from_thresholds(crossing_thresholds(g, Direction::LeftRight, samples, seed, opt), tol);
  pc.at_p_hat.geometry = geo;
  pc.at_p_hat.seed = seed;
  return pc;
}

PcEstimate estimate_pc_dual(int n, int cols, int rows, std::uint64_t samples, double tol, std::uint64_t seed,
                            const RunOptions& opt, const std::string& generator) {
  if (!(tol > 0.0)) throw Error(ErrorKind::Domain, "tolerance must be positive");
  const GeometrySpec geo{generator, n, cols, rows};
  const SpongeGraph g = geo.build(opt.limits);
  const auto q = pc_from_thresholds(dual_crossing_thresholds(g, Direction::LeftRight, samples, seed, opt), tol);
  PcEstimate out = q;
  out.p_hat = 1.0 - q.p_hat;
  out.lo = 1.0 - q.hi;
  out.hi = 1.0 - q.lo;
  out.at_p_hat.event = "dual-lr";
  out.at_p_hat.geometry = geo;
  out.at_p_hat.seed = seed;
  return out;
}

// ---------------------------------------------------------------------------------------------

namespace {

struct PivotalCounter {
  std::shared_ptr<DualGraph> dual;
  std::optional<Direction> dir;
  Indicator event;

  std::size_t operator()(const BondConfiguration& w) const {
    if (dir) return pivotal_crossing_edges(w, *dual, *dir).size();
    return pivotal_edges(w, event).size();
  }
};

PivotalCounter make_counter(const EventSpec& e, const SpongeGraph& g, const Indicator& ev) {
  PivotalCounter c;
  c.event = ev;
  if (e.id == "lr" || e.id == "ud") {
    c.dual = std::make_shared<DualGraph>(g);
    c.dir = e.id == "lr" ? Direction::LeftRight : Direction::UpDown;
  }
  return c;
}

}  // namespace

RussoReport russo_check(const EventSpec& e, const GeometrySpec& geo, double p, double h, std::uint64_t samples,
                        std::uint64_t seed, const RunOptions& opt) {
  check_p(p);
  if (!(h > 0.0 && h < std::min(p, 1.0 - p))) throw Error(ErrorKind::Domain, "need 0 < h < min(p, 1-p)");
  if (!e.increasing()) throw Error(ErrorKind::Argument, "Russo check needs an increasing event");
  check_samples(samples);
  const SpongeGraph g = geo.build(opt.limits);
  const Indicator ev = compile_event(e, geo, g);
  const PivotalCounter count = make_counter(e, g, ev);
  const Sampler s(g);
  // counters: replicas with the event at p+h but not at p-h, sum N, sum N^2
  const auto acc = parallel_sums(samples, opt.workers, 3, [&](std::uint64_t r, std::uint64_t* a) {
    const auto u = s.uniforms(seed, r);
    const bool up = ev(threshold_bits(g, u, p + h));
    const bool down = ev(threshold_bits(g, u, p - h));
    if (up && !down) a[0] += 1;
    const auto n = static_cast<std::uint64_t>(count(threshold_bits(g, u, p)));
    a[1] += n;
    a[2] += n * n;
  });
  const double S = static_cast<double>(samples);
  RussoReport rep;
  rep.p = p;
  rep.h = h;
  rep.samples = samples;
  const double q = static_cast<double>(acc[0]) / S;
  rep.derivative = q / (2 * h);
  rep.derivative_se = std::sqrt(q * (1 - q) / S) / (2 * h);
  rep.pivotal_mean = static_cast<double>(acc[1]) / S;
  const double var = std::max(0.0, static_cast<double>(acc[2]) / S - rep.pivotal_mean * rep.pivotal_mean);
  rep.pivotal_se = std::sqrt(var / S);
  rep.pooled_se = std::hypot(rep.derivative_se, rep.pivotal_se);
  rep.pass = std::abs(rep.derivative - rep.pivotal_mean) <= 3 * rep.pooled_se + 1e-12;
  return rep;
}

MeanEstimate conditional_pivotal(const EventSpec& e, const GeometrySpec& geo, double p, std::uint64_t samples,
                                 std::uint64_t budget, std::uint64_t seed, const RunOptions& opt) {
  check_p(p);
  check_samples(samples);
  const SpongeGraph g = geo.build(opt.limits);
  const Indicator ev = compile_event(e, geo, g);
  const PivotalCounter count = make_counter(e, g, ev);
  const Sampler s(g);
  MeanEstimate out;
  double sum = 0.0, sum2 = 0.0;
  const std::uint64_t batch = 256 * static_cast<std::uint64_t>(std::max(opt.workers, 1));
  // replicas are accepted in index order, so the result does not depend on the worker count
  while (out.accepted < samples && out.attempts < budget) {
    const std::uint64_t base = out.attempts;
    const std::uint64_t len = std::min(batch, budget - base);
    std::vector<std::int64_t> pivots(len, -1);
    parallel_for(len, opt.workers, [&](std::uint64_t i) {
      const auto w = s.config(p, seed, base + i);
      if (ev(w)) pivots[i] = static_cast<std::int64_t>(count(w));
    });
    for (std::uint64_t i = 0; i < len && out.accepted < samples; ++i) {
      ++out.attempts;
      if (pivots[i] < 0) continue;
      ++out.accepted;
      sum += static_cast<double>(pivots[i]);
      sum2 += static_cast<double>(pivots[i]) * static_cast<double>(pivots[i]);
    }
    if (out.accepted >= samples) break;
  }
  if (out.accepted == 0)
    throw Error(ErrorKind::Starvation, "no replica satisfied '" + e.id + "' in " + std::to_string(out.attempts) + " attempts");
  const double k = static_cast<double>(out.accepted);
  out.mean = sum / k;
  out.stderr_ = std::sqrt(std::max(0.0, sum2 / k - out.mean * out.mean) / k);
  return out;
}

// ---------------------------------------------------------------------------------------------

const char* estimate_csv_header() { return "event,n,cols,rows,p,samples,successes,mean,stderr,ci_lo,ci_hi,seed"; }

std::string to_csv_row(const Estimate& e) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s,%d,%d,%d,%.10g,%llu,%llu,%.10g,%.10g,%.10g,%.10g,%llu", e.event.c_str(),
                e.geometry.n, e.geometry.cols, e.geometry.rows, e.p, static_cast<unsigned long long>(e.samples),
                static_cast<unsigned long long>(e.successes), e.mean, e.stderr_, e.ci_lo(), e.ci_hi(),
                static_cast<unsigned long long>(e.seed));
  return buf;
}

}  // namespace carpetperc
