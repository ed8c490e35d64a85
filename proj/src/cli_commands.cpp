#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <json.hpp>

#include "carpetperc/branching.hpp"
#include "carpetperc/dual.hpp"
#include "carpetperc/error.hpp"
#include "carpetperc/estimator.hpp"
#include "carpetperc/paperevents.hpp"
#include "carpetperc/recursion.hpp"
#include "carpetperc/svg.hpp"
#include "cli_internal.hpp"

namespace carpetperc::cli {

using nlohmann::json;

namespace {

const std::vector<std::string> kEvents{"delta", "chain", "surround", "e", "c-bl", "c-all", "d-implication", "pivotal", "lowest"};
const std::vector<std::string> kTables{"f", "g", "phi", "psi", "xeps", "peps", "gw"};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

bool one_of(const std::string& s, const std::vector<std::string>& set) {
  return std::find(set.begin(), set.end(), s) != set.end();
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::Argument, what);
}

GeometrySpec geometry(const Context& ctx) { return {ctx.cfg.generator, ctx.cfg.n, ctx.cfg.cols, ctx.cfg.rows}; }

SpongeGraph window(const Context& ctx) {
  return build_sponge(ctx.cfg.n, ctx.cfg.cols, ctx.cfg.rows, ctx.T, {}, ctx.limits);
}

RunOptions options(const Context& ctx) { return RunOptions{ctx.cfg.workers, ctx.limits}; }

json rect_json(const Rect& r) { return json::array({r.x0, r.y0, r.x1, r.y1}); }

std::string estimates_json(const std::vector<Estimate>& es) {
  json arr = json::array();
  for (const auto& e : es)
    arr.push_back({{"event", e.event}, {"geometry", e.geometry.describe()}, {"n", e.geometry.n},
                   {"cols", e.geometry.cols}, {"rows", e.geometry.rows}, {"p", e.p}, {"samples", e.samples},
                   {"successes", e.successes}, {"mean", e.mean}, {"stderr", e.stderr_},
                   {"ci_normal", {e.normal_lo, e.normal_hi}}, {"ci_wilson", {e.wilson_lo, e.wilson_hi}},
                   {"ci_lo", e.ci_lo()}, {"ci_hi", e.ci_hi()}, {"seed", e.seed}});
  return arr.dump(2) + "\n";
}

std::string estimates_out(const Context& ctx, const std::vector<Estimate>& es) {
  if (ctx.cfg.format == "json") return estimates_json(es);
  std::string s = std::string(estimate_csv_header()) + "\n";
  for (const auto& e : es) s += to_csv_row(e) + "\n";
  return s;
}

}  // namespace

Point parse_point(const std::string& text) {
  const auto comma = text.find(',');
  try {
    if (comma == std::string::npos) throw std::invalid_argument(text);
    std::size_t u1 = 0, u2 = 0;
    const std::string a = text.substr(0, comma), b = text.substr(comma + 1);
    const Coord x = std::stoll(a, &u1), y = std::stoll(b, &u2);
    if (u1 != a.size() || u2 != b.size()) throw std::invalid_argument(text);
    return {x, y};
  } catch (const std::exception&) {
    throw Error(ErrorKind::Parse, "point '" + text + "' must be x,y");
  }
}

const std::vector<std::string>& formats_of(const std::string& sub) {
  static const std::map<std::string, std::vector<std::string>> table{
      {"lattice", {"json", "svg", "counts"}}, {"dual", {"json", "svg"}},     {"sample", {"bits", "svg"}},
      {"events", {"csv"}},                    {"estimate", {"csv", "json"}}, {"sweep", {"csv", "json"}},
      {"pc", {"csv", "json"}},                {"theta", {"csv", "json"}},    {"tau", {"csv", "json"}},
      {"russo", {"csv", "json"}},             {"recursion", {"csv"}},        {"branching", {"json", "csv", "svg"}}};
  const auto it = table.find(sub);
  if (it == table.end()) throw Error(ErrorKind::Argument, "unknown subcommand '" + sub + "'");
  return it->second;
}

void validate(const RunConfig& c) {
  const auto& fmts = formats_of(c.subcommand);
  require(c.format.empty() || one_of(c.format, fmts), "--format for " + c.subcommand + " must be one of the listed values");
  require(c.workers >= 1, "--workers must be at least 1");
  require(c.max_level >= 0, "--max-level must be non-negative");
  require(c.n >= 0, "--n must be non-negative");
  require(c.cols >= 1 && c.rows >= 1, "--cols and --rows must be at least 1");
  require(c.p >= 0.0 && c.p <= 1.0, "--p must lie in [0,1]");
  require(c.samples >= 1, "--samples must be at least 1");
  require(c.tol > 0.0, "--tol must be positive");
  require(c.h > 0.0, "--h must be positive");
  require(c.k >= 1, "--k must be at least 1");
  GeneratorSet::parse(c.generator);
  if (c.subcommand == "events") require(one_of(c.event, kEvents), "unknown --event '" + c.event + "'");
  if (c.subcommand == "estimate" || c.subcommand == "sweep" || c.subcommand == "russo")
    require(one_of(c.event, EventSpec::known()), "unknown --event '" + c.event + "'");
  if (c.subcommand == "recursion") require(one_of(c.table, kTables), "unknown --table '" + c.table + "'");
  if (c.subcommand == "sweep") {
    for (double p : parse_grid(c.p_grid)) require(p >= 0.0 && p <= 1.0, "--p-grid values must lie in [0,1]");
    for (int n : parse_int_list(c.n_list)) require(n >= 0, "--n-list values must be non-negative");
  }
  if (c.subcommand == "recursion") parse_grid(c.grid);
  if (c.subcommand == "tau" || c.subcommand == "events") {
    parse_point(c.x);
    parse_point(c.y);
  }
  if (c.subcommand == "branching") {
    require(c.m >= 1 && c.big_n >= c.m, "--N and --m need N >= m >= 1");
    require(!(c.audit && c.sample), "--audit and --sample are exclusive");
  }
  if (c.subcommand == "russo" && !c.conditional)
    require(c.h < std::min(c.p, 1.0 - c.p), "--h must be below min(p, 1-p)");
}

// ---------------------------------------------------------------------------------------------

Output cmd_lattice(const Context& ctx) {
  const auto g = window(ctx);
  if (ctx.cfg.format == "svg") return {svg_graph(g), {}};
  if (ctx.cfg.format == "counts") {
    return {"level,cols,rows,vertices,edges\n" + std::to_string(ctx.cfg.n) + "," + std::to_string(ctx.cfg.cols) + "," +
                std::to_string(ctx.cfg.rows) + "," + std::to_string(g.vertex_count()) + "," +
                std::to_string(g.edge_count()) + "\n",
            {}};
  }
  json vs = json::array(), es = json::array();
  for (const auto& v : g.vertices()) vs.push_back({v.x, v.y});
  for (const auto& e : g.edges()) es.push_back({e.u, e.v});
  json j{{"level", ctx.cfg.n}, {"cols", ctx.cfg.cols}, {"rows", ctx.cfg.rows}, {"generator", ctx.T.to_string()},
         {"vertices", vs}, {"edges", es}};
  return {j.dump() + "\n", {}};
}

Output cmd_dual(const Context& ctx) {
  const auto g = window(ctx);
  const DualGraph d(g);
  if (ctx.cfg.format == "svg") return {svg_dual(d), {}};
  json faces = json::array();
  for (std::size_t f = 0; f < d.face_count(); ++f) {
    const Face& face = d.faces()[f];
    json jf{{"id", f}, {"kind", to_string(face.kind)}};
    if (face.kind == FaceKind::Sector) {
      jf["sector"] = to_string(static_cast<Sector>(f - d.finite_face_count()));
    } else {
      jf["first_square"] = {face.first_square.x, face.first_square.y};
      jf["squares"] = face.squares;
      jf["bounds"] = rect_json(face.bounds);
    }
    faces.push_back(jf);
  }
  json edges = json::array(), bijection = json::array();
  for (std::size_t e = 0; e < d.edges().size(); ++e) {
    edges.push_back({d.edges()[e].a, d.edges()[e].b});
    bijection.push_back(d.edges()[e].primal);
  }
  json j{{"level", ctx.cfg.n}, {"cols", ctx.cfg.cols}, {"rows", ctx.cfg.rows}, {"finite_faces", d.finite_face_count()},
         {"faces", faces}, {"edges", edges}, {"primal_to_dual", bijection}};
  return {j.dump() + "\n", {}};
}

Output cmd_sample(const Context& ctx) {
  const auto g = window(ctx);
  const auto w = sample_config(g, ctx.cfg.p, ctx.cfg.seed);
  if (ctx.cfg.format == "svg") return {svg_configuration(w, ctx.cfg.dual_overlay), {}};
  std::string bits;
  bits.reserve(w.size() + 1);
  for (auto b : w.bits()) bits.push_back(b ? '1' : '0');
  return {bits + "\n", {}};
}

// ---------------------------------------------------------------------------------------------

namespace {

struct EventRun {
  SpongeGraph g;
  // indicator, a per-sample value and whether the sample violates the event's guarantee
  std::function<bool(const BondConfiguration&, double&, bool&)> eval;
  std::string value_name;
};

EventRun make_event_run(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const int n = c.n;
  const Coord s = ipow(ctx.T.base(), n);
  EventRun run;
  const std::string& id = c.event;
  if (id == "surround") {
    const Point x = parse_point(c.x);
    const Point w = nth_box_any(x, n, ctx.T);
    run.g = build_region({w.x - 2 * s, w.y - 2 * s, w.x + 3 * s, w.y + 3 * s}, ctx.T, ctx.limits);
  } else if (id == "c-bl" || id == "c-all" || id == "d-implication") {
    run.g = build_region(c_event_region(n), ctx.T, ctx.limits);
  } else {
    run.g = window(ctx);
  }
  const SpongeGraph& g = run.g;
  if (id == "delta") {
    auto ev = std::make_shared<DeltaEvent>(g, n, ctx.T);
    run.eval = [ev](const BondConfiguration& w, double&, bool& bad) {
      bad = !ev->audit(w);
      return (*ev)(w);
    };
  } else if (id == "chain") {
    const Point x = parse_point(c.x);
    auto ev = std::make_shared<DeltaChainEvent>(g, x, c.m0, ctx.T);
    run.eval = [ev, x](const BondConfiguration& w, double&, bool& bad) {
      const bool hit = (*ev)(w);
      bad = hit && !connected(w, {0, 0}, x);
      return hit;
    };
  } else if (id == "surround") {
    auto ev = std::make_shared<SurroundEvent>(g, parse_point(c.x), n, ctx.T);
    run.eval = [ev](const BondConfiguration& w, double&, bool& bad) {
      bad = !ev->audit(w);
      return (*ev)(w);
    };
  } else if (id == "e") {
    auto ev = std::make_shared<EEvent>(g, n);
    run.eval = [ev](const BondConfiguration& w, double&, bool&) { return (*ev)(w); };
  } else if (id == "c-bl") {
    auto ev = std::make_shared<CEvent>(g, n, Corner::BottomLeft);
    run.eval = [ev](const BondConfiguration& w, double&, bool&) { return (*ev)(w); };
  } else if (id == "c-all") {
    auto ev = std::make_shared<CComposite>(g, n, CornerSet::All);
    run.eval = [ev](const BondConfiguration& w, double&, bool&) { return (*ev)(w); };
  } else if (id == "d-implication") {
    auto ev = std::make_shared<DImplicationCheck>(g, n);
    run.value_name = "target";
    run.eval = [ev](const BondConfiguration& w, double& value, bool& bad) {
      const auto r = (*ev)(w);
      value = r.target ? 1 : 0;
      bad = !r.holds();
      return r.top || r.bottom;
    };
  } else if (id == "pivotal") {
    auto d = std::make_shared<DualGraph>(g);
    run.value_name = "pivotal_edges";
    run.eval = [d](const BondConfiguration& w, double& value, bool&) {
      value = static_cast<double>(pivotal_crossing_edges(w, *d, Direction::LeftRight).size());
      return has_crossing(w, Direction::LeftRight);
    };
  } else {
    auto d = std::make_shared<DualGraph>(g);
    run.value_name = "path_edges";
    run.eval = [d](const BondConfiguration& w, double& value, bool&) {
      const auto r = lowest_crossing(w, *d);
      value = r ? static_cast<double>(r->edges.size()) : 0.0;
      return r.has_value();
    };
  }
  return run;
}

}  // namespace

Output cmd_events(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const EventRun run = make_event_run(ctx);
  const Sampler sampler(run.g);
  std::ostringstream csv;
  csv << "sample_index,indicator" << (run.value_name.empty() ? "" : "," + run.value_name) << "\n";
  std::uint64_t hits = 0, violations = 0;
  double total = 0.0;
  for (std::uint64_t r = 0; r < c.samples; ++r) {
    double value = 0.0;
    bool bad = false;
    const bool hit = run.eval(sampler.config(c.p, c.seed, r), value, bad);
    hits += hit ? 1 : 0;
    violations += bad ? 1 : 0;
    total += value;
    csv << r << ',' << (hit ? 1 : 0);
    if (!run.value_name.empty()) csv << ',' << num(value);
    csv << "\n";
  }
  const auto est = make_estimate(c.event, geometry(ctx), c.p, c.samples, hits, c.seed);
  json summary{{"event", c.event},     {"window", rect_json(run.g.box())}, {"p", c.p},
               {"samples", c.samples}, {"seed", c.seed},                   {"hits", hits},
               {"rate", est.mean},     {"stderr", est.stderr_},            {"violations", violations}};
  if (!run.value_name.empty()) summary["mean_" + run.value_name] = total / static_cast<double>(c.samples);
  return {csv.str(), summary.dump() + "\n"};
}

Output cmd_estimate(const Context& ctx) {
  const auto e = estimate(EventSpec{ctx.cfg.event}, geometry(ctx), ctx.cfg.p, ctx.cfg.samples, ctx.cfg.seed, options(ctx));
  return {estimates_out(ctx, {e}), {}};
}

Output cmd_sweep(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const auto rows = sweep(EventSpec{c.event}, parse_grid(c.p_grid), parse_int_list(c.n_list), c.cols, c.rows,
                          c.generator, c.samples, c.seed, c.coupled, options(ctx));
  if (c.format == "json") {
    std::vector<Estimate> es;
    for (const auto& r : rows) es.push_back(r.est);
    return {estimates_json(es), {}};
  }
  std::map<int, int> n_index;
  std::map<double, int> p_index;
  for (const auto& r : rows) {
    n_index.emplace(r.n, 0);
    p_index.emplace(r.p, 0);
  }
  int i = 0;
  for (auto& [k, v] : n_index) v = i++;
  i = 0;
  for (auto& [k, v] : p_index) v = i++;
  std::string s = std::string("i_n,i_p,") + estimate_csv_header() + "\n";
  for (const auto& r : rows)
    s += std::to_string(n_index[r.n]) + "," + std::to_string(p_index[r.p]) + "," + to_csv_row(r.est) + "\n";
  return {s, {}};
}

Output cmd_pc(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const auto pc = c.dual ? estimate_pc_dual(c.n, c.cols, c.rows, c.samples, c.tol, c.seed, options(ctx), c.generator)
                         : estimate_pc(c.n, c.cols, c.rows, c.samples, c.tol, c.seed, options(ctx), c.generator);
  const std::string method = c.dual ? "dual" : "primal";
  if (c.format == "json") {
    json j{{"method", method}, {"generator", c.generator}, {"n", c.n},        {"cols", c.cols},
           {"rows", c.rows},   {"samples", c.samples},     {"tol", c.tol},    {"p_hat", pc.p_hat},
           {"lo", pc.lo},      {"hi", pc.hi},              {"iterations", pc.iterations}, {"seed", c.seed}};
    return {j.dump(2) + "\n", {}};
  }
  return {"method,generator,n,cols,rows,samples,tol,p_hat,lo,hi,iterations,seed\n" + method + "," + c.generator + "," +
              std::to_string(c.n) + "," + std::to_string(c.cols) + "," + std::to_string(c.rows) + "," +
              std::to_string(c.samples) + "," + num(c.tol) + "," + num(pc.p_hat) + "," + num(pc.lo) + "," +
              num(pc.hi) + "," + std::to_string(pc.iterations) + "," + std::to_string(c.seed) + "\n",
          {}};
}

Output cmd_theta(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  return {estimates_out(ctx, {estimate_theta(c.p, c.n, c.samples, c.seed, options(ctx), c.generator)}), {}};
}

Output cmd_tau(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const auto t = estimate_tau(c.p, parse_point(c.x), parse_point(c.y), c.samples, c.seed, options(ctx), c.generator);
  json summary{{"window", rect_json(t.window)}, {"x", c.x}, {"y", c.y}};
  return {estimates_out(ctx, {t.est}), summary.dump() + "\n"};
}

Output cmd_russo(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  if (c.conditional) {
    const std::uint64_t budget = c.budget ? c.budget : 100 * c.samples;
    const auto m = conditional_pivotal(EventSpec{c.event}, geometry(ctx), c.p, c.samples, budget, c.seed, options(ctx));
    if (c.format == "json") {
      json j{{"event", c.event}, {"p", c.p}, {"accepted", m.accepted}, {"attempts", m.attempts},
             {"mean", m.mean},   {"stderr", m.stderr_}, {"seed", c.seed}};
      return {j.dump(2) + "\n", {}};
    }
    return {"event,n,cols,rows,p,accepted,attempts,mean,stderr,seed\n" + c.event + "," + std::to_string(c.n) + "," +
                std::to_string(c.cols) + "," + std::to_string(c.rows) + "," + num(c.p) + "," +
                std::to_string(m.accepted) + "," + std::to_string(m.attempts) + "," + num(m.mean) + "," +
                num(m.stderr_) + "," + std::to_string(c.seed) + "\n",
            {}};
  }
  const auto r = russo_check(EventSpec{c.event}, geometry(ctx), c.p, c.h, c.samples, c.seed, options(ctx));
  if (c.format == "json") {
    json j{{"event", c.event},           {"p", r.p},
           {"h", r.h},                   {"samples", r.samples},
           {"derivative", r.derivative}, {"derivative_se", r.derivative_se},
           {"pivotal_mean", r.pivotal_mean}, {"pivotal_se", r.pivotal_se},
           {"pooled_se", r.pooled_se},   {"pass", r.pass}};
    return {j.dump(2) + "\n", {}};
  }
  return {"event,n,cols,rows,p,h,samples,derivative,derivative_se,pivotal_mean,pivotal_se,pooled_se,pass\n" + c.event +
              "," + std::to_string(c.n) + "," + std::to_string(c.cols) + "," + std::to_string(c.rows) + "," + num(r.p) +
              "," + num(r.h) + "," + std::to_string(r.samples) + "," + num(r.derivative) + "," + num(r.derivative_se) +
              "," + num(r.pivotal_mean) + "," + num(r.pivotal_se) + "," + num(r.pooled_se) + "," +
              (r.pass ? "1" : "0") + "\n",
          {}};
}

Output cmd_recursion(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const auto grid = parse_grid(c.grid);
  std::ostringstream o;
  const std::string& t = c.table;
  if (t == "f") o << "k,x,value,residual\n";
  else if (t == "g") o << "k,a,b,value,residual\n";
  else if (t == "xeps" || t == "peps") o << "eps,value,residual\n";
  else if (t == "gw") o << "p,value,residual\n";
  else o << "x,value,residual\n";
  for (double v : grid) {
    if (t == "f") {
      o << c.k << ',' << num(v) << ',' << num(eval_f(c.k, v)) << ",0\n";
    } else if (t == "g") {
      o << c.k << ',' << num(v) << ',' << num(v) << ',' << num(eval_g(c.k, v, v)) << ",0\n";
    } else if (t == "phi") {
      o << num(v) << ',' << num(eval_phi(v)) << ",0\n";
    } else if (t == "psi") {
      o << num(v) << ',' << num(eval_psi(v)) << ",0\n";
    } else if (t == "xeps" || t == "peps") {
      const auto r = t == "xeps" ? solve_x_eps(v) : solve_p_eps(v);
      o << num(v) << ',' << num(r.value) << ',' << num(r.residual) << "\n";
    } else {
      const double q = gw_extinction(v);
      const double pgf = (1 - v + v * q) * (1 - v + v * q);
      o << num(v) << ',' << num(q) << ',' << num(std::abs(pgf - q)) << "\n";
    }
  }
  return {o.str(), {}};
}

Output cmd_branching(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const int N = c.big_n, m = c.m;
  std::vector<BoxSpec> boxes;
  for (const auto& t : tree_nodes(N - m)) {
    boxes.push_back(build_box(t, N));
    boxes.push_back(mirror_box(t, N));
  }
  if (c.sample || c.format == "csv") {
    const auto g = build_branching_window(N, m, ctx.T, ctx.limits);
    const BranchingField field(g, N, m);
    const Sampler sampler(g);
    std::ostringstream o;
    o << "sample,node,X,X_dagger,Z\n";
    std::uint64_t root = 0;
    for (std::uint64_t r = 0; r < c.samples; ++r) {
      const auto f = field(sampler.config(c.p, c.seed, r));
      root += f.z(0);
      for (std::size_t i = 0; i < f.size(); ++i)
        o << r << ',' << field.nodes()[i].to_string() << ',' << int(f.x[i]) << ',' << int(f.x_dagger[i]) << ','
          << int(f.z(i)) << "\n";
    }
    json summary{{"N", N}, {"m", m}, {"p", c.p}, {"samples", c.samples}, {"seed", c.seed},
                 {"root_rate", static_cast<double>(root) / static_cast<double>(c.samples)}};
    return {o.str(), summary.dump() + "\n"};
  }
  if (c.format == "svg") return {svg_boxes(boxes), {}};
  json jb = json::array();
  for (const auto& b : boxes) {
    json pieces = json::array();
    for (const auto& p : b.pieces) pieces.push_back({{"name", p.name}, {"rect", rect_json(p.rect)}, {"dir", to_string(p.dir)}});
    jb.push_back({{"index", b.index.to_string()},
                  {"mirror", b.mirror},
                  {"kind", b.kind == BoxKind::Straight ? "straight" : "branching"},
                  {"anchor", {b.anchor.x, b.anchor.y}},
                  {"quarter_turns", b.orientation.quarter_turns},
                  {"pieces", pieces}});
  }
  json j{{"N", N}, {"m", m}, {"boxes", jb}};
  if (N - m >= 1) {
    json qs = json::array();
    for (const auto& t : tree_nodes(N - m))
      if (t.depth() == N - m) qs.push_back({{"index", t.to_string()}, {"rect", rect_json(q_square(t, N, m))}});
    j["q_squares"] = qs;
  }
  if (c.audit) {
    const auto rep = geometry_audit(N, m, ctx.T, true);
    j["audit"] = {{"clean", rep.clean()},
                  {"boundary_violations", rep.boundary_violations},
                  {"overlap_violations", rep.overlap_violations},
                  {"q_violations", rep.q_violations},
                  {"interior_hole_cells", rep.interior_hole_cells},
                  {"messages", rep.messages}};
  }
  return {j.dump(2) + "\n", {}};
}

}  // namespace carpetperc::cli
