#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "carpetperc/branching.hpp"
#include "carpetperc/cli.hpp"
#include "carpetperc/dual.hpp"
#include "carpetperc/error.hpp"
#include "carpetperc/estimator.hpp"
#include "carpetperc/lattice.hpp"
#include "carpetperc/paperevents.hpp"
#include "carpetperc/percolation.hpp"
#include "carpetperc/recursion.hpp"

namespace py = pybind11;
using namespace carpetperc;

namespace {

Direction direction(const std::string& s) {
  if (s == "lr") return Direction::LeftRight;
  if (s == "ud") return Direction::UpDown;
  throw Error(ErrorKind::Argument, "direction must be 'lr' or 'ud'");
}

py::tuple point(const Point& p) { return py::make_tuple(p.x, p.y); }
py::tuple rect(const Rect& r) { return py::make_tuple(r.x0, r.y0, r.x1, r.y1); }

py::dict estimate_dict(const Estimate& e) {
  py::dict d;
  d["event"] = e.event;
  d["geometry"] = e.geometry.describe();
  d["p"] = e.p;
  d["samples"] = e.samples;
  d["successes"] = e.successes;
  d["mean"] = e.mean;
  d["stderr"] = e.stderr_;
  d["ci_lo"] = e.ci_lo();
  d["ci_hi"] = e.ci_hi();
  d["wilson"] = py::make_tuple(e.wilson_lo, e.wilson_hi);
  d["seed"] = e.seed;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bond percolation on generalized Sierpinski carpets";
  py::register_exception<Error>(m, "CarpetError", PyExc_ValueError);

  py::class_<GeneratorSet>(m, "GeneratorSet")
      .def_static("carpet3", &GeneratorSet::carpet3)
      .def_static("full", &GeneratorSet::full, py::arg("base"))
      .def_static("parse", &GeneratorSet::parse, py::arg("text"))
      .def_property_readonly("base", &GeneratorSet::base)
      .def_property_readonly("cells", &GeneratorSet::cells)
      .def("__repr__", &GeneratorSet::to_string);

  py::class_<SpongeGraph>(m, "SpongeGraph")
      .def_property_readonly("vertex_count", &SpongeGraph::vertex_count)
      .def_property_readonly("edge_count", &SpongeGraph::edge_count)
      .def_property_readonly("box", [](const SpongeGraph& g) { return rect(g.box()); })
      .def("vertices", [](const SpongeGraph& g) {
        py::list out;
        for (const auto& v : g.vertices()) out.append(point(v));
        return out;
      })
      .def("edges", [](const SpongeGraph& g) {
        py::list out;
        for (const auto& e : g.edges()) out.append(py::make_tuple(e.u, e.v));
        return out;
      })
      .def("has_vertex", [](const SpongeGraph& g, Coord x, Coord y) { return g.has_vertex({x, y}); })
      .def("finite_face_count", [](const SpongeGraph& g) { return DualGraph(g).finite_face_count(); });

  m.def(
      "build_sponge",
      [](int n, int cols, int rows, const std::string& generator) {
        return build_sponge(n, cols, rows, GeneratorSet::parse(generator));
      },
      py::arg("n"), py::arg("cols") = 1, py::arg("rows") = 1, py::arg("generator") = "carpet3");
  m.def(
      "build_region",
      [](Coord x0, Coord y0, Coord x1, Coord y1, const std::string& generator) {
        return build_region({x0, y0, x1, y1}, GeneratorSet::parse(generator));
      },
      py::arg("x0"), py::arg("y0"), py::arg("x1"), py::arg("y1"), py::arg("generator") = "carpet3");

  py::class_<BondConfiguration>(m, "BondConfiguration")
      .def(py::init([](const SpongeGraph& g, std::vector<std::uint8_t> bits) {
             if (bits.size() != g.edge_count()) throw Error(ErrorKind::Argument, "one bit per edge is required");
             return BondConfiguration(g, std::move(bits));
           }),
           py::arg("graph"), py::arg("bits"), py::keep_alive<1, 2>())
      .def_property_readonly("bits", &BondConfiguration::bits)
      .def_property_readonly("open_count", &BondConfiguration::open_count)
      .def("__len__", &BondConfiguration::size);

  m.def("sample_config", &sample_config, py::arg("graph"), py::arg("p"), py::arg("seed"), py::arg("replica") = 0,
        py::keep_alive<0, 1>());
  m.def(
      "has_crossing", [](const BondConfiguration& w, const std::string& d) { return has_crossing(w, direction(d)); },
      py::arg("config"), py::arg("direction") = "lr");
  m.def(
      "has_dual_crossing",
      [](const BondConfiguration& w, const std::string& d) {
        return has_dual_crossing(w, DualGraph(w.graph()), direction(d));
      },
      py::arg("config"), py::arg("direction") = "ud");
  m.def(
      "connected",
      [](const BondConfiguration& w, py::tuple x, py::tuple y) {
        return connected(w, {x[0].cast<Coord>(), x[1].cast<Coord>()}, {y[0].cast<Coord>(), y[1].cast<Coord>()});
      },
      py::arg("config"), py::arg("x"), py::arg("y"));
  m.def(
      "pivotal_edges",
      [](const BondConfiguration& w, const std::string& d) {
        return pivotal_crossing_edges(w, DualGraph(w.graph()), direction(d));
      },
      py::arg("config"), py::arg("direction") = "lr");
  m.def(
      "lowest_crossing",
      [](const BondConfiguration& w) -> py::object {
        const auto r = lowest_crossing(w);
        if (!r) return py::none();
        return py::cast(r->edges);
      },
      py::arg("config"));
  m.def(
      "detect_delta",
      [](const BondConfiguration& w, int n) { return detect_delta(w, n, GeneratorSet::carpet3()); },
      py::arg("config"), py::arg("n"));

  m.def("eval_f", &eval_f, py::arg("k"), py::arg("x"));
  m.def("eval_g", &eval_g, py::arg("k"), py::arg("a"), py::arg("b"));
  m.def("eval_phi", &eval_phi, py::arg("x"));
  m.def("eval_psi", &eval_psi, py::arg("x"));
  m.def("solve_x_eps", [](double e) { const auto r = solve_x_eps(e); return py::make_tuple(r.value, r.residual); });
  m.def("solve_p_eps", [](double e) { const auto r = solve_p_eps(e); return py::make_tuple(r.value, r.residual); });
  m.def("gw_extinction", &gw_extinction, py::arg("p"));

  m.def(
      "estimate",
      [](const std::string& event, int n, int cols, int rows, double p, std::uint64_t samples, std::uint64_t seed,
         const std::string& generator, int workers) {
        py::gil_scoped_release release;
        const auto e = estimate(EventSpec{event}, GeometrySpec{generator, n, cols, rows}, p, samples, seed,
                                RunOptions{workers, Limits::from_env()});
        py::gil_scoped_acquire acquire;
        return estimate_dict(e);
      },
      py::arg("event"), py::arg("n"), py::arg("cols") = 1, py::arg("rows") = 1, py::arg("p") = 0.5,
      py::arg("samples") = 1000, py::arg("seed") = 1, py::arg("generator") = "carpet3", py::arg("workers") = 1);
  m.def(
      "estimate_pc",
      [](int n, int cols, int rows, std::uint64_t samples, double tol, std::uint64_t seed, bool dual,
         const std::string& generator) {
        const auto pc = dual ? estimate_pc_dual(n, cols, rows, samples, tol, seed, {}, generator)
                             : estimate_pc(n, cols, rows, samples, tol, seed, {}, generator);
        return py::make_tuple(pc.p_hat, pc.lo, pc.hi);
      },
      py::arg("n"), py::arg("cols") = 1, py::arg("rows") = 1, py::arg("samples") = 1000, py::arg("tol") = 0.01,
      py::arg("seed") = 1, py::arg("dual") = false, py::arg("generator") = "carpet3");
  m.def(
      "russo_check",
      [](const std::string& event, int n, int cols, int rows, double p, double h, std::uint64_t samples,
         std::uint64_t seed) {
        const auto r = russo_check(EventSpec{event}, GeometrySpec{"carpet3", n, cols, rows}, p, h, samples, seed);
        py::dict d;
        d["derivative"] = r.derivative;
        d["derivative_se"] = r.derivative_se;
        d["pivotal_mean"] = r.pivotal_mean;
        d["pivotal_se"] = r.pivotal_se;
        d["pass"] = r.pass;
        return d;
      },
      py::arg("event"), py::arg("n"), py::arg("cols") = 1, py::arg("rows") = 1, py::arg("p") = 0.5,
      py::arg("h") = 0.02, py::arg("samples") = 10000, py::arg("seed") = 1);

  m.def(
      "geometry_audit",
      [](int N, int m_) {
        const auto r = geometry_audit(N, m_);
        py::dict d;
        d["boxes"] = r.boxes;
        d["clean"] = r.clean();
        d["boundary_violations"] = r.boundary_violations;
        d["overlap_violations"] = r.overlap_violations;
        d["q_violations"] = r.q_violations;
        d["messages"] = r.messages;
        return d;
      },
      py::arg("N"), py::arg("m"));
  m.def(
      "box_rects",
      [](const std::string& index, int N, bool mirror) {
        const auto b = mirror ? mirror_box(TreeIndex::parse(index), N) : build_box(TreeIndex::parse(index), N);
        py::list out;
        for (const auto& p : b.pieces) out.append(py::make_tuple(p.name, rect(p.rect), to_string(p.dir)));
        return out;
      },
      py::arg("index"), py::arg("N"), py::arg("mirror") = false);

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> full{"carpet_perc"};
        full.insert(full.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& a : full) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
