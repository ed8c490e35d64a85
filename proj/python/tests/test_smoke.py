import json

import pytest

import carpet_perc as cp


def test_lattice_counts():
    g1 = cp.build_sponge(1)
    assert (g1.vertex_count, g1.edge_count) == (16, 24)
    g2 = cp.build_sponge(2)
    assert (g2.vertex_count, g2.edge_count) == (96, 168)
    assert g2.box == (0, 0, 9, 9)
    assert not g2.has_vertex(4, 4)
    assert g2.finite_face_count() == 73


def test_sampling_is_keyed():
    g = cp.build_sponge(2, 2, 1)
    a = cp.sample_config(g, 0.5, seed=3, replica=2)
    b = cp.sample_config(g, 0.5, seed=3, replica=2)
    assert a.bits == b.bits
    assert len(a) == g.edge_count
    assert cp.sample_config(g, 1.0, 1).open_count == g.edge_count


def test_duality_per_configuration():
    g = cp.build_sponge(2, 2, 2)
    for r in range(50):
        w = cp.sample_config(g, 0.5, 9, r)
        assert cp.has_crossing(w, "lr") != cp.has_dual_crossing(w, "ud")


def test_single_cell_pivotal_and_lowest():
    g = cp.build_sponge(0)
    w = cp.BondConfiguration(g, [1 if g.vertices()[u][1] == g.vertices()[v][1] == 0 else 0 for u, v in g.edges()])
    assert cp.has_crossing(w)
    assert len(cp.pivotal_edges(w)) == 1
    assert len(cp.lowest_crossing(w)) == 1
    assert cp.lowest_crossing(cp.BondConfiguration(g, [0] * g.edge_count)) is None


def test_recursion_values():
    assert cp.eval_f(3, 0.75) == pytest.approx(1 / 8, abs=1e-12)
    assert cp.eval_f(4, 0.75) == pytest.approx(3 / 256, abs=1e-12)
    assert cp.gw_extinction(0.6) == pytest.approx(4 / 9, abs=1e-12)
    value, residual = cp.solve_x_eps(0.01)
    assert abs(residual) < 1e-12


def test_estimate_exact_cell():
    e = cp.estimate("lr", 0, p=0.5, samples=20000, seed=2)
    assert abs(e["mean"] - 0.75) <= 4 * e["stderr"]
    assert e["samples"] == 20000


def test_pc_and_branching():
    p_hat, lo, hi = cp.estimate_pc(2, samples=2000, tol=0.02, generator="full3")
    assert 0.45 <= p_hat <= 0.55
    assert hi - lo <= 0.02
    report = cp.geometry_audit(3, 2)
    assert report["clean"]
    assert report["boxes"] == 6
    assert [name for name, _, _ in cp.box_rects("0", 2)] == ["V", "J", "Jl", "Jr"]


def test_errors_and_cli():
    with pytest.raises(cp.CarpetError):
        cp.estimate("nope", 1)
    code, out, _ = cp.cli(["lattice", "--n", "1"])
    assert code == 0
    assert len(json.loads(out)["edges"]) == 24
    assert cp.cli(["lattice", "--bogus"])[0] == 2
