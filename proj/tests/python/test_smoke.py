import math
import os
from pathlib import Path

import pytest

import treelab as tl

DATA = Path(os.environ.get("TREELAB_TEST_DATA", Path(__file__).resolve().parents[1] / "data"))


def test_kernels_and_dobrushin():
    q = tl.ising(0.2)
    assert q.states == 2
    assert q.pi == pytest.approx([0.5, 0.5])
    assert tl.dobrushin_coefficient(q, 3) == pytest.approx(0.2, abs=1e-12)
    assert tl.dobrushin_coefficient(tl.uniform(3), 3) == pytest.approx(0.0, abs=1e-12)
    assert tl.spectral_radius(tl.potts(7, 0.3)) == pytest.approx(0.65, abs=1e-10)


def test_validation_errors_map_to_python():
    with pytest.raises(ValueError):
        tl.TransitionKernel.from_rows([[0.1, 0.8, 0.1], [0.1, 0.1, 0.8], [0.8, 0.1, 0.1]])
    with pytest.raises(RuntimeError):
        tl.dobrushin_coefficient(tl.uniform(60), 10)


def test_thresholds():
    r = tl.epsilon0(tl.DeltaFamily.dominating, 3)
    assert r.epsilon0 == pytest.approx(4.38e-5, rel=0.02)
    assert r.g_low > 0 >= r.g_high
    assert round(tl.dominating_table(3, 3)[0].dominating_lower, 7) == 0.2500438
    m2 = tl.CoveringMatrix.bipartite(3)
    assert tl.epsilon0_matrix(m2).delta_id == "bipartite"


def test_covering_minima():
    k4 = tl.RegularGraph.from_edges(4, 3, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    m2 = tl.CoveringMatrix.bipartite(3)
    assert tl.min_error_exact(k4, m2).ratio == 0.75
    assert tl.min_error_local_search(k4, m2, restarts=10, seed=3).ratio == 0.75


def test_counting_is_exact():
    assert tl.pm_count(6) == 15
    assert tl.pm_count(40) == math.prod(range(1, 40, 2))
    assert tl.vertex_coloring_count([2, 2]) == 6


def test_entropy_and_correlation():
    assert tl.expander_counterexample(70, 4, 3).nontypical
    assert not tl.expander_counterexample(60, 4, 3).nontypical
    v = tl.classify_cordec(tl.ising(0.8), 3, [-1.0, 1.0], 200)
    assert v.violates and v.witness == 15
    e = tl.estimate_correlation(tl.ising(0.5), 2, [-1.0, 1.0], 20000, seed=4)
    assert abs(e.value - 0.25) <= 4 * e.std_error


def test_glauber_small():
    checks = tl.glauber_fixed_point(tl.ising(0.25), depth=5, sweeps=5, replicas=300, seed=2)
    assert [c.pattern for c in checks] == ["vertex", "edge", "star"]
    assert checks[0].max_z < 5
    curve = tl.glauber_contraction(tl.ising(0.25), depth=5, sweeps=10, replicas=100, seed=2)
    assert len(curve.mean) == 11
    assert curve.contraction_factor == pytest.approx(1 - 0.1 * (1 - 3 * 0.25))


def test_graphs_and_local_stats():
    g = tl.sample_regular_graph(30, 3, seed=5)
    assert g.simple and len(g.edges()) == 45
    assert tl.dcn_estimate(g, g, 1, 2).value == 0.0


def test_cli_in_process():
    code, out, _ = tl.run_cli(["covering-min", "--graph", str(DATA / "k33.txt"), "--matrix", str(DATA / "m2.txt")])
    assert code == 0
    assert '"ratio": 0' in out
    assert tl.run_cli(["no-such-command"])[0] == 2
