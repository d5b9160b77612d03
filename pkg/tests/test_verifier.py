import numpy as np
import pytest

from cellia.channel import generate
from cellia.lattice import inactive_set_and_clusters
from cellia.schemes import BeamformerSolution, solve
from cellia.verifier import certify_alignment, measure_rates

from conftest import graph


@pytest.fixture(scope="module")
def run22():
    g = graph(3)
    ch = generate(g, 2, 2, seed=42, both_directions=True)
    return g, ch, solve(g, ch)


def test_valid_solution_passes(run22):
    g, ch, sol = run22
    cert = certify_alignment(g, ch, sol, tol=1e-9)
    assert cert.passed
    assert cert.max_residual < 1e-12
    assert cert.min_direct_gain > 1e-6
    assert cert.cells_checked == 35
    assert cert.to_json()["passed"] is True


def test_mutation_is_caught(run22):
    g, ch, sol = run22
    part = inactive_set_and_clusters(g)
    z = next(z for z in part.clusters if z not in part.partial)
    c = part.roles[z]["c"]
    tx = dict(sol.tx)
    rng = np.random.default_rng(5)
    w = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    tx[c] = (w / np.linalg.norm(w)).reshape(2, 1)
    cert = certify_alignment(g, ch, BeamformerSolution(sol.scheme, tx, sol.rx, sol.dof))
    assert not cert.passed
    bad = {(u, v) for u, v, _ in cert.failed_edges}
    assert bad
    assert all(u == c for u, _ in bad)
    assert bad <= set(part.clusters[z])


def test_dead_receiver_is_caught(run22):
    g, ch, sol = run22
    v = sol.active[3]
    rx = dict(sol.rx)
    rx[v] = np.zeros_like(rx[v])
    cert = certify_alignment(g, ch, BeamformerSolution(sol.scheme, sol.tx, rx, sol.dof))
    assert not cert.passed
    assert [c for c, _ in cert.failed_cells] == [v]


def test_empty_network_passes_vacuously():
    g = graph(2)
    ch = generate(g, 2, 2, seed=0)
    dof = dict.fromkeys(g.vertices, 0)
    empty = {v: np.zeros((2, 0), dtype=complex) for v in g.vertices}
    cert = certify_alignment(g, ch, BeamformerSolution("2x2", empty, empty, dof))
    assert cert.passed and cert.edges_checked == 0 and cert.cells_checked == 0


def test_cancellation_soundness(run22):
    g, ch, sol = run22
    cert = certify_alignment(g, ch, sol, cancellation=False)
    assert not cert.passed
    # every failure is interference that decoding order would have removed
    directed = set(g.directed_edges)
    assert all((u, v) not in directed for u, v, _ in cert.failed_edges)


def test_tolerance_must_be_positive(run22):
    g, ch, sol = run22
    with pytest.raises(ValueError):
        certify_alignment(g, ch, sol, tol=0)


def test_rates_monotone_in_power(run22):
    g, ch, sol = run22
    rep = measure_rates(g, ch, sol, powers=[1, 10, 1e2, 1e3, 1e4, 1e6])
    for v, rates in rep.rates.items():
        assert all(b >= a - 1e-12 for a, b in zip(rates, rates[1:]))
        if sol.dof[v] == 0:
            assert rates == [0.0] * 6


@pytest.mark.parametrize("M,N,r,seed", [(2, 2, 3, 42), (2, 3, 2, 7), (2, 4, 3, 1)])
def test_slope_tracks_assigned_dof(M, N, r, seed):
    g = graph(r)
    ch = generate(g, M, N, seed=seed)
    sol = solve(g, ch)
    rep = measure_rates(g, ch, sol)
    assert abs(rep.average_dof_slope - float(sol.average_dof)) <= 0.05
    for v in g.vertices:
        assert abs(rep.dof_slope[v] - sol.dof[v]) <= 0.05


def test_residual_interference_enters_rate(run22):
    g, ch, sol = run22
    # without cancellation the unaligned interference caps the rate
    rep = measure_rates(g, ch, sol, cancellation=False)
    assert rep.average_dof_slope < float(sol.average_dof) - 0.1


def test_slope_rejects_equal_powers(run22):
    g, ch, sol = run22
    with pytest.raises(ValueError, match="degenerate"):
        measure_rates(g, ch, sol, powers=[1e3, 1e3])
    with pytest.raises(ValueError):
        measure_rates(g, ch, sol, powers=[1e3])


def test_sinr_for_single_stream(run22):
    g, ch, sol = run22
    rep = measure_rates(g, ch, sol, powers=[1e3, 1e6])
    v = sol.active[0]
    h = sol.rx[v][:, 0].conj() @ ch.H(v, v) @ sol.tx[v][:, 0]
    # aligned interference vanishes, so SINR is the plain SNR
    assert rep.sinr[v][0] == pytest.approx(1e3 * abs(h) ** 2, rel=1e-9)


def test_csv_layout(run22):
    g, ch, sol = run22
    text = measure_rates(g, ch, sol).to_csv()
    lines = text.strip().split("\n")
    assert lines[0] == "cell,a,b,dof_assigned,dof_slope,rate@1000,rate@1e+06"
    assert len(lines) == 1 + len(g.vertices)
