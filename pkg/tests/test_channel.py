import logging

import numpy as np
import pytest

from cellia.channel import ChannelSet, generate

from conftest import graph


def test_counts_and_shapes():
    g = graph(1)
    ch = generate(g, 2, 3, seed=1)
    assert set(ch.direct) == set(g.vertices)
    assert set(ch.cross) == set(g.directed_edges)
    assert len(ch.direct) == 7
    assert all(H.shape == (3, 2) for H in [*ch.direct.values(), *ch.cross.values()])
    u, v = g.directed_edges[0]
    assert ch.H(v, u) is ch.cross[(u, v)]
    assert ch.H(v, v) is ch.direct[v]


def test_seed_determinism():
    g = graph(2)
    a, b = generate(g, 2, 2, seed=42), generate(g, 2, 2, seed=42)
    for key in a.direct:
        assert np.array_equal(a.direct[key], b.direct[key])
    for key in a.cross:
        assert np.array_equal(a.cross[key], b.cross[key])


def test_different_seeds_change_every_matrix():
    g = graph(2)
    a, b = generate(g, 2, 2, seed=1), generate(g, 2, 2, seed=2)
    assert all(not np.array_equal(a.direct[k], b.direct[k]) for k in a.direct)
    assert all(not np.array_equal(a.cross[k], b.cross[k]) for k in a.cross)


def test_both_directions_keeps_regular_draws():
    g = graph(2)
    a, b = generate(g, 2, 2, seed=5), generate(g, 2, 2, seed=5, both_directions=True)
    assert len(b.cross) == 2 * len(a.cross)
    for key in a.cross:
        assert np.array_equal(a.cross[key], b.cross[key])
    u, v = g.directed_edges[0]
    assert b.H(u, v).shape == (2, 2)


class StubRng:
    """Feeds zeros for the first ``bad`` draws, then normal samples."""

    def __init__(self, bad):
        self.bad = bad
        self.inner = np.random.default_rng(0)

    def standard_normal(self, shape):
        if self.bad > 0:
            self.bad -= 1
            return np.zeros(shape)
        return self.inner.standard_normal(shape)


def test_rank_deficient_draw_is_resampled(caplog):
    g = graph(1)
    with caplog.at_level(logging.WARNING, logger="cellia.channel"):
        ch = generate(g, 2, 2, rng=StubRng(bad=2))
    assert "resampling" in caplog.text
    for H in [*ch.direct.values(), *ch.cross.values()]:
        assert np.linalg.svd(H, compute_uv=False)[-1] > 1e-12


def test_json_roundtrip():
    g = graph(1)
    ch = generate(g, 2, 2, seed=3, power=10.0)
    back = ChannelSet.from_json(ch.to_json())
    assert back.power == 10.0 and (back.M, back.N) == (2, 2)
    for key in ch.cross:
        assert np.array_equal(back.cross[key], ch.cross[key])


@pytest.mark.parametrize("M,N,power", [(0, 2, 1.0), (2, 0, 1.0), (2, 2, 0.0)])
def test_invalid_arguments(M, N, power):
    with pytest.raises(ValueError):
        generate(graph(1), M, N, power=power)
