"""Seeded random MIMO channel realizations on an interference graph.

Every cell gets a direct ``N x M`` matrix ``H_vv`` and every directed
interference edge ``(u, v)`` a cross matrix ``H_vu`` (transmitter ``u`` to
receiver ``v``).  Entries are i.i.d. circularly-symmetric complex Gaussian
with unit variance; noise variance is fixed to one.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .lattice import EisensteinPoint, InterferenceGraph

log = logging.getLogger(__name__)

__all__ = ["ChannelSet", "generate", "MIN_SINGULAR"]

MIN_SINGULAR = 1e-12


@dataclass(frozen=True)
class ChannelSet:
    M: int
    N: int
    seed: int | None
    direct: dict
    cross: dict
    power: float = 1.0

    def H(self, rx: EisensteinPoint, tx: EisensteinPoint) -> np.ndarray:
        """Channel from transmitter ``tx`` to receiver ``rx``."""
        if rx == tx:
            return self.direct[rx]
        return self.cross[(tx, rx)]

    def has(self, rx, tx) -> bool:
        return rx == tx and rx in self.direct or (tx, rx) in self.cross

    def replace(self, **changes) -> ChannelSet:
        """Copy with some direct/cross entries swapped (used for perturbation)."""
        direct = dict(self.direct)
        cross = dict(self.cross)
        for key, H in changes.get("direct", {}).items():
            direct[key] = H
        for key, H in changes.get("cross", {}).items():
            cross[key] = H
        return ChannelSet(self.M, self.N, self.seed, direct, cross, self.power)

    def to_json(self) -> dict:
        def mat(H):
            return [[[float(z.real), float(z.imag)] for z in row] for row in H]

        return {
            "M": self.M,
            "N": self.N,
            "seed": self.seed,
            "power": self.power,
            "direct": [{"cell": v.pair(), "H": mat(H)} for v, H in self.direct.items()],
            "cross": [
                {"tx": u.pair(), "rx": v.pair(), "H": mat(H)} for (u, v), H in self.cross.items()
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> ChannelSet:
        def mat(rows):
            return np.array([[complex(re, im) for re, im in row] for row in rows])

        direct = {EisensteinPoint(*d["cell"]): mat(d["H"]) for d in doc["direct"]}
        cross = {
            (EisensteinPoint(*c["tx"]), EisensteinPoint(*c["rx"])): mat(c["H"]) for c in doc["cross"]
        }
        return cls(doc["M"], doc["N"], doc.get("seed"), direct, cross, doc.get("power", 1.0))


def _draw(rng, N: int, M: int, where) -> np.ndarray:
    while True:
        H = (rng.standard_normal((N, M)) + 1j * rng.standard_normal((N, M))) / np.sqrt(2)
        smin = np.linalg.svd(H, compute_uv=False)[-1]
        if smin > MIN_SINGULAR:
            return H
        log.warning("rank-deficient channel draw at %s (sigma_min=%.3g); resampling", where, smin)


def generate(
    graph: InterferenceGraph,
    M: int,
    N: int,
    seed: int | None = 0,
    power: float = 1.0,
    rng=None,
    both_directions: bool = False,
) -> ChannelSet:
    """Draw one channel realization for every link of ``graph``.

    Parameters
    ----------
    graph : InterferenceGraph
    M, N : int
        Transmit and receive antenna counts.
    seed : int
        Seed of the generator; identical seeds give bitwise-identical sets.
    power : float
        Per-user average transmit power ``P`` recorded with the set.
    rng : optional
        Object with a numpy-style ``standard_normal(shape)``; overrides
        ``seed`` (used to inject degenerate draws in tests).
    both_directions : bool
        Also draw the reverse of every directed edge, i.e. the interference
        that decoded-message cancellation removes.  Those draws come after
        all regular ones, so the regular matrices do not change.
    """
    if M < 1 or N < 1:
        raise ValueError("antenna counts must be >= 1")
    if power <= 0:
        raise ValueError("power must be positive")
    if rng is None:
        rng = np.random.default_rng(seed)
    direct = {v: _draw(rng, N, M, v) for v in graph.vertices}
    cross = {e: _draw(rng, N, M, e) for e in graph.directed_edges}
    if both_directions:
        for u, v in graph.directed_edges:
            cross[(v, u)] = _draw(rng, N, M, (v, u))
    return ChannelSet(M, N, seed, direct, cross, float(power))
