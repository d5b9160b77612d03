"""One-shot linear interference-alignment schemes for 2x2, 2x3 and 2x4 cells.

Each solver returns a :class:`BeamformerSolution` holding, per cell, an
``M x d`` transmit beamformer, an ``N x d`` receive filter and the stream
count ``d``.  All beamformer columns are unit norm.  Receive filters are
computed last, from the transmit side only: every active receiver projects
onto the left null space of the interference still present after
decoded-message cancellation.

Cells that cannot meet their stream count (only possible at the network
boundary or for degenerate channels) are demoted to ``d = 0`` and listed in
``BeamformerSolution.demoted``; they are never left misaligned.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .channel import ChannelSet
from .exceptions import DegenerateChannelError, RankDeficiencyError
from .lattice import (
    ONE,
    OMEGA,
    ClusterPartition,
    EisensteinPoint,
    InterferenceGraph,
    decode_key,
    inactive_set_and_clusters,
)
from .linalg import (
    eig2x2,
    left_null_space,
    normalize_columns,
    orthogonal_projector,
    receive_filter,
    safe_inv,
    unit,
)

log = logging.getLogger(__name__)

__all__ = [
    "BeamformerSolution",
    "solve",
    "solve_2x2",
    "solve_2x3",
    "solve_2x4",
    "align_three_streams",
    "effective_links",
    "stripes",
    "MIN_DIRECT_GAIN",
]

MIN_DIRECT_GAIN = 1e-6
SCHEMES = {(2, 2): "2x2", (2, 3): "2x3", (2, 4): "2x4"}


@dataclass
class BeamformerSolution:
    scheme: str
    tx: dict
    rx: dict
    dof: dict
    demoted: tuple = ()
    info: dict = field(default_factory=dict)

    @property
    def average_dof(self) -> Fraction:
        return Fraction(sum(self.dof.values()), len(self.dof))

    @property
    def active(self) -> list:
        return [v for v, d in self.dof.items() if d > 0]

    def to_json(self) -> dict:
        def mat(A):
            return [[[float(z.real), float(z.imag)] for z in row] for row in A]

        return {
            "scheme": self.scheme,
            "average_dof": str(self.average_dof),
            "demoted": [v.pair() for v in self.demoted],
            "cells": [
                {"cell": v.pair(), "dof": self.dof[v], "V": mat(self.tx[v]), "U": mat(self.rx[v])}
                for v in sorted(self.dof, key=decode_key)
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> BeamformerSolution:
        def mat(rows, d):
            if not rows:
                return np.zeros((0, d), dtype=complex)
            return np.array([[complex(re, im) for re, im in row] for row in rows]).reshape(len(rows), d)

        tx, rx, dof = {}, {}, {}
        for c in doc["cells"]:
            v = EisensteinPoint(*c["cell"])
            dof[v] = c["dof"]
            tx[v] = mat(c["V"], c["dof"])
            rx[v] = mat(c["U"], c["dof"])
        demoted = tuple(EisensteinPoint(*p) for p in doc.get("demoted", []))
        return cls(doc["scheme"], tx, rx, dof, demoted)


def free_beamformer(M: int, d: int, seed, v: EisensteinPoint) -> np.ndarray:
    """Deterministic generic ``M x d`` beamformer with unit-norm columns.

    Drawn from a generator keyed by ``(seed, cell)`` so that a cell's free
    choice never depends on the order in which cells are processed.
    """
    rng = np.random.default_rng([0 if seed is None else int(seed), v.a + 2**20, v.b + 2**20])
    V = rng.standard_normal((M, d)) + 1j * rng.standard_normal((M, d))
    return normalize_columns(V)


def _interference(graph, channels, tx, dof, v, exclude=()):
    cols = [
        channels.H(v, u) @ tx[u]
        for u in graph.interferers[v]
        if u not in exclude and dof.get(u, 0) > 0
    ]
    if not cols:
        return np.zeros((channels.N, 0), dtype=complex)
    return np.hstack(cols)


def _finalize(graph, channels, tx, dof, scheme, info) -> BeamformerSolution:
    M, N = channels.M, channels.N
    demoted = []
    while True:
        rx, failed = {}, None
        for v in graph.vertices:
            d = dof[v]
            if d == 0:
                rx[v] = np.zeros((N, 0), dtype=complex)
                continue
            U = receive_filter(
                _interference(graph, channels, tx, dof, v), channels.H(v, v) @ tx[v], d
            )
            if U is None:
                failed = v
                break
            rx[v] = U
        if failed is None:
            break
        log.warning("cell %r cannot zero-force its interference; demoted to d=0", failed)
        dof[failed] = 0
        tx[failed] = np.zeros((M, 0), dtype=complex)
        demoted.append(failed)
    return BeamformerSolution(scheme, tx, rx, dof, tuple(demoted), info)


def _check_antennas(channels, M, N):
    if (channels.M, channels.N) != (M, N):
        raise ValueError(f"scheme needs M={M}, N={N}; channels have M={channels.M}, N={channels.N}")


# -- 2x2: inactive sublattice + per-cluster eigenvector alignment ------------

# Receiver -> the two cluster transmitters whose interference must align there.
_ALIGN_AT = {"a": ("b", "c"), "d": ("a", "b"), "e": ("a", "c")}


def _solve_cluster(channels, z, roles):
    """Transmit vectors for the cluster centred at ``z`` (role -> vector)."""
    where = f"cluster {z.key()}"
    present = {k: p for k, p in roles.items() if p is not None}

    def H(rx_role, tx_role):
        return channels.H(present[rx_role], present[tx_role])

    constraints = [
        (rx, p, q) for rx, (p, q) in _ALIGN_AT.items() if rx in present and p in present and q in present
    ]
    out = {}
    if len(constraints) == 3:
        T = (
            safe_inv(H("d", "a"), where) @ H("d", "b")
            @ safe_inv(H("a", "b"), where) @ H("a", "c")
            @ safe_inv(H("e", "c"), where) @ H("e", "a")
        )
        _, vecs = eig2x2(T)
        va = vecs[:, 0]
        vc = unit(safe_inv(H("e", "c"), where) @ H("e", "a") @ va)
        vb = unit(safe_inv(H("a", "b"), where) @ H("a", "c") @ vc)
        out = {"a": va, "b": vb, "c": vc}
        return out

    # At most two alignment constraints: they form a path, so propagate
    # from a freely chosen root.
    adj = {k: [] for k in ("a", "b", "c") if k in present}
    for rx, p, q in constraints:
        adj[p].append((q, rx))
        adj[q].append((p, rx))
    for root in adj:
        if root in out:
            continue
        out[root] = free_beamformer(channels.M, 1, channels.seed, present[root])[:, 0]
        queue = deque([root])
        while queue:
            p = queue.popleft()
            for q, rx in adj[p]:
                if q in out:
                    continue
                # span(H_rx,q v_q) = span(H_rx,p v_p)
                out[q] = unit(safe_inv(H(rx, q), where) @ H(rx, p) @ out[p])
                queue.append(q)
    return out


def solve_2x2(
    graph: InterferenceGraph,
    partition: ClusterPartition | None,
    channels: ChannelSet,
) -> BeamformerSolution:
    """Clustered eigenvector alignment for ``M = N = 2``.

    Cells of the inactive coset stay silent (``d = 0``); every other cell
    sends one stream.  Inside a full cluster with transmitters ``a, b, c``
    and receivers ``a, d, e``, ``v_a`` is the dominant eigenvector of
    ``H_da^-1 H_db H_ab^-1 H_ac H_ec^-1 H_ea`` and ``v_c``, ``v_b`` follow
    by back-substitution, which aligns the two interferers at each of the
    three receivers.

    Parameters
    ----------
    graph : InterferenceGraph
    partition : ClusterPartition or None
        Output of :func:`inactive_set_and_clusters`; computed if ``None``.
    channels : ChannelSet
        ``M = N = 2`` channels on ``graph``.

    Returns
    -------
    BeamformerSolution
        Average DoF ``1 - |V0|/|V|`` unless boundary cells were demoted.

    Raises
    ------
    DegenerateChannelError
        If a channel inversion inside a cluster has condition number above
        ``1e10``; ``err.where`` names the cluster.
    """
    _check_antennas(channels, 2, 2)
    if partition is None:
        partition = inactive_set_and_clusters(graph)
    M = channels.M
    tx, dof = {}, {}
    for v in graph.vertices:
        if v in partition.inactive:
            tx[v] = np.zeros((M, 0), dtype=complex)
            dof[v] = 0
        else:
            dof[v] = 1
    for z, roles in partition.roles.items():
        for role, vec in _solve_cluster(channels, z, roles).items():
            tx[roles[role]] = vec.reshape(M, 1)
    for v in graph.vertices:
        if v not in tx:
            # Transmitter whose cluster has no edge inside the region.
            tx[v] = free_beamformer(M, 1, channels.seed, v)
    info = {"inactive": partition.inactive, "partition": partition}
    return _finalize(graph, channels, tx, dof, "2x2", info)


# -- 2x3: line sweeps with one zero-forced and two aligned interferers -------

def solve_2x3(graph: InterferenceGraph, channels: ChannelSet, seed=None) -> BeamformerSolution:
    """Zero-force-and-align scheme for ``M = 2``, ``N = 3``; every cell sends one stream.

    Lines are processed top-down and each line left to right.  Receiver
    ``w`` projects out its right neighbour with a ``2 x 3`` projector
    ``P``; the transmitter ``v = w - omega`` then aligns with its left
    neighbour ``v - 1`` through ``P``:
    ``v_v ∝ (P H_wv)^-1 P H_w,v-1 v_{v-1}``.  Transmitters without such a
    receiver (first cell of a line, boundary) get a free generic vector.
    """
    _check_antennas(channels, 2, 3)
    seed = channels.seed if seed is None else seed
    tx = {}
    for line in graph.lines.values():
        for v in line:
            left, w = v - ONE, v + OMEGA
            right_of_w = w + ONE
            if left in tx and w in graph and right_of_w in graph:
                P = orthogonal_projector(channels.H(w, right_of_w) @ tx[right_of_w])
                A = safe_inv(P @ channels.H(w, v), where=(v, w))
                tx[v] = unit(A @ P @ channels.H(w, left) @ tx[left]).reshape(2, 1)
            else:
                tx[v] = free_beamformer(2, 1, seed, v)
    dof = dict.fromkeys(graph.vertices, 1)
    return _finalize(graph, channels, tx, dof, "2x3", {})


def projected_interference(graph, channels, solution, w):
    """Interference at ``w`` after projecting out its right neighbour.

    Returns ``(P, P @ I)`` where ``I`` stacks all interference columns at
    ``w`` other than the right neighbour's.  For the 2x3 scheme ``P @ I``
    has rank at most one.
    """
    right = w + ONE
    h = channels.H(w, right) @ solution.tx[right] if right in graph else np.zeros((channels.N, 0))
    P = orthogonal_projector(h) if h.shape[1] else np.eye(channels.N, dtype=complex)
    rest = _interference(graph, channels, solution.tx, solution.dof, w, exclude=(right,))
    return P, P @ rest


# -- 2x4: three-line stripes -------------------------------------------------

def stripes(graph: InterferenceGraph) -> list:
    """Split the lines, top-down, into consecutive groups of three.

    Each entry is ``(top, middle, bottom)`` with missing lines as ``()``.
    """
    lines = list(graph.lines.values())
    out = []
    for i in range(0, len(lines), 3):
        group = lines[i:i + 3]
        group += [()] * (3 - len(group))
        out.append(tuple(group))
    return out


def align_three_streams(h_a: np.ndarray, H_db: np.ndarray, H_dc: np.ndarray):
    """Align three single-stream interferers into two dimensions.

    Given ``h_a = H_da v_a`` (4-vector) and ``4 x 2`` channels ``H_db``,
    ``H_dc``, returns ``(v_b, v_c, gamma)`` with
    ``H_db v_b + H_dc v_c = gamma * h_a`` and ``max(|v_b|, |v_c|) = 1``.
    Built from the null vector ``x`` of ``F = [h_a, H_db, H_dc]``.
    """
    F = np.column_stack([h_a.reshape(-1), H_db, H_dc])
    _, s, Vh = np.linalg.svd(F)
    x = Vh[-1].conj()
    if abs(x[0]) <= 1e-12 * np.linalg.norm(x):
        raise DegenerateChannelError("null vector of F has no component on h_a", "three-stream alignment")
    vb = -x[1:3] / x[0]
    vc = -x[3:5] / x[0]
    nb, nc = np.linalg.norm(vb), np.linalg.norm(vc)
    if nb == 0 or nc == 0:
        raise DegenerateChannelError("degenerate null vector of F", "three-stream alignment")
    gamma = min(1 / nb, 1 / nc)
    return gamma * vb, gamma * vc, gamma


def _orthogonal_to(g: np.ndarray) -> np.ndarray:
    """Unit vector ``v`` with ``g^H v = 0`` (``g`` a 2-vector)."""
    Q = left_null_space(g.reshape(-1, 1))
    if Q.shape[1] == 0:
        raise DegenerateChannelError("no orthogonal direction", "2x4")
    return unit(Q[:, 0])


def solve_2x4(graph: InterferenceGraph, channels: ChannelSet, seed=None) -> BeamformerSolution:
    """Stripe scheme for ``M = 2``, ``N = 4``.

    Lines are grouped top-down into stripes of three.  Every second
    middle-line cell, starting from the left, sends two streams with a free
    full-rank precoder; all other cells send one.  Bottom-line receivers
    zero-force their three interferers, which decouples the stripes.

    Inside a stripe, clusters ``{a, b, c, d}`` with ``d`` a two-stream
    cell, ``b = d + 1``, ``a = d - omega`` and ``c = d - 1 - omega`` are
    processed right to left: ``u_b`` annihilates the three out-of-cluster
    streams at ``b``, ``v_a`` is orthogonal to ``H_ba^H u_b``, and
    ``v_b, v_c`` come from :func:`align_three_streams` so the three streams
    at ``d`` span two dimensions.  Top-line transmitters are then chosen
    left to right so that each top-line receiver sees its right neighbour
    inside the span of the three streams from the middle line.
    """
    _check_antennas(channels, 2, 4)
    seed = channels.seed if seed is None else seed
    M = 2
    tx, dof, v2 = {}, {}, []
    for top, mid, bot in stripes(graph):
        stripe_v2 = [v for i, v in enumerate(mid) if i % 2 == 0]
        v2.extend(stripe_v2)
        for v in (*top, *mid, *bot):
            dof[v] = 1
        for v in stripe_v2:
            dof[v] = 2
            tx[v] = free_beamformer(M, 2, seed, v)

        members = set()
        for d in stripe_v2:
            members.update((d + ONE, d - OMEGA, d - ONE - OMEGA))
        for v in (*mid, *bot):
            if v not in tx and v not in members:
                tx[v] = free_beamformer(M, 1, seed, v)

        for d in sorted(stripe_v2, key=lambda z: z.re2, reverse=True):
            a, b, c = d - OMEGA, d + ONE, d - ONE - OMEGA
            has_a, has_b, has_c = a in graph, b in graph, c in graph
            if has_a:
                if has_b:
                    S = _interference(graph, channels, tx, dof, b, exclude=(a,))
                    u_b = left_null_space(S)
                    if u_b.shape[1] == 0:
                        raise DegenerateChannelError("empty left null space at receiver", b)
                    g = channels.H(b, a).conj().T @ u_b[:, 0]
                    tx[a] = _orthogonal_to(g).reshape(M, 1)
                else:
                    tx[a] = free_beamformer(M, 1, seed, a)
            if has_a and has_b and has_c:
                vb, vc, _ = align_three_streams(
                    channels.H(d, a) @ tx[a][:, 0], channels.H(d, b), channels.H(d, c)
                )
                tx[b] = unit(vb).reshape(M, 1)
                tx[c] = unit(vc).reshape(M, 1)
            else:
                for p, ok in ((b, has_b), (c, has_c)):
                    if ok and p not in tx:
                        tx[p] = free_beamformer(M, 1, seed, p)

        for f in top:
            if f not in tx:
                tx[f] = free_beamformer(M, 1, seed, f)
            e = f + ONE
            if e not in graph:
                continue
            S = _interference(graph, channels, tx, dof, f, exclude=(e,))
            if S.shape[1] + 1 > channels.N - dof[f]:
                u_f = left_null_space(S)
                if u_f.shape[1] == 0:
                    raise DegenerateChannelError("empty left null space at receiver", f)
                tx[e] = _orthogonal_to(channels.H(f, e).conj().T @ u_f[:, 0]).reshape(M, 1)

    info = {"v2": frozenset(v2)}
    return _finalize(graph, channels, tx, dof, "2x4", info)


def solve(graph: InterferenceGraph, channels: ChannelSet, seed=None) -> BeamformerSolution:
    """Dispatch on the antenna configuration of ``channels``."""
    key = (channels.M, channels.N)
    if key == (2, 2):
        return solve_2x2(graph, None, channels)
    if key == (2, 3):
        return solve_2x3(graph, channels, seed)
    if key == (2, 4):
        return solve_2x4(graph, channels, seed)
    raise ValueError(f"no scheme for M={channels.M}, N={channels.N}; expected one of {sorted(SCHEMES)}")


def claimed_average_dof(graph: InterferenceGraph, solution: BeamformerSolution) -> Fraction:
    """Closed-form average DoF of the scheme on ``graph`` (no demotions)."""
    n = len(graph.vertices)
    if solution.scheme == "2x2":
        return 1 - Fraction(len(solution.info["inactive"]), n)
    if solution.scheme == "2x3":
        return Fraction(1)
    if solution.scheme == "2x4":
        return 1 + Fraction(len(solution.info["v2"]), n)
    raise ValueError(solution.scheme)


def effective_links(solution: BeamformerSolution, channels: ChannelSet) -> dict:
    """``U_v^H H_vv V_v`` for every cell (``0 x 0`` for silent cells).

    Raises
    ------
    RankDeficiencyError
        If an active cell's effective link has smallest singular value
        ``<= 1e-6``.
    """
    out = {}
    for v, d in solution.dof.items():
        if d == 0:
            out[v] = np.zeros((0, 0), dtype=complex)
            continue
        G = solution.rx[v].conj().T @ channels.H(v, v) @ solution.tx[v]
        smin = np.linalg.svd(G, compute_uv=False)[-1]
        if smin <= MIN_DIRECT_GAIN:
            raise RankDeficiencyError(f"effective link of cell {v!r} is rank deficient", v)
        out[v] = G
    return out
