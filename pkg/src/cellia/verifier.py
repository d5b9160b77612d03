"""Independent numerical certification of beamforming solutions.

Nothing here trusts a scheme's own bookkeeping: certificates and rates are
rebuilt from the raw channel matrices and the per-cell ``(V, U, d)``
triples only.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import decode_key

__all__ = ["Certificate", "RateReport", "certify_alignment", "measure_rates", "DEFAULT_POWERS"]

MIN_DIRECT_GAIN = 1e-6
DEFAULT_POWERS = (1e3, 1e6)


@dataclass
class Certificate:
    passed: bool
    tol: float
    max_residual: float
    min_direct_gain: float
    edges_checked: int
    cells_checked: int
    failed_edges: list = field(default_factory=list)
    failed_cells: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "tol": self.tol,
            "max_residual": self.max_residual,
            "min_direct_gain": None if math.isinf(self.min_direct_gain) else self.min_direct_gain,
            "edges_checked": self.edges_checked,
            "cells_checked": self.cells_checked,
            "failed_edges": [
                {"tx": u.pair(), "rx": v.pair(), "residual": res} for u, v, res in self.failed_edges
            ],
            "failed_cells": [{"cell": v.pair(), "gain": gain} for v, gain in self.failed_cells],
        }


def _interfering_links(graph, cancellation: bool):
    """(tx, rx) pairs that carry interference.

    With cancellation the receivers are visited in decoding order and only
    neighbours not decoded yet interfere; without it every neighbour does.
    """
    decoded = set()
    links = []
    for v in sorted(graph.vertices, key=decode_key):
        for u in graph.neighbors[v]:
            if not cancellation or u not in decoded:
                links.append((u, v))
        decoded.add(v)
    return links


def certify_alignment(graph, channels, solution, tol: float = 1e-9, cancellation: bool = True) -> Certificate:
    """Check zero interference and full-rank direct links for a solution.

    Parameters
    ----------
    graph : InterferenceGraph
    channels : ChannelSet
    solution : BeamformerSolution
        Only ``tx``, ``rx`` and ``dof`` are read.
    tol : float
        Bound on ``|U_v^H H_vu V_u|_F / |H_vu|_F`` for every interfering
        pair with both ends active.
    cancellation : bool
        If False, interference from already-decoded neighbours is kept too;
        the channel set must then hold both directions of every edge.

    Returns
    -------
    Certificate
        ``passed`` is False if any residual exceeds ``tol`` or any active
        direct link has smallest singular value ``<= 1e-6``; the offenders
        are listed.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    tx, rx, dof = solution.tx, solution.rx, solution.dof
    failed_edges, failed_cells = [], []
    max_res, min_gain, n_edges = 0.0, math.inf, 0
    for u, v in _interfering_links(graph, cancellation):
        if dof.get(u, 0) == 0 or dof.get(v, 0) == 0:
            continue
        H = channels.H(v, u)
        res = float(np.linalg.norm(rx[v].conj().T @ H @ tx[u]) / np.linalg.norm(H))
        n_edges += 1
        max_res = max(max_res, res)
        if not res <= tol:
            failed_edges.append((u, v, res))
    n_cells = 0
    for v in graph.vertices:
        d = dof.get(v, 0)
        if d == 0:
            continue
        n_cells += 1
        G = rx[v].conj().T @ channels.H(v, v) @ tx[v]
        if G.shape != (d, d):
            failed_cells.append((v, 0.0))
            min_gain = 0.0
            continue
        gain = float(np.linalg.svd(G, compute_uv=False)[-1])
        min_gain = min(min_gain, gain)
        if not gain > MIN_DIRECT_GAIN:
            failed_cells.append((v, gain))
    return Certificate(
        passed=not failed_edges and not failed_cells,
        tol=tol,
        max_residual=max_res,
        min_direct_gain=min_gain,
        edges_checked=n_edges,
        cells_checked=n_cells,
        failed_edges=failed_edges,
        failed_cells=failed_cells,
    )


@dataclass
class RateReport:
    powers: tuple
    dof: dict
    sinr: dict
    rates: dict
    dof_slope: dict

    @property
    def average_rate(self) -> list:
        n = len(self.rates)
        return [sum(r[k] for r in self.rates.values()) / n for k in range(len(self.powers))]

    @property
    def average_dof_slope(self) -> float:
        return sum(self.dof_slope.values()) / len(self.dof_slope)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["cell", "a", "b", "dof_assigned", "dof_slope", *(f"rate@{p:g}" for p in self.powers)])
        for i, v in enumerate(sorted(self.rates, key=decode_key)):
            w.writerow([i, v.a, v.b, self.dof[v], repr(self.dof_slope[v]), *map(repr, self.rates[v])])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "powers": list(self.powers),
            "average_rate": self.average_rate,
            "average_dof_slope": self.average_dof_slope,
            "cells": [
                {
                    "cell": v.pair(),
                    "dof": self.dof[v],
                    "sinr": self.sinr[v],
                    "rate": self.rates[v],
                    "dof_slope": self.dof_slope[v],
                }
                for v in sorted(self.rates, key=decode_key)
            ],
        }


def _rate(P, G, residuals):
    """``log2 det(I + P G G^H (I + sum P R R^H)^-1)`` with unit noise."""
    d = G.shape[0]
    Q = np.eye(d, dtype=complex)
    for R in residuals:
        Q = Q + P * (R @ R.conj().T)
    S = np.eye(d) + P * (G @ G.conj().T) @ np.linalg.inv(Q)
    sign, logdet = np.linalg.slogdet(S)
    return float(logdet / math.log(2))


def measure_rates(graph, channels, solution, powers=DEFAULT_POWERS, cancellation: bool = True) -> RateReport:
    """Per-cell achievable rates and the high-SNR rate slope.

    Each active cell's rate at power ``P`` (per stream, unit noise) is
    ``log2 det(I + P Heff Heff^H (I + sum_j P R_j R_j^H)^-1)`` with
    ``Heff = U^H H_vv V`` and ``R_j = U^H H_vj V_j`` over interferers that
    are not cancelled yet in decoding order.  The DoF slope is
    ``(R(P_max) - R(P_min)) / (log2 P_max - log2 P_min)``.
    """
    powers = tuple(float(p) for p in powers)
    if len(powers) < 2:
        raise ValueError("need at least two powers for a slope")
    if any(p <= 0 for p in powers):
        raise ValueError("powers must be positive")
    p_lo, p_hi = min(powers), max(powers)
    if p_lo == p_hi:
        raise ValueError("degenerate slope request: all powers are equal")
    tx, rx, dof = solution.tx, solution.rx, solution.dof
    interferers = {v: [] for v in graph.vertices}
    for u, v in _interfering_links(graph, cancellation):
        if dof.get(u, 0) > 0:
            interferers[v].append(u)

    rates, sinr, slope = {}, {}, {}
    for v in graph.vertices:
        d = dof.get(v, 0)
        if d == 0:
            rates[v] = [0.0] * len(powers)
            sinr[v] = [0.0] * len(powers)
            slope[v] = 0.0
            continue
        Uh = rx[v].conj().T
        G = Uh @ channels.H(v, v) @ tx[v]
        R = [Uh @ channels.H(v, u) @ tx[u] for u in interferers[v]]
        rates[v] = [_rate(p, G, R) for p in powers]
        # per-stream SINR equivalent of the log-det rate
        sinr[v] = [2.0 ** (rate / d) - 1.0 for rate in rates[v]]
        r_lo, r_hi = _rate(p_lo, G, R), _rate(p_hi, G, R)
        slope[v] = (r_hi - r_lo) / (math.log2(p_hi) - math.log2(p_lo))
    return RateReport(powers, dict(dof), sinr, rates, slope)
