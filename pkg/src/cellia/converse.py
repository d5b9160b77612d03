"""DoF upper bounds from the triangle-decomposition linear program.

A DoF assignment on the oriented interference graph is split into
triangles ``[z, z+w, z+w+1]``.  Each triangle carries a sorted triple
``(i, j, k)`` of per-cell DoF, with sum ``s`` and a quadratic penalty ``g``.
The average DoF is then bounded by a two-constraint LP over the relative
frequencies of those triples, whose Lagrangian dual is a maximum of
finitely many lines in the multiplier ``lambda``.

All arithmetic here is exact (``int`` and ``fractions.Fraction``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .exceptions import InfeasibleLPError

__all__ = [
    "TriangleConfig",
    "LpOutcome",
    "enumerate_configs",
    "s_fn",
    "g_fn",
    "feasibility_check",
    "lp_solve_exact",
    "dual_bound",
    "best_lambda",
    "f_m",
    "general_m_bound",
    "two_fifths_bound_holds",
    "graph_lp_params",
    "bound_report",
    "config_table",
    "integer_oracle",
    "ORACLE_LIMIT",
]

ORACLE_LIMIT = 10**8


@dataclass(frozen=True, order=True)
class TriangleConfig:
    """Sorted per-triangle DoF triple ``i <= j <= k``."""

    i: int
    j: int
    k: int

    def __iter__(self):
        return iter((self.i, self.j, self.k))

    def is_valid(self, M: int) -> bool:
        i, j, k = self
        return 0 <= i <= j <= k <= M and i + j <= M and j + k <= M and i + k <= M

    def as_list(self) -> list[int]:
        return [self.i, self.j, self.k]


def enumerate_configs(M: int) -> list[TriangleConfig]:
    """All valid triples for ``M`` antennas, in lexicographic order."""
    if M < 1:
        raise ValueError("M must be >= 1")
    out = []
    for i, j, k in itertools.combinations_with_replacement(range(M + 1), 3):
        c = TriangleConfig(i, j, k)
        if c.is_valid(M):
            out.append(c)
    return out


def s_fn(i: int, j: int, k: int) -> int:
    return i + j + k


def g_fn(i: int, j: int, k: int, M: int) -> int:
    return (i + j) ** 2 + (i + k) ** 2 + (j + k) ** 2 + i * j + i * k + j * k - 2 * M * (i + j + k)


def feasibility_check(graph, dof_map, M: int) -> bool:
    """Necessary conditions for a linearly achievable DoF map.

    ``d_v`` must lie in ``0..M``; ``d_u + d_v <= M`` on every directed edge;
    and ``2 sum_v (M - d_v) d_v >= sum_{[u,v]} d_u d_v`` over directed edges.
    """
    d = {v: dof_map[v] for v in graph.vertices}
    if any(not (0 <= x <= M) for x in d.values()):
        return False
    if any(d[u] + d[v] > M for u, v in graph.directed_edges):
        return False
    lhs = 2 * sum((M - x) * x for x in d.values())
    rhs = sum(d[u] * d[v] for u, v in graph.directed_edges)
    return lhs >= rhs


@dataclass
class LpOutcome:
    configs: list
    s: list
    g: list
    x: list
    value: Fraction
    dual: Fraction
    lam: Fraction
    alpha: Fraction
    beta: Fraction
    gamma: Fraction

    def to_json(self) -> dict:
        return {
            "configs": [c.as_list() if isinstance(c, TriangleConfig) else c for c in self.configs],
            "s": list(self.s),
            "g": list(self.g),
            "x": [str(v) for v in self.x],
            "value": str(self.value),
            "dual_bound": str(self.dual),
            "lambda": str(self.lam),
        }


def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def dual_bound(s, g, alpha, beta, gamma, lam) -> Fraction:
    """``alpha * max_i(s_i - lam g_i) + lam * alpha * gamma + beta``."""
    lam = _q(lam)
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    alpha, beta, gamma = _q(alpha), _q(beta), _q(gamma)
    return alpha * max(si - lam * gi for si, gi in zip(s, g)) + lam * alpha * gamma + beta


def _breakpoints(s, g):
    lams = {Fraction(0)}
    for (s1, g1), (s2, g2) in itertools.combinations(zip(s, g), 2):
        if g1 != g2:
            lam = Fraction(s1 - s2) / (g1 - g2)
            if lam >= 0:
                lams.add(lam)
    return sorted(lams)


def best_lambda(s, g, gamma=0, scale=Fraction(1, 3)):
    """Minimize ``scale * (max_i(s_i - lam g_i) + lam gamma)`` over ``lam >= 0``.

    The objective is convex and piecewise linear, so its minimum sits at
    ``lam = 0`` or at a pairwise breakpoint.  Ties go to the smallest
    ``lam``.  Returns ``(lam, value)``.
    """
    gamma = _q(gamma)
    if all(gi < gamma for gi in g):
        # every line strictly decreases in lam: no minimizer exists
        raise InfeasibleLPError("all g_i < gamma: dual objective is unbounded below", min(g), gamma)
    best = None
    for lam in _breakpoints(s, g):
        val = max(si - lam * gi for si, gi in zip(s, g)) + lam * gamma
        if best is None or val < best[1]:
            best = (lam, val)
    return best[0], _q(scale) * best[1]


def lp_solve_exact(s, g, alpha, beta, gamma) -> LpOutcome:
    """Exact optimum of ``max alpha s.x + beta`` s.t. ``g.x <= gamma``, ``sum x = 1``, ``x >= 0``.

    With one inequality on the simplex an optimal vertex has at most two
    nonzero coordinates, so singletons and two-point mixtures on
    ``g.x = gamma`` are enumerated.  Ties are broken towards the
    lexicographically first support.

    Raises
    ------
    InfeasibleLPError
        If ``gamma < min(g)``.
    """
    s = [int(v) if not isinstance(v, Fraction) else v for v in s]
    g = [int(v) if not isinstance(v, Fraction) else v for v in g]
    alpha, beta, gamma = _q(alpha), _q(beta), _q(gamma)
    n = len(s)
    if n == 0 or n != len(g):
        raise ValueError("s and g must be non-empty and of equal length")
    if gamma < min(g):
        raise InfeasibleLPError(f"infeasible: gamma={gamma} < min g={min(g)}", min(g), gamma)

    best_val, best_x = None, None

    def consider(x):
        nonlocal best_val, best_x
        val = sum(Fraction(si) * xi for si, xi in zip(s, x))
        if best_val is None or val > best_val:
            best_val, best_x = val, x

    for i in range(n):
        if g[i] <= gamma:
            consider([Fraction(int(k == i)) for k in range(n)])
    for i, j in itertools.combinations(range(n), 2):
        if (g[i] - gamma) * (g[j] - gamma) < 0:
            t = Fraction(gamma - g[j]) / (g[i] - g[j])
            x = [Fraction(0)] * n
            x[i], x[j] = t, 1 - t
            consider(x)
    value = alpha * best_val + beta
    lam, _ = best_lambda(s, g, gamma) if any(gi > gamma for gi in g) else (Fraction(0), None)
    dual = dual_bound(s, g, alpha, beta, gamma, lam)
    return LpOutcome([], s, g, best_x, value, dual, lam, alpha, beta, gamma)


def f_m(i: int, j: int, k: int, M: int) -> Fraction:
    """Per-triangle bound ``(s - g / (2M)) / 3``."""
    return Fraction(s_fn(i, j, k)) / 3 - Fraction(g_fn(i, j, k, M), 6 * M)


def config_table(M: int) -> list[dict]:
    """Rows ``{config, s, g, f}`` for every valid triple, maxima flagged."""
    rows = []
    for c in enumerate_configs(M):
        rows.append({"config": c.as_list(), "s": s_fn(*c), "g": g_fn(*c, M), "f": f_m(*c, M)})
    top = max(row["f"] for row in rows)
    for row in rows:
        row["max"] = row["f"] == top
    return rows


def general_m_bound(M: int) -> Fraction:
    return max(f_m(*c, M) for c in enumerate_configs(M))


def two_fifths_bound_holds(M: int) -> bool:
    """True iff ``max f_M <= 2M/5`` holds exactly."""
    return general_m_bound(M) <= Fraction(2 * M, 5)


def graph_lp_params(graph, M: int) -> tuple[Fraction, Fraction, Fraction]:
    """``(alpha, beta, gamma)`` from the enumerated graph.

    ``alpha = |T| / (3|V|)``, ``beta = M |V_ex| / |V|`` and
    ``gamma = 3 M^2 |V_ex| / (2 |T|)``.
    """
    nV, nT, nX = len(graph.vertices), len(graph.triangles), len(graph.external_vertices)
    if nT == 0:
        raise ValueError("graph has no triangles")
    return Fraction(nT, 3 * nV), Fraction(M * nX, nV), Fraction(3 * M * M * nX, 2 * nT)


def bound_report(graph, M: int, lam=None, oracle: bool = False) -> dict:
    """Dual bound and LP value for ``graph`` with ``M`` antennas.

    ``lam`` defaults to ``1/(2M)``, the multiplier that turns each triangle
    term into ``f_M``.  Exact values are reported as fraction strings.
    """
    configs = enumerate_configs(M)
    s = [s_fn(*c) for c in configs]
    g = [g_fn(*c, M) for c in configs]
    alpha, beta, gamma = graph_lp_params(graph, M)
    lam = Fraction(1, 2 * M) if lam is None else _q(lam)
    lp = lp_solve_exact(s, g, alpha, beta, gamma)
    doc = {
        "M": M,
        "r": graph.r,
        "|V|": len(graph.vertices),
        "|T|": len(graph.triangles),
        "|V_ex|": len(graph.external_vertices),
        "alpha": str(alpha),
        "beta": str(beta),
        "gamma": str(gamma),
        "lambda": str(lam),
        "dual_bound": str(dual_bound(s, g, alpha, beta, gamma, lam)),
        "dual_bound_float": float(dual_bound(s, g, alpha, beta, gamma, lam)),
        "lp_value": str(lp.value),
        "lp_x": [str(v) for v in lp.x],
    }
    if oracle:
        value, _ = integer_oracle(graph, M)
        doc["oracle_value"] = str(value)
    return doc


def integer_oracle(graph, M: int, limit: int = ORACLE_LIMIT):
    """Exhaustive maximum of the average DoF under the feasibility conditions.

    Vertices are assigned in decoding order by depth-first search; partial
    assignments violating ``d_u + d_v <= M`` are pruned, and a branch is
    cut when even ``M`` on every remaining cell cannot beat the incumbent.

    Returns
    -------
    (Fraction, dict)
        Best average DoF and one maximizing DoF map.
    """
    verts = list(graph.vertices)
    n = len(verts)
    if n == 0:
        raise ValueError("empty graph")
    if (M + 1) ** n > limit:
        raise ValueError(f"search space (M+1)^|V| = {M + 1}^{n} exceeds limit {limit}")
    index = {v: i for i, v in enumerate(verts)}
    earlier = [[] for _ in range(n)]
    for u, v in graph.directed_edges:
        iu, iv = index[u], index[v]
        earlier[max(iu, iv)].append(min(iu, iv))
    edges = [(index[u], index[v]) for u, v in graph.directed_edges]
    d = [0] * n
    best = [-1, None]

    def quad_ok():
        return 2 * sum((M - x) * x for x in d) >= sum(d[a] * d[b] for a, b in edges)

    def rec(pos, total):
        if total + M * (n - pos) <= best[0]:
            return
        if pos == n:
            if quad_ok():
                best[0], best[1] = total, list(d)
            return
        cap = min([M] + [M - d[j] for j in earlier[pos]])
        for x in range(cap, -1, -1):
            d[pos] = x
            rec(pos + 1, total + x)
        d[pos] = 0

    rec(0, 0)
    return Fraction(best[0], n), {v: best[1][i] for i, v in enumerate(verts)}
