"""Hexagonal cellular interference graph on the Eisenstein integers.

Cells are labelled by Eisenstein integers ``z = a + b*omega`` with
``omega = (-1 + i*sqrt(3))/2``.  All lattice bookkeeping uses the integer
pair ``(a, b)``; the complex embedding is only needed once channels enter.

Useful identities for a label ``z = (a, b)``::

    2 * Re(z)            = 2a - b
    Im(z) * 2 / sqrt(3)  = b

so membership in the box ``|Re z| <= r, |Im z| <= sqrt(3) r / 2`` reduces to
``|2a - b| <= 2r`` and ``|b| <= r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Mapping

from .exceptions import UnorderedEdgeError

__all__ = [
    "EisensteinPoint",
    "ZERO",
    "ONE",
    "OMEGA",
    "InterferenceGraph",
    "ClusterPartition",
    "build_graph",
    "orient_edges",
    "pi_star_precedes",
    "decode_key",
    "enumerate_triangles",
    "classify_boundary",
    "inactive_set_and_clusters",
    "cardinality_formulas",
    "graph_to_json",
]


@dataclass(frozen=True, order=True)
class EisensteinPoint:
    """The lattice label ``a + b*omega``."""

    a: int
    b: int

    def __add__(self, other: EisensteinPoint) -> EisensteinPoint:
        return EisensteinPoint(self.a + other.a, self.b + other.b)

    def __sub__(self, other: EisensteinPoint) -> EisensteinPoint:
        return EisensteinPoint(self.a - other.a, self.b - other.b)

    def __neg__(self) -> EisensteinPoint:
        return EisensteinPoint(-self.a, -self.b)

    def __rmul__(self, k: int) -> EisensteinPoint:
        return EisensteinPoint(k * self.a, k * self.b)

    @property
    def re2(self) -> int:
        """Twice the real part, ``2a - b``."""
        return 2 * self.a - self.b

    @property
    def line(self) -> int:
        """Index of the horizontal line, ``Im(z) = line * sqrt(3)/2``."""
        return self.b

    def __complex__(self) -> complex:
        return complex(self.a - self.b / 2, self.b * math.sqrt(3) / 2)

    def in_box(self, r: int) -> bool:
        return abs(self.re2) <= 2 * r and abs(self.b) <= r

    def in_coset(self, offset: EisensteinPoint) -> bool:
        """True if ``self - offset`` lies in ``2 * Z(omega)``."""
        return (self.a - offset.a) % 2 == 0 and (self.b - offset.b) % 2 == 0

    def pair(self) -> list[int]:
        return [self.a, self.b]

    def key(self) -> str:
        return f"{self.a},{self.b}"

    def __repr__(self) -> str:
        return f"E({self.a},{self.b})"


ZERO = EisensteinPoint(0, 0)
ONE = EisensteinPoint(1, 0)
OMEGA = EisensteinPoint(0, 1)

# Offsets generating the segment set: (z, z+w), (z, z+w+1), (z+w, z+w+1).
_EDGE_OFFSETS = (ONE, OMEGA, ONE + OMEGA)

Edge = tuple  # (EisensteinPoint, EisensteinPoint)


def decode_key(z: EisensteinPoint) -> tuple[int, int]:
    """Sort key of the left-to-right, top-down decoding order.

    Smaller keys are decoded first: higher lines first, then smaller real
    part within a line.
    """
    return (-z.b, z.re2)


def pi_star_precedes(v: EisensteinPoint, u: EisensteinPoint) -> bool:
    """True if ``v`` is decoded before ``u`` under the default order."""
    return decode_key(v) < decode_key(u)


@dataclass(frozen=True)
class InterferenceGraph:
    """Immutable interference graph of the cells inside ``B_r``.

    ``directed_edges`` holds pairs ``(u, v)``: transmitter ``u`` still
    interferes at receiver ``v`` after decoded-message cancellation.
    """

    r: int
    vertices: tuple
    undirected_edges: frozenset
    directed_edges: tuple
    triangles: tuple
    internal_vertices: frozenset
    external_vertices: frozenset

    @cached_property
    def vertex_set(self) -> frozenset:
        return frozenset(self.vertices)

    @cached_property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def interferers(self) -> dict:
        """Receiver -> transmitters that interfere at it (directed in-edges)."""
        out = {v: [] for v in self.vertices}
        for u, v in self.directed_edges:
            out[v].append(u)
        return {v: tuple(sorted(us, key=decode_key)) for v, us in out.items()}

    @cached_property
    def neighbors(self) -> dict:
        out = {v: [] for v in self.vertices}
        for u, v in self.undirected_edges:
            out[u].append(v)
            out[v].append(u)
        return {v: tuple(sorted(ns, key=decode_key)) for v, ns in out.items()}

    @cached_property
    def triangle_counts(self) -> dict:
        counts = dict.fromkeys(self.vertices, 0)
        for tri in self.triangles:
            for v in tri:
                counts[v] += 1
        return counts

    @cached_property
    def lines(self) -> dict:
        """Line index -> vertices on that line, left to right."""
        out: dict = {}
        for v in self.vertices:
            out.setdefault(v.b, []).append(v)
        return {b: tuple(sorted(vs, key=lambda z: z.re2)) for b, vs in sorted(out.items(), reverse=True)}

    def __contains__(self, z) -> bool:
        return z in self.vertex_set

    def __len__(self) -> int:
        return len(self.vertices)


def _box_points(r: int) -> list[EisensteinPoint]:
    pts = []
    for b in range(r, -r - 1, -1):
        # |2a - b| <= 2r
        lo = -((2 * r - b) // 2)
        hi = (2 * r + b) // 2
        pts.extend(EisensteinPoint(a, b) for a in range(lo, hi + 1))
    return pts


def _canonical(u: EisensteinPoint, v: EisensteinPoint) -> Edge:
    return (u, v) if u <= v else (v, u)


def _orient(edges: Iterable[Edge], precedes: Callable) -> tuple:
    directed, unordered = [], []
    for u, v in edges:
        if precedes(v, u):
            directed.append((u, v))
        elif precedes(u, v):
            directed.append((v, u))
        else:
            unordered.append((u, v))
    if unordered:
        raise UnorderedEdgeError(
            f"{len(unordered)} edge(s) not ordered by the decoding order", unordered
        )
    return tuple(sorted(directed, key=lambda e: (decode_key(e[1]), decode_key(e[0]))))


def orient_edges(graph: InterferenceGraph, precedes: Callable = pi_star_precedes) -> tuple:
    """Orient every undirected edge by a decoding order.

    Parameters
    ----------
    graph : InterferenceGraph
    precedes : callable
        ``precedes(v, u)`` is True when ``v`` is decoded before ``u``.
        Defaults to the left-to-right, top-down order.

    Returns
    -------
    tuple of (u, v)
        One directed edge ``(u, v)`` per undirected edge, with ``v``
        decoded first so that only ``u`` interferes at ``v``.

    Raises
    ------
    UnorderedEdgeError
        If ``precedes`` leaves an edge's endpoints incomparable.
    """
    return _orient(graph.undirected_edges, precedes)


def enumerate_triangles(graph_or_vertices) -> tuple:
    """Upward triangles ``[z, z+omega, z+omega+1]`` fully inside the graph."""
    vs = graph_or_vertices.vertex_set if isinstance(graph_or_vertices, InterferenceGraph) else set(graph_or_vertices)
    tris = []
    for z in vs:
        b, c = z + OMEGA, z + OMEGA + ONE
        if b in vs and c in vs:
            tris.append((z, b, c))
    return tuple(sorted(tris, key=lambda t: decode_key(t[0])))


def classify_boundary(graph: InterferenceGraph) -> tuple[frozenset, frozenset]:
    """Split vertices into internal (in three triangles) and external ones."""
    counts = graph.triangle_counts
    v_in = frozenset(v for v, n in counts.items() if n == 3)
    return v_in, frozenset(graph.vertices) - v_in


def build_graph(r: int, precedes: Callable = pi_star_precedes) -> InterferenceGraph:
    """Build the interference graph on ``Z(omega) ∩ B_r``.

    Parameters
    ----------
    r : int
        Region half-width, ``r >= 1``.
    precedes : callable, optional
        Decoding order used to orient edges (default: left-to-right,
        top-down).

    Examples
    --------
    >>> g = build_graph(1)
    >>> len(g.vertices), len(g.triangles)
    (7, 3)
    """
    if isinstance(r, bool) or not isinstance(r, int) or r < 1:
        raise ValueError(f"r must be a positive integer, got {r!r}")
    verts = _box_points(r)
    vset = set(verts)
    edges = set()
    for z in verts:
        for off in _EDGE_OFFSETS:
            w = z + off
            if w in vset:
                edges.add(_canonical(z, w))
    directed = _orient(edges, precedes)
    tris = enumerate_triangles(vset)
    counts = dict.fromkeys(verts, 0)
    for t in tris:
        for v in t:
            counts[v] += 1
    v_in = frozenset(v for v, n in counts.items() if n == 3)
    return InterferenceGraph(
        r=r,
        vertices=tuple(sorted(verts, key=decode_key)),
        undirected_edges=frozenset(edges),
        directed_edges=directed,
        triangles=tris,
        internal_vertices=v_in,
        external_vertices=frozenset(verts) - v_in,
    )


def cardinality_formulas(r: int) -> tuple[int, int, int]:
    """Closed forms ``(|V|, |T|, bound on |V_ex|)`` for the region ``B_r``."""
    if r < 1:
        raise ValueError("r must be >= 1")
    n_v = 4 * r * r + 3 * r + (1 if r % 2 == 0 else 0)
    n_t = 4 * r * r - r
    return n_v, n_t, 12 * r + 3


# -- inactive sublattice and interference clusters ---------------------------

CLUSTER_ROLES = ("a", "b", "c", "d", "e")


def cluster_roles(z: EisensteinPoint) -> dict:
    """Role labels around a cluster centre ``z``.

    Transmitters are ``a, b, c`` and aligned receivers ``a, d, e``.
    """
    return {
        "a": z,
        "b": z - ONE - OMEGA,
        "c": z + ONE,
        "d": z - ONE,
        "e": z + ONE + OMEGA,
    }


def cluster_edges(z: EisensteinPoint) -> tuple:
    """The six directed edges of the cluster centred at ``z``."""
    ro = cluster_roles(z)
    a, b, c, d, e = (ro[k] for k in CLUSTER_ROLES)
    return ((a, d), (a, e), (c, a), (c, e), (b, d), (b, a))


@dataclass(frozen=True)
class ClusterPartition:
    """Inactive cells and the clusters that partition the remaining edges.

    ``clusters`` maps each centre to the directed edges of its cluster that
    lie inside the graph.  Centres may sit just outside ``B_r`` when some of
    their edges are inside; such clusters, and any cluster missing one of its
    six edges, are listed in ``partial``.
    """

    offset: EisensteinPoint
    inactive: frozenset
    clusters: Mapping
    roles: Mapping
    partial: frozenset = field(default_factory=frozenset)

    @property
    def cluster_centers(self) -> tuple:
        return tuple(self.clusters)

    def covered_edges(self) -> set:
        out = set()
        for es in self.clusters.values():
            out.update(es)
        return out


_COSETS = (ZERO, OMEGA, ONE, ONE + OMEGA)


def inactive_offset(r: int) -> EisensteinPoint:
    """Coset representative of ``2*Z(omega)`` with the fewest cells in ``B_r``.

    Ties prefer ``2*Z(omega)`` itself, then ``2*Z(omega) + omega``.  For odd
    ``r`` the winner is ``0`` when ``r % 4 == 1`` and ``1`` when
    ``r % 4 == 3``; for even ``r`` it is ``omega``.  The count is then
    ``r**2 + (r - 1)//2`` (odd) or ``r**2`` (even).
    """
    pts = _box_points(r)
    counts = [sum(p.in_coset(o) for p in pts) for o in _COSETS]
    return _COSETS[counts.index(min(counts))]


def inactive_set_and_clusters(graph: InterferenceGraph) -> ClusterPartition:
    """Silence a coset of ``2*Z(omega)`` and cluster the surviving edges.

    The inactive cells form the sparsest coset of ``2*Z(omega)`` inside
    ``B_r`` (see :func:`inactive_offset`); cluster centres run over that
    coset shifted by ``omega``.
    """
    r = graph.r
    offset = inactive_offset(r)
    inactive = frozenset(v for v in graph.vertices if v.in_coset(offset))
    center_offset = offset + OMEGA
    vs = graph.vertex_set

    clusters, roles, partial = {}, {}, set()
    # Every cluster member is one step from its centre, so centres owning an
    # inside edge lie in B_{r+1}.
    for z in _box_points(r + 1):
        if not z.in_coset(center_offset):
            continue
        es = tuple(e for e in cluster_edges(z) if e[0] in vs and e[1] in vs)
        if not es:
            continue
        clusters[z] = es
        roles[z] = {k: (p if p in vs else None) for k, p in cluster_roles(z).items()}
        if len(es) < 6:
            partial.add(z)
    return ClusterPartition(
        offset=offset,
        inactive=inactive,
        clusters=clusters,
        roles=roles,
        partial=frozenset(partial),
    )


def graph_to_json(graph: InterferenceGraph, partition: ClusterPartition | None = None) -> dict:
    """Plain-data export of the graph (and optionally its cluster partition)."""
    if partition is None:
        partition = inactive_set_and_clusters(graph)

    def epair(e):
        return [e[0].pair(), e[1].pair()]

    return {
        "r": graph.r,
        "vertices": [{"a": v.a, "b": v.b} for v in graph.vertices],
        "edges": [epair(e) for e in sorted(graph.undirected_edges)],
        "directed": [epair(e) for e in graph.directed_edges],
        "triangles": [[p.pair() for p in t] for t in graph.triangles],
        "v_ex": [v.pair() for v in sorted(graph.external_vertices, key=decode_key)],
        "v0": [v.pair() for v in sorted(partition.inactive, key=decode_key)],
        "clusters": {z.key(): [epair(e) for e in es] for z, es in partition.clusters.items()},
    }
