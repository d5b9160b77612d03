"""Small dense complex linear algebra used by the beamforming schemes.

All rank decisions go through the SVD with the relative threshold
``RANK_RTOL * sigma_max``.
"""

from __future__ import annotations

import logging

import numpy as np

from .exceptions import DegenerateChannelError

log = logging.getLogger(__name__)

RANK_RTOL = 1e-10
MAX_COND = 1e10
EIG_TIE_TOL = 1e-9


def numerical_rank(A: np.ndarray, rtol: float = RANK_RTOL) -> int:
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def left_null_space(A: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis ``Q`` (columns) with ``Q^H A = 0``.

    An ``n x 0`` input gives the identity.
    """
    n = A.shape[0]
    if A.shape[1] == 0:
        return np.eye(n, dtype=complex)
    U, s, _ = np.linalg.svd(A)
    rank = int(np.sum(s > rtol * s[0])) if s.size and s[0] > 0 else 0
    return U[:, rank:]


def orthogonal_projector(h: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Matrix with orthonormal rows that annihilates the columns of ``h``."""
    h = h.reshape(h.shape[0], -1)
    return left_null_space(h, rtol).conj().T


def canonical_phase(v: np.ndarray) -> np.ndarray:
    """Rotate ``v`` so its largest-magnitude entry is real and positive."""
    k = int(np.argmax(np.abs(v)))
    if v[k] == 0:
        return v
    return v * (abs(v[k]) / v[k])


def unit(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    n = np.linalg.norm(v)
    if n == 0:
        raise DegenerateChannelError("cannot normalise a zero vector")
    return canonical_phase(v / n)


def normalize_columns(V: np.ndarray) -> np.ndarray:
    V = np.asarray(V, dtype=complex)
    return np.column_stack([unit(V[:, k]) for k in range(V.shape[1])]) if V.shape[1] else V


def safe_inv(H: np.ndarray, where=None, max_cond: float = MAX_COND) -> np.ndarray:
    """Inverse of a square channel, refusing condition numbers above ``max_cond``."""
    cond = np.linalg.cond(H)
    if not np.isfinite(cond) or cond > max_cond:
        raise DegenerateChannelError(
            f"near-singular channel inversion (cond={cond:.3g}) at {where}", where
        )
    return np.linalg.inv(H)


def _lex_key(z: complex) -> tuple[float, float]:
    return (z.real, z.imag)


def eig2x2(T: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form eigenpairs of a 2x2 complex matrix.

    Returns eigenvalues ordered by decreasing magnitude and the matching unit
    eigenvectors as columns.  When the magnitudes tie (within
    ``EIG_TIE_TOL`` relative) the order falls back to lexicographic
    ``(real, imag)`` descending and a warning is logged.
    """
    t00, t01, t10, t11 = T[0, 0], T[0, 1], T[1, 0], T[1, 1]
    half_tr = (t00 + t11) / 2
    disc = np.sqrt(((t00 - t11) / 2) ** 2 + t01 * t10)
    lams = [half_tr + disc, half_tr - disc]
    scale = max(abs(lams[0]), abs(lams[1]), 1e-300)
    if abs(abs(lams[0]) - abs(lams[1])) <= EIG_TIE_TOL * scale:
        log.warning("eigenvalue magnitudes tie (%r, %r); ordering lexicographically", *lams)
        lams.sort(key=_lex_key, reverse=True)
    else:
        lams.sort(key=abs, reverse=True)
    vecs = []
    for lam in lams:
        # Two algebraically equivalent candidates; keep the better conditioned.
        c1 = np.array([t01, lam - t00])
        c2 = np.array([lam - t11, t10])
        v = c1 if np.linalg.norm(c1) >= np.linalg.norm(c2) else c2
        if np.linalg.norm(v) == 0:
            # T is a multiple of the identity: every vector is an eigenvector.
            v = np.array([1.0, 0.0]) if not vecs else np.array([0.0, 1.0])
        vecs.append(unit(v))
    return np.array(lams), np.column_stack(vecs)


def receive_filter(interference: np.ndarray, direct: np.ndarray, d: int) -> np.ndarray | None:
    """Zero-forcing receive filter with ``d`` orthonormal columns.

    The filter lives in the left null space of ``interference`` and, inside
    that space, keeps the ``d`` directions with the strongest projected
    ``direct`` signal.  Returns ``None`` when the null space is too small.
    """
    Q = left_null_space(interference)
    if Q.shape[1] < d:
        return None
    if d == 0:
        return np.zeros((interference.shape[0], 0), dtype=complex)
    B = Q.conj().T @ direct
    W, _, _ = np.linalg.svd(B)
    return normalize_columns(Q @ W[:, :d])
