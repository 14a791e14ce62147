"""Shared builders and independent oracles for the test suite.

Oracles here deliberately avoid the code paths they validate: the
characteristic-angle oracle minimizes over vector pairs per the
definition, the quadruple-wedge oracle expands xi ^ xi with explicit
permutation signs, and the critical-scale oracle rescans every dyadic
scale from the origin instead of following the process's centers.
"""

from __future__ import annotations

import numpy as np

from planes4 import exterior
from planes4.grassmann import Plane
from planes4.scanner import SetSample, TranslationSearch
from planes4.surfaces import TriMesh4


def fan_disk(n: int, plane: Plane, center: np.ndarray | None = None,
             radius: float = 1.0) -> TriMesh4:
    c = np.zeros(4) if center is None else np.asarray(center, dtype=float)
    t = np.arange(n) * (2.0 * np.pi / n)
    ring = c + radius * (np.cos(t)[:, None] * plane.basis[0]
                         + np.sin(t)[:, None] * plane.basis[1])
    verts = np.vstack([c[None, :], ring])
    faces = np.array([[0, 1 + k, 1 + (k + 1) % n] for k in range(n)])
    fixed = np.zeros(len(verts), dtype=bool)
    fixed[1:] = True
    return TriMesh4(verts, faces, fixed)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(4, 4)))
    return q * np.sign(np.diag(r))


def random_simple_units(rng: np.random.Generator, n: int) -> np.ndarray:
    """n random unit simple 2-vectors (normalized wedges of gaussian pairs)."""
    out = np.empty((n, 6))
    filled = 0
    while filled < n:
        x = rng.normal(size=(n - filled, 4))
        y = rng.normal(size=(n - filled, 4))
        w = exterior.wedge(x, y)
        norms = np.linalg.norm(w, axis=1)
        keep = norms > 1e-8
        w = w[keep] / norms[keep, None]
        out[filled:filled + len(w)] = w
        filled += len(w)
    return out


def quad_wedge_coefficient(xi: np.ndarray, zeta: np.ndarray) -> float:
    """Coefficient of e1^e2^e3^e4 in xi ^ zeta, by explicit permutation signs."""

    def levi_civita(p):
        sign, p = 1, list(p)
        for i in range(len(p)):
            for j in range(i + 1, len(p)):
                if p[i] > p[j]:
                    p[i], p[j] = p[j], p[i]
                    sign = -sign
        return sign if p == sorted(p) else 0

    total = 0.0
    for a, (i, j) in enumerate(exterior.BASIS):
        for b, (k, l) in enumerate(exterior.BASIS):
            if len({i, j, k, l}) == 4:
                total += xi[a] * zeta[b] * levi_civita((i, j, k, l))
    return total


def characteristic_angles_oracle(p: Plane, q: Plane) -> tuple[float, float]:
    """Definitional characteristic angles: minimize the angle over unit pairs.

    Grid-and-zoom over the two circle parameters; the second angle comes
    from the (unique up to sign) orthogonal completions of the minimizers.
    """

    def circle(plane, t):
        return np.cos(t)[:, None] * plane.basis[0] + np.sin(t)[:, None] * plane.basis[1]

    lo1, hi1, lo2, hi2 = 0.0, np.pi, 0.0, np.pi
    best = None
    for _ in range(8):
        t1 = np.linspace(lo1, hi1, 41)
        t2 = np.linspace(lo2, hi2, 41)
        g = np.abs(circle(p, t1) @ circle(q, t2).T)
        a, b = np.unravel_index(np.argmax(g), g.shape)
        best = (t1[a], t2[b], g[a, b])
        w1 = (hi1 - lo1) / 40
        w2 = (hi2 - lo2) / 40
        lo1, hi1 = best[0] - w1, best[0] + w1
        lo2, hi2 = best[1] - w2, best[1] + w2
    alpha1 = float(np.arccos(np.clip(best[2], 0.0, 1.0)))
    v2 = -np.sin(best[0]) * p.basis[0] + np.cos(best[0]) * p.basis[1]
    w2 = -np.sin(best[1]) * q.basis[0] + np.cos(best[1]) * q.basis[1]
    alpha2 = float(np.arccos(np.clip(abs(np.dot(v2, w2)), 0.0, 1.0)))
    return alpha1, alpha2


def brute_force_critical_scale(e: SetSample, planes, eps: float, floor: float,
                               search: TranslationSearch | None = None):
    """First dyadic scale (scanned from the origin) where the fit fails.

    Independent of the epsilon-process's sequential recentring: every
    scale is tested in a window around the origin.  Returns None when the
    floor is reached first.
    """
    from planes4.scanner import _PairGeometry, _search_translate

    if search is None:
        search = TranslationSearch(tol=1e-4 * eps)
    geom = _PairGeometry(e, *planes)
    origin = np.zeros(4)
    n = 1          # the process pins q0 = q1 = 0 and starts searching at 1/2
    while True:
        s = 2.0 ** (-n)
        if s < floor:
            return None
        ctx = geom.window_ctx(origin, s, 2.0 * s / search.plane_points)
        _, d = _search_translate(ctx, search)
        if d > eps + 2.0 * e.resolution / s:
            return s
        n += 1
