"""Multiscale flatness scan over dyadic bi-cylinders.

Sets are represented by dense point samples.  The window at center x and
scale r is the bi-cylinder D(x, r): both in-plane projections of y - x
must have norm at most r (closed clip; on finite samples the open/closed
distinction carries no measure and closed clips reproduce exactly).

The relative distance between two sets over a window is

    (1/r) * max( sup_{y in E ∩ D} dist(y, F),  sup_{y in F ∩ D} dist(y, E) )

with distances taken to the full (unclipped) other set.  All sups run
over samples, never true sets, so every comparison in the scan carries
the declared sample resolution h as a tolerance term 2h/r.

The scan itself walks dyadic scales s_n = 2^-n, fitting the best
translate of the plane pair in each window.  It stops at the first scale
where even the best translate misses by more than eps (plus the sampling
tolerance); if the scale falls below the resolution floor first, the scan
reports floor_hit instead.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .grassmann import Plane
from .surfaces import TriMesh4


@dataclass(frozen=True)
class SetSample:
    """Dense point sample of a 2-set in R^4 with its declared resolution.

    ``resolution`` is the sample spacing in the region where scan
    decisions happen (tiered samples may be coarser in the far field; the
    constructors below document their tiers).
    """

    points: np.ndarray
    resolution: float

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=float).reshape(-1, 4)
        if not len(pts):
            raise ValueError("a set sample must contain at least one point")
        if self.resolution <= 0:
            raise ValueError(f"resolution must be positive, got {self.resolution}")
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True)
class TranslationSearch:
    """Deterministic best-translate search: coarse grid plus coordinate descent."""

    grid_n: int = 3              # coarse grid points per translation axis
    plane_points: int = 48       # plane-lattice points per window diameter
    tol: float = 1e-6            # stop refining when improvement drops below this
    max_rounds: int = 24


@dataclass(frozen=True)
class ScanStep:
    index: int
    center: np.ndarray
    scale: float
    carried: float               # distance to the pair translated by this center
    best_q: np.ndarray
    best_dist: float


@dataclass(frozen=True)
class ScanReport:
    steps: tuple[ScanStep, ...]
    centers: np.ndarray          # q_0 .. q_last, shape (k, 4)
    scales: np.ndarray
    stopped: bool
    floor_hit: bool
    o_k: np.ndarray | None
    r_k: float | None
    eps: float
    floor: float
    resolution: float
    dist_shrunken: float | None = None   # to pair + o_k on D(o_k, 2 r_k (1 - 12 eps))
    dist_double: float | None = None     # to pair + o_k on D(o_k, 2 r_k)


def _inplane(points: np.ndarray, plane: Plane) -> np.ndarray:
    return points @ plane.basis.T


def bicylinder_mask(points: np.ndarray, p1: Plane, p2: Plane,
                    x: np.ndarray, r: float) -> np.ndarray:
    d = points - np.asarray(x, dtype=float)
    n1 = np.linalg.norm(_inplane(d, p1), axis=1)
    n2 = np.linalg.norm(_inplane(d, p2), axis=1)
    return (n1 <= r) & (n2 <= r)


def bicylinder_clip(sample: SetSample, p1: Plane, p2: Plane,
                    x: np.ndarray, r: float) -> np.ndarray:
    """Points of the sample inside the closed bi-cylinder D(x, r)."""
    if r <= 0:
        raise ValueError(f"clip radius must be positive, got {r}")
    return sample.points[bicylinder_mask(sample.points, p1, p2, x, r)]


def relative_distance(e: SetSample, f: SetSample, p1: Plane, p2: Plane,
                      x: np.ndarray, r: float) -> float:
    """Two-sided relative distance over D(x, r), sups taken against full sets.

    Both clips empty gives 0; a single empty clip leaves the one-sided sup.
    """
    ec = bicylinder_clip(e, p1, p2, x, r)
    fc = bicylinder_clip(f, p1, p2, x, r)
    if not len(ec) and not len(fc):
        return 0.0
    d = 0.0
    if len(ec):
        d = max(d, float(cKDTree(f.points).query(ec)[0].max()))
    if len(fc):
        d = max(d, float(cKDTree(e.points).query(fc)[0].max()))
    return d / r


def _complement_basis(plane: Plane) -> np.ndarray:
    """Orthonormal basis (2, 4) of the plane's orthogonal complement."""
    full = np.vstack([plane.basis, np.eye(4)])
    q, _ = np.linalg.qr(full.T)
    return q.T[2:4]


def _workers() -> int:
    raw = os.environ.get("PLANES4_THREADS", "")
    try:
        return max(1, int(raw)) if raw else -1
    except ValueError:
        return -1


#: cap on window points driving the translate search; the returned distance
#: is always re-evaluated exactly on the full window
_SEARCH_POINT_CAP = 150_000


class _PairGeometry:
    """Cached projections for a plane pair and one sampled set."""

    def __init__(self, e: SetSample, p1: Plane, p2: Plane):
        self.e = e
        self.planes = (p1, p2)
        self.comp = (_complement_basis(p1), _complement_basis(p2))
        pts = e.points
        self.inplane = (pts @ p1.basis.T, pts @ p2.basis.T)
        self.normal = (pts @ self.comp[0].T, pts @ self.comp[1].T)
        self.tree = cKDTree(pts)

    def window_mask(self, x: np.ndarray, r: float) -> np.ndarray:
        b1 = x @ self.planes[0].basis.T
        b2 = x @ self.planes[1].basis.T
        m1 = np.hypot(self.inplane[0][:, 0] - b1[0], self.inplane[0][:, 1] - b1[1]) <= r
        m1 &= np.hypot(self.inplane[1][:, 0] - b2[0], self.inplane[1][:, 1] - b2[1]) <= r
        return m1

    def window(self, x: np.ndarray, r: float) -> np.ndarray:
        return self.e.points[self.window_mask(x, r)]

    def sup_to_pair(self, n1: np.ndarray, n2: np.ndarray, qs: np.ndarray) -> np.ndarray:
        """Sup over points of the distance to the pair translated by each q.

        n1, n2 are the points' complement coordinates (m, 2) per plane; the
        translate only shifts those coordinates by q's, so the exact sup of
        min-plane distances vectorizes over a whole batch of candidates.
        """
        qs = np.atleast_2d(qs)
        if not len(n1):
            return np.zeros(len(qs))
        out = np.empty(len(qs))
        for s in range(0, len(qs), 16):              # cap the (batch, m) temporaries
            qc = qs[s:s + 16]
            b1 = qc @ self.comp[0].T                 # (k, 2)
            b2 = qc @ self.comp[1].T
            d1 = np.hypot(n1[None, :, 0] - b1[:, 0, None],
                          n1[None, :, 1] - b1[:, 1, None])
            d2 = np.hypot(n2[None, :, 0] - b2[:, 0, None],
                          n2[None, :, 1] - b2[:, 1, None])
            out[s:s + 16] = np.minimum(d1, d2).max(axis=1)
        return out

    def pair_lattice(self, x: np.ndarray, r: float, q: np.ndarray,
                     spacing: float) -> np.ndarray:
        """Sample of (P1 + q) union (P2 + q) inside D(x, r)."""
        pts = []
        for plane in self.planes:
            c = (x - q) @ plane.basis.T
            m = int(np.ceil(r / spacing))
            ax = np.arange(-m, m + 1) * spacing
            g1, g2 = np.meshgrid(c[0] + ax, c[1] + ax, indexing="ij")
            w2 = np.stack([g1.ravel(), g2.ravel()], axis=1)
            y = q + w2 @ plane.basis
            pts.append(y[bicylinder_mask(y, *self.planes, x, r)])
        return np.vstack(pts)

    def window_ctx(self, x: np.ndarray, r: float, spacing: float) -> "_WindowCtx":
        return _WindowCtx(self, np.asarray(x, dtype=float), r, spacing)

    def objective(self, x: np.ndarray, r: float, q: np.ndarray,
                  mask: np.ndarray, spacing: float) -> float:
        """Exact (full-window) relative distance to the pair translated by q."""
        return self.window_ctx(x, r, spacing).exact_value(q, mask)


class _WindowCtx:
    """One scan window: cached clip, search subsample, and a local kd-tree.

    The local tree holds the sample points inside D(x, 2r); for a query
    point inside D(x, r) whose nearest sample lies outside D(x, 2r) the
    true distance exceeds r, so any local answer <= r is already exact and
    larger ones fall back to the full tree.
    """

    def __init__(self, geom: _PairGeometry, x: np.ndarray, r: float, spacing: float):
        self.geom = geom
        self.x = x
        self.r = r
        self.spacing = spacing
        self.mask = geom.window_mask(x, r)
        idx = np.flatnonzero(self.mask)
        stride = max(1, int(np.ceil(len(idx) / _SEARCH_POINT_CAP)))
        sub = idx[::stride]
        self.n1 = geom.normal[0][sub]
        self.n2 = geom.normal[1][sub]
        wide = geom.window_mask(x, 2.0 * r)
        if wide.all():
            self.local_tree = geom.tree
        else:
            pts = geom.e.points[wide]
            self.local_tree = cKDTree(pts) if len(pts) else None

    def lattice_sup(self, q: np.ndarray) -> float:
        lat = self.geom.pair_lattice(self.x, self.r, q, self.spacing)
        if not len(lat):
            return 0.0
        if self.local_tree is None:
            d = self.geom.tree.query(lat, workers=_workers())[0]
            return float(d.max())
        d = self.local_tree.query(lat, workers=_workers())[0]
        far = d > self.r
        if far.any() and self.local_tree is not self.geom.tree:
            d[far] = self.geom.tree.query(lat[far], workers=_workers())[0]
        return float(d.max())

    def set_sup(self, qs: np.ndarray) -> np.ndarray:
        """Lower bound side: sup over (subsampled) window points to pair + q."""
        return self.geom.sup_to_pair(self.n1, self.n2, qs)

    def search_value(self, q: np.ndarray) -> float:
        d = float(self.set_sup(q)[0])
        return max(d, self.lattice_sup(q)) / self.r

    def exact_value(self, q: np.ndarray, mask: np.ndarray | None = None) -> float:
        m = self.mask if mask is None else mask
        d = 0.0
        if m.any():
            d = float(self.geom.sup_to_pair(
                self.geom.normal[0][m], self.geom.normal[1][m], q)[0])
        return max(d, self.lattice_sup(q)) / self.r


def best_translation(e: SetSample, planes: tuple[Plane, Plane], x: np.ndarray,
                     r: float, search: TranslationSearch = TranslationSearch(),
                     _geom: _PairGeometry | None = None) -> tuple[np.ndarray, float]:
    """Minimize the relative distance to the translated pair over a 4d box.

    The translate is confined to the coordinate box |q - x|_inf <= r/4
    (inside D(x, r/2)).  Coarse grid first, lexicographic tie-break on the
    grid ordering, then coordinate descent with step halving; refinement
    stops when a full sweep improves by less than search.tol.  Very large
    windows are subsampled for the search itself, but the returned distance
    is the exact full-window value at the returned translate.
    """
    x = np.asarray(x, dtype=float)
    geom = _geom if _geom is not None else _PairGeometry(e, *planes)
    ctx = geom.window_ctx(x, r, 2.0 * r / search.plane_points)
    return _search_translate(ctx, search)


def _search_translate(ctx: _WindowCtx, search: TranslationSearch) -> tuple[np.ndarray, float]:
    x, r = ctx.x, ctx.r
    if not ctx.mask.any():
        return x.copy(), 0.0

    half = r / 4.0
    ax = np.linspace(-half, half, search.grid_n)
    grid = x + np.stack(np.meshgrid(ax, ax, ax, ax, indexing="ij"), axis=-1).reshape(-1, 4)

    # the set-to-pair sup is a lower bound on the objective: evaluate coarse
    # candidates in that order and skip any that cannot win
    lowers = ctx.set_sup(grid) / r
    best_q, best_d = None, np.inf
    for k in np.argsort(lowers, kind="stable"):
        if lowers[k] >= best_d:
            continue
        d = ctx.search_value(grid[k])
        if d < best_d - 1e-15:
            best_q, best_d = grid[k].copy(), d

    step = half / max(search.grid_n - 1, 1)
    for _ in range(search.max_rounds):
        improved = 0.0
        for coord in range(4):
            for sign in (1.0, -1.0):
                q = best_q.copy()
                q[coord] += sign * step
                if np.max(np.abs(q - x)) > half + 1e-15:
                    continue
                if float(ctx.set_sup(q)[0]) / r >= best_d:
                    continue
                d = ctx.search_value(q)
                if d < best_d - 1e-15:
                    improved += best_d - d
                    best_q, best_d = q, d
        if improved < search.tol:
            step *= 0.5
            if step < search.tol * r:
                break
    return best_q, ctx.exact_value(best_q)


def epsilon_process(e: SetSample, planes: tuple[Plane, Plane], eps: float,
                    floor: float, search: TranslationSearch | None = None) -> ScanReport:
    """Dyadic stopping-time scan for the critical center and radius.

    The first two centers are pinned at the origin (q0 = q1 = 0); searching
    starts in D(q1, 1/2) and the translate found at step n becomes the
    center q_{n+1} of the next window D(q_{n+1}, 2^-(n+1)).  The scan stops
    at the first scale where even the best translate misses by more than
    eps + 2h/s_n (sampling tolerance included) and reports o_k = q_n,
    r_k = s_n.  Scales below the floor end the scan with floor_hit.
    """
    if not (0.0 < eps < 1.0):
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if floor < 2.0 * e.resolution:
        raise ValueError(
            f"floor {floor} below twice the sample resolution {e.resolution}"
        )
    if search is None:
        search = TranslationSearch(tol=1e-4 * eps)
    geom = _PairGeometry(e, *planes)
    origin = np.zeros(4)
    centers = [origin.copy(), origin.copy()]      # q_0 = q_1 = 0
    steps: list[ScanStep] = []
    scales = []
    stopped = False
    o_k = None
    r_k = None
    floor_hit = False
    dist_shrunken = None
    dist_double = None

    n = 1
    q = origin.copy()
    while True:
        s = 2.0 ** (-n)
        if s < floor:
            floor_hit = True
            break
        ctx = geom.window_ctx(q, s, 2.0 * s / search.plane_points)
        carried = ctx.exact_value(q)
        best_q, best_d = _search_translate(ctx, search)
        steps.append(ScanStep(n, q.copy(), s, carried, best_q.copy(), best_d))
        scales.append(s)
        if best_d > eps + 2.0 * e.resolution / s:
            stopped = True
            o_k = q.copy()
            r_k = s
            shrink = 2.0 * s * (1.0 - 12.0 * eps)
            if shrink > 0:
                wctx = geom.window_ctx(o_k, shrink, 2.0 * shrink / search.plane_points)
                dist_shrunken = wctx.exact_value(o_k)
            wctx = geom.window_ctx(o_k, 2.0 * s, 4.0 * s / search.plane_points)
            dist_double = wctx.exact_value(o_k)
            break
        q = best_q
        centers.append(q.copy())
        n += 1

    return ScanReport(
        steps=tuple(steps),
        centers=np.array(centers),
        scales=np.array(scales),
        stopped=stopped,
        floor_hit=floor_hit,
        o_k=o_k,
        r_k=r_k,
        eps=eps,
        floor=floor,
        resolution=e.resolution,
        dist_shrunken=dist_shrunken,
        dist_double=dist_double,
    )


def sample_mesh(mesh: TriMesh4, spacing: float) -> SetSample:
    """Sample a mesh by vertices plus barycentric face-interior points."""
    if spacing <= 0:
        raise ValueError(f"spacing must be positive, got {spacing}")
    pts = [mesh.vertices]
    v = mesh.vertices[mesh.faces]
    edge = max(
        float(np.linalg.norm(v[:, 1] - v[:, 0], axis=1).max()),
        float(np.linalg.norm(v[:, 2] - v[:, 0], axis=1).max()),
        float(np.linalg.norm(v[:, 2] - v[:, 1], axis=1).max()),
    ) if len(mesh.faces) else 0.0
    k = int(np.ceil(edge / spacing))
    for i in range(1, k + 1):
        for j in range(0, k + 1 - i):
            a = i / (k + 1)
            b = j / (k + 1)
            if a + b >= 1.0:
                continue
            pts.append((1.0 - a - b) * v[:, 0] + a * v[:, 1] + b * v[:, 2])
    return SetSample(np.vstack(pts), spacing)


def _disc_lattice(spacing: float, radius: float, inner: float = 0.0) -> np.ndarray:
    m = int(np.ceil(radius / spacing))
    ax = np.arange(-m, m + 1) * spacing
    g1, g2 = np.meshgrid(ax, ax, indexing="ij")
    w = np.stack([g1.ravel(), g2.ravel()], axis=1)
    rr = np.linalg.norm(w, axis=1)
    return w[(rr <= radius) & (rr >= inner)]


def plane_pair_sample(spacing: float, extent: float = 1.2,
                      fine_spacing: float | None = None,
                      fine_radius: float = 0.0,
                      planes: tuple[Plane, Plane] | None = None) -> SetSample:
    """Sample of the union of two planes, optionally with a finer core tier.

    The declared resolution is the fine (core) spacing when a core is
    requested; the far field keeps the base spacing.
    """
    from .grassmann import P01, P02
    p1, p2 = planes if planes is not None else (P01, P02)
    tiers = [(_disc_lattice(spacing, extent, inner=fine_radius))]
    res = spacing
    if fine_spacing is not None and fine_radius > 0.0:
        tiers.append(_disc_lattice(fine_spacing, fine_radius))
        res = fine_spacing
    w = np.vstack(tiers)
    pts = np.vstack([w @ p1.basis, w @ p2.basis])
    return SetSample(pts, res)


def pinched_pair_sample(pinch_radius: float, height: float, spacing: float,
                        extent: float = 1.2,
                        fine_spacing: float | None = None,
                        fine_radius: float = 0.0) -> SetSample:
    """Standard orthogonal pair with a smooth bump of given support and height.

    Points of span(e1,e2) inside the pinch radius are displaced along e3
    by height * (1 - (l/rho)^2)^2, and points of span(e3,e4) along e1 by
    the same profile; the constructed deviation from every translate of
    the pair is of order the bump height at scales around the pinch.
    """
    from .grassmann import P01, P02
    if pinch_radius <= 0:
        raise ValueError(f"pinch radius must be positive, got {pinch_radius}")
    tiers = [_disc_lattice(spacing, extent, inner=fine_radius)]
    res = spacing
    if fine_spacing is not None and fine_radius > 0.0:
        tiers.append(_disc_lattice(fine_spacing, fine_radius))
        res = fine_spacing
    w = np.vstack(tiers)
    r = np.linalg.norm(w, axis=1)
    bump = np.where(r < pinch_radius,
                    height * (1.0 - (r / pinch_radius) ** 2) ** 2, 0.0)
    pts1 = w @ P01.basis
    pts1[:, 2] += bump
    pts2 = w @ P02.basis
    pts2[:, 0] += bump
    return SetSample(np.vstack([pts1, pts2]), res)
