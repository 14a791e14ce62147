"""Discrete Plateau experiments on unions of two planes.

The baseline competitor is two fan-triangulated unit disks in the
canonical plane pair, meeting only at the origin, with the boundary rings
fixed; its area tends to 2*pi.  The pinched competitor removes both disks
inside a pinch radius and joins the two inner circles by a ruled tube
through the origin region, which is the minimal-complexity connected
competitor family.

``minimize_area`` runs plain gradient descent with backtracking on the
free vertices (area Hessians are rank-deficient at cone points, so
robustness beats Newton here), radially retracting anything that leaves
the closed unit ball.  ``certificate_lower_bound`` turns shadow areas into
a certified area floor (shadow1 + shadow2) / lambda.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import exterior
from .bounds import projection_sums, wirtinger_bound
from .grassmann import Plane, canonical_pair, characteristic_angles
from .surfaces import TriMesh4, area, shadow_area

# wedge coefficients -> antisymmetric matrix, as a (6, 4, 4) structure tensor
_STRUCT = np.zeros((6, 4, 4))
for _k, (_i, _j) in enumerate(exterior.BASIS):
    _STRUCT[_k, _i, _j] = 1.0
    _STRUCT[_k, _j, _i] = -1.0


@dataclass(frozen=True)
class OptimizerConfig:
    max_iters: int = 200
    step: float = 0.01
    tol_grad: float = 1e-6


@dataclass(frozen=True)
class ExperimentConfig:
    alpha1: float
    alpha2: float
    boundary_segments: int = 256
    pinch_radius: float = 0.0
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    seed: int = 0
    resolution: int = 256            # shadow rasterization cells per unit
    certificates: bool = True

    def __post_init__(self):
        if not (0.0 < self.alpha1 <= self.alpha2 <= np.pi / 2 + 1e-15):
            raise ValueError(
                f"need 0 < alpha1 <= alpha2 <= pi/2, got ({self.alpha1}, {self.alpha2})"
            )
        if not (0.0 <= self.pinch_radius < 0.5):
            raise ValueError(f"pinch radius must lie in [0, 0.5), got {self.pinch_radius}")


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    initial_area: float
    final_area: float
    reference_area: float            # 2*pi
    area_trace: np.ndarray
    certificate_bound: float
    shadows_cover: tuple[bool, bool]
    verdict: str                     # no-improvement-found | improved | certified-optimal
    tolerance: float                 # rasterization + discretization allowance
    final_mesh: TriMesh4 | None = None


@dataclass(frozen=True)
class MinimizeResult:
    mesh: TriMesh4
    trace: np.ndarray
    grad_norm: float
    stopped: str                     # converged | max-iters | line-search-failure


def _ring(plane: Plane, radius: float, n: int) -> np.ndarray:
    t = np.arange(n) * (2.0 * np.pi / n)
    return radius * (np.cos(t)[:, None] * plane.basis[0]
                     + np.sin(t)[:, None] * plane.basis[1])


def build_union_mesh(alpha1: float, alpha2: float, n: int) -> TriMesh4:
    """Two fan disks in the canonical pair, sharing only the origin vertex."""
    if n < 32:
        raise ValueError(f"need at least 32 boundary segments, got {n}")
    p1, p2 = canonical_pair(alpha1, alpha2)
    verts = np.vstack([np.zeros((1, 4)), _ring(p1, 1.0, n), _ring(p2, 1.0, n)])
    faces = []
    for base in (1, 1 + n):
        for k in range(n):
            faces.append([0, base + k, base + (k + 1) % n])
    fixed = np.ones(len(verts), dtype=bool)
    fixed[0] = False
    return TriMesh4(verts, np.array(faces), fixed)


def _annulus_block(plane: Plane, radii: np.ndarray, n: int, offset: int):
    verts = np.concatenate([_ring(plane, r, n) for r in radii])
    faces = []
    for j in range(len(radii) - 1):
        a = offset + j * n
        b = offset + (j + 1) * n
        for k in range(n):
            k1 = (k + 1) % n
            faces.append([a + k, b + k, b + k1])
            faces.append([a + k, b + k1, a + k1])
    return verts, faces


def build_pinched_competitor(alpha1: float, alpha2: float,
                             pinch_radius: float, n: int) -> TriMesh4:
    """Both disks cut at the pinch radius and joined by a ruled tube.

    The annuli use geometric radial grading (inner triangles keep a sane
    aspect ratio); the tube linearly interpolates between the two inner
    circles, giving the straight join through the origin region.  The
    pinch value 0 returns the plain union mesh.
    """
    if pinch_radius == 0.0:
        return build_union_mesh(alpha1, alpha2, n)
    if pinch_radius < 0.0:
        raise ValueError(f"pinch radius must be nonnegative, got {pinch_radius}")
    if n < 32:
        raise ValueError(f"need at least 32 boundary segments, got {n}")
    if pinch_radius < 4.0 / n:
        raise ValueError(
            f"pinch radius {pinch_radius} too small for {n} segments: "
            "the connector tube would be degenerate"
        )
    p1, p2 = canonical_pair(alpha1, alpha2)
    n_r = max(4, round(n / 12))
    radii = pinch_radius ** (1.0 - np.arange(n_r + 1) / n_r)   # rho ... 1, geometric

    v1, f1 = _annulus_block(p1, radii, n, 0)
    off2 = len(v1)
    v2, f2 = _annulus_block(p2, radii, n, off2)

    # tube rings interpolate inner circle of disk 1 -> inner circle of disk 2
    m_t = max(4, n // 32)
    c1, c2 = v1[:n], v2[:n]
    tube_verts = []
    ring_ids = [np.arange(n)]                       # t = 0: disk-1 inner ring
    off3 = off2 + len(v2)
    for l in range(1, m_t):
        t = l / m_t
        tube_verts.append((1.0 - t) * c1 + t * c2)
        ring_ids.append(off3 + (l - 1) * n + np.arange(n))
    ring_ids.append(off2 + np.arange(n))            # t = 1: disk-2 inner ring
    f3 = []
    for l in range(m_t):
        a, b = ring_ids[l], ring_ids[l + 1]
        for k in range(n):
            k1 = (k + 1) % n
            f3.append([a[k], b[k], b[k1]])
            f3.append([a[k], b[k1], a[k1]])

    verts = np.vstack([v1, v2] + ([np.concatenate(tube_verts)] if tube_verts else []))
    faces = np.array(f1 + f2 + f3)
    fixed = np.zeros(len(verts), dtype=bool)
    fixed[n_r * n:(n_r + 1) * n] = True             # outer ring, disk 1
    fixed[off2 + n_r * n:off2 + (n_r + 1) * n] = True
    return TriMesh4(verts, faces, fixed)


def _area_and_gradient(verts: np.ndarray, faces: np.ndarray):
    p = verts[faces]
    u = p[:, 1] - p[:, 0]
    v = p[:, 2] - p[:, 0]
    w = exterior.wedge(u, v)
    n = np.sqrt(np.sum(w * w, axis=1))
    total = 0.5 * float(np.sum(n))
    safe = np.maximum(n, 1e-30)
    wm = np.einsum("fk,kab->fab", w, _STRUCT)
    g1 = np.einsum("fab,fb->fa", wm, v) / (2.0 * safe[:, None])
    g2 = -np.einsum("fab,fb->fa", wm, u) / (2.0 * safe[:, None])
    g0 = -(g1 + g2)
    grad = np.zeros_like(verts)
    np.add.at(grad, faces[:, 0], g0)
    np.add.at(grad, faces[:, 1], g1)
    np.add.at(grad, faces[:, 2], g2)
    return total, grad


def _retract_to_ball(verts: np.ndarray, free: np.ndarray) -> None:
    norms = np.linalg.norm(verts[free], axis=1)
    out = norms > 1.0
    if out.any():
        idx = np.flatnonzero(free)[out]
        verts[idx] /= norms[out][:, None]


def minimize_area(mesh: TriMesh4, opt: OptimizerConfig = OptimizerConfig()) -> MinimizeResult:
    """Monotone gradient descent on free vertices with radial ball retraction."""
    if not mesh.fixed.any():
        raise ValueError("mesh has no fixed boundary vertices")
    verts = mesh.vertices.copy()
    free = ~mesh.fixed
    current, grad = _area_and_gradient(verts, mesh.faces)
    trace = [current]
    step = opt.step
    stopped = "max-iters"
    gnorm = float(np.linalg.norm(grad[free]))
    for _ in range(opt.max_iters):
        if gnorm < opt.tol_grad:
            stopped = "converged"
            break
        accepted = False
        s = step
        while s > 1e-12 * opt.step:
            trial = verts.copy()
            trial[free] -= s * grad[free]
            _retract_to_ball(trial, free)
            val, g = _area_and_gradient(trial, mesh.faces)
            if val < current:
                verts, current, grad = trial, val, g
                gnorm = float(np.linalg.norm(grad[free]))
                trace.append(current)
                step = min(s * 1.5, 10.0 * opt.step)
                accepted = True
                break
            s *= 0.5
        if not accepted:
            stopped = "line-search-failure"
            break
    out = TriMesh4.__new__(TriMesh4)
    out.vertices = verts
    out.faces = mesh.faces.copy()
    out.fixed = mesh.fixed.copy()
    return MinimizeResult(out, np.array(trace), gnorm, stopped)


def certificate_lower_bound(
    mesh: TriMesh4, p1: Plane, p2: Plane, resolution: int = 256
) -> tuple[float, tuple[bool, bool]]:
    """Certified area floor (shadow1 + shadow2) / lambda plus coverage flags.

    Coverage asks each shadow to reach (1 - 2/resolution) * pi, the full
    unit disk up to rasterization slop.  lambda is the max face projection
    sum, never above the proven 1 + 2 cos(alpha1).
    """
    if resolution < 128:
        raise ValueError(f"certificate resolution must be >= 128, got {resolution}")
    sh1 = shadow_area(mesh, p1, resolution)
    sh2 = shadow_area(mesh, p2, resolution)
    covers = (sh1 >= (1.0 - 2.0 / resolution) * np.pi,
              sh2 >= (1.0 - 2.0 / resolution) * np.pi)
    ang = characteristic_angles(p1, p2)
    lam = wirtinger_bound(ang.alpha1)
    if len(mesh.faces):
        w = _edge_wedges_safe(mesh)
        if len(w):
            lam = min(lam, float(np.max(projection_sums(p1, p2, w))))
    return (sh1 + sh2) / lam, covers


def _edge_wedges_safe(mesh: TriMesh4) -> np.ndarray:
    """Unit tangents of all non-degenerate faces (zero-area faces carry no measure)."""
    p = mesh.vertices[mesh.faces]
    w = exterior.wedge(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    n = np.sqrt(np.sum(w * w, axis=1))
    keep = n > 1e-13
    return w[keep] / n[keep, None]


def mesh_area_tolerance(n: int) -> float:
    """Discretization error of the two fan disks: 2*pi - n*sin(2*pi/n)."""
    return float(2.0 * np.pi - n * np.sin(2.0 * np.pi / n))


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Build the competitor, minimize, certify, and attach a verdict."""
    p1, p2 = canonical_pair(cfg.alpha1, cfg.alpha2)
    n = cfg.boundary_segments
    mesh = build_pinched_competitor(cfg.alpha1, cfg.alpha2, cfg.pinch_radius, n)
    initial = area(mesh)
    result = minimize_area(mesh, cfg.optimizer)
    final = float(result.trace[-1])

    mesh_tol = mesh_area_tolerance(n)
    tol = 4.0 / cfg.resolution + 2.0 * mesh_tol
    if cfg.certificates:
        bound, covers = certificate_lower_bound(result.mesh, p1, p2, cfg.resolution)
    else:
        bound, covers = 0.0, (False, False)

    eps_alpha = 2.0 * np.cos(cfg.alpha1)
    reference = 2.0 * np.pi
    if (cfg.certificates and covers[0] and covers[1]
            and final >= bound - tol
            and bound >= reference / (1.0 + eps_alpha) - tol):
        verdict = "certified-optimal"
    elif final < reference - 2.0 * mesh_tol:
        verdict = "improved"
    else:
        verdict = "no-improvement-found"

    return ExperimentReport(
        config=cfg,
        initial_area=initial,
        final_area=final,
        reference_area=reference,
        area_trace=result.trace,
        certificate_bound=bound,
        shadows_cover=covers,
        verdict=verdict,
        tolerance=tol,
        final_mesh=result.mesh,
    )
