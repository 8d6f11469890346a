"""Disc-side dynamics read through a numerical Riemann map.

For a non-elliptic model phi_t(z) = h^{-1}(h(z) + it); for elliptic (starlike
or normalized spiral) models phi_t(z) = h^{-1}(e^{-t} h(z)).  Boundary values
of h^{-1} are not directly computable, so boundary points are approached from
inside Q with a few offsets and extrapolated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage

from ..boundary import BoundaryPoint
from ..model import membership
from .riemann import RiemannMap

OFFSETS = (1e-2, 1e-3, 1e-4)
BOUNDARY_RATIO = 0.1
# below this distance to the circle the offsets no longer carry a signal: the
# point sits where harmonic measure is crowded past double precision
CROWDED = 1e3 * np.finfo(float).eps


def disc_semigroup(rmap: RiemannMap, z, t: float):
    """phi_t(z) for |z| < 1 and t >= 0."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    w = rmap.eval(z)
    w = np.exp(-t) * np.asarray(w) if rmap.elliptic else np.asarray(w) + 1j * t
    out = rmap.invert(w)
    return out


def generator_at(rmap: RiemannMap, z):
    """Infinitesimal generator G = d/dt phi_t at t = 0.

    From h(phi_t(z)) = h(z) + it we get G = i / h'(z); elliptic models satisfy
    h(phi_t(z)) = e^{-t} h(z), so G = -h(z) / h'(z).
    """
    w, dw = rmap.eval(z, derivative=True)
    if rmap.elliptic:
        return -np.asarray(w) / dw
    return 1j / np.asarray(dw)


# ---------------------------------------------------------------- boundary points

def _point(rmap: RiemannMap, c: float, height, shift):
    """Model point at abscissa c (angle for radial models) and height, moved sideways by shift."""
    height = np.asarray(height, dtype=float)
    if rmap.elliptic:
        return np.exp(-height) * np.exp(1j * (c + shift))
    return (c + shift) + 1j * height


def _side_sign(rmap: RiemannMap, c: float, y: float, side: str | None) -> float:
    if side == "right":
        return 1.0
    if side == "left":
        return -1.0
    d = OFFSETS[-1] * rmap.frame.scale
    for s in (1.0, -1.0):
        if membership(rmap.model, complex(_point(rmap, c, y, s * d))) == "interior":
            return s
    raise ValueError(f"no side of the model domain touches the boundary at {c} (height {y})")


def _extrapolate(rmap: RiemannMap, c: float, heights, s: float):
    """Limits of h^{-1} at c + i*heights from side s, with a boundary flag per point.

    A point counts as a boundary point when 1 - |z| shrinks with the offset
    (roughly linearly, by a factor 100 over the offset range); interior points
    keep 1 - |z| essentially fixed.  Points whose largest offset already lands
    within ``CROWDED`` of the circle (deep in a narrow channel) are reported on
    the boundary with position NaN: no floating-point map can resolve them.
    """
    heights = np.atleast_1d(np.asarray(heights, dtype=float))
    scale = 1.0 if rmap.elliptic else rmap.frame.scale
    zs = [rmap.invert(_point(rmap, c, heights, s * e * scale)) for e in OFFSETS]
    z1, z2, z3 = (np.atleast_1d(np.asarray(z, dtype=complex)) for z in zs)
    gap1, gap3 = np.abs(1 - np.abs(z1)), np.abs(1 - np.abs(z3))
    crowded = gap1 < CROWDED
    with np.errstate(divide="ignore", invalid="ignore"):
        on = (gap3 <= BOUNDARY_RATIO * gap1) | crowded
    # offsets shrink tenfold: two rounds of linear Richardson
    r_fine = (10 * z3 - z2) / 9
    r_coarse = (10 * z2 - z1) / 9
    lim = (100 * r_fine - r_coarse) / 99
    with np.errstate(divide="ignore", invalid="ignore"):
        lim = np.where(on, lim / np.abs(lim), lim)
    inner = np.atleast_1d(np.asarray(rmap.invert(_point(rmap, c, heights, 0.0)), dtype=complex))
    lim = np.where(on, lim, inner)
    lim = np.where(crowded, np.nan + 0j, lim)
    if not np.all(np.isfinite(lim) | crowded):
        raise ArithmeticError("inward extrapolation left the truncation window")
    return lim, on


def locate(rmap: RiemannMap, where: BoundaryPoint) -> complex:
    """Disc position of a boundary descriptor (top, bottom end or arc point)."""
    if where.kind == "top":
        return complex(0.0) if rmap.elliptic else rmap.top_point
    if where.kind == "point":
        s = _side_sign(rmap, where.c, where.y, where.side)
        z, _ = _extrapolate(rmap, where.c, [where.y], s)
        if not np.isfinite(z[0]):
            raise ArithmeticError(f"{where} is crowded past double precision on the circle")
        return complex(z[0])
    return _locate_bottom(rmap, where)


def _locate_bottom(rmap: RiemannMap, where: BoundaryPoint) -> complex:
    fr, nodes = rmap.frame, rmap.nodes
    a, b = where.c, where.c2 if where.c2 is not None else where.c
    if rmap.elliptic:
        mid = 0.5 * (a + b)
        target = fr.ytop * np.exp(1j * mid)
        pool = np.abs(nodes) >= fr.ytop * (1 - 1e-9)
    else:
        a, b = max(a, fr.xlo), min(b, fr.xhi)
        target = complex(0.5 * (a + b), fr.ybot)
        pool = nodes.imag <= fr.ybot + 1e-12 * max(1.0, abs(fr.ybot))
    if not pool.any():
        raise ValueError(f"no truncation floor under {where}")
    idx = np.nonzero(pool)[0]
    k = idx[np.argmin(np.abs(nodes[idx] - target))]
    return complex(rmap.node_prevertices()[k])


# -------------------------------------------------------------------- trajectories

@dataclass
class Trajectory:
    t: np.ndarray
    z: np.ndarray
    on_boundary: np.ndarray
    landing_time: float
    where: BoundaryPoint


def boundary_trajectory(rmap: RiemannMap, where: BoundaryPoint, t_max: float = 5.0,
                        dt: float = 1e-2) -> Trajectory:
    """Sample t -> phi_t(p) for a boundary descriptor p on the grid 0, dt, ..., t_max.

    The landing time is the first time the orbit leaves the circle, located to
    within half a step (inf if it never does before t_max).
    """
    if dt <= 0 or t_max < 0:
        raise ValueError("need dt > 0 and t_max >= 0")
    t = np.arange(0.0, t_max + 0.5 * dt, dt)
    if where.kind != "point":
        z0 = locate(rmap, where)
        on = np.full(t.shape, where.kind != "top" or not rmap.elliptic)
        return Trajectory(t, np.full(t.shape, z0), on, math.inf, where)
    s = _side_sign(rmap, where.c, where.y, where.side)
    z, on = _extrapolate(rmap, where.c, where.y + t, s)
    off = np.nonzero(~on)[0]
    landing = math.inf if off.size == 0 else max(0.0, t[off[0]] - 0.5 * dt)
    return Trajectory(t, z, on, landing, where)


# ---------------------------------------------------------------------- clusters

@dataclass
class Cluster:
    center: complex
    size: int
    spread: float


def cluster_points(values, radius: float) -> list[Cluster]:
    """Single-linkage clusters of complex points; points closer than ``radius`` chain together."""
    v = np.asarray(values, dtype=complex).ravel()
    v = v[np.isfinite(v)]
    if v.size == 0:
        return []
    if v.size == 1:
        return [Cluster(complex(v[0]), 1, 0.0)]
    labels = fcluster(linkage(np.column_stack([v.real, v.imag]), "single"), radius, "distance")
    out = []
    for lab in np.unique(labels):
        pts = v[labels == lab]
        c = complex(pts.mean())
        out.append(Cluster(c, int(pts.size), float(np.max(np.abs(pts - c)))))
    return sorted(out, key=lambda cl: (-cl.size, cl.center.real, cl.center.imag))


def cluster_set(f, sequences, n: int = 64, tail: int = 8, radius: float = 0.02) -> list[Cluster]:
    """Clustered tail values of f along each sequence k -> z_k (k = 1..n).

    Only the last ``tail`` terms of every sequence are kept, so the clusters
    estimate the limit points of f at the common limit of the sequences.
    """
    ks = np.arange(max(1, n - tail + 1), n + 1)
    vals = [np.atleast_1d(f(np.array([seq(int(k)) for k in ks]))) for seq in sequences]
    return cluster_points(np.concatenate(vals), radius)


def composed_map(source: RiemannMap, target: RiemannMap, model_map):
    """z -> target^{-1}(model_map(source(z))): the disc homeomorphism induced by a model map."""
    def f(z):
        return target.invert(model_map(source.eval(z)))
    return f


__all__ = ["disc_semigroup", "generator_at", "locate", "Trajectory", "boundary_trajectory",
           "Cluster", "cluster_points", "cluster_set", "composed_map", "OFFSETS"]
