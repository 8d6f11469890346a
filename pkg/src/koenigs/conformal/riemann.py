"""Numerical Riemann maps h : D -> Q for Koenigs models.

The map is the composition

    D --Moebius--> H --zipper^-1--> chart domain --chart^-1--> Q

normalized by h(0) = anchor and arg h'(0) = arg direction (i for
non-elliptic models, so that the flow direction is preserved; 1 for elliptic
ones, where the anchor is the fixed point 0).
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from ..model import (EllipticSpiral, EllipticStarlike, HyperbolicGroup, NonElliptic, SemigroupModel,
                     check_model, membership)
from ..conjugation import as_nonelliptic
from .charts import HalfPlaneChart, PlaneChart, ScaleChart, StripChart
from .sampling import Frame, Segment, SamplingError, cusp_floor, join, lower_segments, radial_segments
from .zipper import GeodesicZipper

DEFAULT_RESOLUTION = 100
DEFAULT_WINDOW = 5.0
START_GAP = 0.05


class ConvergenceError(RuntimeError):
    """The map could not be built (or evaluated) to the requested accuracy."""

    def __init__(self, message: str, residual: float = math.nan):
        super().__init__(f"{message} (worst boundary residual {residual:.3g})")
        self.residual = residual


@dataclass
class RiemannMap:
    model: SemigroupModel
    chart: object
    zipper: GeodesicZipper
    anchor: complex
    direction: complex
    rot: complex
    ya: complex
    nodes: np.ndarray            # model-plane boundary nodes (top point excluded)
    node_seg: np.ndarray
    segments: list
    frame: Frame
    resolution: int
    top_pv: float = math.inf     # real prevertex of the top prime end
    start: int = 0               # zipper node order is the boundary list rolled by this much
    residual: float = math.nan
    build_seconds: float = 0.0

    @property
    def elliptic(self) -> bool:
        return self.chart.top is None

    # -- disc <-> half-plane
    def _to_h(self, z):
        q = np.asarray(z, dtype=complex) / self.rot
        with np.errstate(divide="ignore", invalid="ignore"):
            zeta = (self.ya - q * np.conj(self.ya)) / (1 - q)
            dz = (self.ya - np.conj(self.ya)) / (1 - q) ** 2 / self.rot
        return zeta, dz

    def _from_h(self, zeta):
        with np.errstate(divide="ignore", invalid="ignore"):
            z = self.rot * (zeta - self.ya) / (zeta - np.conj(self.ya))
        return np.where(np.isinf(zeta), self.rot, z)

    # -- public maps
    def eval(self, z, derivative: bool = False):
        """h(z) for |z| <= 1 (boundary values are limits from inside)."""
        z = np.asarray(z, dtype=complex)
        zeta, d1 = self._to_h(z)
        c, d2 = self.zipper.inverse(zeta, derivative=True)
        w, d3 = self.chart.inv(c, derivative=True)
        if derivative:
            out = (w, d1 * d2 * d3)
            return tuple(o if o.ndim else complex(o) for o in out)
        return w if w.ndim else complex(w)

    def derivative(self, z):
        return self.eval(z, derivative=True)[1]

    def invert(self, w, strict: bool = False):
        """h^{-1}(w).

        Points beyond the truncation window are not represented by the polygon:
        those above it (or far out sideways) resolve to the top prime end,
        those below the floor (or beyond the radial cap) give NaN.
        """
        w = np.asarray(w, dtype=complex)
        c = self.chart.fwd(w)
        with np.errstate(divide="ignore", invalid="ignore"):
            zeta = self.zipper.forward(c)
            z = self._from_h(zeta)
        fr = self.frame
        if self.elliptic:
            z = np.where(np.abs(w) > fr.ytop * (1 + 1e-12), np.nan, z)
        else:
            z = np.where(w.imag < fr.ybot, np.nan + 0j, z)
            high = (c == self.chart.top) | (w.imag >= fr.ytop)
            if fr.graded:
                high |= (w.real < fr.xlo) | (w.real > fr.xhi)
            z = np.where(high, self.top_point, z)
        if strict:
            inside = np.array([membership(self.model, complex(v)) == "interior" for v in np.ravel(w)])
            bad = inside & (np.abs(np.ravel(z)) >= 1)
            if bad.any():
                raise ConvergenceError("inverse left the disc for an interior point", float(np.max(np.abs(np.ravel(z))[bad]) - 1))
        return z if z.ndim else complex(z)

    @property
    def top_point(self) -> complex:
        """Disc location of the top prime end (the Denjoy-Wolff point)."""
        if self.elliptic:
            return complex(self.rot)
        return complex(self._from_h(np.array([self.top_pv], dtype=complex))[0])

    def node_prevertices(self) -> np.ndarray:
        pv = np.roll(self.zipper.prevertices, self.start)
        off = 0 if self.elliptic else 1
        return self._from_h(pv[off:].astype(complex))


def _lower_frame(model: NonElliptic, resolution: int, window: float, anchor):
    lower = model.lower
    I = lower.domain
    if I.kind == "bounded":
        rho = I.width
        x_mid = 0.5 * (I.lo + I.hi)
    else:
        rho = 1.0
        x_mid = I.lo + 1.0 if I.kind == "right" else I.hi - 1.0 if I.kind == "left" else 0.0
    if anchor is None:
        b = float(lower.beta(x_mid))
        anchor = complex(x_mid, 0.0 if b + 0.5 * rho <= 0 else b + 0.5 * rho)
    anchor = complex(anchor)
    if membership(model, anchor) != "interior":
        raise ValueError(f"anchor {anchor} is not inside the domain")
    h0 = rho / resolution
    if I.kind == "bounded":
        span = window * rho
        return Frame(I.lo, I.hi, anchor.imag - span, anchor.imag + span, h0, rho, anchor), anchor
    span = 10.0 ** window * rho
    xlo = I.lo if math.isfinite(I.lo) else anchor.real - span
    xhi = I.hi if math.isfinite(I.hi) else anchor.real + span
    return Frame(xlo, xhi, anchor.imag - span, anchor.imag + span, h0, rho, anchor, graded=True), anchor


def _chart_for(model: NonElliptic, frame: Frame, anchor: complex):
    I = model.lower.domain
    if I.kind == "bounded":
        return StripChart(I.lo, I.hi, anchor.imag)
    if I.kind in ("right", "left"):
        return HalfPlaneChart(I.lo if I.kind == "right" else I.hi, anchor)
    xs = np.linspace(anchor.real - 5, anchor.real + 5, 201)
    b = np.asarray(model.lower.beta(xs), dtype=float)
    k = int(np.argmax(np.where(np.isfinite(b), b, -np.inf)))
    if not np.isfinite(b[k]):
        raise SamplingError("no finite boundary point near the anchor to seat the chart")
    return PlaneChart(complex(xs[k], b[k] - 1.0), anchor)


def build_map(model: SemigroupModel, resolution: int = DEFAULT_RESOLUTION, anchor=None,
              window: float = DEFAULT_WINDOW, tol: float = 1e-3) -> RiemannMap:
    """Build the normalized Riemann map of the model's Koenigs domain.

    ``resolution`` is the number of boundary nodes per unit of the model's
    length scale (strip width, or smallest radius for elliptic models).
    """
    if not isinstance(resolution, (int, np.integer)) or resolution < 4:
        raise ValueError("resolution must be an integer >= 4")
    t0 = time.perf_counter()
    check_model(model)
    if isinstance(model, HyperbolicGroup):
        model = as_nonelliptic(model)
    if isinstance(model, NonElliptic):
        frame, anchor = _lower_frame(model, resolution, window, anchor)
        frame.ybot = cusp_floor(model.lower.beta, frame)
        segs = lower_segments(model.lower, frame)
        chart = _chart_for(model, frame, anchor)
        direction = 1j
    elif isinstance(model, (EllipticStarlike, EllipticSpiral)):
        radial = model.radial
        th = np.linspace(0, 2 * np.pi, 721)[:-1]
        r = np.asarray(radial(th), dtype=float)
        finite = r[np.isfinite(r)]
        scale = float(np.max(finite)) if finite.size else 1.0
        cap = scale * (10.0 ** (window / 2) if not np.all(np.isfinite(r)) else 1.0)
        small = float(np.min(finite)) if finite.size else 1.0
        frame = Frame(0.0, 2 * np.pi, 0.0, cap, small / resolution, scale, 0j,
                      graded=not np.all(np.isfinite(r)), radial=True)
        segs = radial_segments(radial, frame)
        chart = ScaleChart(cap * 1.0000001)
        anchor, direction = 0j if anchor is None else complex(anchor), 1.0 + 0j
    else:
        raise TypeError(f"no Riemann map for {type(model).__name__}")
    nodes, ids = join(segs, 1e-14 * frame.scale)
    P = chart.fwd(nodes)
    if chart.top is not None:
        P = np.concatenate([[chart.top], P])
    # The last nodes zipped are the least accurate, so they should sit in the
    # truncated tail next to the top point.  Starting right at the top instead
    # squeezes the bulk of the domain into a sliver and wastes float precision,
    # so start a little way down the first wall.
    if chart.top is None:
        k0 = int(np.argmax(np.abs(P)))
    else:
        far = np.nonzero(np.abs(P[1:-1] - chart.top) >= START_GAP)[0]
        k0 = 1 + int(far[0]) if far.size else 1
    P = np.roll(P, -k0)
    try:
        zp = GeodesicZipper(P)
    except ValueError as exc:
        raise ConvergenceError(f"zipper failed: {exc}") from None
    ya = complex(zp.forward(chart.fwd(anchor)))
    if not ya.imag > 0:
        raise ConvergenceError("anchor did not land in the upper half-plane", abs(ya.imag))
    # arg h'(0) = arg direction
    _, dz = zp.inverse(np.array([ya]), derivative=True)
    _, dc = chart.inv(chart.fwd(np.array([anchor])), derivative=True)
    d0 = (ya - np.conj(ya)) * dz[0] * dc[0]
    rot = d0 / direction
    rot /= abs(rot)
    top_pv = math.inf if chart.top is None else float(np.roll(zp.prevertices, k0)[0])
    rmap = RiemannMap(model, chart, zp, anchor, direction, complex(rot), ya, nodes, ids, segs, frame,
                      int(resolution), top_pv, k0)
    rmap.residual = boundary_residual(rmap)
    rmap.build_seconds = time.perf_counter() - t0
    if not rmap.residual <= tol:
        raise ConvergenceError("boundary does not map onto the circle", rmap.residual)
    return rmap


def boundary_residual(rmap: RiemannMap, count: int = 400) -> float:
    """max | |h^{-1}(w)| - 1 | over true boundary points between nodes."""
    nodes, ids = rmap.nodes, rmap.node_seg
    same = ids[1:] == ids[:-1]
    mids = 0.5 * (nodes[1:] + nodes[:-1])[same]
    kinds = np.array([rmap.segments[i].kind for i in ids[1:][same]])
    # straight pieces contain their midpoints; keep those for an exact boundary test
    pick = mids[np.isin(kinds, ["wall", "jump", "floor"])]
    if pick.size == 0:
        pick = nodes
    if pick.size > count:
        pick = pick[np.linspace(0, pick.size - 1, count).astype(int)]
    z = rmap.invert(pick)
    return float(np.max(np.abs(np.abs(z) - 1)))


def strip_map_oracle(z):
    """Closed-form Riemann map of the strip {0 < Re w < 1}: 1/2 + (i/pi) log((1+z)/(1-z))."""
    z = np.asarray(z, dtype=complex)
    out = 0.5 + (1j / np.pi) * np.log((1 + z) / (1 - z))
    return out if out.ndim else complex(out)


def strip_map_oracle_inverse(w):
    w = np.asarray(w, dtype=complex)
    out = np.tanh(-1j * np.pi * (w - 0.5) / 2)
    return out if out.ndim else complex(out)


__all__ = ["RiemannMap", "build_map", "ConvergenceError", "boundary_residual",
           "strip_map_oracle", "strip_map_oracle_inverse", "Segment"]
