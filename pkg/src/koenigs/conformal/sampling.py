"""Polygonal approximations of the boundary of a Koenigs domain, in model coordinates.

The truncated domain keeps y between ``ybot`` and ``ytop`` (and x inside the
frame for unbounded I).  Points of Q above ``ytop`` are represented by the
single top prime end; -inf channels are closed by horizontal cuts at ``ybot``.
Nodes are spaced ``h0`` apart (growing linearly with distance on graded
frames) and refined geometrically toward every corner.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ..model import LowerBoundary, RadialBoundary, TWO_PI

GRADE_LEVELS = 12


class SamplingError(RuntimeError):
    pass


@dataclass
class Frame:
    xlo: float
    xhi: float
    ybot: float
    ytop: float
    h0: float
    scale: float
    center: complex = 0j
    graded: bool = False
    radial: bool = False

    def spacing(self, w: complex) -> float:
        if self.graded:
            return self.h0 * max(1.0, abs(w - self.center) / self.scale)
        # strips: the chart squeezes |y| >> width exponentially, so coarsen there
        dy = abs(complex(w).imag - self.center.imag) / self.scale
        return self.h0 * 2.0 ** max(0.0, dy - 2.0)

    def is_corner(self, w: complex) -> bool:
        w = complex(w)
        if self.radial:
            return abs(w) < self.ytop * (1 - 1e-12)
        lo, hi = self.ybot, self.ytop
        pad = 1e-12 * max(1.0, abs(lo), abs(hi))
        return lo + pad < w.imag < hi - pad and self.xlo <= w.real <= self.xhi

    def clip(self, y):
        return np.clip(y, self.ybot, self.ytop)


@dataclass
class Segment:
    kind: str              # wall | jump | graph | floor | arc
    nodes: np.ndarray
    c: float | None = None           # abscissa (angle) of vertical (radial) segments
    meta: dict = field(default_factory=dict)


def _arclength_nodes(point, L: float, frame: Frame) -> np.ndarray:
    """Arclength parameters on [0, L] with frame spacing and grading toward true corners.

    Ends lying on a truncation level are not graded: they are artificial and
    crowding them only costs precision near the chart's extreme points.
    """
    if L <= 0:
        return np.array([0.0])
    s = [0.0]
    while True:
        step = frame.spacing(point(s[-1]))
        if s[-1] + step >= L - 0.5 * step:
            break
        s.append(s[-1] + step)
    s.append(L)
    s = np.array(s)
    first, last = s[1] - s[0], s[-1] - s[-2]
    g = 0.5 ** np.arange(1, GRADE_LEVELS + 1)
    extra = []
    if frame.is_corner(point(0.0)):
        extra.append(first * g)
    if frame.is_corner(point(L)):
        extra.append(L - last * g)
    return np.unique(np.concatenate([s, *extra]))


def _straight(a: complex, b: complex, frame: Frame) -> np.ndarray:
    L = abs(b - a)
    if L == 0:
        return np.array([a])
    s = _arclength_nodes(lambda t: a + (b - a) * t / L, L, frame)
    out = a + (b - a) * (s / L)
    out[0], out[-1] = a, b
    return out


def _refine(xs: np.ndarray, f, frame: Frame, to_point, rounds: int = 60) -> np.ndarray:
    """Bisect parameter cells until every chord is short against the local node spacing.

    Without this a steep branch (say -1/x near 0) spends one chord on a long
    stretch of curve, and the arclength parametrization below goes badly wrong.
    """
    for _ in range(rounds):
        pts = to_point(xs, f(xs))
        seg = np.abs(np.diff(pts))
        need = 0.5 * np.array([frame.spacing(p) for p in pts[:-1]])
        bad = seg > need
        if not bad.any():
            break
        xs = np.sort(np.concatenate([xs, 0.5 * (xs[:-1][bad] + xs[1:][bad])]))
    return xs


def _curve(xs: np.ndarray, f, frame: Frame, to_point) -> np.ndarray:
    """Nodes on the curve x -> to_point(x, f(x)) for x in [xs[0], xs[-1]], by arclength."""
    xs = _refine(xs, f, frame, to_point)
    pts = to_point(xs, f(xs))
    seg = np.abs(np.diff(pts))
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    L = cum[-1]
    s = _arclength_nodes(lambda t: to_point(np.interp(t, cum, xs), f(np.interp(t, cum, xs))), L, frame)
    x = np.interp(s, cum, xs)
    x[0], x[-1] = xs[0], xs[-1]
    return to_point(x, f(x))


def _fine(a: float, b: float, n: int = 4001) -> np.ndarray:
    t = 0.5 * (1 - np.cos(np.linspace(0, np.pi, n)))
    return a + (b - a) * t


def _crossings(f, a: float, b: float, level: float) -> list[float]:
    xs = _fine(a, b)
    g = f(xs) - level
    h = lambda x: float(f(np.array([x]))[0]) - level  # noqa: E731
    out = []
    for k in np.nonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0)[0]:
        lo, hi = xs[k], xs[k + 1]
        # an infinite end (a pole of the branch) is pulled inward until it is finite
        for _ in range(40):
            if np.isfinite(h(lo)):
                break
            lo = lo + (hi - lo) * 1e-3
        for _ in range(40):
            if np.isfinite(h(hi)):
                break
            hi = hi - (hi - lo) * 1e-3
        if np.isfinite(h(lo)) and np.isfinite(h(hi)) and h(lo) * h(hi) < 0:
            out.append(brentq(h, lo, hi, xtol=1e-15))
    return out


def cusp_floor(beta, frame: Frame, fit: float = 2.0) -> float:
    """Raise the floor so every cusp channel is still ``fit`` node spacings wide there.

    Where beta -> -inf next to finite values, Q has a channel narrowing with
    depth while the node spacing does not shrink; once the channel is thinner
    than the spacing the polygon folds.  Such a channel carries almost no
    harmonic measure, so cutting it early is harmless.
    """
    spans = beta.spans()
    cusps = [(beta.lo, spans[0][2], spans[0][1], beta.end_limits()[0])]
    cusps.append((beta.hi, spans[-1][2], spans[-1][0], beta.end_limits()[1]))
    for i, c in enumerate(beta.breaks):
        l, r = beta.break_limits(i)
        cusps += [(c, spans[i][2], spans[i][0], l), (c, spans[i + 1][2], spans[i + 1][1], r)]
    ybot = frame.ybot
    for c, p, far, lim in cusps:
        if lim != -math.inf or p.infinite or not math.isfinite(c):
            continue
        if not math.isfinite(far):
            far = c + math.copysign(frame.xhi - frame.xlo, far - c)
        far = min(max(far, frame.xlo), frame.xhi)
        lo_x, hi_x = min(c, far), max(c, far)
        prev = frame.center.imag
        for k in range(200):
            y = frame.center.imag - frame.scale * 2.0 ** (k / 4)
            if y <= ybot:
                break
            xs = _crossings(p, lo_x, hi_x, y)
            width = min(abs(x - c) for x in xs) if xs else hi_x - lo_x
            if width < fit * frame.spacing(complex(c, y)):
                ybot = max(ybot, prev)
                break
            prev = y
    return ybot


def _piece_segments(fn, a: float, b: float, frame: Frame, to_point):
    """Split one branch on [a, b] at clip transitions; returns (kind, nodes) items."""
    if math.isinf(a) or math.isinf(b):
        raise SamplingError("unbounded branch must be cut to the frame first")
    cuts = sorted(set(_crossings(fn, a, b, frame.ybot) + _crossings(fn, a, b, frame.ytop)))
    edges = [a] + [c for c in cuts if a < c < b] + [b]
    out = []
    for x0, x1 in zip(edges, edges[1:]):
        xm = 0.5 * (x0 + x1)
        ym = float(fn(np.array([xm]))[0])
        if ym >= frame.ytop:
            out.append(("ceiling", None))
        elif ym <= frame.ybot:
            out.append(("floor", _curve(_fine(x0, x1, 64), lambda x: np.full(x.shape, frame.ybot), frame, to_point)))
        else:
            xs = _fine(x0, x1)
            out.append(("graph", _curve(xs, lambda x: frame.clip(fn(x)), frame, to_point)))
    return out


def lower_segments(lower: LowerBoundary, frame: Frame) -> list[Segment]:
    """Boundary of the truncated domain, counterclockwise, starting below the top point."""
    beta, I = lower.beta, lower.domain
    to_point = lambda x, y: np.asarray(x) + 1j * np.asarray(y)  # noqa: E731
    clip = lambda y: float(np.clip(y, frame.ybot, frame.ytop))  # noqa: E731
    segs: list[Segment] = []
    dlo, dhi = beta.end_limits()
    if math.isfinite(I.lo) and dlo < frame.ytop:
        segs.append(Segment("wall", _straight(complex(I.lo, frame.ytop), complex(I.lo, clip(dlo)), frame), I.lo))
    spans = beta.spans()
    items = []
    for i, (a, b, p) in enumerate(spans):
        a_eff = max(a, frame.xlo)
        b_eff = min(b, frame.xhi)
        if a_eff >= b_eff:
            continue
        items += [(k, n, None) for k, n in _piece_segments(p, a_eff, b_eff, frame, to_point)]
        if i < len(beta.breaks) and frame.xlo < b < frame.xhi:
            l, r = beta.break_limits(i)
            yl, yr = clip(l), clip(r)
            if yl != yr:
                items.append(("jump", _straight(complex(b, yl), complex(b, yr), frame), b))
    kinds = [k for k, _, _ in items]
    keep = [k != "ceiling" for k in kinds]
    if any(keep):
        first, last = keep.index(True), len(keep) - 1 - keep[::-1].index(True)
        if not all(keep[first:last + 1]):
            raise SamplingError("the boundary rises above the top truncation level inside I; "
                                "widen the window")
        items = items[first:last + 1]
    for k, nodes, c in items:
        segs.append(Segment(k, nodes, c))
    if math.isfinite(I.hi) and dhi < frame.ytop:
        segs.append(Segment("wall", _straight(complex(I.hi, clip(dhi)), complex(I.hi, frame.ytop), frame), I.hi))
    return segs


def radial_segments(radial: RadialBoundary, frame: Frame) -> list[Segment]:
    """Polar boundary r = rho(theta), counterclockwise from angle 0; frame.ytop caps r."""
    rho = radial.rho
    cap = lambda r: float(min(r, frame.ytop))  # noqa: E731
    to_point = lambda th, r: np.asarray(r) * np.exp(1j * np.asarray(th))  # noqa: E731
    segs: list[Segment] = []
    for i, (a, b, p) in enumerate(rho.spans()):
        xs = _fine(a, b)
        segs.append(Segment("graph", _curve(xs, lambda t, p=p: np.minimum(p(t), frame.ytop), frame, to_point)))
        if i < len(rho.breaks):
            l, r = rho.break_limits(i)
            if cap(l) != cap(r):
                e = np.exp(1j * b)
                segs.append(Segment("jump", _straight(cap(l) * e, cap(r) * e, frame), b))
    l, r = radial.seam_limits()
    if cap(l) != cap(r):
        segs.append(Segment("jump", _straight(complex(cap(l)), complex(cap(r)), frame), 0.0))
    return segs


def join(segs: list[Segment], tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Concatenate segment nodes dropping repeated joints; returns nodes and segment ids.

    ``tol`` is relative to max(1, |w|): joints far out carry proportionally larger rounding.
    """
    pts, ids = [], []
    for k, s in enumerate(segs):
        for w in s.nodes:
            if pts and abs(w - pts[-1]) <= tol * max(1.0, abs(w)):
                continue
            pts.append(w)
            ids.append(k)
    if len(pts) > 1 and abs(pts[0] - pts[-1]) <= tol * max(1.0, abs(pts[0])):
        pts.pop()
        ids.pop()
    return np.array(pts, dtype=complex), np.array(ids)
