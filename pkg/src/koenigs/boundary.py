"""Boundary structure of a Koenigs model read off the graph of beta (or rho).

Everything here is exact: components, contact arcs and fixed points come from
symbolic one-sided limits of the piecewise boundary function.

Descriptors name prime ends of Q in model coordinates:

* ``top``     the end at Im w = +inf (the Denjoy-Wolff point), or the origin
              for elliptic models;
* ``bottom``  the end at Im w = -inf above the strip component [c, c2];
* ``point``   the boundary point c + i*y reached from the ``side`` of Q.

Radial models use log-polar heights: abscissa is the angle and the height of
a radius r is -ln r, so the flow e^{-t} raises heights by t.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .model import (TWO_PI, EllipticGroup, EllipticSpiral, EllipticStarlike, HyperbolicGroup,
                    LowerBoundary, NonElliptic, RadialBoundary, SemigroupModel, check_model)
from .piecewise import INF, PiecewiseFn


class BoundaryPointClass(str, Enum):
    DENJOY_WOLFF = "denjoy-wolff"
    REGULAR = "regular-bfp"
    SR1 = "super-repelling-1"
    SR2 = "super-repelling-2"
    SR3 = "super-repelling-3"
    PLAIN = "plain"
    CONTACT_NOT_FIXED = "contact-not-fixed"
    FIXED_REGULAR = "fixed-regular"
    FIXED_SUPER_REPELLING = "fixed-super-repelling"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class StripComponent:
    """A maximal closed interval [a, b] where beta = -inf (angles for radial models)."""
    a: float
    b: float
    chart: str = "vertical"

    @property
    def kind(self) -> str:
        if self.chart == "radial":
            return "ray" if self.a == self.b else "sector"
        if self.a == self.b:
            return "line"
        if math.isinf(self.a) and math.isinf(self.b):
            return "plane"
        if math.isinf(self.a) or math.isinf(self.b):
            return "half-plane"
        return "strip"

    @property
    def degenerate(self) -> bool:
        return self.a == self.b


@dataclass(frozen=True)
class ContactArc:
    """Vertical boundary segment {c + iy : d < y < R} seen from ``side`` of Q."""
    c: float
    d: float
    R: float
    side: str
    exceptional: bool
    initial_class: BoundaryPointClass
    chart: str = "vertical"

    def contains(self, y: float) -> bool:
        return self.d < y < self.R


@dataclass(frozen=True)
class BoundaryPoint:
    kind: str                      # 'top' | 'bottom' | 'point'
    c: float | None = None
    y: float | None = None
    c2: float | None = None
    side: str | None = None

    @staticmethod
    def top() -> "BoundaryPoint":
        return BoundaryPoint("top")

    @staticmethod
    def bottom(a: float, b: float | None = None, side: str | None = None) -> "BoundaryPoint":
        return BoundaryPoint("bottom", c=a, c2=a if b is None else b, side=side)

    @staticmethod
    def at(c: float, y: float, side: str | None = None) -> "BoundaryPoint":
        return BoundaryPoint("point", c=c, y=y, side=side)

    def __str__(self):
        if self.kind == "top":
            return "top"
        if self.kind == "bottom":
            return f"bottom[{self.c:g},{self.c2:g}]"
        return f"{self.c:g}{self.y:+g}i" + (f"({self.side})" if self.side else "")


@dataclass(frozen=True)
class FixedPoint:
    where: BoundaryPoint
    cls: BoundaryPointClass
    exceptional: bool = False        # lies in the closure of the exceptional arcs
    note: str = ""


@dataclass
class BoundaryReport:
    model_type: str
    components: list = field(default_factory=list)
    arcs: list = field(default_factory=list)
    fixed_points: list = field(default_factory=list)
    undetermined: list = field(default_factory=list)
    flags: list = field(default_factory=list)


# --------------------------------------------------------------- components

def _runs(flags: list[bool]) -> list[tuple[int, int]]:
    out, start = [], None
    for k, f in enumerate(flags + [False]):
        if f and start is None:
            start = k
        elif not f and start is not None:
            out.append((start, k - 1))
            start = None
    return out


def _neg_inf_sequence(fn: PiecewiseFn, target: float):
    """Alternating piece/breakpoint flags: True where the function equals ``target``."""
    seq, pos = [], []
    for i, p in enumerate(fn.pieces):
        seq.append(p.infinite == (1 if target > 0 else -1))
        pos.append(("piece", i))
        if i < len(fn.breaks):
            seq.append(fn.break_value(i) == target)
            pos.append(("break", i))
    return seq, pos


def strip_components(lower: LowerBoundary) -> list[StripComponent]:
    """Maximal intervals of {x : beta(x) = -inf}, as closed intervals [a, b]."""
    fn = lower.beta
    seq, pos = _neg_inf_sequence(fn, -INF)
    edges = fn.edges
    out = []
    for s, e in _runs(seq):
        ks, ke = pos[s], pos[e]
        a = fn.breaks[ks[1]] if ks[0] == "break" else edges[ks[1]]
        b = fn.breaks[ke[1]] if ke[0] == "break" else edges[ke[1] + 1]
        out.append(StripComponent(a, b))
    return out


def radial_components(radial: RadialBoundary) -> list[StripComponent]:
    """Maximal closed angular intervals where rho = +inf; may wrap past 2pi."""
    fn = radial.rho
    seq, pos = _neg_inf_sequence(fn, INF)
    seam_inf = min(radial.seam_limits()) == INF
    edges = fn.edges
    runs = _runs(seq)
    comps = []
    for s, e in runs:
        ks, ke = pos[s], pos[e]
        a = fn.breaks[ks[1]] if ks[0] == "break" else edges[ks[1]]
        b = fn.breaks[ke[1]] if ke[0] == "break" else edges[ke[1] + 1]
        comps.append([a, b])
    if seam_inf:
        if len(comps) >= 2 and comps[0][0] == 0.0 and comps[-1][1] == TWO_PI:
            first = comps.pop(0)
            comps[-1][1] = first[1] + TWO_PI
        elif not any(c[0] == 0.0 or c[1] == TWO_PI for c in comps):
            comps.append([0.0, 0.0])
    return [StripComponent(a, b, "radial") for a, b in comps]


# ------------------------------------------------------------- contact arcs

def _initial_class(d: float, c: float, side: str, comps) -> BoundaryPointClass:
    if d > -INF:
        return BoundaryPointClass.CONTACT_NOT_FIXED
    for comp in comps:
        if comp.degenerate:
            continue
        if (side == "right" and comp.a == c) or (side == "left" and comp.b == c):
            return BoundaryPointClass.FIXED_REGULAR
    return BoundaryPointClass.FIXED_SUPER_REPELLING


def detect_contact_arcs(model) -> list[ContactArc]:
    """All maximal contact arcs of the model, ordered by abscissa."""
    if isinstance(model, LowerBoundary):
        return _lower_arcs(model)
    if isinstance(model, RadialBoundary):
        return _radial_arcs(model)
    if isinstance(model, NonElliptic):
        return _lower_arcs(model.lower)
    if isinstance(model, (EllipticStarlike, EllipticSpiral)):
        return _radial_arcs(model.radial)
    if isinstance(model, HyperbolicGroup):
        cls = BoundaryPointClass.FIXED_REGULAR
        return [ContactArc(0.0, -INF, INF, "right", True, cls),
                ContactArc(model.width, -INF, INF, "left", True, cls)]
    return []


def _lower_arcs(lower: LowerBoundary) -> list[ContactArc]:
    fn, I = lower.beta, lower.domain
    comps = strip_components(lower)
    arcs = []
    dlo, dhi = fn.end_limits()
    if math.isfinite(I.lo) and dlo < INF:
        arcs.append(ContactArc(I.lo, dlo, INF, "right", True, _initial_class(dlo, I.lo, "right", comps)))
    for i, c in enumerate(fn.breaks):
        l, r = fn.break_limits(i)
        if l == r:
            continue
        d, R = min(l, r), max(l, r)
        side = "left" if l < r else "right"
        arcs.append(ContactArc(c, d, R, side, False, _initial_class(d, c, side, comps)))
    if math.isfinite(I.hi) and dhi < INF:
        arcs.append(ContactArc(I.hi, dhi, INF, "left", True, _initial_class(dhi, I.hi, "left", comps)))
    return arcs


def _neg_log(r: float) -> float:
    return -INF if r == INF else 0.0 - math.log(r)


def _radial_arcs(radial: RadialBoundary) -> list[ContactArc]:
    fn = radial.rho
    comps = radial_components(radial)
    # heights: -ln r; Q lies on the side with the larger radius
    cand = [(0.0, *radial.seam_limits())]
    cand += [(c, *fn.break_limits(i)) for i, c in enumerate(fn.breaks)]
    arcs = []
    for c, l, r in cand:
        if l == r:
            continue
        d, R = _neg_log(max(l, r)), _neg_log(min(l, r))
        side = "left" if l > r else "right"
        cls = _radial_initial_class(d, c, side, comps)
        arcs.append(ContactArc(c, d, R, side, False, cls, "radial"))
    return arcs


def _radial_initial_class(d, c, side, comps) -> BoundaryPointClass:
    if d > -INF:
        return BoundaryPointClass.CONTACT_NOT_FIXED
    for comp in comps:
        if comp.degenerate:
            continue
        a, b = comp.a % TWO_PI, comp.b % TWO_PI
        if (side == "right" and a == c) or (side == "left" and b == c):
            return BoundaryPointClass.FIXED_REGULAR
    return BoundaryPointClass.FIXED_SUPER_REPELLING


def life_time(arc: ContactArc, y: float) -> float:
    """Time until the flow carries c + iy off the arc: R - y (inf on exceptional arcs)."""
    if not arc.contains(y):
        raise ValueError(f"height {y} is not on the arc ({arc.d}, {arc.R})")
    return INF if math.isinf(arc.R) else arc.R - y


# ------------------------------------------------------------ fixed points

def classify_fixed_points(model: SemigroupModel) -> list[FixedPoint]:
    check_model(model)
    if isinstance(model, EllipticGroup):
        return []
    if isinstance(model, HyperbolicGroup):
        return [FixedPoint(BoundaryPoint.top(), BoundaryPointClass.DENJOY_WOLFF, True),
                FixedPoint(BoundaryPoint.bottom(0.0, model.width), BoundaryPointClass.REGULAR, True)]
    if isinstance(model, NonElliptic):
        comps = strip_components(model.lower)
        arcs = _lower_arcs(model.lower)
        I = model.lower.domain
        on_edge = (I.lo, I.hi)
    else:
        comps = radial_components(model.radial)
        arcs = _radial_arcs(model.radial)
        on_edge = ()
    out = [FixedPoint(BoundaryPoint.top(), BoundaryPointClass.DENJOY_WOLFF,
                      isinstance(model, NonElliptic))]
    for comp in comps:
        touches = comp.a in on_edge or comp.b in on_edge
        where = BoundaryPoint.bottom(comp.a, comp.b)
        if comp.degenerate:
            out.append(FixedPoint(where, BoundaryPointClass.SR1, touches))
        elif comp.kind in ("strip", "sector"):
            out.append(FixedPoint(where, BoundaryPointClass.REGULAR, touches))
        else:
            # the bottom of a half-plane is reached through infinity: it is the Denjoy-Wolff end
            out.append(FixedPoint(where, BoundaryPointClass.PLAIN, True,
                                  "unbounded component: not a regular boundary fixed point"))
    for arc in arcs:
        if arc.initial_class is not BoundaryPointClass.FIXED_SUPER_REPELLING:
            continue
        where = BoundaryPoint.bottom(arc.c, arc.c, arc.side)
        cls = BoundaryPointClass.SR3 if arc.exceptional else BoundaryPointClass.SR2
        out.append(FixedPoint(where, cls, arc.exceptional))
    return out


def exceptional_closure_membership(model: SemigroupModel, where: BoundaryPoint) -> bool:
    """Is the prime end ``where`` in the closure of the union of exceptional arcs?"""
    if not isinstance(model, (NonElliptic, HyperbolicGroup)):
        return False
    if where.kind == "top":
        return True
    ex = [a for a in detect_contact_arcs(model) if a.exceptional]
    if where.kind == "bottom":
        ends = {where.c, where.c2}
        return any(a.d == -INF and a.c in ends for a in ex)
    for a in ex:
        if where.c == a.c and where.y >= a.d:
            return True
    return False


def analyse(model: SemigroupModel) -> BoundaryReport:
    """Full boundary report: components, arcs and fixed points."""
    from .model import classify_type
    t = classify_type(model)
    rep = BoundaryReport(t.value)
    if isinstance(model, NonElliptic):
        rep.components = strip_components(model.lower)
    elif isinstance(model, (EllipticStarlike, EllipticSpiral)):
        rep.components = radial_components(model.radial)
    elif isinstance(model, HyperbolicGroup):
        rep.components = [StripComponent(0.0, model.width)]
    rep.arcs = detect_contact_arcs(model)
    rep.fixed_points = classify_fixed_points(model)
    rep.flags = [f.note for f in rep.fixed_points if f.note]
    return rep
