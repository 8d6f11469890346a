"""Topological conjugacies between Koenigs models.

A shear tau(x + iy) = u(x) + i(y + v(x)) commutes with vertical translation, so
it conjugates the flows of Q and tau(Q).  For starlike elliptic models the
analogue is tau0(z) = |z| u(z/|z|) v(z/|z|), which commutes with z -> e^{-t}z.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boundary import (BoundaryPoint, BoundaryPointClass, BoundaryReport, ContactArc, FixedPoint,
                       StripComponent, classify_fixed_points)
from .elliptic import elliptic_normalize, theta_lambda  # noqa: F401  (re-exported)
from .model import (TWO_PI, EllipticSpiral, EllipticStarlike, HyperbolicGroup, Interval,
                    LowerBoundary, NonElliptic, RadialBoundary, SemigroupModel, _midpoint,
                    classify_type)
from .piecewise import (INF, Affine, Expr, FamilyError, Homeo, Logistic, Piece, PiecewiseFn, Recip,
                        piece)


# ------------------------------------------------------------------ shears

@dataclass(frozen=True)
class ShearMap:
    """tau(x + iy) = u(x) + i(y + v(x)) on I1 x R.

    ``u`` must be a continuous strictly monotone bijection of I1 onto its image,
    increasing unless ``reflect`` is set; ``v`` must be continuous and finite.
    """

    u: PiecewiseFn
    v: PiecewiseFn
    reflect: bool = False

    def __post_init__(self):
        u, v = self.u, self.v
        if (u.lo, u.hi) != (v.lo, v.hi):
            raise ValueError("u and v must share a domain")
        want = -1 if self.reflect else 1
        for a, b, p in u.spans():
            h = p.as_homeo()
            if h.sign != want:
                raise ValueError(f"u is not {'decreasing' if self.reflect else 'increasing'} on ({a:g}, {b:g})")
            if p.singular_points(a, b):
                raise ValueError(f"u is singular inside ({a:g}, {b:g})")
        for fn, name in ((u, "u"), (v, "v")):
            for i, c in enumerate(fn.breaks):
                l, r = fn.break_limits(i)
                if not math.isclose(l, r, rel_tol=1e-12, abs_tol=1e-12):
                    raise ValueError(f"{name} jumps at {c:g}: {l} vs {r}")
        for a, b, p in v.spans():
            if p.infinite or p.singular_points(a, b):
                raise ValueError(f"v is not finite on ({a:g}, {b:g})")

    @property
    def source(self) -> Interval:
        return Interval(self.u.lo, self.u.hi)

    @property
    def target(self) -> Interval:
        a, b = self.u.end_limits()
        return Interval(min(a, b), max(a, b))

    def u_at(self, c: float) -> float:
        """u at a point of the closed interval (endpoint values by limits)."""
        if c == self.u.lo:
            return self.u.end_limits()[0]
        if c == self.u.hi:
            return self.u.end_limits()[1]
        return float(self.u(c))

    def v_limit(self, c: float, side: int) -> float:
        return self.v.right_limit(c) if side > 0 else self.v.left_limit(c)


def shear(u, v=0.0, lo: float | None = None, hi: float | None = None, reflect=False) -> ShearMap:
    """Build a shear from PiecewiseFns or single-branch text / numbers on (lo, hi)."""
    def fn(x):
        if isinstance(x, PiecewiseFn):
            return x.with_policy("continuous")
        return PiecewiseFn(lo, hi, (), (piece(x),), "continuous")
    return ShearMap(fn(u), fn(v), reflect)


def identity_shear(lo: float, hi: float) -> ShearMap:
    return shear(Piece(Expr(lin=1.0)), 0.0, lo, hi)


def apply_shear(tau: ShearMap, w):
    w = np.asarray(w, dtype=complex)
    x = w.real
    if not np.all(tau.source.contains(x)):
        raise ValueError("point outside the source strip")
    out = np.asarray(tau.u(x), dtype=float) + 1j * (w.imag + np.asarray(tau.v(x), dtype=float))
    return out if out.ndim else complex(out)


def invert_shear(tau: ShearMap, w):
    """Preimage under tau of points of the target strip."""
    w = np.asarray(w, dtype=complex)
    y = w.real
    x = np.full(y.shape, np.nan)
    for a, b, p in tau.u.spans():
        h = p.as_homeo()
        ua, ub = tau.u_at(a), tau.u_at(b)
        lo, hi = min(ua, ub), max(ua, ub)
        m = (y >= lo) & (y <= hi) & np.isnan(x)
        if m.any():
            x[m] = h.inverse()(y[m])
    out = x + 1j * (w.imag - np.asarray(tau.v(x), dtype=float))
    return out if out.ndim else complex(out)


def compose_shears(outer: ShearMap, inner: ShearMap) -> ShearMap:
    """The shear outer o inner, defined on the source of ``inner``."""
    if outer.source != inner.target:
        raise ValueError("shears do not compose: target and source differ")
    cuts = set(inner.u.breaks) | set(inner.v.breaks)
    for c in outer.u.breaks + outer.v.breaks:
        cuts.add(float(invert_shear(inner, complex(c, 0.0)).real))
    edges = [inner.u.lo] + sorted(cuts) + [inner.u.hi]
    upieces, vpieces = [], []
    for a, b in zip(edges, edges[1:]):
        m = _midpoint(a, b)
        h1 = inner.u.pieces[inner.u.piece_index(m)].as_homeo()
        um = float(inner.u(m))
        h2 = outer.u.pieces[outer.u.piece_index(um)].as_homeo()
        upieces.append(Piece(Expr(lin=1.0), h1.then(h2)))
        v2 = outer.v.pieces[outer.v.piece_index(um)].then_pre(h1)
        vpieces.append(inner.v.pieces[inner.v.piece_index(m)].shifted(v2))
    brk = tuple(edges[1:-1])
    lo, hi = edges[0], edges[-1]
    return ShearMap(PiecewiseFn(lo, hi, brk, tuple(upieces), "continuous"),
                    PiecewiseFn(lo, hi, brk, tuple(vpieces), "continuous"),
                    inner.reflect != outer.reflect)


def pushforward_boundary(lower: LowerBoundary, tau: ShearMap) -> LowerBoundary:
    """The lower boundary of tau(Q): beta~(u(x)) = beta(x) + v(x), limits kept exact."""
    beta = lower.beta
    if (beta.lo, beta.hi) != (tau.u.lo, tau.u.hi):
        raise ValueError("shear is not defined on the model's interval")
    edges = sorted({beta.lo, beta.hi, *beta.breaks, *tau.u.breaks, *tau.v.breaks})
    pieces, sums, lims = [], [], []
    for a, b in zip(edges, edges[1:]):
        m = _midpoint(a, b)
        bp = beta.pieces[beta.piece_index(m)]
        vp = tau.v.pieces[tau.v.piece_index(m)]
        up = tau.u.pieces[tau.u.piece_index(m)]
        sums.append(bp.shifted(vp))
        pieces.append(sums[-1].then_pre(up.as_homeo().inverse()))
    for j, c in enumerate(edges):
        left = right = math.nan
        if c > beta.lo:
            left = beta.left_limit(c) + tau.v_limit(c, -1)
            if math.isnan(left):          # -inf + inf: the summed branch knows the answer
                left = sums[j - 1].limit(c, -1)
        if c < beta.hi:
            right = beta.right_limit(c) + tau.v_limit(c, 1)
            if math.isnan(right):
                right = sums[j].limit(c, 1)
        lims.append((left, right))
    ys = [tau.u_at(c) for c in edges]
    if tau.reflect:
        ys, pieces = ys[::-1], pieces[::-1]
        lims = [(r, l) for l, r in lims[::-1]]
    fn = PiecewiseFn(ys[0], ys[-1], tuple(ys[1:-1]), tuple(pieces), "max", tuple(lims))
    return LowerBoundary(Interval(ys[0], ys[-1]), fn)


def pushforward_model(model: SemigroupModel, tau) -> SemigroupModel:
    if isinstance(tau, EllipticShear):
        if not isinstance(model, (EllipticStarlike, EllipticSpiral)):
            raise TypeError("elliptic shears act on starlike models")
        return EllipticStarlike(pushforward_radial(model.radial, tau))
    if isinstance(model, HyperbolicGroup):
        model = as_nonelliptic(model)
    if not isinstance(model, NonElliptic):
        raise TypeError("shears act on non-elliptic models")
    return NonElliptic(pushforward_boundary(model.lower, tau))


def as_nonelliptic(model: SemigroupModel) -> NonElliptic:
    if isinstance(model, HyperbolicGroup):
        return NonElliptic(LowerBoundary.of(PiecewiseFn.constant(0.0, model.width, -INF)))
    return model


def normalize_to_strip(model: SemigroupModel) -> tuple[ShearMap, NonElliptic]:
    """Shear onto a model over (0, 1) (bounded I: affine; half-lines: x/(1+x); R: logistic)."""
    model = as_nonelliptic(model)
    if not isinstance(model, NonElliptic):
        raise TypeError("only non-elliptic models normalize to a strip")
    I = model.lower.domain
    kind = I.kind
    if kind == "bounded":
        u = Piece(Expr(const=-I.lo / I.width, lin=1.0 / I.width))
    elif kind == "line":
        u = Piece(Expr(lin=1.0), Homeo((Logistic(),)))
    elif kind == "right":
        u = Piece(Expr(const=1.0, recip=((I.lo - 1.0, -1.0),)))
    else:
        u = Piece(Expr(recip=((I.hi + 1.0, -1.0),)))
    tau = shear(u, 0.0, I.lo, I.hi)
    return tau, NonElliptic(pushforward_boundary(model.lower, tau))


# --------------------------------------------------------- elliptic shears

@dataclass(frozen=True)
class EllipticShear:
    """tau0(z) = |z| e^{i U(arg z)} v(arg z) with U a monotone lift of a circle map."""

    U: PiecewiseFn
    v: PiecewiseFn

    def __post_init__(self):
        if (self.U.lo, self.U.hi) != (0.0, TWO_PI) or (self.v.lo, self.v.hi) != (0.0, TWO_PI):
            raise ValueError("elliptic shears are defined on [0, 2pi)")
        a, b = self.U.end_limits()
        if not math.isclose(abs(b - a), TWO_PI, rel_tol=1e-12):
            raise ValueError("U must lift a degree +-1 circle homeomorphism")
        for p in self.U.pieces:
            p.as_homeo()
        va, vb = self.v.end_limits()
        if not math.isclose(va, vb, rel_tol=1e-12):
            raise ValueError("v must be continuous on the circle")
        for a0, b0, p in self.v.spans():
            if p.infinite or p.singular_points(a0, b0):
                raise ValueError("v must be finite")
            if np.min(p(np.linspace(a0, b0, 203)[1:-1])) <= 0:
                raise ValueError("v must be positive")

    @property
    def degree(self) -> int:
        a, b = self.U.end_limits()
        return 1 if b > a else -1

    def U_at(self, th):
        th = np.mod(np.asarray(th, dtype=float), TWO_PI)
        start = self.U.end_limits()[0]
        out = np.where(th == 0, start, np.asarray(self.U(np.where(th == 0, 1.0, th)), dtype=float))
        return out

    def v_at(self, th):
        th = np.mod(np.asarray(th, dtype=float), TWO_PI)
        start = self.v.end_limits()[0]
        return np.where(th == 0, start, np.asarray(self.v(np.where(th == 0, 1.0, th)), dtype=float))


def rotation_shear(alpha: float, scale: float = 1.0) -> EllipticShear:
    return EllipticShear(PiecewiseFn(0.0, TWO_PI, (), (Piece(Expr(alpha, 1.0)),), "continuous"),
                         PiecewiseFn.constant(0.0, TWO_PI, scale, "continuous"))


def apply_tau0(tau: EllipticShear, z):
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    th = np.angle(z)
    out = r * np.exp(1j * tau.U_at(th)) * tau.v_at(th)
    out = np.where(r == 0, 0.0, out)
    return out if out.ndim else complex(out)


def pushforward_radial(radial: RadialBoundary, tau: EllipticShear) -> RadialBoundary:
    """rho~(U(theta)) = rho(theta) v(theta), re-cut on [0, 2pi)."""
    rho = radial.rho
    edges = sorted({0.0, TWO_PI, *rho.breaks, *tau.U.breaks, *tau.v.breaks})
    items = []   # (image start, image end, piece, left limit, right limit) in lifted angles
    for a, b in zip(edges, edges[1:]):
        m = 0.5 * (a + b)
        rp = rho.pieces[rho.piece_index(m)]
        vp = tau.v.pieces[tau.v.piece_index(m)]
        if rp.infinite:
            prod = rp
        elif vp.expr.is_constant:
            prod = Piece(rp.expr.scale(vp.expr.const), rp.pre)
        elif rp.expr.is_constant:
            prod = Piece(vp.expr.scale(rp.expr.const), vp.pre)
        else:
            raise FamilyError("product of two non-constant radial branches")
        h = tau.U.pieces[tau.U.piece_index(m)].as_homeo()
        ua, ub = float(h(a)) if a > 0 else tau.U.end_limits()[0], \
            float(h(b)) if b < TWO_PI else tau.U.end_limits()[1]
        la = rp.limit(a, 1) * vp.limit(a, 1)
        lb = rp.limit(b, -1) * vp.limit(b, -1)
        pc = prod.then_pre(h.inverse())
        if ua < ub:
            items.append([ua, ub, pc, la, lb])
        else:
            items.append([ub, ua, pc, lb, la])
    items.sort(key=lambda it: it[0])
    shift = math.floor(items[0][0] / TWO_PI) * TWO_PI
    cut = []
    for s, e, pc, ls, le in items:
        s, e = s - shift, e - shift
        pc = pc.then_pre(Homeo((Affine(1.0, shift),))) if shift else pc
        if s < TWO_PI < e:
            cut.append([s, TWO_PI, pc, ls, math.nan])
            cut.append([0.0, e - TWO_PI, pc.then_pre(Homeo((Affine(1.0, TWO_PI),))), math.nan, le])
        elif s >= TWO_PI:
            cut.append([s - TWO_PI, e - TWO_PI, pc.then_pre(Homeo((Affine(1.0, TWO_PI),))), ls, le])
        else:
            cut.append([s, e, pc, ls, le])
    cut.sort(key=lambda it: it[0])
    cut[0][0], cut[-1][1] = 0.0, TWO_PI
    # one-sided limits at the new edges; the seam split gets its limit from the piece itself
    lims = []
    for k in range(len(cut) + 1):
        left = cut[k - 1][4] if k > 0 else math.nan
        right = cut[k][3] if k < len(cut) else math.nan
        if k > 0 and math.isnan(left):
            left = cut[k - 1][2].limit(cut[k - 1][1], -1)
        if k < len(cut) and math.isnan(right):
            right = cut[k][2].limit(cut[k][0], 1)
        lims.append((left, right))
    fn = PiecewiseFn(0.0, TWO_PI, tuple(c[0] for c in cut[1:]), tuple(c[2] for c in cut), "min",
                     tuple(lims))
    return RadialBoundary(fn)


def elliptic_group_conjugacy(theta1: float, theta2: float) -> bool:
    """Rotation groups e^{i theta t} are topologically conjugate iff |theta1| = |theta2|."""
    return abs(theta1) == abs(theta2)


# -------------------------------------------------------------- verification

@dataclass(frozen=True)
class ConjugacyReport:
    equivariance_residual: float
    set_residual: float
    passed: bool


def verify_conjugacy(m1: SemigroupModel, m2: SemigroupModel, tau, samples: int = 200,
                     times=(0.5, 1.0, 2.0), tol: float = 1e-9, seed: int = 0) -> ConjugacyReport:
    """Check tau o Phi_t = Phi~_t o tau on samples, and tau(Q1) = Q2 on a grid."""
    rng = np.random.default_rng(seed)
    if isinstance(tau, EllipticShear):
        return _verify_elliptic(m1, m2, tau, samples, times, tol, rng)
    m1, m2 = as_nonelliptic(m1), as_nonelliptic(m2)
    I1, I2 = m1.lower.domain, m2.lower.domain
    if tau.source != I1 or tau.target != I2:
        raise ValueError("shear does not map the first strip onto the second")
    x = _sample_open(I1, samples, rng)
    base = np.asarray(m1.lower.beta(x), dtype=float)
    y = np.where(np.isfinite(base), base, -3.0) + rng.exponential(1.0, samples)
    w = x + 1j * y
    eq = 0.0
    tw = apply_shear(tau, w)
    for t in times:
        a = apply_shear(tau, w + 1j * t)
        b = tw + 1j * t
        eq = max(eq, float(np.max(np.abs(a - b))))
    # fiberwise comparison of the pushed-forward graph with the target graph
    pushed = pushforward_boundary(m1.lower, tau).beta
    xs = _sample_open(I2, 2000, rng)
    b1 = np.asarray(pushed(xs), dtype=float)
    b2 = np.asarray(m2.lower.beta(xs), dtype=float)
    same_inf = (b1 == b2)
    with np.errstate(invalid="ignore"):
        diff = np.where(same_inf, 0.0, np.abs(b1 - b2))
    st = float(np.max(np.where(np.isnan(diff), INF, diff)))
    return ConjugacyReport(eq, st, eq <= tol and st <= tol)


def _verify_elliptic(m1, m2, tau, samples, times, tol, rng) -> ConjugacyReport:
    th = rng.uniform(0, TWO_PI, samples)
    r1 = np.asarray(m1.radial(th), dtype=float)
    r = np.where(np.isfinite(r1), r1, 10.0) * rng.uniform(0.05, 0.95, samples)
    z = r * np.exp(1j * th)
    tz = apply_tau0(tau, z)
    eq = max(float(np.max(np.abs(apply_tau0(tau, np.exp(-t) * z) - np.exp(-t) * tz))) for t in times)
    pushed = pushforward_radial(m1.radial, tau)
    grid = rng.uniform(0, TWO_PI, 2000)
    a, b = np.asarray(pushed(grid), dtype=float), np.asarray(m2.radial(grid), dtype=float)
    diff = np.where(a == b, 0.0, np.abs(a - b))
    st = float(np.max(diff))
    return ConjugacyReport(eq, st, eq <= tol and st <= tol)


def _sample_open(I: Interval, n: int, rng) -> np.ndarray:
    lo = I.lo if math.isfinite(I.lo) else (I.hi - 10.0 if math.isfinite(I.hi) else -10.0)
    hi = I.hi if math.isfinite(I.hi) else lo + 20.0
    x = rng.uniform(lo, hi, n)
    return np.clip(x, np.nextafter(I.lo, INF) if math.isfinite(I.lo) else -INF,
                   np.nextafter(I.hi, -INF) if math.isfinite(I.hi) else INF)


# -------------------------------------------------------------- transport

def transport_boundary_report(report: BoundaryReport, tau: ShearMap,
                              source: SemigroupModel | None = None) -> BoundaryReport:
    """Carry every non-exceptional boundary feature of ``report`` through tau.

    Exceptional arcs, the Denjoy-Wolff point and fixed points that sit at the
    bottom of exceptional arcs are not determined by a shear conjugacy; they
    are listed under ``undetermined``.
    """
    flip = {"left": "right", "right": "left", None: None}
    side = (lambda s: flip[s]) if tau.reflect else (lambda s: s)

    def seg(a, b):
        ua, ub = tau.u_at(a), tau.u_at(b)
        return (ua, ub) if ua <= ub else (ub, ua)

    out = BoundaryReport(report.model_type)
    out.components = [StripComponent(*seg(c.a, c.b)) for c in report.components]
    for arc in report.arcs:
        if arc.exceptional:
            out.undetermined.append(arc)
            continue
        s = 1 if arc.side == "right" else -1
        shift_d = tau.v_limit(arc.c, s)
        out.arcs.append(ContactArc(tau.u_at(arc.c), arc.d + shift_d, arc.R + shift_d,
                                   side(arc.side), False, arc.initial_class))
    for fp in report.fixed_points:
        w = fp.where
        if fp.exceptional or fp.cls in (BoundaryPointClass.DENJOY_WOLFF, BoundaryPointClass.SR3):
            out.undetermined.append(fp)
        elif w.kind == "bottom":
            a, b = seg(w.c, w.c2)
            out.fixed_points.append(FixedPoint(BoundaryPoint.bottom(a, b, side(w.side)), fp.cls,
                                               fp.exceptional, fp.note))
        else:
            out.undetermined.append(fp)
    return out


def transport_point(tau: ShearMap, where: BoundaryPoint, arc: ContactArc | None = None) -> BoundaryPoint:
    """Image of a boundary point c + iy on a non-exceptional arc (exact shift by the v limit)."""
    if where.kind != "point":
        raise ValueError("only boundary points of arcs are transported pointwise")
    s = 1 if where.side == "right" else -1
    y = where.y + tau.v_limit(where.c, s)
    sd = where.side
    if tau.reflect and sd:
        sd = {"left": "right", "right": "left"}[sd]
    return BoundaryPoint.at(tau.u_at(where.c), y, sd)


def compare_reports(transported: BoundaryReport, direct: BoundaryReport, tol: float = 0.0):
    """Mismatches between transported and recomputed regular/SR1/SR2 fixed points.

    Only fixed points off the closure of the exceptional arcs are compared; the
    others are not carried by a shear conjugacy.
    """
    keep = {BoundaryPointClass.REGULAR, BoundaryPointClass.SR1, BoundaryPointClass.SR2}

    def key(fp):
        w = fp.where
        return fp.cls, w.c, w.c2

    def close(k1, k2):
        return k1[0] == k2[0] and all(
            (a == b) or abs(a - b) <= tol * (1 + abs(a)) for a, b in zip(k1[1:], k2[1:]))

    a = [key(f) for f in transported.fixed_points if f.cls in keep and not f.exceptional]
    b = [key(f) for f in direct.fixed_points if f.cls in keep and not f.exceptional]
    missing = [k for k in a if not any(close(k, j) for j in b)]
    extra = [k for k in b if not any(close(k, j) for j in a)]
    return missing + extra


__all__ = [
    "ShearMap", "shear", "identity_shear", "apply_shear", "invert_shear", "compose_shears",
    "pushforward_boundary", "pushforward_model", "normalize_to_strip", "as_nonelliptic",
    "EllipticShear", "rotation_shear", "apply_tau0", "pushforward_radial",
    "elliptic_group_conjugacy", "theta_lambda", "elliptic_normalize",
    "ConjugacyReport", "verify_conjugacy", "transport_boundary_report", "transport_point",
    "compare_reports", "classify_type", "classify_fixed_points", "Recip",
]
