"""Random closed-form models and shears for property tests, plus a brute-force oracle.

All random data are dyadic rationals with few bits (breakpoints on a 1/16 or
1/4 lattice, coefficients on a 1/8 lattice).  Sums and differences of such
numbers are exact in floating point, so identities that hold exactly in the
model plane can be asserted with ``==``.
"""
from __future__ import annotations

import math

import numpy as np

from koenigs.boundary import BoundaryPointClass as K
from koenigs.model import LowerBoundary, NonElliptic, check_model, validate_model
from koenigs.piecewise import NEG_INF, Expr, Homeo, Logistic, Piece, PiecewiseFn, parse_piece

INF = math.inf


def P(spec, policy="max") -> PiecewiseFn:
    """PiecewiseFn from [(a, b, text), ...]."""
    return PiecewiseFn.from_pieces([(a, b, parse_piece(e) if isinstance(e, str) else e)
                                    for a, b, e in spec], policy)


def lower_model(spec) -> NonElliptic:
    return check_model(NonElliptic(LowerBoundary.of(P(spec))))


def _dyadic(rng, lo, hi, step):
    return float(step * rng.integers(int(round(lo / step)), int(round(hi / step)) + 1))


def _interval(rng):
    kind = rng.choice(["bounded", "bounded", "right", "left", "line"])
    if kind == "bounded":
        lo = _dyadic(rng, -2, 2, 0.25)
        return lo, lo + float(rng.choice([1.0, 2.0, 4.0]))
    if kind == "right":
        return _dyadic(rng, -2, 2, 0.25), INF
    if kind == "left":
        return -INF, _dyadic(rng, -2, 2, 0.25)
    return -INF, INF


def _lattice(lo, hi):
    """Candidate breakpoints: a 1/16 lattice of a bounded I, a 1/4 lattice near a finite end."""
    if math.isfinite(lo) and math.isfinite(hi):
        return [lo + (hi - lo) * k / 16 for k in range(1, 16)]
    if math.isfinite(lo):
        return [lo + k / 4 for k in range(1, 17)]
    if math.isfinite(hi):
        return [hi - k / 4 for k in range(16, 0, -1)]
    return [k / 4 for k in range(-8, 9)]


def _branch(rng, a, b, lo, hi):
    """A branch on (a, b): constant, affine, -inf, a cusp at a finite edge, or a pole up at a wall."""
    options = ["const", "affine", "neginf"]
    if math.isfinite(a):
        options.append("cusp-left")
    if math.isfinite(b):
        options.append("cusp-right")
    if (a == lo and math.isfinite(lo)) or (b == hi and math.isfinite(hi)):
        options.append("wall-up")
    kind = rng.choice(options)
    c0 = _dyadic(rng, -2, 2, 0.125)
    m = _dyadic(rng, 0.125, 2, 0.125)
    if kind == "const":
        return Piece(Expr(const=c0))
    if kind == "affine":
        lin = m * (1 if rng.random() < 0.5 else -1)
        return Piece(Expr(const=c0, lin=lin))
    if kind == "neginf":
        return Piece(NEG_INF)
    # the far-edge limit of a recip branch is c0 -+ m exactly when k = m * width
    width = (b - a) if math.isfinite(a) and math.isfinite(b) else 1.0
    k = m * width
    if kind == "cusp-left":
        return Piece(Expr(const=c0, recip=((a, -k),)))
    if kind == "cusp-right":
        return Piece(Expr(const=c0, recip=((b, k),)))
    if a == lo and math.isfinite(lo):
        return Piece(Expr(const=c0, recip=((a, k),)))
    return Piece(Expr(const=c0, recip=((b, -k),)))


def random_model(rng, max_pieces: int = 6) -> NonElliptic:
    """A valid non-elliptic model with at most ``max_pieces`` branches."""
    while True:
        lo, hi = _interval(rng)
        n = int(rng.integers(1, max_pieces + 1))
        lat = _lattice(lo, hi)
        breaks = sorted(rng.choice(lat, size=min(n - 1, len(lat)), replace=False).tolist())
        edges = [lo] + breaks + [hi]
        pieces = tuple(_branch(rng, a, b, lo, hi) for a, b in zip(edges, edges[1:]))
        beta = PiecewiseFn(lo, hi, tuple(breaks), pieces, "max")
        model = NonElliptic(LowerBoundary.of(beta))
        if not validate_model(model):
            return model


# --------------------------------------------------------------------- shears

def _piecewise_affine(rng, lo, hi, slopes_sign, n_max=3, value0=None):
    """A continuous piecewise affine function with dyadic data; monotone if slopes_sign != 0."""
    lat = _lattice(lo, hi)
    n = int(rng.integers(1, n_max + 1))
    breaks = sorted(rng.choice(lat, size=n - 1, replace=False).tolist())
    anchor = breaks[0] if breaks else (lo if math.isfinite(lo) else (hi if math.isfinite(hi) else 0.0))
    edges = [lo] + breaks + [hi]
    slopes = []
    for _ in range(n):
        s = _dyadic(rng, 0.25, 2, 0.25)
        if slopes_sign == 0:
            s = _dyadic(rng, -2, 2, 0.125)
        slopes.append(s * (slopes_sign or 1))
    # value at the anchor, then propagate continuity both ways
    val = {anchor: value0 if value0 is not None else _dyadic(rng, -2, 2, 0.125)}
    j0 = edges.index(anchor) if anchor in edges else 0
    pieces = [None] * n
    if anchor not in edges:           # single piece on a line or half-line with anchor inside
        return PiecewiseFn(lo, hi, (), (Piece(Expr(const=val[anchor] - slopes[0] * anchor, lin=slopes[0])),),
                           "continuous")
    for j in range(j0, n):
        a = edges[j]
        if math.isinf(a):
            a = edges[j + 1]
        pieces[j] = Expr(const=val[a] - slopes[j] * a, lin=slopes[j])
        b = edges[j + 1]
        if math.isfinite(b):
            val[b] = float(pieces[j](b))
    for j in range(j0 - 1, -1, -1):
        b = edges[j + 1]
        pieces[j] = Expr(const=val[b] - slopes[j] * b, lin=slopes[j])
        a = edges[j]
        if math.isfinite(a):
            val[a] = float(pieces[j](a))
    return PiecewiseFn(lo, hi, tuple(breaks), tuple(Piece(e) for e in pieces), "continuous")


def random_shear(rng, lo, hi):
    """A shear on (lo, hi): monotone u (affine pieces, or a Moebius/logistic chart) and dyadic v."""
    from koenigs.conjugation import ShearMap
    reflect = bool(rng.random() < 0.3)
    sign = -1 if reflect else 1
    choice = rng.random()
    if choice < 0.6:
        u = _piecewise_affine(rng, lo, hi, sign)
    elif math.isfinite(lo) and math.isfinite(hi) or (math.isfinite(lo) != math.isfinite(hi)):
        # x -> q - s*k/(x - p) with the pole outside the closure of I
        k = _dyadic(rng, 0.25, 2, 0.25)
        p = lo - _dyadic(rng, 0.5, 2, 0.5) if math.isfinite(lo) else hi + _dyadic(rng, 0.5, 2, 0.5)
        u = PiecewiseFn(lo, hi, (), (Piece(Expr(const=_dyadic(rng, -1, 1, 0.25), recip=((p, -sign * k),))),),
                        "continuous")
        # a pole above I flips the sense of x -> -k/(x - p); fix the sign by the endpoint values
        ua, ub = u.end_limits()
        if (ub - ua) * sign < 0:
            u = PiecewiseFn(lo, hi, (), (Piece(Expr(const=u.pieces[0].expr.const, recip=((p, sign * k),))),),
                            "continuous")
    else:
        # logistic chart of the whole line (reflected through 1 - x when needed)
        inner = Homeo((Logistic(),))
        u = PiecewiseFn(lo, hi, (), (Piece(Expr(lin=float(sign), const=0.0 if sign > 0 else 1.0), inner),),
                        "continuous")
    v = _piecewise_affine(rng, lo, hi, 0)
    return ShearMap(u, v, reflect)


# ---------------------------------------------------------------- grid oracle

DEPTH = 1e10              # deepest translate tested: Q + i*t for t up to DEPTH
GRID = 400


def _window(lo, hi):
    a = lo if math.isfinite(lo) else (hi - 8.0 if math.isfinite(hi) else -6.0)
    b = hi if math.isfinite(hi) else (lo + 8.0 if math.isfinite(lo) else 6.0)
    return a, b


def _tiny(c):
    return max(16 * float(np.spacing(abs(c))), 1e-300)


def oracle_columns(model: NonElliptic):
    """Columns of the grid: GRID uniform abscissae of the window plus every branch edge inside I."""
    beta = model.lower.beta
    a, b = _window(beta.lo, beta.hi)
    xs = a + (b - a) * (np.arange(GRID) + 0.5) / GRID
    return np.unique(np.concatenate([xs, np.array(beta.breaks, dtype=float)]))


def _sup_near(beta, x, edges):
    """Pointwise value of beta, or the larger of the two nearest samples at a branch edge."""
    if x in edges:
        e = _tiny(x)
        return max(float(beta(x - e)), float(beta(x + e)))
    return float(beta(x))


def oracle_member(model: NonElliptic, xs, depths=None):
    """Is the column x in the intersection of the translates Q + it over a grid of depths?

    x + 0i lies in Q + it iff x - it lies in Q, i.e. -t > beta(x) (read upper
    semicontinuously).  ``depths`` is a GRID-point geometric ladder up to DEPTH.
    """
    beta = model.lower.beta
    edges = set(beta.breaks)
    if depths is None:
        depths = np.concatenate([[0.0], np.geomspace(1e-3, DEPTH, GRID - 1)])
    vals = np.array([_sup_near(beta, float(x), edges) for x in xs])
    return np.all(-depths[None, :] > vals[:, None], axis=1)


def _runs(flags):
    out, start = [], None
    for k, f in enumerate(list(flags) + [False]):
        if f and start is None:
            start = k
        elif not f and start is not None:
            out.append((start, k - 1))
            start = None
    return out


def oracle_fixed_points(model: NonElliptic):
    """Fixed-point classes read off the grid: components and cusp bottoms.

    Returns (runs, cusp_points) where runs are (first_x, last_x, class) and
    cusp points are (class, c, side).
    """
    beta = model.lower.beta
    lo, hi = beta.lo, beta.hi
    xs = oracle_columns(model)
    mem = oracle_member(model, xs)
    edges = set(beta.breaks)
    runs = []
    for s, e in _runs(mem):
        if s == e and float(xs[s]) in edges:
            cls = K.SR1
        else:
            unbounded = (s == 0 and math.isinf(lo)) or (e == len(xs) - 1 and math.isinf(hi))
            cls = K.PLAIN if unbounded else K.REGULAR
        runs.append((float(xs[s]), float(xs[e]), cls))
    cusps = []
    ends = [c for c in (lo, hi) if math.isfinite(c)]
    for c in sorted(set(beta.breaks) | set(ends)):
        e = _tiny(c)
        sides = {}
        for s, name in ((-1, "left"), (1, "right")):
            x = c + s * e
            if not lo < x < hi:
                continue
            near = float(beta(x))
            moderate = float(beta(c + s * 1e-6 * (1 + abs(c))))
            sides[name] = (near < -DEPTH, math.isinf(moderate) and moderate < 0)
        for name, (deep, flat) in sides.items():
            if not deep or flat:
                continue
            other = [v for k, v in sides.items() if k != name]
            if other and other[0][0]:
                continue                    # both sides dive: a line component, not an arc bottom
            cusps.append((K.SR3 if c in ends else K.SR2, c, name))
    return runs, cusps
