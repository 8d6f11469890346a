"""Koenigs models of continuous semigroups of holomorphic self-maps of the disc.

A non-elliptic model is a domain Q = {x in I, y > beta(x)} inside the vertical
strip or half-plane Omega = I x R, on which the semigroup acts as w -> w + it.
An elliptic model is a starlike domain {r < rho(theta)} on which it acts as
w -> e^{lambda t} w.  The two group cases are kept as their own variants.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from .elliptic import elliptic_normalize
from .piecewise import INF, PiecewiseFn

TWO_PI = 2.0 * math.pi


class ModelError(ValueError):
    """Raised when a model violates one of its structural invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))

    @property
    def kind(self) -> str:
        a, b = math.isinf(self.lo), math.isinf(self.hi)
        if a and b:
            return "line"
        if a:
            return "left"
        if b:
            return "right"
        return "bounded"

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (x > self.lo) & (x < self.hi)

    def __str__(self):
        return f"({self.lo:g}, {self.hi:g})"


@dataclass(frozen=True)
class LowerBoundary:
    """The graph beta over I; beta is read with the upper semicontinuous convention."""

    domain: Interval
    beta: PiecewiseFn

    @classmethod
    def of(cls, beta: PiecewiseFn) -> "LowerBoundary":
        if beta.policy != "max":
            beta = beta.with_policy("max")
        return cls(Interval(beta.lo, beta.hi), beta)

    def __call__(self, x):
        return self.beta(x)


@dataclass(frozen=True)
class RadialBoundary:
    """rho on [0, 2pi), lower semicontinuous, periodic."""

    rho: PiecewiseFn

    @classmethod
    def of(cls, rho: PiecewiseFn) -> "RadialBoundary":
        if rho.policy != "min":
            rho = rho.with_policy("min")
        return cls(rho)

    @classmethod
    def constant(cls, r: float) -> "RadialBoundary":
        return cls(PiecewiseFn.constant(0.0, TWO_PI, r, "min"))

    def seam_limits(self) -> tuple[float, float]:
        """One-sided limits at angle 0: (from below 2pi, from above 0)."""
        right, left = self.rho.end_limits()
        return left, right

    def __call__(self, theta):
        th = np.mod(np.asarray(theta, dtype=float), TWO_PI)
        out = np.asarray(self.rho(np.where(th == 0, math.pi, th)), dtype=float)
        seam = min(self.seam_limits())
        out = np.where(th == 0, seam, out)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class NonElliptic:
    lower: LowerBoundary


@dataclass(frozen=True)
class EllipticStarlike:
    radial: RadialBoundary


@dataclass(frozen=True)
class EllipticSpiral:
    """Spiral rate ``lam`` with the boundary already in the normalized (starlike) frame."""
    lam: complex
    radial: RadialBoundary


@dataclass(frozen=True)
class EllipticGroup:
    theta: float


@dataclass(frozen=True)
class HyperbolicGroup:
    width: float


SemigroupModel = Union[NonElliptic, EllipticStarlike, EllipticSpiral, EllipticGroup, HyperbolicGroup]


class SemigroupType(str, Enum):
    ELLIPTIC = "elliptic"
    ELLIPTIC_GROUP = "elliptic-group"
    HYPERBOLIC = "hyperbolic"
    HYPERBOLIC_GROUP = "hyperbolic-group"
    PARABOLIC_ZERO = "parabolic-zero-step"
    PARABOLIC_POSITIVE = "parabolic-positive-step"
    PARABOLIC_GROUP = "parabolic-group"


@dataclass(frozen=True)
class Violation:
    invariant: str
    witness: float | None
    message: str

    def __str__(self):
        at = "" if self.witness is None else f" at {self.witness:.6g}"
        return f"{self.invariant}{at}: {self.message}"


def strip_model(lo: float, hi: float, beta) -> NonElliptic:
    """Convenience: NonElliptic model over (lo, hi) from a PiecewiseFn or a constant."""
    if not isinstance(beta, PiecewiseFn):
        beta = PiecewiseFn.constant(lo, hi, beta)
    return NonElliptic(LowerBoundary.of(beta))


def starlike_model(rho) -> EllipticStarlike:
    if not isinstance(rho, PiecewiseFn):
        return EllipticStarlike(RadialBoundary.constant(float(rho)))
    return EllipticStarlike(RadialBoundary.of(rho))


# ------------------------------------------------------------- validation

def _piece_checks(fn: PiecewiseFn, bad_sign: int, name: str) -> list[Violation]:
    """Branch-level checks shared by beta (no +inf) and rho (no -inf)."""
    out = []
    for a, b, p in fn.spans():
        mid = _midpoint(a, b)
        if p.infinite == bad_sign:
            out.append(Violation(f"{name} finite", mid,
                                 f"{name} is {'+' if bad_sign > 0 else '-'}inf on ({a:g}, {b:g})"))
        for s in p.singular_points(a, b):
            out.append(Violation(f"{name} continuous", s,
                                 f"branch {p} is singular inside ({a:g}, {b:g})"))
    return out


def _midpoint(a: float, b: float) -> float:
    if math.isinf(a) and math.isinf(b):
        return 0.0
    if math.isinf(a):
        return b - 1.0
    if math.isinf(b):
        return a + 1.0
    return 0.5 * (a + b)


def validate_model(model: SemigroupModel) -> list[Violation]:
    """Return every structural invariant the model violates (empty when valid)."""
    if isinstance(model, HyperbolicGroup):
        ok = model.width > 0 and math.isfinite(model.width)
        return [] if ok else [Violation("interval", None, "group strip needs finite positive width")]
    if isinstance(model, EllipticGroup):
        ok = -math.pi < model.theta <= math.pi and model.theta != 0
        return [] if ok else [Violation("rotation", model.theta, "rotation angle must lie in (-pi, pi] minus 0")]
    if isinstance(model, NonElliptic):
        return _validate_lower(model.lower)
    out = []
    if isinstance(model, EllipticSpiral) and not complex(model.lam).real < 0:
        out.append(Violation("spiral rate", None, "Re lambda must be negative"))
    return out + _validate_radial(model.radial)


def _validate_lower(lower: LowerBoundary) -> list[Violation]:
    beta, I = lower.beta, lower.domain
    out: list[Violation] = []
    if (beta.lo, beta.hi) != (I.lo, I.hi):
        out.append(Violation("domain", None, "beta is not defined on the whole interval"))
    out += _piece_checks(beta, 1, "beta")
    for i, c in enumerate(beta.breaks):
        l, r = beta.break_limits(i)
        if l == INF or r == INF:
            out.append(Violation("upper semicontinuity", c,
                                 "a +inf one-sided limit cannot be matched by a finite usc value"))
    if I.kind == "line" and all(p.infinite == -1 for p in beta.pieces):
        out.append(Violation("Q != C", None, "beta = -inf on the whole line gives the whole plane"))
    return out


def _validate_radial(radial: RadialBoundary) -> list[Violation]:
    rho = radial.rho
    out: list[Violation] = []
    if (rho.lo, rho.hi) != (0.0, TWO_PI):
        out.append(Violation("domain", None, "rho must be given on [0, 2pi)"))
    out += _piece_checks(rho, -1, "rho")
    lims = [("seam", 0.0, radial.seam_limits())]
    lims += [("break", c, rho.break_limits(i)) for i, c in enumerate(rho.breaks)]
    for _, c, (l, r) in lims:
        if min(l, r) <= 0:
            out.append(Violation("rho positive", c, "rho must stay positive"))
    for a, b, p in rho.spans():
        if p.infinite:
            continue
        th = np.linspace(a, b, 403)[1:-1]
        vals = p(th)
        k = int(np.argmin(vals))
        if not vals[k] > 0:
            out.append(Violation("rho positive", float(th[k]), f"rho = {vals[k]:.4g}"))
    if all(p.infinite == 1 for p in rho.pieces):
        out.append(Violation("Q != C", None, "rho = +inf everywhere gives the whole plane"))
    return out


def check_model(model: SemigroupModel) -> SemigroupModel:
    v = validate_model(model)
    if v:
        raise ModelError(v)
    return model


# ---------------------------------------------------------- classification

def is_group(model: SemigroupModel) -> bool:
    """True when the Koenigs domain is all of Omega (or the disc)."""
    if isinstance(model, (HyperbolicGroup, EllipticGroup)):
        return True
    if isinstance(model, NonElliptic):
        return all(p.infinite == -1 for p in model.lower.beta.pieces)
    return False


def classify_type(model: SemigroupModel) -> SemigroupType:
    check_model(model)
    if isinstance(model, HyperbolicGroup):
        return SemigroupType.HYPERBOLIC_GROUP
    if isinstance(model, EllipticGroup):
        return SemigroupType.ELLIPTIC_GROUP
    if isinstance(model, (EllipticStarlike, EllipticSpiral)):
        return SemigroupType.ELLIPTIC
    kind = model.lower.domain.kind
    group = is_group(model)
    if kind == "bounded":
        return SemigroupType.HYPERBOLIC_GROUP if group else SemigroupType.HYPERBOLIC
    if kind == "line":
        return SemigroupType.PARABOLIC_ZERO
    return SemigroupType.PARABOLIC_GROUP if group else SemigroupType.PARABOLIC_POSITIVE


# ------------------------------------------------------------- dynamics

def flow(model: SemigroupModel, w: complex, t: float) -> complex:
    """Image of w under the model flow at time t >= 0 (negative t allowed for groups)."""
    w = complex(w)
    if t < 0 and not is_group(model):
        raise ValueError("negative times are only defined for groups")
    if membership(model, w) != "interior":
        raise ValueError(f"{w} is not in the Koenigs domain")
    if isinstance(model, (NonElliptic, HyperbolicGroup)):
        return complex(w.real, w.imag + t)
    if isinstance(model, EllipticGroup):
        return w * complex(math.cos(model.theta * t), math.sin(model.theta * t))
    lam = -1.0 if isinstance(model, EllipticStarlike) else complex(model.lam)
    return complex(np.exp(lam * t) * w)


def membership(model: SemigroupModel, w: complex) -> str:
    """'interior', 'boundary' or 'exterior' relative to the closure of Q in the plane."""
    w = complex(w)
    if isinstance(model, HyperbolicGroup):
        x = w.real
        return "interior" if 0 < x < model.width else "boundary" if x in (0.0, model.width) else "exterior"
    if isinstance(model, EllipticGroup):
        r = abs(w)
        return "interior" if r < 1 else "boundary" if r == 1 else "exterior"
    if isinstance(model, NonElliptic):
        return _member_lower(model.lower, w.real, w.imag)
    if isinstance(model, EllipticSpiral):
        w = complex(elliptic_normalize(model.lam, w))
    return _member_radial(model.radial, w)


def _member_lower(lower: LowerBoundary, x: float, y: float) -> str:
    beta, I = lower.beta, lower.domain
    if x < I.lo or x > I.hi:
        return "exterior"
    if x == I.lo or x == I.hi:
        d = beta.end_limits()[0 if x == I.lo else 1]
        return "boundary" if y >= d else "exterior"
    val = float(beta(x))
    if y > val:
        return "interior"
    i = beta.piece_index(x)
    if i > 0 and beta.breaks[i - 1] == x:
        low = min(beta.break_limits(i - 1))
    else:
        low = val
    return "boundary" if y >= low else "exterior"


def _member_radial(radial: RadialBoundary, w: complex) -> str:
    r = abs(w)
    if r == 0:
        return "interior"
    th = math.atan2(w.imag, w.real) % TWO_PI
    rho = radial.rho
    val = float(radial(th))
    if r < val:
        return "interior"
    if th == 0:
        high = max(radial.seam_limits())
    elif th in rho.breaks:
        high = max(rho.break_limits(rho.breaks.index(th)))
    else:
        high = val
    return "boundary" if r <= high else "exterior"
