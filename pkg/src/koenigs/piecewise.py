"""Closed-form piecewise functions on real intervals.

Every finite piece is a normal form

    c0 + c1*x + sum_k b_k/(x - p_k) + sum_k d_k*ln|x - q_k|

optionally precomposed with a chain of monotone elementary homeomorphisms
(affine maps, the logistic map and its inverse, Moebius-type reciprocals).
The family is closed under addition and affine substitution, so boundary
transformations by shears stay inside it.  One-sided limits are exact: they
are decided symbolically from the dominant term, never by sampling.

Extended reals cross the API as IEEE ``inf`` floats.  Inside, infinite pieces
are a separate piece kind (``Infinite``) so no infinity enters the arithmetic
of a finite branch.
"""
from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

INF = math.inf


class ExpressionError(ValueError):
    """Raised for text that falls outside the closed-form family."""

    def __init__(self, message: str, col: int | None = None):
        super().__init__(message if col is None else f"{message} (column {col})")
        self.col = col


class FamilyError(ValueError):
    """Raised when an operation would leave the closed-form family."""


# ---------------------------------------------------------------- normal form

def _merge(terms) -> tuple:
    acc: dict[float, float] = {}
    for at, coef in terms:
        acc[float(at)] = acc.get(float(at), 0.0) + float(coef)
    return tuple(sorted((a, c) for a, c in acc.items() if c != 0.0))


@dataclass(frozen=True)
class Expr:
    """c0 + c1*x + sum b/(x-p) + sum d*ln|x-q|, stored with merged terms."""

    const: float = 0.0
    lin: float = 0.0
    recip: tuple = ()
    logs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "const", float(self.const))
        object.__setattr__(self, "lin", float(self.lin))
        object.__setattr__(self, "recip", _merge(self.recip))
        object.__setattr__(self, "logs", _merge(self.logs))
        for v in (self.const, self.lin, *[c for _, c in self.recip + self.logs]):
            if not math.isfinite(v):
                raise FamilyError("normal-form coefficients must be finite")

    # -- arithmetic
    def __add__(self, other: "Expr | float") -> "Expr":
        if not isinstance(other, Expr):
            other = Expr(const=float(other))
        return Expr(self.const + other.const, self.lin + other.lin,
                    self.recip + other.recip, self.logs + other.logs)

    __radd__ = __add__

    def __neg__(self) -> "Expr":
        return self.scale(-1.0)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Expr) else -float(other))

    def scale(self, k: float) -> "Expr":
        k = float(k)
        return Expr(k * self.const, k * self.lin,
                    tuple((p, k * b) for p, b in self.recip),
                    tuple((q, k * d) for q, d in self.logs))

    def compose_affine(self, a: float, g: float) -> "Expr":
        """Return x -> self(a*x + g)."""
        if a == 0:
            raise FamilyError("affine substitution needs a nonzero slope")
        const = self.const + self.lin * g
        recip = tuple(((p - g) / a, b / a) for p, b in self.recip)
        logs = tuple(((q - g) / a, d) for q, d in self.logs)
        const += sum(d * math.log(abs(a)) for _, d in self.logs)
        return Expr(const, self.lin * a, recip, logs)

    # -- queries
    @property
    def is_constant(self) -> bool:
        return self.lin == 0 and not self.recip and not self.logs

    @property
    def is_affine(self) -> bool:
        return not self.recip and not self.logs

    def singularities(self) -> list[float]:
        return sorted({p for p, _ in self.recip} | {q for q, _ in self.logs})

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = self.const + self.lin * x
        with np.errstate(divide="ignore", invalid="ignore"):
            for p, b in self.recip:
                out = out + b / (x - p)
            for q, d in self.logs:
                out = out + d * np.log(np.abs(x - q))
        return out

    def limit(self, x0: float, side: int) -> float:
        """Exact one-sided limit as x -> x0 from the side ``side`` (+1 right, -1 left)."""
        if math.isinf(x0):
            s = 1.0 if x0 > 0 else -1.0
            if self.lin != 0:
                return math.copysign(INF, self.lin * s)
            dlog = sum(d for _, d in self.logs)
            if dlog != 0:
                return math.copysign(INF, dlog)
            return self.const
        b = sum(c for p, c in self.recip if p == x0)
        if b != 0:
            return math.copysign(INF, b * side)
        d = sum(c for q, c in self.logs if q == x0)
        if d != 0:
            return -math.copysign(INF, d)
        val = self.const + self.lin * x0
        val += sum(c / (x0 - p) for p, c in self.recip)
        val += sum(c * math.log(abs(x0 - q)) for q, c in self.logs)
        return val

    def __str__(self) -> str:
        parts = []
        if self.const != 0 or self.is_constant:
            parts.append(_num(self.const))
        if self.lin != 0:
            parts.append("x" if self.lin == 1 else f"{_num(self.lin)}*x")
        for p, b in self.recip:
            parts.append(f"{_num(b)}/({_shift('x', p)})")
        for q, d in self.logs:
            parts.append(f"{_num(d)}*ln|{_shift('x', q)}|")
        s = " + ".join(parts)
        return s.replace("+ -", "- ")


def _num(v: float) -> str:
    return f"{v:.12g}"


def _shift(var: str, p: float) -> str:
    if p == 0:
        return var
    return f"{var} - {_num(p)}" if p > 0 else f"{var} + {_num(-p)}"


# ------------------------------------------------- monotone homeomorphisms

@dataclass(frozen=True)
class Affine:
    a: float
    b: float = 0.0

    def __call__(self, x):
        return self.a * np.asarray(x, dtype=float) + self.b

    def inverse(self):
        return Affine(1.0 / self.a, -self.b / self.a)

    @property
    def sign(self) -> int:
        return 1 if self.a > 0 else -1

    def limit(self, x0, side):
        if math.isinf(x0):
            return math.copysign(INF, self.a * x0), self.sign * side
        return self.a * x0 + self.b, self.sign * side


@dataclass(frozen=True)
class Recip:
    """x -> c + k/(x - p), monotone on each side of p."""
    c: float
    k: float
    p: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return self.c + self.k / (x - self.p)

    def inverse(self):
        return Recip(self.p, self.k, self.c)

    @property
    def sign(self) -> int:
        return 1 if self.k < 0 else -1

    def limit(self, x0, side):
        if math.isinf(x0):
            # k/(x-p) has the sign of k*x0 for large |x|
            return self.c, (1 if self.k * x0 > 0 else -1)
        if x0 == self.p:
            v = math.copysign(INF, self.k * side)
            return v, (-1 if v > 0 else 1)
        return self.c + self.k / (x0 - self.p), self.sign * side


@dataclass(frozen=True)
class Logistic:
    def __call__(self, x):
        return 1.0 / (1.0 + np.exp(-np.asarray(x, dtype=float)))

    def inverse(self):
        return Logit()

    sign = 1

    def limit(self, x0, side):
        if x0 == INF:
            return 1.0, -1
        if x0 == -INF:
            return 0.0, 1
        return 1.0 / (1.0 + math.exp(-x0)), side


@dataclass(frozen=True)
class Logit:
    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore"):
            return np.log(y) - np.log1p(-y)

    def inverse(self):
        return Logistic()

    sign = 1

    def limit(self, y0, side):
        if y0 == 0.0 and side > 0:
            return -INF, 1
        if y0 == 1.0 and side < 0:
            return INF, -1
        return math.log(y0) - math.log1p(-y0), side


Step = Union[Affine, Recip, Logistic, Logit]


@dataclass(frozen=True)
class Homeo:
    """A chain of monotone maps applied left to right."""

    steps: tuple = ()

    def __post_init__(self):
        merged: list = []
        for s in self.steps:
            if isinstance(s, Homeo):
                for t in s.steps:
                    merged = _push(merged, t)
            else:
                merged = _push(merged, s)
        object.__setattr__(self, "steps", tuple(merged))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        for s in self.steps:
            x = s(x)
        return x

    def then(self, other: "Homeo") -> "Homeo":
        return Homeo(self.steps + other.steps)

    def inverse(self) -> "Homeo":
        return Homeo(tuple(s.inverse() for s in reversed(self.steps)))

    @property
    def sign(self) -> int:
        out = 1
        for s in self.steps:
            out *= s.sign
        return out

    @property
    def is_identity(self) -> bool:
        return not self.steps

    def limit(self, x0: float, side: int):
        for s in self.steps:
            x0, side = s.limit(x0, side)
        return x0, side

    def __str__(self):
        return " -> ".join(type(s).__name__ for s in self.steps) or "id"


def _push(chain: list, step) -> list:
    if isinstance(step, Affine) and step.a == 1 and step.b == 0:
        return chain
    if chain and isinstance(step, Affine) and isinstance(chain[-1], Affine):
        prev = chain.pop()
        return _push(chain, Affine(step.a * prev.a, step.a * prev.b + step.b))
    if chain and isinstance(step, Recip) and isinstance(chain[-1], Affine):
        # c + k/((a x + b) - p) = c + (k/a)/(x - (p - b)/a)
        prev = chain.pop()
        return _push(chain, Recip(step.c, step.k / prev.a, (step.p - prev.b) / prev.a))
    if chain and isinstance(step, Affine) and isinstance(chain[-1], Recip):
        prev = chain.pop()
        return _push(chain, Recip(step.a * prev.c + step.b, step.a * prev.k, prev.p))
    if chain and isinstance(step, Logit) and isinstance(chain[-1], Logistic):
        chain.pop()
        return chain
    if chain and isinstance(step, Logistic) and isinstance(chain[-1], Logit):
        chain.pop()
        return chain
    return chain + [step]


IDENTITY = Homeo()


# ------------------------------------------------------------------ pieces

@dataclass(frozen=True)
class Infinite:
    sign: int

    def __str__(self):
        return "inf" if self.sign > 0 else "-inf"


POS_INF = Infinite(1)
NEG_INF = Infinite(-1)


@dataclass(frozen=True)
class Piece:
    """One branch: ``expr(pre(x))`` or a symbolic infinity."""

    expr: Union[Expr, Infinite]
    pre: Homeo = field(default=IDENTITY)

    def __post_init__(self):
        e, pre = self.expr, self.pre
        if isinstance(e, Expr):
            if e.is_constant:
                pre = IDENTITY
            elif len(pre.steps) == 1 and isinstance(pre.steps[0], Affine):
                e, pre = e.compose_affine(pre.steps[0].a, pre.steps[0].b), IDENTITY
            elif len(pre.steps) == 1 and isinstance(pre.steps[0], Recip) and e.is_affine:
                r = pre.steps[0]
                e, pre = Expr(e.const + e.lin * r.c, recip=((r.p, e.lin * r.k),)), IDENTITY
        else:
            pre = IDENTITY
        object.__setattr__(self, "expr", e)
        object.__setattr__(self, "pre", pre)

    @property
    def infinite(self) -> int:
        return self.expr.sign if isinstance(self.expr, Infinite) else 0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.infinite:
            return np.full(x.shape, self.infinite * INF)
        return self.expr(self.pre(x))

    def limit(self, x0: float, side: int) -> float:
        if self.infinite:
            return self.infinite * INF
        y0, s = self.pre.limit(x0, side)
        return self.expr.limit(y0, s)

    def singular_points(self, lo: float, hi: float) -> list[float]:
        """Points of the open interval (lo, hi) where the branch is not finite."""
        if self.infinite:
            return []
        inv = self.pre.inverse()
        a, _ = self.pre.limit(lo, 1)
        b, _ = self.pre.limit(hi, -1)
        a, b = min(a, b), max(a, b)
        out = []
        for s in self.expr.singularities():
            if a < s < b:
                x = float(inv(s))
                # a pole carried onto an edge by a rounded substitution is not inside
                if min(abs(x - lo), abs(x - hi)) > 1e-12 * (1.0 + abs(x)):
                    out.append(x)
        return out

    def shifted(self, other: "Piece") -> "Piece":
        """Pointwise sum; -inf absorbs finite values."""
        if self.infinite or other.infinite:
            if self.infinite and other.infinite and self.infinite != other.infinite:
                raise FamilyError("inf - inf is undefined")
            return self if self.infinite else other
        a, b = self.expr, other.expr
        if b.is_constant:
            return Piece(a + b.const, self.pre)
        if a.is_constant:
            return Piece(b + a.const, other.pre)
        if self.pre == other.pre:
            return Piece(a + b, self.pre)
        raise FamilyError("cannot add branches with different precompositions")

    def then_pre(self, h: Homeo) -> "Piece":
        """Return the branch y -> self(h(y))."""
        if self.infinite:
            return self
        return Piece(self.expr, h.then(self.pre))

    def as_homeo(self) -> Homeo:
        """Read an invertible branch as a monotone chain."""
        e = self.expr
        if self.infinite:
            raise FamilyError("an infinite branch is not a homeomorphism")
        if e.is_affine and e.lin != 0:
            last = Affine(e.lin, e.const)
        elif e.lin == 0 and not e.logs and len(e.recip) == 1:
            p, k = e.recip[0]
            last = Recip(e.const, k, p)
        else:
            raise FamilyError(f"branch '{self}' is not invertible in closed form")
        return self.pre.then(Homeo((last,)))

    def __str__(self):
        if self.infinite or self.pre.is_identity:
            return str(self.expr)
        return f"({self.expr}) o ({self.pre})"


def piece(value) -> Piece:
    """Coerce a float, Expr, Piece or string to a Piece."""
    if isinstance(value, Piece):
        return value
    if isinstance(value, (Expr, Infinite)):
        return Piece(value)
    if isinstance(value, str):
        return parse_piece(value)
    v = float(value)
    if math.isinf(v):
        return Piece(POS_INF if v > 0 else NEG_INF)
    return Piece(Expr(const=v))


# -------------------------------------------------------- piecewise functions

POLICIES = ("max", "min", "continuous")


@dataclass(frozen=True)
class PiecewiseFn:
    """A function on the open interval (lo, hi) cut at ``breaks``.

    The value at a breakpoint follows ``policy``: ``max`` gives the upper
    semicontinuous representative, ``min`` the lower one, and ``continuous``
    requires the one-sided limits to agree.
    """

    lo: float
    hi: float
    breaks: tuple
    pieces: tuple
    policy: str = "max"
    # optional exact one-sided limits per edge (lo, breaks..., hi) as (left, right)
    limits: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        object.__setattr__(self, "breaks", tuple(float(b) for b in self.breaks))
        object.__setattr__(self, "pieces", tuple(piece(p) for p in self.pieces))
        if not self.lo < self.hi:
            raise ValueError(f"empty interval ({self.lo}, {self.hi})")
        if len(self.pieces) != len(self.breaks) + 1:
            raise ValueError("need exactly one more piece than breakpoints")
        edges = (self.lo,) + self.breaks + (self.hi,)
        if any(not a < b for a, b in zip(edges, edges[1:])):
            raise ValueError("breakpoints must be strictly inside and increasing")
        if self.policy not in POLICIES:
            raise ValueError(f"unknown breakpoint policy {self.policy!r}")

    # -- construction
    @classmethod
    def constant(cls, lo, hi, value, policy="max") -> "PiecewiseFn":
        return cls(lo, hi, (), (piece(value),), policy)

    @classmethod
    def from_pieces(cls, spec: Sequence, policy="max") -> "PiecewiseFn":
        """Build from ``[(a, b, piece_like), ...]`` covering an interval."""
        spec = sorted(spec, key=lambda s: s[0])
        for (a0, b0, _), (a1, _, _) in zip(spec, spec[1:]):
            if b0 != a1:
                raise ValueError(f"pieces must tile the interval; gap or overlap at {b0}")
        return cls(spec[0][0], spec[-1][1], tuple(s[1] for s in spec[:-1]),
                   tuple(piece(s[2]) for s in spec), policy)

    @property
    def edges(self) -> tuple:
        return (self.lo,) + self.breaks + (self.hi,)

    def spans(self):
        e = self.edges
        return list(zip(e[:-1], e[1:], self.pieces))

    def piece_index(self, x: float) -> int:
        return int(np.searchsorted(self.breaks, x, side="right"))

    # -- limits
    def left_limit(self, x: float) -> float:
        i = int(np.searchsorted(self.breaks, x, side="left"))
        if self.limits is not None and x in self.edges:
            return self.limits[self.edges.index(x)][0]
        return self.pieces[i].limit(x, -1)

    def right_limit(self, x: float) -> float:
        if self.limits is not None and x in self.edges:
            return self.limits[self.edges.index(x)][1]
        return self.pieces[self.piece_index(x)].limit(x, 1)

    def break_limits(self, i: int) -> tuple[float, float]:
        if self.limits is not None:
            return self.limits[i + 1]
        c = self.breaks[i]
        return self.pieces[i].limit(c, -1), self.pieces[i + 1].limit(c, 1)

    def end_limits(self) -> tuple[float, float]:
        if self.limits is not None:
            return self.limits[0][1], self.limits[-1][0]
        return self.pieces[0].limit(self.lo, 1), self.pieces[-1].limit(self.hi, -1)

    def with_policy(self, policy: str) -> "PiecewiseFn":
        return PiecewiseFn(self.lo, self.hi, self.breaks, self.pieces, policy, self.limits)

    def break_value(self, i: int) -> float:
        l, r = self.break_limits(i)
        if self.policy == "min":
            return min(l, r)
        return max(l, r)

    # -- evaluation
    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, np.nan)
        idx = np.searchsorted(self.breaks, x, side="right")
        for i, p in enumerate(self.pieces):
            m = idx == i
            if m.any():
                out[m] = p(x[m])
        for i, c in enumerate(self.breaks):
            m = x == c
            if m.any():
                out[m] = self.break_value(i)
        out[(x <= self.lo) | (x >= self.hi)] = np.nan
        return out if out.ndim else float(out)

    def __str__(self):
        return "; ".join(f"({_num(a)}, {_num(b)}): {p}" for a, b, p in self.spans())


# ------------------------------------------------------------------ parser

_FUNCS = {"ln", "log", "exp", "sqrt", "logistic", "logit"}
_NAMES = {"pi": math.pi, "e": math.e, "inf": INF, "oo": INF}


def parse_piece(text: str) -> Piece:
    """Parse one branch of a piecewise definition.

    Accepts sums of constants, ``x``, ``k/(a*x+b)``, ``(a*x+b)/(c*x+d)`` and
    ``k*ln(a*x+b)``; the words ``inf``/``-inf``; and a top-level
    ``logistic(a*x+b)`` or ``logit(a*x+b)``.
    """
    src = text.strip()
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {src!r}", exc.offset) from None
    body = tree.body
    if isinstance(body, ast.Call) and getattr(body.func, "id", None) in ("logistic", "logit"):
        arg = _to_expr(_walk(body.args[0]) if len(body.args) == 1 else None, body)
        if not arg.is_affine or arg.lin == 0:
            raise ExpressionError(f"{body.func.id} needs an affine argument", body.col_offset)
        step = Logistic() if body.func.id == "logistic" else Logit()
        return Piece(Expr(lin=1.0), Homeo((Affine(arg.lin, arg.const), step)))
    val = _walk(body)
    if isinstance(val, float):
        return piece(val)
    return Piece(val)


def parse_expr(text: str) -> Expr:
    p = parse_piece(text)
    if p.infinite or not p.pre.is_identity:
        raise ExpressionError(f"{text!r} is not a finite normal form")
    return p.expr


def _to_expr(v, node) -> Expr:
    if v is None:
        raise ExpressionError("wrong number of arguments", node.col_offset)
    if isinstance(v, Expr):
        return v
    if math.isinf(v):
        raise ExpressionError("infinity is only allowed as a whole branch", node.col_offset)
    return Expr(const=v)


def _walk(node):
    """Return a float (possibly infinite) or an Expr."""
    col = getattr(node, "col_offset", None)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        return float(node.value)
    if isinstance(node, ast.Name):
        if node.id == "x":
            return Expr(lin=1.0)
        if node.id in _NAMES:
            return _NAMES[node.id]
        raise ExpressionError(f"unknown name {node.id!r}", col)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _walk(node.operand)
        if isinstance(node.op, ast.UAdd):
            return v
        return -v
    if isinstance(node, ast.BinOp):
        a, b = _walk(node.left), _walk(node.right)
        op = node.op
        if isinstance(a, float) and isinstance(b, float):
            try:
                return float(_FLOAT_OPS[type(op)](a, b))
            except KeyError:
                raise ExpressionError(f"unsupported operator {type(op).__name__}", col) from None
            except (ZeroDivisionError, OverflowError, ValueError) as exc:
                raise ExpressionError(str(exc), col) from None
        if isinstance(op, (ast.Add, ast.Sub)):
            a, b = _to_expr(a, node), _to_expr(b, node)
            return a + b if isinstance(op, ast.Add) else a - b
        if isinstance(op, ast.Mult):
            a, b = _to_expr(a, node), _to_expr(b, node)
            if a.is_constant:
                return b.scale(a.const)
            if b.is_constant:
                return a.scale(b.const)
            raise ExpressionError("product of two non-constant terms", col)
        if isinstance(op, ast.Div):
            return _divide(_to_expr(a, node), _to_expr(b, node), col)
        raise ExpressionError(f"unsupported operator {type(op).__name__}", col)
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
        name = node.func.id
        if name not in _FUNCS or len(node.args) != 1 or node.keywords:
            raise ExpressionError(f"unsupported call {name!r}", col)
        if name in ("logistic", "logit"):
            raise ExpressionError(f"{name} is only allowed as a whole branch", col)
        v = _walk(node.args[0])
        if isinstance(v, float):
            try:
                return float({"ln": math.log, "log": math.log, "exp": math.exp,
                              "sqrt": math.sqrt}[name](v))
            except (ValueError, OverflowError) as exc:
                raise ExpressionError(str(exc), col) from None
        if name in ("ln", "log") and v.is_affine and v.lin != 0:
            # ln|a x + b| = ln|a| + ln|x + b/a|
            return Expr(const=math.log(abs(v.lin)), logs=((-v.const / v.lin, 1.0),))
        raise ExpressionError(f"{name} of {v} is outside the closed-form family", col)
    raise ExpressionError(f"unsupported syntax {type(node).__name__}", col)


def _divide(a: Expr, b: Expr, col) -> Expr:
    if b.is_constant:
        if b.const == 0:
            raise ExpressionError("division by zero", col)
        return a.scale(1.0 / b.const)
    if not b.is_affine:
        raise ExpressionError("denominator must be affine in x", col)
    if not a.is_affine:
        raise ExpressionError("numerator must be affine in x", col)
    # (al x + ac)/(bl x + bc) = al/bl + (ac - al*bc/bl)/(bl x + bc)
    p = -b.const / b.lin
    k = (a.const - a.lin * b.const / b.lin) / b.lin
    return Expr(const=a.lin / b.lin, recip=((p, k),))


_FLOAT_OPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
    ast.Pow: lambda a, b: a ** b,
}
