"""Scenario files: a model, an optional shear, and a list of tasks, written in TOML.

    [model]
    kind = "non-elliptic"
    beta = [{on = "(0, 1)", expr = "-1/x"}]

    [conjugation]
    v = "2/x"

    [run]
    tasks = ["classify", "arcs", "trace", "reproduce dw-no-limit"]
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

import numpy as np

from .conjugation import EllipticShear, ShearMap, pushforward_model
from .model import (TWO_PI, EllipticGroup, EllipticSpiral, EllipticStarlike, HyperbolicGroup,
                    LowerBoundary, ModelError, NonElliptic, RadialBoundary, check_model)
from .piecewise import ExpressionError, Piece, PiecewiseFn, parse_piece
from .reproduction import EXAMPLES

TASKS = ("classify", "arcs", "lifetimes", "conjugate", "verify", "trace", "cluster", "reproduce")
FORMATS = ("csv", "svg", "json-report")
KINDS = ("non-elliptic", "hyperbolic-group", "elliptic-starlike", "elliptic-spiral", "elliptic-group")
NEEDS_SHEAR = ("conjugate", "verify")
NEEDS_MAP = ("trace", "cluster")


class ScenarioError(ValueError):
    """Invalid scenario; carries the 1-based line and column when they are known."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line, self.col = line, col
        self.message = re.sub(r"\s*\(column \d+\)$", "", message)
        where = "" if line is None else f"line {line}, column {col}: "
        super().__init__(where + self.message)


@dataclass
class Task:
    name: str
    arg: str | None = None

    def __str__(self):
        return self.name if self.arg is None else f"{self.name} {self.arg}"

    @property
    def slug(self) -> str:
        return self.name if self.arg is None else f"{self.name}-{self.arg}"


@dataclass
class Scenario:
    name: str
    model: object | None
    tau: object | None = None
    tasks: list = field(default_factory=list)
    out: str | None = None
    formats: tuple = FORMATS
    resolution: int | None = None
    tolerance: float | None = None
    trace: dict = field(default_factory=dict)
    cluster: dict = field(default_factory=dict)

    @property
    def target(self):
        return None if self.tau is None else pushforward_model(self.model, self.tau)


# ------------------------------------------------------------------ helpers

class _Source:
    """Raw text of the scenario, used to point errors at the offending string."""

    def __init__(self, text: str):
        self.lines = text.splitlines()

    def find(self, value: str, offset: int = 0):
        for q in ('"', "'"):
            needle = q + value + q
            for i, line in enumerate(self.lines):
                j = line.find(needle)
                if j >= 0:
                    return i + 1, j + 2 + offset
        return None, None

    def error(self, message: str, value=None, offset: int = 0) -> ScenarioError:
        line, col = self.find(str(value), offset) if value is not None else (None, None)
        return ScenarioError(message, line, col)


def _number(text, src: _Source) -> float:
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return float(text)
    try:
        p = parse_piece(str(text))
    except ExpressionError as exc:
        raise src.error(str(exc), text, exc.col or 0) from None
    if p.infinite:
        return p.infinite * math.inf
    if not p.expr.is_constant or not p.pre.is_identity:
        raise src.error(f"{text!r} is not a number", text)
    return p.expr.const


def _interval(text, src: _Source) -> tuple[float, float]:
    m = re.fullmatch(r"\s*[(\[](.*),(.*)[)\]]\s*", str(text))
    if not m:
        raise src.error(f"interval {text!r} should look like (a, b)", text)
    lo, hi = _number(m.group(1).strip(), src), _number(m.group(2).strip(), src)
    if not lo < hi:
        raise src.error(f"empty interval {text!r}", text)
    return lo, hi


def _piece(expr, src: _Source) -> Piece:
    if isinstance(expr, (int, float)) and not isinstance(expr, bool):
        return parse_piece(repr(float(expr)))
    if not isinstance(expr, str):
        raise src.error(f"expression must be a string, got {expr!r}")
    try:
        return parse_piece(expr)
    except ExpressionError as exc:
        raise src.error(str(exc), expr, exc.col or 0) from None


def _piecewise(spec, lo, hi, policy: str, src: _Source, name: str) -> PiecewiseFn:
    """A piecewise function from one expression or a list of {on, expr} tables."""
    if isinstance(spec, (str, int, float)):
        if lo is None:
            raise src.error(f"{name} needs an interval")
        return PiecewiseFn(lo, hi, (), (_piece(spec, src),), policy)
    if not isinstance(spec, list) or not spec:
        raise src.error(f"{name} must be an expression or a list of {{on, expr}} tables")
    parts = []
    for item in spec:
        if not isinstance(item, dict) or set(item) != {"on", "expr"}:
            raise src.error(f"each {name} piece needs exactly the keys 'on' and 'expr'")
        a, b = _interval(item["on"], src)
        parts.append((a, b, _piece(item["expr"], src)))
    try:
        fn = PiecewiseFn.from_pieces(parts, policy)
    except ValueError as exc:
        raise src.error(f"{name}: {exc}", spec[0]["on"]) from None
    if lo is not None and (fn.lo, fn.hi) != (lo, hi):
        raise src.error(f"{name} pieces cover ({fn.lo:g}, {fn.hi:g}), not the model interval",
                        spec[0]["on"])
    return fn


def _build_model(m: dict, src: _Source):
    kind = m.get("kind", "non-elliptic")
    if kind not in KINDS:
        raise src.error(f"unknown model kind {kind!r}; expected one of {', '.join(KINDS)}", kind)
    if kind == "hyperbolic-group":
        return HyperbolicGroup(_number(m.get("width", 1.0), src))
    if kind == "elliptic-group":
        return EllipticGroup(_number(m.get("theta", 1.0), src))
    if kind == "non-elliptic":
        lo = hi = None
        if "interval" in m:
            lo, hi = _interval(m["interval"], src)
        if "beta" not in m:
            raise src.error("non-elliptic model needs beta")
        return NonElliptic(LowerBoundary.of(_piecewise(m["beta"], lo, hi, "max", src, "beta")))
    if "rho" not in m:
        raise src.error(f"{kind} model needs rho")
    rho = RadialBoundary.of(_piecewise(m["rho"], 0.0, TWO_PI, "min", src, "rho"))
    if kind == "elliptic-starlike":
        return EllipticStarlike(rho)
    try:
        lam = complex(str(m.get("lam", "-1")).replace(" ", "").replace("i", "j"))
    except ValueError:
        raise src.error(f"lam {m.get('lam')!r} is not a complex number", m.get("lam")) from None
    return EllipticSpiral(lam, rho)


def _build_shear(c: dict, model, src: _Source):
    unknown = set(c) - {"u", "v", "reflect"}
    if unknown:
        raise src.error(f"unknown conjugation keys: {', '.join(sorted(unknown))}")
    if isinstance(model, HyperbolicGroup):
        lo, hi = 0.0, model.width
    elif isinstance(model, NonElliptic):
        lo, hi = model.lower.domain.lo, model.lower.domain.hi
    elif isinstance(model, (EllipticStarlike, EllipticSpiral)):
        U = _piecewise(c.get("u", "x"), 0.0, TWO_PI, "continuous", src, "u")
        v = _piecewise(c.get("v", 1.0), 0.0, TWO_PI, "continuous", src, "v")
        try:
            return EllipticShear(U, v)
        except (ValueError, ArithmeticError) as exc:
            raise src.error(f"conjugation: {exc}") from None
    else:
        raise src.error("rotation groups are classified by |theta|; no shear applies")
    u = _piecewise(c.get("u", "x"), lo, hi, "continuous", src, "u")
    v = _piecewise(c.get("v", 0.0), lo, hi, "continuous", src, "v")
    try:
        return ShearMap(u, v, bool(c.get("reflect", False)))
    except (ValueError, ArithmeticError) as exc:
        raise src.error(f"conjugation: {exc}") from None


def _tasks(items, src: _Source) -> list[Task]:
    if not isinstance(items, list) or not items:
        raise src.error("run.tasks must be a non-empty list")
    out = []
    for raw in items:
        parts = str(raw).split()
        if not parts or parts[0] not in TASKS:
            raise src.error(f"unknown task {raw!r}; expected one of {', '.join(TASKS)}", raw)
        if parts[0] == "reproduce":
            if len(parts) != 2 or parts[1] not in EXAMPLES:
                raise src.error(f"reproduce needs one of {', '.join(EXAMPLES)}", raw)
            out.append(Task("reproduce", parts[1]))
        elif len(parts) > 1:
            raise src.error(f"task {parts[0]!r} takes no argument", raw)
        else:
            out.append(Task(parts[0]))
    return out


def parse_scenario(text: str, name: str = "scenario") -> Scenario:
    src = _Source(text)
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"\(at line (\d+), column (\d+)\)", str(exc))
        msg = re.sub(r"\s*\(at line \d+, column \d+\)", "", str(exc))
        raise ScenarioError(msg, *(map(int, m.groups()) if m else (None, None))) from None
    unknown = set(data) - {"model", "conjugation", "run", "trace", "cluster", "output"}
    if unknown:
        raise ScenarioError(f"unknown sections: {', '.join(sorted(unknown))}")
    run = data.get("run", {})
    tasks = _tasks(run.get("tasks"), src)
    only_examples = all(t.name == "reproduce" for t in tasks)
    model = tau = None
    if "model" in data:
        model = _build_model(data["model"], src)
        try:
            check_model(model)
        except ModelError as exc:
            raise ScenarioError(f"invalid model: {exc}") from None
        if "conjugation" in data:
            tau = _build_shear(data["conjugation"], model, src)
            try:
                check_model(pushforward_model(model, tau))
            except (ModelError, ValueError, TypeError) as exc:
                raise ScenarioError(f"the sheared model is invalid: {exc}") from None
    elif not only_examples:
        raise ScenarioError("a [model] section is required for analysis tasks")
    for t in tasks:
        if t.name in NEEDS_SHEAR and tau is None:
            raise ScenarioError(f"task {t.name!r} needs a [conjugation] section")
        if t.name in NEEDS_MAP and isinstance(model, EllipticGroup):
            raise ScenarioError(f"task {t.name!r} needs a Riemann map; rotation groups have none")
        if t.name == "cluster" and isinstance(model, (EllipticStarlike, EllipticSpiral)):
            raise ScenarioError("cluster sets are sampled at the Denjoy-Wolff point of non-elliptic models")
    out = data.get("output", {})
    formats = tuple(out.get("formats", FORMATS))
    bad = [f for f in formats if f not in FORMATS]
    if bad:
        raise src.error(f"unknown output format {bad[0]!r}; expected {', '.join(FORMATS)}", bad[0])
    res = run.get("resolution")
    if res is not None and (not isinstance(res, int) or res < 4):
        raise ScenarioError("run.resolution must be an integer >= 4")
    tol = run.get("tolerance")
    if tol is not None and not (isinstance(tol, (int, float)) and tol > 0):
        raise ScenarioError("run.tolerance must be positive")
    sc = Scenario(name, model, tau, tasks, out.get("dir"), formats, res,
                  None if tol is None else float(tol), dict(data.get("trace", {})),
                  dict(data.get("cluster", {})))
    _check_trace(sc, src)
    return sc


def _check_trace(sc: Scenario, src: _Source):
    pts = sc.trace.get("points", [])
    for p in pts:
        if not isinstance(p, dict) or not {"c", "y"} <= set(p) or set(p) - {"c", "y", "side"}:
            raise src.error("trace points are tables {c, y, side}")
        if p.get("side") not in (None, "left", "right"):
            raise src.error(f"side must be 'left' or 'right', not {p['side']!r}", p.get("side"))
    for key in ("t_max", "dt"):
        if key in sc.trace and not sc.trace[key] > 0:
            raise ScenarioError(f"trace.{key} must be positive")
    ab = sc.cluster.get("abscissae")
    if ab is not None and sc.model is not None:
        I = _interval_of(sc.model)
        if not all(I[0] < float(a) < I[1] for a in ab):
            raise ScenarioError("cluster.abscissae must lie inside the model interval")


def _interval_of(model) -> tuple[float, float]:
    if isinstance(model, HyperbolicGroup):
        return 0.0, model.width
    d = model.lower.domain
    return d.lo, d.hi


def load_scenario(path) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read {p}: {exc.strerror}") from None
    return parse_scenario(text, p.stem)


def default_abscissae(model, n: int = 5) -> np.ndarray:
    lo, hi = _interval_of(model)
    if math.isfinite(lo) and math.isfinite(hi):
        return lo + (hi - lo) * np.arange(1, n + 1) / (n + 1)
    if math.isfinite(lo):
        return lo + np.arange(1, n + 1) / 2
    if math.isfinite(hi):
        return hi - np.arange(n, 0, -1) / 2
    return np.linspace(-2.0, 2.0, n)
