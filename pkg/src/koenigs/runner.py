"""Execute scenario tasks and write their artifacts.

Every CSV starts with a header row whose column names carry units in
brackets: [1] for dimensionless coordinates, [flow-time] for times, [-] for
labels.  Numbers are written with repr() so reruns give identical bytes.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import plots
from .boundary import BoundaryPoint, BoundaryPointClass, analyse, life_time
from .conformal import (DEFAULT_RESOLUTION, ConvergenceError, boundary_trajectory, build_map,
                        cluster_points, composed_map, disc_semigroup, locate)
from .conjugation import (EllipticShear, apply_shear, apply_tau0, compare_reports,
                          transport_boundary_report, verify_conjugacy)
from .model import EllipticSpiral, EllipticStarlike, HyperbolicGroup, classify_type
from .reproduction import reproduce
from .scenario import Scenario, default_abscissae

DEFAULT_TOLERANCE = 1e-3
MODEL_TOLERANCE = 1e-9


@dataclass
class TaskResult:
    task: str
    passed: bool
    artifacts: list = field(default_factory=list)
    data: dict = field(default_factory=dict)
    error: str | None = None
    numeric: bool = False          # failure caused by the numerics rather than the input


@dataclass
class RunResult:
    scenario: str
    settings: dict
    tasks: list

    @property
    def passed(self) -> bool:
        return all(t.passed for t in self.tasks)

    @property
    def exit_code(self) -> int:
        if any(t.error and not t.numeric for t in self.tasks):
            return 2
        return 0 if self.passed else 3

    def as_dict(self) -> dict:
        return {"scenario": self.scenario, "settings": self.settings, "passed": self.passed,
                "tasks": [{"task": t.task, "passed": t.passed, "artifacts": t.artifacts,
                           "data": t.data, "error": t.error} for t in self.tasks]}


# ------------------------------------------------------------------ output

def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "yes" if v else "no"
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])


def plain(v):
    """JSON-safe copy: infinities and NaN as strings, complex as [re, im]."""
    if isinstance(v, dict):
        return {str(k): plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [plain(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (complex, np.complexfloating)):
        return [plain(float(v.real)), plain(float(v.imag))]
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    return v


def write_report(path: Path, result: RunResult):
    text = json.dumps(plain(result.as_dict()), indent=2, sort_keys=True)
    path.write_text(text + "\n", encoding="utf-8")


def write_text_report(path: Path, fields: dict):
    lines = [f"{k}: {_cell(v)}" for k, v in fields.items()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------- labels

def initial_point(arc) -> str:
    """Class of the arc's initial point as a boundary point of the flow."""
    c = arc.initial_class
    if c is BoundaryPointClass.FIXED_SUPER_REPELLING:
        return (BoundaryPointClass.SR3 if arc.exceptional else BoundaryPointClass.SR2).value
    if c is BoundaryPointClass.FIXED_REGULAR:
        return BoundaryPointClass.REGULAR.value
    return c.value


def _fp_row(fp):
    w = fp.where
    return [w.kind, str(w), w.c, w.c2, fp.cls.value, fp.exceptional, fp.note]


FP_HEADER = ["feature [-]", "location [-]", "a [1]", "b [1]", "class [-]", "exceptional [-]", "note [-]"]


# ----------------------------------------------------------------- context

class Context:
    def __init__(self, sc: Scenario, out: Path, resolution: int | None, tolerance: float | None,
                 formats):
        self.sc = sc
        self.out = out
        self.resolution = resolution or sc.resolution or DEFAULT_RESOLUTION
        self.tolerance = tolerance or sc.tolerance or DEFAULT_TOLERANCE
        self.formats = set(formats)
        self._maps = {}

    def want(self, fmt: str) -> bool:
        return fmt in self.formats

    def rmap(self, which: str = "source"):
        if which not in self._maps:
            model = self.sc.model if which == "source" else self.sc.target
            self._maps[which] = build_map(model, self.resolution, tol=self.tolerance)
        return self._maps[which]

    def path(self, name: str) -> Path:
        return self.out / name


# ------------------------------------------------------------------ tasks

def task_classify(ctx: Context, res: TaskResult):
    model = ctx.sc.model
    rep = analyse(model)
    rows = [["type", classify_type(model).value, None, None, None, None, ""]]
    rows += [["component", c.kind, c.a, c.b, None, None, ""] for c in rep.components]
    rows += [_fp_row(fp) for fp in rep.fixed_points]
    if ctx.want("csv"):
        write_csv(ctx.path("classify.csv"), FP_HEADER, rows)
        res.artifacts.append("classify.csv")
    res.data = {"type": rep.model_type,
                "fixed_points": [[str(fp.where), fp.cls.value] for fp in rep.fixed_points]}


ARC_HEADER = ["c [1]", "d [1]", "R [1]", "side [-]", "exceptional [-]", "initial_class [-]",
              "initial_point [-]"]


def task_arcs(ctx: Context, res: TaskResult):
    arcs = analyse(ctx.sc.model).arcs
    rows = [[a.c, a.d, a.R, a.side, a.exceptional, a.initial_class.value, initial_point(a)] for a in arcs]
    if ctx.want("csv"):
        write_csv(ctx.path("arcs.csv"), ARC_HEADER, rows)
        res.artifacts.append("arcs.csv")
    res.data = {"arcs": len(arcs), "exceptional": sum(a.exceptional for a in arcs),
                "initial_points": [initial_point(a) for a in arcs]}


def _height_window(arc, span: float = 5.0, n: int = 51):
    lo = arc.d if math.isfinite(arc.d) else (arc.R - span if math.isfinite(arc.R) else -span)
    hi = arc.R if math.isfinite(arc.R) else lo + span
    return lo + (hi - lo) * np.arange(1, n + 1) / (n + 1)


def task_lifetimes(ctx: Context, res: TaskResult):
    arcs = analyse(ctx.sc.model).arcs
    rows, curves, worst = [], [], 0.0
    for k, arc in enumerate(arcs):
        ys = _height_window(arc)
        T = np.array([life_time(arc, y) for y in ys])
        rows += [[k, arc.c, y, t] for y, t in zip(ys, T)]
        if np.all(np.isfinite(T)):
            curves.append((f"arc {k}: c={arc.c:g}, R={arc.R:g}", ys, T))
            worst = max(worst, float(np.max(np.abs(T + ys - arc.R))))
    if ctx.want("csv"):
        write_csv(ctx.path("lifetimes.csv"), ["arc [-]", "c [1]", "y [1]", "T [flow-time]"], rows)
        res.artifacts.append("lifetimes.csv")
    if ctx.want("svg"):
        plots.lifetime_figure(curves, ctx.path("lifetimes.svg"))
        res.artifacts.append("lifetimes.svg")
    res.data = {"arcs": len(arcs), "finite_curves": len(curves), "max_T_plus_y_minus_R": worst}


def task_conjugate(ctx: Context, res: TaskResult):
    sc = ctx.sc
    src, dst = analyse(sc.model), analyse(sc.target)
    matched, mismatches, undetermined = set(), [], 0
    if not isinstance(sc.tau, EllipticShear):
        moved = transport_boundary_report(src, sc.tau)
        mismatches = compare_reports(moved, dst, tol=1e-12)
        undetermined = len(moved.undetermined)
        matched = {(f.cls, f.where.c, f.where.c2) for f in moved.fixed_points}
    rows = [_fp_row(fp)[:6] + [(fp.cls, fp.where.c, fp.where.c2) in matched] for fp in dst.fixed_points]
    rows += [["arc", f"c={a.c:g}", a.d, a.R, initial_point(a), a.exceptional, False] for a in dst.arcs]
    if ctx.want("csv"):
        write_csv(ctx.path("conjugate.csv"), FP_HEADER[:6] + ["transported [-]"], rows)
        res.artifacts.append("conjugate.csv")
    res.passed = not mismatches
    res.data = {"target_type": dst.model_type,
                "target_fixed_points": [[str(fp.where), fp.cls.value] for fp in dst.fixed_points],
                "mismatches": [[k[0].value, k[1], k[2]] for k in mismatches],
                "undetermined_by_transport": undetermined}


def _model_map(tau):
    if isinstance(tau, EllipticShear):
        return lambda w: apply_tau0(tau, w)
    return lambda w: apply_shear(tau, w)


def task_verify(ctx: Context, res: TaskResult):
    sc = ctx.sc
    rep = verify_conjugacy(sc.model, sc.target, sc.tau, tol=MODEL_TOLERANCE)
    fields = {"task": "verify", "scenario": sc.name,
              "equivariance_residual": rep.equivariance_residual, "set_residual": rep.set_residual,
              "model_tolerance": MODEL_TOLERANCE, "model_passed": rep.passed}
    h1, h2 = ctx.rmap("source"), ctx.rmap("target")
    f = composed_map(h1, h2, _model_map(sc.tau))
    rng = np.random.default_rng(0)
    z = 0.8 * np.sqrt(rng.uniform(0, 1, 64)) * np.exp(2j * np.pi * rng.uniform(0, 1, 64))
    worst = 0.0
    for t in (0.5, 1.0, 2.0):
        a = f(disc_semigroup(h1, z, t))
        b = disc_semigroup(h2, f(z), t)
        d = np.abs(a - b)
        worst = max(worst, float(np.max(d[np.isfinite(d)])) if np.isfinite(d).any() else math.inf)
    disc_ok = worst <= ctx.tolerance
    fields.update({"disc_equivariance_residual": worst, "disc_tolerance": ctx.tolerance,
                   "disc_passed": disc_ok, "resolution": ctx.resolution,
                   "source_map_residual": h1.residual, "target_map_residual": h2.residual})
    res.passed = rep.passed and disc_ok
    fields["passed"] = res.passed
    write_text_report(ctx.path("verify.txt"), fields)
    res.artifacts.append("verify.txt")
    res.data = {k: v for k, v in fields.items() if k not in ("task", "scenario")}


def _radial(model) -> bool:
    return isinstance(model, (EllipticStarlike, EllipticSpiral))


def _default_trace_points(model, rmap):
    fr = rmap.frame
    lo, hi = (-math.log(fr.ytop) + 0.05, 8.0) if _radial(model) else (fr.ybot + 0.5, fr.ytop - 0.5)
    out = []
    for arc in analyse(model).arcs:
        if math.isfinite(arc.R):
            y = max(arc.R - 1.0, 0.5 * (arc.d + arc.R) if math.isfinite(arc.d) else arc.R - 1.0)
        else:
            y = arc.d + 1.0 if math.isfinite(arc.d) else 0.0
        if lo < y < hi:
            out.append((BoundaryPoint.at(arc.c, y, arc.side), arc))
    return out


def _arc_on_disc(rmap, arc, radial: bool):
    fr = rmap.frame
    lo, hi = (-math.log(fr.ytop) + 0.01, 10.0) if radial else (fr.ybot + 0.05, fr.ytop - 0.05)
    a, b = max(arc.d, lo), min(arc.R, hi)
    if not a < b:
        return None
    a, b = a + 1e-3 * (b - a), b - 1e-3 * (b - a)
    try:
        tr = boundary_trajectory(rmap, BoundaryPoint.at(arc.c, a, arc.side), t_max=b - a, dt=(b - a) / 80)
    except (ArithmeticError, ValueError):
        return None
    return tr.z


def _disc_overlay(ctx: Context, rmap, title: str):
    """Disc figure with circle, arcs coloured by class and fixed points."""
    model = rmap.model if not isinstance(ctx.sc.model, HyperbolicGroup) else ctx.sc.model
    rep = analyse(ctx.sc.model)
    fig, ax = plots.disc_axes(title)
    seen = set()
    for arc in rep.arcs:
        z = _arc_on_disc(rmap, arc, _radial(model))
        if z is None:
            continue
        key = initial_point(arc) if not arc.exceptional else "exceptional"
        color = plots.CLASS_COLORS.get(key, "#555555")
        lab = f"arc ({key})" if key not in seen else None
        seen.add(key)
        plots.draw_curve(ax, z, lab, color, lw=3.0)
    for fp in rep.fixed_points:
        try:
            p = locate(rmap, fp.where)
        except (ArithmeticError, ValueError):
            continue
        plots.draw_points(ax, [p], fp.cls.value, plots.CLASS_COLORS.get(fp.cls.value), "D", 45)
    return fig, ax


TRACE_HEADER = ["point [-]", "t [flow-time]", "re [1]", "im [1]", "on_boundary [-]"]


def task_trace(ctx: Context, res: TaskResult):
    sc = ctx.sc
    rmap = ctx.rmap("source")
    t_max = float(sc.trace.get("t_max", 5.0))
    dt = float(sc.trace.get("dt", 1e-2))
    if "points" in sc.trace:
        arcs = analyse(sc.model).arcs
        pts = []
        for p in sc.trace["points"]:
            w = BoundaryPoint.at(float(p["c"]), float(p["y"]), p.get("side"))
            arc = next((a for a in arcs if a.c == w.c and a.contains(w.y)
                        and (w.side is None or a.side == w.side)), None)
            pts.append((w, arc))
    else:
        pts = _default_trace_points(sc.model, rmap)
    rows, checks, trajs = [], [], []
    for k, (w, arc) in enumerate(pts):
        tr = boundary_trajectory(rmap, w, t_max=t_max, dt=dt)
        trajs.append((str(w), tr))
        rows += [[str(w), t, z.real, z.imag, on] for t, z, on in zip(tr.t, tr.z, tr.on_boundary)]
        if arc is None:
            continue
        expect = arc.R - w.y if math.isfinite(arc.R) else math.inf
        if expect <= t_max - 2 * dt:
            ok = abs(tr.landing_time - expect) <= 2 * dt
        else:
            ok = tr.landing_time >= min(expect, t_max) - 2 * dt
        checks.append({"point": str(w), "landing_time": tr.landing_time, "expected": expect,
                       "window": 2 * dt, "passed": ok})
    if ctx.want("csv"):
        write_csv(ctx.path("trace.csv"), TRACE_HEADER, rows)
        res.artifacts.append("trace.csv")
    if ctx.want("svg"):
        fig, ax = _disc_overlay(ctx, rmap, "orbits of boundary points")
        for label, tr in trajs:
            plots.draw_curve(ax, tr.z, f"orbit of {label}", lw=1.0, ls="--")
            plots.draw_points(ax, tr.z[:1], None, "black", "o", 12)
        plots.finish(fig, ax, ctx.path("trace.svg"))
        res.artifacts.append("trace.svg")
    res.passed = all(c["passed"] for c in checks)
    res.data = {"points": len(pts), "landing_checks": checks, "t_max": t_max, "dt": dt,
                "map_residual": rmap.residual, "resolution": ctx.resolution}


def task_cluster(ctx: Context, res: TaskResult):
    sc = ctx.sc
    model = sc.model
    terms = int(sc.cluster.get("terms", 64))
    tail = int(sc.cluster.get("tail", 8))
    radius = float(sc.cluster.get("radius", 0.02))
    cs = np.asarray(sc.cluster.get("abscissae", default_abscissae(model)), dtype=float)
    lower = model.lower if not isinstance(model, HyperbolicGroup) else None
    which = "target" if sc.tau is not None else "source"
    h = ctx.rmap(which)
    move = _model_map(sc.tau) if sc.tau is not None else (lambda w: w)
    k = np.arange(1, terms + 1)
    curves, tails = [], []
    for c in cs:
        base = 0.0 if lower is None else max(0.0, float(lower.beta(c)))
        w = c + 1j * (base + 10 ** (k / 16))
        z = np.asarray(h.invert(move(w)), dtype=complex)
        curves.append((f"Re w = {c:g}", z))
        tails.append(z[-tail:])
    clusters = cluster_points(np.concatenate(tails), radius)
    dw = h.top_point
    if ctx.want("csv"):
        write_csv(ctx.path("clusters.csv"), ["center_re [1]", "center_im [1]", "size [-]",
                                             "spread [1]", "distance_to_dw [1]"],
                  [[cl.center.real, cl.center.imag, cl.size, cl.spread, abs(cl.center - dw)]
                   for cl in clusters])
        res.artifacts.append("clusters.csv")
    if ctx.want("svg"):
        fig, ax = plots.disc_axes("cluster values at the Denjoy-Wolff point")
        for label, z in curves:
            plots.draw_curve(ax, z, label, lw=1.0)
        plots.draw_points(ax, [cl.center for cl in clusters], "cluster values", "black", "x", 50)
        plots.draw_points(ax, [dw], "Denjoy-Wolff point", plots.CLASS_COLORS["denjoy-wolff"], "D", 45)
        plots.finish(fig, ax, ctx.path("clusters.svg"))
        res.artifacts.append("clusters.svg")
    res.data = {"clusters": [[cl.center, cl.size, cl.spread] for cl in clusters],
                "distinct": len(clusters), "radius": radius, "terms": terms, "tail": tail}


def task_reproduce(ctx: Context, res: TaskResult, example: str):
    rep = reproduce(example, ctx.resolution, ctx.tolerance)
    slug = f"reproduce-{example}"
    if ctx.want("csv"):
        write_csv(ctx.path(slug + ".csv"), ["check [-]", "value [1]", "relation [-]", "limit [1]", "passed [-]"],
                  [[c.name, float(c.value), c.relation, float(c.limit), c.passed] for c in rep.checks])
        res.artifacts.append(slug + ".csv")
    if ctx.want("svg"):
        plots.layers_figure(rep.layers, ctx.path(slug + ".svg"), example)
        res.artifacts.append(slug + ".svg")
    res.passed = rep.passed
    res.data = {"checks": [{"name": c.name, "value": c.value, "relation": c.relation, "limit": c.limit,
                            "passed": c.passed} for c in rep.checks], "facts": rep.facts}


RUNNERS = {"classify": task_classify, "arcs": task_arcs, "lifetimes": task_lifetimes,
           "conjugate": task_conjugate, "verify": task_verify, "trace": task_trace,
           "cluster": task_cluster}


def run_scenario(sc: Scenario, out, resolution=None, tolerance=None, formats=None) -> RunResult:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    ctx = Context(sc, out, resolution, tolerance, formats or sc.formats)
    results = []
    for task in sc.tasks:
        res = TaskResult(str(task), True)
        try:
            if task.name == "reproduce":
                task_reproduce(ctx, res, task.arg)
            else:
                RUNNERS[task.name](ctx, res)
        except ConvergenceError as exc:
            res.passed, res.error, res.numeric = False, str(exc), True
            res.data["residual"] = exc.residual
        except ArithmeticError as exc:
            res.passed, res.error, res.numeric = False, str(exc), True
        except (ValueError, TypeError) as exc:
            res.passed, res.error = False, str(exc)
        results.append(res)
    settings = {"resolution": ctx.resolution, "tolerance": ctx.tolerance,
                "model_tolerance": MODEL_TOLERANCE, "formats": sorted(ctx.formats)}
    result = RunResult(sc.name, settings, results)
    if "json-report" in ctx.formats:
        write_report(out / "report.json", result)
    return result
