"""Numerical reproductions of the classic counterexamples about boundary behaviour of conjugacies.

Each example builds the Riemann maps it needs, pushes sequences through the
conjugating homeomorphism f = h2^{-1} o tau o h1 and checks the one numerical
fact that makes the example interesting.  Sequences are generated in the
model plane: for w_n = h1(z_n) one has f(z_n) = h2^{-1}(tau(w_n)) exactly, so
only the target map is ever evaluated near the boundary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .boundary import BoundaryPoint, BoundaryPointClass, analyse
from .conformal import (DEFAULT_RESOLUTION, build_map, cluster_points, cluster_set, locate,
                        strip_map_oracle_inverse)
from .conjugation import apply_shear, pushforward_model, shear, transport_boundary_report
from .model import strip_model

EXAMPLES = ("dw-no-limit", "brfp-no-limit", "exceptional-collapse", "omega-limit",
            "elliptic-group-no-extension")


@dataclass
class Check:
    name: str
    value: float
    limit: float
    relation: str        # "<" or ">" or ">="

    @property
    def passed(self) -> bool:
        v, lim = self.value, self.limit
        if self.relation == "<":
            return v < lim
        if self.relation == ">":
            return v > lim
        return v >= lim


@dataclass
class Layer:
    """Points to draw on the disc: a polyline (``curve``) or scattered markers."""
    label: str
    points: np.ndarray
    style: str = "marker"


@dataclass
class Reproduction:
    example: str
    checks: list = field(default_factory=list)
    facts: dict = field(default_factory=dict)
    layers: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _c(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def dw_no_limit(resolution: int = DEFAULT_RESOLUTION, tol: float = 1e-3) -> Reproduction:
    """Q = {y > 1/x} over (0,1), sheared by v = -1/x onto the half-strip {y > 0}."""
    src = strip_model(0.0, 1.0, "1/x")
    tau = shear("x", "-1/x", 0.0, 1.0)
    dst = pushforward_model(src, tau)
    h1, h2 = build_map(src, resolution, tol=tol), build_map(dst, resolution, tol=tol)
    p, q = h1.top_point, h2.top_point
    f_model = lambda w: h2.invert(apply_shear(tau, w))  # noqa: E731

    # z_n = h1^{-1}(1/n + (1+n)i) -> p while f(z_n) = h2^{-1}(1/n + i)
    n_disc = [n for n in range(1, 40) if 1 + n < h1.frame.ytop]
    zn = h1.invert(np.array([1 / n + (1 + n) * 1j for n in n_disc]))
    # K grows geometrically: the images 1/K + i only approach the wall like 1/K
    tangential = lambda k: 1 / 10 ** (k / 16) + (1 + 10 ** (k / 16)) * 1j  # noqa: E731
    vertical = lambda k: 0.5 + (2 + k / 8) * 1j  # noqa: E731
    clusters = cluster_set(f_model, [tangential, vertical], n=64, tail=8, radius=0.02)
    target = locate(h2, BoundaryPoint.at(0.0, 1.0, "right"))
    sep = min((abs(a.center - b.center) for i, a in enumerate(clusters) for b in clusters[i + 1:]),
              default=0.0)
    near_target = min(abs(c.center - target) for c in clusters)
    near_q = min(abs(c.center - q) for c in clusters)
    rep = Reproduction("dw-no-limit")
    rep.checks = [
        Check("distinct cluster values", len(clusters), 2, ">="),
        Check("cluster separation", sep, 0.1, ">"),
        Check("distance of a cluster to h2^-1(i)", near_target, 1e-2, "<"),
        Check("distance of a cluster to q", near_q, 1e-2, "<"),
        Check("|z_n - p| at the last in-window n", float(abs(zn[-1] - p)), 1e-2, "<"),
    ]
    rep.facts = {"p": _c(p), "q": _c(q), "h2_inv_i": _c(target),
                 "clusters": [_c(c.center) for c in clusters],
                 "z_n_distance_to_p": [float(abs(z - p)) for z in zn]}
    ks = np.arange(1, 65)
    rep.layers = [Layer("z_n -> p", zn, "curve"),
                  Layer("f(z_n) = h2^-1(1/n + i)", f_model(np.array([tangential(k) for k in ks])), "curve"),
                  Layer("f along Re w = 1/2", f_model(np.array([vertical(k) for k in ks])), "curve"),
                  Layer("p (source DW)", np.array([p])), Layer("q (target DW)", np.array([q]))]
    return rep


def brfp_no_limit(resolution: int = DEFAULT_RESOLUTION, tol: float = 1e-3) -> Reproduction:
    """Hyperbolic group on the strip, tau = x + i(y + 1/x): f has no limit at the fixed point -1."""
    S = strip_model(0.0, 1.0, -math.inf)
    tau = shear("x", "1/x", 0.0, 1.0)
    h = build_map(S, resolution, tol=tol)
    f_model = lambda w: h.invert(apply_shear(tau, w))  # noqa: E731
    bottom = locate(h, BoundaryPoint.bottom(0.0, 1.0))
    # radial approach: Re w = 1/2, Im w -> -inf; tau(w) = 1/2 + i(Im w + 2)
    depth = h.frame.ybot + 2.0
    s_rad = np.linspace(0.0, -depth + 2.0 - 0.1, 40)
    rad = f_model(0.5 - 1j * s_rad)
    # tangential approach: gamma(s) = (1 - s) + i/(s - 1), tau(gamma(s)) = 1 - s
    s_tan = 1 - np.logspace(-1, -6, 40)
    gam = (1 - s_tan) + 1j / (s_tan - 1)
    tan = f_model(gam)
    h_inv0 = locate(h, BoundaryPoint.at(0.0, 0.0, "right"))
    rep = Reproduction("brfp-no-limit")
    rep.checks = [
        Check("radial limit vs -1", float(abs(rad[-1] - (-1))), 1e-3, "<"),
        Check("tangential limit vs h^-1(0)", float(abs(tan[-1] - h_inv0)), 1e-3, "<"),
        Check("h^-1(0) vs closed form i", float(abs(h_inv0 - 1j)), 1e-3, "<"),
        Check("radial vs tangential limit", float(abs(rad[-1] - tan[-1])), 0.1, ">"),
    ]
    rep.facts = {"radial_limit": _c(rad[-1]), "tangential_limit": _c(tan[-1]),
                 "bottom_end": _c(bottom), "h_inv_0": _c(h_inv0)}
    rep.layers = [Layer("h^-1(gamma(s)) -> -1", strip_map_oracle_inverse(gam), "curve"),
                  Layer("f along gamma", tan, "curve"),
                  Layer("f along Re w = 1/2", rad, "curve"),
                  Layer("-1", np.array([-1.0 + 0j])), Layer("h^-1(0)", np.array([h_inv0]))]
    return rep


def _collapse_curve(depth, s):
    return 1 / (depth + s) - 1j * depth


def exceptional_collapse(resolution: int = DEFAULT_RESOLUTION, tol: float = 1e-3) -> Reproduction:
    """Source {y > -1/x}; v = 2/x kills the third-type point, v = 1/x turns it into a contact point."""
    src = strip_model(0.0, 1.0, "-1/x")
    src_rep = analyse(src)
    rep = Reproduction("exceptional-collapse")
    rep.facts["source_fixed_points"] = [(str(fp.where), fp.cls.value) for fp in src_rep.fixed_points]
    heights = (0.25, 0.5, 1.0)
    for label, v in (("2/x", "2/x"), ("1/x", "1/x")):
        tau = shear("x", v, 0.0, 1.0)
        dst = pushforward_model(src, tau)
        direct = analyse(dst)
        moved = transport_boundary_report(src_rep, tau)
        h = build_map(dst, resolution, tol=tol)
        q = h.top_point
        f_model = lambda w, tau=tau, h=h: h.invert(apply_shear(tau, w))  # noqa: E731
        # curves x = 1/(|y| + s), y -> -inf run into the third-type point of the source;
        # |y| grows geometrically because the target approach is only O(1/|y|)
        seqs = [lambda k, s=s: _collapse_curve(10 ** (k / 10), s) for s in heights]
        clusters = cluster_set(f_model, seqs, n=40, tail=6, radius=0.02)
        others = [fp for fp in direct.fixed_points if fp.cls is not BoundaryPointClass.DENJOY_WOLFF]
        ex_arcs = [a for a in direct.arcs if a.exceptional]
        far = [c for c in clusters if abs(c.center - q) > 0.1]
        rep.facts[f"v={label}"] = {
            "target_fixed_points": [(str(fp.where), fp.cls.value) for fp in direct.fixed_points],
            "target_exceptional_arcs": [(a.c, a.d, a.initial_class.value) for a in ex_arcs],
            "undetermined_by_transport": len(moved.undetermined),
            "clusters": [_c(c.center) for c in clusters], "q": _c(q)}
        if label == "2/x":
            rep.checks += [
                Check("v=2/x: fixed points besides DW", len(others), 1, "<"),
                Check("v=2/x: max cluster distance to DW", max(abs(c.center - q) for c in clusters), 1e-2, "<"),
            ]
        else:
            cnf = [a for a in ex_arcs if a.initial_class is BoundaryPointClass.CONTACT_NOT_FIXED]
            on_arc = [locate(h, BoundaryPoint.at(0.0, s, "right")) for s in heights]
            miss = max(min(abs(c.center - z) for c in clusters) for z in on_arc)
            rep.checks += [
                Check("v=1/x: fixed points besides DW", len(others), 1, "<"),
                Check("v=1/x: exceptional arcs with contact-not-fixed start", len(cnf), 1, ">="),
                Check("v=1/x: clusters away from DW", len(far), len(heights), ">="),
                Check("v=1/x: clusters on the target arc (max miss)", miss, 1e-2, "<"),
            ]
        ys = 10 ** (np.arange(1, 41) / 10)
        for s in heights:
            rep.layers.append(Layer(f"v={label}, s={s:g}", f_model(_collapse_curve(ys, s)), "curve"))
        rep.layers.append(Layer(f"DW v={label}", np.array([q])))
    return rep


def omega_limit(resolution: int = DEFAULT_RESOLUTION, tol: float = 1e-3) -> Reproduction:
    """Half-strip sheared by v = -1/x: the exceptional arc at Re w = 0 collapses to one point."""
    src = strip_model(0.0, 1.0, 0.0)
    tau = shear("x", "-1/x", 0.0, 1.0)
    dst = pushforward_model(src, tau)
    h2 = build_map(dst, resolution, tol=tol)
    f_model = lambda w: h2.invert(apply_shear(tau, w))  # noqa: E731
    x0 = locate(h2, BoundaryPoint.bottom(0.0, 0.0, "right"))
    q = h2.top_point
    # approach the points it (t > 0) of the source arc horizontally, staying inside the window
    ts = (0.5, 1.0, 2.0, 4.0)
    floor = h2.frame.ybot + 0.5
    tails = []
    for t in ts:
        eps = 1 / (t - floor - np.linspace(3.0, 0.0, 12))
        tails.append(f_model(eps + 1j * t))
    last = np.array([tl[-1] for tl in tails])
    # approaching the source DW point along x = eps, y = 1/eps + s lands on the target arc at height s
    arc_pts = np.array([f_model(1e-4 + 1j * (1e4 + s)) for s in (0.5, 1.0, 2.0)])
    arc_ref = np.array([locate(h2, BoundaryPoint.at(0.0, s, "right")) for s in (0.5, 1.0, 2.0)])
    rep = Reproduction("omega-limit")
    rep.checks = [
        Check("arc images: max distance to x0", float(np.max(np.abs(last - x0))), 1e-3, "<"),
        Check("x0 vs target DW", float(abs(x0 - q)), 0.1, ">"),
        Check("DW approach lands on the target arc (max miss)", float(np.max(np.abs(arc_pts - arc_ref))),
              1e-2, "<"),
    ]
    rep.facts = {"x0": _c(x0), "q": _c(q), "arc_images": [_c(z) for z in last],
                 "dw_approach": [_c(z) for z in arc_pts]}
    rep.layers = [Layer(f"f(eps + {t:g}i)", tl, "curve") for t, tl in zip(ts, tails)]
    rep.layers += [Layer("x0", np.array([x0])), Layer("q", np.array([q])),
                   Layer("limits along DW approach", arc_pts)]
    return rep


def spiral_twist(z):
    """z exp(i ln(1 - |z|)): commutes with every rotation, extends to no boundary point."""
    z = np.asarray(z, dtype=complex)
    return z * np.exp(1j * np.log1p(-np.abs(z)))


def elliptic_group_no_extension(resolution: int = DEFAULT_RESOLUTION, tol: float = 1e-3,
                                seed: int = 0) -> Reproduction:
    rng = np.random.default_rng(seed)
    z = np.sqrt(rng.uniform(0, 1, 1000)) * np.exp(1j * rng.uniform(0, 2 * np.pi, 1000))
    t = rng.uniform(-10, 10, 1000)
    rot = np.exp(1j * t)
    res = np.abs(spiral_twist(rot * z) - rot * spiral_twist(z))
    # one rounding in |e^{it} z| is amplified by 1/(1 - |z|) through the logarithm
    cond = np.finfo(float).eps * (1 + np.abs(z) / (1 - np.abs(z)))
    comm = float(np.max(res))
    comm_ulps = float(np.max(res / cond))
    alpha = 0.7
    phases = (0.0, 2 * np.pi / 3, 4 * np.pi / 3)
    # radii 1 - exp(-(phase + 2 pi k)) on the radius at angle alpha
    seqs = [lambda k, ph=ph: (1 - math.exp(-(ph + 2 * math.pi * k))) * np.exp(1j * alpha) for ph in phases]
    clusters = cluster_set(spiral_twist, seqs, n=5, tail=3, radius=0.05)
    r = 1 - np.logspace(-0.5, -12, 400)
    rep = Reproduction("elliptic-group-no-extension")
    rep.checks = [
        Check("rotation commutation residual in conditioned ulps", comm_ulps, 16.0, "<"),
        Check("distinct cluster values on one radius", len(clusters), 3, ">="),
    ]
    rep.facts = {"commutation_residual": comm, "commutation_ulps": comm_ulps, "clusters": [_c(c.center) for c in clusters]}
    rep.layers = [Layer("f along the radius", spiral_twist(r * np.exp(1j * alpha)), "curve"),
                  Layer("cluster values", np.array([c.center for c in clusters]))]
    return rep


_RUNNERS = {
    "dw-no-limit": dw_no_limit,
    "brfp-no-limit": brfp_no_limit,
    "exceptional-collapse": exceptional_collapse,
    "omega-limit": omega_limit,
    "elliptic-group-no-extension": elliptic_group_no_extension,
}


def reproduce(example: str, resolution: int = DEFAULT_RESOLUTION, tol: float = 1e-3) -> Reproduction:
    if example not in _RUNNERS:
        raise KeyError(f"unknown example {example!r}; choose from {', '.join(EXAMPLES)}")
    return _RUNNERS[example](resolution=resolution, tol=tol)


__all__ = ["EXAMPLES", "Check", "Layer", "Reproduction", "reproduce", "spiral_twist", "cluster_points"]
