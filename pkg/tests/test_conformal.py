import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from corpus import P, lower_model
from koenigs.boundary import BoundaryPoint, detect_contact_arcs
from koenigs.conformal import (ConvergenceError, boundary_trajectory, build_map, cluster_points, cluster_set,
                               composed_map, disc_semigroup, generator_at, locate, strip_map_oracle,
                               strip_map_oracle_inverse)
from koenigs.model import HyperbolicGroup, membership, starlike_model, strip_model

INF = math.inf

MODELS = {
    "half-strip": strip_model(0, 1, 0.0),
    "reciprocal-cusp": lower_model([(0, 1, "-1/x")]),
    "reciprocal-pole": lower_model([(0, 1, "1/x")]),
    "step": lower_model([(0, 0.5, "0"), (0.5, 1, "1")]),
    "hole": lower_model([(0, 0.4, "0"), (0.4, 0.6, "-inf"), (0.6, 1, "0")]),
    "quadrant": strip_model(0, INF, 0.0),
    "half-plane": strip_model(0, INF, -INF),
    "plane-cut": lower_model([(-INF, 0, "-inf"), (0, INF, "0")]),
    "half-line-cusp": lower_model([(0, INF, "-1/x")]),
    "disc": starlike_model(1.0),
    "two-radii": starlike_model(P([(0, math.pi, "1"), (math.pi, 2 * math.pi, "2")], "min")),
}

_CACHE = {}


def rmap(name):
    if name not in _CACHE:
        _CACHE[name] = build_map(MODELS[name])
    return _CACHE[name]


def disc_points(n=40, rmax=0.9, seed=0):
    rng = np.random.default_rng(seed)
    return np.sqrt(rng.uniform(0, rmax**2, n)) * np.exp(1j * rng.uniform(0, 2 * np.pi, n))


def test_strip_oracle_pair():
    z = disc_points()
    assert np.allclose(strip_map_oracle_inverse(strip_map_oracle(z)), z, atol=1e-13)


@pytest.mark.parametrize("name", sorted(MODELS))
def test_boundary_lands_on_the_circle(name):
    h = rmap(name)
    assert h.residual <= 1e-3


@pytest.mark.parametrize("name", sorted(MODELS))
def test_interior_round_trip_and_image(name):
    h = rmap(name)
    z = disc_points()
    w = h.eval(z)
    assert all(membership(h.model, complex(v)) == "interior" for v in w)
    assert np.max(np.abs(h.invert(w) - z)) <= 1e-6


@pytest.mark.parametrize("name", ["half-strip", "step", "two-radii"])
def test_normalization_at_the_origin(name):
    h = rmap(name)
    w0, d0 = h.eval(0.0, derivative=True)
    assert abs(w0 - h.anchor) <= 1e-9
    assert abs(d0 / abs(d0) - h.direction / abs(h.direction)) <= 1e-9


def test_strip_semigroup_against_closed_form():
    h = build_map(HyperbolicGroup(1.0))
    z = disc_points(rmax=0.8)
    for t in (0.3, 1.0):
        exact = strip_map_oracle_inverse(strip_map_oracle(z) + 1j * t)
        assert np.max(np.abs(disc_semigroup(h, z, t) - exact)) <= 1e-6


@given(s=st.floats(0.0, 1.5), t=st.floats(0.0, 1.5))
def test_semigroup_law(s, t):
    h = rmap("step")
    z = disc_points(8, 0.7)
    both = disc_semigroup(h, disc_semigroup(h, z, t), s)
    assert np.max(np.abs(both - disc_semigroup(h, z, s + t))) <= 1e-6


@pytest.mark.parametrize("name", ["step", "two-radii"])
def test_generator_is_the_time_derivative(name):
    h = rmap(name)
    z = disc_points(10, 0.6)
    eps = 1e-6
    fd = (disc_semigroup(h, z, eps) - z) / eps
    assert np.max(np.abs(fd - generator_at(h, z))) <= 1e-4 * (1 + np.max(np.abs(fd)))


def test_starlike_disc_flow_is_a_contraction():
    h = rmap("disc")
    z = disc_points()
    assert np.max(np.abs(disc_semigroup(h, z, 0.7) - np.exp(-0.7) * z)) <= 1e-6


def test_orbits_approach_the_top_point():
    h = rmap("step")
    z = disc_points(5, 0.5)
    far = disc_semigroup(h, z, 40.0)
    assert np.max(np.abs(far - h.top_point)) <= 1e-6
    assert locate(h, BoundaryPoint.top()) == h.top_point


def test_negative_time_is_rejected():
    with pytest.raises(ValueError):
        disc_semigroup(rmap("step"), 0.1, -1.0)


def test_group_wall_orbit_never_leaves_the_circle():
    h = build_map(HyperbolicGroup(1.0))
    tr = boundary_trajectory(h, BoundaryPoint.at(0.0, 0.0, "right"), t_max=2.0, dt=0.05)
    assert math.isinf(tr.landing_time)
    assert np.max(np.abs(np.abs(tr.z) - 1)) <= 1e-6


def test_landing_on_a_jump_arc():
    h = rmap("step")
    arc = next(a for a in detect_contact_arcs(MODELS["step"]) if not a.exceptional)
    tr = boundary_trajectory(h, BoundaryPoint.at(arc.c, 0.4, arc.side), t_max=1.5, dt=0.01)
    assert abs(tr.landing_time - 0.6) <= 0.02
    assert tr.on_boundary[0] and not tr.on_boundary[-1]


def test_located_boundary_points_lie_on_the_circle():
    h = rmap("hole")
    for where in (BoundaryPoint.bottom(0.4, 0.6), BoundaryPoint.at(0.4, -1.0, "right"),
                  BoundaryPoint.at(0.0, 1.0, "right")):
        assert abs(abs(locate(h, where)) - 1) <= 1e-6


def test_crowded_channel_points_are_refused():
    h = rmap("hole")
    with pytest.raises(ArithmeticError, match="crowded"):
        locate(h, BoundaryPoint.at(0.4, -4.0, "right"))
    tr = boundary_trajectory(h, BoundaryPoint.at(0.4, -4.0, "right"), t_max=4.0, dt=0.5)
    assert np.isnan(tr.z[0]) and tr.on_boundary[0]
    assert np.all(np.isfinite(tr.z[-3:])) and math.isinf(tr.landing_time)


def test_impossible_tolerance_is_a_convergence_error():
    with pytest.raises(ConvergenceError):
        build_map(MODELS["step"], resolution=8, tol=1e-12)


def test_resolution_must_be_an_integer_of_at_least_four():
    with pytest.raises(ValueError):
        build_map(MODELS["step"], resolution=2)


def test_refinement_reduces_the_residual():
    coarse = build_map(MODELS["step"], resolution=50)
    fine = build_map(MODELS["step"], resolution=200)
    assert fine.residual < coarse.residual


def test_cluster_points_single_linkage():
    pts = np.array([0.0, 0.01, 0.02, 1.0, 1.005, np.nan])
    cl = cluster_points(pts, 0.05)
    assert [c.size for c in cl] == [3, 2]
    assert cl[0].center == pytest.approx(0.01)
    assert cluster_points([], 0.1) == []


def test_cluster_set_keeps_only_tails():
    seqs = [lambda k: 1.0 / k, lambda k: 1.0 + 1.0 / k]
    cl = cluster_set(lambda z: z, seqs, n=64, tail=8, radius=0.05)
    assert len(cl) == 2 and all(c.size == 8 for c in cl)


def test_composed_map_of_identity_is_identity():
    h = rmap("step")
    f = composed_map(h, h, lambda w: w)
    z = disc_points(10, 0.8)
    assert np.max(np.abs(f(z) - z)) <= 1e-6
