import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from corpus import P, lower_model, random_model, random_shear
from koenigs.boundary import BoundaryPointClass, analyse
from koenigs.conjugation import (apply_shear, apply_tau0, compare_reports, compose_shears,
                                 elliptic_group_conjugacy, invert_shear, normalize_to_strip, pushforward_model,
                                 rotation_shear, shear, transport_boundary_report, verify_conjugacy)
from koenigs.model import HyperbolicGroup, Interval, starlike_model, strip_model

K = BoundaryPointClass
INF = math.inf


def test_shear_flattens_the_reciprocal_cusp():
    m = lower_model([(0, 1, "-1/x")])
    tau = shear("x", "1/x", 0, 1)
    target = pushforward_model(m, tau)
    assert target.lower.beta.end_limits() == (0.0, 0.0)
    arcs = analyse(target).arcs
    assert [(a.c, a.exceptional, a.initial_class) for a in arcs] == [
        (0.0, True, K.CONTACT_NOT_FIXED), (1.0, True, K.CONTACT_NOT_FIXED)]
    assert verify_conjugacy(m, target, tau).passed


def test_shear_by_two_over_x_removes_every_fixed_point_but_the_top():
    m = lower_model([(0, 1, "-1/x")])
    target = pushforward_model(m, shear("x", "2/x", 0, 1))
    assert [fp.cls for fp in analyse(target).fixed_points] == [K.DENJOY_WOLFF]


def test_wrong_target_fails_verification():
    m = lower_model([(0, 1, "0")])
    other = lower_model([(0, 1, "1")])
    assert not verify_conjugacy(m, other, shear("x", 0.0, 0, 1)).passed


@pytest.mark.parametrize("u, v, why", [
    ("-x", 0.0, "increasing"),
    ("x", "1/(x - 0.5)", "finite"),
])
def test_invalid_shears(u, v, why):
    with pytest.raises(ValueError, match=why):
        shear(u, v, 0, 1)


def test_jumping_v_is_rejected():
    with pytest.raises(ValueError, match="jumps"):
        shear(P([(0, 1, "x")]), P([(0, 0.5, "0"), (0.5, 1, "1")]), reflect=False)


@given(seed=st.integers(0, 2**32 - 1))
def test_shear_round_trip(seed):
    rng = np.random.default_rng(seed)
    m = random_model(rng)
    tau = random_shear(rng, m.lower.beta.lo, m.lower.beta.hi)
    I = m.lower.domain
    lo = I.lo if math.isfinite(I.lo) else (I.hi - 5 if math.isfinite(I.hi) else -5)
    hi = I.hi if math.isfinite(I.hi) else lo + 10
    x = rng.uniform(lo, hi, 30)
    x = x[(x > I.lo) & (x < I.hi)]
    w = x + 1j * rng.uniform(-5, 5, x.size)
    back = invert_shear(tau, apply_shear(tau, w))
    assert np.allclose(back, w, rtol=1e-9, atol=1e-9)


@given(seed=st.integers(0, 2**32 - 1))
def test_composition_matches_sequential_application(seed):
    rng = np.random.default_rng(seed)
    lo, hi = 0.0, 1.0
    inner = random_shear(rng, lo, hi)
    t = inner.target
    outer = random_shear(rng, t.lo, t.hi)
    both = compose_shears(outer, inner)
    w = rng.uniform(0.01, 0.99, 25) + 1j * rng.uniform(-3, 3, 25)
    assert np.allclose(apply_shear(both, w), apply_shear(outer, apply_shear(inner, w)), rtol=1e-9, atol=1e-9)


@given(seed=st.integers(0, 2**32 - 1))
def test_pushforward_is_conjugate(seed):
    rng = np.random.default_rng(seed)
    m = random_model(rng)
    tau = random_shear(rng, m.lower.beta.lo, m.lower.beta.hi)
    rep = verify_conjugacy(m, pushforward_model(m, tau), tau, samples=64, tol=1e-9)
    assert rep.passed, rep


@given(seed=st.integers(0, 2**32 - 1))
def test_transport_agrees_with_recomputation(seed):
    rng = np.random.default_rng(seed)
    m = random_model(rng)
    tau = random_shear(rng, m.lower.beta.lo, m.lower.beta.hi)
    moved = transport_boundary_report(analyse(m), tau, m)
    assert compare_reports(moved, analyse(pushforward_model(m, tau))) == []


@pytest.mark.parametrize("lo, hi", [(0, 3), (0, INF), (-INF, 2), (-INF, INF)])
def test_every_interval_normalizes_to_the_unit_strip(lo, hi):
    m = strip_model(lo, hi, P([(lo, hi, "0")]))
    tau, n = normalize_to_strip(m)
    assert n.lower.domain == Interval(0.0, 1.0)
    assert verify_conjugacy(m, n, tau).passed


def test_half_line_chart_is_x_over_one_plus_x():
    tau, _ = normalize_to_strip(strip_model(0, INF, 0.0))
    x = np.array([0.5, 1.0, 7.0])
    assert np.allclose(tau.u(x), x / (1 + x), rtol=1e-15)


def test_group_normalizes_to_the_full_strip():
    tau, n = normalize_to_strip(HyperbolicGroup(2.0))
    assert [fp.cls for fp in analyse(n).fixed_points] == [K.DENJOY_WOLFF, K.REGULAR]


def test_elliptic_shear_commutes_with_the_radial_flow():
    tau = rotation_shear(0.3, 2.0)
    z = np.array([0.2 + 0.1j, -0.4j, 0.7])
    for t in (0.5, 1.0, 3.0):
        assert np.allclose(apply_tau0(tau, np.exp(-t) * z), np.exp(-t) * apply_tau0(tau, z), rtol=1e-14)


def test_elliptic_pushforward_scales_and_rotates():
    rho = P([(0, math.pi, "1"), (math.pi, 2 * math.pi, "2")], "min")
    m = starlike_model(rho)
    tau = rotation_shear(0.5, 3.0)
    target = pushforward_model(m, tau)
    assert target.radial(1.0) == pytest.approx(3.0)
    assert target.radial(math.pi + 1.0) == pytest.approx(6.0)
    assert verify_conjugacy(m, target, tau).passed


def test_rotation_groups_conjugate_by_modulus():
    assert elliptic_group_conjugacy(0.5, -0.5)
    assert not elliptic_group_conjugacy(0.5, 0.6)
