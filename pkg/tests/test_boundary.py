import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from corpus import P, lower_model, random_model
from koenigs.boundary import (BoundaryPoint, BoundaryPointClass, analyse, classify_fixed_points, detect_contact_arcs,
                              exceptional_closure_membership, life_time, radial_components, strip_components)
from koenigs.model import HyperbolicGroup, starlike_model

K = BoundaryPointClass
INF = math.inf


def classes(model):
    return sorted(fp.cls.value for fp in classify_fixed_points(model))


def test_cusp_at_a_wall_starts_an_exceptional_arc():
    m = lower_model([(0, 1, "-1/x")])
    arcs = detect_contact_arcs(m)
    assert [(a.c, a.d, a.R, a.side, a.exceptional) for a in arcs] == [
        (0.0, -INF, INF, "right", True), (1.0, -1.0, INF, "left", True)]
    assert arcs[0].initial_class is K.FIXED_SUPER_REPELLING
    assert arcs[1].initial_class is K.CONTACT_NOT_FIXED
    assert classes(m) == ["denjoy-wolff", "super-repelling-3"]


def test_half_line_cusp():
    m = lower_model([(0, INF, "-1/x")])
    arcs = detect_contact_arcs(m)
    assert len(arcs) == 1 and arcs[0].exceptional and arcs[0].d == -INF
    assert classes(m) == ["denjoy-wolff", "super-repelling-3"]


def test_strip_hole_gives_regular_point_and_two_arcs():
    m = lower_model([(0, 0.4, "0"), (0.4, 0.6, "-inf"), (0.6, 1, "0")])
    comps = strip_components(m.lower)
    assert [(c.a, c.b, c.kind) for c in comps] == [(0.4, 0.6, "strip")]
    inner = [a for a in detect_contact_arcs(m) if not a.exceptional]
    assert [(a.c, a.side, a.d, a.R) for a in inner] == [(0.4, "right", -INF, 0.0), (0.6, "left", -INF, 0.0)]
    assert all(a.initial_class is K.FIXED_REGULAR for a in inner)
    assert "regular-bfp" in classes(m)


def test_two_sided_cusp_is_a_line_component():
    m = lower_model([(0, 0.5, "1/(x - 0.5)"), (0.5, 1, "-1/(x - 0.5)")])
    comps = strip_components(m.lower)
    assert len(comps) == 1 and comps[0].degenerate and comps[0].kind == "line"
    assert "super-repelling-1" in classes(m)


def test_one_sided_cusp_inside_is_second_type():
    m = lower_model([(0, 0.5, "0"), (0.5, 1, "-1/(x - 0.5)")])
    fps = [fp for fp in classify_fixed_points(m) if fp.cls is K.SR2]
    assert len(fps) == 1 and fps[0].where.c == 0.5 and fps[0].where.side == "right"


def test_jump_gives_contact_not_fixed_arc_with_exact_life_time():
    m = lower_model([(0, 0.5, "0"), (0.5, 1, "1")])
    arc = next(a for a in detect_contact_arcs(m) if not a.exceptional)
    assert (arc.c, arc.d, arc.R, arc.side) == (0.5, 0.0, 1.0, "left")
    assert arc.initial_class is K.CONTACT_NOT_FIXED
    assert life_time(arc, 0.25) == 0.75
    with pytest.raises(ValueError):
        life_time(arc, 1.5)


def test_unbounded_component_is_plain():
    m = lower_model([(-INF, 0, "-inf"), (0, INF, "0")])
    fp = next(f for f in classify_fixed_points(m) if f.cls is K.PLAIN)
    assert fp.exceptional
    assert strip_components(m.lower)[0].kind == "half-plane"


def test_group_reports():
    rep = analyse(HyperbolicGroup(2.0))
    assert rep.model_type == "hyperbolic-group"
    assert sorted(fp.cls.value for fp in rep.fixed_points) == ["denjoy-wolff", "regular-bfp"]
    assert all(a.exceptional for a in rep.arcs)


def test_radial_sector_and_arcs():
    rho = P([(0, 1, "1"), (1, 2, "inf"), (2, 2 * math.pi, "2")], "min")
    m = starlike_model(rho)
    comps = radial_components(m.radial)
    assert [(c.a, c.b, c.kind) for c in comps] == [(1.0, 2.0, "sector")]
    arcs = detect_contact_arcs(m)
    seam = next(a for a in arcs if a.c == 0.0)
    # heights are -ln r: radius 2 below the seam, 1 above it
    assert seam.d == pytest.approx(-math.log(2)) and seam.R == 0.0
    assert "regular-bfp" in classes(m)


def test_exceptional_closure():
    m = lower_model([(0, 1, "-1/x")])
    assert exceptional_closure_membership(m, BoundaryPoint.top())
    assert exceptional_closure_membership(m, BoundaryPoint.bottom(0.0))
    assert exceptional_closure_membership(m, BoundaryPoint.at(1.0, 0.0, "left"))
    assert not exceptional_closure_membership(m, BoundaryPoint.at(1.0, -2.0, "left"))


@given(seed=st.integers(0, 2**32 - 1))
def test_arcs_are_ordered_and_well_formed(seed):
    m = random_model(np.random.default_rng(seed))
    arcs = detect_contact_arcs(m)
    assert [a.c for a in arcs] == sorted(a.c for a in arcs)
    for a in arcs:
        assert a.d < a.R
        assert a.exceptional == (a.c in (m.lower.domain.lo, m.lower.domain.hi))
        assert (a.initial_class is K.CONTACT_NOT_FIXED) == (a.d > -INF)


@given(seed=st.integers(0, 2**32 - 1))
def test_components_are_disjoint_closed_intervals(seed):
    m = random_model(np.random.default_rng(seed))
    comps = strip_components(m.lower)
    for c1, c2 in zip(comps, comps[1:]):
        assert c1.a <= c1.b < c2.a <= c2.b


@given(seed=st.integers(0, 2**32 - 1))
def test_every_fixed_point_bottom_is_classified_once(seed):
    m = random_model(np.random.default_rng(seed))
    fps = classify_fixed_points(m)
    assert sum(fp.cls is K.DENJOY_WOLFF for fp in fps) == 1
    keys = [(fp.where.kind, fp.where.c, fp.where.c2, fp.where.side) for fp in fps]
    assert len(keys) == len(set(keys))
