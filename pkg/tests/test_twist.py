import math

import pytest

from tools.grp import DepthCap, enumerate_ball, evaluate
from tools.hypgeom import Isometry, Kind, axis, boundary_distance, classify
from tools.twist import (
    NoCrossingAtBase,
    NotSeparated,
    TwistCurve,
    TwistFamily,
    alpha_lift_endpoints,
    angle_sweep,
    boundary_extension,
    crossing_sign,
    dehn_twist_word,
    difference_sweep,
    extension_limit_gaps,
    is_tile_stabilizer,
    make_grid,
    separating_lift,
    separation_sweep,
    tile_recursion_check,
    translation_along,
    twist_rep,
)

ELL = 2.0 * math.acosh(1.5)


def endpoints_close(p, q, tol=1e-9):
    return all(boundary_distance(x, y) <= tol for x, y in zip(p, q))


def test_make_grid():
    assert make_grid(-1.0, 1.0, 0.5) == [-1.0, -0.5, 0.0, 0.5, 1.0]
    assert len(make_grid(-30.0, 30.0, 0.25)) == 241
    with pytest.raises(ValueError):
        make_grid(1.0, 0.0, 0.5)
    with pytest.raises(ValueError):
        make_grid(0.0, 1.0, 0.0)


def test_translation_along():
    g = Isometry.diag(2.0)
    assert translation_along(g, 0.0) == Isometry.identity()
    assert translation_along(g, 2.0 * math.log(2.0)).close_to(g, 1e-12)


def test_incidence_from_geometry(torus, schottky_rep):
    assert TwistCurve.for_rep(torus).incidence == (("b", 1),)
    assert TwistCurve.for_rep(schottky_rep).incidence == (("b", 0),)
    assert crossing_sign(axis(torus.image("a")), torus.image("B")) == -1


def test_curve_validation(torus):
    with pytest.raises(ValueError):
        TwistCurve("A")
    with pytest.raises(ValueError):
        TwistCurve("a", (("a", 1),))
    with pytest.raises(ValueError):
        TwistFamily(torus, TwistCurve("c", ()))


def test_twist_at_zero_is_base(family):
    assert twist_rep(family, 0.0) is family.base


def test_curve_trace_is_constant_and_b_grows(family):
    traces_a = [abs(evaluate(twist_rep(family, t), "a").trace) for t in (-10.0, 0.0, 10.0)]
    assert traces_a == pytest.approx([3.0, 3.0, 3.0])
    traces_b = [abs(evaluate(twist_rep(family, t), "b").trace) for t in (0.0, 5.0, 10.0, 20.0)]
    assert traces_b == sorted(traces_b)
    assert traces_b[-1] > 1e3
    assert abs(evaluate(twist_rep(family, -20.0), "b").trace) > 1e3


def test_twist_rep_records_time(family):
    rep = twist_rep(family, 1.5)
    assert rep.label == "modular_torus"
    assert dict(rep.params)["t"] == 1.5


def test_full_twist_is_dehn_twist(family):
    rep = twist_rep(family, ELL)
    for w in ("b", "B", "ab", "Bab", "abAB"):
        image = evaluate(family.base, dehn_twist_word(w, family.curve))
        assert evaluate(rep, w).close_to(image, 1e-9)


def test_dehn_twist_word(family):
    assert dehn_twist_word("b", family.curve) == "ab"
    assert dehn_twist_word("B", family.curve) == "BA"
    assert dehn_twist_word("Bab", family.curve) == "Bab"
    assert dehn_twist_word("b", family.curve, n=-2) == "AAb"


@pytest.mark.parametrize("word, stable", [("a", True), ("b", False), ("Bab", True), ("baB", False), ("bAB", False)])
def test_tile_stabilizer(family, word, stable):
    assert is_tile_stabilizer(family, word) is stable


def test_tile_stabilizer_is_twist_invariant(family):
    base = boundary_extension(family, "Bab", 0.0)
    for t in (-3.0, 2.0, 7.5):
        assert endpoints_close(boundary_extension(family, "Bab", t), base, 1e-8)


@pytest.mark.parametrize("word", ["b", "B", "ab", "Bab", "aab", "bbaBA"])
@pytest.mark.parametrize("t", [-2.0, 0.7, 3.0])
def test_tile_recursion_matches_extension(family, word, t):
    assert endpoints_close(tile_recursion_check(family, word, t), boundary_extension(family, word, t))


@pytest.mark.parametrize(
    "ts",
    [(-1.0, 1.0), pytest.param((-5.0, 5.0), marks=pytest.mark.slow)],
)
def test_tile_recursion_over_ball(family, ts):
    for t in ts:
        rep = twist_rep(family, t)
        for w in enumerate_ball(6).words[1:]:
            if classify(evaluate(rep, w)) is not Kind.HYPERBOLIC:
                continue
            assert endpoints_close(tile_recursion_check(family, w, t), boundary_extension(family, w, t)), (w, t)


def test_tile_recursion_limits(family, torus):
    with pytest.raises(DepthCap):
        tile_recursion_check(family, "abababa", 1.0)
    wrong = TwistFamily(torus, TwistCurve("a", (("b", -1),)))
    with pytest.raises(ValueError):
        tile_recursion_check(wrong, "b", 1.0)


def test_extension_converges_to_curve_lifts(family):
    gaps = extension_limit_gaps(family, "b", [10.0, 20.0, 30.0])
    assert gaps == sorted(gaps, reverse=True)
    assert gaps[-1] < 1e-6
    assert len(alpha_lift_endpoints(family, 1)) >= 4


def test_in_frame(family):
    framed = family.in_frame()
    assert boundary_distance(framed.curve_axis.repelling, 0.0) < 1e-12
    assert boundary_distance(framed.curve_axis.attracting, math.inf) < 1e-12


def test_full_range_sweep(family):
    report = angle_sweep(family, ("a", "b"), make_grid(-30.0, 30.0, 0.25))
    assert report.full_range_pass
    assert report.angles[0] < 0.1
    assert report.angles[-1] > math.pi - 0.1
    assert report.tail_monotone
    assert not report.vanished_at
    assert all(0.0 < a < math.pi for a in report.angles)
    assert report.bound_2_ok


def test_full_range_is_directional(torus):
    reversed_family = TwistFamily(torus, TwistCurve("a", (("b", -1),)))
    report = angle_sweep(reversed_family, ("a", "b"), make_grid(-30.0, 30.0, 0.25))
    assert report.angles[0] > math.pi - 0.1
    assert report.angles[-1] < 0.1
    assert not report.full_range_pass


def test_shifted_pair_is_delayed_copy(family):
    first = angle_sweep(family, ("a", "b"), [ELL, 2.0])
    second = angle_sweep(family, ("a", "ab"), [0.0, 2.0 - ELL])
    assert second.angles == pytest.approx(first.angles, abs=1e-9)


@pytest.mark.parametrize("pair", [("b", "ab"), ("b", "aB"), ("ab", "aB")])
def test_generic_sweep(family, pair):
    report = angle_sweep(family, pair, make_grid(-20.0, 20.0, 0.5))
    assert report.delta > 0.0
    assert report.generic_pass
    assert not report.full_range_pass
    assert report.delta_bound > 0.0
    assert report.delta_ratio == pytest.approx(report.delta / report.delta_bound)
    assert report.delta_ratio > 1.0
    assert report.to_dict()["delta_ratio"] == report.delta_ratio


def test_sweep_needs_crossing(schottky_rep):
    fam = TwistFamily.for_rep(schottky_rep)
    with pytest.raises(NoCrossingAtBase):
        angle_sweep(fam, ("a", "b"), [0.0, 1.0])


def test_sweep_rejects_empty_grid(family):
    with pytest.raises(ValueError):
        angle_sweep(family, ("a", "b"), [])


def test_separation_sweep(family):
    assert separating_lift(family, "Bab", "baB") == ""
    distances = separation_sweep(family, "Bab", "baB", [0.0, 5.0, 10.0, 20.0])
    assert distances[0] == pytest.approx(3.4265, abs=1e-3)
    assert distances == sorted(distances)
    assert distances[3] - distances[2] == pytest.approx(10.0, abs=1e-3)


def test_separation_needs_separated_axes(family):
    with pytest.raises(NotSeparated):
        separation_sweep(family, "a", "b", [0.0])


def test_difference_sweep_distinct_points(family):
    report = difference_sweep(family, ("a", "b"), ("a", "ab"), make_grid(-10.0, 10.0, 0.5))
    assert report.same_point is False
    assert report.varies
    assert not report.vanished_at


def test_difference_sweep_same_point(family):
    report = difference_sweep(family, ("a", "ab"), ("a", "aB"), make_grid(-10.0, 10.0, 0.5))
    assert report.same_point is True
    assert report.varies


def test_sweeps_are_worker_independent(family):
    grid = make_grid(-5.0, 5.0, 0.5)
    serial = angle_sweep(family, ("a", "b"), grid, workers=1)
    pooled = angle_sweep(family, ("a", "b"), grid, workers=2)
    assert serial == pooled


@pytest.mark.parametrize("s, t", [(1.5, 2.0), (-3.0, 0.75), (ELL, -ELL)])
def test_twist_flow_composes(family, s, t):
    direct = twist_rep(family, s + t)
    stepped = twist_rep(family.rebased(s), t)
    assert family.rebased(s).curve == family.curve
    for w in ("a", "b", "ab", "aB", "Bab"):
        assert evaluate(stepped, w).close_to(evaluate(direct, w), 1e-9)
