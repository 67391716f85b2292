import math

import pytest

from tools.grp import (
    INDEX_TWO_WORDS,
    ConjClass,
    DepthCap,
    UnknownPreset,
    ball_size,
    canonical_class,
    conjugacy_classes,
    cyclic_reduce,
    enumerate_ball,
    evaluate,
    evaluate_ball,
    inverse,
    is_primitive,
    is_reduced,
    letter_exponent,
    parse_preset,
    perturbed_torus,
    preset,
    reduce_word,
    subgroup_rep,
)
from tools.hypgeom import Isometry, Kind, axis, classify, commutator_trace, crossing


def test_word_helpers():
    assert inverse("aB") == "bA"
    assert reduce_word("abBA") == ""
    assert reduce_word("aabBc") == "aac"
    assert is_reduced("abAB")
    assert not is_reduced("aAb")
    assert cyclic_reduce("bAabaB") == "ba"
    assert cyclic_reduce("baB") == "a"
    assert letter_exponent("aabA", "a") == 1


@pytest.mark.parametrize("depth, size", [(1, 5), (2, 17), (3, 53), (8, 13121)])
def test_ball_sizes(depth, size):
    assert ball_size(depth) == size
    assert len(enumerate_ball(depth)) == size


def test_ball_is_shortlex_and_reduced():
    words = enumerate_ball(2).words
    assert words[:5] == ("", "a", "A", "b", "B")
    assert words[5:8] == ("aa", "ab", "aB")
    assert all(is_reduced(w) for w in words)
    assert len(set(words)) == len(words)


def test_ball_cap():
    with pytest.raises(DepthCap):
        enumerate_ball(13)
    with pytest.raises(ValueError):
        enumerate_ball(0)


def test_oriented_classes():
    assert [c.word for c in conjugacy_classes(1, oriented=True)] == ["a", "A", "b", "B"]
    assert len(conjugacy_classes(2, oriented=True)) == 12


def test_unoriented_classes_at_depth_two():
    # a^-1 b ~ (b^-1 a)^-1 ~ a b^-1 and a^-1 b^-1 ~ (b a)^-1 ~ a b.
    assert [c.word for c in conjugacy_classes(2)] == ["a", "b", "aa", "ab", "aB", "bb"]


def test_canonical_class():
    assert canonical_class("ba") == "ab"
    assert canonical_class("BA", oriented=True) == "AB"
    assert canonical_class("BA", oriented=False) == "ab"
    assert canonical_class("bAab") == "bb"
    assert ConjClass.of("Ab").word == "aB"
    with pytest.raises(ValueError):
        ConjClass("ba")


@pytest.mark.parametrize("word, primitive", [("a", True), ("aa", False), ("abab", False), ("aab", True)])
def test_is_primitive(word, primitive):
    assert is_primitive(ConjClass(word, oriented=True)) is primitive


def test_evaluate(torus):
    assert evaluate(torus, "") == Isometry.identity()
    assert evaluate(torus, "a").entries == (1.0, 1.0, 1.0, 2.0)
    assert evaluate(torus, "ab").entries == (0.0, 1.0, -1.0, 3.0)
    assert evaluate(torus, "aA").is_identity()


def test_evaluate_ball_matches_evaluate(torus):
    ball = enumerate_ball(3)
    images = evaluate_ball(torus, ball.words)
    for w in ball.words:
        assert images[w] == evaluate(torus, w)


def test_modular_torus_commutator_is_parabolic(torus):
    assert classify(evaluate(torus, "abAB")) is Kind.PARABOLIC
    assert torus.jorgensen == pytest.approx(9.0)
    assert torus.jorgensen_ok


def test_schottky_axes_are_disjoint(schottky_rep):
    a, b = axis(schottky_rep.image("a")), axis(schottky_rep.image("b"))
    assert crossing(a, b) is None
    assert dict(schottky_rep.params) == {"lam": 2.0, "mu": 2.0, "offset": 3.0}


def test_perturbed_torus_traces():
    rep = perturbed_torus(0.2)
    assert abs(evaluate(rep, "a").trace) == pytest.approx(3.0 + 0.2 * math.sqrt(2.0))
    assert abs(evaluate(rep, "b").trace) == pytest.approx(3.0 + 0.2 * math.sqrt(3.0))
    assert abs(evaluate(rep, "ab").trace) == pytest.approx(3.0 + 0.2 * math.sqrt(5.0))
    x, y, z = (3.0 + 0.2 * math.sqrt(k) for k in (2.0, 3.0, 5.0))
    fricke = x * x + y * y + z * z - x * y * z - 2.0
    assert commutator_trace(rep.image("a"), rep.image("b")) == pytest.approx(fricke)
    assert fricke < -2.0


def test_perturbed_torus_keeps_the_curve_axis(torus):
    rep = perturbed_torus(0.3)
    assert axis(rep.image("a")).close_to(axis(torus.image("a")), 1e-9)


def test_unperturbed_torus_is_modular():
    rep = perturbed_torus(0.0)
    for w in ("a", "b", "ab"):
        assert abs(evaluate(rep, w).trace) == pytest.approx(3.0)
    with pytest.raises(ValueError):
        perturbed_torus(-0.1)


def test_conjugate(torus):
    g = evaluate(torus, "b")
    conj = torus.conjugate(g)
    assert conj.image("a").close_to(evaluate(torus, "baB"), 1e-12)
    assert conj.label == "modular_torus^g"


def test_subgroup_rep(torus):
    sub = subgroup_rep(torus, INDEX_TWO_WORDS)
    assert sub.rank == 3
    assert sub.names == ("a", "b", "c")
    assert sub.image("c").close_to(evaluate(torus, "abA"), 1e-12)


def test_parse_preset():
    assert parse_preset("modular_torus") == ("modular_torus", ())
    assert parse_preset("schottky(1, 2.5, 3)") == ("schottky", (1.0, 2.5, 3.0))
    with pytest.raises(UnknownPreset):
        parse_preset("perturbed_torus(x)")


def test_preset():
    assert preset("perturbed_torus(0.2)").params == (("s", 0.2),)
    assert preset("schottky", 1.0, 1.0, 2.0).label == "schottky"
    with pytest.raises(UnknownPreset):
        preset("genus_two")
    with pytest.raises(UnknownPreset):
        preset("modular_torus(1)")
