# backend/tests/test_marked_groups.py
import pytest
from hypothesis import given, strategies as st

from workbench.marked_groups import (
    AgreementKind,
    AgreementRadius,
    FreeWord,
    ball_size,
    cyclic_group,
    finite_group,
    finite_group_from_permutations,
    free_ball,
    free_group,
    marked_distance,
    membership_window,
    radius_from_first_failure,
    symmetric_group,
    trivial_group,
    zd_group,
)
from workbench.shared.error_handler import FormatError, RankMismatch, ResourceCapExceeded

letters = st.sampled_from([1, -1, 2, -2])
words = st.lists(letters, max_size=8).map(FreeWord.reduce)


def test_ball_sizes():
    assert [ball_size(1, r) for r in range(4)] == [1, 3, 5, 7]
    assert [ball_size(2, r) for r in range(3)] == [1, 5, 17]
    assert len(free_ball(2, 2)) == 17


def test_ball_is_shortlex_ordered():
    assert [str(w) for w in free_ball(1, 2)] == ["e", "a", "A", "aa", "AA"]
    assert [str(w) for w in free_ball(2, 1)] == ["e", "a", "A", "b", "B"]
    ball = free_ball(2, 3)
    assert list(ball) == sorted(ball)


def test_ball_cap():
    with pytest.raises(ResourceCapExceeded):
        free_ball(2, 10, cap=100)


def test_parse_reduces():
    assert FreeWord.parse("aA") == FreeWord.identity()
    assert str(FreeWord.parse("abBa")) == "aa"
    assert str(FreeWord.parse("ab").inverse()) == "BA"
    assert str(FreeWord.identity()) == "e"
    with pytest.raises(FormatError):
        FreeWord.parse("a1")


@given(words, words, words)
def test_free_multiplication_is_associative(u, v, w):
    assert (u * v) * w == u * (v * w)


@given(words)
def test_inverse_cancels(w):
    assert w * w.inverse() == FreeWord.identity()
    assert w.inverse() * w == FreeWord.identity()


def test_marked_distance_cyclic():
    radius = marked_distance(cyclic_group(4), cyclic_group(6), 8)
    assert radius == AgreementRadius.exactly(3)
    assert str(radius) == "3"
    assert radius.as_distance() == 0.125


def test_marked_distance_to_free():
    assert marked_distance(cyclic_group(8), free_group(1), 8) == AgreementRadius.exactly(7)
    assert marked_distance(cyclic_group(2), trivial_group(), 8) == AgreementRadius.exactly(0)


def test_marked_distance_equal_groups():
    radius = marked_distance(cyclic_group(5), cyclic_group(5), 6)
    assert radius.kind == AgreementKind.AT_LEAST
    assert str(radius) == ">= 6"


def test_marked_distance_rank_mismatch():
    with pytest.raises(RankMismatch):
        marked_distance(cyclic_group(4), free_group(2), 3)


@given(st.integers(1, 12), st.integers(1, 12), st.integers(1, 12))
def test_marked_distance_is_ultrametric(a, b, c):
    ga, gb, gc = cyclic_group(a), cyclic_group(b), cyclic_group(c)
    ab = marked_distance(ga, gb, 12).radius
    bc = marked_distance(gb, gc, 12).radius
    ac = marked_distance(ga, gc, 12).radius
    assert ac >= min(ab, bc)


@pytest.mark.parametrize("group, radius, expected", [
    (cyclic_group(2), 2, ["e", "aa", "AA"]),
    (cyclic_group(4), 3, ["e"]),
    (cyclic_group(4), 4, ["e", "aaaa", "AAAA"]),
])
def test_membership_window(group, radius, expected):
    assert [str(w) for w in membership_window(group, radius)] == expected


def test_membership_window_of_trivial_group_is_the_ball():
    assert membership_window(trivial_group(2), 2) == free_ball(2, 2)
    assert len(membership_window(trivial_group(2), 2)) == 17


def test_radius_from_first_failure():
    assert radius_from_first_failure(None, 5) == AgreementRadius.at_least(5)
    assert radius_from_first_failure(0, 5) == AgreementRadius.none()
    assert radius_from_first_failure(3, 5) == AgreementRadius.exactly(2)
    assert str(AgreementRadius.none()) == "none"


def test_symmetric_group_lifts(s3):
    assert s3.order == 6
    for g in s3.elements():
        assert s3.evaluate(s3.lift(g)) == g


def test_zd_evaluation():
    assert zd_group(2).evaluate(FreeWord.parse("abA")) == (0, 1)
    assert zd_group(2).evaluate(FreeWord.parse("bB")) == (0, 0)


def test_finite_group_validation():
    with pytest.raises(FormatError):
        finite_group([[0, 1], [1, 1]], [1])
    z2 = finite_group([[0, 1], [1, 0]], [1])
    assert z2.evaluate(FreeWord.parse("aa")) == 0


@pytest.mark.parametrize("group, radius", [
    (cyclic_group(48), 4),
    (cyclic_group(6, rank=2), 4),
    (symmetric_group(3), 4),
    (symmetric_group(4), 4),
    (finite_group_from_permutations([[1, 0, 2, 3], [0, 1, 3, 2]]), 4),
], ids=str)
def test_oracle_is_a_homomorphism(group, radius):
    ball = free_ball(group.rank, radius)
    values = {w: group.evaluate(w) for w in ball}
    for u in ball:
        for v in ball:
            assert group.evaluate(u * v) == group.multiply(values[u], values[v])


GROUPS = st.sampled_from(
    [cyclic_group(n) for n in range(1, 13)] + [free_group(1), zd_group(1), trivial_group()]
)


@given(GROUPS, GROUPS, st.integers(0, 10))
def test_marked_distance_is_symmetric(g1, g2, rmax):
    assert marked_distance(g1, g2, rmax) == marked_distance(g2, g1, rmax)


@pytest.mark.parametrize("g1, g2, expected", [
    (cyclic_group(4), cyclic_group(6), AgreementRadius.exactly(3)),
    (cyclic_group(2), cyclic_group(3), AgreementRadius.exactly(1)),
    (cyclic_group(5), cyclic_group(5), AgreementRadius.at_least(8)),
])
def test_marked_distance_examples(g1, g2, expected):
    assert marked_distance(g1, g2, 8) == expected


def test_symmetric_group_limits():
    assert symmetric_group(4).order == 24
    for degree in (0, 1):
        with pytest.raises(FormatError):
            symmetric_group(degree)
    with pytest.raises(ResourceCapExceeded):
        symmetric_group(9)
    with pytest.raises(ResourceCapExceeded):
        symmetric_group(4, cap=23)


def test_permutation_closure_cap():
    with pytest.raises(ResourceCapExceeded):
        finite_group_from_permutations([[1, 0, 2, 3], [1, 2, 3, 0]], cap=10)
