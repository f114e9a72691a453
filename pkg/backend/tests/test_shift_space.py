# backend/tests/test_shift_space.py
import pytest
from hypothesis import given, strategies as st

from workbench.marked_groups import FreeWord, cyclic_group, free_ball, free_group, symmetric_group, trivial_group
from workbench.uniform_windows import WindowPattern, all_patterns
from workbench.shift_space import (
    FiniteConfiguration,
    FixFamily,
    PeriodicConfiguration,
    all_configurations,
    fix_window,
    full_shift,
    parse_symbols,
    periodic_family,
    rho_star,
    rho_star_inverse,
    separating_shift,
    shift_act,
    shift_window,
)
from workbench.shared.error_handler import (
    FormatError,
    InsufficientRadius,
    NotCosetConstant,
    ResourceCapExceeded,
    WindowTooSmall,
)


def s3_configurations():
    group = symmetric_group(3)
    return st.tuples(*[st.integers(0, 2)] * 6).map(lambda v: FiniteConfiguration(group, v))


def test_parse_symbols():
    assert parse_symbols("0,0,0,1") == (0, 0, 0, 1)
    assert parse_symbols("1, 0") == (1, 0)
    for bad in ("", "0,x", "-1"):
        with pytest.raises(FormatError):
            parse_symbols(bad)


def test_periodic_canonical_form():
    assert PeriodicConfiguration((0, 1, 0, 1)).canonical() == PeriodicConfiguration((0, 1))
    assert PeriodicConfiguration((0, 0, 1)).canonical().period == 3
    x = PeriodicConfiguration.parse("1,2,3")
    assert x(-1) == 3
    assert x.shifted(1).values == (2, 3, 1)


def test_shift_act_on_cyclic():
    x = PeriodicConfiguration((1, 0, 0, 0))
    assert shift_act(1, x).values == (0, 1, 0, 0)
    assert shift_act(FreeWord.parse("A"), x).values == (0, 0, 0, 1)


@given(s3_configurations(), st.integers(0, 5), st.integers(0, 5))
def test_shift_action_is_a_left_action(x, g, h):
    group = x.group
    assert shift_act(g, shift_act(h, x)) == shift_act(group.multiply(g, h), x)


@given(s3_configurations(), s3_configurations())
def test_expansivity_at_identity(x, y):
    g = separating_shift(x, y)
    if x == y:
        assert g is None
    else:
        assert shift_act(x.group.inverse(g), x)(0) != shift_act(x.group.inverse(g), y)(0)


def test_all_configurations_cap(z4):
    assert len(list(all_configurations(z4, 2))) == 16
    with pytest.raises(ResourceCapExceeded):
        list(all_configurations(cyclic_group(20), 2, cap=1000))


def test_shift_window():
    p = WindowPattern(1, 2, (0, 1, 2, 3, 4))
    assert shift_window(p, FreeWord.parse("a")).labels == (2, 0, 4)
    with pytest.raises(InsufficientRadius):
        shift_window(WindowPattern(1, 0, (1,)), FreeWord.parse("a"))


def test_fix_window_counts(z4):
    assert len(fix_window(z4, 2, 1)) == 8
    assert len(fix_window(z4, 2, 2)) == 16
    assert len(fix_window(cyclic_group(1), 3, 2)) == 3
    assert FixFamily(z4, 2).cardinality(2) == 16
    assert full_shift(1, 2).cardinality(3) == 2 ** 7


def test_fix_window_patterns_are_coset_constant(z4):
    for p in fix_window(z4, 2, 2):
        labels = dict((str(w), s) for w, s in p.items())
        assert labels["aa"] == labels["AA"]


def test_periodic_family_windows():
    family = periodic_family(3, 2)
    assert len(family.window(1)) == 8
    assert len(family.window(2)) == 8
    assert len(family.members()) == 8


@given(s3_configurations())
def test_rho_star_round_trip(x):
    group = x.group
    pattern = rho_star(group, x).window(2)
    assert rho_star_inverse(group, pattern) == x


def test_rho_star_inverse_errors(z4):
    with pytest.raises(WindowTooSmall):
        rho_star_inverse(z4, WindowPattern(1, 0, (0,)))
    with pytest.raises(NotCosetConstant):
        rho_star_inverse(z4, WindowPattern(1, 2, (0, 0, 0, 1, 0)))


@pytest.mark.parametrize("group", [cyclic_group(n) for n in range(1, 9)] + [symmetric_group(3)], ids=str)
def test_rho_star_is_equivariant(group):
    ball = free_ball(group.rank, 3)
    for y in all_configurations(group, 2):
        pulled = rho_star(group, y)
        for g in group.elements():
            shifted = rho_star(group, shift_act(g, y))
            lift_inverse = group.lift(g).inverse()
            assert all(shifted(w) == pulled(lift_inverse * w) for w in ball)


@pytest.mark.parametrize("group, radius, count", [
    (cyclic_group(2), 2, 4),
    (cyclic_group(4), 2, 16),
    (trivial_group(), 3, 2),
    (free_group(1), 2, 32),
])
def test_fix_window_examples(group, radius, count):
    assert len(fix_window(group, 2, radius)) == count


def test_fix_window_of_free_group_is_everything():
    assert fix_window(free_group(1), 2, 2) == all_patterns(1, 2, 2)


def test_rho_star_examples(z4):
    pulled = rho_star(z4, FiniteConfiguration(z4, (0, 0, 0, 1)))
    ones = [str(w) for w in free_ball(1, 4) if pulled(w) == 1]
    assert ones == ["A", "aaa"]
    trivial = trivial_group()
    assert set(rho_star(trivial, FiniteConfiguration(trivial, (1,))).window(2).labels) == {1}
