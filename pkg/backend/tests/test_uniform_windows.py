# backend/tests/test_uniform_windows.py
import pytest
from hypothesis import given, settings, strategies as st

from workbench.marked_groups import AgreementRadius, cyclic_group, symmetric_group
from workbench.uniform_windows import (
    ExplicitFamily,
    ImageFamily,
    WindowPattern,
    WindowSet,
    agreement_relation,
    all_patterns,
    compose_relations,
    hb_agreement_radius,
    hb_union_property_check,
    invariance_check,
    pushforward_window,
    restriction_map,
    window_entourage_check,
)
from workbench.shift_space import FixFamily, fix_window, full_shift, generator_shift_maps, periodic_family
from workbench.ca_engine import eca, window_map
from workbench.shared.error_handler import ModulusMismatch, RadiusMismatch, RankMismatch

HB_TRIALS = 10_000
FULL = {r: all_patterns(1, 2, r).ordered() for r in range(5)}
FULL_R1 = FULL[1]


def window_subsets(radius: int):
    return st.sets(st.integers(0, len(FULL[radius]) - 1)).map(
        lambda idx: WindowSet.of(1, radius, (FULL[radius][i] for i in idx))
    )


radii = st.integers(1, 3)


def test_all_patterns_count():
    assert len(all_patterns(1, 2, 1)) == 8
    assert len(all_patterns(2, 2, 1)) == 32


def test_pattern_needs_ball_size():
    with pytest.raises(RadiusMismatch):
        WindowPattern(1, 1, (0, 1))


def test_restrict_is_prefix():
    p = WindowPattern(1, 2, (0, 1, 1, 0, 1))
    assert p.restrict(1).labels == (0, 1, 1)
    assert p.restrict(0).labels == (0,)


def test_entourage_check():
    full = all_patterns(1, 2, 1)
    assert window_entourage_check(full, all_patterns(1, 2, 1))
    assert not window_entourage_check(full, WindowSet.of(1, 1, FULL_R1[:3]))
    with pytest.raises(RankMismatch):
        window_entourage_check(full, all_patterns(2, 2, 1))


@pytest.mark.parametrize("radius, agree", [(1, True), (2, False)])
def test_entourage_check_on_fix_windows(radius, agree):
    z4, z6 = cyclic_group(4), cyclic_group(6)
    assert window_entourage_check(fix_window(z4, 2, radius), fix_window(z6, 2, radius)) is agree


@pytest.mark.slow
@settings(max_examples=HB_TRIALS)
@given(radii.flatmap(lambda r: st.tuples(*[window_subsets(r)] * 4)), st.booleans(), st.booleans())
def test_union_preserves_entourages(sets, same_y, same_z):
    y1, y2, z1, z2 = sets
    y2 = y1 if same_y else y2
    z2 = z1 if same_z else z2
    assert hb_union_property_check(y1, y2, z1, z2)


@pytest.mark.slow
@settings(max_examples=HB_TRIALS)
@given(radii.flatmap(lambda r: st.tuples(*[window_subsets(r)] * 3)), st.booleans(), st.booleans())
def test_window_limits_are_unique(sets, f_near_h, g_near_h):
    # F, G 가 모두 H 와 rmax 까지 일치하면 F 와 G 도 일치
    f, g, h = sets
    f = h if f_near_h else f
    g = h if g_near_h else g
    rmax = h.radius
    families = [ExplicitFamily([s]) for s in (f, g, h)]
    limit = AgreementRadius.at_least(rmax)
    if hb_agreement_radius(families[0], families[2], rmax) == limit and \
            hb_agreement_radius(families[1], families[2], rmax) == limit:
        assert hb_agreement_radius(families[0], families[1], rmax) == limit
        assert f == g


@pytest.mark.slow
@settings(max_examples=HB_TRIALS)
@given(radii.flatmap(window_subsets))
def test_pushforward_shrinks_radius_by_modulus(y):
    r = y.radius
    lifted = WindowSet.of(1, r + 1, (p for p in FULL[r + 1] if p.restrict(r) in y))
    image = pushforward_window(lifted, restriction_map(1, 1))
    assert image.radius == r
    assert image == y


def test_pushforward_by_restriction():
    full = all_patterns(1, 2, 2)
    image = pushforward_window(full, restriction_map(1, 1))
    assert image.radius == 1
    assert image == all_patterns(1, 2, 1)
    with pytest.raises(ModulusMismatch):
        pushforward_window(all_patterns(1, 2, 0), restriction_map(1, 1))
    assert len(pushforward_window(WindowSet.of(1, 2, ()), restriction_map(1, 1))) == 0


def test_pushforward_of_rule_90_on_period_two():
    # 주기 2 에서 x(g-1) = x(g+1) 이므로 출력은 항상 0
    image = pushforward_window(fix_window(cyclic_group(2), 2, 2), window_map(eca(90)))
    assert image.radius == 1
    assert [p.labels for p in image.ordered()] == [(0, 0, 0)]
    assert periodic_family(2, 2).window(2) == fix_window(cyclic_group(2), 2, 2)


def test_image_family_matches_pushforward():
    family = ImageFamily(FixFamily(cyclic_group(2), 2), window_map(eca(90)))
    assert family.name == "eca 90(Fix(cyclic:2))"
    assert family.window(1) == pushforward_window(fix_window(cyclic_group(2), 2, 2), window_map(eca(90)))
    zero = ExplicitFamily([WindowSet.of(1, 3, [WindowPattern(1, 3, (0,) * 7)])])
    assert hb_agreement_radius(family, zero, 3) == AgreementRadius.at_least(3)


def test_fix_agreement_radius():
    z8 = FixFamily(cyclic_group(8), 2)
    assert hb_agreement_radius(z8, full_shift(1, 2), 8) == AgreementRadius.exactly(3)
    z4, z6 = FixFamily(cyclic_group(4), 2), FixFamily(cyclic_group(6), 2)
    assert hb_agreement_radius(z4, z6, 8) == AgreementRadius.exactly(1)


def test_signature_and_explicit_windows_agree():
    group = cyclic_group(4)
    explicit = ExplicitFamily([fix_window(group, 2, r) for r in range(4)])
    assert hb_agreement_radius(FixFamily(group, 2), explicit, 3) == AgreementRadius.at_least(3)


def test_explicit_family_restricts_from_larger_radius():
    family = ExplicitFamily({2: all_patterns(1, 2, 2)})
    assert family.window(1) == all_patterns(1, 2, 1)


def test_full_shift_is_shift_invariant():
    result = invariance_check(full_shift(1, 2), generator_shift_maps(1), 2)
    assert result.holds
    assert result.violations == ()


@pytest.mark.parametrize("group", [cyclic_group(n) for n in (2, 3, 4, 6)] + [symmetric_group(3)], ids=str)
def test_fix_windows_are_shift_invariant(group):
    result = invariance_check(FixFamily(group, 2), generator_shift_maps(group.rank), 3)
    assert result.holds


def test_non_invariant_family_is_reported():
    # 가운데만 1 인 pattern 하나는 shift 로 닫혀 있지 않음
    lonely = WindowPattern.from_function(1, 2, lambda w: 1 if len(w) == 0 else 0)
    family = ExplicitFamily([WindowSet.of(1, 2, [lonely])])
    result = invariance_check(family, generator_shift_maps(1), 1)
    assert not result.holds
    assert (1, "shift-a") in result.violations


def test_agreement_relation_is_transitive():
    v1 = agreement_relation(1, 2, 1, 2)
    assert len(v1) == 8 * 16
    assert compose_relations(v1, v1) == v1
