# backend/workbench/uniform_windows.py
"""A^Γ 의 prodiscrete entourage 를 window 수준에서 계산

V_r = {(x, y) : x, y 가 B_r 위에서 일치}. Hausdorff-Bourbaki 조건
"Z ⊂ V_r[Y] and Y ⊂ V_r[Z]" 는 π_r(Y) = π_r(Z) 와 동치이므로
모든 HB 계산은 유한 pattern 집합의 비교가 된다.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from itertools import product
from typing import (
    Callable, Dict, FrozenSet, Hashable, Iterable, Iterator, List, Mapping,
    Optional, Sequence, Set, Tuple, Union,
)
import logging

from .marked_groups import (
    AgreementRadius,
    FreeWord,
    ball_index,
    ball_size,
    free_ball,
    radius_from_first_failure,
)
from .shared.config import resolve_cap
from .shared.error_handler import (
    InsufficientRadius,
    ModulusMismatch,
    RadiusMismatch,
    RankMismatch,
    ResourceCapExceeded,
)
from .shared.metrics import metrics

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WindowPattern:
    """B_r 위의 labeling. labels 는 shortlex ball 순서"""
    rank: int
    radius: int
    labels: Tuple[int, ...]

    def __post_init__(self):
        expected = ball_size(self.rank, self.radius)
        if len(self.labels) != expected:
            raise RadiusMismatch(
                f"pattern of radius {self.radius} needs {expected} labels, got {len(self.labels)}"
            )

    @classmethod
    def from_function(cls, rank: int, radius: int, fn: Callable[[FreeWord], int]) -> "WindowPattern":
        return cls(rank, radius, tuple(fn(w) for w in free_ball(rank, radius)))

    @property
    def words(self) -> Tuple[FreeWord, ...]:
        return free_ball(self.rank, self.radius)

    def label(self, word: FreeWord) -> int:
        try:
            return self.labels[ball_index(self.rank, self.radius)[word]]
        except KeyError:
            raise InsufficientRadius(f"word {word} lies outside the radius-{self.radius} window")

    def restrict(self, radius: int) -> "WindowPattern":
        if radius > self.radius:
            raise InsufficientRadius(f"cannot restrict radius {self.radius} pattern to {radius}")
        # B_r' 은 shortlex 순서에서 B_r 의 prefix
        return WindowPattern(self.rank, radius, self.labels[:ball_size(self.rank, radius)])

    def items(self) -> Iterator[Tuple[FreeWord, int]]:
        return zip(self.words, self.labels)

    def __str__(self) -> str:
        return ",".join(str(s) for s in self.labels)


@dataclass(frozen=True)
class WindowSet:
    """같은 radius 의 pattern 유한 집합 (예: π_r(Y))"""
    rank: int
    radius: int
    patterns: FrozenSet[WindowPattern] = field(default_factory=frozenset)

    def __post_init__(self):
        for p in self.patterns:
            if p.radius != self.radius or p.rank != self.rank:
                raise RadiusMismatch(
                    f"pattern of rank {p.rank}, radius {p.radius} in a rank {self.rank}, radius {self.radius} set"
                )

    @classmethod
    def of(cls, rank: int, radius: int, patterns: Iterable[WindowPattern]) -> "WindowSet":
        return cls(rank, radius, frozenset(patterns))

    def ordered(self) -> List[WindowPattern]:
        """canonical 순서: labels 사전식"""
        return sorted(self.patterns, key=lambda p: p.labels)

    def __len__(self) -> int:
        return len(self.patterns)

    def __iter__(self) -> Iterator[WindowPattern]:
        return iter(self.ordered())

    def __contains__(self, pattern: WindowPattern) -> bool:
        return pattern in self.patterns

    def restrict(self, radius: int) -> "WindowSet":
        return WindowSet.of(self.rank, radius, (p.restrict(radius) for p in self.patterns))

    def _check_compatible(self, other: "WindowSet"):
        if self.rank != other.rank:
            raise RankMismatch(f"window sets of rank {self.rank} and {other.rank}")
        if self.radius != other.radius:
            raise RadiusMismatch(f"window sets of radius {self.radius} and {other.radius}")

    def union(self, other: "WindowSet") -> "WindowSet":
        self._check_compatible(other)
        return WindowSet(self.rank, self.radius, self.patterns | other.patterns)

    def issubset(self, other: "WindowSet") -> bool:
        self._check_compatible(other)
        return self.patterns <= other.patterns


def all_patterns(rank: int, q: int, radius: int, cap: Optional[int] = None) -> WindowSet:
    """full shift 의 π_r"""
    size = q ** ball_size(rank, radius)
    limit = resolve_cap(cap, "pattern_cap")
    if size > limit:
        raise ResourceCapExceeded(f"all patterns of radius {radius} over {q} symbols", size, limit)
    metrics.increment_counter("windows.patterns", size)
    return WindowSet.of(
        rank, radius,
        (WindowPattern(rank, radius, labels) for labels in product(range(q), repeat=ball_size(rank, radius))),
    )


# ===== Window maps =====

@dataclass(frozen=True)
class WindowMap:
    """radius r+m pattern -> radius r pattern (modulus m)"""
    rank: int
    modulus: int
    fn: Callable[[WindowPattern], WindowPattern] = field(compare=False)
    name: str = "map"

    def __call__(self, pattern: WindowPattern) -> WindowPattern:
        if pattern.radius < self.modulus:
            raise ModulusMismatch(
                f"{self.name} has modulus {self.modulus}; pattern radius {pattern.radius} is too small"
            )
        return self.fn(pattern)


def restriction_map(rank: int, modulus: int) -> WindowMap:
    return WindowMap(rank, modulus, lambda p: p.restrict(p.radius - modulus), name=f"restrict-{modulus}")


def pushforward_window(patterns: WindowSet, window_map: WindowMap) -> WindowSet:
    """f(P) (radius 는 modulus 만큼 줄어듦)"""
    if patterns.radius < window_map.modulus:
        raise ModulusMismatch(
            f"window radius {patterns.radius} is smaller than the modulus {window_map.modulus} of {window_map.name}"
        )
    return WindowSet.of(
        patterns.rank,
        patterns.radius - window_map.modulus,
        (window_map(p) for p in patterns.patterns),
    )


# ===== Entourage checks =====

def window_entourage_check(p: WindowSet, q: WindowSet) -> bool:
    """(Y, Z) ∈ V̂_r  <=>  π_r(Y) = π_r(Z)"""
    p._check_compatible(q)
    return p.patterns == q.patterns


def hb_union_property_check(y1: WindowSet, y2: WindowSet, z1: WindowSet, z2: WindowSet) -> bool:
    """union map 이 entourage 를 보존하는지 (항상 True 여야 함)"""
    premise = window_entourage_check(y1, y2) and window_entourage_check(z1, z2)
    return (not premise) or window_entourage_check(y1.union(z1), y2.union(z2))


# ===== Projection families =====

class ProjectionFamily(ABC):
    """radius 별 π_r 을 필요할 때 계산하는 subshift handle"""
    rank: int
    name: str = "family"

    @abstractmethod
    def window(self, radius: int) -> WindowSet: ...

    def signature(self, radius: int) -> Optional[Hashable]:
        """같은 종류의 family 끼리 π_r 을 만들지 않고 비교하기 위한 정확한 불변량"""
        return None

    def cardinality(self, radius: int) -> Optional[int]:
        return None


class ExplicitFamily(ProjectionFamily):
    """주어진 WindowSet 들로 이루어진 family. 없는 radius 는 더 큰 것에서 restrict"""

    def __init__(self, windows: Union[Mapping[int, WindowSet], Sequence[WindowSet]], name: str = "explicit"):
        if not isinstance(windows, Mapping):
            windows = {w.radius: w for w in windows}
        if not windows:
            raise InsufficientRadius("explicit family needs at least one window")
        self.windows: Dict[int, WindowSet] = dict(windows)
        self.rank = next(iter(self.windows.values())).rank
        self.name = name

    def window(self, radius: int) -> WindowSet:
        if radius in self.windows:
            return self.windows[radius]
        larger = [r for r in self.windows if r > radius]
        if not larger:
            raise InsufficientRadius(f"{self.name} has no window of radius >= {radius}")
        return self.windows[min(larger)].restrict(radius)


class ImageFamily(ProjectionFamily):
    """π_r(f(Y)) = f(π_{r+m}(Y))"""

    def __init__(self, source: ProjectionFamily, window_map: WindowMap, name: Optional[str] = None):
        self.source = source
        self.window_map = window_map
        self.rank = source.rank
        self.name = name or f"{window_map.name}({source.name})"
        self._cache: Dict[int, WindowSet] = {}

    def window(self, radius: int) -> WindowSet:
        if radius not in self._cache:
            self._cache[radius] = pushforward_window(
                self.source.window(radius + self.window_map.modulus), self.window_map
            )
        return self._cache[radius]


FamilyLike = Union[ProjectionFamily, Mapping[int, WindowSet], Sequence[WindowSet]]


def as_family(family: FamilyLike) -> ProjectionFamily:
    if isinstance(family, ProjectionFamily):
        return family
    return ExplicitFamily(family)


def windows_agree(y: ProjectionFamily, z: ProjectionFamily, radius: int) -> bool:
    """π_r(Y) = π_r(Z)"""
    sig_y, sig_z = y.signature(radius), z.signature(radius)
    if sig_y is not None and sig_z is not None and type(sig_y) is type(sig_z):
        return sig_y == sig_z
    card_y, card_z = y.cardinality(radius), z.cardinality(radius)
    if card_y is not None and card_z is not None and card_y != card_z:
        return False
    return window_entourage_check(y.window(radius), z.window(radius))


def hb_agreement_radius(y: FamilyLike, z: FamilyLike, rmax: int) -> AgreementRadius:
    """window_entourage_check 가 t <= r 에서 모두 성립하는 최대 r"""
    y, z = as_family(y), as_family(z)
    if y.rank != z.rank:
        raise RankMismatch(f"families of rank {y.rank} and {z.rank}")
    for t in range(rmax + 1):
        if not windows_agree(y, z, t):
            logger.debug(f"{y.name} and {z.name} separate at radius {t}")
            return radius_from_first_failure(t, rmax)
    return AgreementRadius.at_least(rmax)


@dataclass(frozen=True)
class InvarianceResult:
    holds: bool
    violations: Tuple[Tuple[int, str], ...] = ()


def invariance_check(family: ProjectionFamily, maps: Sequence[WindowMap], rmax: int) -> InvarianceResult:
    """모든 t <= rmax 에서 f(π_{t+m}(Y)) ⊆ π_t(Y)"""
    images = [ImageFamily(family, window_map) for window_map in maps]
    violations = []
    for t in range(rmax + 1):
        target = family.window(t)
        for image in images:
            if not image.window(t).issubset(target):
                violations.append((t, image.window_map.name))
    if violations:
        logger.warning(f"{family.name} is not invariant: {violations[:5]}")
    return InvarianceResult(not violations, tuple(violations))


# ===== Relations =====

Relation = Set[Tuple[WindowPattern, WindowPattern]]


def agreement_relation(rank: int, q: int, r: int, outer_radius: int, cap: Optional[int] = None) -> Relation:
    """radius outer_radius pattern 쌍 중 B_r 에서 일치하는 것 (V_r)"""
    if outer_radius < r:
        raise InsufficientRadius(f"outer radius {outer_radius} < entourage radius {r}")
    groups: Dict[WindowPattern, List[WindowPattern]] = {}
    for p in all_patterns(rank, q, outer_radius, cap).patterns:
        groups.setdefault(p.restrict(r), []).append(p)
    return {(a, b) for members in groups.values() for a in members for b in members}


def compose_relations(first: Relation, second: Relation) -> Relation:
    """first ∘ second = {(x, z) : (x, y) ∈ second, (y, z) ∈ first}"""
    successors: Dict[WindowPattern, List[WindowPattern]] = {}
    for y, z in first:
        successors.setdefault(y, []).append(z)
    return {(x, z) for x, y in second for z in successors.get(y, ())}
