# backend/workbench/shift_space.py
"""Configuration, shift 작용, Fix(N) 과 그 window, ρ*"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple, Union
import logging

from .marked_groups import (
    Element,
    FreeWord,
    MarkedGroup,
    alphabet_letters,
    ball_size,
    cyclic_group,
    free_ball,
    free_group,
    letter_name,
)
from .uniform_windows import ProjectionFamily, WindowMap, WindowPattern, WindowSet
from .shared.config import resolve_cap
from .shared.error_handler import (
    AlphabetMismatch,
    DomainError,
    FormatError,
    InsufficientRadius,
    NotCosetConstant,
    RankMismatch,
    ResourceCapExceeded,
    WindowTooSmall,
)
from .shared.metrics import metrics

logger = logging.getLogger(__name__)


def parse_symbols(text: str) -> Tuple[int, ...]:
    """'0,0,0,1' -> (0, 0, 0, 1)"""
    try:
        values = tuple(int(part) for part in text.replace(" ", "").split(",") if part != "")
    except ValueError:
        raise FormatError(f"invalid configuration literal {text!r}")
    if not values or any(v < 0 for v in values):
        raise FormatError(f"invalid configuration literal {text!r}")
    return values


@dataclass(frozen=True)
class FiniteConfiguration:
    """x ∈ A^G, G 유한. values[g] = x(g)"""
    group: MarkedGroup
    values: Tuple[int, ...]

    def __post_init__(self):
        self.group.require_finite("finite configuration")
        if len(self.values) != self.group.order:
            raise DomainError(
                f"configuration over {self.group} needs {self.group.order} values, got {len(self.values)}"
            )

    @classmethod
    def constant(cls, group: MarkedGroup, symbol: int) -> "FiniteConfiguration":
        return cls(group, (symbol,) * group.order)

    def __call__(self, g: Element) -> int:
        return self.values[self.group.check_element(g)]

    def replace_values(self, values: Iterable[int]) -> "FiniteConfiguration":
        return FiniteConfiguration(self.group, tuple(values))

    def alphabet_size(self) -> int:
        return max(self.values) + 1

    def __str__(self) -> str:
        return ",".join(str(v) for v in self.values)


@dataclass(frozen=True)
class PeriodicConfiguration:
    """A^ℤ 의 nℤ-주기 configuration"""
    values: Tuple[int, ...]

    def __post_init__(self):
        if not self.values:
            raise DomainError("period must be >= 1")

    @classmethod
    def parse(cls, text: str) -> "PeriodicConfiguration":
        return cls(parse_symbols(text))

    @property
    def period(self) -> int:
        return len(self.values)

    @property
    def group(self) -> MarkedGroup:
        return cyclic_group(self.period)

    def __call__(self, i: int) -> int:
        return self.values[i % self.period]

    def replace_values(self, values: Iterable[int]) -> "PeriodicConfiguration":
        return PeriodicConfiguration(tuple(values))

    def alphabet_size(self) -> int:
        return max(self.values) + 1

    def canonical(self) -> "PeriodicConfiguration":
        """최소 주기 표현 (bi-infinite 수열로서의 비교용)"""
        n = self.period
        for d in range(1, n + 1):
            if n % d == 0 and all(self.values[i] == self.values[i % d] for i in range(n)):
                return PeriodicConfiguration(self.values[:d])
        return self

    def shifted(self, offset: int) -> "PeriodicConfiguration":
        """i -> x(i + offset)"""
        return PeriodicConfiguration(tuple(self(i + offset) for i in range(self.period)))

    def __str__(self) -> str:
        return ",".join(str(v) for v in self.values)


Configuration = Union[FiniteConfiguration, PeriodicConfiguration]


def check_alphabet(x: Configuration, q: int):
    if any(not 0 <= v < q for v in x.values):
        raise AlphabetMismatch(f"configuration {x} uses symbols outside an alphabet of size {q}")


def all_configurations(group: MarkedGroup, q: int, cap: Optional[int] = None) -> Iterable[FiniteConfiguration]:
    """A^G 전수 (유한 G)"""
    group.require_finite("configuration enumeration")
    size = q ** group.order
    limit = resolve_cap(cap, "configuration_cap")
    if size > limit:
        raise ResourceCapExceeded(f"configurations over {group} with {q} symbols", size, limit)
    metrics.increment_counter("configurations.enumerated", size)
    return (FiniteConfiguration(group, values) for values in product(range(q), repeat=group.order))


def shift_act(g: Union[Element, FreeWord], x: Configuration) -> Configuration:
    """(gx)(h) = x(g^{-1} h)"""
    group = x.group
    element = group.evaluate(g) if isinstance(g, FreeWord) else group.check_element(g)
    g_inv = group.inverse(element)
    return x.replace_values(x.values[group.multiply(g_inv, h)] for h in group.elements())


def separating_shift(x: FiniteConfiguration, y: FiniteConfiguration) -> Optional[Element]:
    """(g^{-1}x)(1) != (g^{-1}y)(1) 인 g. x == y 이면 None (W_0 에 대한 expansivity)"""
    if x.group != y.group:
        raise RankMismatch(f"configurations over {x.group} and {y.group}")
    for h in x.group.elements():
        if x(h) != y(h):
            return h
    return None


# ===== Window shifts =====

def shift_window(pattern: WindowPattern, word: FreeWord) -> WindowPattern:
    """(g p)(w) = p(g^{-1} w), radius 는 |g| 만큼 줄어듦"""
    if len(word) > pattern.radius:
        raise InsufficientRadius(f"cannot shift a radius-{pattern.radius} window by {word}")
    g_inv = word.inverse()
    return WindowPattern.from_function(
        pattern.rank, pattern.radius - len(word), lambda w: pattern.label(g_inv * w)
    )


def generator_shift_maps(rank: int) -> List[WindowMap]:
    """각 letter s 에 대한 shift x -> s x (modulus 1)"""
    maps = []
    for letter in alphabet_letters(rank):
        word = FreeWord((letter,))
        maps.append(WindowMap(rank, 1, lambda p, word=word: shift_window(p, word), name=f"shift-{letter_name(letter)}"))
    return maps


# ===== Fix(N) =====

@lru_cache(maxsize=256)
def _coset_classes(group: MarkedGroup, radius: int) -> Tuple[Tuple[Tuple[int, ...], ...], Tuple[Element, ...]]:
    classes: Dict[Element, List[int]] = {}
    for i, word in enumerate(free_ball(group.rank, radius, cap=ball_size(group.rank, radius))):
        classes.setdefault(group.evaluate(word), []).append(i)
    return tuple(tuple(v) for v in classes.values()), tuple(classes.keys())


def coset_classes(group: MarkedGroup, radius: int, cap: Optional[int] = None) -> Tuple[Tuple[int, ...], ...]:
    """B_r 의 ball 위치를 oracle 값으로 묶은 것 (첫 등장 순서)"""
    free_ball(group.rank, radius, cap)
    return _coset_classes(group, radius)[0]


def fix_window(group: MarkedGroup, q: int, radius: int, cap: Optional[int] = None) -> WindowSet:
    """π_r(Fix(N)): coset 위에서 상수인 pattern 들"""
    classes = coset_classes(group, radius)
    size = q ** len(classes)
    limit = resolve_cap(cap, "pattern_cap")
    if size > limit:
        raise ResourceCapExceeded(f"Fix window of {group} at radius {radius}", size, limit)
    metrics.increment_counter("windows.patterns", size)
    n = ball_size(group.rank, radius)
    patterns = []
    for assignment in product(range(q), repeat=len(classes)):
        labels = [0] * n
        for symbol, members in zip(assignment, classes):
            for i in members:
                labels[i] = symbol
        patterns.append(WindowPattern(group.rank, radius, tuple(labels)))
    return WindowSet.of(group.rank, radius, patterns)


class FixFamily(ProjectionFamily):
    """Fix(N) ⊂ A^Γ 의 handle"""

    def __init__(self, group: MarkedGroup, q: int):
        self.group = group
        self.q = q
        self.rank = group.rank
        self.name = f"Fix({group})"

    def window(self, radius: int) -> WindowSet:
        return fix_window(self.group, self.q, radius)

    def signature(self, radius: int):
        # q >= 2 이면 pattern 집합과 partition 이 서로를 결정
        if self.q == 1:
            return ("fix", 1)
        partition = frozenset(frozenset(c) for c in coset_classes(self.group, radius))
        return ("fix", self.q, partition)

    def cardinality(self, radius: int) -> int:
        return self.q ** len(coset_classes(self.group, radius))


def full_shift(rank: int, q: int) -> FixFamily:
    """A^Γ = Fix({1})"""
    family = FixFamily(free_group(rank), q)
    family.name = f"full shift over {q} symbols"
    return family


class PeriodicOrbitFamily(ProjectionFamily):
    """ℤ 위 주기 orbit 들의 유한 합집합 (shift-invariant)"""

    def __init__(self, configurations: Iterable[PeriodicConfiguration], name: str = "periodic"):
        members = set()
        for x in configurations:
            for offset in range(x.period):
                members.add(x.shifted(offset).canonical())
        self.configurations: FrozenSet[PeriodicConfiguration] = frozenset(members)
        self.rank = 1
        self.name = name

    def members(self) -> List[PeriodicConfiguration]:
        return sorted(self.configurations, key=lambda x: (x.period, x.values))

    def window(self, radius: int) -> WindowSet:
        words = free_ball(1, radius)
        offsets = [w.exponent_sum() for w in words]
        return WindowSet.of(1, radius, (
            WindowPattern(1, radius, tuple(x(o) for o in offsets))
            for x in self.configurations
        ))


def periodic_family(period: int, q: int) -> PeriodicOrbitFamily:
    """Fix(nℤ) 전체"""
    return PeriodicOrbitFamily(
        (PeriodicConfiguration(values) for values in product(range(q), repeat=period)),
        name=f"Fix({period}Z)",
    )


# ===== ρ* =====

@dataclass(frozen=True)
class PulledBackConfiguration:
    """ρ*(y) = y ∘ ρ  ∈ Fix(N)"""
    group: MarkedGroup
    configuration: FiniteConfiguration

    def __call__(self, word: FreeWord) -> int:
        return self.configuration(self.group.evaluate(word))

    def window(self, radius: int) -> WindowPattern:
        return WindowPattern.from_function(self.group.rank, radius, self)


def rho_star(group: MarkedGroup, y: FiniteConfiguration) -> PulledBackConfiguration:
    if y.group != group:
        raise RankMismatch(f"configuration over {y.group} pulled back along {group}")
    return PulledBackConfiguration(group, y)


def rho_star_inverse(group: MarkedGroup, pattern: WindowPattern) -> FiniteConfiguration:
    """coset-constant window 에서 coset 마다 값 하나씩 읽음"""
    group.require_finite("inverse pullback")
    if pattern.rank != group.rank:
        raise RankMismatch(f"rank {pattern.rank} window for a rank {group.rank} group")
    lifts = group.transversal()
    reach = max(len(w) for w in lifts)
    if reach > pattern.radius:
        raise WindowTooSmall(
            f"radius {pattern.radius} window does not meet every coset of {group} (needs {reach})"
        )
    values = tuple(pattern.label(w) for w in lifts)
    for word, symbol in pattern.items():
        if values[group.evaluate(word)] != symbol:
            raise NotCosetConstant(f"window is not constant on the coset of {word}")
    return FiniteConfiguration(group, values)
