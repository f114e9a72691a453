# backend/workbench/marked_groups.py
"""Free group 단어, word-problem oracle, Cayley ball 열거, marked group 거리"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache, cached_property, total_ordering
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple
import logging
import math

from .shared.config import resolve_cap
from .shared.error_handler import (
    ElementOutOfRange,
    FormatError,
    RankMismatch,
    ResourceCapExceeded,
    DomainError,
)
from .shared.metrics import metrics

logger = logging.getLogger(__name__)

Element = Hashable

# 텍스트 표기는 a..d 까지 ('e'는 identity)
MAX_TEXT_RANK = 4


# ===== Free words =====

def letter_rank(letter: int) -> int:
    """shortlex 순서: a < A < b < B < ..."""
    return 2 * (abs(letter) - 1) + (0 if letter > 0 else 1)


def letter_name(letter: int) -> str:
    name = chr(ord('a') + abs(letter) - 1)
    return name if letter > 0 else name.upper()


def alphabet_letters(rank: int) -> Tuple[int, ...]:
    """rank k의 모든 letter를 shortlex 순서로"""
    return tuple(sorted(
        [i for i in range(1, rank + 1)] + [-i for i in range(1, rank + 1)],
        key=letter_rank,
    ))


@total_ordering
@dataclass(frozen=True)
class FreeWord:
    """Freely reduced word. 생성자 i는 +(i+1), 역원은 -(i+1)"""
    letters: Tuple[int, ...] = ()

    def __post_init__(self):
        for i, letter in enumerate(self.letters):
            if letter == 0:
                raise FormatError("letter 0 is not a generator")
            if i and self.letters[i - 1] == -letter:
                raise DomainError(f"word {self.letters} is not freely reduced")

    @classmethod
    def identity(cls) -> "FreeWord":
        return cls(())

    @classmethod
    def generator(cls, index: int, inverse: bool = False) -> "FreeWord":
        return cls((-(index + 1) if inverse else index + 1,))

    @classmethod
    def reduce(cls, letters: Iterable[int]) -> "FreeWord":
        """free reduction (stack)"""
        stack: List[int] = []
        for letter in letters:
            if stack and stack[-1] == -letter:
                stack.pop()
            else:
                stack.append(letter)
        return cls(tuple(stack))

    @classmethod
    def parse(cls, text: str) -> "FreeWord":
        """'aAb' 형식. 'e' 또는 빈 문자열은 identity"""
        text = text.strip()
        if text in ("", "e", "1", "ε"):
            return cls.identity()
        letters = []
        for ch in text:
            index = ord(ch.lower()) - ord('a') + 1
            if not ch.isascii() or not ch.isalpha() or not 1 <= index <= MAX_TEXT_RANK:
                raise FormatError(f"invalid letter {ch!r} in word {text!r}")
            letters.append(index if ch.islower() else -index)
        return cls.reduce(letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        return FreeWord.reduce(self.letters + other.letters)

    def inverse(self) -> "FreeWord":
        return FreeWord(tuple(-letter for letter in reversed(self.letters)))

    def shortlex_key(self) -> Tuple[int, Tuple[int, ...]]:
        return (len(self.letters), tuple(letter_rank(l) for l in self.letters))

    def __lt__(self, other: "FreeWord") -> bool:
        return self.shortlex_key() < other.shortlex_key()

    def max_generator(self) -> int:
        return max((abs(l) for l in self.letters), default=0)

    def exponent_sum(self) -> int:
        """rank 1에서 정수 값"""
        return sum(1 if l > 0 else -1 for l in self.letters)

    def __str__(self) -> str:
        return "".join(letter_name(l) for l in self.letters) or "e"

    def __repr__(self) -> str:
        return f"FreeWord({str(self)!r})"


def ball_size(rank: int, radius: int) -> int:
    """|B_r| = 1 + sum_{i=1..r} 2k(2k-1)^(i-1)"""
    if rank < 1 or radius < 0:
        raise DomainError(f"invalid ball parameters rank={rank} radius={radius}")
    return 1 + sum(2 * rank * (2 * rank - 1) ** (i - 1) for i in range(1, radius + 1))


@lru_cache(maxsize=128)
def _ball_words(rank: int, radius: int) -> Tuple[FreeWord, ...]:
    alphabet = alphabet_letters(rank)
    words = [FreeWord.identity()]
    frontier = [FreeWord.identity()]
    for _ in range(radius):
        next_frontier = []
        for word in frontier:
            last = word.letters[-1] if word.letters else 0
            for letter in alphabet:
                if letter == -last:
                    continue
                next_frontier.append(FreeWord(word.letters + (letter,)))
        words.extend(next_frontier)
        frontier = next_frontier
    metrics.increment_counter("ball.words", len(words))
    return tuple(words)


def free_ball(rank: int, radius: int, cap: Optional[int] = None) -> Tuple[FreeWord, ...]:
    """B_r 의 모든 reduced word (shortlex 순서)"""
    size = ball_size(rank, radius)
    limit = resolve_cap(cap, "ball_cap")
    if size > limit:
        raise ResourceCapExceeded(f"free ball B_{radius} of rank {rank}", size, limit)
    return _ball_words(rank, radius)


@lru_cache(maxsize=128)
def ball_index(rank: int, radius: int) -> Dict[FreeWord, int]:
    """word -> shortlex 위치"""
    return {word: i for i, word in enumerate(_ball_words(rank, radius))}


# ===== Word-problem oracles =====

class WordProblemOracle(ABC):
    """G = Γ/N 의 word problem"""
    backend: str = ""

    @property
    @abstractmethod
    def rank(self) -> int: ...

    @property
    @abstractmethod
    def identity(self) -> Element: ...

    @abstractmethod
    def generator_image(self, letter: int) -> Element: ...

    @abstractmethod
    def multiply(self, x: Element, y: Element) -> Element: ...

    @abstractmethod
    def inverse(self, x: Element) -> Element: ...

    @property
    def order(self) -> Optional[int]:
        return None

    def evaluate(self, word: FreeWord) -> Element:
        if word.max_generator() > self.rank:
            raise RankMismatch(f"word {word} uses generators beyond rank {self.rank}")
        acc = self.identity
        for letter in word.letters:
            acc = self.multiply(acc, self.generator_image(letter))
        return acc


@dataclass(frozen=True)
class FiniteOracle(WordProblemOracle):
    """곱셈표 + 생성자 image로 주어진 유한군"""
    table: Tuple[Tuple[int, ...], ...]
    generators: Tuple[int, ...]
    _identity: int = field(init=False, compare=False, repr=False)
    _inverses: Tuple[int, ...] = field(init=False, compare=False, repr=False)
    backend = "finite"

    def __post_init__(self):
        n = len(self.table)
        if n == 0 or any(len(row) != n for row in self.table):
            raise FormatError("multiplication table must be a non-empty square")
        if any(not 0 <= v < n for row in self.table for v in row):
            raise FormatError("multiplication table entries out of range")
        if not self.generators or any(not 0 <= g < n for g in self.generators):
            raise FormatError("generator images out of range")
        identity = next(
            (e for e in range(n) if all(self.table[e][x] == x == self.table[x][e] for x in range(n))),
            None,
        )
        if identity is None:
            raise FormatError("multiplication table has no identity")
        inverses = []
        for x in range(n):
            inv = next((y for y in range(n) if self.table[x][y] == identity), None)
            if inv is None or self.table[inv][x] != identity:
                raise FormatError(f"element {x} has no two-sided inverse")
            inverses.append(inv)
        object.__setattr__(self, "_identity", identity)
        object.__setattr__(self, "_inverses", tuple(inverses))

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def identity(self) -> int:
        return self._identity

    @property
    def order(self) -> int:
        return len(self.table)

    def generator_image(self, letter: int) -> int:
        image = self.generators[abs(letter) - 1]
        return image if letter > 0 else self._inverses[image]

    def multiply(self, x: int, y: int) -> int:
        return self.table[x][y]

    def inverse(self, x: int) -> int:
        return self._inverses[x]


@dataclass(frozen=True)
class CyclicOracle(WordProblemOracle):
    """ℤ/n, 모든 생성자 -> 1"""
    modulus: int
    generator_count: int = 1
    backend = "cyclic"

    def __post_init__(self):
        if self.modulus < 1:
            raise FormatError(f"cyclic modulus must be >= 1, got {self.modulus}")
        if self.generator_count < 1:
            raise FormatError("rank must be >= 1")

    @property
    def rank(self) -> int:
        return self.generator_count

    @property
    def identity(self) -> int:
        return 0

    @property
    def order(self) -> int:
        return self.modulus

    def generator_image(self, letter: int) -> int:
        return (1 if letter > 0 else -1) % self.modulus

    def multiply(self, x: int, y: int) -> int:
        return (x + y) % self.modulus

    def inverse(self, x: int) -> int:
        return (-x) % self.modulus

    def evaluate(self, word: FreeWord) -> int:
        if word.max_generator() > self.rank:
            raise RankMismatch(f"word {word} uses generators beyond rank {self.rank}")
        return word.exponent_sum() % self.modulus


@dataclass(frozen=True)
class ZdOracle(WordProblemOracle):
    """ℤ^d, 생성자 i -> i번째 기저 벡터"""
    dimension: int
    backend = "zd"

    def __post_init__(self):
        if self.dimension < 1:
            raise FormatError("dimension must be >= 1")

    @property
    def rank(self) -> int:
        return self.dimension

    @property
    def identity(self) -> Tuple[int, ...]:
        return (0,) * self.dimension

    def generator_image(self, letter: int) -> Tuple[int, ...]:
        vec = [0] * self.dimension
        vec[abs(letter) - 1] = 1 if letter > 0 else -1
        return tuple(vec)

    def multiply(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def inverse(self, x):
        return tuple(-a for a in x)


@dataclass(frozen=True)
class FreeOracle(WordProblemOracle):
    """N = {1}: free reduction 자체"""
    generator_count: int
    backend = "free"

    def __post_init__(self):
        if self.generator_count < 1:
            raise FormatError("rank must be >= 1")

    @property
    def rank(self) -> int:
        return self.generator_count

    @property
    def identity(self) -> FreeWord:
        return FreeWord.identity()

    def generator_image(self, letter: int) -> FreeWord:
        return FreeWord((letter,))

    def multiply(self, x: FreeWord, y: FreeWord) -> FreeWord:
        return x * y

    def inverse(self, x: FreeWord) -> FreeWord:
        return x.inverse()

    def evaluate(self, word: FreeWord) -> FreeWord:
        if word.max_generator() > self.rank:
            raise RankMismatch(f"word {word} uses generators beyond rank {self.rank}")
        return word


# ===== Marked groups =====

@dataclass(frozen=True)
class MarkedGroup:
    """Γ = F_k 의 quotient (G, ρ). oracle(w) == identity 인 w 들이 N"""
    oracle: WordProblemOracle
    name: str = field(default="", compare=False)

    @property
    def rank(self) -> int:
        return self.oracle.rank

    @property
    def backend(self) -> str:
        return self.oracle.backend

    @property
    def is_finite(self) -> bool:
        return self.oracle.order is not None

    @property
    def order(self) -> Optional[int]:
        return self.oracle.order

    @property
    def identity(self) -> Element:
        return self.oracle.identity

    def evaluate(self, word: FreeWord) -> Element:
        return self.oracle.evaluate(word)

    def multiply(self, x: Element, y: Element) -> Element:
        return self.oracle.multiply(x, y)

    def inverse(self, x: Element) -> Element:
        return self.oracle.inverse(x)

    def elements(self) -> range:
        """유한군 원소: 0..|G|-1 (canonical 순서)"""
        self.require_finite("element table")
        return range(self.order)

    def check_element(self, g: Element) -> Element:
        if self.is_finite and not (isinstance(g, int) and 0 <= g < self.order):
            raise ElementOutOfRange(f"element {g!r} not in {self}")
        return g

    def require_finite(self, what: str):
        if not self.is_finite:
            raise DomainError(f"{what} requires a finite group, got {self}")

    @cached_property
    def _transversal(self) -> Dict[Element, FreeWord]:
        # Cayley graph BFS; shortlex 최소 단어는 prefix-closed
        self.require_finite("lift")
        alphabet = alphabet_letters(self.rank)
        found: Dict[Element, FreeWord] = {self.identity: FreeWord.identity()}
        frontier = [(FreeWord.identity(), self.identity)]
        while frontier and len(found) < self.order:
            next_frontier = []
            for word, g in frontier:
                last = word.letters[-1] if word.letters else 0
                for letter in alphabet:
                    if letter == -last:
                        continue
                    h = self.multiply(g, self.oracle.generator_image(letter))
                    if h not in found:
                        extended = FreeWord(word.letters + (letter,))
                        found[h] = extended
                        next_frontier.append((extended, h))
            frontier = next_frontier
        if len(found) < self.order:
            raise DomainError(f"generators of {self} do not generate the whole table")
        return found

    def lift(self, g: Element) -> FreeWord:
        """shortlex 최소 preimage word"""
        if isinstance(self.oracle, FreeOracle):
            return g
        if isinstance(self.oracle, ZdOracle):
            letters = []
            for i, c in enumerate(g):
                letters.extend([i + 1 if c > 0 else -(i + 1)] * abs(c))
            return FreeWord(tuple(sorted(letters, key=letter_rank)))
        return self._transversal[self.check_element(g)]

    def transversal(self) -> List[FreeWord]:
        """원소 순서대로의 lift"""
        return [self.lift(g) for g in self.elements()]

    def __str__(self) -> str:
        return self.name or f"{self.backend}(rank={self.rank})"


def cyclic_group(modulus: int, rank: int = 1) -> MarkedGroup:
    return MarkedGroup(CyclicOracle(modulus, rank), name=f"cyclic:{modulus}")


def trivial_group(rank: int = 1) -> MarkedGroup:
    return MarkedGroup(CyclicOracle(1, rank), name="trivial")


def zd_group(dimension: int) -> MarkedGroup:
    return MarkedGroup(ZdOracle(dimension), name=f"zd:{dimension}")


def free_group(rank: int) -> MarkedGroup:
    return MarkedGroup(FreeOracle(rank), name=f"free:{rank}")


def finite_group(table: Sequence[Sequence[int]], generators: Sequence[int], name: str = "") -> MarkedGroup:
    oracle = FiniteOracle(tuple(tuple(row) for row in table), tuple(generators))
    return MarkedGroup(oracle, name=name or f"finite:{len(table)}")


def finite_group_from_permutations(generators: Sequence[Sequence[int]], name: str = "",
                                   cap: Optional[int] = None) -> MarkedGroup:
    """순열 생성자로부터 곱셈표 구성. (στ)(i) = σ(τ(i))"""
    limit = resolve_cap(cap, "group_order_cap")
    if not generators:
        raise FormatError("at least one generator permutation is required")
    degree = len(generators[0])
    identity = tuple(range(degree))
    gens = [tuple(g) for g in generators]
    for g in gens:
        if sorted(g) != list(identity):
            raise FormatError(f"{g} is not a permutation of 0..{degree - 1}")

    def compose(s, t):
        return tuple(s[t[i]] for i in range(degree))

    elements = [identity]
    index = {identity: 0}
    frontier = [identity]
    while frontier:
        next_frontier = []
        for x in frontier:
            for g in gens:
                y = compose(x, g)
                if y not in index:
                    index[y] = len(elements)
                    elements.append(y)
                    next_frontier.append(y)
        if len(elements) > limit:
            what = f"group generated by {len(gens)} permutations of degree {degree}"
            raise ResourceCapExceeded(what, len(elements), limit)
        frontier = next_frontier
    table = [[index[compose(x, y)] for y in elements] for x in elements]
    return finite_group(table, [index[g] for g in gens], name=name or f"perm:{len(elements)}")


def symmetric_group(n: int, cap: Optional[int] = None) -> MarkedGroup:
    """S_n, 생성자 (0 1) 와 n-cycle"""
    if n < 2:
        raise FormatError(f"symmetric group needs degree >= 2, got {n}")
    limit = resolve_cap(cap, "group_order_cap")
    if math.factorial(n) > limit:
        raise ResourceCapExceeded(f"symmetric group S{n}", math.factorial(n), limit)
    transposition = list(range(n))
    transposition[0], transposition[1] = 1, 0
    cycle = [(i + 1) % n for i in range(n)]
    return finite_group_from_permutations([transposition, cycle], name=f"S{n}", cap=limit)


# ===== Agreement radius =====

class AgreementKind(str, Enum):
    EXACTLY = "exactly"
    AT_LEAST = "at_least"
    NONE = "none"


@dataclass(frozen=True)
class AgreementRadius:
    """ultrametric 거리 2^{-r} 의 정수 대리값"""
    kind: AgreementKind
    radius: int

    @classmethod
    def exactly(cls, radius: int) -> "AgreementRadius":
        return cls(AgreementKind.EXACTLY, radius)

    @classmethod
    def at_least(cls, radius: int) -> "AgreementRadius":
        return cls(AgreementKind.AT_LEAST, radius)

    @classmethod
    def none(cls) -> "AgreementRadius":
        # radius 0에서도 불일치
        return cls(AgreementKind.NONE, -1)

    def as_distance(self) -> float:
        """표시용"""
        return 2.0 ** (-self.radius) if self.radius >= 0 else 2.0

    def to_dict(self) -> Dict[str, object]:
        return {"kind": self.kind.value, "radius": self.radius}

    def __str__(self) -> str:
        if self.kind == AgreementKind.AT_LEAST:
            return f">= {self.radius}"
        if self.kind == AgreementKind.NONE:
            return "none"
        return str(self.radius)


def radius_from_first_failure(first_failure: Optional[int], rmax: int) -> AgreementRadius:
    """첫 불일치 radius -> AgreementRadius"""
    if first_failure is None:
        return AgreementRadius.at_least(rmax)
    if first_failure == 0:
        return AgreementRadius.none()
    return AgreementRadius.exactly(first_failure - 1)


def membership_window(group: MarkedGroup, radius: int, cap: Optional[int] = None) -> Tuple[FreeWord, ...]:
    """N ∩ B_r"""
    return tuple(w for w in free_ball(group.rank, radius, cap) if group.evaluate(w) == group.identity)


def marked_distance(g1: MarkedGroup, g2: MarkedGroup, rmax: int, cap: Optional[int] = None) -> AgreementRadius:
    """N_1 ∩ B_r = N_2 ∩ B_r 인 최대 r"""
    if g1.rank != g2.rank:
        raise RankMismatch(f"cannot compare {g1} (rank {g1.rank}) with {g2} (rank {g2.rank})")
    e1, e2 = g1.identity, g2.identity
    for word in free_ball(g1.rank, rmax, cap):
        if (g1.evaluate(word) == e1) != (g2.evaluate(word) == e2):
            logger.debug(f"{g1} and {g2} separated by {word}")
            return radius_from_first_failure(len(word), rmax)
    return AgreementRadius.at_least(rmax)
