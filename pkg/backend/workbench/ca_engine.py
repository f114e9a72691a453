# backend/workbench/ca_engine.py
"""Cellular automaton: τ(x)(g) = μ(π_S(g^{-1}x))

rule table 은 memory 위치 순서의 tuple 을 q 진수로 읽은 index 로 저장한다
(첫 위치가 최상위 자리). ECA 번호 규칙과 같은 배치.
"""

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union
import logging
import random

import numpy as np

from .marked_groups import Element, FreeWord, MarkedGroup, alphabet_letters, ball_index, free_ball
from .uniform_windows import WindowMap, WindowPattern, all_patterns
from .shift_space import (
    Configuration,
    FiniteConfiguration,
    all_configurations,
    check_alphabet,
    shift_act,
    shift_window,
)
from .shared.config import resolve_cap, settings
from .shared.error_handler import (
    AlphabetMismatch,
    DomainError,
    ElementOutOfRange,
    InsufficientRadius,
    NotEquivariant,
    NotLocal,
    RankMismatch,
    ResourceCapExceeded,
)
from .shared.metrics import metrics

logger = logging.getLogger(__name__)

SymbolTuple = Tuple[int, ...]


def tuple_index(symbols: Sequence[int], q: int) -> int:
    index = 0
    for s in symbols:
        index = index * q + s
    return index


def tabulate(q: int, width: int, fn: Callable[[SymbolTuple], int], cap: Optional[int] = None) -> Tuple[int, ...]:
    """A^width 위의 함수를 사전식 순서 table 로"""
    size = q ** width
    limit = resolve_cap(cap, "pattern_cap")
    if size > limit:
        raise ResourceCapExceeded(f"rule table over {width} memory positions", size, limit)
    return tuple(fn(t) for t in product(range(q), repeat=width))


def _check_table(q: int, width: int, rule: Sequence[int]):
    if q < 1:
        raise AlphabetMismatch(f"alphabet size must be >= 1, got {q}")
    if len(rule) != q ** width:
        raise DomainError(f"rule table needs {q ** width} entries, got {len(rule)}")
    if any(not 0 <= s < q for s in rule):
        raise AlphabetMismatch(f"rule table uses symbols outside an alphabet of size {q}")


def _neighbour_table(group: MarkedGroup, offsets: Sequence[Element]) -> np.ndarray:
    """row i, column g = g·offsets[i]"""
    rows = [[group.multiply(g, o) for g in group.elements()] for o in offsets]
    return np.array(rows, dtype=np.int64).reshape(len(offsets), group.order)


def _apply_table(rule: Sequence[int], q: int, values: Sequence[int], neighbours: np.ndarray) -> List[int]:
    vals = np.asarray(values, dtype=np.int64)
    index = np.zeros(neighbours.shape[1], dtype=np.int64)
    for row in neighbours:
        index = index * q + vals[row]
    return np.asarray(rule, dtype=np.int64)[index].tolist()


@dataclass(frozen=True)
class CellularAutomaton:
    """A^Γ 위의 CA. memory 는 서로 다른 reduced word 들의 순서 있는 목록"""
    rank: int
    q: int
    memory: Tuple[FreeWord, ...]
    rule: Tuple[int, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if len(set(self.memory)) != len(self.memory):
            raise DomainError(f"memory words must be distinct: {[str(w) for w in self.memory]}")
        for w in self.memory:
            if w.max_generator() > self.rank:
                raise RankMismatch(f"memory word {w} uses a generator beyond rank {self.rank}")
        _check_table(self.q, len(self.memory), self.rule)

    @property
    def radius(self) -> int:
        """window modulus m = max |s|"""
        return max((len(w) for w in self.memory), default=0)

    def local(self, symbols: Sequence[int]) -> int:
        return self.rule[tuple_index(symbols, self.q)]

    def __str__(self) -> str:
        if self.name:
            return self.name
        return f"CA(rank={self.rank}, q={self.q}, memory={' '.join(str(w) for w in self.memory)})"


# ===== Constructors =====

def eca(number: int) -> CellularAutomaton:
    """Wolfram 번호. memory (a⁻¹, ε, a), index = 4l + 2c + r"""
    if not 0 <= number <= 255:
        raise DomainError(f"elementary rule number must be in 0..255, got {number}")
    memory = (FreeWord((-1,)), FreeWord.identity(), FreeWord((1,)))
    return CellularAutomaton(1, 2, memory, tuple((number >> i) & 1 for i in range(8)), name=f"eca {number}")


def identity_ca(rank: int = 1, q: int = 2) -> CellularAutomaton:
    return CellularAutomaton(rank, q, (FreeWord.identity(),), tuple(range(q)), name="identity")


def shift_ca(word: FreeWord, rank: int = 1, q: int = 2) -> CellularAutomaton:
    """τ(x)(g) = x(g·word)"""
    return CellularAutomaton(rank, q, (word,), tuple(range(q)), name=f"shift {word}")


def constant_ca(symbol: int, rank: int = 1, q: int = 2) -> CellularAutomaton:
    return CellularAutomaton(rank, q, (), (symbol,), name=f"constant {symbol}")


def from_local_rule(rank: int, q: int, memory: Sequence[FreeWord], fn: Callable[[SymbolTuple], int],
                    name: str = "") -> CellularAutomaton:
    memory = tuple(memory)
    return CellularAutomaton(rank, q, memory, tabulate(q, len(memory), fn), name=name)


# ===== Evaluation =====

def _check_input(tau: CellularAutomaton, x: Configuration):
    if x.group.rank != tau.rank:
        raise RankMismatch(f"{tau} has rank {tau.rank}, configuration group has rank {x.group.rank}")
    check_alphabet(x, tau.q)


def ca_apply(tau: CellularAutomaton, x: Configuration) -> Configuration:
    """output(g) = μ((x(g·s_i))_i)"""
    _check_input(tau, x)
    group = x.group
    neighbours = _neighbour_table(group, [group.evaluate(s) for s in tau.memory])
    metrics.increment_counter("ca.cells_evaluated", group.order)
    return x.replace_values(_apply_table(tau.rule, tau.q, x.values, neighbours))


def ca_window_apply(tau: CellularAutomaton, pattern: WindowPattern, radius: Optional[int] = None) -> WindowPattern:
    """radius r+m pattern -> radius r pattern"""
    if pattern.rank != tau.rank:
        raise RankMismatch(f"rank {pattern.rank} pattern for {tau}")
    r = pattern.radius - tau.radius if radius is None else radius
    if r < 0 or pattern.radius < r + tau.radius:
        raise InsufficientRadius(
            f"{tau} needs a radius {max(r, 0) + tau.radius} window, got radius {pattern.radius}"
        )
    index = ball_index(pattern.rank, pattern.radius)
    labels = pattern.labels
    return WindowPattern.from_function(
        pattern.rank, r,
        lambda w: tau.local([labels[index[w * s]] for s in tau.memory]),
    )


def window_map(tau: CellularAutomaton) -> WindowMap:
    return WindowMap(tau.rank, tau.radius, lambda p: ca_window_apply(tau, p), name=str(tau))


# ===== Monoid structure =====

def _require_same_space(tau1: CellularAutomaton, tau2: CellularAutomaton):
    if tau1.rank != tau2.rank:
        raise RankMismatch(f"{tau1} has rank {tau1.rank}, {tau2} has rank {tau2.rank}")
    if tau1.q != tau2.q:
        raise AlphabetMismatch(f"{tau1} uses {tau1.q} symbols, {tau2} uses {tau2.q}")


def ca_compose(tau1: CellularAutomaton, tau2: CellularAutomaton, cap: Optional[int] = None) -> CellularAutomaton:
    """τ1 ∘ τ2. memory = {t·s : t ∈ S1, s ∈ S2} (shortlex 순)"""
    _require_same_space(tau1, tau2)
    memory = tuple(sorted({t * s for t in tau1.memory for s in tau2.memory}))
    position = {w: i for i, w in enumerate(memory)}
    inner = [[position[t * s] for s in tau2.memory] for t in tau1.memory]

    def local(symbols: SymbolTuple) -> int:
        return tau1.local([tau2.local([symbols[i] for i in row]) for row in inner])

    name = f"{tau1} o {tau2}" if tau1.name and tau2.name else ""
    return CellularAutomaton(tau1.rank, tau1.q, memory, tabulate(tau1.q, len(memory), local, cap), name=name)


def restrict_memory(tau: CellularAutomaton, memory: Sequence[FreeWord], cap: Optional[int] = None) -> CellularAutomaton:
    """memory ⊇ S 인 새 목록으로 같은 CA 를 다시 씀"""
    memory = tuple(memory)
    position = {w: i for i, w in enumerate(memory)}
    missing = [str(w) for w in tau.memory if w not in position]
    if missing:
        raise DomainError(f"memory {[str(w) for w in memory]} misses {missing}")
    picks = [position[w] for w in tau.memory]
    return CellularAutomaton(
        tau.rank, tau.q, memory,
        tabulate(tau.q, len(memory), lambda t: tau.local([t[i] for i in picks]), cap),
        name=tau.name,
    )


def ca_equivalent(tau1: CellularAutomaton, tau2: CellularAutomaton, cap: Optional[int] = None) -> bool:
    """A^Γ 위에서 같은 map 인지 (공통 memory 위 모든 pattern 비교)"""
    _require_same_space(tau1, tau2)
    union = tuple(sorted(set(tau1.memory) | set(tau2.memory)))
    return restrict_memory(tau1, union, cap).rule == restrict_memory(tau2, union, cap).rule


def ca_equivalent_on(tau1: CellularAutomaton, tau2: CellularAutomaton, group: MarkedGroup,
                     cap: Optional[int] = None) -> bool:
    """A^G 위에서 같은 map 인지 (유한 G 전수)"""
    _require_same_space(tau1, tau2)
    return all(ca_apply(tau1, x) == ca_apply(tau2, x) for x in all_configurations(group, tau1.q, cap))


def minimize_memory(tau: CellularAutomaton) -> CellularAutomaton:
    """rule 이 무시하는 memory 위치 제거"""
    q, d = tau.q, len(tau.memory)
    keep = []
    for i in range(d):
        weight = q ** (d - 1 - i)
        depends = any(
            tau.rule[index] != tau.rule[index + (s - (index // weight) % q) * weight]
            for index in range(len(tau.rule))
            for s in range(q)
        )
        if depends:
            keep.append(i)
    if len(keep) == d:
        return tau
    memory = tuple(tau.memory[i] for i in keep)
    # 버린 위치는 0 으로 고정해 읽음
    weights = [q ** (d - 1 - i) for i in keep]
    rule = tuple(
        tau.rule[sum(s * w for s, w in zip(t, weights))]
        for t in product(range(q), repeat=len(keep))
    )
    logger.debug(f"{tau}: memory {d} -> {len(keep)} positions")
    return CellularAutomaton(tau.rank, q, memory, rule, name=tau.name)


# ===== Synthesis =====

SPOT_CHECK_SAMPLES = 32


def _fill_table(q: int, width: int, realized: Dict[SymbolTuple, int]) -> Tuple[int, ...]:
    fill = settings.extension_symbol
    return tabulate(q, width, lambda t: realized.get(t, fill))


def _spot_check_window_map(f: WindowMap, q: int):
    rng = random.Random(0)
    words = free_ball(f.rank, f.modulus + 1)
    for _ in range(SPOT_CHECK_SAMPLES):
        p = WindowPattern(f.rank, f.modulus + 1, tuple(rng.randrange(q) for _ in words))
        image = f(p)
        for letter in alphabet_letters(f.rank):
            s = FreeWord((letter,))
            if image.label(s) != f(shift_window(p, s.inverse())).labels[0]:
                raise NotEquivariant(f"{f.name} does not commute with the shift by {s}")


def _synthesize_from_window_map(f: WindowMap, bound: int, q: int, cap: Optional[int]) -> CellularAutomaton:
    _spot_check_window_map(f, q)
    inputs = all_patterns(f.rank, q, f.modulus, cap).ordered()
    outputs = [f(p).labels[0] for p in inputs]
    witnesses = None
    for m in range(min(bound, f.modulus) + 1):
        realized: Dict[SymbolTuple, int] = {}
        first: Dict[SymbolTuple, WindowPattern] = {}
        conflict = False
        for p, y in zip(inputs, outputs):
            key = p.restrict(m).labels
            if realized.setdefault(key, y) != y:
                witnesses = (first[key], p)
                conflict = True
                break
            first.setdefault(key, p)
        if not conflict:
            memory = free_ball(f.rank, m)
            return CellularAutomaton(f.rank, q, memory, _fill_table(q, len(memory), realized))
        logger.debug(f"{f.name} is not local at radius {m}")
    raise NotLocal(bound, witnesses)


def _synthesize_from_configuration_map(f: Callable[[FiniteConfiguration], Configuration], group: MarkedGroup,
                                       bound: int, q: int, cap: Optional[int]) -> CellularAutomaton:
    pairs = [(x, f(x)) for x in all_configurations(group, q, cap)]
    rng = random.Random(0)
    generators = [group.oracle.generator_image(i + 1) for i in range(group.rank)]
    for x, y in rng.sample(pairs, min(SPOT_CHECK_SAMPLES, len(pairs))):
        for s in generators:
            if tuple(f(shift_act(s, x)).values) != tuple(shift_act(s, y).values):
                raise NotEquivariant(f"map does not commute with the shift by {s} on {x}")
    witnesses = None
    for m in range(bound + 1):
        memory = free_ball(group.rank, m)
        offsets = [group.evaluate(w) for w in memory]
        realized: Dict[SymbolTuple, int] = {}
        first: Dict[SymbolTuple, Tuple[FiniteConfiguration, Element]] = {}
        conflict = False
        for x, y in pairs:
            for g in group.elements():
                key = tuple(x.values[group.multiply(g, o)] for o in offsets)
                if realized.setdefault(key, y.values[g]) != y.values[g]:
                    witnesses = (first[key], (x, g))
                    conflict = True
                    break
                first.setdefault(key, (x, g))
            if conflict:
                break
        if not conflict:
            return CellularAutomaton(group.rank, q, memory, _fill_table(q, len(memory), realized))
        logger.debug(f"configuration map over {group} is not local at radius {m}")
    raise NotLocal(bound, witnesses)


def synthesize_ca(f: Union[WindowMap, Callable[[FiniteConfiguration], Configuration]], bound: int, q: int = 2,
                  group: Optional[MarkedGroup] = None, minimize: bool = False,
                  cap: Optional[int] = None) -> CellularAutomaton:
    """black-box equivariant map 에서 가장 작은 ball memory 의 CA 를 찾음

    f 는 WindowMap 이거나 유한군 group 위 configuration map.
    실현되지 않은 table 항목은 settings.extension_symbol 로 채움.
    """
    with metrics.timed("ca.synthesize"):
        if isinstance(f, WindowMap):
            tau = _synthesize_from_window_map(f, bound, q, cap)
        else:
            if group is None:
                raise DomainError("a configuration map needs the finite group it acts on")
            group.require_finite("rule synthesis")
            tau = _synthesize_from_configuration_map(f, group, bound, q, cap)
    logger.info(f"synthesized CA with memory radius {tau.radius}")
    return minimize_memory(tau) if minimize else tau


# ===== Finite quotients =====

@dataclass(frozen=True)
class GroupCellularAutomaton:
    """A^G 위의 CA. memory 는 G 의 원소"""
    group: MarkedGroup
    q: int
    memory: Tuple[Element, ...]
    rule: Tuple[int, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        self.group.require_finite("group cellular automaton")
        for g in self.memory:
            self.group.check_element(g)
        if len(set(self.memory)) != len(self.memory):
            raise DomainError(f"memory elements must be distinct: {self.memory}")
        _check_table(self.q, len(self.memory), self.rule)

    def local(self, symbols: Sequence[int]) -> int:
        return self.rule[tuple_index(symbols, self.q)]

    def apply(self, x: FiniteConfiguration) -> FiniteConfiguration:
        if x.group != self.group:
            raise RankMismatch(f"configuration over {x.group} for an automaton over {self.group}")
        check_alphabet(x, self.q)
        neighbours = _neighbour_table(self.group, self.memory)
        return x.replace_values(_apply_table(self.rule, self.q, x.values, neighbours))

    def compose(self, other: "GroupCellularAutomaton") -> "GroupCellularAutomaton":
        """self ∘ other"""
        if other.group != self.group or other.q != self.q:
            raise AlphabetMismatch(f"cannot compose automata over {self.group}/{self.q} and {other.group}/{other.q}")
        memory: List[Element] = []
        for t in self.memory:
            for s in other.memory:
                ts = self.group.multiply(t, s)
                if ts not in memory:
                    memory.append(ts)
        position = {g: i for i, g in enumerate(memory)}
        inner = [[position[self.group.multiply(t, s)] for s in other.memory] for t in self.memory]
        rule = tabulate(
            self.q, len(memory),
            lambda sym: self.local([other.local([sym[i] for i in row]) for row in inner]),
        )
        return GroupCellularAutomaton(self.group, self.q, tuple(memory), rule)

    def __str__(self) -> str:
        return self.name or f"CA over {self.group} (memory={list(self.memory)})"


def descend_ca(tau: CellularAutomaton, group: MarkedGroup) -> GroupCellularAutomaton:
    """τ|Fix(N) 을 A^G 에서 읽은 것: (ρ*)^{-1} ∘ τ ∘ ρ*"""
    if tau.rank != group.rank:
        raise RankMismatch(f"{tau} has rank {tau.rank}, {group} has rank {group.rank}")
    elements: List[Element] = []
    for s in tau.memory:
        g = group.evaluate(s)
        if g not in elements:
            elements.append(g)
    position = {g: i for i, g in enumerate(elements)}
    picks = [position[group.evaluate(s)] for s in tau.memory]
    rule = tabulate(tau.q, len(elements), lambda t: tau.local([t[i] for i in picks]))
    return GroupCellularAutomaton(group, tau.q, tuple(elements), rule, name=f"{tau} on {group}" if tau.name else "")


def pullback_ca(tau: GroupCellularAutomaton) -> CellularAutomaton:
    """τ* = ρ* ∘ τ ∘ (ρ*)^{-1}: memory 를 shortlex 최소 lift 로"""
    memory = tuple(tau.group.lift(g) for g in tau.memory)
    return CellularAutomaton(tau.group.rank, tau.q, memory, tau.rule, name=f"{tau.name}*" if tau.name else "")


def group_ca_from_words(group: MarkedGroup, tau: CellularAutomaton) -> GroupCellularAutomaton:
    """word memory 가 G 에서 서로 다른 원소로 갈 때 같은 table 을 그대로 씀"""
    elements = tuple(group.evaluate(s) for s in tau.memory)
    if len(set(elements)) != len(elements):
        raise ElementOutOfRange(f"memory of {tau} collapses in {group}; use descend_ca")
    return GroupCellularAutomaton(group, tau.q, elements, tau.rule, name=tau.name)
