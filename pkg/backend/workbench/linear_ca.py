# backend/workbench/linear_ca.py
"""F_p 위 선형 CA, 유한 quotient 행렬 실현, 역 kernel, 군환 K[G] 의 stable finiteness"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple
import logging
import random

import numpy as np

from . import finite_field as ff
from .marked_groups import Element, FreeWord, MarkedGroup, cyclic_group
from .ca_engine import CellularAutomaton, tabulate
from .shared.config import resolve_cap, settings
from .shared.error_handler import (
    AlphabetMismatch,
    DimensionMismatch,
    DomainError,
    NotInvertible,
    NotOneSidedInverse,
    PropertyViolation,
    RankMismatch,
    ResourceCapExceeded,
)
from .shared.metrics import metrics

logger = logging.getLogger(__name__)

Matrix = Tuple[Tuple[int, ...], ...]


def _freeze(M: np.ndarray) -> Matrix:
    return tuple(tuple(int(v) for v in row) for row in M)


# ===== Kernel =====

@dataclass(frozen=True)
class LinearKernel:
    """τ(x)(g) = Σ_s M_s x(g s). support 는 shortlex 순, 0 행렬 없음"""
    p: int
    dim: int
    support: Tuple[FreeWord, ...]
    matrices: Tuple[Matrix, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        ff.check_prime(self.p)
        if not 1 <= self.dim <= settings.max_dimension:
            raise DimensionMismatch(f"dimension must be in 1..{settings.max_dimension}, got {self.dim}")
        if len(self.support) != len(self.matrices):
            raise DimensionMismatch("one matrix per support word")
        if len(set(self.support)) != len(self.support):
            raise DomainError("support words must be distinct")
        for M in self.matrices:
            if len(M) != self.dim or any(len(row) != self.dim for row in M):
                raise DimensionMismatch(f"kernel matrices must be {self.dim}x{self.dim}")
            if any(not 0 <= v < self.p for row in M for v in row):
                raise AlphabetMismatch(f"matrix entries must be reduced mod {self.p}")
            if not any(v for row in M for v in row):
                raise DomainError("zero matrices are not kept in the support")

    @classmethod
    def build(cls, p: int, dim: int, terms: Iterable[Tuple[FreeWord, object]], name: str = "") -> "LinearKernel":
        """같은 word 는 합치고 0 행렬은 버림"""
        acc: Dict[FreeWord, np.ndarray] = {}
        for word, M in terms:
            M = ff.as_field_array(M, p).reshape(dim, dim)
            acc[word] = (acc.get(word, np.zeros((dim, dim), dtype=np.int64)) + M) % p
        support = tuple(sorted(w for w, M in acc.items() if M.any()))
        return cls(p, dim, support, tuple(_freeze(acc[w]) for w in support), name=name)

    def items(self) -> Iterable[Tuple[FreeWord, np.ndarray]]:
        for w, M in zip(self.support, self.matrices):
            yield w, np.array(M, dtype=np.int64)

    @property
    def radius(self) -> int:
        return max((len(w) for w in self.support), default=0)

    @property
    def rank(self) -> int:
        return max((w.max_generator() for w in self.support), default=1)

    def __str__(self) -> str:
        return self.name or f"kernel(p={self.p}, dim={self.dim}, support={' '.join(str(w) for w in self.support)})"


def identity_kernel(p: int = 2, dim: int = 1) -> LinearKernel:
    return LinearKernel.build(p, dim, [(FreeWord.identity(), ff.identity(dim))], name="identity")


def zero_kernel(p: int = 2, dim: int = 1) -> LinearKernel:
    return LinearKernel(p, dim, (), (), name="zero")


def shift_kernel(word: FreeWord, p: int = 2, dim: int = 1) -> LinearKernel:
    return LinearKernel.build(p, dim, [(word, ff.identity(dim))], name=f"shift {word}")


def scalar_kernel(p: int, coefficients: Mapping[FreeWord, int], name: str = "") -> LinearKernel:
    return LinearKernel.build(p, 1, [(w, [[c]]) for w, c in coefficients.items()], name=name)


def kernel_convolution(k1: LinearKernel, k2: LinearKernel) -> LinearKernel:
    """κ1 ⋆ κ2 = kernel of τ1 ∘ τ2: (t·s) ↦ M_t N_s"""
    if (k1.p, k1.dim) != (k2.p, k2.dim):
        raise DimensionMismatch(f"cannot compose {k1} with {k2}")
    terms = [(t * s, ff.matmul(M, N, k1.p)) for t, M in k1.items() for s, N in k2.items()]
    return LinearKernel.build(k1.p, k1.dim, terms)


# ===== Vector configurations =====

@dataclass(frozen=True)
class VectorConfiguration:
    """x ∈ (F_p^n)^G. values[g] 는 길이 n 벡터"""
    group: MarkedGroup
    p: int
    dim: int
    values: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        self.group.require_finite("vector configuration")
        if len(self.values) != self.group.order:
            raise DomainError(f"configuration over {self.group} needs {self.group.order} vectors")
        if any(len(v) != self.dim for v in self.values):
            raise DimensionMismatch(f"all vectors must have dimension {self.dim}")
        if any(not 0 <= c < self.p for v in self.values for c in v):
            raise AlphabetMismatch(f"entries must be reduced mod {self.p}")

    @classmethod
    def from_array(cls, group: MarkedGroup, p: int, array) -> "VectorConfiguration":
        A = ff.as_field_array(array, p).reshape(group.order, -1)
        return cls(group, p, A.shape[1], _freeze(A))

    @classmethod
    def periodic(cls, values: Sequence[Sequence[int]], p: int) -> "VectorConfiguration":
        return cls.from_array(cyclic_group(len(values)), p, values)

    @classmethod
    def scalar(cls, group: MarkedGroup, p: int, values: Sequence[int]) -> "VectorConfiguration":
        return cls.from_array(group, p, [[v] for v in values])

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=np.int64).reshape(self.group.order, self.dim)

    def flatten(self) -> np.ndarray:
        """index g*n + i"""
        return self.as_array().reshape(-1)

    def __str__(self) -> str:
        if self.dim == 1:
            return ",".join(str(v[0]) for v in self.values)
        return ";".join(",".join(str(c) for c in v) for v in self.values)


def _check_kernel_group(kernel: LinearKernel, group: MarkedGroup):
    if kernel.rank > group.rank:
        raise RankMismatch(f"{kernel} uses generators beyond the rank {group.rank} of {group}")


def lin_apply(kernel: LinearKernel, x: VectorConfiguration) -> VectorConfiguration:
    """output(g) = Σ_s M_s x(g s)"""
    if (x.p, x.dim) != (kernel.p, kernel.dim):
        raise DimensionMismatch(f"{kernel} cannot act on F_{x.p}^{x.dim} configurations")
    group = x.group
    _check_kernel_group(kernel, group)
    X = x.as_array()
    out = np.zeros_like(X)
    for word, M in kernel.items():
        s = group.evaluate(word)
        neighbours = [group.multiply(g, s) for g in group.elements()]
        out = (out + X[neighbours] @ M.T) % kernel.p
    return VectorConfiguration.from_array(group, kernel.p, out)


def lin_matrix(kernel: LinearKernel, group: MarkedGroup) -> np.ndarray:
    """block(g, h) = Σ {M_s : s 가 g^{-1}h 로 평가}"""
    group.require_finite("kernel matrix")
    _check_kernel_group(kernel, group)
    n = kernel.dim
    size = group.order * n
    A = np.zeros((size, size), dtype=np.int64)
    for word, M in kernel.items():
        s = group.evaluate(word)
        for g in group.elements():
            h = group.multiply(g, s)
            A[g * n:(g + 1) * n, h * n:(h + 1) * n] += M
    metrics.increment_counter("linear.matrix_entries", size * size)
    return A % kernel.p


@dataclass(frozen=True)
class LinearDecision:
    injective: bool
    surjective: bool
    rank: int
    size: int

    @property
    def verdict(self) -> str:
        if self.injective and self.surjective:
            return "bijective"
        return "non-injective, non-surjective"

    def to_dict(self) -> dict:
        return {
            "injective": self.injective,
            "surjective": self.surjective,
            "rank": self.rank,
            "size": self.size,
            "verdict": self.verdict,
        }


def lin_decide(kernel: LinearKernel, group: MarkedGroup) -> LinearDecision:
    """정사각 행렬이므로 injective ⟺ surjective ⟺ full rank"""
    A = lin_matrix(kernel, group)
    r = ff.rank(A, kernel.p)
    size = A.shape[0]
    injective = r == A.shape[1]
    surjective = r == A.shape[0]
    if injective != surjective:
        raise PropertyViolation(f"{kernel} on {group}: injective={injective}, surjective={surjective}")
    logger.debug(f"{kernel} on {group}: rank {r}/{size}")
    return LinearDecision(injective, surjective, r, size)


def lin_inverse_kernel(kernel: LinearKernel, group: MarkedGroup) -> LinearKernel:
    """역행렬의 identity block row 에서 kernel 을 읽음"""
    A = lin_matrix(kernel, group)
    try:
        B = ff.inverse(A, kernel.p)
    except NotInvertible:
        raise NotInvertible(f"{kernel} is not invertible on {group}")
    n = kernel.dim
    e = group.identity
    row = B[e * n:(e + 1) * n]
    terms = [(group.lift(h), row[:, h * n:(h + 1) * n]) for h in group.elements()]
    return LinearKernel.build(kernel.p, n, terms, name=f"{kernel.name}^-1" if kernel.name else "")


# ===== Bridge to symbolic CA =====

def encode_vector(v: Sequence[int], p: int) -> int:
    """첫 좌표가 최상위 p 진 자리"""
    symbol = 0
    for c in v:
        symbol = symbol * p + int(c)
    return symbol


def decode_symbol(symbol: int, p: int, dim: int) -> Tuple[int, ...]:
    digits = []
    for _ in range(dim):
        digits.append(symbol % p)
        symbol //= p
    return tuple(reversed(digits))


def kernel_to_ca(kernel: LinearKernel, rank: Optional[int] = None, cap: Optional[int] = None) -> CellularAutomaton:
    """alphabet F_p^n 을 0..p^n-1 로 부호화한 CA"""
    q = kernel.p ** kernel.dim
    width = len(kernel.support)
    limit = resolve_cap(cap, "pattern_cap")
    if q ** width > limit:
        raise ResourceCapExceeded(f"symbolic table of {kernel}", q ** width, limit)
    matrices = [M for _, M in kernel.items()]

    def local(symbols):
        total = np.zeros(kernel.dim, dtype=np.int64)
        for M, s in zip(matrices, symbols):
            total = total + M @ np.array(decode_symbol(s, kernel.p, kernel.dim), dtype=np.int64)
        return encode_vector(total % kernel.p, kernel.p)

    return CellularAutomaton(
        rank or kernel.rank, q, kernel.support, tabulate(q, width, local, cap), name=kernel.name,
    )


def encode_configuration(x: VectorConfiguration) -> Tuple[int, ...]:
    return tuple(encode_vector(v, x.p) for v in x.values)


# ===== Group algebra K[G] =====

@dataclass(frozen=True)
class GroupAlgebraElement:
    """Σ c_g g. coefficients[g] = c_g"""
    group: MarkedGroup
    p: int
    coefficients: Tuple[int, ...]

    def __post_init__(self):
        self.group.require_finite("group algebra")
        if len(self.coefficients) != self.group.order:
            raise DimensionMismatch(f"element of F_{self.p}[{self.group}] needs {self.group.order} coefficients")

    @classmethod
    def from_terms(cls, group: MarkedGroup, p: int, terms: Iterable[Tuple[int, Element]]) -> "GroupAlgebraElement":
        c = [0] * group.order
        for coeff, g in terms:
            c[group.check_element(g)] = (c[g] + coeff) % p
        return cls(group, p, tuple(c))

    @classmethod
    def zero(cls, group: MarkedGroup, p: int) -> "GroupAlgebraElement":
        return cls(group, p, (0,) * group.order)

    @classmethod
    def element(cls, group: MarkedGroup, p: int, g: Element, coeff: int = 1) -> "GroupAlgebraElement":
        return cls.from_terms(group, p, [(coeff, g)])

    @classmethod
    def one(cls, group: MarkedGroup, p: int) -> "GroupAlgebraElement":
        return cls.element(group, p, group.identity)

    def _check(self, other: "GroupAlgebraElement"):
        if other.group != self.group or other.p != self.p:
            raise DimensionMismatch(f"F_{self.p}[{self.group}] and F_{other.p}[{other.group}]")

    def __add__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        self._check(other)
        return GroupAlgebraElement(
            self.group, self.p, tuple((a + b) % self.p for a, b in zip(self.coefficients, other.coefficients))
        )

    def __neg__(self) -> "GroupAlgebraElement":
        return GroupAlgebraElement(self.group, self.p, tuple((-a) % self.p for a in self.coefficients))

    def __sub__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        return self + (-other)

    def __mul__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        self._check(other)
        c = [0] * self.group.order
        for g, a in enumerate(self.coefficients):
            if not a:
                continue
            for h, b in enumerate(other.coefficients):
                if b:
                    k = self.group.multiply(g, h)
                    c[k] = (c[k] + a * b) % self.p
        return GroupAlgebraElement(self.group, self.p, tuple(c))

    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def terms(self) -> List[Tuple[int, Element]]:
        return [(c, g) for g, c in enumerate(self.coefficients) if c]

    def regular_matrix(self) -> np.ndarray:
        """좌 정칙표현 λ(a): h -> a h"""
        n = self.group.order
        R = np.zeros((n, n), dtype=np.int64)
        for g, a in enumerate(self.coefficients):
            if a:
                for h in range(n):
                    R[self.group.multiply(g, h), h] += a
        return R % self.p

    def __str__(self) -> str:
        return " + ".join(f"{c}*{g}" for c, g in self.terms()) or "0"


@dataclass(frozen=True)
class GroupAlgebraMatrix:
    """K[G] 위 ℓ×ℓ 행렬"""
    group: MarkedGroup
    p: int
    entries: Tuple[Tuple[GroupAlgebraElement, ...], ...]

    def __post_init__(self):
        ff.check_prime(self.p)
        size = len(self.entries)
        if size == 0 or any(len(row) != size for row in self.entries):
            raise DimensionMismatch("group algebra matrices must be square and non-empty")
        for row in self.entries:
            for a in row:
                if a.group != self.group or a.p != self.p:
                    raise DimensionMismatch(f"entry outside F_{self.p}[{self.group}]")

    @property
    def size(self) -> int:
        return len(self.entries)

    @classmethod
    def identity(cls, group: MarkedGroup, p: int, size: int) -> "GroupAlgebraMatrix":
        zero, one = GroupAlgebraElement.zero(group, p), GroupAlgebraElement.one(group, p)
        return cls(group, p, tuple(tuple(one if i == j else zero for j in range(size)) for i in range(size)))

    @classmethod
    def diagonal(cls, diagonal: Sequence[GroupAlgebraElement]) -> "GroupAlgebraMatrix":
        group, p = diagonal[0].group, diagonal[0].p
        zero = GroupAlgebraElement.zero(group, p)
        n = len(diagonal)
        return cls(group, p, tuple(tuple(diagonal[i] if i == j else zero for j in range(n)) for i in range(n)))

    def replace(self, i: int, j: int, value: GroupAlgebraElement) -> "GroupAlgebraMatrix":
        rows = [list(row) for row in self.entries]
        rows[i][j] = value
        return GroupAlgebraMatrix(self.group, self.p, tuple(tuple(r) for r in rows))

    def __matmul__(self, other: "GroupAlgebraMatrix") -> "GroupAlgebraMatrix":
        if other.size != self.size or other.group != self.group or other.p != self.p:
            raise DimensionMismatch(f"cannot multiply {self.size}x{self.size} by {other.size}x{other.size}")
        n = self.size
        zero = GroupAlgebraElement.zero(self.group, self.p)
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = zero
                for k in range(n):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            rows.append(tuple(row))
        return GroupAlgebraMatrix(self.group, self.p, tuple(rows))

    def is_identity(self) -> bool:
        return self == GroupAlgebraMatrix.identity(self.group, self.p, self.size)

    def regular_representation(self) -> np.ndarray:
        """(|G|ℓ)×(|G|ℓ) 행렬, block (i, j) = λ(entries[i][j])"""
        blocks = [[a.regular_matrix() for a in row] for row in self.entries]
        return np.block(blocks) % self.p


def random_unit_pair(group: MarkedGroup, p: int, size: int, rng: random.Random,
                     steps: int = 6) -> Tuple[GroupAlgebraMatrix, GroupAlgebraMatrix]:
    """L·M = I 인 (M, L). M 은 대각 unit (c·g) 과 elementary transvection 의 곱"""
    identity = GroupAlgebraMatrix.identity(group, p, size)
    M, L = identity, identity
    for _ in range(steps):
        if size == 1 or rng.random() < 0.4:
            diag, inv = [], []
            for _ in range(size):
                g, c = rng.choice(list(group.elements())), rng.randrange(1, p)
                diag.append(GroupAlgebraElement.element(group, p, g, c))
                inv.append(GroupAlgebraElement.element(group, p, group.inverse(g), ff.mod_inverse(c, p)))
            E, E_inv = GroupAlgebraMatrix.diagonal(diag), GroupAlgebraMatrix.diagonal(inv)
        else:
            i, j = rng.sample(range(size), 2)
            a = GroupAlgebraElement(group, p, tuple(rng.randrange(p) for _ in group.elements()))
            E = identity.replace(i, j, a)
            E_inv = identity.replace(i, j, -a)
        M = M @ E
        L = E_inv @ L
    return M, L


class WitnessVerdict(str, Enum):
    TWO_SIDED_CONFIRMED = "TwoSidedConfirmed"


@dataclass(frozen=True)
class StableFinitenessWitness:
    verdict: WitnessVerdict
    inverse: GroupAlgebraMatrix
    representation_size: int


def stable_finiteness_witness(M: GroupAlgebraMatrix, L: GroupAlgebraMatrix,
                              side: str = "left") -> StableFinitenessWitness:
    """side='left': L·M = I 를 확인한 뒤 M·L = I 를 정칙표현으로 확인"""
    if side not in ("left", "right"):
        raise DomainError(f"side must be 'left' or 'right', got {side!r}")
    given, claimed = (L @ M, (M, L)) if side == "left" else (M @ L, (L, M))
    if not given.is_identity():
        raise NotOneSidedInverse(f"{side} inverse check failed: product is not the identity")
    first, second = claimed
    A, B = first.regular_representation(), second.regular_representation()
    product = ff.matmul(A, B, M.p)
    if not np.array_equal(product, ff.identity(A.shape[0])):
        raise PropertyViolation(f"one-sided inverse over F_{M.p}[{M.group}] is not two-sided")
    if not (first @ second).is_identity():
        raise PropertyViolation("regular representation and group algebra product disagree")
    logger.info(f"two-sided inverse confirmed over F_{M.p}[{M.group}] at size {M.size}")
    return StableFinitenessWitness(WitnessVerdict.TWO_SIDED_CONFIRMED, L, A.shape[0])
