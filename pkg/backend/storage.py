# backend/storage.py - 파일 형식 (group / rule / kernel / group algebra matrix / window CSV)

import csv
import io
import os
from itertools import product
from pathlib import Path
from typing import List, Tuple

from workbench.marked_groups import (
    FreeWord,
    MarkedGroup,
    ball_size,
    cyclic_group,
    finite_group,
    finite_group_from_permutations,
    free_group,
    symmetric_group,
    trivial_group,
    zd_group,
)
from workbench.uniform_windows import WindowPattern, WindowSet
from workbench.ca_engine import CellularAutomaton, eca
from workbench.linear_ca import GroupAlgebraElement, GroupAlgebraMatrix, LinearKernel
from workbench.shared.config import DUMPS_DIR, REPORTS_DIR, settings
from workbench.shared.error_handler import DomainError, FormatError


def ensure_directories():
    """dump / report 디렉토리 생성"""
    os.makedirs(DUMPS_DIR, exist_ok=True)
    os.makedirs(REPORTS_DIR, exist_ok=True)


def read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        raise FormatError(f"cannot read {path}: {e.strerror}")


def write_text(path: str, text: str):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)


def _content_lines(text: str) -> List[Tuple[int, str]]:
    """(줄 번호, 내용). 빈 줄과 # 주석 제외"""
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((number, line))
    return lines


def _int(token: str, what: str, number: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise FormatError(f"line {number}: {what} must be an integer, got {token!r}")


def _header(lines: List[Tuple[int, str]], index: int, key: str) -> List[str]:
    if index >= len(lines):
        raise FormatError(f"missing '{key}' line")
    number, line = lines[index]
    parts = line.split()
    if parts[0] != key:
        raise FormatError(f"line {number}: expected '{key} ...', got {line!r}")
    return parts[1:]


def _word(token: str, number: int) -> FreeWord:
    try:
        return FreeWord.parse(token)
    except FormatError as e:
        raise FormatError(f"line {number}: {e}")


# ===== Groups =====

def parse_group_file(text: str, name: str = "") -> MarkedGroup:
    """두 형식:

    order n / generators i j ... / table / n 줄의 곱셈표
    permutation σ(0) σ(1) ... (생성자마다 한 줄)
    """
    lines = _content_lines(text)
    if not lines:
        raise FormatError("empty group file")
    if lines[0][1].startswith("permutation"):
        gens = []
        for number, line in lines:
            parts = line.split()
            if parts[0] != "permutation":
                raise FormatError(f"line {number}: expected 'permutation ...'")
            gens.append([_int(t, "image", number) for t in parts[1:]])
        try:
            return finite_group_from_permutations(gens, name=name)
        except DomainError as e:
            raise FormatError(str(e))
    order = _header(lines, 0, "order")
    if len(order) != 1:
        raise FormatError("'order' takes one integer")
    n = _int(order[0], "order", lines[0][0])
    generators = [_int(t, "generator", lines[1][0]) for t in _header(lines, 1, "generators")]
    _header(lines, 2, "table")
    rows = lines[3:]
    if len(rows) != n:
        raise FormatError(f"table needs {n} rows, got {len(rows)}")
    table = [[_int(t, "table entry", number) for t in line.split()] for number, line in rows]
    try:
        return finite_group(table, generators, name=name)
    except DomainError as e:
        raise FormatError(str(e))


def dump_group_file(group: MarkedGroup) -> str:
    group.require_finite("group file")
    generators = [group.oracle.generator_image(i + 1) for i in range(group.rank)]
    lines = [f"order {group.order}", "generators " + " ".join(map(str, generators)), "table"]
    for g in group.elements():
        lines.append(" ".join(str(group.multiply(g, h)) for h in group.elements()))
    return "\n".join(lines) + "\n"


def parse_group_spec(spec: str) -> MarkedGroup:
    """cyclic:n, zd:d, free:k, sym:n, trivial, finite:<path>"""
    kind, _, arg = spec.strip().partition(":")
    if kind == "trivial":
        return trivial_group()
    if kind == "finite":
        return parse_group_file(read_text(arg), name=spec)
    if not arg:
        raise FormatError(f"group shorthand {spec!r} needs an argument")
    try:
        value = int(arg)
    except ValueError:
        raise FormatError(f"group shorthand {spec!r} needs an integer argument")
    if kind == "cyclic":
        return cyclic_group(value)
    if kind == "zd":
        if not 1 <= value <= settings.max_dimension:
            raise DomainError(f"zd dimension must be in 1..{settings.max_dimension}")
        return zd_group(value)
    if kind == "free":
        return free_group(value)
    if kind == "sym":
        return symmetric_group(value)
    raise FormatError(f"unknown group shorthand {spec!r}")


# ===== Rules =====

def _symbols(text: str, number: int) -> Tuple[int, ...]:
    return tuple(_int(t, "symbol", number) for t in text.replace(",", " ").split())


def parse_rule_file(text: str) -> CellularAutomaton:
    """rank k / alphabet q / memory s1 .. sd / q^d 줄의 'tuple -> symbol' (사전식 순서)

    한 줄짜리 'eca <n>' 도 허용.
    """
    lines = _content_lines(text)
    if not lines:
        raise FormatError("empty rule file")
    if lines[0][1].startswith("eca"):
        parts = lines[0][1].split()
        if len(parts) != 2:
            raise FormatError(f"line {lines[0][0]}: expected 'eca <n>'")
        return eca(_int(parts[1], "rule number", lines[0][0]))
    rank_args = _header(lines, 0, "rank")
    alphabet_args = _header(lines, 1, "alphabet")
    if len(rank_args) != 1 or len(alphabet_args) != 1:
        raise FormatError("'rank' and 'alphabet' take one integer each")
    rank = _int(rank_args[0], "rank", lines[0][0])
    q = _int(alphabet_args[0], "alphabet", lines[1][0])
    memory_number = lines[2][0] if len(lines) > 2 else 0
    memory = tuple(_word(t, memory_number) for t in _header(lines, 2, "memory"))
    entries = lines[3:]
    expected = q ** len(memory)
    if len(entries) != expected:
        raise FormatError(f"rule table needs {expected} lines, got {len(entries)}")
    rule = []
    for i, (number, line) in enumerate(entries):
        left, arrow, right = line.partition("->")
        if not arrow:
            raise FormatError(f"line {number}: expected 'tuple -> symbol'")
        symbols = _symbols(left, number)
        if len(symbols) != len(memory):
            raise FormatError(f"line {number}: tuple needs {len(memory)} symbols")
        index = 0
        for s in symbols:
            index = index * q + s
        if index != i:
            raise FormatError(f"line {number}: tuples must be listed in lexicographic order")
        rule.append(_int(right.strip(), "output symbol", number))
    return CellularAutomaton(rank, q, memory, tuple(rule))


def dump_rule_file(tau: CellularAutomaton) -> str:
    lines = [f"rank {tau.rank}", f"alphabet {tau.q}", "memory " + " ".join(str(w) for w in tau.memory)]
    for t, out in zip(product(range(tau.q), repeat=len(tau.memory)), tau.rule):
        lines.append(f"{','.join(map(str, t))} -> {out}")
    return "\n".join(lines) + "\n"


def parse_rule_spec(spec: str) -> CellularAutomaton:
    """eca:<n> 또는 file:<path>"""
    kind, _, arg = spec.strip().partition(":")
    if kind == "eca":
        try:
            return eca(int(arg))
        except ValueError:
            raise FormatError(f"rule shorthand {spec!r} needs an integer")
    if kind == "file":
        return parse_rule_file(read_text(arg))
    raise FormatError(f"unknown rule shorthand {spec!r}")


# ===== Kernels =====

def parse_kernel_file(text: str) -> LinearKernel:
    """prime p / dim n / 'word: n*n entries row-major'"""
    lines = _content_lines(text)
    prime_args = _header(lines, 0, "prime")
    dim_args = _header(lines, 1, "dim")
    if len(prime_args) != 1 or len(dim_args) != 1:
        raise FormatError("'prime' and 'dim' take one integer each")
    p = _int(prime_args[0], "prime", lines[0][0])
    n = _int(dim_args[0], "dim", lines[1][0])
    terms = []
    for number, line in lines[2:]:
        word, colon, rest = line.partition(":")
        if not colon:
            raise FormatError(f"line {number}: expected 'word: entries'")
        entries = [_int(t, "entry", number) for t in rest.split()]
        if len(entries) != n * n:
            raise FormatError(f"line {number}: expected {n * n} entries, got {len(entries)}")
        terms.append((_word(word, number), [entries[i * n:(i + 1) * n] for i in range(n)]))
    return LinearKernel.build(p, n, terms)


def dump_kernel_file(kernel: LinearKernel) -> str:
    lines = [f"prime {kernel.p}", f"dim {kernel.dim}"]
    for word, M in zip(kernel.support, kernel.matrices):
        lines.append(f"{word}: " + " ".join(str(v) for row in M for v in row))
    return "\n".join(lines) + "\n"


# ===== Group algebra matrices =====

def _parse_algebra_element(text: str, group: MarkedGroup, p: int, number: int) -> GroupAlgebraElement:
    text = text.strip()
    if text == "0":
        return GroupAlgebraElement.zero(group, p)
    terms = []
    for term in text.split(";"):
        coeff, star, element = term.strip().partition("*")
        if not star:
            raise FormatError(f"line {number}: expected 'coeff*element', got {term!r}")
        terms.append((_int(coeff.strip(), "coefficient", number), _int(element.strip(), "element", number)))
    try:
        return GroupAlgebraElement.from_terms(group, p, terms)
    except DomainError as e:
        raise FormatError(f"line {number}: {e}")


def parse_group_algebra_matrix(text: str, group: MarkedGroup, p: int = 2) -> GroupAlgebraMatrix:
    """[prime p] / size l / l 줄, 항목은 '|' 로 구분, 항목 안은 ';' 로 구분된 coeff*element"""
    lines = _content_lines(text)
    if lines and lines[0][1].startswith("prime"):
        p = _int(_header(lines, 0, "prime")[0], "prime", lines[0][0])
        lines = lines[1:]
    size_args = _header(lines, 0, "size")
    size = _int(size_args[0], "size", lines[0][0])
    rows = lines[1:]
    if len(rows) != size:
        raise FormatError(f"matrix needs {size} rows, got {len(rows)}")
    entries = []
    for number, line in rows:
        cells = line.split("|")
        if len(cells) != size:
            raise FormatError(f"line {number}: expected {size} entries, got {len(cells)}")
        entries.append(tuple(_parse_algebra_element(c, group, p, number) for c in cells))
    return GroupAlgebraMatrix(group, p, tuple(entries))


def dump_group_algebra_matrix(M: GroupAlgebraMatrix) -> str:
    lines = [f"prime {M.p}", f"size {M.size}"]
    for row in M.entries:
        cells = []
        for a in row:
            cells.append(";".join(f"{c}*{g}" for c, g in a.terms()) or "0")
        lines.append(" | ".join(cells))
    return "\n".join(lines) + "\n"


# ===== Window CSV =====

def dump_window_csv(windows: WindowSet) -> str:
    """첫 줄 'rank,radius' 값, 둘째 줄 ball word 헤더, 이후 pattern 마다 한 줄 (canonical 순서)"""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["rank", windows.rank, "radius", windows.radius])
    words = WindowPattern(windows.rank, windows.radius, (0,) * ball_size(windows.rank, windows.radius)).words
    writer.writerow([str(w) for w in words])
    for pattern in windows.ordered():
        writer.writerow(pattern.labels)
    return out.getvalue()


def parse_window_csv(text: str) -> WindowSet:
    rows = list(csv.reader(io.StringIO(text)))
    if len(rows) < 2 or len(rows[0]) != 4 or rows[0][0] != "rank" or rows[0][2] != "radius":
        raise FormatError("window CSV must start with 'rank,<k>,radius,<r>'")
    rank = _int(rows[0][1], "rank", 1)
    radius = _int(rows[0][3], "radius", 1)
    expected = [str(w) for w in WindowPattern(rank, radius, (0,) * ball_size(rank, radius)).words]
    if rows[1] != expected:
        raise FormatError("window CSV header does not list the ball in shortlex order")
    patterns = []
    for number, row in enumerate(rows[2:], start=3):
        if not row:
            continue
        patterns.append(WindowPattern(rank, radius, tuple(_int(t, "label", number) for t in row)))
    return WindowSet.of(rank, radius, patterns)
