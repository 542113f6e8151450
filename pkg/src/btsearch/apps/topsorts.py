"""Enumeration of the topological sorts (linear extensions) of a DAG.

Vertices of the search are linear extensions; two extensions are adjacent
when they differ by one swap of neighbouring elements, which is legal
exactly when the swapped pair is unrelated in the partial order.  The tree
root is the lexicographically smallest extension (greedy smallest-available
element), and the local search moves a permutation toward the root by
bubbling the first greedily-misplaced element one step left.  That step is
always legal and strictly shrinks the distance to the root, so every
extension has a unique finite path to it.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import InputFormatError, NodeDecodeError
from ..reverse_search import AdjacencyOracle
from ..search_api import ApplicationDescriptor, JobNode
from .base import EnumerationApplication

Perm = tuple[int, ...]


@dataclass(frozen=True)
class Poset:
    """Elements 1..n with precedence pairs (a before b), acyclic."""

    n: int
    relations: frozenset[tuple[int, int]]


def parse_poset(data: bytes | str) -> Poset:
    """Parse ``n m`` followed by m lines ``a b`` (1-based, a precedes b)."""
    text = data.decode("ascii", errors="replace") if isinstance(data, bytes) else data
    rows = [line.split("#", 1)[0].strip() for line in text.splitlines()]
    rows = [(i + 1, r) for i, r in enumerate(rows) if r]
    if not rows:
        raise InputFormatError("poset input is empty")
    lineno, header = rows[0]
    parts = header.split()
    if len(parts) != 2:
        raise InputFormatError(f"line {lineno}: expected 'n m' header, got {header!r}")
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise InputFormatError(f"line {lineno}: bad header numbers: {exc}") from exc
    if n < 1 or m < 0:
        raise InputFormatError(f"line {lineno}: need n >= 1 and m >= 0")
    if len(rows) - 1 != m:
        raise InputFormatError(f"expected {m} relation lines, found {len(rows) - 1}")
    relations = set()
    for lineno, row in rows[1:]:
        parts = row.split()
        if len(parts) != 2:
            raise InputFormatError(f"line {lineno}: expected 'a b', got {row!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise InputFormatError(f"line {lineno}: bad relation: {exc}") from exc
        if not (1 <= a <= n and 1 <= b <= n) or a == b:
            raise InputFormatError(f"line {lineno}: relation {a} {b} out of range")
        relations.add((a, b))
    poset = Poset(n=n, relations=frozenset(relations))
    _closure(poset)  # raises on cycles
    return poset


def _closure(poset: Poset) -> list[int]:
    """Bitmask transitive closure: succ[a] has bit b set when a precedes b.

    Raises InputFormatError if the relation digraph has a cycle.
    """
    n = poset.n
    succ = [0] * (n + 1)
    adj: list[list[int]] = [[] for _ in range(n + 1)]
    indeg = [0] * (n + 1)
    for a, b in poset.relations:
        adj[a].append(b)
        indeg[b] += 1
    order = [v for v in range(1, n + 1) if indeg[v] == 0]
    head = 0
    while head < len(order):
        v = order[head]
        head += 1
        for w in adj[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                order.append(w)
    if len(order) != n:
        raise InputFormatError("relation digraph contains a cycle")
    for v in reversed(order):
        mask = 0
        for w in adj[v]:
            mask |= (1 << w) | succ[w]
        succ[v] = mask
    return succ


class TopsortsOracle(AdjacencyOracle):
    """Adjacent-transposition reverse search over linear extensions."""

    def __init__(self, poset: Poset) -> None:
        self.n = poset.n
        self.max_degree = poset.n - 1
        self._succ = _closure(poset)
        # pred[e]: bitmask of elements that must precede e
        self._pred = [0] * (poset.n + 1)
        for a in range(1, poset.n + 1):
            for b in range(1, poset.n + 1):
                if self._succ[a] >> b & 1:
                    self._pred[b] |= 1 << a
        self._root = self._greedy_root()

    def _greedy_root(self) -> Perm:
        placed = 0
        out = []
        remaining = set(range(1, self.n + 1))
        for _ in range(self.n):
            e = min(x for x in remaining if self._pred[x] & ~placed == 0)
            out.append(e)
            placed |= 1 << e
            remaining.remove(e)
        return tuple(out)

    def root(self) -> Perm:
        return self._root

    def is_extension(self, perm: Perm) -> bool:
        if sorted(perm) != list(range(1, self.n + 1)):
            return False
        placed = 0
        for e in perm:
            if self._pred[e] & ~placed:
                return False
            placed |= 1 << e
        return True

    def adjacent(self, perm: Perm, j: int) -> Perm | None:
        # Swap positions j-1 and j (0-based); legal unless the left element
        # is required before the right one.
        a, b = perm[j - 1], perm[j]
        if self._succ[a] & (1 << b):
            return None
        return perm[: j - 1] + (b, a) + perm[j + 1 :]

    def parent(self, perm: Perm) -> tuple[Perm, int] | None:
        if perm == self._root:
            return None
        placed = 0
        for t, x in enumerate(perm):
            g = self._greedy_next(placed)
            if g != x:
                p = perm.index(g)  # position of the wanted element, > t
                parent = perm[: p - 1] + (perm[p], perm[p - 1]) + perm[p + 1 :]
                return parent, p
            placed |= 1 << x
        raise NodeDecodeError("permutation is not a linear extension of this poset")

    def _greedy_next(self, placed: int) -> int:
        for e in range(1, self.n + 1):
            if placed & (1 << e):
                continue
            if self._pred[e] & ~placed == 0:
                return e
        raise NodeDecodeError("no greedy continuation; corrupted permutation")


def topsorts_oracle(poset: Poset) -> TopsortsOracle:
    return TopsortsOracle(poset)


def format_poset(poset: Poset) -> str:
    """Inverse of :func:`parse_poset`."""
    lines = [f"{poset.n} {len(poset.relations)}"]
    lines += [f"{a} {b}" for a, b in sorted(poset.relations)]
    return "\n".join(lines) + "\n"


def count_extensions(poset: Poset, config=None) -> int:
    """Number of linear extensions, via a count-only parallel run."""
    from ..budget import SchedulerConfig
    from ..engine import run

    app = TopsortsApplication(count_only=True)
    report = run(app, format_poset(poset).encode("ascii"), config or SchedulerConfig())
    return report.total_output_count


@dataclass(frozen=True)
class _Global:
    poset: Poset
    oracle: TopsortsOracle


class TopsortsApplication(EnumerationApplication):
    descriptor = ApplicationDescriptor(name="topsorts", supports_shared_data=False)

    def init(self, input_bytes: bytes) -> tuple[_Global, JobNode]:
        poset = parse_poset(input_bytes)
        oracle = TopsortsOracle(poset)
        gd = _Global(poset=poset, oracle=oracle)
        return gd, JobNode(payload=self.encode_node(oracle.root()), origin_depth=0)

    def oracle_for(self, global_data: _Global) -> TopsortsOracle:
        return global_data.oracle

    def format_vertex(self, global_data: _Global, vertex: Perm) -> str:
        return " ".join(str(e) for e in vertex)

    def encode_node(self, vertex: Perm) -> bytes:
        return " ".join(str(e) for e in vertex).encode("ascii")

    def decode_node(self, payload: bytes, global_data: _Global) -> Perm:
        try:
            perm = tuple(int(tok) for tok in payload.decode("ascii").split())
        except (UnicodeDecodeError, ValueError) as exc:
            raise NodeDecodeError(f"bad permutation payload: {exc}") from exc
        if not global_data.oracle.is_extension(perm):
            raise NodeDecodeError("payload is not a linear extension of this poset")
        return perm
