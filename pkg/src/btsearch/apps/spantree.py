"""Enumeration of the spanning trees of a connected graph by edge exchange.

A search vertex is a spanning tree encoded as its sorted edge-index tuple.
Neighbouring trees differ by one exchange: drop a tree edge, add a non-tree
edge across the resulting cut.  The root is the index-lexicographically
least tree (greedy by edge index); the local search removes the
largest-index edge outside the root tree and reconnects with the
smallest-index root edge crossing the cut, which strictly shrinks the
symmetric difference with the root, so the path to the root is finite and
unique.

Oracle index ``j`` ranges over (tree-edge position, non-tree-edge position)
pairs in lexicographic order, positions taken in ascending edge index.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import InputFormatError, NodeDecodeError
from ..reverse_search import AdjacencyOracle
from ..search_api import ApplicationDescriptor, JobNode
from .base import EnumerationApplication

Tree = tuple[int, ...]  # sorted 0-based edge indices


@dataclass(frozen=True)
class Graph:
    """Undirected connected graph; edge index = input order (0-based)."""

    n: int
    edges: tuple[tuple[int, int], ...]

    @property
    def m(self) -> int:
        return len(self.edges)


def parse_graph(data: bytes | str) -> Graph:
    """Parse ``n m`` followed by m lines ``u v`` (1-based vertices)."""
    text = data.decode("ascii", errors="replace") if isinstance(data, bytes) else data
    rows = [line.split("#", 1)[0].strip() for line in text.splitlines()]
    rows = [(i + 1, r) for i, r in enumerate(rows) if r]
    if not rows:
        raise InputFormatError("graph input is empty")
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
        raise InputFormatError(f"expected {m} edge lines, found {len(rows) - 1}")
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, row in rows[1:]:
        parts = row.split()
        if len(parts) != 2:
            raise InputFormatError(f"line {lineno}: expected 'u v', got {row!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise InputFormatError(f"line {lineno}: bad edge: {exc}") from exc
        if not (1 <= u <= n and 1 <= v <= n):
            raise InputFormatError(f"line {lineno}: edge {u} {v} out of range")
        if u == v:
            raise InputFormatError(f"line {lineno}: self-loop {u} {v} not allowed")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise InputFormatError(f"line {lineno}: parallel edge {u} {v}")
        seen.add(key)
        edges.append((u, v))
    graph = Graph(n=n, edges=tuple(edges))
    if not _connected(graph):
        raise InputFormatError("graph is not connected")
    return graph


def _connected(graph: Graph) -> bool:
    if graph.n == 1:
        return True
    adj: list[list[int]] = [[] for _ in range(graph.n + 1)]
    for u, v in graph.edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {1}
    stack = [1]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == graph.n


class SpantreeOracle(AdjacencyOracle):
    """Edge-exchange reverse search over spanning trees."""

    def __init__(self, graph: Graph) -> None:
        self.graph = graph
        self.n_tree = graph.n - 1
        self.n_non = graph.m - self.n_tree
        self.max_degree = self.n_tree * self.n_non
        self._root = self._greedy_root()
        self._rootset = frozenset(self._root)

    def _greedy_root(self) -> Tree:
        parent = list(range(self.graph.n + 1))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        chosen = []
        for idx, (u, v) in enumerate(self.graph.edges):
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
                chosen.append(idx)
        return tuple(chosen)

    def root(self) -> Tree:
        return self._root

    # -- helpers ------------------------------------------------------------

    def _tree_adjacency(self, tree: Tree) -> list[list[tuple[int, int]]]:
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.graph.n + 1)]
        for idx in tree:
            u, v = self.graph.edges[idx]
            adj[u].append((v, idx))
            adj[v].append((u, idx))
        return adj

    def _path_edges(self, tree: Tree, src: int, dst: int) -> set[int]:
        """Edge indices on the unique tree path from src to dst."""
        adj = self._tree_adjacency(tree)
        prev: dict[int, tuple[int, int]] = {src: (0, -1)}
        stack = [src]
        while stack:
            u = stack.pop()
            if u == dst:
                break
            for w, idx in adj[u]:
                if w not in prev:
                    prev[w] = (u, idx)
                    stack.append(w)
        path = set()
        cur = dst
        while cur != src:
            parent, idx = prev[cur]
            path.add(idx)
            cur = parent
        return path

    def is_spanning_tree(self, tree: Tree) -> bool:
        if len(tree) != self.n_tree or len(set(tree)) != self.n_tree:
            return False
        if any(not 0 <= idx < self.graph.m for idx in tree):
            return False
        parent = list(range(self.graph.n + 1))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for idx in tree:
            u, v = self.graph.edges[idx]
            ru, rv = find(u), find(v)
            if ru == rv:
                return False
            parent[ru] = rv
        return True

    def _non_tree(self, tree: Tree) -> list[int]:
        inside = set(tree)
        return [idx for idx in range(self.graph.m) if idx not in inside]

    # -- oracle surface -----------------------------------------------------

    def adjacent(self, tree: Tree, j: int) -> Tree | None:
        if self.n_non == 0:
            return None
        a, b = divmod(j - 1, self.n_non)
        e_out = tree[a]
        e_in = self._non_tree(tree)[b]
        u, v = self.graph.edges[e_in]
        if e_out not in self._path_edges(tree, u, v):
            return None  # exchange would disconnect
        return tuple(sorted(set(tree) - {e_out} | {e_in}))

    def parent(self, tree: Tree) -> tuple[Tree, int] | None:
        if tree == self._root:
            return None
        e_out = max(set(tree) - self._rootset)
        cut = self._cut_side(tree, e_out)
        e_in = min(
            idx
            for idx in self._root
            if (self.graph.edges[idx][0] in cut) != (self.graph.edges[idx][1] in cut)
        )
        parent = tuple(sorted(set(tree) - {e_out} | {e_in}))
        a = parent.index(e_in)
        b = self._non_tree(parent).index(e_out)
        return parent, a * self.n_non + b + 1

    def _cut_side(self, tree: Tree, e_out: int) -> set[int]:
        """Vertices on one side of the cut induced by removing e_out."""
        adj = self._tree_adjacency(tree)
        start = self.graph.edges[e_out][0]
        side = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for w, idx in adj[u]:
                if idx != e_out and w not in side:
                    side.add(w)
                    stack.append(w)
        return side


def spantree_oracle(graph: Graph) -> SpantreeOracle:
    return SpantreeOracle(graph)


def format_graph(graph: Graph) -> str:
    """Inverse of :func:`parse_graph` (edge order preserved)."""
    lines = [f"{graph.n} {graph.m}"]
    lines += [f"{u} {v}" for u, v in graph.edges]
    return "\n".join(lines) + "\n"


def count_spanning_trees(graph: Graph, config=None) -> int:
    """Number of spanning trees, via a count-only parallel run."""
    from ..budget import SchedulerConfig
    from ..engine import run

    app = SpantreeApplication(count_only=True)
    report = run(app, format_graph(graph).encode("ascii"), config or SchedulerConfig())
    return report.total_output_count


@dataclass(frozen=True)
class _Global:
    graph: Graph
    oracle: SpantreeOracle


class SpantreeApplication(EnumerationApplication):
    descriptor = ApplicationDescriptor(name="spantree", supports_shared_data=False)

    def init(self, input_bytes: bytes) -> tuple[_Global, JobNode]:
        graph = parse_graph(input_bytes)
        oracle = SpantreeOracle(graph)
        gd = _Global(graph=graph, oracle=oracle)
        return gd, JobNode(payload=self.encode_node(oracle.root()), origin_depth=0)

    def oracle_for(self, global_data: _Global) -> SpantreeOracle:
        return global_data.oracle

    def format_vertex(self, global_data: _Global, vertex: Tree) -> str:
        return " ".join(str(idx + 1) for idx in vertex)  # 1-based like the input

    def encode_node(self, vertex: Tree) -> bytes:
        return " ".join(str(idx) for idx in vertex).encode("ascii")

    def decode_node(self, payload: bytes, global_data: _Global) -> Tree:
        try:
            tree = tuple(int(tok) for tok in payload.decode("ascii").split())
        except (UnicodeDecodeError, ValueError) as exc:
            raise NodeDecodeError(f"bad tree payload: {exc}") from exc
        if tuple(sorted(tree)) != tree or not global_data.oracle.is_spanning_tree(tree):
            raise NodeDecodeError("payload is not a spanning tree of this graph")
        return tree
