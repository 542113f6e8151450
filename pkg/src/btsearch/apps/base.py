"""Shared machinery for applications built on reverse search."""

from __future__ import annotations

from typing import Any, Sequence

from ..budget import Budget
from ..reverse_search import AdjacencyOracle, budgeted_search, prune_filter
from ..search_api import Application, JobNode, SearchResult

PRUNE_MODES = {"off": None, "0": 0, "1": 1}


class EnumerationApplication(Application):
    """Reverse-search application: one oracle, one vertex codec, one format.

    Subclasses provide the oracle and vertex handling; this class runs the
    budgeted traversal for a job, applies optional pruning to the unexplored
    list, and packages the result.  Pruned-away chain vertices are emitted
    (and counted) by the pruning job itself so the run-wide partition of
    visits is preserved exactly.
    """

    def __init__(self, prune: str = "off", count_only: bool = False) -> None:
        if prune not in PRUNE_MODES:
            raise ValueError(f"prune must be one of {sorted(PRUNE_MODES)}")
        self.prune_mode = PRUNE_MODES[prune]
        self.count_only = count_only

    # Subclass surface ------------------------------------------------------

    def oracle_for(self, global_data: Any) -> AdjacencyOracle:
        raise NotImplementedError

    def format_vertex(self, global_data: Any, vertex: Any) -> str:
        raise NotImplementedError

    # Application contract --------------------------------------------------

    def search(
        self,
        global_data: Any,
        node: JobNode,
        budget: Budget,
        shared: Sequence[bytes],
    ) -> SearchResult:
        if budget.kind != "nodes":
            raise ValueError(f"{self.descriptor.name} only supports node budgets")
        oracle = self.oracle_for(global_data)
        start = self.decode_node(node.payload, global_data)
        outputs: list[str] = []
        tally = 0

        if self.count_only:
            def sink(vertex: Any, flagged: bool) -> None:
                nonlocal tally
                tally += 1
        else:
            def sink(vertex: Any, flagged: bool) -> None:
                nonlocal tally
                tally += 1
                outputs.append(self.format_vertex(global_data, vertex))

        # The traversal never emits a job's start vertex: every other job's
        # start was already output (flagged) by the job that split it off.
        # The global root has no such parent job, so emit it here, uncounted.
        if start == oracle.root():
            sink(start, False)

        result = budgeted_search(
            oracle,
            start,
            max_depth=budget.max_depth,
            max_nodes=budget.max_nodes,
            sink=sink,
        )
        kept = result.unexplored
        visited = result.count
        if self.prune_mode is not None and kept:
            kept, extra = prune_filter(oracle, kept, self.prune_mode)
            for vertex in extra:
                sink(vertex, False)
            visited += len(extra)
        return SearchResult(
            outputs=outputs,
            output_count=tally,
            unexplored=[
                JobNode(payload=self.encode_node(v), origin_depth=node.origin_depth + 1)
                for v in kept
            ],
            visited=visited,
            shared_delta=[],
        )
