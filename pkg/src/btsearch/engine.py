"""Master/worker/consumer engine with budget-based load balancing.

One master, one consumer, and N workers run as isolated execution contexts
(threads here) that share no mutable state: every interaction travels over
point-to-point FIFO channels as a small immutable message.  Workers block on
their inbox; the master polls non-blockingly, growing the job list from
returned unexplored nodes and shrinking it by assignment until the list is
empty and no worker is marked working.

Shared data is master-mediated: workers send opaque token deltas with each
result, the master merges them (set semantics, global sequence order) and
forwards to each worker exactly the tokens it has not seen, piggybacked on
the next assignment.
"""

from __future__ import annotations

import logging
import queue
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from typing import IO, Sequence

from .budget import Budget, SchedulerConfig, select_budget
from .checkpoint import checkpoint_read, checkpoint_write
from .errors import EngineError, WorkerCrashError
from .search_api import Application, JobNode

logger = logging.getLogger("btsearch")

_IDLE_SLEEP_S = 0.0002


# --------------------------------------------------------------------------
# Messages
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AssignMsg:
    payload: bytes
    origin_depth: int
    max_depth: int | None
    max_nodes: int | None
    budget_kind: str
    shared: tuple[bytes, ...]


@dataclass(frozen=True)
class ResultMsg:
    worker_id: int
    visited: int
    output_count: int
    unexplored: tuple[tuple[bytes, int], ...]  # (payload, origin_depth)
    shared_delta: tuple[bytes, ...]
    halt: bool


@dataclass(frozen=True)
class CrashMsg:
    worker_id: int
    error: str


@dataclass(frozen=True)
class OutputMsg:
    lines: tuple[str, ...]
    verdict: bool = False


@dataclass(frozen=True)
class CountMsg:
    count: int


@dataclass(frozen=True)
class TerminateMsg:
    pass


# --------------------------------------------------------------------------
# Shared store
# --------------------------------------------------------------------------


class SharedStore:
    """Master-side table of opaque shared tokens with per-worker delivery.

    Tokens get strictly increasing sequence numbers (list position);
    duplicates are stored once.  Each worker has a high-water mark so a
    token is delivered to it at most once.
    """

    def __init__(self, num_workers: int) -> None:
        self._tokens: list[bytes] = []
        self._seen: set[bytes] = set()
        self._marks = [0] * num_workers

    def __len__(self) -> int:
        return len(self._tokens)

    @property
    def tokens(self) -> tuple[bytes, ...]:
        return tuple(self._tokens)

    def merge(self, delta: Sequence[bytes]) -> int:
        """Union in new tokens; returns how many were actually new."""
        added = 0
        for token in delta:
            if token not in self._seen:
                self._seen.add(token)
                self._tokens.append(token)
                added += 1
        return added

    def delta_for(self, worker_id: int) -> tuple[bytes, ...]:
        """Tokens newer than the worker has, advancing its mark."""
        mark = self._marks[worker_id]
        delta = tuple(self._tokens[mark:])
        self._marks[worker_id] = len(self._tokens)
        return delta

    def mark_of(self, worker_id: int) -> int:
        return self._marks[worker_id]


# --------------------------------------------------------------------------
# Run report
# --------------------------------------------------------------------------


@dataclass
class RunReport:
    """Totals and instrumentation for one engine run."""

    total_output_count: int = 0
    jobs_executed: int = 0
    wall_time: float = 0.0
    frequencies: list[int] = field(default_factory=list)
    completed: bool = True
    halted: bool = False
    # (elapsed_seconds, busy_workers, joblist_len) sampled at >= 0.1 s ticks
    samples: list[tuple[float, int, int]] = field(default_factory=list)
    # final shared-store contents, for auditing what was relayed
    shared_tokens: tuple[bytes, ...] = ()


# --------------------------------------------------------------------------
# Worker and consumer loops
# --------------------------------------------------------------------------


def worker_loop(
    worker_id: int,
    app: Application,
    input_bytes: bytes,
    inbox: "queue.Queue",
    to_master: "queue.Queue",
    to_consumer: "queue.Queue",
    count_only: bool,
) -> None:
    """Receive jobs, run the application search, ship results until terminate.

    Any exception is converted into a crash message so the master can abort
    the run instead of waiting forever.
    """
    try:
        global_data, _root = app.init(input_bytes)
        local_shared: list[bytes] = []
        seen: set[bytes] = set()
        while True:
            msg = inbox.get()
            if isinstance(msg, TerminateMsg):
                return
            if not isinstance(msg, AssignMsg):
                raise EngineError(f"worker {worker_id}: unexpected message {type(msg).__name__}")
            for token in msg.shared:
                if token not in seen:
                    seen.add(token)
                    local_shared.append(token)
            node = JobNode(payload=msg.payload, origin_depth=msg.origin_depth)
            budget = Budget(msg.max_depth, msg.max_nodes, msg.budget_kind)
            result = app.search(global_data, node, budget, tuple(local_shared))
            if result.outputs:
                to_consumer.put(OutputMsg(tuple(result.outputs), verdict=result.halt))
            elif count_only:
                to_consumer.put(CountMsg(result.output_count))
            to_master.put(
                ResultMsg(
                    worker_id=worker_id,
                    visited=result.visited,
                    output_count=result.output_count,
                    unexplored=tuple((n.payload, n.origin_depth) for n in result.unexplored),
                    shared_delta=tuple(result.shared_delta),
                    halt=result.halt,
                )
            )
    except Exception as exc:  # noqa: BLE001 - converted into a crash report
        to_master.put(CrashMsg(worker_id=worker_id, error=f"{type(exc).__name__}: {exc}"))


def consumer_loop(inbox: "queue.Queue", out: IO[str], count_only: bool) -> None:
    """Write worker output verbatim in arrival order until terminate.

    Verdict-tagged messages are deduplicated to the first one seen.  In
    count-only mode workers send per-job counts instead of lines and only
    the final aggregate line is emitted.
    """
    total = 0
    verdict_seen = False
    while True:
        msg = inbox.get()
        if isinstance(msg, TerminateMsg):
            break
        if isinstance(msg, CountMsg):
            total += msg.count
        elif isinstance(msg, OutputMsg):
            if msg.verdict:
                if verdict_seen:
                    continue
                verdict_seen = True
            for line in msg.lines:
                out.write(line + "\n")
    if count_only:
        out.write(f"{total}\n")
    out.flush()


# --------------------------------------------------------------------------
# Master
# --------------------------------------------------------------------------


class _WorkerHandle:
    __slots__ = ("worker_id", "inbox", "results", "thread", "working", "current_job")

    def __init__(self, worker_id: int) -> None:
        self.worker_id = worker_id
        self.inbox: queue.Queue = queue.Queue()
        self.results: queue.Queue = queue.Queue()
        self.thread: threading.Thread | None = None
        self.working = False
        self.current_job: JobNode | None = None


class Master:
    """Job-list owner: assigns budgeted jobs, merges results and shared data.

    Kept separate from the thread plumbing so assignment and collection can
    be exercised directly.
    """

    def __init__(self, config: SchedulerConfig, num_workers: int | None = None) -> None:
        self.config = config
        n = config.num_workers if num_workers is None else num_workers
        self.joblist: deque[JobNode] = deque()
        self.store = SharedStore(n)
        self.handles = [_WorkerHandle(i) for i in range(n)]
        self.report = RunReport()
        self.halting = False

    # -- assignment -------------------------------------------------------

    def next_budget(self) -> Budget:
        return select_budget(len(self.joblist), self.config)

    def assign_job(self, handle: _WorkerHandle, job: JobNode, budget: Budget) -> AssignMsg:
        """Mark the worker working and build its assignment message.

        The message carries exactly the shared tokens newer than the
        worker's high-water mark.
        """
        if handle.working:
            raise EngineError(f"worker {handle.worker_id} already working")
        handle.working = True
        handle.current_job = job
        msg = AssignMsg(
            payload=job.payload,
            origin_depth=job.origin_depth,
            max_depth=budget.max_depth,
            max_nodes=budget.max_nodes,
            budget_kind=budget.kind,
            shared=self.store.delta_for(handle.worker_id),
        )
        handle.inbox.put(msg)
        return msg

    # -- collection -------------------------------------------------------

    def collect_result(self, handle: _WorkerHandle, msg: ResultMsg) -> None:
        """Merge one worker result into the job list, store, and report."""
        if not handle.working:
            raise EngineError(f"result from idle worker {handle.worker_id}")
        if msg.visited < 0 or msg.output_count < 0:
            raise EngineError(f"worker {handle.worker_id}: malformed result counts")
        for payload, depth in msg.unexplored:
            if not isinstance(payload, bytes):
                raise EngineError(f"worker {handle.worker_id}: malformed unexplored payload")
            self.joblist.append(JobNode(payload=payload, origin_depth=depth))
        self.store.merge(msg.shared_delta)
        handle.working = False
        handle.current_job = None
        self.report.jobs_executed += 1
        self.report.frequencies.append(msg.visited)
        self.report.total_output_count += msg.output_count
        if msg.halt:
            self.halting = True

    # -- bookkeeping ------------------------------------------------------

    def busy_count(self) -> int:
        return sum(1 for h in self.handles if h.working)

    def any_working(self) -> bool:
        return any(h.working for h in self.handles)

    def pending_jobs(self) -> list[JobNode]:
        """In-flight jobs plus the queued list: everything not yet finished.

        Checkpoints use this so that a crash after the snapshot loses no
        work; a job both in-flight at snapshot time and completed before the
        crash may be re-run on recovery (at-least-once).
        """
        in_flight = [h.current_job for h in self.handles if h.current_job is not None]
        return in_flight + list(self.joblist)


# --------------------------------------------------------------------------
# Top-level run
# --------------------------------------------------------------------------


def run(
    app: Application,
    input_bytes: bytes,
    config: SchedulerConfig,
    out: IO[str] | None = None,
) -> RunReport:
    """Execute a full parallel run of ``app`` on ``input_bytes``.

    Parses the input (aborting before any worker starts on failure), seeds
    the job list with the application root or a restart checkpoint, then
    drives the master loop until every job is done, a worker signals a
    global answer, or ``stop_after_jobs`` triggers a checkpointed early
    stop.  Output lines stream to ``out`` via the consumer.
    """
    if out is None:
        import io

        out = io.StringIO()
    global_data, root = app.init(input_bytes)  # may raise InputFormatError

    master = Master(config)
    if config.restart_path is not None:
        jobs, tokens = checkpoint_read(config.restart_path, expected_app=app.descriptor.name)
        master.joblist.extend(jobs)
        master.store.merge(tokens)
    else:
        master.joblist.append(root)

    consumer_inbox: queue.Queue = queue.Queue()
    consumer = threading.Thread(
        target=consumer_loop,
        args=(consumer_inbox, out, config.count_only),
        name="btsearch-consumer",
        daemon=True,
    )
    consumer.start()
    for handle in master.handles:
        handle.thread = threading.Thread(
            target=worker_loop,
            args=(
                handle.worker_id,
                app,
                input_bytes,
                handle.inbox,
                handle.results,
                consumer_inbox,
                config.count_only,
            ),
            name=f"btsearch-worker-{handle.worker_id}",
            daemon=True,
        )
        handle.thread.start()

    start_time = time.monotonic()
    last_sample = -1.0
    last_checkpoint = start_time
    crash: CrashMsg | None = None
    draining = False

    def sample_metrics(now: float) -> None:
        nonlocal last_sample
        elapsed = now - start_time
        if elapsed - last_sample >= config.sample_interval_s or last_sample < 0:
            master.report.samples.append((elapsed, master.busy_count(), len(master.joblist)))
            last_sample = elapsed

    def write_checkpoint_now() -> None:
        if config.checkpoint_path is None:
            return
        try:
            checkpoint_write(
                config.checkpoint_path,
                app.descriptor.name,
                master.pending_jobs(),
                master.store.tokens,
            )
        except OSError as exc:
            logger.warning("cannot write checkpoint %s: %s", config.checkpoint_path, exc)

    try:
        while True:
            progressed = False
            # Collect any finished results (poll every worker; a crash can
            # arrive even before the first assignment).
            for handle in master.handles:
                while True:
                    try:
                        msg = handle.results.get_nowait()
                    except queue.Empty:
                        break
                    if isinstance(msg, CrashMsg):
                        crash = msg
                        break
                    master.collect_result(handle, msg)
                    progressed = True
                if crash is not None:
                    break
            if crash is not None:
                raise WorkerCrashError(
                    f"worker {crash.worker_id} crashed ({crash.error}); "
                    "its job is lost and the run was aborted"
                )

            stop_requested = (
                config.stop_after_jobs is not None
                and master.report.jobs_executed >= config.stop_after_jobs
            )
            if (master.halting or stop_requested) and not master.any_working():
                draining = stop_requested and not master.halting
                break
            if not master.joblist and not master.any_working():
                break

            # Hand out jobs FIFO to free workers under the current budget.
            if not master.halting and not stop_requested:
                for handle in master.handles:
                    if not master.joblist:
                        break
                    if handle.working:
                        continue
                    budget = master.next_budget()
                    job = master.joblist.popleft()
                    master.assign_job(handle, job, budget)
                    progressed = True

            now = time.monotonic()
            sample_metrics(now)
            if (
                config.checkpoint_path is not None
                and now - last_checkpoint >= config.checkpoint_interval_s
            ):
                write_checkpoint_now()
                last_checkpoint = now
            if not progressed:
                time.sleep(_IDLE_SLEEP_S)

        now = time.monotonic()
        sample_metrics(now)
        master.report.wall_time = now - start_time
        master.report.halted = master.halting
        master.report.completed = not draining
        master.report.shared_tokens = master.store.tokens
        if draining:
            write_checkpoint_now()
        elif not master.halting:
            final_lines = app.finalize(global_data, master.store.tokens, master.halting)
            if final_lines:
                consumer_inbox.put(OutputMsg(tuple(final_lines), verdict=False))
    finally:
        for handle in master.handles:
            handle.inbox.put(TerminateMsg())
        consumer_inbox.put(TerminateMsg())
        for handle in master.handles:
            if handle.thread is not None:
                handle.thread.join(timeout=30.0)
        consumer.join(timeout=30.0)
    return master.report
