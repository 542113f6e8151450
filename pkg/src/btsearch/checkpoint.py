"""Checkpoint files: pending jobs plus shared tokens, written at master
quiescence so a run can be stopped and resumed (possibly elsewhere) without
losing work.

Line-oriented text format::

    mts-checkpoint 1 <app-name>
    S <shared-token-base64>     (zero or more)
    N <job-payload-base64>      (zero or more, job-list order)
"""

from __future__ import annotations

import base64
import binascii
from pathlib import Path
from typing import Iterable, Sequence

from .errors import CheckpointError
from .search_api import JobNode

_MAGIC = "mts-checkpoint"
_VERSION = "1"


def checkpoint_write(
    path: str | Path,
    app_name: str,
    jobs: Iterable[JobNode],
    shared_tokens: Sequence[bytes] = (),
) -> None:
    """Write the pending job list and shared store to ``path``."""
    lines = [f"{_MAGIC} {_VERSION} {app_name}"]
    for token in shared_tokens:
        lines.append("S " + base64.b64encode(token).decode("ascii"))
    for job in jobs:
        lines.append("N " + base64.b64encode(job.payload).decode("ascii"))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def checkpoint_read(
    path: str | Path,
    expected_app: str | None = None,
) -> tuple[list[JobNode], list[bytes]]:
    """Reconstruct ``(jobs, shared_tokens)`` from a checkpoint file.

    Job nodes come back with ``origin_depth`` 0: budgets are relative to a
    job's own start vertex, so the original split generation is not needed
    to resume.
    """
    try:
        text = Path(path).read_text(encoding="ascii")
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    lines = text.splitlines()
    if not lines:
        raise CheckpointError(f"{path}: empty checkpoint file")
    header = lines[0].split()
    if len(header) != 3 or header[0] != _MAGIC:
        raise CheckpointError(f"{path}: line 1: not a checkpoint header: {lines[0]!r}")
    if header[1] != _VERSION:
        raise CheckpointError(f"{path}: line 1: unsupported checkpoint version {header[1]!r}")
    if expected_app is not None and header[2] != expected_app:
        raise CheckpointError(
            f"{path}: checkpoint belongs to application {header[2]!r}, expected {expected_app!r}"
        )
    jobs: list[JobNode] = []
    tokens: list[bytes] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        tag, _, body = line.partition(" ")
        if tag not in ("S", "N"):
            raise CheckpointError(f"{path}: line {lineno}: unrecognized checkpoint line")
        try:
            data = base64.b64decode(body.strip(), validate=True)
        except (binascii.Error, ValueError) as exc:
            raise CheckpointError(f"{path}: line {lineno}: bad base64 payload: {exc}") from exc
        if tag == "S":
            tokens.append(data)
        else:
            jobs.append(JobNode(payload=data, origin_depth=0))
    return jobs, tokens
