"""Parallel, checkpointed scan of an integer range for pseudoprimes.

Odd candidates are cut into fixed-size chunks.  Workers evaluate chunks
independently; the parent consumes results in chunk order, so the output is
sorted by ``n`` whatever the pool does.  After every ``checkpoint_every``
chunks the output is flushed and a checkpoint naming the next unexamined
``n`` is atomically replaced.  Resuming truncates the output to the number
of hits the checkpoint recorded and continues from its cursor.
"""

from __future__ import annotations

import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import kernels
from .arith import is_prime, multiplicative_order
from .errors import DomainError, FactorizationBudgetExceeded, HypothesisViolated
from .midy import is_midy_number
from .pseudo import _check_q_hypothesis, is_q_probable_prime, miller_condition

log = logging.getLogger(__name__)

KINDS = ("overpseudoprime", "fermat_psp", "strong_psp", "q_psp")
CHECKPOINT_KEYS = ("range_lo", "range_hi", "cursor", "base", "kind", "hits_so_far")


@dataclass(frozen=True)
class CensusRecord:
    n: int
    base: int
    kind: str
    flags: dict
    extra: dict

    def to_json(self) -> str:
        return json.dumps(
            {"n": str(self.n), "base": str(self.base), "kind": self.kind, "flags": self.flags, "extra": self.extra}
        )

    @classmethod
    def from_json(cls, line: str) -> "CensusRecord":
        obj = json.loads(line)
        if list(obj) != ["n", "base", "kind", "flags", "extra"]:
            raise ValueError(f"unexpected record keys {list(obj)}")
        return cls(int(obj["n"]), int(obj["base"]), obj["kind"], obj["flags"], obj["extra"])


@dataclass(frozen=True)
class Checkpoint:
    range_lo: int
    range_hi: int
    cursor: int
    base: int
    kind: str
    hits_so_far: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "range_lo": str(self.range_lo),
                "range_hi": str(self.range_hi),
                "cursor": str(self.cursor),
                "base": str(self.base),
                "kind": self.kind,
                "hits_so_far": str(self.hits_so_far),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "Checkpoint":
        obj = json.loads(text)
        if tuple(obj) != CHECKPOINT_KEYS:
            raise ValueError(f"unexpected checkpoint keys {list(obj)}")
        return cls(
            int(obj["range_lo"]),
            int(obj["range_hi"]),
            int(obj["cursor"]),
            int(obj["base"]),
            obj["kind"],
            int(obj["hits_so_far"]),
        )

    def write(self, path: str) -> None:
        tmp = f"{path}.tmp"
        with open(tmp, "w") as fh:
            fh.write(self.to_json() + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)


def kind_label(kind: str, q: int | None) -> str:
    return f"q_psp({q})" if kind == "q_psp" else kind


def _classify_hit(n: int, base: int, kind: str, q: int | None) -> CensusRecord | None:
    """Exact evaluation of one candidate that passed the prefilter."""
    if is_prime(n):
        return None
    strong = miller_condition(n, base)
    if kind in ("overpseudoprime", "strong_psp") and not strong:
        return None
    extra: dict[str, str] = {}
    q_flag = None
    if kind == "q_psp":
        if (n - 1) % q:
            return None
        try:
            _check_q_hypothesis(n, q)
        except HypothesisViolated:
            return None
        res = is_q_probable_prime(n, base, q, check_hypothesis=False)
        if not res.result:
            return None
        q_flag = True
        extra["q"] = str(q)
        if res.witness_i is not None:
            extra["witness_i"] = str(res.witness_i)
    midy = is_midy_number(n, base)
    if kind == "overpseudoprime":
        if not midy:
            return None
        extra["order"] = str(multiplicative_order(base, n))
    flags = {"fermat_psp": True, "strong_psp": strong, "midy_number": midy}
    if q_flag is not None:
        flags["q_probable_prime"] = q_flag
    return CensusRecord(n, base, kind_label(kind, q), flags, extra)


def _prefilter(ns: list[int], base: int, strong: bool) -> list[int]:
    if ns and ns[-1] <= kernels.MAX_MODULUS and base <= kernels.MAX_MODULUS:
        arr = np.asarray(ns, dtype=np.int64)
        return [int(n) for n in arr[kernels.census_mask(arr, base, strong)]]
    out = []
    for n in ns:
        if math.gcd(base, n) != 1:
            continue
        if strong and miller_condition(n, base) or not strong and pow(base, n - 1, n) == 1:
            out.append(n)
    return out


def scan_chunk(task: tuple[int, int, int, str, int | None]) -> list[str]:
    """Evaluate odd ``n`` in ``[start, stop]``; returns serialized records."""
    start, stop, base, kind, q = task
    ns = list(range(start, stop + 1, 2))
    lines = []
    for n in _prefilter(ns, base, strong=kind in ("overpseudoprime", "strong_psp")):
        try:
            rec = _classify_hit(n, base, kind, q)
        except FactorizationBudgetExceeded as exc:
            log.warning("skipping n=%d: %s", n, exc)
            rec = CensusRecord(n, base, "budget_exceeded", {}, {"error": str(exc)})
        if rec is not None:
            lines.append(rec.to_json())
    return lines


def _chunks(cursor: int, hi: int, base: int, kind: str, q: int | None, chunk_size: int) -> Iterator[tuple]:
    start = cursor if cursor % 2 else cursor + 1
    while start <= hi:
        stop = min(hi, start + 2 * (chunk_size - 1))
        yield (start, stop, base, kind, q)
        start = stop + 2


@dataclass
class CensusResult:
    hits: int
    cursor: int
    complete: bool


def _truncate_lines(path: str, keep: int) -> None:
    with open(path, "rb") as fh:
        lines = fh.read().splitlines(keepends=True)
    if len(lines) < keep:
        raise DomainError(f"{path} holds {len(lines)} records but the checkpoint expects {keep}")
    with open(path, "wb") as fh:
        fh.writelines(lines[:keep])


def run_census(
    lo: int,
    hi: int,
    base: int,
    kind: str,
    out_path: str,
    *,
    q: int | None = None,
    jobs: int = 1,
    checkpoint_path: str | None = None,
    chunk_size: int = 4096,
    checkpoint_every: int = 1,
    max_chunks: int | None = None,
) -> CensusResult:
    """Scan odd ``n`` in ``[lo, hi]`` and write one JSON record per hit.

    ``max_chunks`` stops early after that many chunks, leaving the
    checkpoint ready for a later resume.
    """
    if kind not in KINDS:
        raise DomainError(f"unknown kind {kind!r}; expected one of {KINDS}")
    if kind == "q_psp" and (q is None or not is_prime(q)):
        raise DomainError("kind q_psp needs a prime q")
    if base < 1 or jobs < 1 or chunk_size < 1:
        raise DomainError("base, jobs and chunk size must be positive")
    lo = max(lo, 3)
    label = kind_label(kind, q)
    cursor, hits = lo, 0
    if checkpoint_path and os.path.exists(checkpoint_path):
        with open(checkpoint_path) as fh:
            ck = Checkpoint.from_json(fh.read())
        if (ck.range_lo, ck.range_hi, ck.base, ck.kind) != (lo, hi, base, label):
            raise DomainError(f"checkpoint {checkpoint_path} belongs to a different census")
        cursor, hits = ck.cursor, ck.hits_so_far
        _truncate_lines(out_path, hits)
    else:
        open(out_path, "w").close()

    def save(at: int) -> None:
        if checkpoint_path:
            Checkpoint(lo, hi, at, base, label, hits).write(checkpoint_path)

    tasks = list(_chunks(cursor, hi, base, kind, q, chunk_size))
    if max_chunks is not None:
        tasks = tasks[:max_chunks]
    pool = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 and len(tasks) > 1 else None
    results = pool.map(scan_chunk, tasks) if pool else map(scan_chunk, tasks)
    try:
        with open(out_path, "a") as out:
            for done, (task, lines) in enumerate(zip(tasks, results), start=1):
                for line in lines:
                    out.write(line + "\n")
                hits += len(lines)
                cursor = task[1] + 1
                if done % checkpoint_every == 0 or done == len(tasks):
                    out.flush()
                    os.fsync(out.fileno())
                    save(cursor)
    finally:
        if pool:
            pool.shutdown(cancel_futures=True)
    if not tasks:
        save(cursor)
    complete = not any(True for _ in _chunks(cursor, hi, base, kind, q, 1))
    return CensusResult(hits=hits, cursor=cursor, complete=complete)


def read_records(path: str) -> list[CensusRecord]:
    with open(path) as fh:
        return [CensusRecord.from_json(line) for line in fh if line.strip()]
