"""Exhaustive searches over sequences, blocks, and arrays.

Every search here walks a canonical, deterministic enumeration:

* candidate blocks are "reduced" — every element extends to a full-length
  sequence inside the window at the block's rank — and are emitted rank by
  rank, each rank bucket sorted by the length-lexicographic encoding of the
  element list;
* value maps are explored depth-first over elements in length-lex order
  with carrier indices ascending, pruning any partial assignment that
  already carries a related successor pair;
* refinement candidates range over all sub-windows (larger windows first),
  with values on shared elements forced and values on new elements limited
  to strict ranking drops below the parent element's value.

Budgets are explicit: exceeding one raises :class:`BudgetError`, which is
distinct from an exhaustive "none exists".  An environment variable
``BQOKIT_MAX_ENUM`` caps total enumeration work as a global safety net.
Parallel scans (``jobs > 1``) fan candidate blocks out to threads and fold
results back in canonical order, so reported objects and accounting match
the sequential run.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Callable, Iterable, Iterator, Sequence

from .arrays import BlockArray, is_bad, lt_prime
from .blocks import (
    FinSeq,
    WindowedBlock,
    as_finseq,
    is_prefix,
    least_departure,
    lenlex,
    lt_dot,
    surgery,
    triangle,
)
from .errors import BudgetError, PostconditionError, PreconditionError
from .relations import FiniteRelation

DEFAULT_ENUM_CAP = 5_000_000

TERMINATED_MINIMAL = "terminated-minimal"
STEP_LIMIT = "step-limit"
WINDOW_EXHAUSTED = "window-exhausted"


@dataclass(frozen=True)
class Budget:
    """Explicit caps for a search; ``None`` means unlimited (env cap still applies).

    ``max_candidates`` counts value-assignment attempts.  ``max_rank`` caps
    the rank of candidate blocks.  ``time_cap`` is wall-clock seconds; runs
    aborted by it are errors and sit outside the determinism contract.
    """

    max_candidates: int | None = None
    max_rank: int | None = None
    time_cap: float | None = None


def _env_cap() -> int:
    raw = os.environ.get("BQOKIT_MAX_ENUM", "")
    try:
        return int(raw) if raw else DEFAULT_ENUM_CAP
    except ValueError:
        return DEFAULT_ENUM_CAP


@dataclass(frozen=True)
class MinimalityVerdict:
    minimal: bool
    counterexample: BlockArray | None


@dataclass
class DescentTrace:
    """A chain of strictly descending bad arrays with its departure values."""

    chain: list[BlockArray]
    p_values: list[int]
    status: str

    def __post_init__(self):
        if len(self.p_values) != len(self.chain) - 1:
            raise PostconditionError("p_values length must be chain length - 1")


# ---------------------------------------------------------------------------
# Canonical block enumeration
# ---------------------------------------------------------------------------

def _above(window: FinSeq, x: int) -> int:
    return sum(1 for v in window if v > x)


def _reach(s: FinSeq, window: FinSeq, k: int) -> bool:
    """s extends to a length-k sequence inside the window."""
    return len(s) <= k and _above(window, s[-1]) >= k - len(s)


def _cut_options(prefix: FinSeq, window: FinSeq, k: int) -> list[tuple[FinSeq, ...]]:
    """All antichain fronts at or below ``prefix`` that cover its depth-k leaves."""
    options: list[tuple[FinSeq, ...]] = [(prefix,)]
    if len(prefix) < k:
        children = [
            prefix + (v,) for v in window if v > prefix[-1] and _reach(prefix + (v,), window, k)
        ]
        if children:
            child_opts = [_cut_options(c, window, k) for c in children]
            for combo in product(*child_opts):
                options.append(tuple(e for part in combo for e in part))
    return options


def _block_key(elements: Iterable[FinSeq]) -> tuple:
    return tuple((len(e), e) for e in sorted(elements, key=lenlex))


def _product_size(option_lists: Sequence[Sequence]) -> int:
    size = 1
    for opts in option_lists:
        size *= len(opts)
    return size


def _assemble_blocks(
    window: FinSeq, rank: int, root_options: list[list[tuple[FinSeq, ...]]]
) -> list[WindowedBlock]:
    cap = _env_cap()
    if _product_size(root_options) > cap:
        raise BudgetError(
            f"block enumeration at window {list(window)} rank {rank} exceeds the global cap",
            progress={"cap": cap},
        )
    blocks = []
    for combo in product(*root_options):
        elements = frozenset(e for part in combo for e in part)
        blocks.append(WindowedBlock(window, rank, elements))
    blocks.sort(key=lambda b: _block_key(b.elements))
    return blocks


def enumerate_blocks(window: Iterable[int], max_rank: int) -> Iterator[WindowedBlock]:
    """All reduced valid blocks over the window with rank at most ``max_rank``.

    Reduced means every element is an initial segment of some length-rank
    subset of the window; dropping the unreachable leftovers loses no bad
    arrays and keeps the enumeration canonical.
    """
    window = as_finseq(sorted(set(window)))
    for k in range(1, max_rank + 1):
        if len(window) < k:
            break
        roots = [(a,) for a in window if _reach((a,), window, k)]
        root_options = [_cut_options(root, window, k) for root in roots]
        yield from _assemble_blocks(window, k, root_options)


def _sub_windows(window: FinSeq) -> list[FinSeq]:
    subs: list[FinSeq] = []
    for size in range(len(window), 0, -1):
        subs.extend(combinations(window, size))
    return subs


def enumerate_refinements(base: WindowedBlock, max_rank: int) -> Iterator[WindowedBlock]:
    """All reduced blocks strictly refining ``base``, over every sub-window."""
    for window in _sub_windows(base.window):
        wset = set(window)
        for k in range(1, max_rank + 1):
            if len(window) < k:
                continue
            roots = [
                s for s in base.sorted_elements() if set(s) <= wset and _reach(s, window, k)
            ]
            if not all(
                any(is_prefix(s, full) for s in roots) for full in combinations(window, k)
            ):
                continue
            root_options = [_cut_options(root, window, k) for root in roots]
            for block in _assemble_blocks(window, k, root_options):
                if not block.elements <= base.elements:
                    yield block


# ---------------------------------------------------------------------------
# Bad sequences
# ---------------------------------------------------------------------------

def find_bad_sequence(r: FiniteRelation, max_len: int) -> tuple[int, ...] | None:
    """Depth-first search for q_0..q_{L-1} with no i < j such that q_i R q_j."""
    if not r.is_reflexive():
        raise PreconditionError("find_bad_sequence requires a reflexive relation")
    n = r.carrier_size
    seq: list[int] = []

    def extend() -> bool:
        if len(seq) == max_len:
            return True
        for q in range(n):
            if all((prev, q) not in r.pairs for prev in seq):
                seq.append(q)
                if extend():
                    return True
                seq.pop()
        return False

    return tuple(seq) if extend() else None


# ---------------------------------------------------------------------------
# Shared block-scan machinery
# ---------------------------------------------------------------------------

@dataclass
class _Scan:
    ticks: int = 0
    found: BlockArray | None = None
    found_at: int | None = None
    overflowed: bool = False


def _scan_block(
    block: WindowedBlock,
    choices: list[list[int]],
    build: Callable[[dict[FinSeq, int]], BlockArray],
    relation: FiniteRelation,
    local_cap: int,
    accept: Callable[[BlockArray], bool] | None,
    deadline: float | None,
) -> _Scan:
    """First value assignment on ``block`` avoiding related successor pairs.

    ``choices`` lists permitted carrier values per element (length-lex
    element order).  ``accept`` is an optional final filter; rejected
    leaves do not stop the scan.  Every assignment attempt is one tick.
    """
    elems = block.sorted_elements()
    n = len(elems)
    succ = [
        [j for j in range(n) if j != i and triangle(elems[i], elems[j], block.window)]
        for i in range(n)
    ]
    values: list[int | None] = [None] * n
    scan = _Scan()

    def dfs(i: int) -> BlockArray | None:
        if i == n:
            candidate = build({elems[j]: values[j] for j in range(n)})
            if accept is None or accept(candidate):
                return candidate
            return None
        for v in choices[i]:
            scan.ticks += 1
            if scan.ticks > local_cap:
                scan.overflowed = True
                return None
            if deadline is not None and scan.ticks % 256 == 0 and time.monotonic() > deadline:
                scan.overflowed = True
                return None
            ok = True
            for j in succ[i]:
                w = values[j]
                if w is None:
                    continue
                if (v, w) in relation.pairs:
                    ok = False
                    break
            if ok:
                for j in range(i):
                    if i in succ[j] and (values[j], v) in relation.pairs:
                        ok = False
                        break
            if not ok:
                continue
            values[i] = v
            result = dfs(i + 1)
            values[i] = None
            if result is not None or scan.overflowed:
                if result is not None:
                    scan.found = result
                    scan.found_at = scan.ticks
                return result
        return None

    dfs(0)
    return scan


@dataclass
class _Driver:
    """Folds per-block scans in canonical order with exact budget accounting."""

    budget: Budget | None
    jobs: int = 1
    cumulative: int = 0
    blocks_examined: int = 0
    started: float = field(default_factory=time.monotonic)

    def caps(self) -> tuple[int, float | None]:
        limit = _env_cap() - self.cumulative
        if self.budget and self.budget.max_candidates is not None:
            limit = min(limit, self.budget.max_candidates - self.cumulative)
        deadline = None
        if self.budget and self.budget.time_cap is not None:
            deadline = self.started + self.budget.time_cap
        return limit, deadline

    def progress(self) -> dict:
        return {
            "candidates_tried": self.cumulative,
            "blocks_examined": self.blocks_examined,
        }

    def overflow(self) -> BudgetError:
        return BudgetError("search budget exceeded", progress=self.progress())

    def run(
        self,
        tasks: Iterator[tuple[WindowedBlock, list[list[int]]]],
        build: Callable[[WindowedBlock, dict[FinSeq, int]], BlockArray],
        relation: FiniteRelation,
        accept: Callable[[BlockArray], bool] | None = None,
        on_found: Callable[[WindowedBlock, BlockArray], bool] | None = None,
    ) -> BlockArray | None:
        """Scan blocks in order; return the first accepted array.

        ``on_found`` may return False to record a hit and keep scanning
        (used by the descent step, which needs every candidate block).
        """
        jobs = max(1, self.jobs)
        pool = ThreadPoolExecutor(max_workers=jobs) if jobs > 1 else None
        try:
            batch: list[tuple[WindowedBlock, list[list[int]]]] = []
            iterator = iter(tasks)
            exhausted = False
            while not exhausted or batch:
                while len(batch) < jobs and not exhausted:
                    try:
                        batch.append(next(iterator))
                    except StopIteration:
                        exhausted = True
                if not batch:
                    break
                local_cap, deadline = self.caps()
                if local_cap <= 0:
                    raise self.overflow()
                scans = []
                if pool is None:
                    for block, choices in batch:
                        scans.append(
                            _scan_block(
                                block,
                                choices,
                                lambda vals, b=block: build(b, vals),
                                relation,
                                local_cap,
                                accept,
                                deadline,
                            )
                        )
                else:
                    futures = [
                        pool.submit(
                            _scan_block,
                            block,
                            choices,
                            lambda vals, b=block: build(b, vals),
                            relation,
                            local_cap,
                            accept,
                            deadline,
                        )
                        for block, choices in batch
                    ]
                    scans = [fu.result() for fu in futures]
                limit, _ = self.caps()
                for (block, _choices), scan in zip(batch, scans):
                    if scan.found is not None:
                        if scan.found_at > limit:
                            raise self.overflow()
                        self.cumulative += scan.found_at
                        self.blocks_examined += 1
                        if on_found is None or on_found(block, scan.found):
                            return scan.found
                        self.cumulative += scan.ticks - scan.found_at
                        limit, _ = self.caps()
                        continue
                    if scan.overflowed or scan.ticks > limit:
                        raise self.overflow()
                    self.cumulative += scan.ticks
                    self.blocks_examined += 1
                    limit, _ = self.caps()
                batch = []
        finally:
            if pool is not None:
                pool.shutdown(wait=False, cancel_futures=True)
        return None


# ---------------------------------------------------------------------------
# Bad arrays
# ---------------------------------------------------------------------------

def find_bad_array(
    r: FiniteRelation,
    window: Iterable[int],
    rank: int,
    budget: Budget | None = None,
    jobs: int = 1,
) -> BlockArray | None:
    """First window-bad array over the window at rank up to ``rank``.

    Sound (the result passes :func:`is_bad`) and, when it returns ``None``
    without a budget error, exhaustive over reduced candidate blocks.
    """
    window = as_finseq(sorted(set(window)))
    if not r.is_reflexive():
        raise PreconditionError("find_bad_array requires a reflexive relation")
    if len(window) < rank:
        raise PreconditionError("window must have at least `rank` points")

    carrier = list(range(r.carrier_size))

    def tasks():
        for block in enumerate_blocks(window, rank):
            yield block, [carrier for _ in block.elements]

    driver = _Driver(budget=budget, jobs=jobs)
    return driver.run(tasks(), lambda b, vals: BlockArray.of(b, vals, r), r)


# ---------------------------------------------------------------------------
# Minimality
# ---------------------------------------------------------------------------

def _refinement_tasks(
    f: BlockArray, max_rank: int
) -> Iterator[tuple[WindowedBlock, list[list[int]]]]:
    """Refining blocks of f's block, with value choices forced/dropped per the dot order."""
    fvals = f.values
    carrier = range(f.target.carrier_size)
    for block in enumerate_refinements(f.block, max_rank):
        choices: list[list[int]] = []
        for t in block.sorted_elements():
            if t in f.block.elements:
                choices.append([fvals[t]])
                continue
            prefixes = [s for s in f.block.elements if is_prefix(s, t)]
            parent = fvals[min(prefixes, key=lenlex)]
            choices.append([q for q in carrier if f.ranking.lt(q, parent)])
        yield block, choices


def _laver_rank(f: BlockArray, budget: Budget | None) -> int:
    if budget and budget.max_rank is not None:
        return budget.max_rank
    return f.block.rank + 1


def is_laver_minimal(f: BlockArray, budget: Budget | None = None) -> MinimalityVerdict:
    """No bad array sits strictly below f in the block-refining order.

    Exhausts refinement candidates within the window and rank budget; a
    found counterexample is returned with the verdict.
    """
    if f.ranking is None:
        raise PreconditionError("minimality checks require a ranking on the array")
    if not is_bad(f).bad_in_window:
        raise PreconditionError("minimality checks require a bad array")

    driver = _Driver(budget=budget)
    hit = driver.run(
        _refinement_tasks(f, _laver_rank(f, budget)),
        lambda b, vals: BlockArray.of(b, vals, f.target, f.ranking),
        f.target,
    )
    if hit is None:
        return MinimalityVerdict(minimal=True, counterexample=None)
    return MinimalityVerdict(minimal=False, counterexample=hit)


def is_simpson_minimal(f: BlockArray, budget: Budget | None = None) -> MinimalityVerdict:
    """No bad array sits strictly below f pointwise in the ranking.

    Candidate arrays live on any reduced block over any sub-window of f's
    window; the pointwise comparison is re-checked on every leaf.
    """
    if f.ranking is None:
        raise PreconditionError("minimality checks require a ranking on the array")
    if not is_bad(f).bad_in_window:
        raise PreconditionError("minimality checks require a bad array")

    max_rank = budget.max_rank if budget and budget.max_rank is not None else f.block.rank
    fvals = f.values
    carrier = list(range(f.target.carrier_size))

    def allowed_values(t: FinSeq, window: FinSeq, sample_len: int) -> list[int]:
        # every window sample through t runs through a comparable f-element,
        # so each realizable comparable element forces a strict drop
        bounds = []
        for s in f.block.elements:
            if is_prefix(s, t):
                bounds.append(fvals[s])
            elif is_prefix(t, s) and set(s) <= set(window) and _reach(s, window, sample_len):
                bounds.append(fvals[s])
        return [q for q in carrier if all(f.ranking.lt(q, v) for v in bounds)]

    def tasks():
        for window in _sub_windows(f.block.window):
            if len(window) < f.block.rank:
                continue  # too small to carry even one comparison sample
            for block in enumerate_blocks(window, max_rank):
                sample_len = max(block.rank, f.block.rank)
                yield block, [
                    allowed_values(t, window, sample_len) for t in block.sorted_elements()
                ]

    driver = _Driver(budget=budget)
    hit = driver.run(
        tasks(),
        lambda b, vals: BlockArray.of(b, vals, f.target, f.ranking),
        f.target,
        accept=lambda g: lt_prime(g, f),
    )
    if hit is None:
        return MinimalityVerdict(minimal=True, counterexample=None)
    return MinimalityVerdict(minimal=False, counterexample=hit)


# ---------------------------------------------------------------------------
# Descent
# ---------------------------------------------------------------------------

def _descent_scan(
    f: BlockArray, budget: Budget | None
) -> tuple[tuple[int, BlockArray] | None, bool]:
    """Bad refinement of f with the least departure value, and whether any
    refinement candidates existed at all.  Ties on the departure value are
    broken by the canonical block key."""
    best: tuple[tuple, BlockArray] | None = None
    seen_any = False

    def on_found(block: WindowedBlock, g: BlockArray) -> bool:
        nonlocal best
        m = least_departure(block, f.block)
        key = (m, _block_key(block.elements), block.rank, block.window)
        if best is None or key < best[0]:
            best = (key, g)
        return False

    def counted_tasks():
        nonlocal seen_any
        for task in _refinement_tasks(f, _laver_rank(f, budget)):
            seen_any = True
            yield task

    driver = _Driver(budget=budget)
    driver.run(
        counted_tasks(),
        lambda b, vals: BlockArray.of(b, vals, f.target, f.ranking),
        f.target,
        on_found=on_found,
    )
    if best is None:
        return None, seen_any
    key, g = best
    return (key[0], g), seen_any


def descent_step(f: BlockArray, budget: Budget | None = None) -> tuple[BlockArray, int] | None:
    """One strict descent below ``f``: pick the bad refinement with least
    departure value (ties broken canonically), patch its block against f's,
    and carry values across.  Returns ``None`` when no bad refinement
    exists within the budget — the minimality signal.
    """
    if f.ranking is None:
        raise PreconditionError("descent requires a ranking on the array")
    if not is_bad(f).bad_in_window:
        raise PreconditionError("descent requires a bad array")
    best, _ = _descent_scan(f, budget)
    if best is None:
        return None
    m, g = best
    return _apply_descent(f, g, m)


def _apply_descent(f: BlockArray, g: BlockArray, m: int) -> tuple[BlockArray, int]:
    d = surgery(g.block, f.block, m)
    gvals = g.values
    fvals = f.values
    values = {}
    for t in d.sorted_elements():
        values[t] = gvals[t] if t in g.block.elements else fvals[t]
    f_next = BlockArray.of(d, values, f.target, f.ranking)

    if not is_bad(f_next).bad_in_window:
        raise PostconditionError("descent step produced a non-bad array")
    from .arrays import lt_dot_prime  # local import to avoid a cycle at module load

    if not lt_dot_prime(f_next, f):
        raise PostconditionError("descent step is not strictly below its predecessor")
    base_union = set(f.block.union())
    next_union = set(d.union())
    for n in sorted(base_union):
        if n <= m and n not in next_union:
            raise PostconditionError(f"descent step dropped low base point {n}")
    if least_departure(d, f.block) != m:
        raise PostconditionError("descent step lost the departure value")
    return f_next, m


def run_descent(
    f0: BlockArray, max_steps: int = 16, budget: Budget | None = None
) -> DescentTrace:
    """Iterate descent steps from f0, asserting the chain laws along the way.

    The departure values must be non-decreasing, with at most ``2^n``
    occurrences of each value ``n``; every step must sit strictly below its
    predecessor and weakly below f0.  Violations raise
    :class:`PostconditionError` since they indicate a bug.
    """
    from .arrays import le_dot_prime, lt_dot_prime

    if not is_bad(f0).bad_in_window:
        raise PreconditionError("run_descent requires a bad array")
    chain = [f0]
    p_values: list[int] = []
    status = STEP_LIMIT
    for _ in range(max_steps):
        best, seen_any = _descent_scan(chain[-1], budget)
        if best is None:
            status = TERMINATED_MINIMAL if seen_any else WINDOW_EXHAUSTED
            break
        m, g = best
        f_next, p = _apply_descent(chain[-1], g, m)
        if not lt_dot_prime(f_next, chain[-1]):
            raise PostconditionError("descent chain lost strictness")
        if not le_dot_prime(f_next, chain[0]):
            raise PostconditionError("descent chain left the cone below f0")
        if p_values and p < p_values[-1]:
            raise PostconditionError(f"departure values decreased: {p_values + [p]}")
        p_values.append(p)
        if sum(1 for q in p_values if q == p) > 2 ** p:
            raise PostconditionError(f"departure value {p} occurred more than 2^{p} times")
        chain.append(f_next)
    return DescentTrace(chain=chain, p_values=p_values, status=status)


def limit_block(trace: DescentTrace) -> tuple[WindowedBlock, BlockArray, bool]:
    """Stabilised block and array of a descent trace.

    A trace that terminated minimal is constant from its last entry on, so
    the limit is that entry (and the stability checks run).  Otherwise the
    elements that stayed present from their first appearance onward are
    reported with ``stable = False`` and no claims attached.
    """
    from .arrays import le_dot_prime

    if not trace.chain:
        raise PreconditionError("limit_block requires a nonempty trace")
    final = trace.chain[-1]
    if trace.status == TERMINATED_MINIMAL:
        for entry in trace.chain:
            if not le_dot_prime(final, entry):
                raise PostconditionError("limit array is not weakly below a chain entry")
        if not is_bad(final).bad_in_window:
            raise PostconditionError("limit array is not bad")
        return final.block, final, True

    blocks = [f.block.elements for f in trace.chain]
    persistent = set()
    for t in blocks[-1]:
        first = min(i for i, elems in enumerate(blocks) if t in elems)
        if all(t in elems for elems in blocks[first:]):
            persistent.add(t)
    c = WindowedBlock(
        final.block.window,
        max([1] + [len(t) for t in persistent]),
        frozenset(persistent),
    )
    fvals = final.values
    g = BlockArray.of(c, {t: fvals[t] for t in persistent}, final.target, final.ranking)
    return c, g, False
