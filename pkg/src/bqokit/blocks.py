"""Window-truncated blocks and the orders and surgery operators on them.

A block over an infinite base is a set of nonempty finite increasing
sequences such that every infinite subset of the base has exactly one
initial segment in the block.  At desk scale we truncate the base to a
finite window ``W`` and bound sequence length by a rank ``k``; coverage is
then checked against the length-``k`` subsets of ``W``.  Everything else
(the prefix order, the refinement orders, the patch/departure operators,
surgery) is computed literally from the definitions.

Sequences are plain tuples of naturals, strictly increasing.  All derived
collections are ordered length-lexicographically so results are
deterministic and diff-friendly.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .errors import DomainError, PostconditionError, PreconditionError, StructureError

FinSeq = tuple[int, ...]


def as_finseq(values: Iterable[int]) -> FinSeq:
    """Coerce to a strictly increasing tuple of naturals or raise StructureError."""
    seq = tuple(values)
    for i, v in enumerate(seq):
        if not isinstance(v, int) or isinstance(v, bool):
            raise StructureError(f"sequence entry {v!r} at position {i} is not an integer")
        if v < 0:
            raise StructureError(f"sequence entry {v} at position {i} is negative")
        if i > 0 and seq[i - 1] >= v:
            raise StructureError(
                f"sequence {list(seq)} is not strictly increasing at position {i}"
            )
    return seq


def lenlex(s: FinSeq) -> tuple[int, FinSeq]:
    """Sort key: length first, then lexicographic."""
    return (len(s), s)


def is_prefix(s: FinSeq, t: FinSeq) -> bool:
    """True iff s is an initial segment of t (allowing s == t)."""
    return len(s) <= len(t) and t[: len(s)] == s


def is_proper_prefix(s: FinSeq, t: FinSeq) -> bool:
    return len(s) < len(t) and t[: len(s)] == s


@dataclass(frozen=True)
class WindowedBlock:
    """A block truncated to a finite window with a rank bound.

    Construction enforces only structural well-formedness (increasing
    window, positive rank, nonempty increasing elements).  The semantic
    flags (antichain, coverage, window consistency) are computed by
    :func:`validate_block` so that malformed inputs can be loaded and
    diagnosed rather than rejected outright.
    """

    window: FinSeq
    rank: int
    elements: frozenset[FinSeq]

    def __post_init__(self):
        object.__setattr__(self, "window", as_finseq(self.window))
        if self.rank < 1:
            raise StructureError(f"rank must be positive, got {self.rank}")
        elems = frozenset(as_finseq(e) for e in self.elements)
        for e in elems:
            if not e:
                raise StructureError("block elements may not be empty sequences")
        object.__setattr__(self, "elements", elems)

    @classmethod
    def of(cls, window: Iterable[int], rank: int, elements: Iterable[Iterable[int]]) -> "WindowedBlock":
        return cls(tuple(window), rank, frozenset(tuple(e) for e in elements))

    def sorted_elements(self) -> list[FinSeq]:
        return sorted(self.elements, key=lenlex)

    def union(self) -> FinSeq:
        """The set of points actually used by elements, in increasing order."""
        used: set[int] = set()
        for e in self.elements:
            used.update(e)
        return tuple(sorted(used))


@dataclass(frozen=True)
class BlockReport:
    antichain: bool
    coverage: bool
    window_consistent: bool

    @property
    def valid(self) -> bool:
        return self.antichain and self.coverage and self.window_consistent


def validate_block(b: WindowedBlock) -> BlockReport:
    """Check the three block laws over the declared window.

    * ``antichain``: no element is a proper initial segment of another;
    * ``coverage``: ``|W| >= k`` and every length-``k`` subset of the window
      has exactly one prefix among the elements;
    * ``window_consistent``: every element sits inside the window and has
      length at most ``k``.
    """
    elems = b.sorted_elements()
    wset = set(b.window)

    window_consistent = all(set(e) <= wset and len(e) <= b.rank for e in elems)

    antichain = True
    for i, s in enumerate(elems):
        for t in elems[i + 1 :]:
            if is_proper_prefix(s, t) or is_proper_prefix(t, s):
                antichain = False
                break
        if not antichain:
            break

    coverage = len(b.window) >= b.rank
    if coverage:
        for full in combinations(b.window, b.rank):
            hits = sum(1 for e in b.elements if is_prefix(e, full))
            if hits != 1:
                coverage = False
                break

    return BlockReport(antichain=antichain, coverage=coverage, window_consistent=window_consistent)


def is_valid_block(b: WindowedBlock) -> bool:
    return validate_block(b).valid


def is_barrier(b: WindowedBlock) -> bool:
    """True iff no element is a proper subset (as a set) of another.

    Precondition: ``b`` is a valid block.
    """
    if not is_valid_block(b):
        raise PreconditionError("is_barrier requires a valid block")
    elems = [set(e) for e in b.sorted_elements()]
    for i, s in enumerate(elems):
        for j, t in enumerate(elems):
            if i != j and s < t:
                return False
    return True


def triangle(s: FinSeq, t: FinSeq, window: Iterable[int]) -> bool:
    """The successor relation on block elements, finitely characterised.

    ``s`` relates to ``t`` when some increasing continuation passes first
    through ``s`` and, after dropping its least point, through ``t``.
    Finitely that means: ``t`` is a prefix of ``tail(s)``, or ``tail(s)``
    is a prefix of ``t`` and everything ``t`` adds beyond that prefix lies
    above ``max(s)``.  The characterisation is guarded by an enumeration
    oracle in the test suite.
    """
    s = as_finseq(s)
    t = as_finseq(t)
    if not s or not t:
        raise DomainError("triangle is undefined for empty sequences")
    wset = set(as_finseq(sorted(set(window))))
    if not (set(s) | set(t)) <= wset:
        raise PreconditionError("triangle arguments must lie inside the window")
    tail = s[1:]
    if is_prefix(t, tail):
        return True
    return is_prefix(tail, t) and all(x > s[-1] for x in t[len(tail) :])


def le_dot(b: WindowedBlock, c: WindowedBlock) -> bool:
    """Refinement order: b's window inside c's and every b-element extends a c-element."""
    if not set(b.window) <= set(c.window):
        return False
    return all(any(is_prefix(p, e) for p in c.elements) for e in b.elements)


def lt_dot(b: WindowedBlock, c: WindowedBlock) -> bool:
    """Strict refinement: le_dot plus b's elements are not a subset of c's."""
    return le_dot(b, c) and not b.elements <= c.elements


def patch_elements(c: WindowedBlock, b: WindowedBlock, n: int) -> frozenset[FinSeq]:
    """Elements of ``b`` that fit inside ``[0, n]`` plus c's base but escape the base.

    These are exactly the elements glued back during surgery; they are
    always disjoint from ``c``.  Precondition: ``c`` strictly refines ``b``.
    """
    if not lt_dot(c, b):
        raise PreconditionError("patch_elements requires lt_dot(c, b)")
    if n < 0:
        raise DomainError("n must be a natural number")
    base = set(c.union())
    low = set(range(n + 1)) | base
    return frozenset(t for t in b.elements if set(t) <= low and not set(t) <= base)


def departure_maxima(c: WindowedBlock, b: WindowedBlock) -> set[int]:
    """Maxima of b-elements that sit inside c's base but are missing from c."""
    base = set(c.union())
    return {max(t) for t in b.elements if set(t) <= base and t not in c.elements}


def least_departure(c: WindowedBlock, b: WindowedBlock) -> int:
    """The least departure maximum; defined exactly when c strictly refines b."""
    maxima = departure_maxima(c, b)
    if not maxima:
        raise DomainError("departure set is empty: c does not strictly refine b")
    return min(maxima)


def surgery(c: WindowedBlock, b: WindowedBlock, n: int) -> WindowedBlock:
    """Glue the low patch of ``b`` back onto the refinement ``c``.

    Returns ``d`` with elements ``c ∪ patch_elements(c, b, n)``.  The window
    defaults to b's; when the patch leaves isolated window points uncovered
    the window shrinks to the points actually used (plus c's declared
    window, so that le_dot(c, d) keeps holding).  Postconditions — d is a
    valid block, le_dot(c, d), lt_dot(d, b), and the least departure of c
    and d from b agree — are verified on every call.
    """
    if not lt_dot(c, b):
        raise PreconditionError("surgery requires lt_dot(c, b)")
    m = least_departure(c, b)
    if n > m:
        raise PreconditionError(f"surgery requires n <= least departure ({n} > {m})")

    elements = c.elements | patch_elements(c, b, n)
    used: set[int] = set()
    for e in elements:
        used.update(e)
    shrunk = tuple(sorted(used | set(c.window)))
    longest = max(len(e) for e in elements)

    preferred = max(b.rank, c.rank)
    ranks = [preferred] + [
        r for r in range(longest, len(b.window) + 1) if r != preferred
    ]
    d = None
    for rank in ranks:
        for window in (b.window, shrunk):
            if rank < longest or rank > len(window):
                continue
            candidate = WindowedBlock(window, rank, elements)
            if is_valid_block(candidate):
                d = candidate
                break
        if d is not None:
            break
    if d is None:
        raise PostconditionError("surgery produced no valid block at any window")

    if not le_dot(c, d):
        raise PostconditionError("surgery postcondition le_dot(c, d) failed")
    if not lt_dot(d, b):
        raise PostconditionError("surgery postcondition lt_dot(d, b) failed")
    if least_departure(d, b) != m:
        raise PostconditionError("surgery postcondition m-preservation failed")
    return d


def block_after(b: WindowedBlock, s: Iterable[int]) -> WindowedBlock:
    """Restrict to the elements and window points strictly above max(s).

    The empty sequence acts as ``max = -inf`` and returns the input block.
    """
    s = as_finseq(s)
    if not s:
        return b
    cut = s[-1]
    elements = frozenset(t for t in b.elements if t[0] > cut)
    window = tuple(w for w in b.window if w > cut)
    return WindowedBlock(window, b.rank, elements)


def normalize_refinement(b: WindowedBlock, c: WindowedBlock) -> WindowedBlock:
    """Rebuild ``c`` so that every element properly extends an element of ``b``.

    Elements of ``c`` that already extend past ``b`` survive unchanged; each
    b-element that stalls inside c's base (having a c-prefix) is replaced by
    all of its one-point extensions into c's window.  The result is a valid
    block over c's window.
    """
    if not is_valid_block(b) or not is_valid_block(c):
        raise PreconditionError("normalize_refinement requires valid blocks")
    if not set(c.window) <= set(b.window):
        raise PreconditionError("normalize_refinement requires c's window inside b's")

    c_base = set(c.union())
    stalled = {
        s
        for s in b.elements
        if set(s) <= c_base and any(is_prefix(t, s) for t in c.elements)
    }
    kept = {t for t in c.elements if any(is_proper_prefix(s, t) for s in b.elements)}
    extended = {s + (n,) for s in stalled for n in c.window if n > s[-1]}

    elements = frozenset(kept | extended)
    rank = max([c.rank] + [len(e) for e in elements])
    result = WindowedBlock(c.window, rank, elements)
    report = validate_block(result)
    if not report.valid:
        raise PostconditionError(f"normalized refinement is not a valid block: {report}")
    return result


def kset_block(window: Iterable[int], k: int) -> WindowedBlock:
    """The block of all k-subsets of the window."""
    window = as_finseq(sorted(set(window)))
    return WindowedBlock(window, k, frozenset(combinations(window, k)))


def singleton_block(window: Iterable[int]) -> WindowedBlock:
    return kset_block(window, 1)


def schreier_block(window: Iterable[int], rank: int) -> WindowedBlock:
    """Elements whose length is one more than their least point, capped at rank."""
    window = as_finseq(sorted(set(window)))
    elements = set()
    for w in window:
        size = w + 1
        if size > rank:
            continue
        above = [v for v in window if v > w]
        for rest in combinations(above, size - 1):
            elements.add((w,) + rest)
    return WindowedBlock(window, rank, frozenset(elements))
