"""Value assignments on blocks, badness, and the two array orders.

An array assigns a carrier element of a target relation to every element
of a windowed block; the induced function on longer sequences evaluates at
the unique block prefix.  Two orders are provided: the pointwise order,
compared on all length-K window samples, and the block-refining order,
which compares arrays together with their blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping

from .blocks import (
    FinSeq,
    WindowedBlock,
    as_finseq,
    is_prefix,
    is_proper_prefix,
    is_valid_block,
    le_dot,
    lenlex,
    lt_dot,
    normalize_refinement,
    triangle,
)
from .errors import (
    CoverageError,
    PostconditionError,
    PreconditionError,
    StructureError,
)
from .relations import FiniteRelation, PartialRanking


@dataclass(frozen=True)
class BlockArray:
    """A total map from block elements into a target relation's carrier."""

    block: WindowedBlock
    assignments: tuple[tuple[FinSeq, int], ...]
    target: FiniteRelation
    ranking: PartialRanking | None = None

    def __post_init__(self):
        normalized = tuple(
            sorted(((as_finseq(e), int(v)) for e, v in self.assignments), key=lambda ev: lenlex(ev[0]))
        )
        object.__setattr__(self, "assignments", normalized)
        keys = [e for e, _ in normalized]
        if len(set(keys)) != len(keys):
            raise StructureError("duplicate element in array assignments")
        if set(keys) != self.block.elements:
            raise StructureError("array values must be defined on exactly the block elements")
        for e, v in normalized:
            if not 0 <= v < self.target.carrier_size:
                raise StructureError(f"value {v} at {list(e)} is outside the target carrier")
        if self.ranking is not None and self.ranking.carrier_size != self.target.carrier_size:
            raise StructureError("ranking carrier does not match the target relation")

    @classmethod
    def of(
        cls,
        block: WindowedBlock,
        values: Mapping[FinSeq, int] | Iterable[tuple[FinSeq, int]],
        target: FiniteRelation,
        ranking: PartialRanking | None = None,
    ) -> "BlockArray":
        items = values.items() if isinstance(values, Mapping) else values
        return cls(block, tuple((tuple(e), v) for e, v in items), target, ranking)

    @property
    def values(self) -> dict[FinSeq, int]:
        return dict(self.assignments)

    def value_at(self, element: FinSeq) -> int:
        for e, v in self.assignments:
            if e == element:
                return v
        raise KeyError(element)


def evaluate(f: BlockArray, s: Iterable[int]) -> int:
    """Value of the induced function at s: the value at s's unique block prefix."""
    s = as_finseq(s)
    prefixes = [e for e in f.block.elements if is_prefix(e, s)]
    if not prefixes:
        raise CoverageError(f"no block element is an initial segment of {list(s)}")
    return f.value_at(min(prefixes, key=lenlex))


@dataclass(frozen=True)
class BadnessVerdict:
    bad_in_window: bool
    witness: tuple[FinSeq, FinSeq] | None


def is_bad(f: BlockArray) -> BadnessVerdict:
    """In-window badness check.

    Bad means: no successor pair of block elements carries related values.
    When a related pair exists the length-lexicographically least one is
    returned as witness.  Absence of a witness inside the window does not
    certify badness over a larger base.
    """
    if not f.target.is_reflexive():
        raise PreconditionError("is_bad requires a reflexive target relation")
    if not is_valid_block(f.block):
        raise PreconditionError("is_bad requires a valid block")
    elems = f.block.sorted_elements()
    vals = f.values
    for s in elems:
        for t in elems:
            if s != t and triangle(s, t, f.block.window) and (vals[s], vals[t]) in f.target.pairs:
                return BadnessVerdict(bad_in_window=False, witness=(s, t))
    return BadnessVerdict(bad_in_window=True, witness=None)


def _require_comparable(f: BlockArray, g: BlockArray, need_ranking: bool) -> None:
    if f.target != g.target:
        raise PreconditionError("arrays must target the same relation")
    if need_ranking:
        if f.ranking is None or g.ranking is None or f.ranking != g.ranking:
            raise PreconditionError("arrays must share a partial ranking")


def _samples(f: BlockArray, g: BlockArray) -> list[FinSeq]:
    """Length-K subsets of f's window, K the larger of the two ranks.

    An empty sample set means the window is too small to compare the
    induced functions at all; the pointwise orders treat that as a
    precondition failure rather than a vacuous truth, since the infinite
    picture it truncates never has an empty comparison domain.
    """
    k = max(f.block.rank, g.block.rank)
    samples = [tuple(s) for s in combinations(f.block.window, k)]
    if not samples:
        raise PreconditionError(
            f"no length-{k} samples inside window {list(f.block.window)}; "
            "pointwise comparison is void at this window scale"
        )
    return samples


def le_prime(f: BlockArray, g: BlockArray) -> bool:
    """Pointwise ranking comparison of the induced functions on window samples."""
    _require_comparable(f, g, need_ranking=True)
    if not set(f.block.window) <= set(g.block.window):
        raise PreconditionError("le_prime requires f's window inside g's")
    return all(f.ranking.le(evaluate(f, s), evaluate(g, s)) for s in _samples(f, g))


def lt_prime(f: BlockArray, g: BlockArray) -> bool:
    """Strict pointwise comparison: strictly below at every window sample."""
    _require_comparable(f, g, need_ranking=True)
    if not set(f.block.window) <= set(g.block.window):
        raise PreconditionError("lt_prime requires f's window inside g's")
    return all(f.ranking.lt(evaluate(f, s), evaluate(g, s)) for s in _samples(f, g))


def dot_order_violation(f: BlockArray, g: BlockArray) -> tuple[str, FinSeq, FinSeq] | None:
    """First reason the block-refining comparison f <= g fails, if any.

    Returns (kind, s, t) where kind is "blocks", "shared", or "drop".
    """
    if not le_dot(f.block, g.block):
        return ("blocks", (), ())
    fvals, gvals = f.values, g.values
    for t in sorted(f.block.elements & g.block.elements, key=lenlex):
        if fvals[t] != gvals[t]:
            return ("shared", t, t)
    for s in g.block.sorted_elements():
        for t in f.block.sorted_elements():
            if is_proper_prefix(s, t) and not f.ranking.lt(fvals[t], gvals[s]):
                return ("drop", s, t)
    return None


def le_dot_prime(f: BlockArray, g: BlockArray) -> bool:
    """Block-refining array order.

    Requires f's block to refine g's, equal values on shared elements, and
    a strict ranking drop from each g-element to every f-element properly
    extending it.  A failed block comparison yields False, not an error.
    """
    _require_comparable(f, g, need_ranking=True)
    return dot_order_violation(f, g) is None


def lt_dot_prime(f: BlockArray, g: BlockArray) -> bool:
    return le_dot_prime(f, g) and lt_dot(f.block, g.block)


def normalize_array(f: BlockArray, g: BlockArray) -> BlockArray:
    """Re-present g on a block whose every element properly extends f's block.

    Values are carried over: surviving g-elements keep their value, and each
    one-point extension of a stalled f-element inherits the value of its
    g-prefix.  The result induces the same function as g, has the same
    badness verdict, and sits strictly below f in the block-refining order;
    all three are verified.
    """
    _require_comparable(f, g, need_ranking=True)
    if not lt_prime(g, f):
        raise PreconditionError("normalize_array requires lt_prime(g, f)")

    cprime = normalize_refinement(f.block, g.block)
    gvals = g.values
    values: dict[FinSeq, int] = {}
    for t in cprime.sorted_elements():
        if t in g.block.elements:
            values[t] = gvals[t]
        else:
            stem = t[:-1]
            prefix = [u for u in g.block.elements if is_prefix(u, stem)]
            if not prefix:
                raise PostconditionError(f"normalized element {list(t)} has no g-prefix")
            values[t] = gvals[min(prefix, key=lenlex)]
    gprime = BlockArray.of(cprime, values, g.target, g.ranking)

    k = max(g.block.rank, cprime.rank)
    for s in combinations(g.block.window, k):
        if evaluate(gprime, s) != evaluate(g, s):
            raise PostconditionError(f"normalization changed the induced value at {list(s)}")
    if is_bad(gprime).bad_in_window != is_bad(g).bad_in_window:
        raise PostconditionError("normalization changed the badness verdict")
    if not lt_dot_prime(gprime, f):
        raise PostconditionError("normalized array is not strictly below f in the dot order")
    return gprime
