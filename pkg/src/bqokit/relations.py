"""Finite binary relations, partial rankings, and order liftings.

Carriers are index sets ``0..n-1`` with one display label per element;
relations are plain pair sets.  Reflexivity is deliberately *not* an
invariant of :class:`FiniteRelation` — many operations precondition on it,
and the checker reports it as a flag instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter
from typing import Iterable, Sequence

from .errors import DomainError, PostconditionError, PreconditionError, StructureError

Pair = tuple[int, int]


@dataclass(frozen=True)
class FiniteRelation:
    """A binary relation on a finite labeled carrier."""

    labels: tuple[str, ...]
    pairs: frozenset[Pair]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "pairs", frozenset((int(p), int(q)) for p, q in self.pairs))
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise StructureError("carrier labels must be unique")
        for p, q in self.pairs:
            if not (0 <= p < n and 0 <= q < n):
                raise StructureError(f"pair ({p}, {q}) does not index the carrier of size {n}")

    @classmethod
    def of(cls, labels: Sequence[str], pairs: Iterable[tuple[int, int]]) -> "FiniteRelation":
        return cls(tuple(labels), frozenset(pairs))

    @classmethod
    def identity(cls, labels: Sequence[str]) -> "FiniteRelation":
        return cls(tuple(labels), frozenset((i, i) for i in range(len(labels))))

    @property
    def carrier_size(self) -> int:
        return len(self.labels)

    def related(self, p: int, q: int) -> bool:
        return (p, q) in self.pairs

    def is_reflexive(self) -> bool:
        return all((i, i) in self.pairs for i in range(self.carrier_size))

    def sorted_pairs(self) -> list[Pair]:
        return sorted(self.pairs)


@dataclass(frozen=True)
class PartialRanking:
    """A candidate non-strict order on a carrier of the given size.

    Structural checks only; use :func:`ranking_report` or
    :func:`validate_partial_ranking` to test the order axioms, so that
    violating inputs can be loaded and diagnosed.
    """

    carrier_size: int
    pairs: frozenset[Pair]

    def __post_init__(self):
        object.__setattr__(self, "pairs", frozenset((int(p), int(q)) for p, q in self.pairs))
        n = self.carrier_size
        for p, q in self.pairs:
            if not (0 <= p < n and 0 <= q < n):
                raise StructureError(f"pair ({p}, {q}) does not index the carrier of size {n}")

    @classmethod
    def of(cls, carrier_size: int, pairs: Iterable[tuple[int, int]]) -> "PartialRanking":
        return cls(carrier_size, frozenset(pairs))

    @classmethod
    def identity(cls, carrier_size: int) -> "PartialRanking":
        return cls(carrier_size, frozenset((i, i) for i in range(carrier_size)))

    def le(self, p: int, q: int) -> bool:
        return (p, q) in self.pairs

    def lt(self, p: int, q: int) -> bool:
        return p != q and (p, q) in self.pairs

    def is_valid_order(self) -> bool:
        rel = FiniteRelation(tuple(str(i) for i in range(self.carrier_size)), self.pairs)
        return check_relation(rel).partial_order

    def sorted_pairs(self) -> list[Pair]:
        return sorted(self.pairs)


@dataclass(frozen=True)
class Enumeration:
    """A bijection from carrier elements to ranks 0..n-1."""

    ranks: tuple[int, ...]

    def __post_init__(self):
        n = len(self.ranks)
        if sorted(self.ranks) != list(range(n)):
            raise StructureError("ranks must be a permutation of 0..n-1")

    def rank(self, p: int) -> int:
        return self.ranks[p]

    def by_rank(self) -> list[int]:
        """Carrier elements listed in rank order."""
        order = [0] * len(self.ranks)
        for element, r in enumerate(self.ranks):
            order[r] = element
        return order


@dataclass(frozen=True)
class RelationReport:
    reflexive: bool
    transitive: bool
    antisymmetric: bool
    partial_order: bool
    well_founded: bool


def check_relation(r: FiniteRelation) -> RelationReport:
    """Compute the order-theoretic flags by direct definition on the carrier.

    Well-foundedness is acyclicity of the one-way part
    ``{(p, q) in R : (q, p) not in R}``, which for finite carriers is the
    standard no-infinite-descent reading.
    """
    n = r.carrier_size
    pairs = r.pairs

    reflexive = all((i, i) in pairs for i in range(n))

    rows: list[set[int]] = [set() for _ in range(n)]
    for p, q in pairs:
        rows[p].add(q)
    transitive = all(rows[q] <= rows[p] for p, q in pairs)

    antisymmetric = all(not (p != q and (q, p) in pairs) for p, q in pairs)

    strict = {(p, q) for p, q in pairs if (q, p) not in pairs}
    graph: dict[int, set[int]] = {i: set() for i in range(n)}
    for p, q in strict:
        graph[q].add(p)
    try:
        tuple(TopologicalSorter(graph).static_order())
        well_founded = True
    except CycleError:
        well_founded = False

    return RelationReport(
        reflexive=reflexive,
        transitive=transitive,
        antisymmetric=antisymmetric,
        partial_order=reflexive and transitive and antisymmetric,
        well_founded=well_founded,
    )


def first_ranking_violation(r: FiniteRelation, rk: PartialRanking) -> tuple[int, int, int] | None:
    """First triple (p, q, s), in lexicographic order, with p R q <= s but not p R s."""
    n = r.carrier_size
    for p in range(n):
        for q in range(n):
            if (p, q) not in r.pairs:
                continue
            for s in range(n):
                if (q, s) in rk.pairs and (p, s) not in r.pairs:
                    return (p, q, s)
    return None


def validate_partial_ranking(r: FiniteRelation, rk: PartialRanking) -> bool:
    """True iff rk is a well-founded partial order compatible with r.

    Compatibility means: whenever ``p R q`` and ``q <= s`` in the ranking,
    also ``p R s``.  Requires matching carriers and a reflexive ``r``.
    """
    if r.carrier_size != rk.carrier_size:
        raise StructureError(
            f"carrier mismatch: relation has {r.carrier_size}, ranking has {rk.carrier_size}"
        )
    if not r.is_reflexive():
        raise PreconditionError("validate_partial_ranking requires a reflexive relation")
    if not rk.is_valid_order():
        return False
    return first_ranking_violation(r, rk) is None


def linearize_ranking(rk: PartialRanking) -> Enumeration:
    """Order-preserving enumeration of a valid ranking.

    Deterministic tie-break: among elements whose strict predecessors are
    all enumerated, the lowest carrier index goes next.
    """
    if not rk.is_valid_order():
        raise PreconditionError("linearize_ranking requires a valid partial ranking")
    n = rk.carrier_size
    preds: dict[int, set[int]] = {i: set() for i in range(n)}
    for p, q in rk.pairs:
        if p != q:
            preds[q].add(p)
    ranks = [0] * n
    done: set[int] = set()
    for position in range(n):
        candidate = min(i for i in range(n) if i not in done and preds[i] <= done)
        ranks[candidate] = position
        done.add(candidate)
    return Enumeration(tuple(ranks))


def pouzet_lift(r: FiniteRelation, rk: PartialRanking, o: Enumeration) -> FiniteRelation:
    """Extract a well-founded partial order between the ranking and the relation.

    The strict part is built by recursion along the enumeration: ``p < q``
    holds when ``p`` is enumerated before ``q``, ``p R q``, and everything
    strictly below ``p`` is already strictly below ``q``.  The returned
    relation is the reflexive closure; it contains the ranking and is
    contained in ``r``.
    """
    if not r.is_reflexive():
        raise PreconditionError("pouzet_lift requires a reflexive relation")
    if not validate_partial_ranking(r, rk):
        raise PreconditionError("pouzet_lift requires a valid partial ranking of r")
    if len(o.ranks) != r.carrier_size:
        raise StructureError("enumeration size does not match the carrier")
    for p, q in rk.pairs:
        if o.rank(p) > o.rank(q):
            raise PreconditionError("enumeration does not linearize the ranking")

    n = r.carrier_size
    order = o.by_rank()
    strict: set[Pair] = set()
    below: dict[int, set[int]] = {i: set() for i in range(n)}
    for i, p in enumerate(order):
        for q in order[i + 1 :]:
            if (p, q) in r.pairs and below[p] <= below[q]:
                strict.add((p, q))
                below[q].add(p)

    lifted = frozenset(strict | {(i, i) for i in range(n)})
    result = FiniteRelation(r.labels, lifted)
    if not rk.pairs <= result.pairs or not result.pairs <= (r.pairs | lifted):
        raise PostconditionError("pouzet_lift inclusions failed")
    return result


def powerset_lift(r: FiniteRelation, subsets: Sequence[Iterable[int]]) -> FiniteRelation:
    """Lift a relation to a list of carrier subsets.

    ``X`` relates to ``Y`` when every member of ``X`` has an r-upper bound
    in ``Y``.  The subsets are taken as given (no 2^n materialisation);
    labels are brace-lists of the member labels.
    """
    if not r.is_reflexive():
        raise PreconditionError("powerset_lift requires a reflexive relation")
    sets = []
    for subset in subsets:
        s = frozenset(int(x) for x in subset)
        for x in s:
            if not 0 <= x < r.carrier_size:
                raise StructureError(f"subset member {x} is outside the carrier")
        sets.append(s)

    labels = tuple(
        "{" + ",".join(r.labels[i] for i in sorted(s)) + "}" for s in sets
    )
    pairs = set()
    for a, x in enumerate(sets):
        for b, y in enumerate(sets):
            if all(any((p, q) in r.pairs for q in y) for p in x):
                pairs.add((a, b))
    return FiniteRelation(labels, frozenset(pairs))


def rado_order(n: int) -> FiniteRelation:
    """The classical order on pairs ``(i, j)`` with ``i < j < n``.

    ``(i, j) <= (k, l)`` holds when ``i == k`` and ``j <= l``, or when
    ``j < k``.  A partial order whose power set lifting is badly behaved.
    """
    if n < 2:
        raise DomainError(f"rado_order requires n >= 2, got {n}")
    carrier = [(i, j) for i in range(n) for j in range(i + 1, n)]
    labels = tuple(f"({i},{j})" for i, j in carrier)
    index = {pair: k for k, pair in enumerate(carrier)}
    pairs = set()
    for (i, j) in carrier:
        for (k, l) in carrier:
            if (i == k and j <= l) or j < k:
                pairs.add((index[(i, j)], index[(k, l)]))
    return FiniteRelation(labels, frozenset(pairs))


def rado_rows(n: int) -> list[list[int]]:
    """Row subsets of the rado carrier: row m collects all pairs (m, j)."""
    carrier = [(i, j) for i in range(n) for j in range(i + 1, n)]
    index = {pair: k for k, pair in enumerate(carrier)}
    return [
        [index[(m, j)] for j in range(m + 1, n)]
        for m in range(n - 1)
    ]
