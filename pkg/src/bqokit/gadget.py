"""The sequence-space reduction gadget.

Each member relation of a family is extended by a truncated copy of the
naturals under the *reversed* order (the "descendable side"), with every
original element placed below every reversed-naturals element.  The gadget
space collects all short sequences whose i-th entry comes from the i-th
extended carrier; its relation compares lengths first and otherwise looks
for a single coordinatewise hit, and its ranking relates equal-length
sequences that agree except where an original element sits below a
reversed-naturals one.  The space's relation is reflexive but deliberately
not transitive, while the ranking is always a valid partial ranking of it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product
from typing import Iterable

from .arrays import BlockArray, evaluate, is_bad, lt_prime
from .blocks import (
    FinSeq,
    WindowedBlock,
    as_finseq,
    is_prefix,
    is_valid_block,
    lenlex,
    schreier_block,
)
from .errors import BudgetError, PostconditionError, PreconditionError, StructureError
from .relations import FiniteRelation, PartialRanking, validate_partial_ranking

DEFAULT_CARRIER_CAP = 1500

GadgetSeq = tuple[int, ...]


@dataclass(frozen=True)
class OmegaStar:
    """Naturals 0..bound under the reversed order (m relates to n iff m >= n)."""

    bound: int

    def __post_init__(self):
        if self.bound < 0:
            raise StructureError("omega bound must be a natural number")

    def relation(self) -> FiniteRelation:
        labels = tuple(f"ω{m}" for m in range(self.bound + 1))
        pairs = frozenset(
            (m, n) for m in range(self.bound + 1) for n in range(self.bound + 1) if m >= n
        )
        return FiniteRelation(labels, pairs)


@dataclass(frozen=True)
class GadgetFamily:
    """A finite list of reflexive relations, one per coordinate."""

    members: tuple[FiniteRelation, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        for i, member in enumerate(self.members):
            if not member.is_reflexive():
                raise StructureError(f"family member {i} is not reflexive")

    @property
    def size(self) -> int:
        return len(self.members)


def _omega_labels(taken: Iterable[str], bound: int) -> tuple[str, ...]:
    taken = set(taken)
    labels = []
    for m in range(bound + 1):
        label = f"ω{m}"
        while label in taken:
            label += "'"
        taken.add(label)
        labels.append(label)
    return tuple(labels)


def build_extended(rn: FiniteRelation, omega_bound: int) -> FiniteRelation:
    """Disjoint union of a reflexive relation with the reversed naturals.

    The original carrier comes first; reversed-naturals elements follow.
    Every original element relates to every reversed-naturals element, and
    the reversed side keeps its total order.
    """
    if not rn.is_reflexive():
        raise PreconditionError("build_extended requires a reflexive relation")
    q = rn.carrier_size
    labels = rn.labels + _omega_labels(rn.labels, omega_bound)
    pairs = set(rn.pairs)
    for m in range(omega_bound + 1):
        for n in range(omega_bound + 1):
            if m >= n:
                pairs.add((q + m, q + n))
    for i in range(q):
        for m in range(omega_bound + 1):
            pairs.add((i, q + m))
    return FiniteRelation(labels, frozenset(pairs))


@dataclass(frozen=True)
class GadgetSpace:
    """Materialised sequence space with its relation and ranking.

    Sequences are tuples of per-coordinate codes: at coordinate ``i``,
    codes below ``|Q_i|`` are original elements and codes from ``|Q_i|``
    upward stand for reversed-naturals values ``0..omega_bound``.
    """

    family: GadgetFamily
    omega_bound: int
    carrier: tuple[GadgetSeq, ...]
    relation: FiniteRelation
    ranking: PartialRanking

    @cached_property
    def index(self) -> dict[GadgetSeq, int]:
        return {seq: i for i, seq in enumerate(self.carrier)}

    def q_size(self, i: int) -> int:
        return self.family.members[i].carrier_size

    def is_omega(self, i: int, code: int) -> bool:
        return code >= self.q_size(i)

    def omega_value(self, i: int, code: int) -> int:
        if not self.is_omega(i, code):
            raise StructureError(f"code {code} at coordinate {i} is not a reversed-naturals value")
        return code - self.q_size(i)

    def omega_code(self, i: int, m: int) -> int:
        if not 0 <= m <= self.omega_bound:
            raise StructureError(f"reversed-naturals value {m} is out of range")
        return self.q_size(i) + m

    def seq_label(self, seq: GadgetSeq) -> str:
        parts = []
        for i, code in enumerate(seq):
            if self.is_omega(i, code):
                parts.append(f"ω{self.omega_value(i, code)}")
            else:
                parts.append(self.family.members[i].labels[code])
        return "⟨" + ",".join(parts) + "⟩"

    def coord_related(self, i: int, a: int, b: int) -> bool:
        """The extended relation at coordinate i, on codes."""
        a_omega, b_omega = self.is_omega(i, a), self.is_omega(i, b)
        if a_omega and b_omega:
            return self.omega_value(i, a) >= self.omega_value(i, b)
        if not a_omega and b_omega:
            return True
        if not a_omega and not b_omega:
            return (a, b) in self.family.members[i].pairs
        return False


def _space_related(fam: GadgetFamily, sigma: GadgetSeq, tau: GadgetSeq) -> bool:
    if len(sigma) >= len(tau):
        return True
    for i in range(len(sigma)):
        a, b = sigma[i], tau[i]
        qi = fam.members[i].carrier_size
        a_omega, b_omega = a >= qi, b >= qi
        if a_omega and b_omega:
            if a - qi >= b - qi:
                return True
        elif not a_omega and b_omega:
            return True
        elif not a_omega and not b_omega and (a, b) in fam.members[i].pairs:
            return True
    return False


def _seq_label(fam: GadgetFamily, seq: GadgetSeq) -> str:
    parts = []
    for i, code in enumerate(seq):
        qi = fam.members[i].carrier_size
        if code >= qi:
            parts.append(f"ω{code - qi}")
        else:
            parts.append(fam.members[i].labels[code])
    return "⟨" + ",".join(parts) + "⟩"


def build_space(
    fam: GadgetFamily, omega_bound: int, carrier_cap: int = DEFAULT_CARRIER_CAP
) -> GadgetSpace:
    """Materialise the sequence space, its relation, and its ranking.

    The carrier holds all sequences of length up to the family size; its
    size is checked against ``carrier_cap`` before anything is built.  The
    ranking is verified to be a partial ranking of the relation.
    """
    if omega_bound < 0:
        raise StructureError("omega bound must be a natural number")
    sizes = [member.carrier_size + omega_bound + 1 for member in fam.members]
    total = 0
    block_size = 1
    for length in range(fam.size + 1):
        total += block_size
        if total > carrier_cap:
            raise BudgetError(
                f"gadget carrier would exceed the cap of {carrier_cap} sequences",
                progress={"cap": carrier_cap},
            )
        if length < fam.size:
            block_size *= sizes[length]

    carrier: list[GadgetSeq] = []
    for length in range(fam.size + 1):
        carrier.extend(product(*(range(sizes[i]) for i in range(length))))
    carrier.sort(key=lambda seq: (len(seq), seq))

    pairs = set()
    ranking_pairs = set()
    for a, sigma in enumerate(carrier):
        for b, tau in enumerate(carrier):
            if _space_related(fam, sigma, tau):
                pairs.add((a, b))
            if len(sigma) == len(tau):
                ok = True
                for i in range(len(sigma)):
                    qi = fam.members[i].carrier_size
                    if sigma[i] == tau[i]:
                        continue
                    if sigma[i] < qi and tau[i] >= qi:
                        continue
                    ok = False
                    break
                if ok:
                    ranking_pairs.add((a, b))

    labels = tuple(_seq_label(fam, seq) for seq in carrier)
    space = GadgetSpace(
        family=fam,
        omega_bound=omega_bound,
        carrier=tuple(carrier),
        relation=FiniteRelation(labels, frozenset(pairs)),
        ranking=PartialRanking(len(carrier), frozenset(ranking_pairs)),
    )
    if not validate_partial_ranking(space.relation, space.ranking):
        raise PostconditionError("gadget ranking is not a partial ranking of the relation")
    return space


def find_nontransitive_witness(space: GadgetSpace) -> tuple[int, int, int] | None:
    """First triple (a, b, c) with a R b R c but not a R c, in index order."""
    pairs = space.relation.pairs
    n = len(space.carrier)
    for a in range(n):
        for b in range(n):
            if (a, b) not in pairs:
                continue
            for c in range(n):
                if (b, c) in pairs and (a, c) not in pairs:
                    return (a, b, c)
    return None


def canonical_bad_array(space: GadgetSpace, window: Iterable[int]) -> BlockArray:
    """The always-descending bad array on the least-point-length block.

    Block elements have length one more than their least point; the value
    at an element with least point ``m`` is the length-``m+1`` sequence
    whose entries are all the reversed-naturals value ``m``.
    """
    window = as_finseq(sorted(set(window)))
    block = None
    for k in range(1, len(window) + 1):
        candidate = schreier_block(window, k)
        if is_valid_block(candidate):
            block = candidate
            break
    if block is None:
        raise PreconditionError(
            f"no rank makes the least-point-length block valid over {list(window)}"
        )
    mins = [e[0] for e in block.sorted_elements()]
    if mins and max(mins) + 1 > space.family.size:
        raise PreconditionError("window needs value sequences longer than the family size")
    if mins and max(mins) > space.omega_bound:
        raise PreconditionError("window least points exceed the omega bound")

    values = {}
    for e in block.sorted_elements():
        m = e[0]
        seq = tuple(space.omega_code(i, m) for i in range(m + 1))
        values[e] = space.index[seq]
    array = BlockArray.of(block, values, space.relation, space.ranking)
    if not is_bad(array).bad_in_window:
        raise PostconditionError("canonical array failed the badness check")
    return array


def decode(space: GadgetSpace, f: BlockArray, i: int) -> bool:
    """True iff coordinate ``i`` of every applicable value sits on the reversed side."""
    if f.target != space.relation:
        raise PreconditionError("array does not target this gadget space")
    if not 0 <= i < space.family.size:
        raise PreconditionError(f"coordinate {i} is outside the family")
    if not is_bad(f).bad_in_window:
        raise PreconditionError("decode requires a bad array")
    for _, v in f.assignments:
        seq = space.carrier[v]
        if i < len(seq) and not space.is_omega(i, seq[i]):
            return False
    return True


def substitute(space: GadgetSpace, f: BlockArray, i: int, h: BlockArray) -> BlockArray:
    """Splice a bad coordinate array into coordinate ``i`` of ``f``.

    The result lives on the coarsest block refining both inputs over h's
    window; each value keeps f's entries except at coordinate ``i``, which
    takes h's value.  The result must be bad and strictly below ``f``
    pointwise; a failed strictness check is treated as a precondition
    error (the coordinate was not genuinely lowered).
    """
    if f.target != space.relation:
        raise PreconditionError("array does not target this gadget space")
    if not 0 <= i < space.family.size:
        raise PreconditionError(f"coordinate {i} is outside the family")
    if h.target != space.family.members[i]:
        raise PreconditionError("inner array must target the family member at the coordinate")
    if not is_bad(h).bad_in_window:
        raise PreconditionError("inner array must be bad")
    if not set(h.block.window) <= set(f.block.window):
        raise PreconditionError("inner window must sit inside the outer window")

    k = max(f.block.rank, h.block.rank)
    elements = set()
    for full in combinations(h.block.window, k):
        f_prefixes = [e for e in f.block.elements if is_prefix(e, full)]
        h_prefixes = [e for e in h.block.elements if is_prefix(e, full)]
        if not f_prefixes or not h_prefixes:
            raise PreconditionError("inner window escapes the coverage of one of the blocks")
        fp = min(f_prefixes, key=lenlex)
        hp = min(h_prefixes, key=lenlex)
        elements.add(fp if len(fp) >= len(hp) else hp)
    block = WindowedBlock(h.block.window, k, frozenset(elements))

    values = {}
    for t in block.sorted_elements():
        outer = space.carrier[evaluate(f, t)]
        if i >= len(outer):
            raise PreconditionError(
                f"coordinate {i} is beyond the value length at {list(t)}"
            )
        inner = evaluate(h, t)
        seq = outer[:i] + (inner,) + outer[i + 1 :]
        values[t] = space.index[seq]
    g = BlockArray.of(block, values, space.relation, space.ranking)

    if not is_bad(g).bad_in_window:
        raise PostconditionError("substitution produced a non-bad array")
    if not lt_prime(g, f):
        raise PreconditionError("substitution did not strictly lower the array")
    return g
