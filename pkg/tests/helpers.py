"""Shared oracles and instance generators for the test suite.

The oracles here are deliberately independent of the library code they
check: the successor-relation oracle enumerates witnessing extensions
directly, and the naive block enumerator filters raw subsets through the
validity flags instead of walking the canonical cut tree.
"""

from __future__ import annotations

import random
from itertools import combinations

from bqokit import (
    BlockArray,
    FiniteRelation,
    GadgetFamily,
    PartialRanking,
    WindowedBlock,
    is_prefix,
    is_valid_block,
    rado_order,
    singleton_block,
)
from bqokit.search import _reach


# ---------------------------------------------------------------------------
# Successor-relation oracle
# ---------------------------------------------------------------------------

def triangle_witness_table(points: range) -> set[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All (s, t) such that some X within ``points`` has s as a proper prefix
    and t as a proper prefix of X minus its least element."""
    table = set()
    pts = list(points)
    for size in range(2, len(pts) + 1):
        for x in combinations(pts, size):
            tail = x[1:]
            for i in range(1, len(x)):
                for j in range(1, len(tail)):
                    table.add((x[:i], tail[:j]))
    return table


def triangle_oracle(s: tuple[int, ...], t: tuple[int, ...]) -> bool:
    """Single-pair version over an enlarged window."""
    top = max(s + t)
    return (s, t) in triangle_witness_table(range(top + 3))


# ---------------------------------------------------------------------------
# Naive block enumeration (independent of the canonical cut tree)
# ---------------------------------------------------------------------------

def all_increasing_seqs(window, rank):
    seqs = []
    for length in range(1, rank + 1):
        seqs.extend(combinations(window, length))
    return seqs


def naive_valid_blocks(window, rank, reduced_only=False):
    """Every valid block over the window at exactly this rank, by filtering
    all subsets of all short increasing sequences."""
    window = tuple(window)
    seqs = all_increasing_seqs(window, rank)
    found = []
    for mask in range(1, 2 ** len(seqs)):
        elements = frozenset(seqs[i] for i in range(len(seqs)) if mask >> i & 1)
        block = WindowedBlock(window, rank, elements)
        if not is_valid_block(block):
            continue
        if reduced_only and not all(_reach(e, window, rank) for e in elements):
            continue
        found.append(block)
    return found


# ---------------------------------------------------------------------------
# Random instances
# ---------------------------------------------------------------------------

def random_block(rng: random.Random, window, rank) -> WindowedBlock:
    window = tuple(window)

    def cut(prefix):
        ext = [
            prefix + (v,)
            for v in window
            if v > prefix[-1] and _reach(prefix + (v,), window, rank)
        ]
        if len(prefix) == rank or not ext or rng.random() < 0.5:
            return [prefix]
        grown = []
        for child in ext:
            grown.extend(cut(child))
        return grown

    elements = []
    for a in window:
        if _reach((a,), window, rank):
            elements.extend(cut((a,)))
    return WindowedBlock(window, rank, frozenset(elements))


def random_refinement(rng: random.Random, base: WindowedBlock, max_rank: int, tries=60):
    """A random strict refinement of ``base`` over a random sub-window, or None."""
    for _ in range(tries):
        size = rng.randint(1, len(base.window))
        sub = tuple(sorted(rng.sample(list(base.window), size)))
        k = rng.randint(1, max_rank)
        if len(sub) < k:
            continue
        roots = [s for s in base.sorted_elements() if set(s) <= set(sub) and _reach(s, sub, k)]
        if not all(any(is_prefix(s, full) for s in roots) for full in combinations(sub, k)):
            continue

        def cut(prefix):
            ext = [
                prefix + (v,) for v in sub if v > prefix[-1] and _reach(prefix + (v,), sub, k)
            ]
            if len(prefix) == k or not ext or rng.random() < 0.5:
                return [prefix]
            grown = []
            for child in ext:
                grown.extend(cut(child))
            return grown

        elements = []
        for root in roots:
            elements.extend(cut(root))
        candidate = WindowedBlock(sub, k, frozenset(elements))
        if not candidate.elements <= base.elements:
            return candidate
    return None


def random_ranked_relation(rng: random.Random, n: int, require_strict=True):
    """A reflexive relation with a valid non-identity partial ranking of it.

    The ranking is the reflexive-transitive closure of random edges along a
    random topological order; the relation adds random extra pairs and is
    then closed under the compatibility law.
    """
    while True:
        order = list(range(n))
        rng.shuffle(order)
        strict = set()
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < 0.4:
                    strict.add((order[i], order[j]))
        changed = True
        while changed:
            changed = False
            for a, b in list(strict):
                for c, d in list(strict):
                    if b == c and (a, d) not in strict:
                        strict.add((a, d))
                        changed = True
        if require_strict and not strict:
            continue
        ranking_pairs = frozenset(strict | {(i, i) for i in range(n)})
        ranking = PartialRanking(n, ranking_pairs)

        pairs = set(ranking_pairs)
        for p in range(n):
            for q in range(n):
                if rng.random() < 0.2:
                    pairs.add((p, q))
        changed = True
        while changed:
            changed = False
            for p, q in list(pairs):
                for s in range(n):
                    if (q, s) in ranking_pairs and (p, s) not in pairs:
                        pairs.add((p, s))
                        changed = True
        relation = FiniteRelation(tuple(f"q{i}" for i in range(n)), frozenset(pairs))
        return relation, ranking


# ---------------------------------------------------------------------------
# Relabeling helpers (for equivariance properties)
# ---------------------------------------------------------------------------

def permute_relation(r: FiniteRelation, perm: list[int]) -> FiniteRelation:
    labels = [""] * r.carrier_size
    for old, new in enumerate(perm):
        labels[new] = r.labels[old]
    return FiniteRelation(tuple(labels), frozenset((perm[p], perm[q]) for p, q in r.pairs))


def permute_ranking(rk: PartialRanking, perm: list[int]) -> PartialRanking:
    return PartialRanking(rk.carrier_size, frozenset((perm[p], perm[q]) for p, q in rk.pairs))


# ---------------------------------------------------------------------------
# Descent instances
# ---------------------------------------------------------------------------

def antichain_instance(width: int, window_size: int):
    """Ranking with one top above ``width`` pairwise-incomparable elements;
    the relation is the ranking itself.  The start array puts the top first
    and distinct low elements after it."""
    assert window_size <= width + 1
    n = width + 1
    pairs = {(i, i) for i in range(n)} | {(i, 0) for i in range(1, n)}
    ranking = PartialRanking.of(n, pairs)
    relation = FiniteRelation.of(
        ["top"] + [f"a{i}" for i in range(1, n)], pairs
    )
    block = singleton_block(range(window_size))
    values = {(i,): i for i in range(window_size)}
    array = BlockArray.of(block, values, relation, ranking)
    return relation, ranking, array


def two_chain_instance(window_size: int = 3):
    """Two disjoint chains below a common top: top > m1 > l1, top > m2 > l2."""
    labels = ["top", "m1", "m2", "l1", "l2"]
    pairs = {(i, i) for i in range(5)} | {(1, 0), (2, 0), (3, 1), (4, 2), (3, 0), (4, 0)}
    ranking = PartialRanking.of(5, pairs)
    relation = FiniteRelation.of(labels, pairs)
    block = singleton_block(range(window_size))
    start = {(0,): 0, (1,): 1, (2,): 3}
    values = {e: start[e] for e in block.elements}
    array = BlockArray.of(block, values, relation, ranking)
    return relation, ranking, array


def mixed_family():
    """Empty member, a small rado truncation, and a singleton identity."""
    return GadgetFamily(
        (
            FiniteRelation.of([], []),
            rado_order(3),
            FiniteRelation.identity(["u"]),
        )
    )


def tiny_family():
    """One-element, two-antichain, two-chain members."""
    return GadgetFamily(
        (
            FiniteRelation.identity(["a"]),
            FiniteRelation.identity(["b0", "b1"]),
            FiniteRelation.of(["c0", "c1"], [(0, 0), (1, 1), (0, 1)]),
        )
    )
