"""Blocks: validity, the successor relation, refinement orders, surgery."""

import random
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from bqokit import (
    DomainError,
    PreconditionError,
    StructureError,
    WindowedBlock,
    block_after,
    departure_maxima,
    is_barrier,
    is_prefix,
    is_valid_block,
    kset_block,
    le_dot,
    least_departure,
    lt_dot,
    normalize_refinement,
    patch_elements,
    schreier_block,
    singleton_block,
    surgery,
    triangle,
    validate_block,
)
from helpers import (
    naive_valid_blocks,
    random_block,
    random_refinement,
    triangle_oracle,
    triangle_witness_table,
)


class TestValidity:
    def test_singletons_valid(self):
        for k in (1,):
            assert validate_block(singleton_block(range(5))).valid

    def test_all_pairs_valid(self):
        assert validate_block(kset_block(range(5), 2)).valid

    def test_schreier_block_valid(self):
        b = schreier_block(range(7), 4)
        report = validate_block(b)
        assert report.valid
        # independent coverage count over all rank-sized subsets
        for full in combinations(range(7), 4):
            hits = [e for e in b.elements if is_prefix(e, full)]
            assert len(hits) == 1

    def test_prefix_violation_breaks_antichain(self):
        b = WindowedBlock.of(range(3), 2, [(1,), (1, 2), (0,)])
        report = validate_block(b)
        assert not report.antichain and not report.valid

    def test_empty_element_rejected(self):
        with pytest.raises(StructureError):
            WindowedBlock.of(range(3), 2, [()])

    def test_non_increasing_element_rejected(self):
        with pytest.raises(StructureError):
            WindowedBlock.of(range(3), 2, [(2, 1)])

    def test_unique_prefix_per_full_subset(self):
        rng = random.Random(5)
        for _ in range(40):
            w = rng.randint(2, 6)
            b = random_block(rng, range(w), rng.randint(1, min(3, w)))
            assert is_valid_block(b)
            for full in combinations(b.window, b.rank):
                hits = [e for e in b.elements if is_prefix(e, full)]
                assert len(hits) == 1


class TestBarrier:
    def test_uniform_length_blocks_are_barriers(self):
        assert is_barrier(kset_block(range(4), 2))

    def test_mixed_antichain_barrier(self):
        b = WindowedBlock.of(range(4), 2, [(0,), (1,), (2, 3)])
        assert validate_block(b).valid
        assert is_barrier(b)

    def test_schreier_is_the_classic_barrier(self):
        # elements containing an element's least point are no longer than it
        assert is_barrier(schreier_block(range(7), 4))

    def test_subset_with_shifted_prefix_is_no_barrier(self):
        b = WindowedBlock.of(range(3), 2, [(0,), (1, 2), (2,)])
        assert validate_block(b).valid
        assert not is_barrier(b)

    def test_invalid_block_rejected(self):
        b = WindowedBlock.of(range(3), 2, [(1,), (1, 2)])
        with pytest.raises(PreconditionError):
            is_barrier(b)


class TestTriangle:
    def test_overlapping_pair(self):
        assert triangle((0, 1), (1, 2), range(9)) is True

    def test_interleaved_pair(self):
        assert triangle((0, 2), (1, 3), range(9)) is False

    def test_empty_tail_with_gap(self):
        assert triangle((5,), (6, 7), range(9)) is True

    def test_never_self_related(self):
        for s in [(0,), (1, 3), (0, 2, 4)]:
            assert not triangle(s, s, range(6))

    def test_empty_sequence_rejected(self):
        with pytest.raises(DomainError):
            triangle((), (1,), range(3))

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=60, deadline=None)
    def test_matches_oracle(self, seed):
        rng = random.Random(seed)
        pool = range(8)
        s = tuple(sorted(rng.sample(pool, rng.randint(1, 4))))
        t = tuple(sorted(rng.sample(pool, rng.randint(1, 4))))
        assert triangle(s, t, range(10)) == triangle_oracle(s, t)

    def test_monotone_under_prefixes(self):
        # shortening both sides preserves the relation
        table = triangle_witness_table(range(8))
        for s, t in list(table)[:500]:
            for i in range(1, len(s) + 1):
                for j in range(1, len(t) + 1):
                    assert (s[:i], t[:j]) in table


class TestRefinementOrders:
    def test_reflexive(self):
        b = kset_block(range(4), 2)
        assert le_dot(b, b) and not lt_dot(b, b)

    def test_pairs_refine_singletons(self):
        b = kset_block(range(2, 6), 2)
        c = singleton_block(range(6))
        assert lt_dot(b, c)

    def test_singletons_do_not_refine_pairs(self):
        assert not le_dot(singleton_block(range(4)), kset_block(range(4), 2))

    def test_transitive_and_strict_composition(self):
        rng = random.Random(13)
        checked = 0
        while checked < 200:
            w = rng.randint(3, 6)
            d = random_block(rng, range(w), rng.randint(1, 2))
            c = random_refinement(rng, d, 3)
            if c is None:
                continue
            b = random_refinement(rng, c, 3)
            if b is None:
                continue
            assert le_dot(b, c) and le_dot(c, d)
            assert le_dot(b, d)
            if lt_dot(b, c):
                assert lt_dot(b, d)
            checked += 1

    def test_weak_then_strict_need_not_compose(self):
        # the corpus triple: refining strictly in the middle only
        d = singleton_block(range(5))
        c = WindowedBlock.of(range(5), 2, [(0,), (1,), (2, 3), (2, 4), (3,), (4,)])
        b = singleton_block(range(2))
        assert validate_block(c).valid
        assert le_dot(b, c) and lt_dot(c, d)
        assert le_dot(b, d) and not lt_dot(b, d)


class TestPatchAndDeparture:
    def setup_method(self):
        self.b = singleton_block(range(6))
        self.c = kset_block(range(2, 6), 2)

    def test_patch_values(self):
        assert patch_elements(self.c, self.b, 2) == frozenset({(0,), (1,)})
        assert patch_elements(self.c, self.b, 0) == frozenset({(0,)})

    def test_patch_disjoint_from_refinement(self):
        rng = random.Random(17)
        checked = 0
        while checked < 150:
            w = rng.randint(3, 7)
            b = random_block(rng, range(w), rng.randint(1, 3))
            c = random_refinement(rng, b, 3)
            if c is None or not lt_dot(c, b):
                continue
            n = rng.randint(0, least_departure(c, b))
            assert not (patch_elements(c, b, n) & c.elements)
            checked += 1

    def test_patch_empty_when_base_exhausts_window(self):
        b = singleton_block(range(4))
        c = WindowedBlock.of(range(4), 2, [(0, 1), (0, 2), (0, 3), (1,), (2,), (3,)])
        assert lt_dot(c, b)
        assert set(c.union()) == set(b.window)
        for n in range(4):
            assert patch_elements(c, b, n) == frozenset()

    def test_departure_values(self):
        assert departure_maxima(self.c, self.b) == {2, 3, 4, 5}
        assert least_departure(self.c, self.b) == 2

    def test_departure_of_schreier_inside_pairs(self):
        b = kset_block(range(6), 2)
        c = schreier_block(range(6), 3)
        assert departure_maxima(c, b) == {1, 2, 3, 4, 5}
        assert least_departure(c, b) == 1

    def test_least_departure_requires_strictness(self):
        b = kset_block(range(4), 2)
        with pytest.raises(DomainError):
            least_departure(b, b)


class TestSurgery:
    def test_reattaches_low_points(self):
        b = singleton_block(range(6))
        c = kset_block(range(2, 6), 2)
        d = surgery(c, b, 2)
        assert d.window == tuple(range(6))
        assert d.elements == c.elements | {(0,), (1,)}
        assert least_departure(d, b) == 2

    def test_window_shrinks_when_coverage_is_lost(self):
        b = singleton_block(range(6))
        c = kset_block(range(2, 6), 2)
        d = surgery(c, b, 0)
        assert d.window == (0, 2, 3, 4, 5)
        assert d.elements == c.elements | {(0,)}
        assert is_valid_block(d)

    def test_empty_patch_returns_refinement_elements(self):
        b = singleton_block(range(4))
        c = WindowedBlock.of(range(4), 2, [(0, 1), (0, 2), (0, 3), (1,), (2,), (3,)])
        d = surgery(c, b, least_departure(c, b))
        assert d.elements == c.elements

    def test_budget_of_n_is_enforced(self):
        b = singleton_block(range(6))
        c = kset_block(range(2, 6), 2)
        with pytest.raises(PreconditionError):
            surgery(c, b, least_departure(c, b) + 1)

    def test_random_postconditions(self):
        rng = random.Random(20260810)
        checked = 0
        while checked < 200:
            w = rng.randint(3, 7)
            b = random_block(rng, range(w), rng.randint(1, 3))
            c = random_refinement(rng, b, 3)
            if c is None or not lt_dot(c, b):
                continue
            m = least_departure(c, b)
            d = surgery(c, b, rng.randint(0, m))
            assert is_valid_block(d)
            assert le_dot(c, d) and lt_dot(d, b)
            assert least_departure(d, b) == m
            checked += 1


class TestBlockAfter:
    def test_filters_by_least_point(self):
        after = block_after(kset_block(range(6), 2), (0, 2))
        assert after.elements == kset_block(range(3, 6), 2).elements
        assert after.window == (3, 4, 5)

    def test_beyond_window_empties_the_block(self):
        after = block_after(kset_block(range(4), 2), (5,))
        assert after.elements == frozenset() and after.window == ()

    def test_empty_sequence_returns_input(self):
        b = kset_block(range(4), 2)
        assert block_after(b, ()) == b


class TestNormalizeRefinement:
    def test_proper_extensions_pass_through(self):
        b = singleton_block(range(4))
        c = kset_block(range(4), 2)
        assert normalize_refinement(b, c) == c

    def test_stalled_elements_are_extended(self):
        b = kset_block(range(6), 2)
        c = singleton_block(range(6))
        result = normalize_refinement(b, c)
        assert result.elements == kset_block(range(6), 3).elements
        assert result.window == c.window
        assert is_valid_block(result)

    def test_window_containment_required(self):
        b = kset_block(range(2, 5), 2)
        c = singleton_block(range(5))
        with pytest.raises(PreconditionError):
            normalize_refinement(b, c)


class TestNaiveEnumeratorAgreesOnValidity:
    def test_reduced_blocks_are_exactly_the_canonical_ones(self):
        from bqokit import enumerate_blocks

        for w, k_max in [(3, 2), (4, 2)]:
            canonical = {
                (b.rank, b.elements) for b in enumerate_blocks(range(w), k_max)
            }
            naive = set()
            for k in range(1, k_max + 1):
                for b in naive_valid_blocks(range(w), k, reduced_only=True):
                    naive.add((b.rank, b.elements))
            assert canonical == naive
