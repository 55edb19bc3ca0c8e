"""Searches: bad sequences and arrays, minimality, and the descent chain."""

import random

import pytest

from bqokit import (
    BlockArray,
    Budget,
    BudgetError,
    FiniteRelation,
    PartialRanking,
    PreconditionError,
    STEP_LIMIT,
    TERMINATED_MINIMAL,
    WINDOW_EXHAUSTED,
    build_space,
    canonical_bad_array,
    descent_step,
    enumerate_blocks,
    find_bad_array,
    find_bad_sequence,
    is_bad,
    is_laver_minimal,
    is_simpson_minimal,
    kset_block,
    le_dot_prime,
    least_departure,
    limit_block,
    lt_dot_prime,
    powerset_lift,
    rado_order,
    rado_rows,
    run_descent,
    singleton_block,
)
from helpers import (
    antichain_instance,
    mixed_family,
    naive_valid_blocks,
    tiny_family,
    two_chain_instance,
)


class TestBadSequence:
    def test_identity_admits_enumerations(self):
        r = FiniteRelation.identity(["a", "b", "c", "d"])
        seq = find_bad_sequence(r, 4)
        assert seq is not None and len(set(seq)) == 4

    def test_pigeonhole_kills_longer(self):
        r = FiniteRelation.identity(["a", "b", "c", "d"])
        assert find_bad_sequence(r, 5) is None

    def test_powerset_rows_descend(self):
        lifted = powerset_lift(rado_order(8), rado_rows(8))
        seq = find_bad_sequence(lifted, 7)
        assert seq == (0, 1, 2, 3, 4, 5, 6)

    def test_soundness(self):
        rng = random.Random(23)
        for _ in range(30):
            n = rng.randint(1, 5)
            pairs = {(i, i) for i in range(n)}
            for p in range(n):
                for q in range(n):
                    if rng.random() < 0.3:
                        pairs.add((p, q))
            r = FiniteRelation.of([f"q{i}" for i in range(n)], pairs)
            seq = find_bad_sequence(r, rng.randint(1, n + 1))
            if seq is not None:
                for i in range(len(seq)):
                    for j in range(i + 1, len(seq)):
                        assert (seq[i], seq[j]) not in r.pairs


class TestFindBadArray:
    def test_single_element_carrier_has_none(self):
        r = FiniteRelation.identity(["a"])
        assert find_bad_array(r, range(4), 2) is None

    def test_rado_window_array_found_and_sound(self):
        r = rado_order(8)
        found = find_bad_array(r, range(8), 2)
        assert found is not None
        assert is_bad(found).bad_in_window

    def test_two_antichain_needs_rank_two(self):
        r = FiniteRelation.identity(["a", "b"])
        found_rank1 = find_bad_array(r, range(4), 1)
        assert found_rank1 is None
        found_rank2 = find_bad_array(r, range(4), 2)
        assert found_rank2 is not None and found_rank2.block.rank == 2

    def test_completeness_against_naive_enumeration(self):
        rng = random.Random(29)
        for _ in range(12):
            n = rng.randint(1, 3)
            pairs = {(i, i) for i in range(n)}
            for p in range(n):
                for q in range(n):
                    if rng.random() < 0.4:
                        pairs.add((p, q))
            r = FiniteRelation.of([f"q{i}" for i in range(n)], pairs)
            fast = find_bad_array(r, range(3), 2)

            naive_hit = None
            for k in (1, 2):
                for block in naive_valid_blocks(range(3), k, reduced_only=True):
                    elems = block.sorted_elements()
                    for mask in range(n ** len(elems)):
                        values, rest = {}, mask
                        for e in elems:
                            values[e] = rest % n
                            rest //= n
                        g = BlockArray.of(block, values, r)
                        if is_bad(g).bad_in_window:
                            naive_hit = g
                            break
                    if naive_hit:
                        break
                if naive_hit:
                    break
            assert (fast is None) == (naive_hit is None)

    def test_budget_error_reports_progress(self):
        r = rado_order(5)
        with pytest.raises(BudgetError) as exc:
            find_bad_array(r, range(5), 2, budget=Budget(max_candidates=3))
        assert "blocks_examined" in exc.value.progress

    def test_parallel_scan_matches_sequential(self):
        r = FiniteRelation.identity(["a", "b", "c"])
        sequential = find_bad_array(r, range(5), 2, jobs=1)
        parallel = find_bad_array(r, range(5), 2, jobs=3)
        assert sequential == parallel

    def test_requires_reflexive(self):
        r = FiniteRelation.of(["a"], [])
        with pytest.raises(PreconditionError):
            find_bad_array(r, range(3), 1)


class TestEnumerateBlocks:
    def test_deterministic_order(self):
        first = [b.sorted_elements() for b in enumerate_blocks(range(4), 2)]
        second = [b.sorted_elements() for b in enumerate_blocks(range(4), 2)]
        assert first == second

    def test_all_yields_are_valid(self):
        from bqokit import is_valid_block

        for b in enumerate_blocks(range(5), 3):
            assert is_valid_block(b)


class TestMinimality:
    def test_identity_ranking_makes_everything_minimal(self):
        r = FiniteRelation.identity(["a", "b"])
        rk = PartialRanking.identity(2)
        f = BlockArray.of(singleton_block(range(2)), {(0,): 0, (1,): 1}, r, rk)
        assert is_bad(f).bad_in_window
        assert is_laver_minimal(f).minimal
        assert is_simpson_minimal(f).minimal

    def test_gadget_canonical_array_admits_descents(self):
        space = build_space(tiny_family(), omega_bound=3)
        f = canonical_bad_array(space, range(5))
        verdict = is_laver_minimal(f)
        assert not verdict.minimal
        g = verdict.counterexample
        assert is_bad(g).bad_in_window
        assert lt_dot_prime(g, f)

    def test_strictly_reducible_value_is_not_simpson_minimal(self):
        labels = ["t1", "t2", "x", "y"]
        pairs = {(i, i) for i in range(4)} | {(2, 0), (3, 0), (2, 1), (3, 1)}
        rk = PartialRanking.of(4, pairs)
        rel = FiniteRelation.of(labels, pairs)
        f = BlockArray.of(singleton_block(range(2)), {(0,): 0, (1,): 1}, rel, rk)
        verdict = is_simpson_minimal(f)
        assert not verdict.minimal
        assert verdict.counterexample is not None

    def test_descent_endpoint_is_laver_minimal(self):
        _, _, f0 = two_chain_instance()
        trace = run_descent(f0, max_steps=8)
        final = trace.chain[-1]
        assert is_laver_minimal(final).minimal

    def test_laver_implies_simpson_at_matched_budgets(self):
        arrays = []
        for builder in (lambda: antichain_instance(2, 3), lambda: antichain_instance(3, 3), two_chain_instance):
            _, _, f0 = builder()
            trace = run_descent(f0, max_steps=8)
            arrays.extend(trace.chain)
        space = build_space(mixed_family(), omega_bound=4)
        f = canonical_bad_array(space, range(5))
        arrays.extend(run_descent(f, max_steps=8).chain)

        checked = 0
        for f in arrays:
            laver = is_laver_minimal(
                f, Budget(max_rank=max(f.block.rank + 1, f.block.rank))
            )
            if laver.minimal:
                assert is_simpson_minimal(f, Budget(max_rank=f.block.rank)).minimal
                checked += 1
        assert checked >= 3

    def test_requires_badness(self):
        rel, rk, _ = antichain_instance(2, 3)
        block = singleton_block(range(2))
        not_bad = BlockArray.of(block, {(0,): 0, (1,): 0}, rel, rk)
        with pytest.raises(PreconditionError):
            is_laver_minimal(not_bad)


class TestDescentStep:
    def test_minimal_input_signals_completion(self):
        r = FiniteRelation.identity(["a", "b"])
        rk = PartialRanking.identity(2)
        f = BlockArray.of(singleton_block(range(2)), {(0,): 0, (1,): 1}, r, rk)
        assert descent_step(f) is None

    def test_step_postconditions_on_gadget(self):
        space = build_space(tiny_family(), omega_bound=3)
        f = canonical_bad_array(space, range(5))
        step = descent_step(f)
        assert step is not None
        f1, p = step
        assert is_bad(f1).bad_in_window
        assert lt_dot_prime(f1, f)
        assert least_departure(f1.block, f.block) == p
        low = {x for x in f.block.union() if x <= p}
        assert low <= set(f1.block.union())

    def test_empty_patch_keeps_candidate_block(self):
        _, _, f0 = antichain_instance(2, 3)
        step = descent_step(f0)
        assert step is not None
        f1, p = step
        assert p == 0
        # the selected refinement already exhausts the low base points
        assert all(x in f1.block.union() for x in f0.block.union() if x <= p)


class TestRunDescent:
    def test_minimal_start_gives_singleton_trace(self):
        r = FiniteRelation.identity(["a", "b"])
        rk = PartialRanking.identity(2)
        f = BlockArray.of(singleton_block(range(2)), {(0,): 0, (1,): 1}, r, rk)
        trace = run_descent(f, max_steps=4)
        assert len(trace.chain) == 1
        assert trace.p_values == []
        assert trace.status == TERMINATED_MINIMAL

    def test_gadget_descends_with_monotone_departures(self):
        space = build_space(tiny_family(), omega_bound=3)
        f = canonical_bad_array(space, range(5))
        trace = run_descent(f, max_steps=6)
        assert len(trace.chain) >= 2
        assert all(a <= b for a, b in zip(trace.p_values, trace.p_values[1:]))
        assert trace.status in (TERMINATED_MINIMAL, WINDOW_EXHAUSTED)

    def test_chain_laws_on_battery(self):
        builders = [
            lambda: antichain_instance(2, 3),
            lambda: antichain_instance(3, 4),
            two_chain_instance,
        ]
        for builder in builders:
            _, _, f0 = builder()
            trace = run_descent(f0, max_steps=8)
            chain, ps = trace.chain, trace.p_values
            assert len(ps) == len(chain) - 1
            for i in range(1, len(chain)):
                assert lt_dot_prime(chain[i], chain[i - 1])
                assert le_dot_prime(chain[i], chain[0])
            assert all(a <= b for a, b in zip(ps, ps[1:]))
            for value in set(ps):
                assert ps.count(value) <= 2 ** value

    def test_step_limit_status(self):
        _, _, f0 = two_chain_instance()
        trace = run_descent(f0, max_steps=1)
        assert len(trace.chain) == 2
        assert trace.status == STEP_LIMIT


class TestLimitBlock:
    def test_singleton_trace_limits_to_itself(self):
        r = FiniteRelation.identity(["a", "b"])
        rk = PartialRanking.identity(2)
        f = BlockArray.of(singleton_block(range(2)), {(0,): 0, (1,): 1}, r, rk)
        trace = run_descent(f, max_steps=4)
        c, g, stable = limit_block(trace)
        assert stable and c == f.block and g == f

    def test_terminated_descent_limits_to_final_entry(self):
        _, _, f0 = antichain_instance(2, 3)
        trace = run_descent(f0, max_steps=8)
        assert trace.status == TERMINATED_MINIMAL
        c, g, stable = limit_block(trace)
        assert stable
        assert g == trace.chain[-1]
        assert is_bad(g).bad_in_window
        for entry in trace.chain:
            assert le_dot_prime(g, entry)

    def test_truncated_descent_reports_unstable(self):
        _, _, f0 = two_chain_instance()
        trace = run_descent(f0, max_steps=1)
        assert trace.status == STEP_LIMIT
        c, g, stable = limit_block(trace)
        assert not stable
        assert c.elements <= trace.chain[-1].block.elements
