"""Command-line front end.

Exit statuses are a stable contract: 0 success, 1 property violated,
2 input error, 3 budget exceeded.  With ``--json`` every command prints a
single canonical JSON envelope; identical inputs (including ``--seed`` and
``--jobs``) produce byte-identical output.  The ``--seed`` value is
recorded in the envelope for reproducibility; the shipped commands are
fully deterministic and do not sample.  Runs aborted by ``--time-cap``
exit 3 and sit outside the determinism contract.
"""

from __future__ import annotations

import argparse
import sys

from . import formats
from .arrays import BlockArray, is_bad
from .blocks import is_barrier, is_valid_block, kset_block, validate_block
from .errors import (
    BqoError,
    BudgetError,
    CoverageError,
    DomainError,
    PostconditionError,
    PreconditionError,
    StructureError,
)
from .gadget import GadgetFamily, build_space, canonical_bad_array, decode, substitute
from .relations import (
    check_relation,
    first_ranking_violation,
    powerset_lift,
    rado_order,
    rado_rows,
    validate_partial_ranking,
)
from .search import (
    Budget,
    find_bad_array,
    find_bad_sequence,
    is_laver_minimal,
    is_simpson_minimal,
    limit_block,
    run_descent,
)

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3


def parse_window(spec: str) -> tuple[int, ...]:
    """Accept "a..b" (inclusive) or a comma list of naturals."""
    spec = spec.strip()
    if ".." in spec:
        lo_text, hi_text = spec.split("..", 1)
        lo, hi = int(lo_text), int(hi_text)
        if lo > hi:
            raise StructureError(f"empty window spec {spec!r}")
        return tuple(range(lo, hi + 1))
    points = sorted({int(part) for part in spec.split(",") if part.strip() != ""})
    if not points:
        raise StructureError(f"empty window spec {spec!r}")
    return tuple(points)


def _budget_from(args) -> Budget | None:
    max_candidates = getattr(args, "budget", None)
    max_rank = getattr(args, "rank_budget", None)
    time_cap = getattr(args, "time_cap", None)
    if max_candidates is None and max_rank is None and time_cap is None:
        return None
    return Budget(max_candidates=max_candidates, max_rank=max_rank, time_cap=time_cap)


def _emit(args, envelope: dict, human_lines: list[str]) -> None:
    if args.json:
        sys.stdout.write(formats.render_document(envelope))
    else:
        for line in human_lines:
            print(line)


def _envelope(args, command: str, result: dict) -> dict:
    return {
        "command": command,
        "seed": getattr(args, "seed", None),
        "result": result,
    }


# ---------------------------------------------------------------------------
# check commands
# ---------------------------------------------------------------------------


def cmd_check_relation(args) -> int:
    all_ok = True
    results = []
    lines = []
    for path in args.paths:
        rel = formats.load_relation(path)
        report = check_relation(rel)
        missing = next(
            ((i, i) for i in range(rel.carrier_size) if (i, i) not in rel.pairs), None
        )
        ok = report.reflexive
        all_ok = all_ok and ok
        entry = {
            "path": path,
            "reflexive": report.reflexive,
            "transitive": report.transitive,
            "antisymmetric": report.antisymmetric,
            "partial_order": report.partial_order,
            "well_founded": report.well_founded,
        }
        line = (
            f"relation {path}: reflexive={report.reflexive} transitive={report.transitive} "
            f"antisymmetric={report.antisymmetric} partial_order={report.partial_order} "
            f"well_founded={report.well_founded}"
        )
        if missing is not None:
            label = rel.labels[missing[0]]
            entry["missing_reflexive_pair"] = [label, label]
            line += f" [missing reflexive pair ({label},{label})]"
        results.append(entry)
        lines.append(line)
    _emit(args, _envelope(args, "check-relation", {"objects": results}), lines)
    return EXIT_OK if all_ok else EXIT_VIOLATED


def cmd_check_ranking(args) -> int:
    labels, rk = formats.load_ranking(args.path)
    entry: dict = {"path": args.path, "order_axioms": rk.is_valid_order()}
    lines = [f"ranking {args.path}: order_axioms={entry['order_axioms']}"]
    ok = entry["order_axioms"]
    if args.relation is not None:
        rel = formats.load_relation(args.relation)
        if rel.carrier_size != rk.carrier_size:
            raise StructureError(
                f"{args.path}: ranking carrier size {rk.carrier_size} does not match "
                f"relation carrier size {rel.carrier_size}"
            )
        compatible = ok and validate_partial_ranking(rel, rk)
        entry["compatible_with_relation"] = compatible
        lines.append(f"  compatible with {args.relation}: {compatible}")
        if ok and not compatible:
            triple = first_ranking_violation(rel, rk)
            if triple is not None:
                p, q, s = triple
                named = [rel.labels[p], rel.labels[q], rel.labels[s]]
                entry["violating_triple"] = named
                lines.append(
                    f"  violating triple: {named[0]} R {named[1]} <= {named[2]} "
                    f"but not {named[0]} R {named[2]}"
                )
        ok = compatible
    _emit(args, _envelope(args, "check-ranking", entry), lines)
    return EXIT_OK if ok else EXIT_VIOLATED


def cmd_check_block(args) -> int:
    all_ok = True
    results = []
    lines = []
    for path in args.paths:
        block = formats.load_block(path)
        report = validate_block(block)
        entry = {
            "path": path,
            "antichain": report.antichain,
            "coverage": report.coverage,
            "window_consistent": report.window_consistent,
            "valid": report.valid,
        }
        line = (
            f"block {path}: antichain={report.antichain} coverage={report.coverage} "
            f"window_consistent={report.window_consistent} valid={report.valid}"
        )
        if report.valid:
            barrier = is_barrier(block)
            entry["barrier"] = barrier
            line += f" barrier={'yes' if barrier else 'no'}"
        all_ok = all_ok and report.valid
        results.append(entry)
        lines.append(line)
    _emit(args, _envelope(args, "check-block", {"objects": results}), lines)
    return EXIT_OK if all_ok else EXIT_VIOLATED


# ---------------------------------------------------------------------------
# searches
# ---------------------------------------------------------------------------


def cmd_bad_seq(args) -> int:
    rel = formats.load_relation(args.path)
    seq = find_bad_sequence(rel, args.max_len)
    if seq is None:
        result = {"found": False, "max_len": args.max_len}
        lines = [f"no bad sequence of length {args.max_len}"]
    else:
        labeled = [rel.labels[q] for q in seq]
        result = {"found": True, "sequence": labeled}
        lines = ["bad sequence: " + " , ".join(labeled)]
    _emit(args, _envelope(args, "bad-seq", result), lines)
    return EXIT_OK


def cmd_bad_array(args) -> int:
    rel = formats.load_relation(args.path)
    window = parse_window(args.window)
    found = find_bad_array(rel, window, args.rank, budget=_budget_from(args), jobs=args.jobs)
    if found is None:
        result = {"found": False, "window": list(window), "rank": args.rank}
        lines = ["no window-bad array (exhaustive within budget)"]
    else:
        result = {"found": True, "array": formats.array_doc(found)}
        lines = ["bad array found:"] + _array_lines(found)
    _emit(args, _envelope(args, "bad-array", result), lines)
    return EXIT_OK


def _array_lines(f: BlockArray) -> list[str]:
    lines = [f"  window {list(f.block.window)} rank {f.block.rank}"]
    for e, v in f.assignments:
        lines.append(f"  {list(e)} -> {f.target.labels[v]}")
    return lines


def cmd_min_bad(args) -> int:
    f = formats.load_array(args.path)
    if f.ranking is None:
        raise PreconditionError("min-bad requires an array document with a ranking")
    check = is_laver_minimal if args.mode == "laver" else is_simpson_minimal
    verdict = check(f, _budget_from(args))
    result: dict = {"mode": args.mode, "minimal": verdict.minimal}
    lines = [f"{args.mode}-minimal: {verdict.minimal}"]
    if verdict.counterexample is not None:
        result["counterexample"] = formats.array_doc(verdict.counterexample, inline_target=False)
        lines.append("counterexample:")
        lines.extend(_array_lines(verdict.counterexample))
    _emit(args, _envelope(args, "min-bad", result), lines)
    return EXIT_OK


def cmd_descend(args) -> int:
    f0 = formats.load_array(args.path)
    if f0.ranking is None:
        raise PreconditionError("descend requires an array document with a ranking")
    trace = run_descent(f0, max_steps=args.max_steps, budget=_budget_from(args))
    c, g, stable = limit_block(trace)
    steps = []
    for i, f in enumerate(trace.chain):
        step = {
            "block": formats.block_doc(f.block),
            "values": [[list(e), f.target.labels[v]] for e, v in f.assignments],
        }
        if i < len(trace.p_values):
            step["p"] = trace.p_values[i]
        steps.append(step)
    result = {
        "status": trace.status,
        "steps": steps,
        "p_values": trace.p_values,
        "limit": {
            "stable": stable,
            "block": formats.block_doc(c),
            "values": [[list(e), g.target.labels[v]] for e, v in g.assignments],
        },
    }
    lines = [f"descent: {len(trace.chain)} arrays, status {trace.status}"]
    for i, f in enumerate(trace.chain):
        suffix = f"  (p={trace.p_values[i]})" if i < len(trace.p_values) else ""
        lines.append(f"step {i}:{suffix}")
        lines.extend(_array_lines(f))
    lines.append(f"limit stable: {stable}")
    _emit(args, _envelope(args, "descend", result), lines)
    return EXIT_OK


# ---------------------------------------------------------------------------
# gadget
# ---------------------------------------------------------------------------


def _space_from(args):
    members, bound = formats.load_family(args.family)
    fam = GadgetFamily(members)
    cap = args.cap if getattr(args, "cap", None) else 1500
    return build_space(fam, bound, carrier_cap=cap)


def cmd_gadget_build(args) -> int:
    space = _space_from(args)
    result = {
        "carrier_size": len(space.carrier),
        "relation": formats.relation_doc(space.relation),
        "ranking": formats.ranking_doc(space.relation.labels, space.ranking),
    }
    lines = [
        f"gadget space: {len(space.carrier)} sequences, "
        f"{len(space.relation.pairs)} relation pairs, {len(space.ranking.pairs)} ranking pairs"
    ]
    if args.window is not None:
        f = canonical_bad_array(space, parse_window(args.window))
        result["canonical_bad_array"] = formats.array_doc(f, inline_target=False)
        result["canonical_bad"] = is_bad(f).bad_in_window
        lines.append("canonical bad array:")
        lines.extend(_array_lines(f))
    _emit(args, _envelope(args, "gadget-build", result), lines)
    return EXIT_OK


def cmd_gadget_decode(args) -> int:
    space = _space_from(args)
    f = formats.load_array(args.array, default_target=space.relation, default_ranking=space.ranking)
    verdict = decode(space, f, args.coord)
    result = {"coord": args.coord, "descendable": verdict}
    lines = [f"coordinate {args.coord} stays on the descendable side: {verdict}"]
    _emit(args, _envelope(args, "gadget-decode", result), lines)
    return EXIT_OK


def cmd_gadget_substitute(args) -> int:
    space = _space_from(args)
    f = formats.load_array(args.array, default_target=space.relation, default_ranking=space.ranking)
    inner_target = space.family.members[args.coord] if 0 <= args.coord < space.family.size else None
    h = formats.load_array(args.inner, default_target=inner_target)
    g = substitute(space, f, args.coord, h)
    result = {
        "coord": args.coord,
        "array": formats.array_doc(g, inline_target=False),
        "bad": True,
        "strictly_below": True,
    }
    lines = ["substituted array (bad, strictly below input):"] + _array_lines(g)
    _emit(args, _envelope(args, "gadget-substitute", result), lines)
    return EXIT_OK


# ---------------------------------------------------------------------------
# demo
# ---------------------------------------------------------------------------


def cmd_demo_rado(args) -> int:
    n = args.n
    if not 2 <= n <= 10:
        raise DomainError(f"demo rado requires 2 <= n <= 10, got {n}")
    rel = rado_order(n)
    report = check_relation(rel)
    result: dict = {
        "n": n,
        "carrier_size": rel.carrier_size,
        "order_report": {
            "reflexive": report.reflexive,
            "transitive": report.transitive,
            "antisymmetric": report.antisymmetric,
            "partial_order": report.partial_order,
            "well_founded": report.well_founded,
        },
    }
    lines = [
        f"order on {rel.carrier_size} pairs: partial_order={report.partial_order} "
        f"well_founded={report.well_founded}"
    ]

    rows = rado_rows(n)
    if len(rows) < 2:
        result["powerset_sequence"] = {"found": False, "note": "too small"}
        lines.append("powerset rows: too small for a bad sequence")
    else:
        lifted = powerset_lift(rel, rows)
        seq = find_bad_sequence(lifted, len(rows))
        if seq is None:
            result["powerset_sequence"] = {"found": False}
            lines.append("powerset rows: no bad sequence found")
        else:
            labeled = [lifted.labels[q] for q in seq]
            result["powerset_sequence"] = {"found": True, "sequence": labeled}
            lines.append(f"bad row sequence of length {len(seq)}:")
            for label in labeled:
                lines.append(f"  {label}")

    block = kset_block(range(n), 2)
    index = {label: i for i, label in enumerate(rel.labels)}
    values = {e: index[f"({e[0]},{e[1]})"] for e in block.elements}
    f = BlockArray.of(block, values, rel)
    verdict = is_bad(f)
    result["bad_array"] = {
        "bad_in_window": verdict.bad_in_window,
        "array": formats.array_doc(f, inline_target=False),
    }
    lines.append(
        f"rank-2 array over window 0..{n - 1}: bad_in_window={verdict.bad_in_window}"
    )
    _emit(args, _envelope(args, "demo-rado", result), lines)
    ok = report.partial_order and verdict.bad_in_window and (
        len(rows) < 2 or result["powerset_sequence"]["found"]
    )
    return EXIT_OK if ok else EXIT_VIOLATED


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common(sub, budget: bool = False, rank_budget: bool = False) -> None:
    sub.add_argument("--json", action="store_true", help="emit one canonical JSON envelope")
    sub.add_argument("--seed", type=int, default=None, help="recorded in machine output")
    if budget:
        sub.add_argument("--budget", type=int, default=None, help="max value-assignment attempts")
        sub.add_argument(
            "--time-cap", type=float, default=None, dest="time_cap",
            help="wall-clock seconds; aborted runs exit 3 and are not determinism-covered",
        )
    if rank_budget:
        sub.add_argument(
            "--rank", type=int, default=None, dest="rank_budget",
            help="rank cap for candidate blocks",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bqokit",
        description="Blocks, bad arrays, partial rankings, and minimal-bad-array descent at desk scale.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("check-relation", help="validate relation files")
    p.add_argument("paths", nargs="+")
    _add_common(p)
    p.set_defaults(handler=cmd_check_relation)

    p = subs.add_parser("check-ranking", help="validate a ranking file, optionally against a relation")
    p.add_argument("path")
    p.add_argument("--relation", default=None, help="relation file to check compatibility against")
    _add_common(p)
    p.set_defaults(handler=cmd_check_ranking)

    p = subs.add_parser("check-block", help="validate block files")
    p.add_argument("paths", nargs="+")
    _add_common(p)
    p.set_defaults(handler=cmd_check_block)

    p = subs.add_parser("bad-seq", help="search for a bad sequence in a relation")
    p.add_argument("path")
    p.add_argument("--max-len", type=int, required=True, dest="max_len")
    _add_common(p)
    p.set_defaults(handler=cmd_bad_seq)

    p = subs.add_parser("bad-array", help="search for a window-bad array")
    p.add_argument("path")
    p.add_argument("--window", required=True, help='window spec "a..b" or comma list')
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    _add_common(p, budget=True)
    p.set_defaults(handler=cmd_bad_array)

    p = subs.add_parser("min-bad", help="check an array for minimality")
    p.add_argument("path")
    p.add_argument("--mode", choices=["simpson", "laver"], required=True)
    _add_common(p, budget=True, rank_budget=True)
    p.set_defaults(handler=cmd_min_bad)

    p = subs.add_parser("descend", help="run the minimal-bad-array descent")
    p.add_argument("path")
    p.add_argument("--max-steps", type=int, default=16, dest="max_steps")
    _add_common(p, budget=True, rank_budget=True)
    p.set_defaults(handler=cmd_descend)

    gadget = subs.add_parser("gadget", help="build and probe the sequence-space gadget")
    gsubs = gadget.add_subparsers(dest="gadget_command", required=True)

    p = gsubs.add_parser("build", help="materialise the space from a family file")
    p.add_argument("family")
    p.add_argument("--cap", type=int, default=None, help="carrier size cap")
    p.add_argument("--window", default=None, help="also emit the canonical bad array over this window")
    _add_common(p)
    p.set_defaults(handler=cmd_gadget_build)

    p = gsubs.add_parser("decode", help="read one coordinate of a bad array")
    p.add_argument("family")
    p.add_argument("--array", required=True)
    p.add_argument("--coord", type=int, required=True)
    p.add_argument("--cap", type=int, default=None)
    _add_common(p)
    p.set_defaults(handler=cmd_gadget_decode)

    p = gsubs.add_parser("substitute", help="splice a coordinate array into a bad array")
    p.add_argument("family")
    p.add_argument("--array", required=True)
    p.add_argument("--coord", type=int, required=True)
    p.add_argument("--inner", required=True)
    p.add_argument("--cap", type=int, default=None)
    _add_common(p)
    p.set_defaults(handler=cmd_gadget_substitute)

    demo = subs.add_parser("demo", help="bundled demonstrations")
    dsubs = demo.add_subparsers(dest="demo_command", required=True)
    p = dsubs.add_parser("rado", help="the power-set counterexample at desk scale")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--jobs", type=int, default=1)
    _add_common(p)
    p.set_defaults(handler=cmd_demo_rado)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except BudgetError as exc:
        sys.stderr.write(f"budget exceeded: {exc}\n")
        for key, value in sorted(exc.progress.items()):
            sys.stderr.write(f"  {key}: {value}\n")
        return EXIT_BUDGET
    except (StructureError, PreconditionError, DomainError, CoverageError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except PostconditionError as exc:
        sys.stderr.write(f"internal postcondition failure: {exc}\n")
        return EXIT_INPUT
    except BqoError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
