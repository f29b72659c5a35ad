"""Command-line front end: ``lensj compute | verify | scan``.

Exit codes: 0 success, 1 a hard check failed, 2 invalid arguments.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Sequence

from . import report
from .jcalc import (
    ConsistencyError,
    compute_j_group,
    is_unit_generator,
    pick_unit_generator,
    thm8_valuation,
)
from .kqcalc import quadratic_relation_check
from .ktheory import is_prime
from .records import RunRecord, compute_record

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
MAX_P, MAX_R, MAX_K = 1000, 8, 2000
MAX_CELLS = 10_000


class UsageError(ValueError):
    pass


def _check_p(p: int) -> None:
    if p < 3 or not is_prime(p):
        raise UsageError("p must be an odd prime")
    if p > MAX_P:
        raise UsageError(f"p must be at most {MAX_P}")


def _check_r(r: int) -> None:
    if not 1 <= r <= MAX_R:
        raise UsageError(f"r must be between 1 and {MAX_R}")


def _check_k(k: int) -> None:
    if not 0 <= k <= MAX_K:
        raise UsageError(f"k must be between 0 and {MAX_K}")


def _check_q(q: int, p: int, r: int) -> None:
    if not is_unit_generator(q, p, r):
        raise UsageError(f"q={q} does not generate the units mod {p}^{r}")


def _parse_p_list(text: str) -> list[int]:
    try:
        ps = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad --p-list {text!r}") from None
    for p in ps:
        _check_p(p)
    return sorted(set(ps))


def _grid(args) -> list[tuple[int, int, int, int]]:
    """Cells (p, r, k, q) with r = 1..r_max and k = 1..k_max."""
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    ps = _parse_p_list(args.p_list)
    if args.r_max > MAX_R:
        _check_r(args.r_max)
    if args.k_max > MAX_K:
        _check_k(args.k_max)
    if not ps or args.r_max < 1 or args.k_max < 1:
        raise UsageError("empty grid")
    n = len(ps) * args.r_max * args.k_max
    if n > MAX_CELLS:
        raise UsageError(f"grid has {n} cells, the limit is {MAX_CELLS}")
    cells = []
    for p in ps:
        for r in range(1, args.r_max + 1):
            if args.q is not None:
                _check_q(args.q, p, r)
            q = args.q if args.q is not None else pick_unit_generator(p, r)
            cells.extend((p, r, k, q) for k in range(1, args.k_max + 1))
    return cells


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# compute


def _level(rec: RunRecord, t: int) -> dict:
    j, kq = rec.j, rec.kq
    return {
        "t": t,
        "thm8": thm8_valuation(j.p, j.r, j.k, t),
        "psi_order": j.order_of_psi[t] if t <= j.N else None,
        "omega_order": kq.omega_orders[t] if t <= j.N else None,
        "quadratic": quadratic_relation_check(j.p, j.r, j.k, t),
    }


def cmd_compute(args) -> int:
    _check_p(args.p)
    _check_r(args.r)
    _check_k(args.k)
    if args.q is not None:
        _check_q(args.q, args.p, args.r)
    if args.t is not None and not 0 <= args.t <= args.r - 1:
        raise UsageError(f"t must be between 0 and r-1 = {args.r - 1}")
    rec = compute_record(args.p, args.r, args.k, args.q)
    level = _level(rec, args.t) if args.t is not None else None
    if args.format == "json":
        text = report.render_json(rec, level)
    elif args.format == "csv":
        text = report.render_csv([rec])
    else:
        text = report.render_text(rec, level)
    _emit(text, args.out)
    return EXIT_FAIL if rec.hard_failures else EXIT_OK


# ---------------------------------------------------------------------------
# verify and scan share the worker


def _run_cell(cell: tuple[int, int, int, int]) -> tuple[tuple, str | None, str | None]:
    """Returns (cell, record json, error message); runs in worker processes."""
    p, r, k, q = cell
    try:
        return cell, compute_record(p, r, k, q).to_json(), None
    except ConsistencyError as exc:
        return cell, None, f"{type(exc).__name__}: {exc}"


def _run_cells(cells, jobs: int):
    if jobs <= 1 or len(cells) <= 1:
        yield from map(_run_cell, cells)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_run_cell, cell) for cell in cells]
        for fut in as_completed(futures):
            yield fut.result()


def _grid_invariants(records: Sequence[RunRecord]) -> dict:
    """Generator independence and monotonicity of |J| in k, per (p, r)."""
    failures: dict = {}
    by_pr: dict = {}
    for rec in records:
        by_pr.setdefault(rec.key[:2], []).append(rec)
    for (p, r), recs in sorted(by_pr.items()):
        recs.sort(key=lambda x: x.j.k)
        bad = []
        orders = [x.j.j_order for x in recs]
        if any(a > b for a, b in zip(orders, orders[1:])):
            bad.append("monotone_in_k")
        q = recs[0].j.q
        alt = next((g for g in range(q + 1, p ** r) if is_unit_generator(g, p, r)), None)
        if alt is not None:
            for x in recs:
                other = compute_j_group(p, r, x.j.k, alt)
                if other.j_decomposition.torsion != x.j.j_decomposition.torsion:
                    bad.append(f"generator_independence(q={alt}, k={x.j.k})")
                    break
        if bad:
            failures[(p, r)] = bad
    return failures


def cmd_verify(args) -> int:
    cells = _grid(args)
    records, errors = [], {}
    for cell, line, err in _run_cells(cells, args.jobs):
        if err is not None:
            errors[cell[:3]] = err
        else:
            records.append(RunRecord.from_json(line))
    grid_failures = _grid_invariants(records)

    hard = [(rec.key, c) for rec in records for c in rec.hard_failures]
    lines = ["# Verification", ""]
    lines.append(f"grid: p in {sorted({c[0] for c in cells})}, r = 1..{args.r_max}, "
                 f"k = 1..{args.k_max} ({len(cells)} cells)")
    lines.append("")
    lines.append("```")
    lines.append(report.pass_fail_matrix(records, errors, args.k_max, grid_failures))
    lines.append("```")
    lines.append("")
    if hard or errors or grid_failures:
        lines.append("## Hard failures")
        for (p, r, k, q), c in hard:
            lines.append(f"- (p={p}, r={r}, k={k}, q={q}) {c.name}: {c.detail}")
        for (p, r, k), err in sorted(errors.items()):
            lines.append(f"- (p={p}, r={r}, k={k}) {err}")
        for (p, r), names in sorted(grid_failures.items()):
            lines.append(f"- (p={p}, r={r}) {', '.join(names)}")
    else:
        lines.append("All hard checks pass.")
    lines.append("")
    text = "\n".join(lines) + "\n" + report.findings(
        records, sorted({c[0] for c in cells}), args.r_max, args.k_max)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    _emit(text, args.out)
    return EXIT_FAIL if hard or errors or grid_failures else EXIT_OK


def read_cache(path: str) -> tuple[dict, list[str]]:
    """Parse a cache file. Corrupt lines are reported on stderr and kept aside."""
    records: dict = {}
    corrupt: list[str] = []
    if not os.path.exists(path):
        return records, corrupt
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = RunRecord.from_json(line)
            except (ValueError, KeyError, TypeError) as exc:
                print(f"cache line {lineno}: corrupt record ({exc})", file=sys.stderr)
                corrupt.append(line if line.endswith("\n") else line + "\n")
                continue
            records[rec.key] = line.strip()
    return records, corrupt


def _write_sorted(path: str, records: dict, corrupt: list[str]) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        for key in sorted(records):
            fh.write(records[key] + "\n")
        fh.writelines(corrupt)
    os.replace(tmp, path)


def cmd_scan(args) -> int:
    cells = _grid(args)
    try:
        with open(args.cache, "a", encoding="utf-8"):
            pass
    except OSError as exc:
        raise UsageError(f"cache {args.cache!r} is not writable: {exc.strerror}") from None
    cached, corrupt = read_cache(args.cache)
    todo = [c for c in cells if c not in cached]

    errors = 0
    new = 0
    # single writer: only this process appends, in the order results arrive
    with open(args.cache, "a", encoding="utf-8") as fh:
        for cell, line, err in _run_cells(todo, args.jobs):
            if err is not None:
                print(f"(p,r,k,q)={cell}: {err}", file=sys.stderr)
                errors += 1
                continue
            fh.write(line + "\n")
            fh.flush()
            cached[cell] = line
            new += 1
    _write_sorted(args.cache, cached, corrupt)
    failed = errors + sum(
        1 for c in cells if c in cached and RunRecord.from_json(cached[c]).hard_failures
    )
    print(f"{new} new records, {len(cells) - len(todo)} cached, {failed} with hard failures")
    return EXIT_FAIL if failed else EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lensj", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="compute KO, J and KQ for one lens space")
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--r", type=int, required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--q", type=int, help="unit generator (default: the smallest)")
    c.add_argument("--t", type=int, help="also report level t: thm8, psi and Omega orders, quadratic relation")
    c.add_argument("--format", choices=["text", "json", "csv"], default="text")
    c.add_argument("--out")
    c.set_defaults(func=cmd_compute)

    for name, func, helptext in (("verify", cmd_verify, "check every invariant over a grid"),
                                 ("scan", cmd_scan, "fill a line-delimited JSON cache")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--p-list", required=True, help="comma separated odd primes")
        s.add_argument("--r-max", type=int, required=True)
        s.add_argument("--k-max", type=int, required=True)
        s.add_argument("--q", type=int)
        s.add_argument("--jobs", type=int, default=1)
        s.set_defaults(func=func)
        if name == "verify":
            s.add_argument("--report", help="also write the report to this path")
            s.add_argument("--out")
        else:
            s.add_argument("--cache", required=True)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConsistencyError as exc:
        print(f"consistency failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
