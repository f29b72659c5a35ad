"""Rendering of run records (text, JSON, CSV) and the verification findings report."""
from __future__ import annotations

import csv
import io
import json
from collections import defaultdict
from typing import Iterable, Sequence

from .jcalc import FAIL, PASS, REPORT, pick_unit_generator, valuation_profile
from .records import RunRecord

CSV_COLUMNS = [
    "p", "r", "k", "q", "j_invariants", "kq_invariants", "thm5", "thm6", "thm8_list",
    "N", "i_exponent", "checks_passed", "checks_failed",
]


def _fmt_group(torsion: Sequence[int]) -> str:
    if not torsion:
        return "0 (trivial)"
    return " + ".join(f"Z/{d}" for d in torsion)


def render_text(rec: RunRecord, level: dict | None = None) -> str:
    j, kq = rec.j, rec.kq
    cf = j.closed_forms
    s = rec.summary
    lines = [
        f"lens space L^{2 * j.k} mod {j.p}^{j.r}   (q = {j.q})",
        f"  KO~     : {_fmt_group(j.ko_decomposition.torsion)}",
        f"  J~      : {_fmt_group(j.j_decomposition.torsion)}   order {j.j_order}",
        f"  KQ~     : {_fmt_group(kq.kq_decomposition.torsion)}",
        f"  order of w            : {j.order_of_w}",
        f"  orders of psi^(p^t) w : {list(j.order_of_psi)}   (N = {j.N})",
        f"  orders of Omega_t     : {list(kq.omega_orders)}",
        f"  closed forms          : thm5={cf['thm5']} thm6={cf['thm6']} thm8={cf['thm8']}",
        f"  v_p|I|                : {j.i_order_exponent}",
    ]
    if level is not None:
        lines.append("  level t={t}: thm8={thm8} order(psi)={psi_order} "
                     "order(Omega)={omega_order} quadratic={quadratic}".format(**level))
    lines.append(f"  checks: {s[PASS]} pass, {s[FAIL]} fail, {s[REPORT]} report-only")
    for c in rec.checks:
        if c.status != PASS:
            mark = "FAIL" if c.status == FAIL else "note"
            lines.append(f"    [{mark}] {c.name}: {c.detail}")
    return "\n".join(lines) + "\n"


def render_json(rec: RunRecord, level: dict | None = None) -> str:
    d = rec.to_dict()
    if level is not None:
        d["level"] = {key: (v if isinstance(v, bool) or v is None else str(v))
                      for key, v in level.items()}
    return json.dumps(d, indent=2, sort_keys=True) + "\n"


def csv_row(rec: RunRecord) -> list[str]:
    j, kq = rec.j, rec.kq
    s = rec.summary
    return [
        str(j.p), str(j.r), str(j.k), str(j.q),
        ";".join(map(str, j.j_decomposition.torsion)),
        ";".join(map(str, kq.kq_decomposition.torsion)),
        str(j.closed_forms["thm5"]), str(j.closed_forms["thm6"]),
        ";".join(map(str, j.closed_forms["thm8"])),
        str(j.N), str(j.i_order_exponent), str(s[PASS]), str(s[FAIL]),
    ]


def render_csv(records: Iterable[RunRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rec in records:
        w.writerow(csv_row(rec))
    return buf.getvalue()


# ---------------------------------------------------------------------------
# verification report


def pass_fail_matrix(records: Sequence[RunRecord], errors: dict, k_max: int,
                     grid_failures: dict) -> str:
    """One row per (p, r); '.' all hard checks pass, 'F' hard failure, 'E' error."""
    cells = {rec.key[:3]: rec for rec in records}
    rows = sorted({key[:2] for key in cells} | {key[:2] for key in errors})
    header = "p  r  | k=1.." + str(k_max)
    out = [header, "-" * len(header)]
    for p, r in rows:
        marks = []
        for k in range(1, k_max + 1):
            if (p, r, k) in errors:
                marks.append("E")
            elif (p, r, k) in cells:
                marks.append("F" if cells[(p, r, k)].hard_failures else ".")
            else:
                marks.append(" ")
        extra = ""
        if grid_failures.get((p, r)):
            extra = "   grid: " + ", ".join(grid_failures[(p, r)])
        out.append(f"{p:<2} {r:<2} | {''.join(marks)}{extra}")
    return "\n".join(out)


def _ranges(ks: Sequence[int]) -> str:
    ks = sorted(ks)
    parts, start, prev = [], None, None
    for k in ks:
        if start is None:
            start = prev = k
        elif k == prev + 1:
            prev = k
        else:
            parts.append(f"{start}" if start == prev else f"{start}-{prev}")
            start = prev = k
    if start is not None:
        parts.append(f"{start}" if start == prev else f"{start}-{prev}")
    return ",".join(parts)


def findings(records: Sequence[RunRecord], p_list: Sequence[int], r_max: int,
             k_max: int) -> str:
    recs = sorted(records, key=lambda x: x.key)
    out = ["## Findings (report-only; never affect exit codes)", ""]

    out.append("### Valuations v_p(q^(2n) - 1)")
    out.append("Direct valuations compared with the claim `s+1 on I_s, 1 otherwise` and with the")
    out.append("corrected expectation `0 when (p-1)/2 does not divide n`.")
    out.append("")
    out.append("| p | r | q | n | v_p | claimed | corrected |")
    out.append("|---|---|---|---|-----|---------|-----------|")
    n_max = max(1, k_max // 2)
    mismatches = 0
    for p in p_list:
        for r in range(1, r_max + 1):
            q = pick_unit_generator(p, r)
            for row in valuation_profile(p, r, q, n_max):
                if not row["matches_claim"]:
                    mismatches += 1
                    out.append(f"| {p} | {r} | {q} | {row['n']} | {row['valuation']} | "
                               f"{row['claimed']} | {row['corrected']} |")
    out.append("")
    out.append(f"{mismatches} rows disagree with the claim; rows agreeing with it are omitted.")
    out.append("")

    out.append("### Quadratic relation Omega_t^2 + p Omega_t = 0 for r >= 2")
    out.append("| p | r | t | holds for k | fails for k |")
    out.append("|---|---|---|-------------|-------------|")
    table: dict = defaultdict(lambda: ([], []))
    for rec in recs:
        if rec.j.r < 2:
            continue
        for t, ok in enumerate(rec.kq.quadratic_checks):
            table[(rec.j.p, rec.j.r, t)][0 if ok else 1].append(rec.j.k)
    for (p, r, t), (good, bad) in sorted(table.items()):
        out.append(f"| {p} | {r} | {t} | {_ranges(good) or '-'} | {_ranges(bad) or '-'} |")
    out.append("")

    out.append("### Orders of Omega_t against a_t")
    rows = []
    for rec in recs:
        a = rec.j.closed_forms["a"]
        if list(rec.kq.omega_orders) != list(a):
            rows.append(f"| {rec.j.p} | {rec.j.r} | {rec.j.k} | {list(rec.kq.omega_orders)} | "
                        f"{list(a)} | {'holds' if rec.kq.bridge_check else 'fails'} |")
    if rows:
        out.append("| p | r | k | Omega orders | a_t | J = KQ |")
        out.append("|---|---|---|--------------|-----|--------|")
        out.extend(rows)
    else:
        out.append("No mismatches.")
    out.append("")

    out.append("### Invariant factors of KQ against J")
    rows = [f"| {rec.j.p} | {rec.j.r} | {rec.j.k} | {list(rec.kq.kq_decomposition.torsion)} | "
            f"{list(rec.j.j_decomposition.torsion)} |" for rec in recs if not rec.kq.bridge_check]
    if rows:
        out.append("Same order, different isomorphism type:")
        out.append("")
        out.append("| p | r | k | KQ | J |")
        out.append("|---|---|---|----|---|")
        out.extend(rows)
    else:
        out.append("Identical at every grid point.")
    out.append("")

    out.append("### Size of I_s")
    out.append("The closed form floor(k/(p^s(p-1))) counts every multiple of p^s(p-1)/2 up to")
    out.append("floor(k/2); enumerating with the coprime-cofactor condition gives fewer elements.")
    n_diff = sum(1 for rec in recs for c in rec.j.checks
                 if c.name == "i_s_size_vs_definition" and "differs" in c.detail)
    out.append(f"Grid points where the two counts differ: {n_diff}.")
    out.append("")

    out.append("### Notes")
    for p in p_list:
        small = [rec.j.k for rec in recs if rec.j.p == p and rec.j.k < p - 1]
        if small and all(rec.j.j_decomposition.is_trivial and rec.kq.kq_decomposition.is_trivial
                         for rec in recs if rec.j.p == p and rec.j.k < p - 1):
            out.append(f"- p={p}: all groups trivial for k < {p - 1}.")
    return "\n".join(out) + "\n"
