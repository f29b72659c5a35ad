"""Serialization of computation results.

Every integer is written as a decimal string so that large group orders
survive JSON consumers with fixed-width numbers.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import resources

from .exactalg import CyclicDecomposition
from .jcalc import FAIL, PASS, REPORT, Check, JGroupResult, compute_j_group
from .kqcalc import KQResult, compute_kq_group

SCHEMA_VERSION = 1


def _s(n: int) -> str:
    return str(int(n))


def _ints(xs) -> list[str]:
    return [_s(x) for x in xs]


def _from_ints(xs) -> tuple[int, ...]:
    return tuple(int(x) for x in xs)


def decomposition_to_dict(d: CyclicDecomposition) -> dict:
    return {
        "torsion": _ints(d.torsion),
        "free_rank": _s(d.free_rank),
        "generators": None if d.generators is None else [_ints(g) for g in d.generators],
    }


def decomposition_from_dict(obj: dict) -> CyclicDecomposition:
    gens = obj["generators"]
    return CyclicDecomposition(
        torsion=_from_ints(obj["torsion"]),
        free_rank=int(obj["free_rank"]),
        generators=None if gens is None else tuple(_from_ints(g) for g in gens),
    )


def check_to_dict(c: Check) -> dict:
    return {"name": c.name, "status": c.status, "detail": c.detail}


def check_from_dict(obj: dict) -> Check:
    return Check(obj["name"], obj["status"], obj["detail"])


def _enc(v):
    if isinstance(v, (list, tuple)):
        return [_enc(x) for x in v]
    return _s(v)


def _dec(v):
    if isinstance(v, list):
        return [_dec(x) for x in v]
    return int(v)


def j_result_to_dict(j: JGroupResult) -> dict:
    return {
        "ko_decomposition": decomposition_to_dict(j.ko_decomposition),
        "j_decomposition": decomposition_to_dict(j.j_decomposition),
        "order_of_w": _s(j.order_of_w),
        "order_of_psi": _ints(j.order_of_psi),
        "N": _s(j.N),
        "i_order_exponent": _s(j.i_order_exponent),
        "closed_forms": {key: _enc(v) for key, v in sorted(j.closed_forms.items())},
        "checks": [check_to_dict(c) for c in j.checks],
    }


def j_result_from_dict(params: tuple[int, int, int, int], obj: dict) -> JGroupResult:
    p, r, k, q = params
    return JGroupResult(
        p=p, r=r, k=k, q=q,
        ko_decomposition=decomposition_from_dict(obj["ko_decomposition"]),
        j_decomposition=decomposition_from_dict(obj["j_decomposition"]),
        order_of_w=int(obj["order_of_w"]),
        order_of_psi=_from_ints(obj["order_of_psi"]),
        N=int(obj["N"]),
        i_order_exponent=int(obj["i_order_exponent"]),
        closed_forms={key: _dec(v) for key, v in obj["closed_forms"].items()},
        checks=tuple(check_from_dict(c) for c in obj["checks"]),
    )


def kq_result_to_dict(kq: KQResult) -> dict:
    return {
        "kq_decomposition": decomposition_to_dict(kq.kq_decomposition),
        "omega_orders": _ints(kq.omega_orders),
        "bridge_check": kq.bridge_check,
        "quadratic_checks": list(kq.quadratic_checks),
        "checks": [check_to_dict(c) for c in kq.checks],
    }


def kq_result_from_dict(params: tuple[int, int, int, int], obj: dict) -> KQResult:
    p, r, k, q = params
    return KQResult(
        p=p, r=r, k=k, q=q,
        kq_decomposition=decomposition_from_dict(obj["kq_decomposition"]),
        omega_orders=_from_ints(obj["omega_orders"]),
        bridge_check=bool(obj["bridge_check"]),
        quadratic_checks=tuple(bool(b) for b in obj["quadratic_checks"]),
        checks=tuple(check_from_dict(c) for c in obj["checks"]),
    )


def timestamp() -> str:
    """UTC ISO timestamp; SOURCE_DATE_EPOCH pins it for reproducible output."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        when = datetime.fromtimestamp(int(epoch), tz=timezone.utc)
    else:
        when = datetime.now(timezone.utc).replace(microsecond=0)
    return when.isoformat().replace("+00:00", "Z")


@dataclass(frozen=True)
class RunRecord:
    j: JGroupResult
    kq: KQResult
    timestamp: str

    @property
    def key(self) -> tuple[int, int, int, int]:
        return (self.j.p, self.j.r, self.j.k, self.j.q)

    @property
    def checks(self) -> tuple[Check, ...]:
        return self.j.checks + self.kq.checks

    @property
    def summary(self) -> dict[str, int]:
        counts = {PASS: 0, FAIL: 0, REPORT: 0}
        for c in self.checks:
            counts[c.status] += 1
        return counts

    @property
    def hard_failures(self) -> list[Check]:
        return [c for c in self.checks if c.status == FAIL]

    def to_dict(self) -> dict:
        p, r, k, q = self.key
        s = self.summary
        return {
            "schema_version": SCHEMA_VERSION,
            "p": _s(p), "r": _s(r), "k": _s(k), "q": _s(q),
            "timestamp": self.timestamp,
            "j_invariants": _ints(self.j.j_decomposition.torsion),
            "kq_invariants": _ints(self.kq.kq_decomposition.torsion),
            "j_order": _s(self.j.j_order),
            "summary": {"pass": _s(s[PASS]), "fail": _s(s[FAIL]), "report": _s(s[REPORT])},
            "j_result": j_result_to_dict(self.j),
            "kq_result": kq_result_to_dict(self.kq),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, obj: dict) -> RunRecord:
        if obj.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {obj.get('schema_version')!r}")
        params = tuple(int(obj[x]) for x in ("p", "r", "k", "q"))
        return cls(
            j=j_result_from_dict(params, obj["j_result"]),
            kq=kq_result_from_dict(params, obj["kq_result"]),
            timestamp=obj["timestamp"],
        )

    @classmethod
    def from_json(cls, line: str) -> RunRecord:
        return cls.from_dict(json.loads(line))


def compute_record(p: int, r: int, k: int, q: int | None = None) -> RunRecord:
    j = compute_j_group(p, r, k, q)
    kq = compute_kq_group(p, r, k, j.q, j_result=j)
    return RunRecord(j, kq, timestamp())


def load_schema() -> dict:
    text = resources.files("lensj").joinpath("schema/run_record.schema.json").read_text()
    return json.loads(text)
