"""Queries over artifacts shared by several detectors."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

import z3

from ..solver import SolverGateway
from ..symbolic import expr as E
from ..symbolic.artifacts import AnalysisArtifacts, CallRecord, ExecutionPath
from ..symbolic.state import storage_key


class DetectorId(str, enum.Enum):
    BD = "BD"
    ID = "ID"
    SESL = "SESL"
    TDO = "TDO"
    US = "US"
    HSU = "HSU"
    HT = "HT"
    SMC = "SMC"


@dataclass
class Finding:
    detector: DetectorId
    evidence: dict = field(default_factory=dict)
    confidence: str = "firm"

    def sort_key(self):
        return (list(DetectorId).index(self.detector), json.dumps(self.evidence, sort_keys=True))

    def to_dict(self) -> dict:
        return {"detector": self.detector.value, "confidence": self.confidence, "evidence": self.evidence}


def call_evidence(c: CallRecord, **extra) -> dict:
    ev = {"calls": [c.id], "paths": [c.path_id], "blocks": [c.block_offset], "pc": c.pc}
    ev.update(extra)
    return ev


def key_label(key) -> str:
    if isinstance(key, int):
        return hex(int(key))
    return key.sexpr()


def low160(e):
    """The address part of a word, simplified."""
    if isinstance(e, int):
        return int(e) & E.ADDRESS_MASK
    if e.size() <= 160:
        return e
    return z3.simplify(z3.Extract(159, 0, e))


def is_named(e, name: str) -> bool:
    return (
        not isinstance(e, int)
        and z3.is_const(e)
        and e.decl().kind() == z3.Z3_OP_UNINTERPRETED
        and e.decl().name() == name
    )


def is_sender(e) -> bool:
    if isinstance(e, int):
        return False
    return is_named(E.strip_address(e), "Is") or (e.size() >= 160 and is_named(low160(e), "Is"))


def is_self(e) -> bool:
    if isinstance(e, int):
        return False
    return is_named(E.strip_address(e), "Ia") or (e.size() >= 160 and is_named(low160(e), "Ia"))


def equivalent(a, b, solver: SolverGateway | None, assumptions=()) -> bool:
    """Structural equality, falling back to a validity query under ``assumptions``."""
    if E.same(a, b):
        return True
    if solver is None or isinstance(a, int) and isinstance(b, int):
        return False
    return solver.check(list(assumptions) + [E.bv(a) != E.bv(b)]).unsat


def function_of(path: ExecutionPath) -> int | None:
    """Selector the dispatcher matched on this path; None for the fallback."""
    for cond in path.path_conditions:
        if not z3.is_eq(cond):
            continue
        lhs, rhs = cond.children()
        for const, other in ((lhs, rhs), (rhs, lhs)):
            if z3.is_bv_value(const) and E.constants(other) == {"Id_0"}:
                return const.as_long()
    return None


class StorageUse:
    """Maps terms back to the storage slots they were read from."""

    def __init__(self, a: AnalysisArtifacts):
        self.a = a
        self.by_symbol = {name: storage_key(k) for name, k in a.storage_symbols.items()}
        self.labels = {storage_key(k): key_label(k) for k in a.storage_symbols.values()}
        for w in a.storage_writes:
            self.labels.setdefault(storage_key(w.key), key_label(w.key))

    def keys_in(self, exprs, path: ExecutionPath | None = None) -> set:
        keys = set()
        terms = [e for e in exprs if e is not None and not isinstance(e, (int, bool))]
        for e in terms:
            for name in E.constants(e):
                k = self.by_symbol.get(name)
                if k is not None:
                    keys.add(k)
        if path is not None:
            for r in path.reads:
                if isinstance(r.value, int) or storage_key(r.key) in keys:
                    continue
                # a bare storage symbol was already handled above
                if z3.is_const(r.value) and r.value.decl().name() in self.by_symbol:
                    continue
                if any(E.contains(e, r.value) for e in terms):
                    keys.add(storage_key(r.key))
        return keys

    def label(self, key) -> str:
        return self.labels.get(key, key[1] if isinstance(key[1], str) else hex(key[1]))


def call_fields(c: CallRecord) -> list:
    return [c.c_r, c.c_v] + list(c.c_a)


def consecutive_calls(a: AnalysisArtifacts):
    for p in a.paths:
        calls = a.calls_on(p.id)
        for first, second in zip(calls, calls[1:]):
            yield p, first, second


def balance_term(a: AnalysisArtifacts):
    return a.env.self_balance
