"""HT: the whole balance first goes to a stored address, then "to the sender"."""

from __future__ import annotations

from ..symbolic.artifacts import AnalysisArtifacts, CallType
from .common import DetectorId, Finding, StorageUse, balance_term, call_evidence, consecutive_calls, equivalent, is_sender


def detect_hidden_transfer(a: AnalysisArtifacts, solver=None) -> list[Finding]:
    use = StorageUse(a)
    balance = balance_term(a)
    findings = {}
    for path, c1, c2 in consecutive_calls(a):
        key = (c1.pc, c2.pc)
        if key in findings or c1.c_t is not CallType.CALL or c2.c_t is not CallType.CALL:
            continue
        if not use.keys_in([c1.c_r], path) or not is_sender(c2.c_r):
            continue
        if equivalent(c1.c_v, balance, solver, a.assumptions) and equivalent(c2.c_v, balance, solver, a.assumptions):
            ev = call_evidence(c1)
            ev["calls"] = [c1.id, c2.id]
            ev["blocks"] = [c1.block_offset, c2.block_offset]
            findings[key] = Finding(DetectorId.HT, ev)
    return list(findings.values())
