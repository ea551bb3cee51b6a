"""SMC: a second contract is consulted right around the payout."""

from __future__ import annotations

from ..symbolic import expr as E
from ..symbolic.artifacts import AnalysisArtifacts, CallType
from .common import DetectorId, Finding, balance_term, call_evidence, consecutive_calls, equivalent, is_sender


def detect_straw_man_contract(a: AnalysisArtifacts, solver=None) -> list[Finding]:
    balance = balance_term(a)
    findings = {}
    for path, first, second in consecutive_calls(a):
        key = (first.pc, second.pc)
        if key in findings or E.same(first.c_r, second.c_r):
            continue
        case = None
        if (
            first.c_t is CallType.DELEGATECALL
            and second.c_t is CallType.CALL
            and is_sender(second.c_r)
            and equivalent(second.c_v, balance, solver, a.assumptions)
        ):
            case = 1
        elif second.c_t is CallType.CALL and any(is_sender(arg) for arg in second.c_a):
            case = 2
        if case:
            ev = call_evidence(first, case=case)
            ev["calls"] = [first.id, second.id]
            ev["blocks"] = [first.block_offset, second.block_offset]
            findings[key] = Finding(DetectorId.SMC, ev)
    return list(findings.values())
