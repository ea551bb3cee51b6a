"""BD: a transfer of ``msg.value + this.balance`` that sits behind an impossible condition."""

from __future__ import annotations

from ..symbolic import expr as E
from ..symbolic.artifacts import AnalysisArtifacts, CallType, Feasibility
from .common import DetectorId, Finding, balance_term, call_evidence, equivalent


def detect_balance_disorder(a: AnalysisArtifacts, solver=None) -> list[Finding]:
    target = E.norm(E.bv(a.env.call_value) + E.bv(balance_term(a)))
    findings: dict[int, Finding] = {}
    for c in a.calls:
        if c.pc in findings or c.c_t is not CallType.CALL:
            continue
        if c.block_feasibility is not Feasibility.INFEASIBLE:
            continue
        # no path conditions here: they are unsatisfiable, so anything would follow
        if equivalent(c.c_v, target, solver, a.assumptions):
            findings[c.pc] = Finding(DetectorId.BD, call_evidence(c))
    return list(findings.values())
