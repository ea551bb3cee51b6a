"""TDO: the amount sent was truncated to 8 bits after a multiplication or addition."""

from __future__ import annotations

from ..symbolic import expr as E
from ..symbolic.artifacts import AnalysisArtifacts
from .common import DetectorId, Finding, call_evidence


def detect_type_deduction_overflow(a: AnalysisArtifacts, solver=None) -> list[Finding]:
    by_path: dict[int, list] = {}
    for t in a.truncations:
        if not isinstance(t.result, int):
            by_path.setdefault(t.path_id, []).append(t)
    findings = {}
    for c in a.calls:
        if c.pc in findings:
            continue
        v = c.c_v
        if isinstance(v, E.Traced) and v.op == "TRUNC8":
            findings[c.pc] = Finding(DetectorId.TDO, call_evidence(c, truncation_pc=v.pc, arithmetic_pc=v.source.pc))
            continue
        if isinstance(v, int):
            continue
        for t in by_path.get(c.path_id, ()):
            if E.contains(v, t.result):
                findings[c.pc] = Finding(DetectorId.TDO, call_evidence(c, truncation_pc=t.pc, arithmetic_pc=t.source_pc))
                break
    return list(findings.values())
