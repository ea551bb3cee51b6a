"""SESL: a self-call passes fewer words than the callee decodes, shifting later arguments."""

from __future__ import annotations

from ..symbolic import expr as E
from ..symbolic.artifacts import ETHER_TRANSFER, AnalysisArtifacts, CallType
from .common import DetectorId, Finding, call_evidence, function_of, is_self

ARGS_START = 4
WORD = 32


def _arity(a: AnalysisArtifacts, selector: int) -> tuple[int, list[int]]:
    """Argument count of ``selector`` estimated from the calldata its paths decode."""
    paths = [p.id for p in a.paths if function_of(p) == selector]
    top = -1
    for pid in paths:
        offsets = [o for o in a.paths[pid].calldata_offsets if o >= ARGS_START]
        if offsets:
            top = max(top, max(offsets))
    if top < 0:
        return 0, paths
    return (top - ARGS_START) // WORD + 1, paths


def detect_skip_empty_string_literal(a: AnalysisArtifacts, solver=None) -> list[Finding]:
    findings = {}
    arity_cache: dict = {}
    for c in a.calls:
        if c.pc in findings or c.c_t is not CallType.CALL or not is_self(c.c_r):
            continue
        if c.c_f in (None, ETHER_TRANSFER):
            continue
        selector = int(c.c_f, 16)
        if selector not in arity_cache:
            arity_cache[selector] = _arity(a, selector)
        arity, callee_paths = arity_cache[selector]
        supplied = len(c.c_a)
        if supplied >= arity:
            continue
        # an inner call whose recipient is decoded from one of the supplied slots
        slots = {f"Id_{ARGS_START + WORD * j}" for j in range(supplied)}
        for pid in callee_paths:
            inner = next((d for d in a.calls_on(pid) if E.constants(d.c_r) & slots), None)
            if inner is not None:
                ev = call_evidence(c, supplied=supplied, expected=arity, inner_call=inner.id)
                ev["paths"] = [c.path_id, inner.path_id]
                findings[c.pc] = Finding(DetectorId.SESL, ev)
                break
    return list(findings.values())
