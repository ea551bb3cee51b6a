"""ID: the sender is stored into a slot nobody checks, while the guard reads another slot."""

from __future__ import annotations

import z3

from ..symbolic.artifacts import ROLLBACK, AnalysisArtifacts
from ..symbolic.state import storage_key
from .common import DetectorId, Finding, StorageUse, call_evidence, call_fields, is_sender, low160, is_named


def _sender_comparisons(cond):
    """Both sides of every equality under ``cond`` where one side is the sender."""
    seen = set()
    todo = [cond]
    while todo:
        t = todo.pop()
        if t.get_id() in seen:
            continue
        seen.add(t.get_id())
        if z3.is_eq(t) and z3.is_bv(t.arg(0)):
            lhs, rhs = t.children()
            if is_sender(lhs) or is_named(lhs, "Is"):
                yield rhs
            elif is_sender(rhs) or is_named(rhs, "Is"):
                yield lhs
        todo.extend(t.children())


def detect_inheritance_disorder(a: AnalysisArtifacts, solver=None) -> list[Finding]:
    use = StorageUse(a)

    # every slot that influences control flow, a call or a selfdestruct
    used: set = set()
    for p in a.paths:
        exprs = list(p.path_conditions)
        for c in a.calls_on(p.id):
            exprs += call_fields(c)
        if p.selfdestruct_target is not None:
            exprs.append(p.selfdestruct_target)
        used |= use.keys_in(exprs, p)

    # clause 1: sender written to a slot that is never used
    unused_owner_slots: dict = {}
    for w in a.storage_writes:
        if a.paths[w.path_id].terminator in ROLLBACK or isinstance(w.value, int):
            continue
        k = storage_key(w.key)
        if k in used or k in unused_owner_slots:
            continue
        if is_named(low160(w.value), "Is"):
            unused_owner_slots[k] = w

    if not unused_owner_slots:
        return []

    # clause 2: a guarded call compares the sender with a different slot
    findings = {}
    for c in a.calls:
        if c.pc in findings:
            continue
        path = a.paths[c.path_id]
        for cond in c.path_conditions_snapshot:
            for other in _sender_comparisons(cond):
                checked = use.keys_in([other], path)
                for k1, w in sorted(unused_owner_slots.items(), key=lambda kv: str(kv[0])):
                    k2 = next((k for k in sorted(checked, key=str) if k != k1), None)
                    if k2 is None:
                        continue
                    findings[c.pc] = Finding(
                        DetectorId.ID,
                        call_evidence(
                            c,
                            storage_keys=[use.label(k1), use.label(k2)],
                            write_pc=w.pc,
                            paths=[c.path_id, w.path_id],
                        ),
                    )
                    break
                if c.pc in findings:
                    break
            if c.pc in findings:
                break
    return list(findings.values())
