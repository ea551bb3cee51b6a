"""HSU: a payout guard depends on state another function can change for free."""

from __future__ import annotations

import z3

from ..symbolic import expr as E
from ..symbolic.artifacts import ROLLBACK, AnalysisArtifacts
from ..symbolic.state import storage_key
from .common import DetectorId, Finding, StorageUse, call_evidence, function_of


def detect_hidden_state_update(a: AnalysisArtifacts, solver=None) -> list[Finding]:
    use = StorageUse(a)
    writes_by_key: dict = {}
    for i, w in enumerate(a.storage_writes):
        writes_by_key.setdefault(storage_key(w.key), []).append(i)
    guard_keys: dict[int, set] = {}
    free_write: dict[int, bool] = {}
    zero_value = a.env.call_value == 0

    def guards(i: int) -> set:
        if i not in guard_keys:
            w = a.storage_writes[i]
            guard_keys[i] = use.keys_in(w.conditions, a.paths[w.path_id])
        return guard_keys[i]

    def changes_for_free(i: int) -> bool:
        """The write is reachable with no value attached and really changes the slot."""
        if i not in free_write:
            w = a.storage_writes[i]
            ok = a.paths[w.path_id].terminator not in ROLLBACK and solver is not None
            if ok:
                cs = list(a.assumptions) + list(w.conditions) + [zero_value, E.bv(w.value) != E.bv(w.prior)]
                ok = solver.check(cs).sat
            free_write[i] = ok
        return free_write[i]

    findings = {}
    for c in a.calls:
        if c.pc in findings:
            continue
        path = a.paths[c.path_id]
        func = function_of(path)
        # slots the guard depends on, directly or through the guards of their writers
        todo = list(use.keys_in(c.path_conditions_snapshot, path))
        closure = set(todo)
        while todo:
            k = todo.pop()
            for i in writes_by_key.get(k, ()):
                for k2 in guards(i) - closure:
                    closure.add(k2)
                    todo.append(k2)
        for k in sorted(closure, key=str):
            for i in writes_by_key.get(k, ()):
                w = a.storage_writes[i]
                if function_of(a.paths[w.path_id]) == func:
                    continue
                if changes_for_free(i):
                    ev = call_evidence(c, storage_keys=[use.label(k)], write_pc=w.pc)
                    ev["paths"] = [c.path_id, w.path_id]
                    findings[c.pc] = Finding(DetectorId.HSU, ev)
                    break
            if c.pc in findings:
                break
    return list(findings.values())
