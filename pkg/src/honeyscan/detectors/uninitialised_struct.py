"""US: a struct written through an uninitialised storage pointer overlays slot 0 onwards."""

from __future__ import annotations

import re

from ..symbolic.artifacts import AnalysisArtifacts
from ..symbolic.state import storage_key
from .common import DetectorId, Finding, StorageUse, call_evidence

# member store through a stack-held pointer: DUPn PUSH1 <member offset> ADD ... SSTORE,
# with no other SSTORE or jump in between
MEMBER_STORE = re.compile(
    r"@\d+ DUP\d+ @\d+ PUSH1 0x(?P<member>[0-9a-f]{2}) @\d+ ADD "
    r"(?:@\d+ (?!SSTORE |JUMP)[A-Z]+\d* (?:0x[0-9a-f]+ )?)*?"
    r"@(?P<pc>\d+) SSTORE "
)


def canonical_text(block) -> str:
    return "".join(f"@{ins.offset} {ins} " for ins in block.instructions)


def member_stores(a: AnalysisArtifacts) -> dict[int, int]:
    """SSTORE offset -> member offset for every struct member store in the code."""
    found = {}
    for block in a.cfg.blocks.values():
        for m in MEMBER_STORE.finditer(canonical_text(block)):
            found[int(m.group("pc"))] = int(m.group("member"), 16)
    return found


def struct_slots(a: AnalysisArtifacts) -> dict:
    """Slots written by member stores whose struct base resolves to slot 0."""
    stores = member_stores(a)
    slots = {}
    for w in a.storage_writes:
        member = stores.get(w.pc)
        if member is None or not isinstance(w.key, int):
            continue
        if int(w.key) - member == 0:
            slots.setdefault(storage_key(w.key), w)
    return slots


def detect_uninitialised_struct(a: AnalysisArtifacts, solver=None) -> list[Finding]:
    slots = struct_slots(a)
    if not slots:
        return []
    use = StorageUse(a)
    findings = {}
    for c in a.calls:
        if c.pc in findings:
            continue
        path = a.paths[c.path_id]
        hit = use.keys_in([c.c_v] + list(c.path_conditions_snapshot), path) & slots.keys()
        if hit:
            k = sorted(hit, key=str)[0]
            findings[c.pc] = Finding(
                DetectorId.US,
                call_evidence(c, storage_keys=[use.label(k)], member_store_pc=slots[k].pc),
            )
    return list(findings.values())
