"""Cheap gate: only contracts that can both take and pay out ether are analysed further."""

from __future__ import annotations

from dataclasses import dataclass

import z3

from .solver import SolverGateway
from .symbolic.artifacts import ROLLBACK, AnalysisArtifacts, PathEnd


@dataclass(frozen=True)
class CashFlowVerdict:
    can_receive: bool
    receive_witness: int | None
    can_transfer: bool
    # ("call", call id) or ("path", path id)
    transfer_witness: tuple[str, int] | None
    partial: bool = False

    @property
    def is_cashflow_contract(self) -> bool:
        return self.can_receive and self.can_transfer

    def to_dict(self) -> dict:
        out = {
            "is_cashflow_contract": self.is_cashflow_contract,
            "can_receive": self.can_receive,
            "receive_witness_path": self.receive_witness,
            "can_transfer": self.can_transfer,
            "transfer_witness": (
                {"kind": self.transfer_witness[0], "id": self.transfer_witness[1]}
                if self.transfer_witness
                else None
            ),
        }
        if self.partial:
            out["partial"] = True
        return out


def can_receive(a: AnalysisArtifacts, solver: SolverGateway) -> tuple[bool, int | None]:
    """Some path that keeps its effects also admits a positive call value."""
    positive = z3.UGT(a.env.call_value, 0)
    for p in a.paths:
        if p.terminator in ROLLBACK:
            continue
        if solver.check(list(a.assumptions) + list(p.path_conditions) + [positive]).sat:
            return True, p.id
    return False, None


def can_transfer(a: AnalysisArtifacts, solver: SolverGateway | None = None) -> tuple[bool, tuple[str, int] | None]:
    for c in a.calls:
        if not isinstance(c.c_v, int) or c.c_v > 0:
            return True, ("call", c.id)
    for p in a.paths:
        if p.terminator is PathEnd.SELFDESTRUCT:
            return True, ("path", p.id)
    return False, None


def analyze_cashflow(a: AnalysisArtifacts, solver: SolverGateway) -> CashFlowVerdict:
    recv, rw = can_receive(a, solver)
    send, sw = can_transfer(a, solver)
    return CashFlowVerdict(recv, rw, send, sw, partial=not a.complete and not (recv and send))
