"""Honeypot technique detectors and the registry that runs them."""

from __future__ import annotations

from typing import Callable

from ..cashflow import CashFlowVerdict
from ..solver import SolverGateway
from ..symbolic.artifacts import AnalysisArtifacts
from .balance_disorder import detect_balance_disorder
from .common import DetectorId, Finding
from .hidden_state_update import detect_hidden_state_update
from .hidden_transfer import detect_hidden_transfer
from .inheritance_disorder import detect_inheritance_disorder
from .skip_empty_string import detect_skip_empty_string_literal
from .straw_man import detect_straw_man_contract
from .type_overflow import detect_type_deduction_overflow
from .uninitialised_struct import detect_uninitialised_struct

Detector = Callable[[AnalysisArtifacts, SolverGateway], list[Finding]]

REGISTRY: dict[DetectorId, Detector] = {
    DetectorId.BD: detect_balance_disorder,
    DetectorId.ID: detect_inheritance_disorder,
    DetectorId.SESL: detect_skip_empty_string_literal,
    DetectorId.TDO: detect_type_deduction_overflow,
    DetectorId.US: detect_uninitialised_struct,
    DetectorId.HSU: detect_hidden_state_update,
    DetectorId.HT: detect_hidden_transfer,
    DetectorId.SMC: detect_straw_man_contract,
}


def register(detector_id: DetectorId, fn: Detector) -> None:
    REGISTRY[detector_id] = fn


def run_all(a: AnalysisArtifacts, verdict: CashFlowVerdict, solver: SolverGateway) -> list[Finding]:
    """All findings, or nothing when the contract failed the cash-flow gate."""
    if not verdict.is_cashflow_contract:
        return []
    findings: list[Finding] = []
    for fn in REGISTRY.values():
        findings.extend(fn(a, solver))
    return sorted(findings, key=Finding.sort_key)


__all__ = [
    "REGISTRY",
    "DetectorId",
    "Finding",
    "register",
    "run_all",
    "detect_balance_disorder",
    "detect_hidden_state_update",
    "detect_hidden_transfer",
    "detect_inheritance_disorder",
    "detect_skip_empty_string_literal",
    "detect_straw_man_contract",
    "detect_type_deduction_overflow",
    "detect_uninitialised_struct",
]
