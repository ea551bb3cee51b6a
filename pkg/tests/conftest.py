import json
import sys
from pathlib import Path

import pytest

from honeyscan.bytecode import load_bytecode
from honeyscan.cashflow import analyze_cashflow
from honeyscan.config import RunConfig
from honeyscan.detectors import run_all
from honeyscan.solver import SolverGateway
from honeyscan.symbolic import SymbolicEngine

sys.path.insert(0, str(Path(__file__).parent))

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
MANIFEST = json.loads((CORPUS / "manifest.json").read_text())["contracts"]
BY_NAME = {c["name"]: c for c in MANIFEST}

# lines printed at the end of the run by the acceptance suite
ACCEPTANCE: dict[int, str] = {}


class Analysed:
    def __init__(self, artifacts, verdict, findings, solver):
        self.artifacts = artifacts
        self.verdict = verdict
        self.findings = findings
        self.solver = solver

    @property
    def detectors(self):
        return [f.detector.value for f in self.findings]


_CACHE: dict[str, Analysed] = {}


def corpus_code(name: str) -> bytes:
    return load_bytecode(CORPUS / BY_NAME[name]["path"])


def analyse(name: str) -> Analysed:
    """Run the whole pipeline on a corpus contract once per session."""
    if name not in _CACHE:
        cfg = RunConfig()
        solver = SolverGateway(timeout_ms=cfg.solver_timeout_ms)
        a = SymbolicEngine(corpus_code(name), cfg, solver).explore()
        verdict = analyze_cashflow(a, solver)
        _CACHE[name] = Analysed(a, verdict, run_all(a, verdict, solver), solver)
    return _CACHE[name]


@pytest.fixture
def corpus():
    return analyse


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
