"""Running the pipeline over files and serialising the results."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .bytecode import load_bytecode
from .cashflow import CashFlowVerdict, analyze_cashflow
from .config import RunConfig
from .detectors import Finding, run_all
from .solver import SolverGateway
from .symbolic.engine import SymbolicEngine

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
BYTECODE_SUFFIXES = {".hex", ".bin", ".evm", ".bytecode", ".code", ""}


@dataclass
class AnalysisReport:
    contract_id: str
    bytecode_hash: str
    cashflow: CashFlowVerdict | None = None
    findings: list[Finding] = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    duplicate_of: str | None = None
    error: str | None = None
    warnings: list[str] = field(default_factory=list)

    @property
    def detectors(self) -> list[str]:
        return [f.detector.value for f in self.findings]

    @property
    def filtered(self) -> bool:
        return self.cashflow is not None and not self.cashflow.is_cashflow_contract

    def to_dict(self) -> dict:
        out = {
            "contract": self.contract_id,
            "bytecode_sha256": self.bytecode_hash,
            "status": "error" if self.error else ("duplicate" if self.duplicate_of else "analysed"),
        }
        if self.error:
            out["error"] = self.error
            return out
        if self.duplicate_of:
            out["duplicate_of"] = self.duplicate_of
        out["cashflow"] = self.cashflow.to_dict() if self.cashflow else None
        out["filtered"] = self.filtered
        out["detectors"] = self.detectors
        out["findings"] = [f.to_dict() for f in self.findings]
        out["stats"] = dict(self.stats)
        if self.warnings:
            out["warnings"] = list(self.warnings)
        return out


def analyze_bytecode(code: bytes, config: RunConfig | None = None, contract_id: str = "<bytecode>") -> AnalysisReport:
    config = config or RunConfig()
    started = time.perf_counter()
    solver = SolverGateway(timeout_ms=config.solver_timeout_ms)
    engine = SymbolicEngine(code, config, solver)
    artifacts = engine.explore()
    verdict = analyze_cashflow(artifacts, solver)
    findings = run_all(artifacts, verdict, solver)
    elapsed = time.perf_counter() - started
    report = AnalysisReport(
        contract_id=contract_id,
        bytecode_hash=hashlib.sha256(code).hexdigest(),
        cashflow=verdict,
        findings=findings,
        stats={
            "paths": len(artifacts.paths),
            "calls": len(artifacts.calls),
            "coverage": round(artifacts.coverage, 4),
            "solver_queries": solver.queries,
            "completed": artifacts.complete,
            "wall_time_s": round(elapsed, 3),
        },
        warnings=list(artifacts.warnings),
    )
    if config.debug_dir:
        write_debug(Path(config.debug_dir), contract_id, artifacts)
    return report


def write_debug(root: Path, contract_id: str, artifacts) -> None:
    safe = contract_id.replace(os.sep, "_").replace(":", "_").lstrip("._") or "contract"
    out = root / safe
    out.mkdir(parents=True, exist_ok=True)
    (out / "cfg.dot").write_text(artifacts.cfg.to_dot())
    with open(out / "paths.txt", "w") as fh:
        for p in artifacts.paths:
            fh.write(f"path {p.id}: {p.terminator.value} {p.feasibility.value} {p.reason}\n")
            fh.write(f"  blocks: {p.blocks}\n")
            for cond in p.path_conditions:
                fh.write(f"  cond: {cond}\n")
            for c in artifacts.calls_on(p.id):
                fh.write(f"  call@{c.pc} {c.c_t.value} to={c.c_r} value={c.c_v} f={c.c_f} args={c.c_a}\n")


def collect_inputs(inputs) -> list[Path]:
    if isinstance(inputs, (str, Path)):
        inputs = [inputs]
    files: list[Path] = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            files.extend(
                sorted(f for f in p.rglob("*") if f.is_file() and f.suffix.lower() in BYTECODE_SUFFIXES)
            )
        else:
            files.append(p)
    return files


def _analyze_job(args):
    code, config, contract_id = args
    return analyze_bytecode(code, config, contract_id)


def analyze_path(inputs, config: RunConfig | None = None, jobs: int = 1) -> list[AnalysisReport]:
    """Analyse files and directories; identical bytecode is analysed once."""
    config = config or RunConfig()
    files = collect_inputs(inputs)
    reports: list[AnalysisReport | None] = [None] * len(files)
    first_by_hash: dict[str, int] = {}
    todo: list[tuple[int, bytes]] = []
    for i, f in enumerate(files):
        cid = str(f)
        try:
            code = load_bytecode(f)
        except OSError as exc:
            log.error("cannot read %s: %s", f, exc)
            reports[i] = AnalysisReport(cid, "", error=f"unreadable: {exc.strerror or exc}")
            continue
        digest = hashlib.sha256(code).hexdigest()
        if digest in first_by_hash:
            reports[i] = AnalysisReport(cid, digest, duplicate_of=str(files[first_by_hash[digest]]))
            continue
        first_by_hash[digest] = i
        todo.append((i, code))

    jobs_args = [(code, config, str(files[i])) for i, code in todo]
    if jobs > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_analyze_job, jobs_args))
    else:
        results = [_analyze_job(a) for a in jobs_args]
    for (i, _), rep in zip(todo, results):
        reports[i] = rep

    by_id = {r.contract_id: r for r in reports if r is not None and r.duplicate_of is None}
    for r in reports:
        if r is not None and r.duplicate_of is not None:
            orig = by_id[r.duplicate_of]
            r.cashflow = orig.cashflow
            r.findings = list(orig.findings)
            r.stats = dict(orig.stats)
    return [r for r in reports if r is not None]


def emit_report(reports: list[AnalysisReport], fmt: str = "json") -> str:
    if fmt == "json":
        doc = {"schema": SCHEMA_VERSION, "reports": [r.to_dict() for r in reports]}
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "text":
        return "".join(_text_line(r) + "\n" for r in reports)
    raise ValueError(f"unknown format {fmt!r}")


def _text_line(r: AnalysisReport) -> str:
    if r.error:
        return f"{r.contract_id}\terror\t{r.error}"
    parts = [r.contract_id, r.bytecode_hash[:12]]
    if r.duplicate_of:
        parts.append(f"duplicate-of={r.duplicate_of}")
    parts.append("cashflow=" + ("yes" if r.cashflow and r.cashflow.is_cashflow_contract else "no"))
    parts.append("findings=" + (",".join(r.detectors) or "-"))
    if r.stats:
        parts.append(f"paths={r.stats.get('paths')}")
        parts.append(f"time={r.stats.get('wall_time_s')}s")
        if not r.stats.get("completed", True):
            parts.append("partial")
    return "\t".join(parts)
