"""Satisfiability checks over QF_BV (+ UF for hashing) constraints.

Two transports sit behind ``SolverGateway``: the in-process z3 API (default)
and an external binary spoken to in SMT-LIB v2, selected by setting
``HONEYSCAN_SOLVER`` to the binary's path (e.g. ``z3`` or ``cvc5``).
"""

from __future__ import annotations

import enum
import logging
import os
import re
import shlex
import subprocess
import time
from collections import OrderedDict
from dataclasses import dataclass

try:
    import z3
except ImportError:  # pragma: no cover - exercised only on broken installs
    z3 = None

log = logging.getLogger(__name__)

SOLVER_ENV = "HONEYSCAN_SOLVER"
DEFAULT_TIMEOUT_MS = 1000
DEFAULT_CACHE_SIZE = 10_000


class SolverUnavailable(RuntimeError):
    pass


class SolverError(RuntimeError):
    """The solver crashed twice on the same query."""


class Verdict(str, enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class SatResult:
    verdict: Verdict
    model: dict[str, int] | None = None
    elapsed: float = 0.0

    @property
    def sat(self) -> bool:
        return self.verdict is Verdict.SAT

    @property
    def unsat(self) -> bool:
        return self.verdict is Verdict.UNSAT


def _z3_model(model) -> dict[str, int]:
    values = {}
    for decl in model.decls():
        if decl.arity() != 0:
            continue
        val = model[decl]
        if z3.is_bv_value(val):
            values[decl.name()] = val.as_long()
        elif z3.is_true(val) or z3.is_false(val):
            values[decl.name()] = int(z3.is_true(val))
    return values


class _InProcess:
    def __init__(self) -> None:
        self._solver = z3.Solver()

    def check(self, constraints, timeout_ms: int, want_model: bool):
        s = self._solver
        s.set("timeout", int(timeout_ms))
        s.push()
        try:
            s.add(*constraints)
            res = s.check()
            if res == z3.sat:
                return Verdict.SAT, (_z3_model(s.model()) if want_model else None)
            if res == z3.unsat:
                return Verdict.UNSAT, None
            return Verdict.UNKNOWN, None
        finally:
            s.pop()


_VALUE_RE = re.compile(r"\(\(\s*\|?([^\s|()]+)\|?\s+(#x[0-9a-fA-F]+|#b[01]+|true|false)\s*\)\)")


class _Process:
    """SMT-LIB v2 over a child process, one process per query."""

    def __init__(self, command: str) -> None:
        self._argv = shlex.split(command)
        # z3 and cvc5 both read a script from stdin with these flags
        if os.path.basename(self._argv[0]).startswith("z3") and len(self._argv) == 1:
            self._argv.append("-in")
        elif os.path.basename(self._argv[0]).startswith("cvc") and len(self._argv) == 1:
            self._argv += ["--lang=smt2", "--produce-models", "-"]

    def check(self, constraints, timeout_ms: int, want_model: bool):
        s = z3.Solver()
        s.add(*constraints)
        names = sorted({str(v) for c in constraints for v in _free_consts(c)})
        script = "(set-option :produce-models true)\n" + s.to_smt2().replace("(check-sat)", "")
        script += "(check-sat)\n"
        if want_model:
            script += "".join(f"(get-value ({n}))\n" for n in names)
        try:
            proc = subprocess.run(
                self._argv, input=script, capture_output=True, text=True,
                timeout=timeout_ms / 1000.0 + 1.0,
            )
        except subprocess.TimeoutExpired:
            return Verdict.UNKNOWN, None
        except OSError as exc:
            raise SolverUnavailable(f"cannot run {self._argv[0]}: {exc}") from exc
        lines = proc.stdout.strip().splitlines()
        if not lines:
            raise SolverError(proc.stderr.strip() or "empty solver output")
        head = lines[0].strip()
        if head == "unsat":
            return Verdict.UNSAT, None
        if head != "sat":
            return Verdict.UNKNOWN, None
        model = None
        if want_model:
            model = {}
            for m in _VALUE_RE.finditer(proc.stdout):
                raw = m.group(2)
                if raw.startswith("#x"):
                    model[m.group(1)] = int(raw[2:], 16)
                elif raw.startswith("#b"):
                    model[m.group(1)] = int(raw[2:], 2)
                else:
                    model[m.group(1)] = int(raw == "true")
        return Verdict.SAT, model


def _free_consts(expr):
    seen = set()
    todo = [expr]
    out = []
    while todo:
        e = todo.pop()
        if e.get_id() in seen:
            continue
        seen.add(e.get_id())
        if z3.is_const(e) and e.decl().kind() == z3.Z3_OP_UNINTERPRETED:
            out.append(e)
        todo.extend(e.children())
    return out


class SolverGateway:
    """One solver session. Use one per contract analysis; not thread-safe."""

    def __init__(
        self,
        timeout_ms: int = DEFAULT_TIMEOUT_MS,
        cache_size: int = DEFAULT_CACHE_SIZE,
        command: str | None = None,
    ) -> None:
        if z3 is None:
            raise SolverUnavailable("z3-solver is not installed")
        self.timeout_ms = timeout_ms
        self.cache_size = cache_size
        command = command if command is not None else os.environ.get(SOLVER_ENV)
        self._backend = _Process(command) if command else _InProcess()
        # key -> (constraints kept alive so AST ids cannot be recycled, result)
        self._cache: OrderedDict[tuple, tuple[list, SatResult]] = OrderedDict()
        self.queries = 0
        self.cache_hits = 0

    def check(self, constraints, timeout_ms: int | None = None, want_model: bool = False) -> SatResult:
        exprs = []
        for c in constraints:
            if isinstance(c, bool):
                c = z3.BoolVal(c)
            exprs.append(c)
        key = (tuple(sorted({e.get_id() for e in exprs})), want_model)
        hit = self._cache.get(key)
        if hit is not None:
            self._cache.move_to_end(key)
            self.cache_hits += 1
            return hit[1]

        self.queries += 1
        timeout = self.timeout_ms if timeout_ms is None else timeout_ms
        started = time.perf_counter()
        for attempt in (1, 2):
            try:
                verdict, model = self._backend.check(exprs, timeout, want_model)
                break
            except z3.Z3Exception as exc:
                if attempt == 2:
                    raise SolverError(str(exc)) from exc
                log.warning("solver crashed, retrying once: %s", exc)
                self._backend = type(self._backend)() if isinstance(self._backend, _InProcess) else self._backend
            except SolverError:
                if attempt == 2:
                    raise
                log.warning("solver returned garbage, retrying once")
        result = SatResult(verdict, model, time.perf_counter() - started)
        if verdict is not Verdict.UNKNOWN:
            self._cache[key] = (exprs, result)
            if len(self._cache) > self.cache_size:
                self._cache.popitem(last=False)
        return result

    def is_sat(self, constraints) -> bool:
        return self.check(constraints).sat

    def is_unsat(self, constraints) -> bool:
        return self.check(constraints).unsat

    def models(self, constraints, term, limit: int = 2) -> list[int]:
        """Up to ``limit`` distinct concrete values of ``term`` under ``constraints``."""
        found: list[int] = []
        probe = z3.Const("__probe__", term.sort())
        extra = [probe == term]
        for _ in range(limit):
            res = self.check(list(constraints) + extra + [probe != v for v in found], want_model=True)
            if not res.sat or res.model is None or "__probe__" not in res.model:
                break
            found.append(res.model["__probe__"])
        return found
