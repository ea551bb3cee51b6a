"""Depth-first symbolic execution over the recovered CFG.

Infeasible branches are not pruned: they are executed like any other path and
only labelled, because some detectors look specifically for code that can
never run.
"""

from __future__ import annotations

import logging
import time
from dataclasses import replace

import z3
from Crypto.Hash import keccak

from ..bytecode import Instruction, decode
from ..cfg import InvalidJump, build_cfg
from ..config import RunConfig
from ..opcodes import info
from ..solver import SolverGateway, Verdict
from . import expr as E
from .artifacts import (
    ETHER_TRANSFER,
    AnalysisArtifacts,
    ArithmeticRecord,
    CallRecord,
    CallType,
    ExecutionPath,
    Feasibility,
    PathEnd,
    StorageRead,
    StorageWrite,
    TruncationRecord,
)
from .state import (
    ExecutionEnvironment,
    MachineState,
    StackError,
    SymbolTable,
    cells_to_bv,
    storage_key,
    word_cells,
)

log = logging.getLogger(__name__)

# copies larger than this are not materialised byte by byte
MAX_COPY = 4096

_VERDICT = {
    Verdict.SAT: Feasibility.FEASIBLE,
    Verdict.UNSAT: Feasibility.INFEASIBLE,
    Verdict.UNKNOWN: Feasibility.UNKNOWN,
}

_ENV_WORDS = {
    "COINBASE": "block_coinbase",
    "TIMESTAMP": "block_timestamp",
    "NUMBER": "block_number",
    "DIFFICULTY": "block_difficulty",
    "GASLIMIT": "block_gaslimit",
    "GASPRICE": "tx_gasprice",
}


def keccak256(data: bytes) -> bytes:
    return keccak.new(digest_bits=256, data=data).digest()


def word_to_cond(w):
    """Boolean reading of a word (non-zero), peeling ``If(c, 1, 0)`` wrappers."""
    if isinstance(w, int):
        return w != 0
    if z3.is_app_of(w, z3.Z3_OP_ITE):
        c, t, f = w.children()
        if z3.is_bv_value(t) and z3.is_bv_value(f):
            t, f = t.as_long(), f.as_long()
            if t != 0 and f == 0:
                return c
            if t == 0 and f != 0:
                return z3.simplify(z3.Not(c))
    return z3.simplify(w != 0)


def check_feasibility(path: ExecutionPath, solver: SolverGateway, assumptions=()) -> Feasibility:
    """Classify a path by the satisfiability of its conditions."""
    return _VERDICT[solver.check(list(assumptions) + list(path.path_conditions)).verdict]


class SymbolicEngine:
    def __init__(self, code: bytes, config: RunConfig | None = None, solver: SolverGateway | None = None):
        self.code = bytes(code)
        self.config = config or RunConfig()
        self.solver = solver or SolverGateway(timeout_ms=self.config.solver_timeout_ms)
        self.seq = decode(self.code)
        self.cfg = build_cfg(self.seq)
        self.symbols = SymbolTable()
        self.env = ExecutionEnvironment.symbolic(self.code)
        self.assumptions = self.env.assumptions()
        self.artifacts = AnalysisArtifacts(
            cfg=self.cfg,
            env=self.env,
            assumptions=self.assumptions,
            instruction_count=len(self.seq),
            warnings=list(self.seq.warnings),
        )
        self._deadline = 0.0
        self._jumpdest_terms = None

    # ------------------------------------------------------------------ driver

    def explore(self) -> AnalysisArtifacts:
        self._deadline = time.monotonic() + self.config.global_timeout_s
        if not self.seq.instructions:
            self._finish(MachineState(pc=0, env=self.env), PathEnd.STOP, "empty code")
            return self._done()
        start = MachineState(pc=0, env=self.env)
        self._enter(start, None, 0)
        work = [start]
        while work:
            if time.monotonic() > self._deadline:
                self.artifacts.complete = False
                self.artifacts.warnings.append(f"global timeout: {len(work)} pending states dropped")
                log.warning("global timeout after %d paths", len(self.artifacts.paths))
                break
            state = work.pop()
            work.extend(reversed(self._run_block(state)))
        return self._done()

    def _done(self) -> AnalysisArtifacts:
        self.artifacts.storage_symbols = dict(self.symbols.storage_keys)
        return self.artifacts

    def _run_block(self, st: MachineState) -> list[MachineState]:
        block = self.cfg.blocks[st.pc]
        out = [st]
        for ins in block.instructions:
            out = self.step(st, ins)
            if not out:
                return []
            st = out[0]
        alive = []
        for s in out:
            if s.pc not in self.cfg.blocks:
                # running off the end of the code is an implicit STOP
                self._finish(s, PathEnd.STOP, "end of code")
            elif self._enter(s, block.start, s.pc):
                alive.append(s)
        return alive

    def _enter(self, st: MachineState, src: int | None, dst: int) -> bool:
        if src is not None and dst in st.trace:
            edge = (src, dst)
            n = st.back_edges.get(edge, 0) + 1
            st.back_edges[edge] = n
            if n >= self.config.loop_limit:
                self._finish(st, PathEnd.LIMIT_EXCEEDED, "loop limit")
                return False
        st.pc = dst
        st.trace.append(dst)
        st.trace_feasibility.append(st.feasibility)
        if st.feasibility is Feasibility.INFEASIBLE:
            self.cfg.infeasible_blocks.add(dst)
        else:
            self.cfg.feasible_blocks.add(dst)
        return True

    def _finish(self, st: MachineState, end: PathEnd, reason: str = "", target=None) -> None:
        a = self.artifacts
        pid = len(a.paths)
        path = ExecutionPath(
            id=pid,
            blocks=list(st.trace),
            path_conditions=list(st.path_conditions),
            terminator=end,
            feasibility=st.feasibility,
            block_feasibility=list(st.trace_feasibility),
            reason=reason,
            reads=list(st.reads),
            calldata_offsets=frozenset(st.calldata_offsets),
            selfdestruct_target=target,
            final_stack=list(st.stack),
            final_storage={ck: kv[1] for ck, kv in st.storage.items()},
        )
        for i, call in enumerate(st.calls):
            path.calls.append(len(a.calls))
            a.calls.append(replace(call, order=i, path_id=pid, id=len(a.calls)))
        for w in st.writes:
            path.writes.append(len(a.storage_writes))
            a.storage_writes.append(replace(w, path_id=pid))
        a.arithmetic_records.extend(replace(r, path_id=pid) for r in st.arithmetic)
        a.truncations.extend(replace(t, path_id=pid) for t in st.truncations)
        a.paths.append(path)

    def _assume(self, st: MachineState, cond) -> None:
        """Append a branch condition and refresh the path's feasibility."""
        st.path_conditions.append(cond)
        if st.feasibility is Feasibility.INFEASIBLE:
            return
        res = self.solver.check(self.assumptions + st.path_conditions)
        st.feasibility = _VERDICT[res.verdict]

    # ------------------------------------------------------------------ steps

    def step(self, st: MachineState, ins: Instruction) -> list[MachineState]:
        """Execute one instruction. Returns the successor states (empty when the path ended)."""
        self.artifacts.visited.add(ins.offset)
        st.gas_used += info(ins.opcode).gas
        if st.gas_used > self.config.gas_limit:
            self._finish(st, PathEnd.LIMIT_EXCEEDED, "gas limit")
            return []
        name = ins.name
        try:
            if ins.is_push:
                st.push(ins.push_value)
            elif name.startswith("DUP"):
                n = int(name[3:])
                if len(st.stack) < n:
                    raise StackError("stack underflow")
                st.push(st.stack[-n])
            elif name.startswith("SWAP"):
                n = int(name[4:])
                if len(st.stack) < n + 1:
                    raise StackError("stack underflow")
                st.stack[-1], st.stack[-n - 1] = st.stack[-n - 1], st.stack[-1]
            elif name.startswith("LOG"):
                st.popn(int(name[3:]) + 2)
            else:
                handler = getattr(self, "op_" + name, None)
                if handler is None:
                    self._finish(st, PathEnd.INVALID, f"invalid opcode 0x{ins.opcode:02x}")
                    return []
                res = handler(st, ins)
                if res is not None:
                    return res
        except StackError as exc:
            self._finish(st, PathEnd.INVALID, str(exc))
            return []
        st.pc = ins.next_offset
        return [st]

    # arithmetic ------------------------------------------------------------

    def _binary(self, st, concrete, symbolic):
        a, b = st.popn(2)
        if isinstance(a, int) and isinstance(b, int):
            st.push(concrete(int(a), int(b)) & E.MASK)
        else:
            st.push(E.norm(symbolic(E.bv(a), E.bv(b))))

    def _tracked(self, st, ins, op, concrete, symbolic):
        a, b = st.popn(2)
        if isinstance(a, int) and isinstance(b, int):
            res = E.Traced(concrete(int(a), int(b)) & E.MASK, op, ins.offset)
        else:
            res = E.norm(symbolic(E.bv(a), E.bv(b)))
            if not isinstance(res, int):
                st.arith_results[res.get_id()] = ins.offset
        st.arithmetic.append(ArithmeticRecord(op, (a, b), res, ins.offset))
        st.push(res)

    def op_ADD(self, st, ins):
        self._tracked(st, ins, "ADD", lambda a, b: a + b, lambda a, b: a + b)

    def op_MUL(self, st, ins):
        self._tracked(st, ins, "MUL", lambda a, b: a * b, lambda a, b: a * b)

    def op_SUB(self, st, ins):
        self._binary(st, lambda a, b: a - b, lambda a, b: a - b)

    def op_DIV(self, st, ins):
        self._binary(
            st,
            lambda a, b: a // b if b else 0,
            lambda a, b: z3.If(b == 0, z3.BitVecVal(0, 256), z3.UDiv(a, b)),
        )

    def op_SDIV(self, st, ins):
        def concrete(a, b):
            if b == 0:
                return 0
            sa, sb = E.to_signed(a), E.to_signed(b)
            q = abs(sa) // abs(sb)
            return q if (sa < 0) == (sb < 0) else -q

        self._binary(st, concrete, lambda a, b: z3.If(b == 0, z3.BitVecVal(0, 256), a / b))

    def op_MOD(self, st, ins):
        self._binary(
            st,
            lambda a, b: a % b if b else 0,
            lambda a, b: z3.If(b == 0, z3.BitVecVal(0, 256), z3.URem(a, b)),
        )

    def op_SMOD(self, st, ins):
        def concrete(a, b):
            if b == 0:
                return 0
            sa, sb = E.to_signed(a), E.to_signed(b)
            r = abs(sa) % abs(sb)
            return -r if sa < 0 else r

        self._binary(st, concrete, lambda a, b: z3.If(b == 0, z3.BitVecVal(0, 256), z3.SRem(a, b)))

    def _modop(self, st, combine):
        a, b, n = st.popn(3)
        if all(isinstance(v, int) for v in (a, b, n)):
            st.push(combine(int(a), int(b)) % int(n) if n else 0)
            return
        wa, wb, wn = (z3.ZeroExt(256, E.bv(v)) for v in (a, b, n))
        r = z3.Extract(255, 0, z3.URem(combine(wa, wb), wn))
        st.push(E.norm(z3.If(E.bv(n) == 0, z3.BitVecVal(0, 256), r)))

    def op_ADDMOD(self, st, ins):
        self._modop(st, lambda a, b: a + b)

    def op_MULMOD(self, st, ins):
        self._modop(st, lambda a, b: a * b)

    def op_EXP(self, st, ins):
        base, exp = st.popn(2)
        if isinstance(base, int) and isinstance(exp, int):
            st.push(pow(int(base), int(exp), E.MOD))
            return
        if isinstance(base, int) and base and base & (base - 1) == 0:
            # (2**k)**e == 1 << (k*e); the shift yields 0 once k*e >= 256
            k = base.bit_length() - 1
            shift = z3.ZeroExt(256, E.bv(exp)) * k
            big = z3.If(z3.UGE(shift, 256), z3.BitVecVal(0, 512), z3.BitVecVal(1, 512) << shift)
            st.push(E.norm(z3.Extract(255, 0, big)))
            return
        if isinstance(exp, int) and exp <= 8:
            acc = z3.BitVecVal(1, 256)
            for _ in range(int(exp)):
                acc = acc * E.bv(base)
            st.push(E.norm(acc))
            return
        st.push(self.symbols.opaque("exp", base, exp))

    def op_SIGNEXTEND(self, st, ins):
        b, x = st.popn(2)
        if isinstance(b, int):
            if b >= 31:
                st.push(x)
                return
            bit = 8 * int(b) + 7
            if isinstance(x, int):
                mask = (1 << (bit + 1)) - 1
                st.push((int(x) | (E.MASK ^ mask)) if (int(x) >> bit) & 1 else int(x) & mask)
            else:
                st.push(E.norm(z3.SignExt(255 - bit, z3.Extract(bit, 0, x))))
            return
        st.push(self.symbols.opaque("signextend", b, x))

    def _compare(self, st, concrete, symbolic):
        a, b = st.popn(2)
        if isinstance(a, int) and isinstance(b, int):
            st.push(int(concrete(int(a), int(b))))
        else:
            st.push(E.bool_to_word(symbolic(E.bv(a), E.bv(b))))

    def op_LT(self, st, ins):
        self._compare(st, lambda a, b: a < b, z3.ULT)

    def op_GT(self, st, ins):
        self._compare(st, lambda a, b: a > b, z3.UGT)

    def op_SLT(self, st, ins):
        self._compare(st, lambda a, b: E.to_signed(a) < E.to_signed(b), lambda a, b: a < b)

    def op_SGT(self, st, ins):
        self._compare(st, lambda a, b: E.to_signed(a) > E.to_signed(b), lambda a, b: a > b)

    def op_EQ(self, st, ins):
        self._compare(st, lambda a, b: a == b, lambda a, b: a == b)

    def op_ISZERO(self, st, ins):
        a = st.pop()
        if isinstance(a, int):
            st.push(int(a == 0))
        else:
            st.push(E.bool_to_word(z3.Not(word_to_cond(a))))

    def op_AND(self, st, ins):
        a, b = st.popn(2)
        if isinstance(a, int) and isinstance(b, int):
            res = int(a) & int(b)
        else:
            res = E.norm(E.bv(a) & E.bv(b))
        # 8-bit truncation of an arithmetic result
        for mask, other in ((a, b), (b, a)):
            if not (isinstance(mask, int) and int(mask) == E.BYTE_MASK):
                continue
            if isinstance(other, E.Traced) and other.op in ("MUL", "ADD", "TRUNC8"):
                src = other.source if other.op == "TRUNC8" else other
                res = E.Traced(res, "TRUNC8", ins.offset, source=src)
                st.truncations.append(TruncationRecord(ins.offset, other, res, src.pc))
                break
            if not isinstance(other, int) and other.get_id() in st.arith_results:
                st.truncations.append(
                    TruncationRecord(ins.offset, other, res, st.arith_results[other.get_id()])
                )
                break
        st.push(res)

    def op_OR(self, st, ins):
        self._binary(st, lambda a, b: a | b, lambda a, b: a | b)

    def op_XOR(self, st, ins):
        self._binary(st, lambda a, b: a ^ b, lambda a, b: a ^ b)

    def op_NOT(self, st, ins):
        a = st.pop()
        st.push(E.MASK ^ int(a) if isinstance(a, int) else E.norm(~a))

    def op_BYTE(self, st, ins):
        i, x = st.popn(2)
        if isinstance(i, int):
            if i >= 32:
                st.push(0)
            elif isinstance(x, int):
                st.push((int(x) >> (8 * (31 - int(i)))) & 0xFF)
            else:
                hi = 255 - 8 * int(i)
                st.push(E.norm(z3.ZeroExt(248, z3.Extract(hi, hi - 7, x))))
            return
        shifted = z3.LShR(E.bv(x), (31 - i) * 8) & 0xFF
        st.push(E.norm(z3.If(z3.UGE(i, 32), z3.BitVecVal(0, 256), shifted)))

    def op_SHL(self, st, ins):
        self._binary(st, lambda s, v: v << s if s < 256 else 0, lambda s, v: v << s)

    def op_SHR(self, st, ins):
        self._binary(st, lambda s, v: v >> s if s < 256 else 0, lambda s, v: z3.LShR(v, s))

    def op_SAR(self, st, ins):
        def concrete(s, v):
            return (E.to_signed(v) >> min(s, 256)) & E.MASK

        self._binary(st, concrete, lambda s, v: v >> s)

    def op_SHA3(self, st, ins):
        off, size = st.popn(2)
        if isinstance(off, int) and isinstance(size, int) and size <= MAX_COPY:
            if size == 0:
                st.push(int.from_bytes(keccak256(b""), "big"))
                return
            cells = st.memory.cells(int(off), int(size))
            if all(isinstance(c, int) for c in cells):
                st.push(int.from_bytes(keccak256(bytes(cells)), "big"))
            else:
                st.push(E.norm(self.symbols.keccak(z3.simplify(cells_to_bv(cells)))))
            return
        st.push(self.symbols.opaque("keccak", off, size))

    # environment -----------------------------------------------------------

    def op_ADDRESS(self, st, ins):
        st.push(st.env.contract_address)

    def op_BALANCE(self, st, ins):
        addr = st.pop()
        if E.is_symbol(addr, "Ia"):
            st.push(st.env.self_balance)
        else:
            st.push(self.symbols.balance_of(addr))

    def op_ORIGIN(self, st, ins):
        st.push(st.env.origin)

    def op_CALLER(self, st, ins):
        st.push(st.env.sender)

    def op_CALLVALUE(self, st, ins):
        st.push(st.env.call_value)

    def op_CALLDATALOAD(self, st, ins):
        off = st.pop()
        if isinstance(off, int):
            st.calldata_offsets.add(int(off))
        st.push(self.symbols.calldata(off))

    def op_CALLDATASIZE(self, st, ins):
        st.push(st.env.calldata_size)

    def op_CALLDATACOPY(self, st, ins):
        dest, off, size = st.popn(3)
        if not all(isinstance(v, int) for v in (dest, off, size)) or size > MAX_COPY:
            return
        cells = []
        for k in range(0, int(size), 32):
            st.calldata_offsets.add(int(off) + k)
            cells.extend(word_cells(self.symbols.calldata(int(off) + k)))
        st.memory.store_bytes(int(dest), cells[: int(size)])

    def op_CODESIZE(self, st, ins):
        st.push(self.seq.code_size)

    def op_CODECOPY(self, st, ins):
        dest, off, size = st.popn(3)
        if not all(isinstance(v, int) for v in (dest, off, size)) or size > MAX_COPY:
            return
        chunk = self.code[int(off) : int(off) + int(size)]
        st.memory.store_bytes(int(dest), list(chunk.ljust(int(size), b"\0")))

    def op_EXTCODESIZE(self, st, ins):
        addr = st.pop()
        if E.is_symbol(addr, "Ia"):
            st.push(self.seq.code_size)
        else:
            st.push(self.symbols.extcodesize(addr))

    def op_EXTCODECOPY(self, st, ins):
        st.popn(4)

    def op_EXTCODEHASH(self, st, ins):
        st.push(self.symbols.opaque("extcodehash", st.pop()))

    def op_RETURNDATASIZE(self, st, ins):
        st.push(st.returndata_size)

    def op_RETURNDATACOPY(self, st, ins):
        dest, off, size = st.popn(3)
        if not all(isinstance(v, int) for v in (dest, size)) or size > MAX_COPY:
            return
        cells = []
        for _ in range(0, int(size), 32):
            cells.extend(word_cells(self.symbols.fresh("returndata")))
        st.memory.store_bytes(int(dest), cells[: int(size)])

    def op_BLOCKHASH(self, st, ins):
        st.push(self.symbols.opaque("blockhash", st.pop()))

    def _env_word(self, st, ins):
        st.push(self.symbols.word(_ENV_WORDS[ins.name]))

    op_COINBASE = op_TIMESTAMP = op_NUMBER = op_DIFFICULTY = op_GASLIMIT = op_GASPRICE = _env_word

    def op_GAS(self, st, ins):
        st.push(self.symbols.fresh("gas"))

    # memory / storage / flow -------------------------------------------------

    def op_POP(self, st, ins):
        st.pop()

    def op_MLOAD(self, st, ins):
        st.push(st.memory.load_word(st.pop(), self.symbols))

    def op_MSTORE(self, st, ins):
        off, val = st.popn(2)
        st.memory.store_word(off, val)

    def op_MSTORE8(self, st, ins):
        off, val = st.popn(2)
        st.memory.store_byte(off, val)

    def _sload(self, st, key):
        hit = st.storage.get(storage_key(key))
        if hit is not None:
            return hit[1]
        return self.symbols.storage(key if not isinstance(key, int) else int(key))

    def op_SLOAD(self, st, ins):
        key = st.pop()
        val = self._sload(st, key)
        st.reads.append(StorageRead(key, val, ins.offset))
        st.push(val)

    def op_SSTORE(self, st, ins):
        key, val = st.popn(2)
        prior = self._sload(st, key)
        st.storage[storage_key(key)] = (key, val)
        st.writes.append(
            StorageWrite(key, val, prior, ins.offset, st.trace[-1], list(st.path_conditions))
        )

    def op_PC(self, st, ins):
        st.push(ins.offset)

    def op_MSIZE(self, st, ins):
        st.push(st.memory.size)

    def op_JUMPDEST(self, st, ins):
        pass

    def op_JUMP(self, st, ins):
        return self._jump(st, st.pop())

    def op_JUMPI(self, st, ins):
        target, cond = st.popn(2)
        c = word_to_cond(cond)
        if isinstance(c, bool) or z3.is_true(c) or z3.is_false(c):
            taken = c if isinstance(c, bool) else z3.is_true(c)
            if taken:
                return self._jump(st, target)
            st.pc = ins.next_offset
            return [st]
        if st.depth >= self.config.depth_limit:
            self._finish(st, PathEnd.LIMIT_EXCEEDED, "depth limit")
            return []
        st.depth += 1
        other = st.copy()
        self._assume(st, c)
        self._assume(other, z3.simplify(z3.Not(c)))
        other.pc = ins.next_offset
        return self._jump(st, target) + [other]

    def _jump(self, st, target) -> list[MachineState]:
        src = st.trace[-1]
        if isinstance(target, int):
            try:
                self.cfg.add_dynamic_edge(src, int(target))
            except InvalidJump as exc:
                self._finish(st, PathEnd.INVALID_JUMP, str(exc))
                return []
            st.pc = int(target)
            return [st]
        if self._jumpdest_terms is None:
            self._jumpdest_terms = sorted(self.cfg.jumpdests)
        if not self._jumpdest_terms:
            self._finish(st, PathEnd.INVALID_JUMP, "symbolic jump, no jump destinations")
            return []
        valid = z3.Or(*[target == d for d in self._jumpdest_terms])
        base = list(self.assumptions) + [valid]
        if st.feasibility is not Feasibility.INFEASIBLE:
            base += st.path_conditions
        values = self.solver.models(base, target, limit=self.config.jump_models)
        if not values:
            self._finish(st, PathEnd.INVALID_JUMP, "symbolic jump target unresolved")
            return []
        out = []
        for i, v in enumerate(values):
            s = st if i == len(values) - 1 else st.copy()
            self._assume(s, z3.simplify(target == v))
            self.cfg.add_dynamic_edge(src, v)
            s.pc = v
            out.append(s)
        return out

    def op_STOP(self, st, ins):
        self._finish(st, PathEnd.STOP)
        return []

    def op_RETURN(self, st, ins):
        st.popn(2)
        self._finish(st, PathEnd.RETURN)
        return []

    def op_REVERT(self, st, ins):
        st.popn(2)
        self._finish(st, PathEnd.REVERT)
        return []

    def op_INVALID(self, st, ins):
        self._finish(st, PathEnd.INVALID, "designated invalid instruction")
        return []

    def op_SELFDESTRUCT(self, st, ins):
        target = st.pop()
        self._finish(st, PathEnd.SELFDESTRUCT, target=target)
        return []

    # calls -------------------------------------------------------------------

    def _call_input(self, st, off, size):
        if isinstance(size, int) and size == 0:
            return ETHER_TRANSFER, []
        if not isinstance(off, int):
            return None, []
        head = st.memory.cells(int(off), 4)
        c_f = None
        if (not isinstance(size, int) or size >= 4) and all(isinstance(c, int) for c in head):
            c_f = "0x" + bytes(head).hex()
        if not isinstance(size, int) or size < 4 or size > MAX_COPY:
            return c_f, []
        n = (int(size) - 4 + 31) // 32
        args = [st.memory.load_word(int(off) + 4 + 32 * j, self.symbols) for j in range(n)]
        return c_f, args

    def _after_call(self, st, out_off, out_size) -> None:
        if isinstance(out_off, int) and isinstance(out_size, int) and out_size <= MAX_COPY:
            cells = []
            for _ in range(0, int(out_size), 32):
                cells.extend(word_cells(self.symbols.fresh("returndata")))
            st.memory.store_bytes(int(out_off), cells[: int(out_size)])
        st.returndata_size = self.symbols.fresh("returndatasize")
        flag = self.symbols.fresh_bool("call_success")
        st.push(z3.If(flag, z3.BitVecVal(1, 256), z3.BitVecVal(0, 256)))

    def _record_call(self, st, ins, kind, gas, to, value, in_off, in_size):
        c_f, c_a = self._call_input(st, in_off, in_size)
        st.calls.append(
            CallRecord(
                c_r=to,
                c_v=value,
                c_f=c_f,
                c_a=c_a,
                c_t=kind,
                c_g=gas,
                pc=ins.offset,
                block_offset=st.trace[-1],
                path_conditions_snapshot=list(st.path_conditions),
                block_feasibility=st.feasibility,
            )
        )

    def op_CALL(self, st, ins):
        gas, to, value, in_off, in_size, out_off, out_size = st.popn(7)
        self._record_call(st, ins, CallType.CALL, gas, to, value, in_off, in_size)
        self._after_call(st, out_off, out_size)

    def op_DELEGATECALL(self, st, ins):
        gas, to, in_off, in_size, out_off, out_size = st.popn(6)
        self._record_call(st, ins, CallType.DELEGATECALL, gas, to, 0, in_off, in_size)
        self._after_call(st, out_off, out_size)

    def op_CALLCODE(self, st, ins):
        _, _, _, _, _, out_off, out_size = st.popn(7)
        self._after_call(st, out_off, out_size)

    def op_STATICCALL(self, st, ins):
        _, _, _, _, out_off, out_size = st.popn(6)
        self._after_call(st, out_off, out_size)

    def op_CREATE(self, st, ins):
        st.popn(3)
        st.push(self.symbols.fresh("created"))

    def op_CREATE2(self, st, ins):
        st.popn(4)
        st.push(self.symbols.fresh("created"))


def explore(code: bytes, config: RunConfig | None = None, solver: SolverGateway | None = None) -> AnalysisArtifacts:
    return SymbolicEngine(code, config, solver).explore()
