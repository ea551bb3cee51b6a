"""Symbolic EVM state: environment, world state, memory and machine state."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import z3

from .artifacts import Feasibility
from .expr import MASK, WORD_BITS, bv, norm

STACK_LIMIT = 1024


class StackError(Exception):
    pass


class SymbolTable:
    """Allocates symbols for one analysis with stable, reproducible names.

    Reads that must agree (same calldata offset, same storage key, same hash
    preimage) are memoized on the simplified term's s-expression.
    """

    def __init__(self) -> None:
        self._counters: dict[str, int] = {}
        self._memo: dict[tuple, Any] = {}
        self.storage_keys: dict[str, Any] = {}
        self._hash_fns: dict[int, z3.FuncDeclRef] = {}

    def word(self, name: str) -> z3.BitVecRef:
        return z3.BitVec(name, WORD_BITS)

    def fresh(self, prefix: str) -> z3.BitVecRef:
        n = self._counters.get(prefix, 0)
        self._counters[prefix] = n + 1
        return z3.BitVec(f"{prefix}_{n}", WORD_BITS)

    def fresh_bool(self, prefix: str) -> z3.BoolRef:
        n = self._counters.get(prefix, 0)
        self._counters[prefix] = n + 1
        return z3.Bool(f"{prefix}_{n}")

    def _memoized(self, kind: str, key, make):
        k = (kind, key if isinstance(key, int) else key.sexpr())
        if k not in self._memo:
            self._memo[k] = make()
        return self._memo[k]

    def calldata(self, offset):
        if isinstance(offset, int):
            offset = int(offset)
            return self._memoized("cd", offset, lambda: self.word(f"Id_{offset}"))
        return self._memoized("cd", offset, lambda: self.fresh("Id_k"))

    def storage(self, key):
        if isinstance(key, int):
            key = int(key)

        def make():
            if isinstance(key, int):
                sym = self.word(f"storage_{key:x}")
            else:
                sym = self.fresh("storage_k")
            self.storage_keys[sym.decl().name()] = key
            return sym

        return self._memoized("st", key, make)

    def balance_of(self, address):
        return self._memoized("bal", address, lambda: self.fresh("balance_k"))

    def extcodesize(self, address):
        return self._memoized("ecs", address, lambda: self.fresh("extcodesize"))

    def keccak(self, data: z3.BitVecRef) -> z3.BitVecRef:
        bits = data.size()
        fn = self._hash_fns.get(bits)
        if fn is None:
            fn = z3.Function(f"keccak256_{bits}", z3.BitVecSort(bits), z3.BitVecSort(WORD_BITS))
            self._hash_fns[bits] = fn
        return fn(data)

    def opaque(self, kind: str, *parts):
        """Fresh symbol shared by every occurrence of the same (kind, parts)."""
        key = "|".join(str(p) if isinstance(p, int) else p.sexpr() for p in parts)
        k = (kind, key)
        if k not in self._memo:
            self._memo[k] = self.fresh(kind)
        return self._memo[k]


@dataclass
class ExecutionEnvironment:
    contract_address: Any
    sender: Any
    call_value: Any
    origin: Any
    calldata_size: Any
    code: bytes
    # I_a's balance before the transaction's value is credited
    balance: Any

    @classmethod
    def symbolic(cls, code: bytes) -> "ExecutionEnvironment":
        return cls(
            contract_address=z3.ZeroExt(96, z3.BitVec("Ia", 160)),
            sender=z3.ZeroExt(96, z3.BitVec("Is", 160)),
            call_value=z3.BitVec("Iv", WORD_BITS),
            origin=z3.ZeroExt(96, z3.BitVec("Io", 160)),
            calldata_size=z3.BitVec("Id_size", WORD_BITS),
            code=code,
            balance=z3.BitVec("balance_Ia", WORD_BITS),
        )

    @property
    def self_balance(self):
        """BALANCE(I_a) as seen during execution: the value is already credited."""
        return norm(bv(self.balance) + bv(self.call_value))

    def assumptions(self) -> list:
        """Background facts about a funded honeypot holding real ether amounts."""
        cap = z3.BitVecVal(1 << 128, WORD_BITS)
        return [
            z3.UGT(self.balance, 0),
            z3.ULT(self.balance, cap),
            z3.ULT(self.call_value, cap),
        ]


class Memory:
    """Byte-addressed memory.

    A byte is an int, or ``(word, i)`` meaning byte ``i`` (big-endian) of a
    symbolic word, so that a stored word reads back as the same term.
    Symbolic addresses hold whole words keyed by the address term.
    """

    def __init__(self) -> None:
        self.bytes: dict[int, Any] = {}
        self.symbolic: dict[str, Any] = {}
        self.size = 0

    def copy(self) -> "Memory":
        m = Memory.__new__(Memory)
        m.bytes = dict(self.bytes)
        m.symbolic = dict(self.symbolic)
        m.size = self.size
        return m

    def _touch(self, offset: int, length: int) -> None:
        if length:
            end = offset + length
            self.size = max(self.size, (end + 31) // 32 * 32)

    def store_word(self, offset, value) -> None:
        if not isinstance(offset, int):
            self.symbolic[norm(offset).sexpr()] = value
            return
        self._touch(offset, 32)
        if isinstance(value, int):
            for i, b in enumerate(int(value).to_bytes(32, "big")):
                self.bytes[offset + i] = b
        else:
            for i in range(32):
                self.bytes[offset + i] = (value, i)

    def store_byte(self, offset, value) -> None:
        if not isinstance(offset, int):
            return
        self._touch(offset, 1)
        if isinstance(value, int):
            self.bytes[offset] = value & 0xFF
        else:
            self.bytes[offset] = (value, 31)

    def store_bytes(self, offset: int, data) -> None:
        """``data`` is a list of byte cells as held in ``self.bytes``."""
        self._touch(offset, len(data))
        for i, cell in enumerate(data):
            self.bytes[offset + i] = cell

    def cells(self, offset: int, length: int) -> list:
        self._touch(offset, length)
        return [self.bytes.get(offset + i, 0) for i in range(length)]

    def load_word(self, offset, symbols: SymbolTable):
        if not isinstance(offset, int):
            key = norm(offset).sexpr()
            if key in self.symbolic:
                return self.symbolic[key]
            return symbols.opaque("mem", offset)
        return cells_to_word(self.cells(offset, 32))


def _cell_bv(cell) -> z3.BitVecRef:
    if isinstance(cell, int):
        return z3.BitVecVal(cell, 8)
    word, i = cell
    hi = WORD_BITS - 1 - 8 * i
    return z3.Extract(hi, hi - 7, bv(word))


def cells_to_bv(cells: list) -> z3.BitVecRef:
    parts = [_cell_bv(c) for c in cells]
    return parts[0] if len(parts) == 1 else z3.Concat(*parts)


def cells_to_word(cells: list):
    if all(isinstance(c, int) for c in cells):
        return int.from_bytes(bytes(cells), "big")
    first = cells[0]
    if not isinstance(first, int) and all(
        not isinstance(c, int) and c[0] is first[0] and c[1] == i for i, c in enumerate(cells)
    ):
        return first[0]
    return norm(cells_to_bv(cells))


def word_cells(value) -> list:
    if isinstance(value, int):
        return list(int(value & MASK).to_bytes(32, "big"))
    return [(value, i) for i in range(32)]


@dataclass
class MachineState:
    pc: int
    env: ExecutionEnvironment
    stack: list = field(default_factory=list)
    memory: Memory = field(default_factory=Memory)
    # path-local storage writes: canonical key -> (key, value)
    storage: dict = field(default_factory=dict)
    gas_used: int = 0
    path_conditions: list = field(default_factory=list)

    trace: list = field(default_factory=list)
    trace_feasibility: list = field(default_factory=list)
    back_edges: dict = field(default_factory=dict)
    depth: int = 0
    feasibility: Feasibility = Feasibility.FEASIBLE
    calls: list = field(default_factory=list)
    writes: list = field(default_factory=list)
    reads: list = field(default_factory=list)
    arithmetic: list = field(default_factory=list)
    truncations: list = field(default_factory=list)
    # ast id -> pc of MUL/ADD results that are symbolic
    arith_results: dict = field(default_factory=dict)
    calldata_offsets: set = field(default_factory=set)
    returndata_size: Any = 0

    def copy(self) -> "MachineState":
        return MachineState(
            pc=self.pc,
            env=self.env,
            stack=list(self.stack),
            memory=self.memory.copy(),
            storage=dict(self.storage),
            gas_used=self.gas_used,
            path_conditions=list(self.path_conditions),
            trace=list(self.trace),
            trace_feasibility=list(self.trace_feasibility),
            back_edges=dict(self.back_edges),
            depth=self.depth,
            feasibility=self.feasibility,
            calls=list(self.calls),
            writes=list(self.writes),
            reads=list(self.reads),
            arithmetic=list(self.arithmetic),
            truncations=list(self.truncations),
            arith_results=dict(self.arith_results),
            calldata_offsets=set(self.calldata_offsets),
            returndata_size=self.returndata_size,
        )

    def push(self, value) -> None:
        if len(self.stack) >= STACK_LIMIT:
            raise StackError("stack overflow")
        self.stack.append(value)

    def pop(self):
        if not self.stack:
            raise StackError("stack underflow")
        return self.stack.pop()

    def popn(self, n: int) -> list:
        if len(self.stack) < n:
            raise StackError("stack underflow")
        out = self.stack[-n:][::-1]
        del self.stack[-n:]
        return out


def storage_key(key) -> tuple:
    if isinstance(key, int):
        return ("c", int(key))
    return ("s", key.sexpr())
