"""EVM opcode table (Constantinople revision, the newest one solc 0.4.25 targets).

Each entry maps a byte value to ``(mnemonic, stack inputs, stack outputs, gas)``.
Gas figures are the static base costs; dynamic components (memory expansion,
cold access, refunds) are not modelled because gas only bounds exploration.
"""

from __future__ import annotations

from typing import NamedTuple


class OpInfo(NamedTuple):
    name: str
    pops: int
    pushes: int
    gas: int


OPCODES: dict[int, OpInfo] = {
    0x00: OpInfo("STOP", 0, 0, 0),
    0x01: OpInfo("ADD", 2, 1, 3),
    0x02: OpInfo("MUL", 2, 1, 5),
    0x03: OpInfo("SUB", 2, 1, 3),
    0x04: OpInfo("DIV", 2, 1, 5),
    0x05: OpInfo("SDIV", 2, 1, 5),
    0x06: OpInfo("MOD", 2, 1, 5),
    0x07: OpInfo("SMOD", 2, 1, 5),
    0x08: OpInfo("ADDMOD", 3, 1, 8),
    0x09: OpInfo("MULMOD", 3, 1, 8),
    0x0A: OpInfo("EXP", 2, 1, 10),
    0x0B: OpInfo("SIGNEXTEND", 2, 1, 5),
    0x10: OpInfo("LT", 2, 1, 3),
    0x11: OpInfo("GT", 2, 1, 3),
    0x12: OpInfo("SLT", 2, 1, 3),
    0x13: OpInfo("SGT", 2, 1, 3),
    0x14: OpInfo("EQ", 2, 1, 3),
    0x15: OpInfo("ISZERO", 1, 1, 3),
    0x16: OpInfo("AND", 2, 1, 3),
    0x17: OpInfo("OR", 2, 1, 3),
    0x18: OpInfo("XOR", 2, 1, 3),
    0x19: OpInfo("NOT", 1, 1, 3),
    0x1A: OpInfo("BYTE", 2, 1, 3),
    0x1B: OpInfo("SHL", 2, 1, 3),
    0x1C: OpInfo("SHR", 2, 1, 3),
    0x1D: OpInfo("SAR", 2, 1, 3),
    0x20: OpInfo("SHA3", 2, 1, 30),
    0x30: OpInfo("ADDRESS", 0, 1, 2),
    0x31: OpInfo("BALANCE", 1, 1, 400),
    0x32: OpInfo("ORIGIN", 0, 1, 2),
    0x33: OpInfo("CALLER", 0, 1, 2),
    0x34: OpInfo("CALLVALUE", 0, 1, 2),
    0x35: OpInfo("CALLDATALOAD", 1, 1, 3),
    0x36: OpInfo("CALLDATASIZE", 0, 1, 2),
    0x37: OpInfo("CALLDATACOPY", 3, 0, 3),
    0x38: OpInfo("CODESIZE", 0, 1, 2),
    0x39: OpInfo("CODECOPY", 3, 0, 3),
    0x3A: OpInfo("GASPRICE", 0, 1, 2),
    0x3B: OpInfo("EXTCODESIZE", 1, 1, 700),
    0x3C: OpInfo("EXTCODECOPY", 4, 0, 700),
    0x3D: OpInfo("RETURNDATASIZE", 0, 1, 2),
    0x3E: OpInfo("RETURNDATACOPY", 3, 0, 3),
    0x3F: OpInfo("EXTCODEHASH", 1, 1, 400),
    0x40: OpInfo("BLOCKHASH", 1, 1, 20),
    0x41: OpInfo("COINBASE", 0, 1, 2),
    0x42: OpInfo("TIMESTAMP", 0, 1, 2),
    0x43: OpInfo("NUMBER", 0, 1, 2),
    0x44: OpInfo("DIFFICULTY", 0, 1, 2),
    0x45: OpInfo("GASLIMIT", 0, 1, 2),
    0x50: OpInfo("POP", 1, 0, 2),
    0x51: OpInfo("MLOAD", 1, 1, 3),
    0x52: OpInfo("MSTORE", 2, 0, 3),
    0x53: OpInfo("MSTORE8", 2, 0, 3),
    0x54: OpInfo("SLOAD", 1, 1, 200),
    0x55: OpInfo("SSTORE", 2, 0, 5000),
    0x56: OpInfo("JUMP", 1, 0, 8),
    0x57: OpInfo("JUMPI", 2, 0, 10),
    0x58: OpInfo("PC", 0, 1, 2),
    0x59: OpInfo("MSIZE", 0, 1, 2),
    0x5A: OpInfo("GAS", 0, 1, 2),
    0x5B: OpInfo("JUMPDEST", 0, 0, 1),
    0xF0: OpInfo("CREATE", 3, 1, 32000),
    0xF1: OpInfo("CALL", 7, 1, 700),
    0xF2: OpInfo("CALLCODE", 7, 1, 700),
    0xF3: OpInfo("RETURN", 2, 0, 0),
    0xF4: OpInfo("DELEGATECALL", 6, 1, 700),
    0xF5: OpInfo("CREATE2", 4, 1, 32000),
    0xFA: OpInfo("STATICCALL", 6, 1, 700),
    0xFD: OpInfo("REVERT", 2, 0, 0),
    0xFE: OpInfo("INVALID", 0, 0, 0),
    0xFF: OpInfo("SELFDESTRUCT", 1, 0, 5000),
}

for _i in range(32):
    OPCODES[0x60 + _i] = OpInfo(f"PUSH{_i + 1}", 0, 1, 3)
for _i in range(16):
    OPCODES[0x80 + _i] = OpInfo(f"DUP{_i + 1}", _i + 1, _i + 2, 3)
    OPCODES[0x90 + _i] = OpInfo(f"SWAP{_i + 1}", _i + 2, _i + 2, 3)
for _i in range(5):
    OPCODES[0xA0 + _i] = OpInfo(f"LOG{_i}", _i + 2, 0, 375 * (_i + 1))
del _i

INVALID_INFO = OpInfo("INVALID", 0, 0, 0)

BY_NAME: dict[str, int] = {info.name: code for code, info in OPCODES.items()}

JUMPDEST = 0x5B
PUSH1 = 0x60
PUSH32 = 0x7F

HALTING = frozenset({"STOP", "RETURN", "REVERT", "SELFDESTRUCT", "INVALID"})
JUMPS = frozenset({"JUMP", "JUMPI"})


def info(opcode: int) -> OpInfo:
    return OPCODES.get(opcode, INVALID_INFO)


def push_width(opcode: int) -> int:
    if PUSH1 <= opcode <= PUSH32:
        return opcode - PUSH1 + 1
    return 0
