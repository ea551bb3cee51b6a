"""Decoding raw runtime bytecode into an instruction stream."""

from __future__ import annotations

import binascii
import logging
from dataclasses import dataclass, field
from pathlib import Path

from . import opcodes

log = logging.getLogger(__name__)


class BytecodeFormatError(ValueError):
    """Input text is neither valid hex nor usable as raw bytes."""


@dataclass(frozen=True)
class Instruction:
    offset: int
    opcode: int
    push_data: bytes = b""

    @property
    def name(self) -> str:
        return opcodes.info(self.opcode).name

    @property
    def size(self) -> int:
        return 1 + len(self.push_data)

    @property
    def next_offset(self) -> int:
        return self.offset + self.size

    @property
    def is_push(self) -> bool:
        return opcodes.push_width(self.opcode) > 0

    @property
    def push_value(self) -> int | None:
        if not self.is_push:
            return None
        return int.from_bytes(self.push_data, "big")

    @property
    def is_invalid(self) -> bool:
        return self.name == "INVALID"

    def __str__(self) -> str:
        if self.is_push:
            return f"{self.name} 0x{self.push_data.hex()}"
        return self.name


@dataclass
class InstructionSeq:
    instructions: list[Instruction]
    jumpdests: frozenset[int]
    warnings: list[str] = field(default_factory=list)
    # zero bytes appended to complete a truncated trailing PUSH
    padding: int = 0

    def __post_init__(self) -> None:
        self._by_offset = {ins.offset: ins for ins in self.instructions}

    def __len__(self) -> int:
        return len(self.instructions)

    def __iter__(self):
        return iter(self.instructions)

    def at(self, offset: int) -> Instruction | None:
        return self._by_offset.get(offset)

    @property
    def code_size(self) -> int:
        if not self.instructions:
            return 0
        return self.instructions[-1].next_offset - self.padding


def parse_hex(text: str) -> bytes:
    """Parse hex text with optional ``0x`` prefix, any case, surrounding whitespace."""
    cleaned = "".join(text.split())
    if cleaned[:2].lower() == "0x":
        cleaned = cleaned[2:]
    if len(cleaned) % 2:
        raise BytecodeFormatError("odd number of hex digits")
    try:
        return binascii.unhexlify(cleaned)
    except binascii.Error as exc:
        raise BytecodeFormatError(str(exc)) from exc


def load_bytecode(path: str | Path) -> bytes:
    """Read a bytecode file. Hex text is preferred; anything else is raw binary."""
    raw = Path(path).read_bytes()
    try:
        text = raw.decode("ascii")
    except UnicodeDecodeError:
        return raw
    try:
        return parse_hex(text)
    except BytecodeFormatError:
        return raw


def decode(code: bytes) -> InstructionSeq:
    """Decode every byte of ``code``. Never fails.

    A trailing PUSH whose immediate runs past the end is zero-padded to its
    declared width and a warning is recorded.
    """
    instructions: list[Instruction] = []
    warnings: list[str] = []
    padding = 0
    pc = 0
    n = len(code)
    while pc < n:
        op = code[pc]
        width = opcodes.push_width(op)
        data = code[pc + 1 : pc + 1 + width]
        if len(data) < width:
            padding = width - len(data)
            warnings.append(
                f"truncated {opcodes.info(op).name} at offset {pc}: "
                f"{len(data)} of {width} bytes present, zero-padded"
            )
            data = data + bytes(padding)
        instructions.append(Instruction(pc, op, data))
        pc += 1 + width
    for w in warnings:
        log.debug(w)
    return InstructionSeq(instructions, find_jumpdests(instructions), warnings, padding)


def find_jumpdests(seq) -> frozenset[int]:
    """Offsets of JUMPDEST instructions that are not inside push data."""
    return frozenset(ins.offset for ins in seq if ins.opcode == opcodes.JUMPDEST)


def encode(seq: InstructionSeq) -> bytes:
    out = bytearray()
    for ins in seq:
        out.append(ins.opcode)
        out += ins.push_data
    return bytes(out)


def disassemble(seq: InstructionSeq) -> str:
    return "\n".join(f"{ins.offset:6d} {ins}" for ins in seq)
