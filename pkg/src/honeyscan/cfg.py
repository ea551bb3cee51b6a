"""Basic-block partitioning and the control-flow graph.

Static edges cover fall-through, JUMPI not-taken, and jumps whose target is
pushed immediately before the jump. Everything else is discovered during
symbolic exploration and recorded with ``add_dynamic_edge``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .bytecode import Instruction, InstructionSeq


class Terminator(str, enum.Enum):
    JUMP = "JUMP"
    JUMPI = "JUMPI"
    STOP = "STOP"
    RETURN = "RETURN"
    REVERT = "REVERT"
    SELFDESTRUCT = "SELFDESTRUCT"
    INVALID = "INVALID"
    FALLTHROUGH = "FALLTHROUGH"


class EdgeKind(str, enum.Enum):
    FALLTHROUGH = "fallthrough"
    JUMP_TAKEN = "jump-taken"
    JUMP_NOT_TAKEN = "jump-not-taken"
    DYNAMIC = "dynamic"


class InvalidJump(Exception):
    """A resolved jump target is not a JUMPDEST. Aborts the path, not the analysis."""

    def __init__(self, source: int, target: int):
        super().__init__(f"invalid jump from block {source} to {target}")
        self.source = source
        self.target = target


_ENDERS = {t.value for t in Terminator} - {"FALLTHROUGH"}


@dataclass
class BasicBlock:
    start: int
    instructions: list[Instruction]
    terminator: Terminator

    @property
    def end(self) -> int:
        """Offset of the last instruction."""
        return self.instructions[-1].offset

    @property
    def next_offset(self) -> int:
        return self.instructions[-1].next_offset

    @property
    def offsets(self) -> list[int]:
        return [ins.offset for ins in self.instructions]

    def static_target(self) -> int | None:
        """Target pushed by the instruction right before a terminating jump."""
        if self.terminator not in (Terminator.JUMP, Terminator.JUMPI):
            return None
        if len(self.instructions) < 2 or not self.instructions[-2].is_push:
            return None
        return self.instructions[-2].push_value

    def text(self) -> str:
        return " ".join(str(ins) for ins in self.instructions)


@dataclass
class Cfg:
    blocks: dict[int, BasicBlock]
    jumpdests: frozenset[int]
    edges: set[tuple[int, int, EdgeKind]] = field(default_factory=set)
    feasible_blocks: set[int] = field(default_factory=set)
    infeasible_blocks: set[int] = field(default_factory=set)

    def successors(self, start: int) -> list[tuple[int, EdgeKind]]:
        return sorted((dst, kind) for src, dst, kind in self.edges if src == start)

    def has_edge(self, source: int, target: int) -> bool:
        return any(src == source and dst == target for src, dst, _ in self.edges)

    def add_dynamic_edge(self, source: int, target: int) -> None:
        """Record a jump resolved during exploration.

        Raises InvalidJump when ``target`` is not a valid JUMPDEST.
        """
        if target not in self.jumpdests:
            raise InvalidJump(source, target)
        if not self.has_edge(source, target):
            self.edges.add((source, target, EdgeKind.DYNAMIC))

    def to_dot(self) -> str:
        lines = ["digraph cfg {", '  node [shape=box fontname="monospace"];']
        for start in sorted(self.blocks):
            block = self.blocks[start]
            label = "\\l".join(f"{ins.offset}: {ins}" for ins in block.instructions) + "\\l"
            style = ""
            if start in self.infeasible_blocks and start not in self.feasible_blocks:
                style = " style=filled fillcolor=lightgrey"
            lines.append(f'  b{start} [label="{label}"{style}];')
        for src, dst, kind in sorted(self.edges):
            lines.append(f'  b{src} -> b{dst} [label="{kind.value}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_cfg(seq: InstructionSeq) -> Cfg:
    blocks: dict[int, BasicBlock] = {}
    current: list[Instruction] = []

    def close(term: Terminator) -> None:
        blocks[current[0].offset] = BasicBlock(current[0].offset, list(current), term)
        current.clear()

    for ins in seq:
        if ins.name == "JUMPDEST" and current:
            close(Terminator.FALLTHROUGH)
        current.append(ins)
        if ins.name in _ENDERS:
            close(Terminator(ins.name))
    if current:
        close(Terminator.FALLTHROUGH)

    cfg = Cfg(blocks, seq.jumpdests)
    for block in blocks.values():
        term = block.terminator
        if term in (Terminator.FALLTHROUGH, Terminator.JUMPI) and block.next_offset in blocks:
            kind = EdgeKind.FALLTHROUGH if term is Terminator.FALLTHROUGH else EdgeKind.JUMP_NOT_TAKEN
            cfg.edges.add((block.start, block.next_offset, kind))
        target = block.static_target()
        if target is not None and target in seq.jumpdests:
            cfg.edges.add((block.start, target, EdgeKind.JUMP_TAKEN))
    return cfg
