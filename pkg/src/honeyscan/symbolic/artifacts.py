"""What exploration hands to the cash-flow filter and the detectors."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

from ..cfg import Cfg


class PathEnd(str, enum.Enum):
    STOP = "STOP"
    RETURN = "RETURN"
    REVERT = "REVERT"
    SELFDESTRUCT = "SELFDESTRUCT"
    INVALID = "INVALID"
    INVALID_JUMP = "invalid-jump"
    LIMIT_EXCEEDED = "limit-exceeded"


# halts that roll back every effect of the transaction
ROLLBACK = frozenset({PathEnd.REVERT, PathEnd.INVALID, PathEnd.INVALID_JUMP})


class Feasibility(str, enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNKNOWN = "unknown"


class CallType(str, enum.Enum):
    CALL = "CALL"
    DELEGATECALL = "DELEGATECALL"


ETHER_TRANSFER = "ether-transfer"


@dataclass
class CallRecord:
    c_r: Any
    c_v: Any
    c_f: str | None
    c_a: list
    c_t: CallType
    c_g: Any
    pc: int
    block_offset: int
    path_conditions_snapshot: list
    # position among the calls of the same path
    order: int = 0
    path_id: int = -1
    id: int = -1
    # feasibility of the enclosing block on this path
    block_feasibility: Feasibility = Feasibility.FEASIBLE


@dataclass
class StorageWrite:
    key: Any
    value: Any
    prior: Any
    pc: int
    block_offset: int
    conditions: list
    path_id: int = -1


@dataclass
class StorageRead:
    key: Any
    value: Any
    pc: int


@dataclass
class ArithmeticRecord:
    op: str
    operands: tuple
    result: Any
    pc: int
    path_id: int = -1


@dataclass
class TruncationRecord:
    """An ``AND 0xff`` applied to a MUL/ADD result."""

    pc: int
    operand: Any
    result: Any
    source_pc: int
    path_id: int = -1


@dataclass
class ExecutionPath:
    id: int
    blocks: list[int]
    path_conditions: list
    terminator: PathEnd
    feasibility: Feasibility
    block_feasibility: list[Feasibility] = field(default_factory=list)
    reason: str = ""
    calls: list[int] = field(default_factory=list)
    writes: list[int] = field(default_factory=list)
    reads: list[StorageRead] = field(default_factory=list)
    calldata_offsets: frozenset[int] = frozenset()
    selfdestruct_target: Any = None
    # machine state when the path ended; storage is keyed by canonical key
    final_stack: list = field(default_factory=list)
    final_storage: dict = field(default_factory=dict)


@dataclass
class AnalysisArtifacts:
    cfg: Cfg
    env: Any
    assumptions: list
    paths: list[ExecutionPath] = field(default_factory=list)
    calls: list[CallRecord] = field(default_factory=list)
    storage_writes: list[StorageWrite] = field(default_factory=list)
    arithmetic_records: list[ArithmeticRecord] = field(default_factory=list)
    truncations: list[TruncationRecord] = field(default_factory=list)
    # storage symbol name -> key it stands for
    storage_symbols: dict[str, Any] = field(default_factory=dict)
    instruction_count: int = 0
    visited: set[int] = field(default_factory=set)
    complete: bool = True
    warnings: list[str] = field(default_factory=list)

    @property
    def feasible_blocks(self) -> set[int]:
        return self.cfg.feasible_blocks

    @property
    def infeasible_blocks(self) -> set[int]:
        return self.cfg.infeasible_blocks

    @property
    def coverage(self) -> float:
        if not self.instruction_count:
            return 1.0
        return len(self.visited) / self.instruction_count

    def path(self, path_id: int) -> ExecutionPath:
        return self.paths[path_id]

    def calls_on(self, path_id: int) -> list[CallRecord]:
        return [self.calls[i] for i in self.paths[path_id].calls]

    def writes_on(self, path_id: int) -> list[StorageWrite]:
        return [self.storage_writes[i] for i in self.paths[path_id].writes]
