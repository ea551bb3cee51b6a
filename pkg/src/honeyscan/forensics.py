"""Post-mortem of honeypot transaction logs: who lost, who won, and how much.

Input is line-delimited JSON, one transaction per line, with the fields of
``TransactionRecord``. All amounts are integer wei.
"""

from __future__ import annotations

import enum
import json
import logging
from collections import defaultdict
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path

from rapidfuzz.distance import Levenshtein

log = logging.getLogger(__name__)

WEI_PER_ETHER = 10**18


class TxKind(str, enum.Enum):
    CREATION = "creation"
    CALL = "call"
    INTERNAL = "internal"


class Role(str, enum.Enum):
    ATTACKER = "attacker"
    VICTIM = "victim"
    NEUTRAL = "neutral"


class Status(str, enum.Enum):
    SUCCESSFUL = "successful"
    ABORTED = "aborted"
    ACTIVE = "active"


@dataclass(frozen=True)
class TransactionRecord:
    tx_id: str
    sender: str
    to: str | None
    value: int
    fee: int
    timestamp: int
    kind: TxKind
    contract: str
    # optional sidecar: the contract was selfdestructed by the end of the log
    destroyed: bool | None = None

    def __post_init__(self):
        if self.value < 0 or self.fee < 0:
            raise ValueError(f"{self.tx_id}: negative value or fee")

    @classmethod
    def from_dict(cls, d: dict) -> "TransactionRecord":
        kind = TxKind(d.get("kind", "call"))
        contract = d.get("contract") or d.get("contract_address")
        to = d.get("to")
        if kind is TxKind.CREATION and not to:
            to = contract
        return cls(
            tx_id=str(d.get("tx_id", d.get("hash", ""))),
            sender=_addr(d["from"]),
            to=_addr(to) if to else None,
            value=int(d.get("value", 0)),
            fee=int(d.get("fee", 0)),
            timestamp=int(d["timestamp"]),
            kind=kind,
            contract=_addr(contract),
            destroyed=d.get("destroyed"),
        )


def _addr(a: str) -> str:
    return a.lower()


def load_transactions(path: str | Path) -> list[TransactionRecord]:
    txs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                txs.append(TransactionRecord.from_dict(json.loads(line)))
            except (KeyError, ValueError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: bad transaction record: {exc}") from exc
    return txs


def ordered(txs) -> list[TransactionRecord]:
    return sorted(txs, key=lambda t: (t.timestamp, t.tx_id))


def by_contract(txs) -> dict[str, list[TransactionRecord]]:
    groups: dict[str, list[TransactionRecord]] = defaultdict(list)
    for t in txs:
        groups[t.contract].append(t)
    return dict(groups)


@dataclass(frozen=True)
class Flows:
    received: dict
    spent: dict

    @classmethod
    def of(cls, txs) -> "Flows":
        """Ether each address got from, and paid into, the contract (fees count as paid)."""
        received: dict = defaultdict(int)
        spent: dict = defaultdict(int)
        for t in txs:
            if t.sender == t.contract:
                if t.to and t.to != t.contract:
                    received[t.to] += t.value
                continue
            if t.to == t.contract:
                spent[t.sender] += t.value
            spent[t.sender] += t.fee
        return cls(dict(received), dict(spent))


@dataclass(frozen=True)
class ActorLabel:
    address: str
    role: Role
    basis: str


def label_actors(txs) -> list[ActorLabel]:
    txs = ordered(txs)
    if not txs:
        return []
    contract = txs[0].contract
    creator = next((t.sender for t in txs if t.kind is TxKind.CREATION), None)
    first_funder = next(
        (t.sender for t in txs if t.to == contract and t.sender != contract and t.value > 0), None
    )
    flows = Flows.of(txs)
    addresses = sorted(({t.sender for t in txs} | {t.to for t in txs if t.to}) - {contract})
    labels = []
    for a in addresses:
        got, paid = flows.received.get(a, 0), flows.spent.get(a, 0)
        if a == creator:
            labels.append(ActorLabel(a, Role.ATTACKER, "creator"))
        elif a == first_funder:
            labels.append(ActorLabel(a, Role.ATTACKER, "first-funder"))
        elif got > paid:
            labels.append(ActorLabel(a, Role.ATTACKER, "received-more-than-spent"))
        elif got < paid:
            labels.append(ActorLabel(a, Role.VICTIM, "spent-more-than-received"))
        else:
            labels.append(ActorLabel(a, Role.NEUTRAL, "balanced"))
    return labels


def contract_balance(txs) -> int:
    """Balance of the contract at the end of the log."""
    bal = 0
    for t in txs:
        if t.to == t.contract and t.sender != t.contract:
            bal += t.value
        elif t.sender == t.contract and t.to != t.contract:
            bal -= t.value
    return bal


@dataclass(frozen=True)
class HoneypotStatus:
    status: Status
    victims: int
    final_balance: int


def classify_status(txs, labels, final_balance: int | None = None) -> HoneypotStatus:
    if final_balance is None:
        final_balance = contract_balance(txs)
    victims = sum(1 for l in labels if l.role is Role.VICTIM)
    if victims:
        status = Status.SUCCESSFUL
    elif final_balance == 0:
        status = Status.ABORTED
    else:
        status = Status.ACTIVE
    return HoneypotStatus(status, victims, final_balance)


@dataclass(frozen=True)
class ProfitStat:
    profit: int
    received: int
    spent: int
    fees: int
    lifespan: int | None = None
    time_to_first_exploitation: int | None = None
    liveness: str | None = None

    @property
    def profit_ether(self) -> str:
        return format(Decimal(self.profit) / WEI_PER_ETHER, "f")


def deployment_time(txs) -> int | None:
    txs = ordered(txs)
    created = next((t.timestamp for t in txs if t.kind is TxKind.CREATION), None)
    return created if created is not None else (txs[0].timestamp if txs else None)


def abort_time(txs) -> int | None:
    """When the balance last dropped to zero for good; None if it never did."""
    bal, when = 0, None
    for t in ordered(txs):
        before = bal
        if t.to == t.contract and t.sender != t.contract:
            bal += t.value
        elif t.sender == t.contract and t.to != t.contract:
            bal -= t.value
        if bal == 0 and before != 0:
            when = t.timestamp
        elif bal != 0:
            when = None
    return when


def profitability(txs, attackers, victims=(), status: Status | None = None) -> ProfitStat:
    txs = ordered(txs)
    attackers = set(attackers)
    victims = set(victims)
    received = spent = fees = 0
    for t in txs:
        if t.sender == t.contract:
            if t.to in attackers:
                received += t.value
            continue
        if t.sender in attackers:
            fees += t.fee
            if t.to == t.contract:
                spent += t.value
    deployed = deployment_time(txs)
    first_victim = next((t.timestamp for t in txs if t.sender in victims and t.to == t.contract), None)
    ttfe = first_victim - deployed if first_victim is not None and deployed is not None else None
    lifespan = liveness = None
    if status is Status.ABORTED:
        ended = abort_time(txs)
        if ended is not None and deployed is not None:
            lifespan = ended - deployed
        flag = next((t.destroyed for t in reversed(txs) if t.destroyed is not None), None)
        if flag is not None:
            liveness = "destroyed" if flag else "zombie"
    return ProfitStat(received - (spent + fees), received, spent, fees, lifespan, ttfe, liveness)


def bytecode_similarity(a: bytes, b: bytes) -> float:
    """1 minus the normalised Levenshtein distance of Yujian and Bo over raw bytes."""
    if not a and not b:
        return 1.0
    gld = Levenshtein.distance(a, b)
    return 1.0 - (2.0 * gld) / (len(a) + len(b) + gld)


def similarity_matrix(codes: dict[str, bytes]) -> dict[str, dict[str, float]]:
    names = sorted(codes)
    out: dict[str, dict[str, float]] = {n: {} for n in names}
    for i, x in enumerate(names):
        out[x][x] = 1.0
        for y in names[i + 1 :]:
            s = bytecode_similarity(codes[x], codes[y])
            out[x][y] = out[y][x] = s
    return out


def analyze_contract(txs) -> dict:
    txs = ordered(txs)
    labels = label_actors(txs)
    status = classify_status(txs, labels)
    attackers = [l.address for l in labels if l.role is Role.ATTACKER]
    victims = [l.address for l in labels if l.role is Role.VICTIM]
    profit = profitability(txs, attackers, victims, status.status)
    return {
        "contract": txs[0].contract if txs else None,
        "labels": [{"address": l.address, "role": l.role.value, "basis": l.basis} for l in labels],
        "status": status.status.value,
        "victims": status.victims,
        "final_balance_wei": str(status.final_balance),
        "profit_wei": str(profit.profit),
        "profit_ether": profit.profit_ether,
        "received_wei": str(profit.received),
        "spent_wei": str(profit.spent),
        "fees_wei": str(profit.fees),
        "lifespan_s": profit.lifespan,
        "time_to_first_exploitation_s": profit.time_to_first_exploitation,
        "liveness": profit.liveness,
    }
