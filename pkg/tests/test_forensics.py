import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import corpus_code
from oracles import brute_force_labels, brute_force_profit, similarity_dp
from honeyscan import forensics as F
from honeyscan.cli import main

ETH = 10**18
C = "0xc0"


def tx(i, frm, to, value=0, fee=0, kind="call", ts=None, **extra):
    d = {"tx_id": f"t{i:02d}", "from": frm, "to": to, "value": value, "fee": fee,
         "timestamp": ts if ts is not None else 100 + i, "kind": kind, "contract": C}
    d.update(extra)
    return d


def records(rows):
    return [F.TransactionRecord.from_dict(r) for r in rows]


def roles(labels):
    return {l.address: l.role.value for l in labels}


def test_creator_and_victim():
    # the creator deploys with bait, so it is also the first funder
    rows = [tx(0, "0xa", None, value=ETH, kind="creation"), tx(1, "0xb", C, value=ETH)]
    labels = F.label_actors(records(rows))
    assert roles(labels) == {"0xa": "attacker", "0xb": "victim"}
    assert {l.address: l.basis for l in labels}["0xa"] == "creator"


def test_unfunded_creation_makes_first_sender_the_funder():
    rows = [tx(0, "0xa", None, kind="creation"), tx(1, "0xb", C, value=ETH)]
    got = {l.address: (l.role.value, l.basis) for l in F.label_actors(records(rows))}
    assert got == {"0xa": ("attacker", "creator"), "0xb": ("attacker", "first-funder")}


def test_rule_three_received_more_than_spent():
    rows = [
        tx(0, "0xa", None, value=ETH, kind="creation"),
        tx(1, "0xc1", C, value=ETH // 2),
        tx(2, C, "0xc1", value=6 * ETH // 10, kind="internal"),
    ]
    labels = F.label_actors(records(rows))
    assert roles(labels) == {"0xa": "attacker", "0xc1": "attacker"}
    assert {l.address: l.basis for l in labels}["0xc1"] == "received-more-than-spent"


def test_first_funder_who_loses_is_still_attacker():
    rows = [
        tx(0, "0xa", None, kind="creation"),
        tx(1, "0xf", C, value=ETH),
        tx(2, "0xb", C, value=ETH),
    ]
    labels = F.label_actors(records(rows))
    got = {l.address: (l.role.value, l.basis) for l in labels}
    assert got["0xf"] == ("attacker", "first-funder")
    assert got["0xb"] == ("victim", "spent-more-than-received")


FOUR = [
    tx(0, "0xa", None, value=2 * ETH, kind="creation", fee=10**15),
    tx(1, "0xb", C, value=ETH, fee=10**14),
    tx(2, "0xd", C, value=ETH // 10),
    tx(3, C, "0xd", value=ETH // 10, kind="internal"),
    tx(4, C, "0xa", value=3 * ETH, kind="internal"),
]


def test_four_address_log_with_neutral():
    labels = F.label_actors(records(FOUR))
    assert roles(labels) == brute_force_labels(FOUR)
    assert roles(labels) == {"0xa": "attacker", "0xb": "victim", "0xd": "neutral"}


def test_fees_count_as_spent():
    rows = [tx(0, "0xa", None, value=1, kind="creation"), tx(1, "0xb", C, value=0, fee=5)]
    assert roles(F.label_actors(records(rows)))["0xb"] == "victim"


def test_empty_log():
    assert F.label_actors([]) == []


@pytest.mark.parametrize(
    "victim,balance,expected",
    [(True, 0, "successful"), (True, ETH, "successful"), (False, 0, "aborted"), (False, ETH // 10, "active")],
)
def test_status_truth_table(victim, balance, expected):
    labels = [F.ActorLabel("0xa", F.Role.ATTACKER, "creator")]
    if victim:
        labels.append(F.ActorLabel("0xb", F.Role.VICTIM, "spent-more-than-received"))
    s = F.classify_status([], labels, balance)
    assert s.status.value == expected
    assert s.victims == int(victim) and s.final_balance == balance


def test_status_uses_log_balance_when_not_given():
    txs = records(FOUR)
    assert F.contract_balance(txs) == 0
    assert F.classify_status(txs, F.label_actors(txs)).status is F.Status.SUCCESSFUL


def test_profit_formula_examples():
    rows = [
        tx(0, "0xa", None, value=ETH, kind="creation", fee=ETH // 20),
        tx(1, "0xa", C, value=0, fee=ETH // 20),
        tx(2, C, "0xa", value=2 * ETH, kind="internal"),
    ]
    p = F.profitability(records(rows), ["0xa"])
    assert (p.received, p.spent, p.fees) == (2 * ETH, ETH, ETH // 10)
    assert p.profit == 9 * ETH // 10 and p.profit_ether == "0.9"


def test_profit_without_victims_is_negative_fees():
    rows = [tx(0, "0xa", None, kind="creation", fee=ETH // 20)]
    p = F.profitability(records(rows), ["0xa"])
    assert p.profit == -ETH // 20 and p.profit_ether == "-0.05"


def _ten_tx_log(rng):
    people = ["0xa", "0xb", "0xe", "0xf"]
    rows = [tx(0, "0xa", None, value=rng.randrange(ETH), fee=rng.randrange(10**16), kind="creation")]
    for i in range(1, 10):
        if rng.random() < 0.5:
            rows.append(tx(i, rng.choice(people), C, value=rng.randrange(2 * ETH), fee=rng.randrange(10**16)))
        else:
            rows.append(tx(i, C, rng.choice(people), value=rng.randrange(ETH), kind="internal"))
    return rows


@pytest.mark.parametrize("seed", range(25))
def test_ten_tx_profit_matches_summation(seed):
    rows = _ten_tx_log(random.Random(seed))
    txs = records(rows)
    labels = F.label_actors(txs)
    assert roles(labels) == brute_force_labels(rows)
    attackers = [l.address for l in labels if l.role is F.Role.ATTACKER]
    assert F.profitability(txs, attackers).profit == brute_force_profit(rows, set(attackers))


@pytest.mark.parametrize("seed", range(25))
def test_attackers_and_victims_disjoint(seed):
    labels = F.label_actors(records(_ten_tx_log(random.Random(seed))))
    addrs = [l.address for l in labels]
    assert len(addrs) == len(set(addrs))


def test_lifespan_only_for_aborted_and_liveness_sidecar():
    rows = [
        tx(0, "0xa", None, value=ETH, kind="creation", ts=1000),
        tx(1, C, "0xa", value=ETH, kind="internal", ts=1600, destroyed=True),
    ]
    out = F.analyze_contract(records(rows))
    assert out["status"] == "aborted" and out["lifespan_s"] == 600 and out["liveness"] == "destroyed"
    rows[1]["value"] = ETH // 2
    out = F.analyze_contract(records(rows))
    assert out["status"] == "active" and out["lifespan_s"] is None and out["liveness"] is None


def test_time_to_first_exploitation():
    rows = [tx(0, "0xa", None, value=ETH, kind="creation", ts=50), tx(1, "0xb", C, value=ETH, ts=80)]
    out = F.analyze_contract(records(rows))
    assert out["time_to_first_exploitation_s"] == 30


def test_negative_value_rejected():
    with pytest.raises(ValueError):
        F.TransactionRecord.from_dict(tx(0, "0xa", C, value=-1))


def test_similarity_examples():
    assert F.bytecode_similarity(b"\x60\x01", b"\x60\x01") == 1.0
    assert F.bytecode_similarity(b"", b"\x00\x01") == 0.0
    assert F.bytecode_similarity(b"", b"") == 1.0


def test_similarity_of_variant_pair_matches_dp():
    a, b = corpus_code("Gift_1_ETH"), corpus_code("Gift_1_ETH_Fixed")
    assert abs(F.bytecode_similarity(a, b) - similarity_dp(a, b)) <= 1e-12


def test_similarity_thousand_random_pairs_match_dp():
    rng = random.Random(7)
    for _ in range(1000):
        a = bytes(rng.randrange(4) for _ in range(rng.randrange(0, 40)))
        b = bytes(rng.randrange(4) for _ in range(rng.randrange(0, 40)))
        assert abs(F.bytecode_similarity(a, b) - similarity_dp(a, b)) <= 1e-12


@settings(max_examples=500, deadline=None)
@given(st.binary(max_size=48), st.binary(max_size=48))
def test_similarity_properties(a, b):
    s = F.bytecode_similarity(a, b)
    assert s == F.bytecode_similarity(b, a)
    assert 0.0 <= s <= 1.0
    assert (s == 1.0) == (a == b)


def test_similarity_matrix_symmetric():
    m = F.similarity_matrix({"x": b"\x01\x02", "y": b"\x01", "z": b""})
    assert m["x"]["y"] == m["y"]["x"] and m["z"]["z"] == 1.0


def test_forensics_cli(tmp_path, capsys):
    log = tmp_path / "tx.jsonl"
    log.write_text("\n".join(json.dumps(r) for r in FOUR) + "\n")
    codes = tmp_path / "codes"
    codes.mkdir()
    (codes / "a.hex").write_text("6001")
    (codes / "b.hex").write_text("6002")
    assert main(["forensics", str(log), "--similarity", "--bytecode-dir", str(codes)]) == 0
    doc = json.loads(capsys.readouterr().out)
    (hp,) = doc["honeypots"]
    assert hp["status"] == "successful"
    assert hp["profit_wei"] == str(3 * ETH - 2 * ETH - 10**15)
    assert doc["similarity"]["a.hex"]["b.hex"] == pytest.approx(1 - 2 / 5)


def test_forensics_cli_bad_record(tmp_path, capsys):
    log = tmp_path / "tx.jsonl"
    log.write_text('{"from": "0xa"}\n')
    assert main(["forensics", str(log)]) == 1
