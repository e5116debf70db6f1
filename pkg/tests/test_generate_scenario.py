from __future__ import annotations

import json

import pytest

from treeforcing.codec import CodecError
from treeforcing.ordinals import parse_ordinal
from treeforcing.forcing import leq, validate_condition
from treeforcing.generate import GenBounds, gen_condition, random_step
from treeforcing.scenario import Scenario, parse_scenario, run_scenario
from treeforcing.separation import oracle_from_spec


def test_gen_condition_deterministic():
    a, _ = gen_condition(42)
    b, _ = gen_condition(42)
    assert a == b
    c, _ = gen_condition(43)
    assert isinstance(c.tree.nodes, frozenset)


def test_gen_condition_valid_by_construction():
    # the walk never leaves the poset: every seed yields a valid condition
    for seed in range(1000):
        p, rho = gen_condition(seed)
        assert validate_condition(p, rho) == [], seed


def test_gen_condition_tiny_bounds():
    p, _ = gen_condition(7, GenBounds(max_heights=1, max_indices=1, max_steps=3))
    assert len(p.tree.heights()) <= 1
    assert len(p.family) <= 1


def test_scenario_empty_steps():
    trace = run_scenario(Scenario())
    assert trace.ok
    assert len(trace.conditions) == 1


def test_scenario_canonical_demo():
    text = json.dumps(
        {
            "rho": {"kind": "zero"},
            "steps": [
                {"op": "add_index", "args": {"index": 5}},
                {"op": "augment", "args": {"index": 5, "node": "0"}},
                {"op": "widen_node", "args": {"node": "0", "count": 2}},
                {
                    "op": "grow_node",
                    "args": {"node": "0", "height": "w"},
                    "expect": {"normal": True},
                },
            ],
        }
    )
    trace = run_scenario(parse_scenario(text))
    assert trace.ok, trace.log
    assert len(trace.conditions) == 5
    for later, earlier in zip(trace.conditions[1:], trace.conditions):
        assert leq(later, earlier)
    assert any("containment 0,5: ok" in line for line in trace.log)


def test_scenario_matched_pair_to_amalgamation():
    text = json.dumps(
        {
            "rho": {"kind": "zero"},
            "steps": [
                {"op": "augment", "args": {"index": 0, "node": "0"}},
                {"op": "extend_heights", "args": {"heights": ["1", "w^w"]}},
                {"op": "normalize_condition"},
                {
                    "op": "build_matched_pair",
                    "args": {
                        "alpha": "w^w",
                        "beta": "w^w*2",
                        "node": "w^w",
                        "fresh_index_base": 50,
                    },
                },
                {"op": "amalgamate"},
            ],
        }
    )
    trace = run_scenario(parse_scenario(text))
    assert trace.ok, trace.log
    final = trace.conditions[-1]
    assert any(h >= parse_ordinal("w^w*2") for h in final.tree.heights())


def test_scenario_failing_step_reports():
    text = json.dumps(
        {
            "steps": [
                {"op": "augment", "args": {"index": 0, "node": "w*4"}},
            ]
        }
    )
    trace = run_scenario(parse_scenario(text))
    assert not trace.ok
    assert any("failed" in line for line in trace.log)
    assert len(trace.conditions) == 1


def test_scenario_expect_failure_flagged():
    text = json.dumps(
        {
            "steps": [
                {"op": "add_index", "args": {"index": 3}, "expect": {"index_count": 9}},
            ]
        }
    )
    trace = run_scenario(parse_scenario(text))
    assert not trace.ok


def test_scenario_rejects_unknown_rho():
    with pytest.raises(CodecError):
        parse_scenario('{"rho": {"kind": "magic"}}')


def test_scenario_table_rho():
    text = json.dumps(
        {
            "rho": {"kind": "table", "entries": [[5, 9, "w"]]},
            "steps": [{"op": "add_index", "args": {"index": 5}}],
        }
    )
    trace = run_scenario(parse_scenario(text))
    assert trace.ok


def test_random_step_yields_descending_chain():
    import random

    rng = random.Random(5)
    from treeforcing.forcing import Condition

    rho = oracle_from_spec("zero")
    p = Condition.trivial()
    bounds = GenBounds()
    for _ in range(30):
        result = random_step(rng, p, rho, bounds)
        if result is None:
            continue
        _, q = result
        assert validate_condition(q, rho) == []
        assert leq(q, p)
        p = q
