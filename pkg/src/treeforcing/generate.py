"""Seeded random condition generators.

Everything is a deterministic function of its seed: conditions are grown by
a random walk over the constructive operations, so they are valid by
construction, and the walk's choices come from one ``random.Random``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .forcing import (
    Condition,
    add_index,
    augment,
    bijectivize_level,
    extend_heights,
    fan_out_condition,
    grow_node,
    hausdorffize,
    normalize_condition,
    widen_node,
)
from .ordinals import Ordinal, node_height, parse_ordinal
from .separation import RhoOracle, WitnessOrder, decide_separation, oracle_from_spec

HEIGHT_PALETTE = tuple(
    parse_ordinal(s) for s in ("1", "2", "3", "4", "5", "w", "w+1", "w*2", "w^2")
)


@dataclass(frozen=True)
class GenBounds:
    max_heights: int = 4
    max_level_width: int = 6
    max_indices: int = 3
    max_steps: int = 10
    rho_spec: str = "zero"
    height_palette: tuple[Ordinal, ...] = HEIGHT_PALETTE


def _node_budget_ok(p: Condition, bounds: GenBounds) -> bool:
    return all(len(p.tree.level(h)) < bounds.max_level_width for h in p.tree.heights())


def random_step(
    rng: random.Random, p: Condition, rho: RhoOracle, bounds: GenBounds
) -> tuple[str, Condition] | None:
    """Apply one randomly chosen operation with randomly chosen valid arguments.

    Returns (operation name, new condition), or None when the draw was
    inapplicable under the bounds; the caller just draws again.
    """
    nodes = sorted(p.tree.nodes)
    heights = p.tree.heights()
    ops = ["add_index", "augment", "extend", "widen", "grow", "normalize", "hausdorff"]
    if len(heights) >= 2:
        ops.append("fan_out")
        ops.append("bijectivize")
    op = rng.choice(ops)

    if op == "add_index":
        if len(p.family) >= bounds.max_indices:
            return None
        s = rng.randrange(0, 4 * bounds.max_indices)
        if s in p.family:
            return None
        return "add_index", add_index(p, s)

    if op == "augment":
        if not _node_budget_ok(p, bounds):
            return None
        s = rng.choice(sorted(p.family)) if p.family else 0
        x = rng.choice(nodes)
        return "augment", augment(p, s, x, rho)

    if op == "extend":
        fresh = [h for h in bounds.height_palette if h not in heights]
        if not fresh or len(heights) >= bounds.max_heights:
            return None
        Z = set(rng.sample(fresh, rng.randint(1, min(2, len(fresh)))))
        if len(heights) + len(Z) > bounds.max_heights:
            return None
        return "extend_heights", extend_heights(p, Z, rho)

    if op == "widen":
        if not _node_budget_ok(p, bounds) or len(heights) >= bounds.max_heights:
            return None
        x = rng.choice(nodes)
        k = rng.randint(1, 3)
        return "widen_node", widen_node(p, x, k, rho)

    if op == "grow":
        if not _node_budget_ok(p, bounds):
            return None
        x = rng.choice(nodes)
        above = [h for h in heights if h > node_height(x)]
        if not above:
            return None
        return "grow_node", grow_node(p, x, rng.choice(above), rho)

    if op == "normalize":
        if not _node_budget_ok(p, bounds):
            return None
        return "normalize_condition", normalize_condition(p, rho)

    if op == "hausdorff":
        if len(heights) >= bounds.max_heights:
            return None
        return "hausdorffize", hausdorffize(p, rho)

    if op == "fan_out":
        if not _node_budget_ok(p, bounds):
            return None
        alpha = rng.choice(heights[:-1] or [None])
        if alpha is None:
            return None
        X = frozenset(rng.sample(sorted(p.tree.level(alpha)), 1))
        n = max(len(p.tree.immediate_successors(x)) for x in X) + rng.randint(0, 1)
        if n < 1:
            n = 1
        return "fan_out_condition", fan_out_condition(p, X, n, rho)

    if op == "bijectivize":
        alpha = heights[-2] if len(heights) >= 2 else None
        if alpha is None:
            return None
        level = sorted(p.tree.level(alpha))
        X = frozenset(rng.sample(level, min(len(level), rng.randint(1, 2))))
        A = frozenset(rng.sample(sorted(p.family), min(len(p.family), 2)))
        if not isinstance(decide_separation({t: p.family[t] for t in A}, X), WitnessOrder):
            return None
        size = len(X) * max(
            (len(p.tree.immediate_successors(x)) for x in X), default=1
        )
        if size * len(X) > bounds.max_level_width:
            return None
        return "bijectivize_level", bijectivize_level(p, alpha, X, A, rho)

    return None


def gen_condition(seed: int, bounds: GenBounds = GenBounds()) -> tuple[Condition, RhoOracle]:
    """A valid condition grown by a seeded random walk, with its oracle."""
    rng = random.Random(seed)
    rho = oracle_from_spec(bounds.rho_spec, seed=seed)
    p = Condition.trivial()
    steps = rng.randint(2, bounds.max_steps)
    taken = 0
    attempts = 0
    while taken < steps and attempts < 6 * bounds.max_steps:
        attempts += 1
        try:
            result = random_step(rng, p, rho, bounds)
        except ValueError:
            continue
        if result is None:
            continue
        _, p = result
        taken += 1
    return p, rho
