"""Consistency, separation, and rho-separation of indexed map families.

A family is a finite mapping from integer indices to TreeMaps, all standard
on one host tree.  A *relation* between same-level nodes x and y is an
equation f^m(x) = y with f one of the family's maps and m a direction in
{+1, -1}.  Separation asks for a listing order in which every node has at
most one relation to earlier nodes; rho-separation relaxes that to allow
several relations onto one earlier node when the rho-value of the indices
involved reaches the level.

The oracle rho is an ambient symmetric ordinal pairing on indices with zero
diagonal; it abstracts a square-sequence-derived pairing, of which only the
two axioms and inequality premises are ever consumed here.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .ordinals import ZERO, Ordinal, node_height, parse_ordinal
from .treemaps import TreeMap, is_standard
from .trees import StandardTree, is_normal, unique_dropdowns

Family = Mapping[int, TreeMap]


class RhoOracle:
    """Symmetric ordinal-valued pairing on indices with zero diagonal.

    Values come from an explicit table, falling back to a pluggable default
    for absent pairs; fallback results are memoised into the table so that a
    run's consulted values can be serialised afterwards.
    """

    def __init__(
        self,
        entries: Iterable[tuple[int, int, Ordinal]] = (),
        fallback: Callable[[int, int], Ordinal] | None = None,
        description: str = "zero",
    ):
        self.table: dict[tuple[int, int], Ordinal] = {}
        self.description = description
        self._fallback = fallback
        for i, j, v in entries:
            self.set_value(i, j, v)

    def value(self, i: int, j: int) -> Ordinal:
        if i == j:
            return ZERO
        key = (min(i, j), max(i, j))
        got = self.table.get(key)
        if got is None:
            got = self._fallback(*key) if self._fallback else ZERO
            self.table[key] = got
        return got

    def set_value(self, i: int, j: int, v: Ordinal) -> None:
        if i == j:
            if v != ZERO:
                raise ValueError("the diagonal of rho is zero")
            return
        self.table[(min(i, j), max(i, j))] = v

    def entries(self) -> list[tuple[int, int, Ordinal]]:
        return [(i, j, v) for (i, j), v in sorted(self.table.items())]

    @staticmethod
    def zero() -> "RhoOracle":
        return RhoOracle(description="zero")

    @staticmethod
    def constant(c: Ordinal) -> "RhoOracle":
        return RhoOracle(fallback=lambda i, j: c, description=f"constant {c}")

    @staticmethod
    def from_entries(entries: Iterable[tuple[int, int, Ordinal]]) -> "RhoOracle":
        return RhoOracle(entries=entries, description="table")

    @staticmethod
    def seeded(seed: int, values: Sequence[Ordinal]) -> "RhoOracle":
        """Each unordered pair draws one value from ``values``, fixed by the seed."""
        values = tuple(values)
        if not values:
            raise ValueError("value palette must be nonempty")

        def draw(i: int, j: int) -> Ordinal:
            rng = random.Random(f"{seed}:{i}:{j}")
            return values[rng.randrange(len(values))]

        return RhoOracle(fallback=draw, description=f"seeded {seed}")


ZERO_RHO = RhoOracle.zero()


def oracle_from_spec(spec: str, seed: int = 0) -> RhoOracle:
    """Build an oracle from a CLI/scenario string: zero | const:<ord> | seed:<n>:<v,...>."""
    if spec == "zero":
        return RhoOracle.zero()
    if spec.startswith("const:"):
        return RhoOracle.constant(parse_ordinal(spec[len("const:") :]))
    if spec.startswith("seed:"):
        parts = spec.split(":")
        n = int(parts[1]) if len(parts) > 1 and parts[1] else seed
        vals = (
            tuple(parse_ordinal(v) for v in parts[2].split(","))
            if len(parts) > 2 and parts[2]
            else (ZERO, parse_ordinal("1"), parse_ordinal("w"))
        )
        return RhoOracle.seeded(n, vals)
    raise ValueError(f"unknown rho specification {spec!r}")


@dataclass(frozen=True)
class RelationEdge:
    """One equation f_index^direction(source) = target within a family."""

    source: Ordinal
    target: Ordinal
    direction: int
    index: int


def relations_between(fam: Family, x: Ordinal, y: Ordinal) -> list[tuple[int, int]]:
    """All (direction, index) with f_index^direction(x) == y, sorted."""
    out = []
    for tau in sorted(fam):
        if fam[tau].get(x) == y:
            out.append((1, tau))
        if fam[tau].get_inverse(x) == y:
            out.append((-1, tau))
    return out


def level_edges(fam: Family, X: frozenset[Ordinal]) -> list[RelationEdge]:
    edges = []
    for tau in sorted(fam):
        for a, b in fam[tau]:
            if a in X and b in X and a != b:
                edges.append(RelationEdge(a, b, 1, tau))
    return edges


# -- verdicts ------------------------------------------------------------


@dataclass(frozen=True)
class WitnessOrder:
    """A listing order witnessing (rho-)separation."""

    order: tuple[Ordinal, ...]

    def __str__(self) -> str:
        return "witness-order: " + ", ".join(str(x) for x in self.order)


@dataclass(frozen=True)
class PairwiseViolation:
    """Two distinct relations between one node pair whose rho-value is too small."""

    x: Ordinal
    y: Ordinal
    first: tuple[int, int]
    second: tuple[int, int]
    required: Ordinal

    def __str__(self) -> str:
        (m0, t0), (m1, t1) = self.first, self.second
        return (
            f"pairwise-violation: {self.x} and {self.y} related by "
            f"(m={m0}, index={t0}) and (m={m1}, index={t1}), "
            f"rho below required level {self.required}"
        )


@dataclass(frozen=True)
class Loop:
    """A closed relation walk c0 .. c(p-1) with p >= 4 and injective proper prefix."""

    nodes: tuple[Ordinal, ...]

    def __str__(self) -> str:
        return "loop: " + " -> ".join(str(x) for x in self.nodes)


SeparationVerdict = WitnessOrder | PairwiseViolation | Loop


# -- tuple-level predicates ------------------------------------------------


def _triples_to_earlier(fam: Family, order: Sequence[Ordinal], i: int) -> list[tuple[int, int, int]]:
    out = []
    for j in range(i):
        for m, tau in relations_between(fam, order[i], order[j]):
            out.append((j, m, tau))
    return out


def is_separated_tuple(fam: Family, order: Sequence[Ordinal]) -> bool:
    """At most one relation from each element to the earlier part of the listing."""
    return all(len(_triples_to_earlier(fam, order, i)) <= 1 for i in range(len(order)))


def is_rho_separated_tuple(
    fam: Family, order: Sequence[Ordinal], rho: RhoOracle, alpha: Ordinal
) -> bool:
    """Distinct relations to the earlier part must share their target and have rho >= alpha."""
    for i in range(len(order)):
        triples = _triples_to_earlier(fam, order, i)
        for a in range(len(triples)):
            for b in range(a + 1, len(triples)):
                (j0, _, t0), (j1, _, t1) = triples[a], triples[b]
                if j0 != j1 or rho.value(t0, t1) < alpha:
                    return False
    return True


# -- consistency ------------------------------------------------------------


def is_consistent(
    t: StandardTree, f: TreeMap, X: Iterable[Ordinal], b: Ordinal
) -> bool:
    """Relations between the drop-downs of X to level b transfer up to X.

    X must sit on one level above b with unique drop-downs there, and f must
    be standard on the tree.  Only the upward transfer is checked; the
    downward one is automatic for standard maps.
    """
    X = frozenset(X)
    if not X:
        return True
    levels = {node_height(x) for x in X}
    if len(levels) > 1:
        raise ValueError("node set spans several levels")
    (alpha,) = levels
    if not b < alpha:
        raise ValueError("reference level must lie below the node set")
    if not unique_dropdowns(t, X, b):
        raise ValueError("node set lacks unique drop-downs to the reference level")
    if not is_standard(t, f):
        raise ValueError("map is not standard on the tree")
    for x in X:
        for y in X:
            if f.get(t.restrict(x, b)) == t.restrict(y, b) and f.get(x) != y:
                return False
    return True


# -- the decision procedure ---------------------------------------------------


class _UnionFind:
    def __init__(self):
        self.parent: dict[Ordinal, Ordinal] = {}

    def find(self, x: Ordinal) -> Ordinal:
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: Ordinal, y: Ordinal) -> None:
        self.parent[self.find(x)] = self.find(y)


def decide_rho_separation(
    fam: Family, X: Iterable[Ordinal], rho: RhoOracle, alpha: Ordinal
) -> SeparationVerdict:
    """Decide rho-separation on a one-level node set.

    Returns a WitnessOrder built by the segment construction when the set is
    rho-separated; otherwise the specific obstruction: a PairwiseViolation
    (two relations between one pair with rho below the level) or a Loop (a
    closed relation walk through at least three distinct nodes).
    """
    X = frozenset(X)
    nodes = sorted(X)
    # clause 1: all multi-relations between a fixed pair need rho >= alpha
    for idx, x in enumerate(nodes):
        for y in nodes[idx:]:
            rels = relations_between(fam, x, y)
            for a in range(len(rels)):
                for b in range(a + 1, len(rels)):
                    (m0, t0), (m1, t1) = rels[a], rels[b]
                    if rho.value(t0, t1) < alpha:
                        return PairwiseViolation(x, y, (m0, t0), (m1, t1), alpha)
    # clause 2: no loops; scan deduplicated relation edges with union-find
    adjacency: dict[Ordinal, list[Ordinal]] = {x: [] for x in nodes}
    seen_pairs: set[tuple[Ordinal, Ordinal]] = set()
    uf = _UnionFind()
    edges = sorted(
        {(min(e.source, e.target), max(e.source, e.target)) for e in level_edges(fam, X)}
    )
    for x, y in edges:
        if (x, y) in seen_pairs:
            continue
        seen_pairs.add((x, y))
        if uf.find(x) == uf.find(y):
            path = _shortest_path(adjacency, x, y)
            return Loop(tuple(path) + (x,))
        uf.union(x, y)
        adjacency[x].append(y)
        adjacency[y].append(x)
    # separated: build the witness order by segments
    order: list[Ordinal] = []
    remaining = list(nodes)
    while remaining:
        segment = [remaining.pop(0)]
        grew = True
        while grew:
            grew = False
            for cand in list(remaining):
                if any(relations_between(fam, cand, member) for member in segment):
                    segment.append(cand)
                    remaining.remove(cand)
                    grew = True
                    break
        order.extend(segment)
    witness = WitnessOrder(tuple(order))
    if not is_rho_separated_tuple(fam, witness.order, rho, alpha):
        raise RuntimeError("witness order fails its own check; decision logic is broken")
    return witness


def _shortest_path(adjacency: dict, x: Ordinal, y: Ordinal) -> list[Ordinal]:
    prev: dict[Ordinal, Ordinal] = {x: x}
    queue = [x]
    while queue:
        cur = queue.pop(0)
        if cur == y:
            break
        for nxt in adjacency[cur]:
            if nxt not in prev:
                prev[nxt] = cur
                queue.append(nxt)
    path = [y]
    while path[-1] != x:
        path.append(prev[path[-1]])
    path.reverse()
    return path


def decide_separation(fam: Family, X: Iterable[Ordinal]) -> SeparationVerdict:
    """Decide plain separation: rho-separation against the all-zero oracle.

    Below the level the zero oracle makes every pairwise demand fail, which
    is exactly the separation notion; the root level is a single node and is
    separated outright.
    """
    X = frozenset(X)
    if not X:
        return WitnessOrder(())
    levels = {node_height(x) for x in X}
    if len(levels) > 1:
        raise ValueError("node set spans several levels")
    (alpha,) = levels
    if alpha == ZERO:
        return WitnessOrder(tuple(sorted(X)))
    return decide_rho_separation(fam, X, ZERO_RHO, alpha)


# -- the one-key lifting construction ------------------------------------------


def one_key_lift(
    t: StandardTree,
    fam: Family,
    X: Iterable[Ordinal],
    alpha: Ordinal,
    beta: Ordinal,
    b: Ordinal,
) -> frozenset[Ordinal]:
    """Lift a separated level set X at alpha to a consistent set Y at beta with b in Y.

    Requires a normal tree, a separated family on X whose maps are total and
    surjective on successors along every in-X edge, and b a level-beta node
    over a member of X.  Free choices resolve to the least successor, so the
    output is deterministic.
    """
    X = frozenset(X)
    if not is_normal(t):
        raise ValueError("tree is not normal")
    heights = set(t.heights())
    if alpha not in heights or beta not in heights or not alpha < beta:
        raise ValueError("levels must be occupied with alpha below beta")
    if not X <= t.level(alpha):
        raise ValueError("node set leaves its level")
    for tau in sorted(fam):
        if not is_standard(t, fam[tau]):
            raise ValueError(f"map {tau} is not standard on the tree")
    verdict = decide_separation(fam, X)
    if not isinstance(verdict, WitnessOrder):
        raise ValueError(f"family is not separated on the node set ({verdict})")
    if node_height(b) != beta or t.restrict(b, alpha) not in X:
        raise ValueError("anchor node must sit at the target level over the node set")
    for tau in sorted(fam):
        f = fam[tau]
        for x, y in f:
            if x in X and y in X:
                if not t.successors(x) <= f.domain:
                    raise ValueError(f"map {tau} is not total on successors of {x}")
                if not t.successors(y) <= f.image:
                    raise ValueError(f"map {tau} is not surjective onto successors of {y}")

    order = verdict.order
    n = len(order)
    nbar = order.index(t.restrict(b, alpha))

    # descending relation chain from the anchor's base point
    chain: list[tuple[int, int, int]] = [(nbar, 0, 0)]  # (position, direction, index)
    while True:
        i_k = chain[-1][0]
        triples = _triples_to_earlier(fam, order, i_k)
        if not triples:
            break
        if len(triples) > 1:
            raise RuntimeError("separated order admits two relations; decision logic is broken")
        j, m, tau = triples[0]
        chain.append((j, m, tau))
    chain_values: list[Ordinal] = [b]
    for _, m, tau in chain[1:]:
        nxt = fam[tau].apply_signed(m, chain_values[-1])
        if nxt is None:
            raise RuntimeError("successor totality failed along the chain")
        chain_values.append(nxt)
    chain_pos = {entry[0]: k for k, entry in enumerate(chain)}

    lifted: list[Ordinal] = []
    for i in range(n):
        triples = _triples_to_earlier(fam, order, i)
        if not triples:
            if i in chain_pos:
                lifted.append(chain_values[chain_pos[i]])
            else:
                lifted.append(min(y for y in t.successors(order[i]) if node_height(y) == beta))
        else:
            (j, m, sigma) = triples[0]
            up = fam[sigma].apply_signed(-m, lifted[j])
            if up is None:
                raise RuntimeError("successor totality failed while lifting")
            lifted.append(up)

    Y = frozenset(lifted)
    if len(Y) != n or not unique_dropdowns(t, Y, alpha):
        raise RuntimeError("lifted set lost unique drop-downs")
    if {t.restrict(y, alpha) for y in Y} != X or b not in Y:
        raise RuntimeError("lifted set does not project back onto its base")
    for tau in sorted(fam):
        if not is_consistent(t, fam[tau], Y, alpha):
            raise RuntimeError(f"lifted set is inconsistent along map {tau}")
    return Y
