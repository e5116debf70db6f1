"""The poset of forcing conditions and its constructive extension operations.

A condition pairs a tree with a finite indexed family of standard maps that
is rho-separated on every occupied level.  Every operation here returns a
new condition below its input in the poset order and checks its own
postconditions; a failed check raises RuntimeError because it signals a bug,
not bad input.

The order's agreement clause disregards the structural root agreement
(0, 0): any two maps defined at the root fix it, and index augmentation
necessarily passes through the root, so root agreements carry no
information about where two maps genuinely coincide.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .ordinals import (
    ZERO,
    Ordinal,
    height_split,
    is_limit,
    is_omega_fixed,
    left_subtract,
    node_at,
    node_height,
)
from .separation import (
    RhoOracle,
    WitnessOrder,
    decide_rho_separation,
    decide_separation,
    is_consistent,
    one_key_lift,
    relations_between,
)
from .treemaps import (
    TreeMap,
    agreement_pairs,
    classify_map,
    downward_close_map,
    is_standard,
    tensor_downward_closure,
)
from .trees import (
    StandardTree,
    fan_out,
    is_extension,
    is_hausdorff,
    is_normal,
    is_simple_extension,
    normalize,
    simple_extend,
    unique_dropdowns,
    validate_tree,
)

ROOT_PAIR = (ZERO, ZERO)


@dataclass(frozen=True)
class Condition:
    tree: StandardTree
    family: Mapping[int, TreeMap]

    @staticmethod
    def trivial() -> "Condition":
        """The top condition: a bare root carrying one empty map."""
        return Condition(StandardTree.root_only(), {0: TreeMap()})

    def indices(self) -> tuple[int, ...]:
        return tuple(sorted(self.family))

    def map(self, tau: int) -> TreeMap:
        return self.family[tau]


def validate_condition(p: Condition, rho: RhoOracle) -> list[str]:
    """Check the three condition clauses; [] means ok."""
    out = [f"clause 1 (tree): {line}" for line in validate_tree(p.tree)]
    if out:
        return out
    for tau in p.indices():
        try:
            flags = classify_map(p.tree, p.family[tau])
        except ValueError as exc:
            out.append(f"clause 2 (maps): map {tau}: {exc}")
            continue
        if not flags.standard:
            bad = [
                name
                for name in (
                    "functional",
                    "strictly_increasing",
                    "injective",
                    "level_preserving",
                    "downwards_closed",
                    "fixed_point_free_off_root",
                )
                if not getattr(flags, name)
            ]
            out.append(f"clause 2 (maps): map {tau} fails {', '.join(bad)}")
    if out:
        return out
    for alpha in p.tree.heights():
        verdict = decide_rho_separation(p.family, p.tree.level(alpha), rho, alpha)
        if not isinstance(verdict, WitnessOrder):
            out.append(f"clause 3 (separation): level {alpha}: {verdict}")
    return out


def leq(q: Condition, p: Condition) -> bool:
    """q extends p: tree extension, map containment, and no fresh agreements.

    The agreement clause: wherever two of p's indices agree in q outside the
    root, some node of p above the agreement already carried an agreement of
    the same two maps in p.
    """
    if not is_extension(p.tree, q.tree):
        return False
    for tau in p.indices():
        if tau not in q.family or not p.family[tau].issubset(q.family[tau]):
            return False
    taus = p.indices()
    for a in range(len(taus)):
        for b in range(a + 1, len(taus)):
            g, t = taus[a], taus[b]
            anchors = {x for x, _ in agreement_pairs(p.family[g], p.family[t])}
            for x, _ in agreement_pairs(q.family[g], q.family[t]) - {ROOT_PAIR}:
                if not any(q.tree.is_below_eq(x, z) for z in anchors):
                    return False
    return True


def _check_step(p: Condition, q: Condition, rho: RhoOracle, op: str) -> Condition:
    report = validate_condition(q, rho)
    if report:
        raise RuntimeError(f"{op} produced an invalid condition: {'; '.join(report)}")
    if not leq(q, p):
        raise RuntimeError(f"{op} produced a condition that does not extend its input")
    return q


# -- density operations -------------------------------------------------------


def extend_heights(p: Condition, Z: Iterable[Ordinal], rho: RhoOracle) -> Condition:
    """Occupy the heights of Z via a simple extension, closing every map downward."""
    Z = frozenset(Z)
    if ZERO in Z:
        raise ValueError("0 cannot be an occupied height")
    if Z <= set(p.tree.heights()):
        return p
    u = simple_extend(p.tree, Z | set(p.tree.heights()))
    fam = {tau: downward_close_map(p.tree, u, f) for tau, f in p.family.items()}
    return _check_step(p, Condition(u, fam), rho, "extend_heights")


def widen_node(p: Condition, x: Ordinal, k: int, rho: RhoOracle) -> Condition:
    """Ensure x has at least k immediate successors on an occupied next level."""
    if x not in p.tree.nodes:
        raise ValueError(f"node {x} not in tree")
    if k < 1:
        raise ValueError("successor count must be positive")
    nxt = node_height(x) + Ordinal.from_int(1)
    q = extend_heights(p, {nxt}, rho)
    if len(q.tree.immediate_successors(x)) >= k:
        return q
    u = fan_out(q.tree, {x}, k)
    return _check_step(p, Condition(u, dict(q.family)), rho, "widen_node")


def hausdorffize(p: Condition, rho: RhoOracle) -> Condition:
    """Insert a successor height just below every limit level."""
    if is_hausdorff(p.tree):
        return p
    heights = p.tree.heights()
    Z = {
        p.tree.level_below(d) + Ordinal.from_int(1)
        for d in heights
        if is_limit(d)
    }
    q = extend_heights(p, Z, rho)
    if not is_hausdorff(q.tree):
        raise RuntimeError("hausdorffize failed to separate a limit level")
    return q


def normalize_condition(p: Condition, rho: RhoOracle) -> Condition:
    """Extend the tree to a normal one on the same heights; maps unchanged."""
    u = normalize(p.tree)
    if u == p.tree:
        return p
    return _check_step(p, Condition(u, dict(p.family)), rho, "normalize_condition")


def grow_node(p: Condition, x: Ordinal, alpha: Ordinal, rho: RhoOracle) -> Condition:
    """Put some node above x at level alpha."""
    if x not in p.tree.nodes:
        raise ValueError(f"node {x} not in tree")
    if not node_height(x) < alpha:
        raise ValueError("target level must lie above the node")
    if alpha in p.tree.heights() and any(
        node_height(y) == alpha for y in p.tree.successors(x)
    ):
        return p
    q = extend_heights(p, {alpha}, rho)
    q = normalize_condition(q, rho)
    if not any(node_height(y) == alpha for y in q.tree.successors(x)):
        raise RuntimeError("grow_node left the node without a successor at the level")
    return q


def add_index(p: Condition, s: int) -> Condition:
    """Bring s into the index domain, with an empty map when new."""
    if s in p.family:
        return p
    fam = dict(p.family)
    fam[s] = TreeMap()
    return Condition(p.tree, fam)


def augment(p: Condition, s: int, x: Ordinal, rho: RhoOracle) -> Condition:
    """Put x into the domain and range of the map at s.

    Works by height induction: each missing link adds one fresh node above
    the image (or preimage) of the node's parent.
    """
    if x not in p.tree.nodes:
        raise ValueError(f"node {x} not in tree")
    q = add_index(p, s)
    for ensure_domain in (True, False):
        for step in reversed(q.tree.chain_down(x)):
            f = q.family[s]
            present = step in (f.domain if ensure_domain else f.image)
            if present:
                continue
            if step == ZERO:
                q = Condition(q.tree, {**q.family, s: f.with_pairs([ROOT_PAIR])})
                continue
            anchor = q.tree.parent[step]
            mate = f.get(anchor) if ensure_domain else f.get_inverse(anchor)
            if mate is None:
                raise RuntimeError("augmentation lost the parent link")
            used = set(q.tree.nodes)
            z = node_at(node_height(step), 0)
            k = 0
            while z in used:
                k += 1
                z = node_at(node_height(step), k)
            tree = StandardTree(
                q.tree.nodes | {z}, {**dict(q.tree.parent), z: mate}
            )
            new_pair = (step, z) if ensure_domain else (z, step)
            q = Condition(tree, {**q.family, s: f.with_pairs([new_pair])})
    return _check_step(p, q, rho, "augment")


def fan_out_condition(
    p: Condition, X: Iterable[Ordinal], n: int, rho: RhoOracle
) -> Condition:
    """Give every node of X exactly n immediate successors; maps unchanged."""
    u = fan_out(p.tree, X, n)
    if u == p.tree:
        return p
    return _check_step(p, Condition(u, dict(p.family)), rho, "fan_out_condition")


# -- making selected maps bijective over a level set ---------------------------


@dataclass(frozen=True)
class LevelBijectivization:
    """Construction record: the separated order, block size, and block partition."""

    order: tuple[Ordinal, ...]
    block_size: int
    blocks: Mapping[int, tuple[tuple[Ordinal, ...], ...]]
    edges: tuple[tuple[int, int, int], ...]  # (i, j, tau) with F(tau)(a_i) = a_j


def bijectivize_level(
    p: Condition,
    alpha: Ordinal,
    X: Iterable[Ordinal],
    A: Iterable[int],
    rho: RhoOracle,
) -> Condition:
    cond, _ = bijectivize_level_with_record(p, alpha, X, A, rho)
    return cond


def bijectivize_level_with_record(
    p: Condition,
    alpha: Ordinal,
    X: Iterable[Ordinal],
    A: Iterable[int],
    rho: RhoOracle,
) -> tuple[Condition, LevelBijectivization]:
    """Extend the maps of A to bijections between the immediate-successor
    fans of X, fanning X out so far that the transfer is total and surjective.

    The immediate successors of each listed member a_i are partitioned into
    equal blocks, one per list position; transfer along an edge a_i -> a_j
    matches blocks of equal position, keeps old successors in the diagonal
    blocks, and routes fresh sources (targets) through the blocks indexed by
    the far end, which is what keeps distinct maps from agreeing on new nodes.
    """
    t = p.tree
    X = frozenset(X)
    A = frozenset(A)
    heights = t.heights()
    if alpha not in heights or alpha == t.max_height():
        raise ValueError("level must be occupied and lie below the top")
    if not X:
        raise ValueError("node set must be nonempty")
    if not X <= t.level(alpha):
        raise ValueError("node set leaves its level")
    if not A <= set(p.family):
        raise ValueError("indices leave the family")
    restricted = {tau: p.family[tau] for tau in A}
    verdict = decide_separation(restricted, X)
    if not isinstance(verdict, WitnessOrder):
        raise ValueError(f"selected maps are not separated on the node set ({verdict})")
    order = verdict.order
    q_size = len(order)
    block = max(1, max(len(t.immediate_successors(x)) for x in X))

    grown = fan_out_condition(p, X, block * q_size, rho)
    u = grown.tree

    blocks: dict[int, tuple[tuple[Ordinal, ...], ...]] = {}
    for i, a_i in enumerate(order):
        old = sorted(t.immediate_successors(a_i))
        new = sorted(u.immediate_successors(a_i) - t.immediate_successors(a_i))
        diagonal = tuple(old + new[: block - len(old)])
        rest = new[block - len(old) :]
        row: list[tuple[Ordinal, ...]] = []
        for k in range(q_size):
            if k == i:
                row.append(diagonal)
            else:
                row.append(tuple(rest[:block]))
                rest = rest[block:]
        blocks[i] = tuple(row)

    edges: list[tuple[int, int, int]] = []
    fam = dict(grown.family)
    for tau in sorted(A):
        f = p.family[tau]
        pairs = set(f.pairs)
        for i, a_i in enumerate(order):
            a_j = f.get(a_i)
            if a_j is None or a_j not in X:
                continue
            j = order.index(a_j)
            edges.append((i, j, tau))
            taken_targets: set[Ordinal] = set()
            # old sources keep their old images, already inside both diagonals
            for x in sorted(u.immediate_successors(a_i)):
                if x in f.domain:
                    taken_targets.add(f.get(x))
            # equal-position blocks map to each other, positionally
            for k in range(q_size):
                if k in (i, j):
                    continue
                for x, y in zip(blocks[i][k], blocks[j][k]):
                    pairs.add((x, y))
                    taken_targets.add(y)
            # fresh diagonal sources land in the block indexed by the far end
            fresh_sources = [x for x in blocks[i][i] if x not in f.domain]
            for x, y in zip(fresh_sources, blocks[j][i]):
                pairs.add((x, y))
                taken_targets.add(y)
            # fresh diagonal targets draw preimages from the block indexed by
            # the far end; whatever of that block is left mops up the rest
            fresh_targets = [y for y in blocks[j][j] if y not in f.image]
            sources_left = list(blocks[i][j])
            for y, x in zip(fresh_targets, sources_left):
                pairs.add((x, y))
                taken_targets.add(y)
            sources_left = sources_left[len(fresh_targets) :]
            remaining = [
                y for y in sorted(u.immediate_successors(a_j)) if y not in taken_targets
            ]
            for x, y in zip(sources_left, remaining):
                pairs.add((x, y))
        fam[tau] = TreeMap(pairs)

    out = Condition(u, fam)
    record = LevelBijectivization(order, block, blocks, tuple(edges))
    _check_bijectivize_level(p, out, alpha, X, A, rho)
    return out, record


def _check_bijectivize_level(
    p: Condition,
    out: Condition,
    alpha: Ordinal,
    X: frozenset[Ordinal],
    A: frozenset[int],
    rho: RhoOracle,
) -> None:
    t, u = p.tree, out.tree
    fans = frozenset().union(*(u.immediate_successors(x) for x in X))
    ok = (
        not validate_condition(out, rho)
        and leq(out, p)
        and set(t.heights()) == set(u.heights())
        and set(p.family) == set(out.family)
        and (u.nodes - t.nodes) <= fans
        and all(u.immediate_successors(x) for x in X)
    )
    if not ok:
        raise RuntimeError("bijectivize_level broke a structural postcondition")
    for tau in sorted(out.family):
        old, new = p.family[tau], out.family[tau]
        fresh = set(new.pairs) - set(old.pairs)
        if any(x not in fans or y not in fans for x, y in fresh):
            raise RuntimeError("bijectivize_level wrote entries outside the fans")
    restricted = {tau: out.family[tau] for tau in A}
    if not isinstance(decide_separation(restricted, fans), WitnessOrder):
        raise RuntimeError("bijectivize_level lost separation on the fans")
    for tau in sorted(A):
        g = out.family[tau]
        for x in X:
            y = g.get(x)
            if y is None or y not in X:
                continue
            if not u.immediate_successors(x) <= g.domain:
                raise RuntimeError("bijectivize_level is not total on a fan")
            if not u.immediate_successors(y) <= g.image:
                raise RuntimeError("bijectivize_level is not surjective onto a fan")


def bijectivize_cone(
    p: Condition,
    alpha: Ordinal,
    X: Iterable[Ordinal],
    A: Iterable[int],
    rho: RhoOracle,
) -> Condition:
    """Iterate the level construction through every level above alpha."""
    X = frozenset(X)
    A = frozenset(A)
    heights = p.tree.heights()
    if alpha not in heights:
        raise ValueError("level must be occupied")
    cur, cur_set = p, X
    for level in [h for h in heights if alpha <= h < p.tree.max_height()]:
        cur = bijectivize_level(cur, level, cur_set, A, rho)
        cur_set = frozenset().union(
            *(cur.tree.immediate_successors(x) for x in cur_set)
        )
    _check_bijectivize_cone(p, cur, X, A, rho)
    return cur


def _check_bijectivize_cone(
    p: Condition, out: Condition, X: frozenset[Ordinal], A: frozenset[int], rho: RhoOracle
) -> None:
    t, u = p.tree, out.tree
    cones = frozenset().union(*(u.successors(x) for x in X)) if X else frozenset()
    ok = (
        leq(out, p)
        and set(t.heights()) == set(u.heights())
        and set(p.family) == set(out.family)
        and (u.nodes - t.nodes) <= cones
    )
    if not ok:
        raise RuntimeError("bijectivize_cone broke a structural postcondition")
    for tau in sorted(out.family):
        fresh = set(out.family[tau].pairs) - set(p.family[tau].pairs)
        if any(x not in cones or y not in cones for x, y in fresh):
            raise RuntimeError("bijectivize_cone wrote entries outside the cones")
    for tau in sorted(A):
        g = out.family[tau]
        for x in X:
            y = g.get(x)
            if y is None or y not in X:
                continue
            if not u.successors(x) <= g.domain:
                raise RuntimeError("bijectivize_cone is not total on a cone")
            if not u.successors(y) <= g.image:
                raise RuntimeError("bijectivize_cone is not surjective onto a cone")


def lift_with_support(
    p: Condition,
    alpha: Ordinal,
    X: Iterable[Ordinal],
    A: Iterable[int],
    b: Ordinal,
    rho: RhoOracle,
) -> tuple[Condition, frozenset[Ordinal]]:
    """Bijectivize the cones over X, then lift X to a consistent top-level set
    through b.  The tree must be normal: the lift picks successors freely."""
    X = frozenset(X)
    A = frozenset(A)
    top = p.tree.max_height()
    if node_height(b) != top or p.tree.restrict(b, alpha) not in X:
        raise ValueError("anchor node must sit on the top level over the node set")
    cone = bijectivize_cone(p, alpha, X, A, rho)
    fam = {tau: cone.family[tau] for tau in sorted(A)}
    Y = one_key_lift(cone.tree, fam, X, alpha, top, b)
    return cone, Y


# -- strongly-almost-disjoint containment over a descending trace ---------------


def strong_ad_containment(trace: Sequence[Condition], g: int, t: int) -> bool:
    """Agreements of two maps in the last condition stay under the first ones.

    ``trace`` must be descending in the poset order.  Taking the first
    condition carrying both indices, every non-root agreement pair of the
    two maps in the last condition must lie in the downward closure (in the
    last tree) of the agreement pairs of the first.  The root pair is
    disregarded; it is structural.
    """
    if g == t:
        raise ValueError("indices must be distinct")
    for later, earlier in zip(trace[1:], trace):
        if not leq(later, earlier):
            raise ValueError("trace is not descending")
    first = next(
        (p for p in trace if g in p.family and t in p.family),
        None,
    )
    if first is None:
        raise ValueError("indices are never co-present along the trace")
    last = trace[-1]
    if g not in last.family or t not in last.family:
        raise ValueError("indices must persist to the last condition")
    base = agreement_pairs(first.family[g], first.family[t])
    closure = tensor_downward_closure(last.tree, base)
    final = agreement_pairs(last.family[g], last.family[t]) - {ROOT_PAIR}
    return final <= closure


# -- matched pairs: two isomorphic conditions prepared for amalgamation ---------


@dataclass(frozen=True)
class MatchedPair:
    """Two isomorphic conditions agreeing below a common level.

    ``common_tree`` is the shared part below ``alpha``; ``iso_f`` matches the
    nodes of the first tree with the nodes of the second and ``iso_g`` the
    index domains, each the identity on the shared part.  ``anchor_a`` and
    ``anchor_b`` are the nodes the amalgamation will put in order.
    """

    pa: Condition
    pb: Condition
    alpha: Ordinal
    beta: Ordinal
    common_tree: StandardTree
    shared: frozenset[int]
    iso_f: Mapping[Ordinal, Ordinal]
    iso_g: Mapping[int, int]
    anchor_a: Ordinal
    anchor_b: Ordinal


def restrict_tree_below(t: StandardTree, alpha: Ordinal) -> StandardTree:
    """The downward-closed part of t strictly below level alpha."""
    nodes = frozenset(x for x in t.nodes if node_height(x) < alpha)
    parent = {x: p for x, p in t.parent.items() if x in nodes}
    return StandardTree(nodes, parent)


def validate_matched_pair(mp: MatchedPair, rho: RhoOracle) -> list[str]:
    out = []
    if not (is_omega_fixed(mp.alpha) and is_omega_fixed(mp.beta)):
        out.append("levels are not fixed under scaling by w")
    if not mp.alpha < mp.beta:
        out.append("first level must lie below the second")
    for name, cond in (("first", mp.pa), ("second", mp.pb)):
        report = validate_condition(cond, rho)
        out.extend(f"{name} condition: {line}" for line in report)
        if not is_normal(cond.tree):
            out.append(f"{name} condition: tree is not normal")
    if out:
        return out
    if mp.alpha not in mp.pa.tree.heights() or mp.beta not in mp.pb.tree.heights():
        out.append("anchor levels are not occupied")
    if validate_tree(mp.common_tree):
        out.append("common tree is not a standard tree")
    if restrict_tree_below(mp.pa.tree, mp.alpha) != mp.common_tree:
        out.append("first tree does not restrict to the common tree")
    if restrict_tree_below(mp.pb.tree, mp.beta) != mp.common_tree:
        out.append("second tree does not restrict to the common tree")
    if any(x >= mp.beta for x in mp.pa.tree.nodes):
        out.append("first tree has node labels at or above the second level")
    # node isomorphism: bijective, order-preserving, identity on the common part
    f = dict(mp.iso_f)
    if set(f) != set(mp.pa.tree.nodes) or set(f.values()) != set(mp.pb.tree.nodes):
        out.append("node matching is not a bijection between the trees")
        return out
    for x in mp.common_tree.nodes:
        if f[x] != x:
            out.append(f"node matching moves common node {x}")
    pairs_a = mp.pa.tree.order_pairs()
    pairs_b = mp.pb.tree.order_pairs()
    if {(f[x], f[y]) for x, y in pairs_a} != pairs_b:
        out.append("node matching does not carry the first order onto the second")
    if f.get(mp.anchor_a) != mp.anchor_b:
        out.append("node matching does not connect the anchors")
    if node_height(mp.anchor_a) < mp.alpha:
        out.append("first anchor sits below the matched level")
    # index matching: bijective, identity on the shared block
    gmap = dict(mp.iso_g)
    if set(gmap) != set(mp.pa.family) or set(gmap.values()) != set(mp.pb.family):
        out.append("index matching is not a bijection between the domains")
        return out
    if set(mp.pa.family) & set(mp.pb.family) != set(mp.shared):
        out.append("shared indices are not the intersection of the domains")
    if any(gmap[i] != i for i in mp.shared):
        out.append("index matching moves a shared index")
    for tau in sorted(mp.pa.family):
        moved = {(f[x], f[y]) for x, y in mp.pa.family[tau]}
        if moved != set(mp.pb.family[gmap[tau]].pairs):
            out.append(f"map {tau} is not carried onto its partner")
    # rho premises
    shared = sorted(mp.shared)
    for i in range(len(shared)):
        for j in range(i + 1, len(shared)):
            if rho.value(shared[i], shared[j]) >= mp.alpha:
                out.append(
                    f"shared indices {shared[i]}, {shared[j]} have rho at or above the level"
                )
    floor = mp.common_tree.max_height()
    petal_a = sorted(set(mp.pa.family) - mp.shared)
    petal_b = sorted(set(mp.pb.family) - mp.shared)
    for zeta in petal_a:
        for tau in petal_b:
            v = rho.value(zeta, tau)
            if v < floor:
                out.append(f"cross pair ({zeta}, {tau}) has rho below the common height")
            for gamma in shared:
                if v < min(rho.value(zeta, gamma), rho.value(tau, gamma)):
                    out.append(
                        f"cross pair ({zeta}, {tau}) undercuts its minimum through {gamma}"
                    )
    if 0 not in mp.shared:
        out.append("index 0 must be shared")
    return out


def build_matched_pair(
    p: Condition,
    alpha: Ordinal,
    beta: Ordinal,
    x: Ordinal,
    fresh_index_base: int,
    rho: RhoOracle,
) -> MatchedPair:
    """Make a matched pair out of p and a shifted isomorphic copy.

    Heights from alpha upward move to beta and beyond (delta = alpha + d
    goes to beta + d) and their nodes are relabelled level by level; node
    labels below alpha are untouched.  Shared indices are chosen greedily:
    starting from 0, an index joins while all its rho-values into the block
    stay below alpha.  The remaining indices get fresh labels.  The oracle
    is extended so the copy validates and the cross-block premises hold.
    """
    report = validate_condition(p, rho)
    if report:
        raise ValueError(f"input is not a valid condition: {'; '.join(report)}")
    if not is_normal(p.tree):
        raise ValueError("input tree is not normal")
    if alpha not in p.tree.heights():
        raise ValueError(f"level {alpha} is not occupied")
    if not (is_omega_fixed(alpha) and is_omega_fixed(beta)):
        raise ValueError("both levels must be fixed under scaling by w")
    if not alpha < beta:
        raise ValueError("levels must be ordered")
    if any(n >= beta for n in p.tree.nodes):
        raise ValueError("node labels must stay below the second level")
    if 0 not in p.family:
        raise ValueError("index 0 must be present")
    if x not in p.tree.nodes or node_height(x) < alpha:
        raise ValueError("anchor must sit at or above the matched level")

    indices = sorted(p.family)
    shared: list[int] = [0]
    for i in indices:
        if i != 0 and all(rho.value(i, j) < alpha for j in shared):
            shared.append(i)
    petal = [i for i in indices if i not in shared]
    fresh = {zeta: fresh_index_base + k for k, zeta in enumerate(petal)}
    if set(fresh.values()) & set(indices):
        raise ValueError("fresh index labels collide with the existing domain")
    iso_g = {i: i for i in shared} | fresh

    def shift_node(n: Ordinal) -> Ordinal:
        h, offset = height_split(n)
        if h < alpha:
            return n
        return node_at(beta + left_subtract(alpha, h), offset)

    iso_f = {n: shift_node(n) for n in p.tree.nodes}
    b_nodes = frozenset(iso_f.values())
    b_parent = {iso_f[c]: iso_f[par] for c, par in p.tree.parent.items()}
    b_tree = StandardTree(b_nodes, b_parent)
    b_family = {
        iso_g[tau]: TreeMap((iso_f[a], iso_f[b]) for a, b in p.family[tau])
        for tau in indices
    }
    pb = Condition(b_tree, b_family)

    # extend the oracle: first whatever the copy's own levels demand of pairs
    # involving a fresh index, then the cross-block floor
    for level in b_tree.heights():
        nodes = sorted(b_tree.level(level))
        for idx, u in enumerate(nodes):
            for v in nodes[idx:]:
                rels = relations_between(b_family, u, v)
                for a in range(len(rels)):
                    for b2 in range(a + 1, len(rels)):
                        t0, t1 = rels[a][1], rels[b2][1]
                        if t0 == t1:
                            continue
                        if rho.value(t0, t1) < level:
                            if t0 in shared and t1 in shared:
                                raise ValueError(
                                    "shared indices would need rho above the level"
                                )
                            rho.set_value(t0, t1, level)
    floor = restrict_tree_below(p.tree, alpha).max_height()
    for zeta in petal:
        for tau_fresh in fresh.values():
            need = floor
            for gamma in shared:
                lo = min(rho.value(zeta, gamma), rho.value(tau_fresh, gamma))
                need = max(need, lo)
            if rho.value(zeta, tau_fresh) < need:
                rho.set_value(zeta, tau_fresh, need)

    mp = MatchedPair(
        pa=p,
        pb=pb,
        alpha=alpha,
        beta=beta,
        common_tree=restrict_tree_below(p.tree, alpha),
        shared=frozenset(shared),
        iso_f=iso_f,
        iso_g=iso_g,
        anchor_a=x,
        anchor_b=iso_f[x],
    )
    report = validate_matched_pair(mp, rho)
    if report:
        raise ValueError(f"matched pair does not validate: {'; '.join(report)}")
    return mp


def amalgamate(mp: MatchedPair, rho: RhoOracle) -> Condition:
    """Glue a matched pair into one condition below both, ordering the anchors.

    The shared-map closure of the first anchor's base point is lifted to a
    consistent top-level support, fresh chains are laid under every unmatched
    top node of the copy, the copy is planted on top, and the two map
    families are merged: copied maps are closed downward, and on shared
    indices the closure must agree with the lifted maps where both speak.
    """
    report = validate_matched_pair(mp, rho)
    if report:
        raise ValueError(f"matched pair does not validate: {'; '.join(report)}")
    pa, pb, alpha, beta = mp.pa, mp.pb, mp.alpha, mp.beta
    iso = dict(mp.iso_f)
    iso_back = {v: k for k, v in iso.items()}
    A = sorted(mp.shared)
    top_a = pa.tree.max_height()

    # closure of the anchor's base point under the shared maps, both ways
    base = pa.tree.restrict(mp.anchor_a, alpha)
    X_a: set[Ordinal] = {base}
    grew = True
    while grew:
        grew = False
        for tau in A:
            m = pa.family[tau]
            for x in list(X_a):
                for y in (m.get(x), m.get_inverse(x)):
                    if y is not None and y not in X_a:
                        X_a.add(y)
                        grew = True
    X_b = frozenset(iso[x] for x in X_a)

    # fresh chains under every unmatched top node of the copy
    common_top = mp.common_tree.max_height()
    chain_heights = [h for h in pa.tree.heights() if h >= alpha]
    nodes = set(pa.tree.nodes)
    parent = dict(pa.tree.parent)
    used = set(pa.tree.nodes)
    chain_top: dict[Ordinal, Ordinal] = {}
    for y in sorted(pb.tree.level(beta)):
        if y in X_b:
            continue
        prev = pb.tree.restrict(y, common_top)
        for h in chain_heights:
            k = 0
            while node_at(h, k) in used:
                k += 1
            z = node_at(h, k)
            used.add(z)
            nodes.add(z)
            parent[z] = prev
            prev = z
        chain_top[y] = prev
    t_plus = StandardTree(frozenset(nodes), parent)
    p_plus = Condition(t_plus, dict(pa.family))

    # top-level support through a top node over the anchor
    z_alpha = min(
        y
        for y in pa.tree.successors(mp.anchor_a) | {mp.anchor_a}
        if node_height(y) == top_a
    )
    if alpha == top_a:
        cone = bijectivize_cone(p_plus, alpha, frozenset(X_a), frozenset(A), rho)
        X_plus = frozenset(X_a)
    else:
        cone, X_plus = lift_with_support(
            p_plus, alpha, frozenset(X_a), frozenset(A), z_alpha, rho
        )
    U = cone.tree

    # plant the copy: matched top nodes onto the support, the rest onto chains
    w_nodes = U.nodes | pb.tree.nodes
    w_parent = dict(U.parent)
    for c, par in pb.tree.parent.items():
        if node_height(c) > beta:
            w_parent[c] = par
    for y in sorted(pb.tree.level(beta)):
        if y in X_b:
            below = iso_back[y]
            w_parent[y] = next(z for z in X_plus if U.restrict(z, alpha) == below)
        else:
            w_parent[y] = chain_top[y]
    W = StandardTree(frozenset(w_nodes), w_parent)

    copied = {
        tau: downward_close_map(pb.tree, W, pb.family[tau]) for tau in sorted(pb.family)
    }
    merged: dict[int, TreeMap] = {}
    for tau in sorted(cone.family):
        if tau in copied:
            try:
                merged[tau] = TreeMap(set(cone.family[tau].pairs) | set(copied[tau].pairs))
            except ValueError as exc:
                raise RuntimeError(f"amalgamation is incoherent at index {tau}: {exc}")
        else:
            merged[tau] = cone.family[tau]
    for tau in sorted(copied):
        merged.setdefault(tau, copied[tau])
    out = Condition(W, merged)

    report = validate_condition(out, rho)
    if report:
        raise RuntimeError(f"amalgamation is not a condition: {'; '.join(report)}")
    if not leq(out, pa):
        raise RuntimeError("amalgamation does not extend the first condition")
    if not leq(out, pb):
        raise RuntimeError("amalgamation does not extend the second condition")
    if not W.is_below(mp.anchor_a, mp.anchor_b):
        raise RuntimeError("amalgamation does not order the anchors")
    return out
