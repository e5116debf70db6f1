"""Finite level-structured trees with ordinal node labels.

A tree is a finite set of ordinals containing the root 0; every non-root
node has height >= 1 (so its label is >= w).  Only the link to the ancestor
at the previous occupied level is stored; the full strict order is derived
from those links.  All construction operations return new trees and check
their own postconditions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .ordinals import ZERO, Ordinal, is_limit, node_at, node_height


@dataclass(frozen=True)
class StandardTree:
    nodes: frozenset[Ordinal]
    parent: Mapping[Ordinal, Ordinal]

    @staticmethod
    def make(nodes: Iterable[Ordinal], parent: Mapping[Ordinal, Ordinal]) -> "StandardTree":
        return StandardTree(frozenset(nodes), dict(parent))

    @staticmethod
    def root_only() -> "StandardTree":
        return StandardTree(frozenset({ZERO}), {})

    # -- level structure -------------------------------------------------

    def heights(self) -> tuple[Ordinal, ...]:
        """Occupied nonzero heights, ascending."""
        return tuple(sorted({node_height(x) for x in self.nodes} - {ZERO}))

    def max_height(self) -> Ordinal:
        hs = self.heights()
        return hs[-1] if hs else ZERO

    def level(self, h: Ordinal) -> frozenset[Ordinal]:
        return frozenset(x for x in self.nodes if node_height(x) == h)

    def level_below(self, h: Ordinal) -> Ordinal:
        """Predecessor of h in the occupied heights plus the root level."""
        below = [g for g in self.heights() if g < h]
        return below[-1] if below else ZERO

    def level_above(self, h: Ordinal) -> Ordinal | None:
        above = [g for g in self.heights() if g > h]
        return above[0] if above else None

    # -- derived order ----------------------------------------------------

    def chain_down(self, x: Ordinal) -> list[Ordinal]:
        """x and its ancestors, from x down to the root."""
        out = [x]
        while out[-1] != ZERO:
            out.append(self.parent[out[-1]])
        return out

    def is_below(self, x: Ordinal, y: Ordinal) -> bool:
        """x strictly below y."""
        if not node_height(x) < node_height(y):
            return False
        return x in self.chain_down(y)[1:]

    def is_below_eq(self, x: Ordinal, y: Ordinal) -> bool:
        return x == y or self.is_below(x, y)

    def order_pairs(self) -> frozenset[tuple[Ordinal, Ordinal]]:
        """All pairs (x, y) with x strictly below y."""
        pairs = set()
        for y in self.nodes:
            for x in self.chain_down(y)[1:]:
                pairs.add((x, y))
        return frozenset(pairs)

    def restrict(self, x: Ordinal, b: Ordinal) -> Ordinal:
        """Drop-down: the unique ancestor of x at occupied level b <= ht(x)."""
        if x not in self.nodes:
            raise ValueError(f"node {x} not in tree")
        if b != ZERO and b not in self.heights():
            raise ValueError(f"level {b} is not occupied")
        if node_height(x) < b:
            raise ValueError(f"level {b} is above node {x}")
        cur = x
        while node_height(cur) != b:
            cur = self.parent[cur]
        return cur

    def meet(self, x: Ordinal, y: Ordinal) -> Ordinal:
        """The largest common lower bound of x and y (the root exists, so it does)."""
        hx, hy = node_height(x), node_height(y)
        h = min(hx, hy)
        a, b = self.restrict(x, h), self.restrict(y, h)
        while a != b:
            a, b = self.parent[a], self.parent[b]
        return a

    def successors(self, x: Ordinal) -> frozenset[Ordinal]:
        return frozenset(y for y in self.nodes if self.is_below(x, y))

    def immediate_successors(self, x: Ordinal) -> frozenset[Ordinal]:
        nxt = self.level_above(node_height(x))
        if nxt is None:
            return frozenset()
        return frozenset(y for y in self.level(nxt) if self.is_below(x, y))


def validate_tree(t: StandardTree) -> list[str]:
    """Check the four defining clauses on the derived order; [] means ok."""
    out = []
    if ZERO not in t.nodes:
        out.append("clause 1: the root 0 is missing")
    for x in sorted(t.nodes):
        if x != ZERO and node_height(x) == ZERO:
            out.append(f"clause 1: node {x} is nonzero with height 0")
    roots = t.nodes - set(t.parent)
    if roots - {ZERO}:
        out.append(f"clause 2: non-root nodes without a parent link: {_names(roots - {ZERO})}")
    for x, p in sorted(t.parent.items()):
        if x not in t.nodes or p not in t.nodes:
            out.append(f"clause 2: link {x} -> {p} leaves the node set")
        elif x == ZERO:
            out.append("clause 2: the root has a parent link")
    if out:
        return out
    heights = t.heights()
    for x, p in sorted(t.parent.items()):
        hx, hp = node_height(x), node_height(p)
        if not hp < hx:
            out.append(f"clause 3: parent {p} of {x} is not lower")
            continue
        expected = max([g for g in heights if g < hx], default=ZERO)
        if hp != expected:
            out.append(
                f"clause 3: parent of {x} sits at {hp}, expected the previous level {expected}"
            )
    if out:
        return out
    # ancestors at every occupied lower level; guards against parent cycles too
    for x in sorted(t.nodes):
        seen = {x}
        cur = x
        while cur != ZERO:
            cur = t.parent[cur]
            if cur in seen:
                return out + [f"clause 2: parent links cycle at {cur}"]
            seen.add(cur)
        hit = {node_height(y) for y in seen}
        want = {g for g in heights if g < node_height(x)} | {ZERO}
        if not want <= hit:
            out.append(f"clause 4: node {x} misses ancestors at {_names(want - hit)}")
    return out


def _names(items: Iterable) -> str:
    return ", ".join(str(i) for i in sorted(items))


def unique_dropdowns(t: StandardTree, X: Iterable[Ordinal], b: Ordinal) -> bool:
    """True iff the drop-down map to level b is injective on X (one-level X)."""
    X = frozenset(X)
    if len({node_height(x) for x in X}) > 1:
        raise ValueError("node set spans several levels")
    drops = {t.restrict(x, b) for x in X}
    return len(drops) == len(X)


def downward_closure(t: StandardTree, Y: Iterable[Ordinal]) -> frozenset[Ordinal]:
    out: set[Ordinal] = set()
    for y in Y:
        out.update(t.chain_down(y))
    return frozenset(out)


def is_extension(t: StandardTree, u: StandardTree) -> bool:
    """t's nodes and order are contained in u's.

    When the containment holds, the order of u restricted to t must equal
    the order of t (extensions are automatically end-extensions); a failure
    of that equality means an input was not a valid tree.
    """
    if not t.nodes <= u.nodes:
        return False
    pt, pu = t.order_pairs(), u.order_pairs()
    if not pt <= pu:
        return False
    restricted = {(x, y) for (x, y) in pu if x in t.nodes and y in t.nodes}
    if restricted != pt:
        raise RuntimeError("extension is not an end-extension; inputs are not standard trees")
    return True


def is_simple_extension(t: StandardTree, u: StandardTree) -> bool:
    """Extension adding nodes only on new levels, with unique drop-downs onto them."""
    if not is_extension(t, u):
        return False
    new_levels = set(u.heights()) - set(t.heights())
    for x in u.nodes - t.nodes:
        if node_height(x) not in new_levels:
            return False
    t_max = t.max_height()
    for a in sorted(new_levels):
        if not a < t_max:
            continue
        beta = min(g for g in t.heights() if g > a)
        if not unique_dropdowns(u, u.level(beta), a):
            return False
    return True


def _fresh_node(height: Ordinal, used: set[Ordinal]) -> Ordinal:
    k = 0
    while node_at(height, k) in used:
        k += 1
    node = node_at(height, k)
    used.add(node)
    return node


def simple_extend(t: StandardTree, B: Iterable[Ordinal]) -> StandardTree:
    """A simple extension with occupied heights exactly B (B must cover ht[t]).

    New levels are inserted one at a time.  A level above the current top
    grows a chain over a top node; an intermediate level gets one fresh node
    per node of the next existing level, injectively, so drop-downs stay unique.
    """
    B = frozenset(B)
    if ZERO in B:
        raise ValueError("0 cannot be an occupied height")
    missing = set(t.heights()) - B
    if missing:
        raise ValueError(f"height set drops occupied levels: {_names(missing)}")
    cur = t
    used = set(t.nodes)
    for a in sorted(B - set(t.heights())):
        nodes = set(cur.nodes)
        parent = dict(cur.parent)
        if a > cur.max_height():
            top = min(cur.level(cur.max_height()) if cur.heights() else {ZERO})
            z = _fresh_node(a, used)
            nodes.add(z)
            parent[z] = top
        else:
            delta = min(g for g in cur.heights() if g > a)
            beta = cur.level_below(a)
            for x in sorted(cur.level(delta)):
                z = _fresh_node(a, used)
                nodes.add(z)
                parent[z] = cur.restrict(x, beta)
                parent[x] = z
        cur = StandardTree(frozenset(nodes), parent)
    if validate_tree(cur) or not is_simple_extension(t, cur) or set(cur.heights()) != B:
        raise RuntimeError("simple_extend produced a non-simple extension")
    return cur


def is_normal(t: StandardTree) -> bool:
    """Every node has successors at every higher occupied level."""
    heights = t.heights()
    for x in t.nodes:
        above = {node_height(y) for y in t.successors(x)}
        if any(g > node_height(x) and g not in above for g in heights):
            return False
    return True


def is_hausdorff(t: StandardTree) -> bool:
    """Limit levels are determined by drop-downs to the previous occupied level."""
    for d in t.heights():
        if not is_limit(d):
            continue
        if not unique_dropdowns(t, t.level(d), t.level_below(d)):
            return False
    return True


def normalize(t: StandardTree) -> StandardTree:
    """A normal extension on the same height set, adding immediate successors."""
    heights = t.heights()
    nodes = set(t.nodes)
    parent = dict(t.parent)
    used = set(t.nodes)
    added = False
    levels = [ZERO] + list(heights)
    for lo, hi in zip(levels, levels[1:]):
        for x in sorted(n for n in nodes if node_height(n) == lo):
            has_succ = any(parent.get(y) == x for y in nodes if node_height(y) == hi)
            if not has_succ:
                z = _fresh_node(hi, used)
                nodes.add(z)
                parent[z] = x
                added = True
    if not added:
        return t
    out = StandardTree(frozenset(nodes), parent)
    if validate_tree(out) or not is_normal(out) or not is_extension(t, out):
        raise RuntimeError("normalize produced an invalid tree")
    if set(out.heights()) != set(heights):
        raise RuntimeError("normalize changed the height set")
    return out


def fan_out(t: StandardTree, X: Iterable[Ordinal], n: int) -> StandardTree:
    """Give every node of X exactly n immediate successors; new nodes only there.

    X must sit on one occupied level below the top, and no member may already
    have more than n immediate successors.
    """
    X = frozenset(X)
    if n < 1:
        raise ValueError("successor count must be positive")
    if not X:
        return t
    levels = {node_height(x) for x in X}
    if len(levels) > 1:
        raise ValueError("node set spans several levels")
    (a,) = levels
    if not X <= t.level(a):
        raise ValueError("node set leaves its level")
    if not a < t.max_height():
        raise ValueError("fan-out level must lie below the top")
    over = [x for x in sorted(X) if len(t.immediate_successors(x)) > n]
    if over:
        raise ValueError(f"nodes already exceed {n} immediate successors: {_names(over)}")
    b = t.level_above(a)
    nodes = set(t.nodes)
    parent = dict(t.parent)
    used = set(t.nodes)
    for x in sorted(X):
        for _ in range(n - len(t.immediate_successors(x))):
            z = _fresh_node(b, used)
            nodes.add(z)
            parent[z] = x
    out = StandardTree(frozenset(nodes), parent)
    if validate_tree(out) or not is_extension(t, out):
        raise RuntimeError("fan_out produced an invalid tree")
    if any(len(out.immediate_successors(x)) != n for x in X):
        raise RuntimeError("fan_out missed the successor count")
    if set(out.heights()) != set(t.heights()):
        raise RuntimeError("fan_out changed the height set")
    return out
