"""Partial node maps on a tree and the standard-map predicate.

A TreeMap is an immutable set of (source, target) pairs with no source
repeated; the host tree is supplied per operation.  ``classify_map`` also
accepts raw pair sets that are not functions, so the characterisations of
strict increase can be exercised on arbitrary relations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .ordinals import ZERO, Ordinal, node_height
from .trees import StandardTree, is_simple_extension

Pair = tuple[Ordinal, Ordinal]


class TreeMap:
    """A finite partial injection candidate, stored as sorted (source, target) pairs."""

    __slots__ = ("pairs", "_fwd", "_rev")

    def __init__(self, pairs: Iterable[Pair] = ()):
        items = sorted(set(pairs))
        fwd: dict[Ordinal, Ordinal] = {}
        for x, y in items:
            if x in fwd:
                raise ValueError(f"source {x} mapped twice")
            fwd[x] = y
        rev: dict[Ordinal, list[Ordinal]] = {}
        for x, y in items:
            rev.setdefault(y, []).append(x)
        self.pairs: tuple[Pair, ...] = tuple(items)
        self._fwd = fwd
        self._rev = rev

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TreeMap) and self.pairs == other.pairs

    def __hash__(self) -> int:
        return hash(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[Pair]:
        return iter(self.pairs)

    def __contains__(self, pair: Pair) -> bool:
        return self._fwd.get(pair[0]) == pair[1]

    def __repr__(self) -> str:
        inner = ", ".join(f"{x}->{y}" for x, y in self.pairs)
        return f"TreeMap({inner})"

    def get(self, x: Ordinal) -> Ordinal | None:
        return self._fwd.get(x)

    def get_inverse(self, y: Ordinal) -> Ordinal | None:
        """The unique preimage of y, or None; ambiguous only on non-injective data."""
        xs = self._rev.get(y, ())
        return xs[0] if len(xs) == 1 else None

    def apply_signed(self, m: int, x: Ordinal) -> Ordinal | None:
        """f(x) for m == 1, the preimage of x for m == -1."""
        if m == 1:
            return self.get(x)
        if m == -1:
            return self.get_inverse(x)
        raise ValueError(f"direction must be +1 or -1, got {m}")

    @property
    def domain(self) -> frozenset[Ordinal]:
        return frozenset(self._fwd)

    @property
    def image(self) -> frozenset[Ordinal]:
        return frozenset(self._rev)

    def with_pairs(self, extra: Iterable[Pair]) -> "TreeMap":
        return TreeMap(self.pairs + tuple(extra))

    def issubset(self, other: "TreeMap") -> bool:
        return set(self.pairs) <= set(other.pairs)


@dataclass(frozen=True)
class MapFlags:
    functional: bool
    strictly_increasing: bool
    injective: bool
    level_preserving: bool
    downwards_closed: bool
    fixed_point_free_off_root: bool

    @property
    def standard(self) -> bool:
        return (
            self.functional
            and self.strictly_increasing
            and self.injective
            and self.level_preserving
            and self.downwards_closed
            and self.fixed_point_free_off_root
        )


def classify_map(t: StandardTree, pairs: Iterable[Pair]) -> MapFlags:
    """Clause-by-clause flags for an arbitrary pair set over the tree's nodes.

    ``downwards_closed`` is the pairwise form: every restriction of a pair to
    an occupied lower level is again a pair.  On level-preserving strictly
    increasing functions this coincides with asking the domain to be closed
    under drop-downs.
    """
    ps = sorted(set(pairs))
    for x, y in ps:
        if x not in t.nodes or y not in t.nodes:
            raise ValueError(f"pair ({x}, {y}) leaves the tree")
    sources = [x for x, _ in ps]
    targets = [y for _, y in ps]
    functional = len(set(sources)) == len(ps)
    injective = len(set(targets)) == len(ps)
    level_preserving = all(node_height(x) == node_height(y) for x, y in ps)
    strictly_increasing = all(
        t.is_below(b0, b1)
        for a0, b0 in ps
        for a1, b1 in ps
        if t.is_below(a0, a1)
    )
    pair_set = set(ps)
    downwards_closed = True
    for x, y in ps:
        h = min(node_height(x), node_height(y))
        for b in [ZERO] + [g for g in t.heights() if g < h]:
            if (t.restrict(x, b), t.restrict(y, b)) not in pair_set:
                downwards_closed = False
    fixed_point_free = all(x == ZERO for x, y in ps if x == y)
    return MapFlags(
        functional=functional,
        strictly_increasing=strictly_increasing,
        injective=injective,
        level_preserving=level_preserving,
        downwards_closed=downwards_closed,
        fixed_point_free_off_root=fixed_point_free,
    )


def is_standard(t: StandardTree, f: TreeMap) -> bool:
    return classify_map(t, f).standard


def downward_close_map(t: StandardTree, u: StandardTree, f: TreeMap) -> TreeMap:
    """The downward closure of f in a simple extension u of its host t.

    The closure is again standard, restricts back to f on t, and at an
    inserted level relates exactly the drop-downs of related next-level nodes.
    """
    if not is_standard(t, f):
        raise ValueError("map is not standard on its host tree")
    if not is_simple_extension(t, u):
        raise ValueError("target tree is not a simple extension of the host")
    closed: set[Pair] = set()
    u_levels = [ZERO] + list(u.heights())
    for x, y in f:
        for b in u_levels:
            if b <= node_height(x):
                closed.add((u.restrict(x, b), u.restrict(y, b)))
    out = TreeMap(closed)
    if not is_standard(u, out):
        raise RuntimeError("downward closure is not standard on the extension")
    if TreeMap(p for p in out if p[0] in t.nodes) != f:
        raise RuntimeError("downward closure does not restrict back to the input")
    return out


def agreement_pairs(f: TreeMap, g: TreeMap) -> frozenset[Pair]:
    """Pairs (x, y) on which f and g both send x to y."""
    return frozenset(set(f.pairs) & set(g.pairs))


def tensor_downward_closure(t: StandardTree, S: Iterable[Pair]) -> frozenset[Pair]:
    """All same-level pairs lying componentwise below a pair of S."""
    out: set[Pair] = set()
    for a, b in S:
        if node_height(a) != node_height(b):
            raise ValueError(f"pair ({a}, {b}) is not same-level")
        for c in [ZERO] + [g for g in t.heights() if g <= node_height(a)]:
            out.add((t.restrict(a, c), t.restrict(b, c)))
    return frozenset(out)
