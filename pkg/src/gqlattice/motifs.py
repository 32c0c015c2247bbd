"""Motif expansion: paths, loops, cliques, and non-isomorphic rooted trees.

A motif expands into one or more concrete fragments (local node indices plus
edges). Paths, loops, and cliques have exactly one fragment per node count;
trees have one fragment per non-isomorphic rooted shape admitted by the
width/depth bounds.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

from .model import MOTIF_MIN_NODES, MotifKind

TREE_NODE_CAP = 8

# A rooted tree shape is a nested tuple of child shapes, children ordered by
# their canonical encoding so every shape has exactly one representation.
TreeShape = tuple


class MotifParamError(ValueError):
    pass


@dataclass(frozen=True)
class MotifFragment:
    kind: MotifKind
    node_count: int
    edges: tuple[tuple[int, int], ...]  # local (source, target) index pairs
    representative: int  # attachment node for non-path motifs
    head: int | None = None  # paths only
    tail: int | None = None
    shape_index: int | None = None  # trees: index into rooted_tree_shapes(n)


def encode_shape(shape: TreeShape) -> str:
    """Canonical string encoding; equal iff the rooted trees are isomorphic."""
    return "(" + "".join(sorted(encode_shape(c) for c in shape)) + ")"


def shape_size(shape: TreeShape) -> int:
    return 1 + sum(shape_size(c) for c in shape)


def shape_depth(shape: TreeShape) -> int:
    """Longest root-to-leaf distance in edges."""
    return 1 + max((shape_depth(c) for c in shape), default=-1)


def shape_width(shape: TreeShape) -> int:
    """Maximum number of nodes on any single level."""
    level = [shape]
    widest = 1
    while level:
        nxt = [c for s in level for c in s]
        if nxt:
            widest = max(widest, len(nxt))
        level = nxt
    return widest


@functools.lru_cache(maxsize=None)
def rooted_tree_shapes(n: int) -> tuple[TreeShape, ...]:
    """All non-isomorphic rooted trees on n nodes, sorted by canonical encoding.

    Generated canonically (children as non-increasing multisets over smaller
    shapes), so no dedup pass is needed; counts follow 1, 1, 2, 4, 9, 20, ...
    """
    if n < 1:
        return ()
    if n == 1:
        return ((),)
    # Order all smaller shapes so child multisets can be forced non-increasing.
    items: list[tuple[int, int]] = []  # (size, index within rooted_tree_shapes(size))
    for size in range(1, n):
        items.extend((size, i) for i in range(len(rooted_tree_shapes(size))))

    def forests(budget: int, max_item: int) -> list[tuple[int, ...]]:
        # Non-increasing item-index sequences whose sizes sum to budget.
        if budget == 0:
            return [()]
        out = []
        for idx in range(max_item, -1, -1):
            size, _ = items[idx]
            if size > budget:
                continue
            for rest in forests(budget - size, idx):
                out.append((idx,) + rest)
        return out

    shapes = []
    for forest in forests(n - 1, len(items) - 1):
        children = tuple(rooted_tree_shapes(items[i][0])[items[i][1]] for i in forest)
        shapes.append(tuple(sorted(children, key=encode_shape)))
    return tuple(sorted(shapes, key=encode_shape))


def shape_edges(shape: TreeShape) -> tuple[tuple[int, int], ...]:
    """Parent -> child edges under pre-order local indexing (root = 0)."""
    edges: list[tuple[int, int]] = []
    counter = [0]

    def walk(s: TreeShape, my_index: int):
        for child in s:
            counter[0] += 1
            edges.append((my_index, counter[0]))
            walk(child, counter[0])

    walk(shape, 0)
    return tuple(edges)


def expand_motif(
    kind: MotifKind, params: dict[str, int], directed: bool
) -> list[MotifFragment]:
    """Expand a motif configuration assignment into concrete fragments.

    params carries "nodes" and, for trees, optional "width"/"depth" maxima.
    Directed mode orients path/loop edges consistently, emits both orientations
    of every clique pair, and points tree edges parent to child.
    """
    n = params["nodes"]
    minimum = MOTIF_MIN_NODES[kind]
    if n < minimum:
        raise MotifParamError(f"{kind.value} requires at least {minimum} nodes, got {n}")

    if kind is MotifKind.PATH:
        edges = tuple((i, i + 1) for i in range(n - 1))
        return [MotifFragment(kind, n, edges, representative=0, head=0, tail=n - 1)]

    if kind is MotifKind.LOOP:
        edges = tuple((i, (i + 1) % n) for i in range(n))
        return [MotifFragment(kind, n, edges, representative=0)]

    if kind is MotifKind.CLIQUE:
        edges: list[tuple[int, int]] = []
        for i in range(n):
            for j in range(i + 1, n):
                edges.append((i, j))
                if directed:
                    edges.append((j, i))
        return [MotifFragment(kind, n, tuple(edges), representative=0)]

    if kind is MotifKind.TREE:
        if n > TREE_NODE_CAP:
            raise MotifParamError(f"tree enumeration is capped at {TREE_NODE_CAP} nodes, got {n}")
        max_width = params.get("width")
        max_depth = params.get("depth")
        out = []
        for idx, shape in enumerate(rooted_tree_shapes(n)):
            if max_width is not None and shape_width(shape) > max_width:
                continue
            if max_depth is not None and shape_depth(shape) > max_depth:
                continue
            out.append(MotifFragment(kind, n, shape_edges(shape), representative=0, shape_index=idx))
        return out

    raise MotifParamError(f"unknown motif kind {kind!r}")
