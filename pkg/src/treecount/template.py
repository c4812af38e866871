"""Tree templates, their active/passive decomposition, and automorphism counts."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .graph import read_edge_pairs

MAX_TEMPLATE_SIZE = 16


class TemplateError(ValueError):
    """The template is not a valid tree of supported size."""


@dataclass(frozen=True)
class TemplateTree:
    t: int
    edges: tuple

    def __post_init__(self):
        edges = tuple(sorted((min(u, v), max(u, v)) for u, v in self.edges))
        object.__setattr__(self, "edges", edges)
        _validate_tree(self.t, edges)

    @classmethod
    def from_edges(cls, edges, t=None):
        edges = [(int(u), int(v)) for u, v in edges]
        if t is None:
            t = 1 + max((max(e) for e in edges), default=0)
        return cls(int(t), tuple(edges))

    @classmethod
    def path(cls, t):
        return cls(t, tuple((i, i + 1) for i in range(t - 1)))

    @classmethod
    def star(cls, leaves):
        return cls(leaves + 1, tuple((0, i) for i in range(1, leaves + 1)))

    @classmethod
    def binary_tree(cls, t):
        """Complete binary tree on ``t`` vertices in heap order."""
        return cls(t, tuple(((i - 1) // 2, i) for i in range(1, t)))

    def adjacency(self):
        adj = [[] for _ in range(self.t)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for lst in adj:
            lst.sort()
        return adj


def _validate_tree(t, edges):
    if t < 1:
        raise TemplateError("template needs at least one vertex")
    if t > MAX_TEMPLATE_SIZE:
        raise TemplateError(f"template has {t} vertices; at most {MAX_TEMPLATE_SIZE} supported")
    for u, v in edges:
        if not (0 <= u < t and 0 <= v < t):
            raise TemplateError(f"edge ({u}, {v}) uses an id outside 0..{t - 1}")
        if u == v:
            raise TemplateError(f"self-loop at {u}")
    if len(set(edges)) != len(edges):
        raise TemplateError("repeated edge")
    # union-find: any edge joining an existing component closes a cycle
    parent = list(range(t))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            raise TemplateError(f"edge ({u}, {v}) closes a cycle")
        parent[ru] = rv
    if len(edges) != t - 1:
        raise TemplateError("template is disconnected")


def parse_template(path):
    """Read a template edge list; an edge-free file is the single-vertex tree."""
    src, dst, declared_n, _ = read_edge_pairs(path)
    t = int(max(src.max(initial=0), dst.max(initial=0))) + 1
    if declared_n is not None:
        t = max(t, declared_n)
    return TemplateTree(t, tuple(zip(src.tolist(), dst.tolist())))


@dataclass(frozen=True)
class Subtemplate:
    vertices: frozenset
    root: int
    active: int | None = None
    passive: int | None = None
    cut_neighbor: int | None = None

    @property
    def size(self):
        return len(self.vertices)

    @property
    def is_leaf(self):
        return self.active is None


@dataclass(frozen=True)
class PartitionPlan:
    subtemplates: tuple
    top: int
    schedule: tuple

    def __len__(self):
        return len(self.subtemplates)

    def __getitem__(self, i):
        return self.subtemplates[i]

    @property
    def t(self):
        return self.subtemplates[self.top].size

    def last_use(self):
        """Schedule position at which each entry's table may be released."""
        pos = {idx: i for i, idx in enumerate(self.schedule)}
        release = {}
        for idx in self.schedule:
            sub = self.subtemplates[idx]
            if not sub.is_leaf:
                release[sub.active] = pos[idx]
                release[sub.passive] = pos[idx]
        release[self.top] = len(self.schedule) - 1
        return release

    def passive_children(self):
        return {sub.passive for sub in self.subtemplates if not sub.is_leaf}

    def describe(self):
        lines = []
        for step, idx in enumerate(self.schedule):
            sub = self.subtemplates[idx]
            verts = "{" + ",".join(map(str, sorted(sub.vertices))) + "}"
            if sub.is_leaf:
                lines.append(f"step {step}: [{idx}] leaf {verts} root={sub.root}")
            else:
                lines.append(
                    f"step {step}: [{idx}] {verts} root={sub.root} "
                    f"active=[{sub.active}] passive=[{sub.passive}] cut=({sub.root},{sub.cut_neighbor})"
                )
        return "\n".join(lines)


def _rooted_children(tpl, root=0):
    adj = tpl.adjacency()
    children = [[] for _ in range(tpl.t)]
    seen = {root}
    stack = [root]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                children[u].append(w)
                stack.append(w)
    for lst in children:
        lst.sort()
    return children


def partition_template(tpl):
    """Split ``tpl`` (rooted at vertex 0) into the bottom-up subtemplate hierarchy.

    Each composite entry cuts the edge to its highest-labelled remaining child;
    the passive side is that child's whole subtree, the active side keeps the
    root and the other children. Entries are emitted passive subtree first,
    then active, then the parent, which keeps the number of simultaneously
    live tables low.
    """
    children = _rooted_children(tpl)

    def subtree(v):
        out = {v}
        for c in children[v]:
            out |= subtree(c)
        return out

    entries = []

    def build(root, kids):
        if not kids:
            entries.append(Subtemplate(frozenset([root]), root))
            return len(entries) - 1
        cut = kids[-1]
        passive = build(cut, children[cut])
        active = build(root, kids[:-1])
        verts = entries[active].vertices | entries[passive].vertices
        entries.append(Subtemplate(verts, root, active, passive, cut))
        return len(entries) - 1

    top = build(0, children[0])
    return PartitionPlan(tuple(entries), top, tuple(range(len(entries))))


def _centroids(adj):
    t = len(adj)
    if t == 1:
        return [0]
    size = [1] * t
    parent = [-1] * t
    order = [0]
    seen = [False] * t
    seen[0] = True
    for u in order:
        for w in adj[u]:
            if not seen[w]:
                seen[w] = True
                parent[w] = u
                order.append(w)
    for u in reversed(order[1:]):
        size[parent[u]] += size[u]
    best = []
    best_weight = t
    for u in range(t):
        weight = t - size[u]
        for w in adj[u]:
            if w != parent[u]:
                weight = max(weight, size[w])
        if weight < best_weight:
            best, best_weight = [u], weight
        elif weight == best_weight:
            best.append(u)
    return best


def _rooted_code(adj, root, blocked=None):
    """Canonical AHU-style code and automorphism count of the tree hanging from ``root``."""

    def visit(u, parent):
        codes = []
        aut = 1
        for w in adj[u]:
            if w == parent or w == blocked:
                continue
            code, sub_aut = visit(w, u)
            codes.append(code)
            aut *= sub_aut
        for mult in Counter(codes).values():
            aut *= math.factorial(mult)
        codes.sort()
        return "(" + "".join(codes) + ")", aut

    return visit(root, None)


def count_automorphisms(tpl):
    """Size of the automorphism group of the unrooted tree."""
    adj = tpl.adjacency()
    centers = _centroids(adj)
    if len(centers) == 1:
        return _rooted_code(adj, centers[0])[1]
    c1, c2 = centers
    code1, aut1 = _rooted_code(adj, c1, blocked=c2)
    code2, aut2 = _rooted_code(adj, c2, blocked=c1)
    return aut1 * aut2 * (2 if code1 == code2 else 1)


def canonical_form(tpl):
    """Isomorphism-invariant string for the unrooted tree."""
    adj = tpl.adjacency()
    centers = _centroids(adj)
    if len(centers) == 1:
        return _rooted_code(adj, centers[0])[0]
    c1, c2 = centers
    codes = sorted([_rooted_code(adj, c1, blocked=c2)[0], _rooted_code(adj, c2, blocked=c1)[0]])
    return "[" + "".join(codes) + "]"
