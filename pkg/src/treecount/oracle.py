"""Exhaustive backtracking counts used to check the color-coding engine."""

from collections import deque

MAX_ORACLE_VERTICES = 2000
MAX_ORACLE_TEMPLATE = 8


def _guard(g, tpl):
    if g.n > MAX_ORACLE_VERTICES:
        raise ValueError(f"brute force limited to n <= {MAX_ORACLE_VERTICES}, got {g.n}")
    if tpl.t > MAX_ORACLE_TEMPLATE:
        raise ValueError(f"brute force limited to t <= {MAX_ORACLE_TEMPLATE}, got {tpl.t}")


def _bfs_order(tpl):
    """Template vertices in BFS order from 0, with each vertex's BFS parent."""
    adj = tpl.adjacency()
    order, parent = [0], {0: None}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in parent:
                parent[w] = u
                order.append(w)
                queue.append(w)
    return order, parent


def _count(g, tpl, colors=None):
    _guard(g, tpl)
    order, parent = _bfs_order(tpl)
    nbrs = [g.neighbors(v).tolist() for v in range(g.n)]
    image = {}
    used = set()

    def extend(i, used_colors):
        if i == len(order):
            return 1
        x = order[i]
        candidates = nbrs[image[parent[x]]] if parent[x] is not None else range(g.n)
        total = 0
        for v in candidates:
            if v in used:
                continue
            cbit = 0
            if colors is not None:
                cbit = 1 << int(colors[v])
                if used_colors & cbit:
                    continue
            image[x] = v
            used.add(v)
            total += extend(i + 1, used_colors | cbit)
            used.discard(v)
        image.pop(x, None)
        return total

    return extend(0, 0)


def brute_force_embeddings(g, tpl):
    """Injective adjacency-preserving maps from the template into ``g``."""
    return _count(g, tpl)


def brute_force_colorful(g, coloring, tpl):
    """Embeddings whose image vertices all carry distinct colors."""
    if len(coloring.colors) != g.n:
        raise ValueError("coloring length does not match vertex count")
    return _count(g, tpl, coloring.colors)
