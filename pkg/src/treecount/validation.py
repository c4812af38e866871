"""Input coercion for the estimator API."""

import numbers
import os

import numpy as np
import scipy.sparse as sp

from .graph import Graph, load_edge_list
from .template import TemplateTree, parse_template


def check_graph(X):
    """Coerce ``X`` to a :class:`Graph`.

    Accepts a Graph, a square scipy sparse / dense adjacency matrix (nonzero
    pattern, symmetrised), an ``(m, 2)`` integer edge array, or an edge-list path.
    """
    if isinstance(X, Graph):
        return X
    if isinstance(X, (str, os.PathLike)):
        return load_edge_list(X)[0]
    if sp.issparse(X):
        if X.shape[0] != X.shape[1]:
            raise ValueError(f"adjacency matrix must be square, got shape {X.shape}")
        coo = sp.coo_matrix(X)
        nz = coo.data != 0
        return Graph.from_edges(X.shape[0], coo.row[nz], coo.col[nz])
    arr = np.asarray(X)
    if arr.ndim == 2 and arr.shape[1] == 2 and arr.shape[0] != 2:
        return _from_edge_array(arr)
    if arr.ndim == 2 and arr.shape[0] == arr.shape[1]:
        rows, cols = np.nonzero(arr)
        return Graph.from_edges(arr.shape[0], rows, cols)
    if arr.ndim == 2 and arr.shape[1] == 2:
        return _from_edge_array(arr)
    raise ValueError(f"cannot interpret object of shape {arr.shape} as a graph")


def _from_edge_array(arr):
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        raise ValueError("edge array must hold integer vertex ids")
    if arr.size and arr.min() < 0:
        raise ValueError("vertex ids must be nonnegative")
    n = int(arr.max()) + 1 if arr.size else 0
    return Graph.from_edges(n, arr[:, 0], arr[:, 1])


def check_template(T):
    """Coerce ``T`` to a :class:`TemplateTree` (tree object, edge sequence, or path)."""
    if isinstance(T, TemplateTree):
        return T
    if T is None:
        raise ValueError("a template is required")
    if isinstance(T, (str, os.PathLike)):
        return parse_template(T)
    return TemplateTree.from_edges(T)


def check_count(name, value, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)
