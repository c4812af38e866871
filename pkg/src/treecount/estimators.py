"""scikit-learn compatible wrappers around the counting engine."""

import numbers

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils import check_random_state
from sklearn.utils.validation import check_is_fitted

from .colorcount import estimate
from .partitioned import distributed_count
from .template import canonical_form, count_automorphisms, partition_template
from .validation import check_count, check_graph, check_template


def _seed(random_state):
    if isinstance(random_state, numbers.Integral) and not isinstance(random_state, bool):
        if random_state < 0:
            raise ValueError("random_state must be nonnegative")
        return int(random_state)
    return int(check_random_state(random_state).randint(np.iinfo(np.int32).max))


class ColorCodingCounter(BaseEstimator):
    """Estimate how many times a tree template occurs in a graph.

    Parameters
    ----------
    template : TemplateTree, edge sequence or path
        Tree to count, at most 16 vertices.
    n_iter : int
        Number of independent colorings averaged.
    n_threads : int
        Threads per DP step; does not change the result.
    n_workers : int or None
        When set, run the sharded message-passing simulation with this many workers.
    random_state : int, RandomState or None
        Integer seeds give reproducible colorings.

    Attributes
    ----------
    estimate_ : float
        Mean occurrence estimate.
    stderr_ : float
    per_iteration_ : ndarray of shape (n_iter,)
    n_automorphisms_ : int
    exchange_stats_ : ExchangeStats or None
    """

    def __init__(self, template=None, n_iter=1, n_threads=1, n_workers=None, random_state=0):
        self.template = template
        self.n_iter = n_iter
        self.n_threads = n_threads
        self.n_workers = n_workers
        self.random_state = random_state

    def fit(self, X, y=None):
        g = check_graph(X)
        tpl = check_template(self.template)
        n_iter = check_count("n_iter", self.n_iter)
        threads = check_count("n_threads", self.n_threads)
        seed = _seed(self.random_state)
        self.template_ = tpl
        self.plan_ = partition_template(tpl)
        self.n_automorphisms_ = count_automorphisms(tpl)
        self.n_vertices_ = g.n
        if self.n_workers is None:
            est = estimate(g, tpl, n_iter, threads=threads, seed=seed)
            self.exchange_stats_ = None
        else:
            workers = check_count("n_workers", self.n_workers)
            est, self.exchange_stats_ = distributed_count(g, tpl, workers, n_iter, seed)
        self.result_ = est
        self.estimate_ = est.value
        self.stderr_ = est.stderr
        self.per_iteration_ = np.asarray(est.per_iteration)
        return self

    def count(self, X):
        return self.fit(X).estimate_


class TreeletCountTransformer(TransformerMixin, BaseEstimator):
    """Map each graph to estimated occurrence counts of several tree templates.

    ``transform`` takes a sequence of graphs and returns an array of shape
    ``(n_graphs, n_templates)``, so counts can feed a downstream pipeline.
    """

    def __init__(self, templates=(), n_iter=10, random_state=0, log=False):
        self.templates = templates
        self.n_iter = n_iter
        self.random_state = random_state
        self.log = log

    def fit(self, X=None, y=None):
        templates = [check_template(t) for t in self.templates]
        if not templates:
            raise ValueError("at least one template is required")
        check_count("n_iter", self.n_iter)
        self.templates_ = templates
        self.seed_ = _seed(self.random_state)
        self.n_features_out_ = len(templates)
        return self

    def transform(self, X):
        check_is_fitted(self, "templates_")
        graphs = [check_graph(g) for g in X]
        out = np.empty((len(graphs), len(self.templates_)), dtype=np.float64)
        for i, g in enumerate(graphs):
            for j, tpl in enumerate(self.templates_):
                out[i, j] = estimate(g, tpl, self.n_iter, seed=self.seed_).value
        return np.log1p(out) if self.log else out

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "templates_")
        return np.asarray([f"tree{t.t}_{canonical_form(t)}" for t in self.templates_], dtype=object)
