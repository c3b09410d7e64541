"""Binary decision tree with entropy splits and cost-complexity pruning.

Split candidates are the midpoints of consecutive distinct sorted feature
values; the split maximizing information gain wins, with ties broken by
lowest feature index and then lowest threshold.  A node splits as long as a
valid split exists (even at zero gain, which depth-limited problems like
XOR need), so trees grow to purity unless capped.  Pruning collapses the
weakest links whose per-leaf impurity saving is at most ccp_alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..features import FeatureSet
from .base import register_model


def _entropy_bits(pos: float, total: float) -> float:
    if total == 0 or pos == 0 or pos == total:
        return 0.0
    p = pos / total
    q = (total - pos) / total
    return -(p * math.log2(p) + q * math.log2(q))


def _xlog2(p: np.ndarray) -> np.ndarray:
    out = np.zeros_like(p)
    nz = p > 0
    out[nz] = p[nz] * np.log2(p[nz])
    return out


def _entropy_counts(pos: np.ndarray, total: np.ndarray) -> np.ndarray:
    p = np.divide(pos, total, out=np.zeros_like(pos), where=total > 0)
    q = np.divide(total - pos, total, out=np.zeros_like(pos), where=total > 0)
    return -(_xlog2(p) + _xlog2(q))


@dataclass
class TreeNode:
    n_pos: int
    n_neg: int
    feature: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    @property
    def total(self) -> int:
        return self.n_pos + self.n_neg

    @property
    def positive_share(self) -> float:
        return self.n_pos / self.total

    def to_dict(self) -> dict:
        node = {"n_pos": self.n_pos, "n_neg": self.n_neg}
        if not self.is_leaf:
            node.update(
                feature=self.feature,
                threshold=self.threshold,
                left=self.left.to_dict(),
                right=self.right.to_dict(),
            )
        return node

    @classmethod
    def from_dict(cls, data: dict) -> "TreeNode":
        node = cls(n_pos=data["n_pos"], n_neg=data["n_neg"])
        if "feature" in data:
            node.feature = data["feature"]
            node.threshold = data["threshold"]
            node.left = cls.from_dict(data["left"])
            node.right = cls.from_dict(data["right"])
        return node


def best_split(X: np.ndarray, y01: np.ndarray, min_leaf: int = 1):
    """Exhaustive search over (feature, midpoint) pairs.

    Returns (gain, feature, threshold) for the best valid split or None when
    no split satisfies the min_leaf constraint.  y01 holds 0/1 labels.
    Ties break toward the lowest feature index, then the lowest threshold.
    """
    n = len(y01)
    if n < 2:
        return None
    n_pos = int(y01.sum())
    parent = _entropy_bits(n_pos, n)

    # sort every feature column at once; candidates are the boundaries
    # between distinct consecutive sorted values
    order = np.argsort(X, axis=0, kind="stable")
    values = np.take_along_axis(X, order, axis=0)
    labels = y01[order]
    boundary = values[:-1] < values[1:]

    nl = np.arange(1, n, dtype=float)[:, None]
    nr = n - nl
    valid = boundary & (nl >= min_leaf) & (nr >= min_leaf)
    if not valid.any():
        return None
    lp = np.cumsum(labels, axis=0)[:-1].astype(float)
    rp = n_pos - lp
    gains = parent - (nl / n) * _entropy_counts(lp, nl) - (nr / n) * _entropy_counts(rp, nr)
    gains[~valid] = -np.inf

    per_col = np.argmax(gains, axis=0)          # first max: lowest threshold
    col_best = gains[per_col, np.arange(X.shape[1])]
    j = int(np.argmax(col_best))                # first max: lowest feature
    if not np.isfinite(col_best[j]):
        return None
    k = int(per_col[j])
    threshold = (values[k, j] + values[k + 1, j]) / 2.0
    if threshold >= values[k + 1, j]:
        # adjacent floats: the midpoint rounded up and would leave the right
        # side empty, so cut at the left value instead
        threshold = values[k, j]
    return float(col_best[j]), j, float(threshold)


def _grow(X, y01, depth, max_depth, min_leaf) -> TreeNode:
    n_pos = int(y01.sum())
    node = TreeNode(n_pos=n_pos, n_neg=len(y01) - n_pos)
    if n_pos in (0, len(y01)):
        return node
    if max_depth is not None and depth >= max_depth:
        return node
    if len(y01) < 2 * min_leaf:
        return node
    split = best_split(X, y01, min_leaf)
    if split is None:
        return node
    _, j, threshold = split
    mask = X[:, j] <= threshold
    if mask.all() or not mask.any():
        return node
    node.feature = j
    node.threshold = threshold
    node.left = _grow(X[mask], y01[mask], depth + 1, max_depth, min_leaf)
    node.right = _grow(X[~mask], y01[~mask], depth + 1, max_depth, min_leaf)
    return node


def _subtree_cost(node: TreeNode, n_total: int) -> tuple[float, int]:
    """Total weighted leaf entropy and leaf count of a subtree."""
    if node.is_leaf:
        return node.total / n_total * _entropy_bits(node.n_pos, node.total), 1
    lc, ln = _subtree_cost(node.left, n_total)
    rc, rn = _subtree_cost(node.right, n_total)
    return lc + rc, ln + rn


def prune(root: TreeNode, ccp_alpha: float) -> TreeNode:
    """Minimal cost-complexity pruning: collapse weakest links <= alpha."""
    n_total = root.total
    while not root.is_leaf:
        weakest = None
        stack = [root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                continue
            cost, leaves = _subtree_cost(node, n_total)
            own = node.total / n_total * _entropy_bits(node.n_pos, node.total)
            g = (own - cost) / (leaves - 1)
            if weakest is None or g < weakest[0]:
                weakest = (g, node)
            stack.extend([node.right, node.left])
        if weakest is None or weakest[0] > ccp_alpha:
            break
        _, node = weakest
        node.feature = None
        node.threshold = None
        node.left = None
        node.right = None
    return root


@register_model("dt")
@dataclass
class DecisionTreeModel:
    schema: str
    n_terms: int
    root: TreeNode
    threshold: float = 0.5
    max_depth: int | None = None

    def score_rows(self, X: np.ndarray) -> np.ndarray:
        scores = np.empty(X.shape[0])
        for i, row in enumerate(X):
            node = self.root
            while not node.is_leaf:
                node = node.left if row[node.feature] <= node.threshold else node.right
            scores[i] = node.positive_share
        return scores

    def depth(self) -> int:
        def walk(node):
            if node.is_leaf:
                return 0
            return 1 + max(walk(node.left), walk(node.right))
        return walk(self.root)

    def to_dict(self) -> dict:
        return {"root": self.root.to_dict(), "max_depth": self.max_depth}

    @classmethod
    def from_dict(cls, params: dict, schema: str, n_terms: int) -> "DecisionTreeModel":
        return cls(
            schema=schema,
            n_terms=n_terms,
            root=TreeNode.from_dict(params["root"]),
            max_depth=params.get("max_depth"),
        )


def train_dt(
    fs: FeatureSet,
    max_depth: int | None = None,
    min_leaf: int = 1,
    ccp_alpha: float = 0.0,
) -> DecisionTreeModel:
    """Grow a greedy entropy tree, then apply cost-complexity pruning."""
    X = fs.combined
    y01 = (fs.y > 0).astype(int)
    if len(y01) < 2 * min_leaf:
        raise ValueError("too few examples for the requested min_leaf")
    root = _grow(X, y01, depth=0, max_depth=max_depth, min_leaf=min_leaf)
    if ccp_alpha > 0 or not root.is_leaf:
        root = prune(root, ccp_alpha)
    return DecisionTreeModel(
        schema=fs.schema, n_terms=fs.terms.shape[1], root=root, max_depth=max_depth
    )
