"""Soft-margin SVM trained by pairwise dual coordinate optimization.

The dual is solved over beta_i = y_i * alpha_i with the maximal-violating-
pair working-set rule: at each step the most violating (i, j) pair under
the box and equality constraints is updated analytically, which preserves
sum(alpha_i y_i) = 0 exactly.  Convergence is declared when the duality
gap criterion max-over-up minus min-over-low drops to tol, and the bias is
the midpoint of the two.  Feature standardization (training mean and
population scale) is part of the model, so decision scores do not depend
on the units of the input features.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

try:
    from numba import njit as _njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

from ..errors import NonConvergence, SingleClass
from ..features import FeatureSet
from .base import register_model

CURVATURE_FLOOR = 1e-12
SV_EPS = 1e-10


def rbf_kernel(A: np.ndarray, B: np.ndarray, sigma: float) -> np.ndarray:
    sq = (
        np.sum(A * A, axis=1)[:, None]
        + np.sum(B * B, axis=1)[None, :]
        - 2.0 * (A @ B.T)
    )
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-sq / (2.0 * sigma * sigma))


def linear_kernel(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B.T


@dataclass
class SmoDiagnostics:
    iterations: int
    cap: int
    gap: float
    max_kkt_violation: float
    sum_alpha_y: float


@register_model("svm")
@dataclass
class SvmModel:
    schema: str
    n_terms: int
    kernel: str                 # "linear" or "rbf"
    sigma: float | None
    C: float
    sv_x: np.ndarray            # support vectors, standardized space
    sv_coef: np.ndarray         # alpha_i * y_i for each support vector
    bias: float
    mean: np.ndarray
    scale: np.ndarray
    threshold: float = 0.0
    diagnostics: SmoDiagnostics | None = field(default=None, compare=False)

    def _kernel_to_svs(self, Xs: np.ndarray) -> np.ndarray:
        if self.kernel == "linear":
            return linear_kernel(Xs, self.sv_x)
        return rbf_kernel(Xs, self.sv_x, self.sigma)

    def score_rows(self, X: np.ndarray) -> np.ndarray:
        Xs = (X - self.mean) / self.scale
        return self._kernel_to_svs(Xs) @ self.sv_coef + self.bias

    def weight_vector(self) -> tuple[np.ndarray, float]:
        """Linear-kernel weights and bias mapped back to input space."""
        if self.kernel != "linear":
            raise ValueError("weights are only defined for the linear kernel")
        w_std = self.sv_x.T @ self.sv_coef
        w = w_std / self.scale
        b = self.bias - float(np.sum(w_std * self.mean / self.scale))
        return w, b

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel,
            "sigma": self.sigma,
            "C": self.C,
            "sv_x": self.sv_x.tolist(),
            "sv_coef": self.sv_coef.tolist(),
            "bias": self.bias,
            "mean": self.mean.tolist(),
            "scale": self.scale.tolist(),
        }

    @classmethod
    def from_dict(cls, params: dict, schema: str, n_terms: int) -> "SvmModel":
        return cls(
            schema=schema,
            n_terms=n_terms,
            kernel=params["kernel"],
            sigma=params["sigma"],
            C=params["C"],
            sv_x=np.array(params["sv_x"]),
            sv_coef=np.array(params["sv_coef"]),
            bias=params["bias"],
            mean=np.array(params["mean"]),
            scale=np.array(params["scale"]),
        )


def _smo_loop(K, y, C, tol, max_iter):
    """Pairwise working-set optimization of the soft-margin dual.

    Works on beta = y * alpha with box A <= beta <= B where A, B encode
    0 <= alpha <= C.  grad holds d/d beta of the dual objective, which for
    free support vectors equals the bias at the optimum.  The first index
    is the maximal violator; its partner maximizes the second-order
    objective decrease.  Convergence is the maximal-violating-pair gap.
    Returns (beta, bias, gap, iterations, hit_cap).
    """
    n = K.shape[0]
    beta = np.zeros(n)
    lower = np.empty(n)
    upper = np.empty(n)
    grad = np.empty(n)
    for k in range(n):
        if y[k] > 0:
            lower[k] = 0.0
            upper[k] = C
        else:
            lower[k] = -C
            upper[k] = 0.0
        grad[k] = y[k]

    it = 0
    while True:
        i = -1
        gi = -np.inf
        j_min = -1
        gj = np.inf
        for k in range(n):
            gk = grad[k]
            if beta[k] < upper[k] and gk > gi:
                gi = gk
                i = k
            if beta[k] > lower[k] and gk < gj:
                gj = gk
                j_min = k
        gap = gi - gj
        if gap <= tol or i < 0 or j_min < 0:
            return beta, (gi + gj) / 2.0, gap, it, False
        if it >= max_iter:
            return beta, (gi + gj) / 2.0, gap, it, True
        # partner maximizing the second-order decrease b^2 / a
        j = -1
        best = -np.inf
        kii = K[i, i]
        for k in range(n):
            if beta[k] > lower[k]:
                b = gi - grad[k]
                if b > 0.0:
                    a = kii + K[k, k] - 2.0 * K[i, k]
                    if a < CURVATURE_FLOOR:
                        a = CURVATURE_FLOOR
                    d = b * b / a
                    if d > best:
                        best = d
                        j = k
        a_ij = kii + K[j, j] - 2.0 * K[i, j]
        if a_ij < CURVATURE_FLOOR:
            a_ij = CURVATURE_FLOOR
        room_i = upper[i] - beta[i]
        room_j = beta[j] - lower[j]
        step = (gi - grad[j]) / a_ij
        if step > room_i:
            step = room_i
        if step > room_j:
            step = room_j
        # snap to the bound when the box is the active constraint, so a
        # vanishing room can never stall the pair selection
        if step == room_i:
            beta[i] = upper[i]
        else:
            beta[i] += step
        if step == room_j:
            beta[j] = lower[j]
        else:
            beta[j] -= step
        for k in range(n):
            grad[k] += step * (K[j, k] - K[i, k])
        it += 1


if _HAVE_NUMBA:
    _smo_loop = _njit(cache=True)(_smo_loop)


def _smo(K: np.ndarray, y: np.ndarray, C: float, tol: float, max_iter: int):
    beta, bias, gap, it, hit_cap = _smo_loop(
        np.ascontiguousarray(K), y.astype(np.float64), float(C), float(tol), int(max_iter)
    )
    if hit_cap:
        raise NonConvergence(it, max_iter)
    return beta, bias, gap, it


def _kkt_violation(margins: np.ndarray, alpha: np.ndarray, C: float) -> float:
    """Worst per-point violation of the optimality conditions."""
    viol = np.abs(margins - 1.0)                       # free vectors
    viol[alpha <= SV_EPS] = np.maximum(0.0, 1.0 - margins[alpha <= SV_EPS])
    at_c = alpha >= C - SV_EPS
    viol[at_c] = np.maximum(0.0, margins[at_c] - 1.0)
    return float(viol.max()) if len(viol) else 0.0


def train_svm(
    fs: FeatureSet,
    kernel: str = "linear",
    C: float = 1.0,
    sigma: float | None = None,
    tol: float = 1e-3,
    max_iter: int | None = None,
) -> SvmModel:
    """Fit a linear or RBF SVM on a training feature set.

    sigma defaults to sqrt(d/2) for d standardized features.  Raises
    NonConvergence when the iteration cap is hit before the KKT gap
    reaches tol.
    """
    if kernel not in ("linear", "rbf"):
        raise ValueError(f"unknown kernel {kernel!r}")
    X = fs.combined
    y = fs.y
    if len(set(y.tolist())) < 2:
        raise SingleClass("training data must contain both classes")

    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale = np.where(scale < 1e-12, 1.0, scale)
    Xs = (X - mean) / scale

    if kernel == "rbf" and sigma is None:
        sigma = float(np.sqrt(Xs.shape[1] / 2.0))
    K = linear_kernel(Xs, Xs) if kernel == "linear" else rbf_kernel(Xs, Xs, sigma)

    n = len(y)
    cap = max_iter if max_iter is not None else max(100_000, 500 * n)
    beta, bias, gap, iterations = _smo(K, y, C, tol, cap)

    alpha = beta * y
    margins = y * (K @ beta + bias)
    diag = SmoDiagnostics(
        iterations=iterations,
        cap=cap,
        gap=float(gap),
        max_kkt_violation=_kkt_violation(margins, alpha, C),
        sum_alpha_y=float(beta.sum()),
    )

    sv = alpha > SV_EPS
    return SvmModel(
        schema=fs.schema,
        n_terms=fs.terms.shape[1],
        kernel=kernel,
        sigma=sigma if kernel == "rbf" else None,
        C=C,
        sv_x=Xs[sv],
        sv_coef=beta[sv],
        bias=float(bias),
        mean=mean,
        scale=scale,
        diagnostics=diag,
    )
