"""ADMM for the structurally interacting elastic net.

Minimizes over beta::

    1/2 ||y - X^T beta||^2 + lam1 ||beta||_1 + lam2/2 ||beta||^2 - lam3 beta^T W beta

with X stored feature-major (N x M). The split is beta = gamma, with the
l1 term carried by gamma and a scaled-free dual z. The smooth part has the
constant Hessian ``XX^T + lam2 I - 2 lam3 W``; adding ``rho I`` gives the
beta-update system matrix, which is Cholesky-factored once.
"""

from __future__ import annotations

import json
import logging
import math
import warnings
from dataclasses import asdict, dataclass, field, replace
from enum import Enum

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import MaxIterationsExceeded, NotPositiveDefinite, StructNetError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    lambda1: float = 0.1
    lambda2: float = 1.0
    lambda3: float = 0.1
    rho: float = 1.0
    max_iter: int = 1000
    eps_abs: float = 1e-6
    eps_rel: float = 1e-4

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "lambda3"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise StructNetError(f"{name} must be finite and >= 0, got {v}")
        for name in ("rho", "eps_abs", "eps_rel"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise StructNetError(f"{name} must be finite and > 0, got {v}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise StructNetError(f"max_iter must be a positive integer, got {self.max_iter}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SolverState:
    beta: np.ndarray
    gamma: np.ndarray
    z: np.ndarray
    iter: int = 0
    primal_residual: float = math.inf
    dual_residual: float = math.inf


@dataclass(frozen=True)
class FactoredSystem:
    """Cholesky factor of the beta-update matrix plus cached products."""

    factor: tuple
    Xy: np.ndarray
    XXt: np.ndarray
    W: np.ndarray | None
    X: np.ndarray
    y: np.ndarray
    cfg: SolverConfig

    @property
    def N(self) -> int:
        return self.Xy.shape[0]

    @property
    def A(self) -> np.ndarray:
        """The (dense) beta-update matrix, rebuilt on demand."""
        return _system_matrix(self.XXt, self.W, self.cfg)


@dataclass
class SolverResult:
    beta_star: np.ndarray
    converged: bool
    iterations: int
    final_residuals: tuple[float, float]
    objective_value: float
    kkt_report: dict
    state: SolverState | None = field(default=None, repr=False)
    history: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "beta": [float(b) for b in self.beta_star],
            "converged": bool(self.converged),
            "iterations": int(self.iterations),
            "primal_residual": float(self.final_residuals[0]),
            "dual_residual": float(self.final_residuals[1]),
            "objective": float(self.objective_value),
            "kkt": {k: float(v) for k, v in self.kkt_report.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _as_w(w) -> np.ndarray | None:
    if w is None:
        return None
    arr = np.asarray(getattr(w, "w", w), dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise StructNetError(f"W must be square, got shape {arr.shape}")
    if not np.allclose(arr, arr.T, rtol=0, atol=1e-12):
        raise StructNetError("W must be symmetric")
    return arr


def _system_matrix(XXt, W, cfg: SolverConfig) -> np.ndarray:
    A = XXt + (cfg.lambda2 + cfg.rho) * np.eye(XXt.shape[0])
    if W is not None and cfg.lambda3 != 0:
        A = A - 2.0 * cfg.lambda3 * W
    return A


def precompute(X, y, w, cfg: SolverConfig) -> FactoredSystem:
    """Form ``XX^T + lam2 I - 2 lam3 W + rho I`` and Cholesky-factor it once."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise StructNetError(f"X must be N x M, got shape {X.shape}")
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != X.shape[1]:
        raise StructNetError(f"y has {y.shape[0]} samples but X has {X.shape[1]} columns")
    W = _as_w(w)
    if W is not None and W.shape[0] != X.shape[0]:
        raise StructNetError(f"W is {W.shape[0]}x{W.shape[0]} but there are {X.shape[0]} features")
    if W is None:
        cfg = replace(cfg, lambda3=0.0)

    XXt = X @ X.T
    A = _system_matrix(XXt, W, cfg)
    try:
        factor = cho_factor(A, lower=True, check_finite=True)
    except LinAlgError:
        min_eig = float(np.linalg.eigvalsh(A)[0])
        raise NotPositiveDefinite(
            f"system matrix XX^T + lambda2*I - 2*lambda3*W + rho*I is not positive definite "
            f"(smallest eigenvalue {min_eig:.4g}); increase rho or lambda2, or decrease lambda3"
        ) from None
    return FactoredSystem(factor, X @ y, XXt, W, X, y, cfg)


def update_beta(sys: FactoredSystem, gamma, z) -> np.ndarray:
    return cho_solve(sys.factor, sys.Xy - z + sys.cfg.rho * gamma, check_finite=False)


def update_gamma(beta, z, lambda1: float, rho: float) -> np.ndarray:
    """Soft-threshold ``z + rho*beta`` at ``lambda1``, then scale by ``1/rho``."""
    v = np.asarray(z, dtype=float) + rho * np.asarray(beta, dtype=float)
    return np.sign(v) * np.maximum(np.abs(v) - lambda1, 0.0) / rho


def update_z(z, beta, gamma, rho: float) -> np.ndarray:
    return np.asarray(z, dtype=float) + rho * (np.asarray(beta) - np.asarray(gamma))


def objective(X, y, beta, W, cfg: SolverConfig) -> float:
    beta = np.asarray(beta, dtype=float)
    r = np.asarray(y, dtype=float) - np.asarray(X, dtype=float).T @ beta
    val = 0.5 * r @ r + cfg.lambda1 * np.abs(beta).sum() + 0.5 * cfg.lambda2 * beta @ beta
    if W is not None and cfg.lambda3 != 0:
        val -= cfg.lambda3 * beta @ (np.asarray(getattr(W, "w", W)) @ beta)
    return float(val)


def kkt_report(sys: FactoredSystem, state: SolverState) -> dict:
    """First-order optimality gaps at an ADMM state.

    ``stationarity`` is the sup-norm of grad f(beta) + z; ``dual_feasibility``
    measures how far z is from lam1 * subgradient of |.| at gamma.
    """
    cfg = sys.cfg
    beta, gamma, z = state.beta, state.gamma, state.z
    grad = sys.XXt @ beta - sys.Xy + cfg.lambda2 * beta
    if sys.W is not None and cfg.lambda3 != 0:
        grad = grad - 2.0 * cfg.lambda3 * (sys.W @ beta)
    stationarity = float(np.max(np.abs(grad + z))) if beta.size else 0.0
    zero = gamma == 0
    gaps = np.where(
        zero,
        np.maximum(np.abs(z) - cfg.lambda1, 0.0),
        np.abs(z - np.sign(gamma) * cfg.lambda1),
    )
    return {
        "stationarity": stationarity,
        "dual_feasibility": float(gaps.max()) if gaps.size else 0.0,
    }


def run(sys: FactoredSystem, track_history: bool = False) -> SolverResult:
    """Iterate beta/gamma/z updates from zeros until both residuals pass."""
    cfg = sys.cfg
    N = sys.N
    sqrt_n = math.sqrt(N)
    gamma = np.zeros(N)
    z = np.zeros(N)
    beta = np.zeros(N)
    history = []
    converged = False
    r = s = math.inf
    k = 0
    for k in range(1, cfg.max_iter + 1):
        beta = update_beta(sys, gamma, z)
        gamma_new = update_gamma(beta, z, cfg.lambda1, cfg.rho)
        z = update_z(z, beta, gamma_new, cfg.rho)
        r = float(np.linalg.norm(beta - gamma_new))
        s = cfg.rho * float(np.linalg.norm(gamma_new - gamma))
        gamma = gamma_new
        eps_pri = sqrt_n * cfg.eps_abs + cfg.eps_rel * max(np.linalg.norm(beta), np.linalg.norm(gamma))
        eps_dual = sqrt_n * cfg.eps_abs + cfg.eps_rel * np.linalg.norm(z)
        if track_history:
            history.append((r, s, objective(sys.X, sys.y, gamma, sys.W, cfg)))
        if r <= eps_pri and s <= eps_dual:
            converged = True
            break

    state = SolverState(beta, gamma, z, k, r, s)
    if not converged:
        warnings.warn(
            f"ADMM did not converge in {cfg.max_iter} iterations "
            f"(primal {r:.3g}, dual {s:.3g})",
            MaxIterationsExceeded,
            stacklevel=2,
        )
    beta_star = gamma.copy()
    return SolverResult(
        beta_star=beta_star,
        converged=converged,
        iterations=k,
        final_residuals=(r, s),
        objective_value=objective(sys.X, sys.y, beta_star, sys.W, cfg),
        kkt_report=kkt_report(sys, state),
        state=state,
        history=history,
    )


def solve(X, y, w, cfg: SolverConfig | None = None, track_history: bool = False) -> SolverResult:
    cfg = cfg or SolverConfig()
    return run(precompute(X, y, w, cfg), track_history=track_history)


class Baseline(str, Enum):
    RIDGE = "ridge"
    LASSO = "lasso"
    ELASTICNET = "elasticnet"


def baseline_config(kind: Baseline | str, cfg: SolverConfig) -> SolverConfig:
    try:
        kind = Baseline(getattr(kind, "value", kind).lower())
    except ValueError:
        raise StructNetError(f"unknown baseline {kind!r}; expected ridge, lasso or elasticnet") from None
    if kind is Baseline.RIDGE:
        return replace(cfg, lambda1=0.0, lambda3=0.0)
    if kind is Baseline.LASSO:
        return replace(cfg, lambda2=0.0, lambda3=0.0)
    return replace(cfg, lambda3=0.0)


def solve_baseline(kind: Baseline | str, X, y, cfg: SolverConfig | None = None) -> SolverResult:
    """Ridge, Lasso or plain elastic net: the same solver with some lambdas zeroed."""
    return solve(X, y, None, baseline_config(kind, cfg or SolverConfig()))
