"""Independent reference computations used to freeze and cross-check values.

Nothing here imports the package's solver or information-theory code.
"""

import numpy as np
from mpmath import mp, mpf, log, exp


def entropy_mp(p):
    mp.dps = 40
    return -sum(mpf(x) * log(mpf(x)) for x in p if x > 0)


def jsd_mp(p, q):
    m = [(mpf(a) + mpf(b)) / 2 for a, b in zip(p, q)]
    return entropy_mp(m) - entropy_mp(p) / 2 - entropy_mp(q) / 2


def strength_distribution(f):
    """Vertex strengths by explicit double loop."""
    M = len(f)
    s = [sum(abs(f[a] - f[b]) for b in range(M)) for a in range(M)]
    tot = sum(s)
    if tot == 0:
        return [1.0 / M] * M
    return [x / tot for x in s]


def relevance_mp(fi, fj, ti, tj):
    pi, pj = strength_distribution(fi), strength_distribution(fj)
    qi, qj = strength_distribution(ti), strength_distribution(tj)
    num = exp(-jsd_mp(pi, qi)) + exp(-jsd_mp(pj, qj))
    return num / exp(-jsd_mp(pi, pj))


def lasso_cd(X, y, lam1, lam2=0.0, tol=1e-13, max_sweeps=200000):
    """Cyclic coordinate descent for 1/2||y - X^T b||^2 + lam1|b|_1 + lam2/2 |b|^2.

    X is feature-major (N x M).
    """
    X = np.asarray(X, float)
    y = np.asarray(y, float)
    N = X.shape[0]
    b = np.zeros(N)
    r = y.copy()
    col_sq = np.sum(X * X, axis=1)
    for _ in range(max_sweeps):
        delta = 0.0
        for i in range(N):
            if col_sq[i] == 0:
                continue
            rho_i = X[i] @ r + col_sq[i] * b[i]
            new = np.sign(rho_i) * max(abs(rho_i) - lam1, 0.0) / (col_sq[i] + lam2)
            if new != b[i]:
                r -= X[i] * (new - b[i])
                delta = max(delta, abs(new - b[i]))
                b[i] = new
        if delta < tol:
            break
    return b
