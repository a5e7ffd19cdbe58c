"""Pure NumPy implementation of the SGD sweep (fallback for the Cython kernel)."""

import numpy as np


def sgd_sweep(X, order, bases, dt, sing_floor, rank_tol=1e-10):
    """Apply one stochastic step per entry of ``order`` to ``bases`` in place.

    Each step takes the point ``X[order[t]]``, picks the subspace with the
    largest projection norm, moves it along the tangent part of the l1
    gradient and re-orthonormalizes its rows. Steps on points whose residual
    is below ``sing_floor`` leave the bases untouched.

    Returns ``(done, collapsed)``. ``collapsed`` is -1 when every step
    succeeded; otherwise it is the index of the subspace whose update lost
    rank at step ``done - 1``, and that subspace still holds its pre-step
    value.
    """
    n = len(order)
    for t in range(n):
        x = X[order[t]]
        coeffs = bases @ x
        i = int(np.argmax(np.einsum("ka,ka->k", coeffs, coeffs)))
        P = bases[i]
        u = coeffs[i]
        w = x - u @ P
        r = np.sqrt(w @ w)
        if r < sing_floor:
            continue
        Q, R = np.linalg.qr((P + (dt / r) * np.outer(u, w)).T)
        diag = np.diag(R)
        if np.min(np.abs(diag)) <= rank_tol:
            return t + 1, i
        # column signs chosen so Q matches Gram-Schmidt on the rows
        bases[i] = (Q * np.sign(diag)).T
    return n, -1
