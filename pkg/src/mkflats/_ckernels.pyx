# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled SGD sweep; see ``_pykernels.sgd_sweep`` for the contract."""

import numpy as np

from libc.math cimport sqrt


def sgd_sweep(const double[:, ::1] X, const Py_ssize_t[::1] order,
              double[:, :, ::1] bases, double dt, double sing_floor,
              double rank_tol=1e-10):
    cdef Py_ssize_t K = bases.shape[0]
    cdef Py_ssize_t d = bases.shape[1]
    cdef Py_ssize_t D = bases.shape[2]
    cdef Py_ssize_t n = order.shape[0]
    cdef double[::1] u = np.empty(d)
    cdef double[::1] cand = np.empty(d)
    cdef double[::1] w = np.empty(D)
    cdef double[:, ::1] work = np.empty((d, D))
    cdef Py_ssize_t t, i, best, a, b, j, p
    cdef double s, c, bestval, r, scale, nrm
    cdef const double[:] x

    with nogil:
        for t in range(n):
            x = X[order[t]]
            best = 0
            bestval = -1.0
            for i in range(K):
                s = 0.0
                for a in range(d):
                    c = 0.0
                    for j in range(D):
                        c = c + bases[i, a, j] * x[j]
                    cand[a] = c
                    s = s + c * c
                if s > bestval:
                    bestval = s
                    best = i
                    for a in range(d):
                        u[a] = cand[a]

            for j in range(D):
                c = x[j]
                for a in range(d):
                    c = c - u[a] * bases[best, a, j]
                w[j] = c
            s = 0.0
            for j in range(D):
                s = s + w[j] * w[j]
            r = sqrt(s)
            if r < sing_floor:
                continue

            scale = dt / r
            for a in range(d):
                for j in range(D):
                    work[a, j] = bases[best, a, j] + scale * u[a] * w[j]

            # modified Gram-Schmidt on the rows, two passes so that large
            # steps (nearly parallel rows) still come out orthonormal
            for a in range(d):
                for p in range(2):
                    for b in range(a):
                        c = 0.0
                        for j in range(D):
                            c = c + work[a, j] * work[b, j]
                        for j in range(D):
                            work[a, j] = work[a, j] - c * work[b, j]
                nrm = 0.0
                for j in range(D):
                    nrm = nrm + work[a, j] * work[a, j]
                nrm = sqrt(nrm)
                if nrm <= rank_tol:
                    with gil:
                        return t + 1, best
                for j in range(D):
                    work[a, j] = work[a, j] / nrm

            for a in range(d):
                for j in range(D):
                    bases[best, a, j] = work[a, j]
    return n, -1
