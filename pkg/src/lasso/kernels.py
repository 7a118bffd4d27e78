"""
Numba kernels for cyclic coordinate descent on dense (Fortran-ordered) and
CSC design matrices.

Column inner products are always accumulated row by row in storage order, so
`xt_r_*` and the update inside `cd_pass_*` round identically.
"""
import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def soft_threshold(x, t):
    """sign(x) * max(|x| - t, 0)."""
    if x > t:
        return x - t
    if x < -t:
        return x + t
    return 0.0


@njit(cache=True, nogil=True)
def column_norms_sq_dense(X):
    n, d = X.shape
    out = np.zeros(d)
    for j in range(d):
        acc = 0.0
        for i in range(n):
            acc += X[i, j] * X[i, j]
        out[j] = acc
    return out


@njit(cache=True, nogil=True)
def column_norms_sq_sparse(data, indptr, d):
    out = np.zeros(d)
    for j in range(d):
        acc = 0.0
        for k in range(indptr[j], indptr[j + 1]):
            acc += data[k] * data[k]
        out[j] = acc
    return out


@njit(cache=True, nogil=True)
def xt_r_dense(X, r):
    n, d = X.shape
    out = np.zeros(d)
    for j in range(d):
        acc = 0.0
        for i in range(n):
            acc += X[i, j] * r[i]
        out[j] = acc
    return out


@njit(cache=True, nogil=True)
def xt_r_sparse(data, indices, indptr, r):
    d = indptr.shape[0] - 1
    out = np.zeros(d)
    for j in range(d):
        acc = 0.0
        for k in range(indptr[j], indptr[j + 1]):
            acc += data[k] * r[indices[k]]
        out[j] = acc
    return out


@njit(cache=True, nogil=True)
def cd_pass_dense(X, beta, r, penalty_n, norms_sq):
    """One cyclic pass over j = 0..d-1; updates beta and r in place.

    penalty_n[j] is n * exp(lam[j]). Returns the number of coordinates whose
    value changed.
    """
    n, d = X.shape
    changed = 0
    for j in range(d):
        if norms_sq[j] == 0.0:
            if beta[j] != 0.0:
                beta[j] = 0.0
                changed += 1
            continue
        old = beta[j]
        acc = 0.0
        for i in range(n):
            acc += X[i, j] * r[i]
        new = soft_threshold(old + acc / norms_sq[j], penalty_n[j] / norms_sq[j])
        if new != old:
            delta = new - old
            for i in range(n):
                r[i] -= delta * X[i, j]
            beta[j] = new
            changed += 1
    return changed


@njit(cache=True, nogil=True)
def cd_pass_sparse(data, indices, indptr, beta, r, penalty_n, norms_sq):
    d = indptr.shape[0] - 1
    changed = 0
    for j in range(d):
        if norms_sq[j] == 0.0:
            if beta[j] != 0.0:
                beta[j] = 0.0
                changed += 1
            continue
        old = beta[j]
        start, end = indptr[j], indptr[j + 1]
        acc = 0.0
        for k in range(start, end):
            acc += data[k] * r[indices[k]]
        new = soft_threshold(old + acc / norms_sq[j], penalty_n[j] / norms_sq[j])
        if new != old:
            delta = new - old
            for k in range(start, end):
                r[indices[k]] -= delta * data[k]
            beta[j] = new
            changed += 1
    return changed
