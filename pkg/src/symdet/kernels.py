"""Hot loops of the approximate (complex) regime.

Every kernel exists twice: a loop version compiled with numba and a
vectorized numpy version. The public names dispatch on the active backend
(see :mod:`symdet._accel`). Both versions make identical pivoting decisions,
so they agree to rounding.
"""
from __future__ import annotations

import numpy as np

from . import _accel

# status codes shared by both backends
OK = 0
STALLED = 1
NAN = 2
SINGULAR = 3

# corrections below this that stop shrinking have hit the rounding floor
FLOOR = 1e-11


# --------------------------------------------------------------------------
# Aberth-Ehrlich simultaneous root iteration (Jacobi updates)


def _aberth_loop(c, z0, maxiter, tol):
    n = z0.shape[0]
    z = z0.copy()
    corr = np.zeros(n, dtype=np.complex128)
    prev = np.inf
    for it in range(1, maxiter + 1):
        worst = 0.0
        for i in range(n):
            zi = z[i]
            p = c[0]
            dp = 0j
            for k in range(1, n + 1):
                dp = dp * zi + p
                p = p * zi + c[k]
            s = 0j
            for j in range(n):
                if j != i:
                    s += 1.0 / (zi - z[j])
            if p == 0:
                corr[i] = 0j
            else:
                corr[i] = p / (dp - p * s)
            a = abs(corr[i]) / max(1.0, abs(zi))
            if not (a == a):
                return z, it, NAN
            if a > worst:
                worst = a
        for i in range(n):
            z[i] -= corr[i]
        if worst <= tol or (worst < FLOOR and worst >= prev):
            return z, it, OK
        prev = worst
    return z, maxiter, STALLED


def _aberth_numpy(c, z0, maxiter, tol):
    n = z0.shape[0]
    z = z0.copy()
    off = ~np.eye(n, dtype=bool)
    prev = np.inf
    for it in range(1, maxiter + 1):
        p = np.full(n, c[0], dtype=np.complex128)
        dp = np.zeros(n, dtype=np.complex128)
        for k in range(1, n + 1):
            dp = dp * z + p
            p = p * z + c[k]
        diff = z[:, None] - z[None, :]
        inv = np.zeros_like(diff)
        inv[off] = 1.0 / diff[off]
        s = inv.sum(axis=1)
        with np.errstate(all="ignore"):
            corr = np.where(p == 0, 0j, p / (dp - p * s))
        rel = np.abs(corr) / np.maximum(1.0, np.abs(z))
        if np.isnan(rel).any():
            return z, it, NAN
        z = z - corr
        worst = rel.max()
        if worst <= tol or (worst < FLOOR and worst >= prev):
            return z, it, OK
        prev = worst
    return z, maxiter, STALLED


_aberth_nb = _accel.njit(_aberth_loop)


def aberth(c, z0, maxiter, tol):
    """Refine initial guesses ``z0`` for the roots of the polynomial ``c``.

    ``c`` holds coefficients highest degree first. Returns ``(z, iters, status)``.
    """
    c = np.ascontiguousarray(c, dtype=np.complex128)
    z0 = np.ascontiguousarray(z0, dtype=np.complex128)
    if _accel.backend() == "numba":
        return _aberth_nb(c, z0, int(maxiter), float(tol))
    return _aberth_numpy(c, z0, int(maxiter), float(tol))


# --------------------------------------------------------------------------
# Symmetric congruence elimination: g^T S g = diag(d)


def _symelim_loop(S0, eps):
    n = S0.shape[0]
    S = S0.copy()
    g = np.eye(n, dtype=np.complex128)
    order = np.arange(n)
    for k in range(n):
        p = k
        best = abs(S[k, k])
        for i in range(k + 1, n):
            if abs(S[i, i]) > best:
                best = abs(S[i, i])
                p = i
        if best <= eps:
            bi = -1
            bj = -1
            bv = 0.0
            for i in range(k, n):
                for j in range(i + 1, n):
                    if abs(S[i, j]) > bv:
                        bv = abs(S[i, j])
                        bi = i
                        bj = j
            if bv <= eps:
                return np.diag(S).copy(), g, order, SINGULAR
            for t in range(n):
                S[t, bi] += S[t, bj]
            for t in range(n):
                S[bi, t] += S[bj, t]
            for t in range(n):
                g[t, bi] += g[t, bj]
            p = bi
        if p != k:
            for t in range(n):
                tmp = S[t, k]
                S[t, k] = S[t, p]
                S[t, p] = tmp
            for t in range(n):
                tmp = S[k, t]
                S[k, t] = S[p, t]
                S[p, t] = tmp
            for t in range(n):
                tmp = g[t, k]
                g[t, k] = g[t, p]
                g[t, p] = tmp
            ti = order[k]
            order[k] = order[p]
            order[p] = ti
        piv = S[k, k]
        for i in range(k + 1, n):
            f = S[i, k] / piv
            if f != 0:
                for t in range(n):
                    S[t, i] -= f * S[t, k]
                for t in range(n):
                    S[i, t] -= f * S[k, t]
                for t in range(n):
                    g[t, i] -= f * g[t, k]
    d = np.zeros(n, dtype=np.complex128)
    for i in range(n):
        d[i] = S[i, i]
    return d, g, order, OK


def _symelim_numpy(S0, eps):
    n = S0.shape[0]
    S = S0.copy()
    g = np.eye(n, dtype=np.complex128)
    order = np.arange(n)
    for k in range(n):
        diag = np.abs(np.diag(S)[k:])
        p = k + int(np.argmax(diag))
        if diag.max() <= eps:
            block = np.abs(np.triu(S[k:, k:], 1))
            flat = int(np.argmax(block))
            bi, bj = divmod(flat, n - k)
            if block[bi, bj] <= eps:
                return np.diag(S).copy(), g, order, SINGULAR
            bi += k
            bj += k
            S[:, bi] += S[:, bj]
            S[bi, :] += S[bj, :]
            g[:, bi] += g[:, bj]
            p = bi
        if p != k:
            S[:, [k, p]] = S[:, [p, k]]
            S[[k, p], :] = S[[p, k], :]
            g[:, [k, p]] = g[:, [p, k]]
            order[[k, p]] = order[[p, k]]
        f = S[k + 1:, k] / S[k, k]
        S[:, k + 1:] -= np.outer(S[:, k], f)
        S[k + 1:, :] -= np.outer(f, S[k, :])
        g[:, k + 1:] -= np.outer(g[:, k], f)
    return np.diag(S).copy(), g, order, OK


_symelim_nb = _accel.njit(_symelim_loop)


def symmetric_elimination(S, eps):
    """Congruence-diagonalize a complex symmetric matrix.

    Returns ``(d, g, status)`` with ``g.T @ S @ g`` equal to ``diag(d)`` up to
    rounding. Pivoting permutes columns; they are put back in input order on
    return, so a diagonal input yields a diagonal ``g``. ``eps`` is the
    absolute pivot threshold.
    """
    S = np.ascontiguousarray(S, dtype=np.complex128)
    if _accel.backend() == "numba":
        d, g, order, status = _symelim_nb(S, float(eps))
    else:
        d, g, order, status = _symelim_numpy(S, float(eps))
    inv = np.empty_like(order)
    inv[order] = np.arange(order.size)
    return d[inv], g[:, inv], status


# --------------------------------------------------------------------------
# Null vector by full-pivot elimination (free variable = smallest pivot)


def _nullvec_loop(M0):
    n = M0.shape[0]
    U = M0.copy()
    cols = np.arange(n)
    for k in range(n - 1):
        pi = k
        pj = k
        best = -1.0
        for i in range(k, n):
            for j in range(k, n):
                a = abs(U[i, j])
                if a > best:
                    best = a
                    pi = i
                    pj = j
        if best == 0.0:
            break
        if pi != k:
            for t in range(n):
                tmp = U[k, t]
                U[k, t] = U[pi, t]
                U[pi, t] = tmp
        if pj != k:
            for t in range(n):
                tmp = U[t, k]
                U[t, k] = U[t, pj]
                U[t, pj] = tmp
            ti = cols[k]
            cols[k] = cols[pj]
            cols[pj] = ti
        piv = U[k, k]
        for i in range(k + 1, n):
            f = U[i, k] / piv
            for t in range(k, n):
                U[i, t] -= f * U[k, t]
    y = np.zeros(n, dtype=np.complex128)
    y[n - 1] = 1.0
    for i in range(n - 2, -1, -1):
        s = 0j
        for j in range(i + 1, n):
            s += U[i, j] * y[j]
        if U[i, i] == 0:
            y[i] = 0j
        else:
            y[i] = -s / U[i, i]
    v = np.zeros(n, dtype=np.complex128)
    for i in range(n):
        v[cols[i]] = y[i]
    return v


def _nullvec_numpy(M0):
    n = M0.shape[0]
    U = M0.copy()
    cols = np.arange(n)
    for k in range(n - 1):
        block = np.abs(U[k:, k:])
        flat = int(np.argmax(block))
        pi, pj = divmod(flat, n - k)
        if block[pi, pj] == 0.0:
            break
        pi += k
        pj += k
        if pi != k:
            U[[k, pi], :] = U[[pi, k], :]
        if pj != k:
            U[:, [k, pj]] = U[:, [pj, k]]
            cols[[k, pj]] = cols[[pj, k]]
        f = U[k + 1:, k] / U[k, k]
        U[k + 1:, k:] -= np.outer(f, U[k, k:])
    y = np.zeros(n, dtype=np.complex128)
    y[n - 1] = 1.0
    for i in range(n - 2, -1, -1):
        s = U[i, i + 1:] @ y[i + 1:]
        y[i] = 0j if U[i, i] == 0 else -s / U[i, i]
    v = np.zeros(n, dtype=np.complex128)
    v[cols] = y
    return v


_nullvec_nb = _accel.njit(_nullvec_loop)


def null_vector(M):
    """Approximate kernel vector of a numerically rank n-1 square matrix."""
    M = np.ascontiguousarray(M, dtype=np.complex128)
    if _accel.backend() == "numba":
        return _nullvec_nb(M)
    return _nullvec_numpy(M)


# --------------------------------------------------------------------------
# Signed-permutation action on reduced tuples, batched, and tolerance dedup


def _orbit_loop(lams, tail, signs, perms):
    G = perms.shape[0]
    n = lams.shape[0]
    t = tail.shape[0]
    out = np.zeros((G, n + t * n * n), dtype=np.complex128)
    for g in range(G):
        for i in range(n):
            out[g, i] = lams[perms[g, i]]
        for k in range(t):
            base = n + k * n * n
            for i in range(n):
                for j in range(n):
                    out[g, base + i * n + j] = (
                        signs[g, i] * signs[g, j] * tail[k, perms[g, i], perms[g, j]]
                    )
    return out


def _orbit_numpy(lams, tail, signs, perms):
    G = perms.shape[0]
    n = lams.shape[0]
    lam_part = lams[perms]
    pi = perms[:, :, None]
    pj = perms[:, None, :]
    moved = tail[:, pi, pj]  # (t, G, n, n)
    sgn = (signs[:, :, None] * signs[:, None, :])[None]
    tail_part = np.moveaxis(moved * sgn, 0, 1).reshape(G, -1)
    return np.concatenate([lam_part, tail_part], axis=1).astype(np.complex128)


_orbit_nb = _accel.njit(_orbit_loop)


def orbit_images(lams, tail, signs, perms):
    """Flattened images of a reduced tuple under a batch of signed permutations.

    Row ``g`` is ``[lams[perm], vec(eps_i eps_j tail[:, perm_i, perm_j])]``.
    """
    lams = np.ascontiguousarray(lams, dtype=np.complex128)
    tail = np.ascontiguousarray(tail, dtype=np.complex128)
    signs = np.ascontiguousarray(signs, dtype=np.float64)
    perms = np.ascontiguousarray(perms, dtype=np.int64)
    if _accel.backend() == "numba":
        return _orbit_nb(lams, tail, signs, perms)
    return _orbit_numpy(lams, tail, signs, perms)


def _dedup_loop(X, tol):
    G = X.shape[0]
    F = X.shape[1]
    keep = np.zeros(G, dtype=np.int64)
    m = 0
    for g in range(G):
        dup = False
        for q in range(m):
            r = keep[q]
            close = True
            for f in range(F):
                if abs(X[g, f] - X[r, f]) > tol:
                    close = False
                    break
            if close:
                dup = True
                break
        if not dup:
            keep[m] = g
            m += 1
    return keep[:m].copy()


def _dedup_numpy(X, tol):
    kept = np.empty_like(X)
    keep = np.empty(X.shape[0], dtype=np.int64)
    m = 0
    for g in range(X.shape[0]):
        if m and (np.abs(kept[:m] - X[g]).max(axis=1) <= tol).any():
            continue
        kept[m] = X[g]
        keep[m] = g
        m += 1
    return keep[:m].copy()


_dedup_nb = _accel.njit(_dedup_loop)


def dedup_rows(X, tol):
    """Indices of the first representative of each tolerance class of rows."""
    X = np.ascontiguousarray(X, dtype=np.complex128)
    if _accel.backend() == "numba":
        return _dedup_nb(X, float(tol))
    return _dedup_numpy(X, float(tol))
