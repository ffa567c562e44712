"""Hot numeric kernels, each compiled once with numba and kept once as plain Python.

Both builds share a single source function, so the two backends cannot drift:
`semibwk._backend.ACTIVE_BACKEND` only decides which compiled object gets called.
All randomness is pre-drawn by the callers and passed in as arrays, which keeps
the kernels deterministic and makes the two builds produce identical bits.
"""

from __future__ import annotations

import numpy as np

from ._backend import ACTIVE_BACKEND, compile_kernel

# simplex return codes
OPTIMAL = 0
INFEASIBLE = 1
UNBOUNDED = 2
ITER_LIMIT = 3

_INF = 1e30  # stands in for +inf on slack upper bounds inside the kernel
_PIVOT_TOL = 1e-10
_TIE_TOL = 1e-12


def _simplex_iterate(tab, cost, lo, hi, basis, stat, beta, allowed, max_iter):
    # Bounded-variable primal simplex sweep on a maintained tableau.
    # stat: 0 nonbasic-at-lower, 1 nonbasic-at-upper, 2 basic.
    # Entering and leaving variables follow Bland's smallest-index rule.
    m, ncols = tab.shape
    it = 0
    while it < max_iter:
        it += 1
        enter = -1
        direction = 1.0
        for j in range(ncols):
            if stat[j] == 2 or allowed[j] == 0:
                continue
            if hi[j] - lo[j] <= 0.0:
                continue
            if stat[j] == 0 and cost[j] > _PIVOT_TOL:
                enter = j
                direction = 1.0
                break
            if stat[j] == 1 and cost[j] < -_PIVOT_TOL:
                enter = j
                direction = -1.0
                break
        if enter == -1:
            return OPTIMAL

        tstar = hi[enter] - lo[enter]
        leave = -1
        leave_to_upper = False
        for i in range(m):
            coeff = direction * tab[i, enter]
            bi = basis[i]
            if coeff > _PIVOT_TOL:
                r = (beta[i] - lo[bi]) / coeff
                if r < 0.0:
                    r = 0.0
                if r < tstar - _TIE_TOL:
                    tstar = r
                    leave = i
                    leave_to_upper = False
                elif r < tstar + _TIE_TOL and leave >= 0 and bi < basis[leave]:
                    leave = i
                    leave_to_upper = False
            elif coeff < -_PIVOT_TOL:
                if hi[bi] < _INF:
                    r = (hi[bi] - beta[i]) / (-coeff)
                    if r < 0.0:
                        r = 0.0
                    if r < tstar - _TIE_TOL:
                        tstar = r
                        leave = i
                        leave_to_upper = True
                    elif r < tstar + _TIE_TOL and leave >= 0 and bi < basis[leave]:
                        leave = i
                        leave_to_upper = True
        if tstar >= _INF * 0.5:
            return UNBOUNDED

        for i in range(m):
            beta[i] -= direction * tstar * tab[i, enter]
        if leave == -1:
            stat[enter] = 1 - stat[enter]
            continue

        if stat[enter] == 0:
            enter_val = lo[enter] + direction * tstar
        else:
            enter_val = hi[enter] + direction * tstar
        left_var = basis[leave]
        if leave_to_upper:
            stat[left_var] = 1
        else:
            stat[left_var] = 0
        basis[leave] = enter
        stat[enter] = 2
        beta[leave] = enter_val

        piv = tab[leave, enter]
        inv = 1.0 / piv
        for j in range(ncols):
            tab[leave, j] *= inv
        for i in range(m):
            if i != leave:
                f = tab[i, enter]
                if f != 0.0:
                    for j in range(ncols):
                        tab[i, j] -= f * tab[leave, j]
        f = cost[enter]
        if f != 0.0:
            for j in range(ncols):
                cost[j] -= f * tab[leave, j]
    return ITER_LIMIT


def _simplex_core(c, A, b, max_iter):
    # maximize c.x  s.t.  A x <= b,  0 <= x <= 1.
    # Slacks get [0, inf) bounds; rows with negative rhs receive phase-1 artificials.
    m, n = A.shape
    nart = 0
    for i in range(m):
        if b[i] < 0.0:
            nart += 1
    ncols = n + m + nart
    tab = np.zeros((m, ncols))
    lo = np.zeros(ncols)
    hi = np.empty(ncols)
    for j in range(n):
        hi[j] = 1.0
    for j in range(n, ncols):
        hi[j] = _INF
    basis = np.empty(m, np.int64)
    stat = np.zeros(ncols, np.int64)
    beta = np.empty(m)
    allowed = np.ones(ncols, np.uint8)

    k = 0
    for i in range(m):
        sgn = 1.0
        if b[i] < 0.0:
            sgn = -1.0
        for j in range(n):
            tab[i, j] = sgn * A[i, j]
        tab[i, n + i] = sgn
        if b[i] < 0.0:
            art = n + m + k
            tab[i, art] = 1.0
            basis[i] = art
            beta[i] = -b[i]
            k += 1
        else:
            basis[i] = n + i
            beta[i] = b[i]
        stat[basis[i]] = 2

    if nart > 0:
        cost = np.zeros(ncols)
        for j in range(n + m, ncols):
            cost[j] = -1.0
        for i in range(m):
            cb = cost[basis[i]]
            if cb != 0.0:
                for j in range(ncols):
                    cost[j] -= cb * tab[i, j]
        st = _simplex_iterate(tab, cost, lo, hi, basis, stat, beta, allowed, max_iter)
        if st != OPTIMAL:
            return st, np.zeros(n)
        artsum = 0.0
        for i in range(m):
            if basis[i] >= n + m:
                artsum += beta[i]
        if artsum > 1e-8:
            return INFEASIBLE, np.zeros(n)
        for j in range(n + m, ncols):
            hi[j] = 0.0
            allowed[j] = 0

    cost = np.zeros(ncols)
    for j in range(n):
        cost[j] = c[j]
    for i in range(m):
        cb = cost[basis[i]]
        if cb != 0.0:
            for j in range(ncols):
                cost[j] -= cb * tab[i, j]
    st = _simplex_iterate(tab, cost, lo, hi, basis, stat, beta, allowed, max_iter)
    if st != OPTIMAL:
        return st, np.zeros(n)

    x = np.zeros(n)
    for j in range(n):
        if stat[j] == 1:
            x[j] = 1.0
    for i in range(m):
        bj = basis[i]
        if bj < n:
            v = beta[i]
            if v < 0.0:
                v = 0.0
            elif v > 1.0:
                v = 1.0
            x[bj] = v
    return OPTIMAL, x


def _round_batch(x, member, gstart, glen, unif, out):
    # Grouped pair rounding with the lowest-index-first pairing rule.
    # x: clean fractional point; member/gstart/glen: flat group layout covering
    # every coordinate; unif[s, gstart[g]+k]: k-th uniform consumed by group g
    # in sample s; out[s]: resulting binary vector.
    snap = 1e-12
    nsamp = unif.shape[0]
    n = x.shape[0]
    ngroups = gstart.shape[0]
    y = np.empty(n)
    for s in range(nsamp):
        for i in range(n):
            y[i] = x[i]
        for g in range(ngroups):
            base = gstart[g]
            glen_g = glen[g]
            used = 0
            p = 0
            while p < glen_g:
                a = member[base + p]
                if y[a] <= snap:
                    y[a] = 0.0
                elif y[a] >= 1.0 - snap:
                    y[a] = 1.0
                else:
                    break
                p += 1
            q = p + 1
            while q < glen_g:
                b = member[base + q]
                if y[b] <= snap:
                    y[b] = 0.0
                    q += 1
                    continue
                if y[b] >= 1.0 - snap:
                    y[b] = 1.0
                    q += 1
                    continue
                a = member[base + p]
                d1 = 1.0 - y[a]
                if y[b] < d1:
                    d1 = y[b]
                d2 = y[a]
                if 1.0 - y[b] < d2:
                    d2 = 1.0 - y[b]
                if unif[s, base + used] * (d1 + d2) < d2:
                    y[a] += d1
                    y[b] -= d1
                else:
                    y[a] -= d2
                    y[b] += d2
                used += 1
                if y[a] <= snap:
                    y[a] = 0.0
                elif y[a] >= 1.0 - snap:
                    y[a] = 1.0
                if y[b] <= snap:
                    y[b] = 0.0
                elif y[b] >= 1.0 - snap:
                    y[b] = 1.0
                a_frac = 0.0 < y[a] < 1.0
                b_frac = 0.0 < y[b] < 1.0
                if a_frac and b_frac:
                    # exact arithmetic rules this out; snap the side nearer a bound
                    da = y[a] if y[a] < 1.0 - y[a] else 1.0 - y[a]
                    db = y[b] if y[b] < 1.0 - y[b] else 1.0 - y[b]
                    if da <= db:
                        y[a] = 0.0 if y[a] < 0.5 else 1.0
                        a_frac = False
                    else:
                        y[b] = 0.0 if y[b] < 0.5 else 1.0
                        b_frac = False
                if a_frac:
                    q += 1
                elif b_frac:
                    p = q
                    q += 1
                else:
                    p = q + 1
                    q = p + 1
            if p < glen_g:
                a = member[base + p]
                if 0.0 < y[a] < 1.0:
                    if unif[s, base + used] < y[a]:
                        y[a] = 1.0
                    else:
                        y[a] = 0.0
                    used += 1
        for i in range(n):
            out[s, i] = 1 if y[i] > 0.5 else 0


_simplex_iterate_nb, _simplex_iterate_py = compile_kernel(_simplex_iterate)


def _bind_simplex(iterate):
    # Rebind the inner sweep so each build of the core calls its own build.
    import types

    g = dict(_simplex_core.__globals__)
    g["_simplex_iterate"] = iterate
    return types.FunctionType(_simplex_core.__code__, g, _simplex_core.__name__)


_simplex_core_nb, _ = compile_kernel(_bind_simplex(_simplex_iterate_nb)) if _simplex_iterate_nb is not None else (None, None)
_simplex_core_py = _bind_simplex(_simplex_iterate_py)
_round_batch_nb, _round_batch_py = compile_kernel(_round_batch)


def simplex_core(c, A, b, max_iter=20000, backend=None):
    """Dispatch the simplex to the active (or an explicit) backend."""
    use = backend or ACTIVE_BACKEND
    if use == "numba" and _simplex_core_nb is not None:
        return _simplex_core_nb(c, A, b, max_iter)
    return _simplex_core_py(c, A, b, max_iter)


def round_batch(x, member, gstart, glen, unif, out, backend=None):
    """Dispatch batched pair rounding to the active (or an explicit) backend."""
    use = backend or ACTIVE_BACKEND
    if use == "numba" and _round_batch_nb is not None:
        _round_batch_nb(x, member, gstart, glen, unif, out)
    else:
        _round_batch_py(x, member, gstart, glen, unif, out)
