"""Numba-compiled implementations of the hot inner loops.

Same signatures as ``_loops_numpy``. Accumulations use Kahan compensation
so large-n kernel sums stay stable; everything runs serially so repeated
runs are bit-reproducible.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

KID_BIQUADRATIC = 0
KID_UNIFORM = 1

STATUS_OK = 0
STATUS_NO_CONVERGENCE = 1


@njit(cache=True)
def _shape_scalar(r: float, kid: int) -> float:
    if r > 1.0:
        return 0.0
    if kid == KID_BIQUADRATIC:
        t = 1.0 - r * r
        return t * t
    return 1.0  # KID_UNIFORM


@njit(cache=True)
def weights_radial(X, x, h, kid, scale):
    n, p = X.shape
    w = np.empty(n)
    for i in range(n):
        s = 0.0
        for d in range(p):
            u = (x[d] - X[i, d]) / h
            s += u * u
        w[i] = _shape_scalar(math.sqrt(s), kid) * scale
    return w


@njit(cache=True)
def psi_sum(w, y, t, k):
    acc = 0.0
    comp = 0.0
    for i in range(w.shape[0]):
        if y[i] > t:
            if k == 0.0:
                term = w[i]
            else:
                term = w[i] * (y[i] - t) ** k
            v = term - comp
            s = acc + v
            comp = (s - acc) - v
            acc = s
    return acc


@njit(cache=True)
def split_sums(w, y, t):
    sp = 0.0
    cp = 0.0
    sm = 0.0
    cm = 0.0
    for i in range(w.shape[0]):
        d = y[i] - t
        if d > 0.0:
            v = w[i] * d - cp
            s = sp + v
            cp = (s - sp) - v
            sp = s
        elif d < 0.0:
            v = -w[i] * d - cm
            s = sm + v
            cm = (s - sm) - v
            sm = s
    return sp, sm


@njit(cache=True)
def expectile_root(w, y, one_minus_alpha, lo, hi, base_tol, max_iter):
    s_plus, s_minus = split_sums(w, y, lo)
    if s_plus <= one_minus_alpha * (s_plus + s_minus):
        return lo, 0, STATUS_OK
    it = 0
    while it < max_iter:
        mid = 0.5 * (lo + hi)
        if hi - lo <= base_tol * (1.0 + abs(mid)):
            return hi, it, STATUS_OK
        s_plus, s_minus = split_sums(w, y, mid)
        if s_plus <= one_minus_alpha * (s_plus + s_minus):
            hi = mid
        else:
            lo = mid
        it += 1
    return hi, it, STATUS_NO_CONVERGENCE


@njit(cache=True)
def cv_score(Xs, Ys, pos_gt, h, kid, scale):
    # Xs/Ys pre-sorted ascending in (Y, X): canonical accumulation order.
    n = Ys.shape[0]
    p = Xs.shape[1]
    score = 0.0
    comp = 0.0
    empties = 0
    w = np.empty(n)
    suffix = np.empty(n + 1)
    for i in range(n):
        for j in range(n):
            s = 0.0
            for d in range(p):
                u = (Xs[i, d] - Xs[j, d]) / h
                s += u * u
            w[j] = _shape_scalar(math.sqrt(s), kid) * scale
        w[i] = 0.0
        total = 0.0
        ct = 0.0
        for j in range(n):
            v = w[j] - ct
            s2 = total + v
            ct = (s2 - total) - v
            total = s2
        if total <= 0.0:
            empties += n
            for j in range(n):
                if Ys[i] >= Ys[j]:
                    v = 1.0 - comp
                    s2 = score + v
                    comp = (s2 - score) - v
                    score = s2
            continue
        suffix[n] = 0.0
        for t in range(n - 1, -1, -1):
            suffix[t] = suffix[t + 1] + w[t]
        for j in range(n):
            ind = 1.0 if Ys[i] >= Ys[j] else 0.0
            diff = ind - suffix[pos_gt[j]] / total
            v = diff * diff - comp
            s2 = score + v
            comp = (s2 - score) - v
            score = s2
    return score, empties
