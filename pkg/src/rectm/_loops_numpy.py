"""Pure-numpy implementations of the hot inner loops.

Signature-identical to ``_loops_numba``; selected through ``rectm._backend``
(env var ``RECTM_BACKEND=numpy`` forces this module).
"""

from __future__ import annotations

import numpy as np

# Built-in radial kernel shapes, unnormalized. The caller multiplies by
# scale = norm_const / h^p.
KID_BIQUADRATIC = 0
KID_UNIFORM = 1

STATUS_OK = 0
STATUS_NO_CONVERGENCE = 1


def _shape(r: np.ndarray, kid: int) -> np.ndarray:
    inside = r <= 1.0
    if kid == KID_BIQUADRATIC:
        t = 1.0 - r * r
        return np.where(inside, t * t, 0.0)
    if kid == KID_UNIFORM:
        return np.where(inside, 1.0, 0.0)
    raise ValueError(f"unknown kernel id {kid}")


def weights_radial(X: np.ndarray, x: np.ndarray, h: float, kid: int, scale: float) -> np.ndarray:
    """Kernel weights K((x - X_i)/h)/h^p for a built-in radial kernel."""
    diff = (X - x[np.newaxis, :]) / h
    r = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    return _shape(r, kid) * scale


def psi_sum(w: np.ndarray, y: np.ndarray, t: float, k: float) -> float:
    """Sum of w_i * (y_i - t)^k over observations with y_i > t."""
    mask = y > t
    if k == 0.0:
        return float(np.sum(w[mask]))
    return float(np.sum(w[mask] * (y[mask] - t) ** k))


def split_sums(w: np.ndarray, y: np.ndarray, t: float) -> tuple[float, float]:
    """(sum w_i (y_i - t)_+, sum w_i (t - y_i)_+)."""
    d = y - t
    s_plus = float(np.sum(w * np.maximum(d, 0.0)))
    s_minus = float(np.sum(w * np.maximum(-d, 0.0)))
    return s_plus, s_minus


def expectile_root(
    w: np.ndarray,
    y: np.ndarray,
    one_minus_alpha: float,
    lo: float,
    hi: float,
    base_tol: float,
    max_iter: int,
) -> tuple[float, int, int]:
    """Bisect for inf{t : G(t) <= 1 - alpha} with G = s_plus/(s_plus + s_minus).

    G is the survival ratio in its cancellation-free form; the bracket must
    satisfy G(hi) <= 1 - alpha. Returns (root, iterations, status).
    """
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


def cv_score(
    Xs: np.ndarray,
    Ys: np.ndarray,
    pos_gt: np.ndarray,
    h: float,
    kid: int,
    scale: float,
) -> tuple[float, int]:
    """Leave-one-out survival cross-validation score for one bandwidth.

    Xs/Ys must be pre-sorted ascending in (Y, X) so the accumulation order
    is canonical (the score is then exactly permutation invariant).
    pos_gt[j] indexes the first entry with Y > Ys[j], so suffix weight sums
    give the exceedance numerators in O(n) per left-out observation.
    Empty leave-one-out neighborhoods contribute a zero survival value and
    are counted per evaluation.
    """
    n = Ys.shape[0]
    score = 0.0
    empties = 0
    suffix = np.empty(n + 1)
    for i in range(n):
        w = weights_radial(Xs, Xs[i], h, kid, scale)
        w[i] = 0.0
        total = float(np.sum(w))
        ind = (Ys[i] >= Ys).astype(np.float64)
        if total <= 0.0:
            empties += n
            score += float(np.sum(ind * ind))
            continue
        suffix[n] = 0.0
        suffix[:n] = np.cumsum(w[::-1])[::-1]
        d = ind - suffix[pos_gt] / total
        score += float(np.sum(d * d))
    return score, empties
