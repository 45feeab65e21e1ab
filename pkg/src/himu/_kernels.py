"""Hot numeric kernels with two interchangeable backends.

Every kernel has a pure-numpy implementation and a numba ``@njit`` twin.
The active backend is chosen at import time by the ``HIMU_BACKEND``
environment variable:

* unset or ``auto``: numba when importable, numpy otherwise
* ``numpy``: force the fallback path
* ``numba``: require numba (raises if unavailable)

``IMPLEMENTATIONS`` exposes both variants of each kernel so tests and the
kernel benchmark can compare them directly.
"""
from __future__ import annotations

import math
import os

import numpy as np

_CHOICE = os.environ.get("HIMU_BACKEND", "auto").lower()
if _CHOICE not in ("auto", "numba", "numpy"):
    raise ValueError(f"HIMU_BACKEND must be auto|numba|numpy, got {_CHOICE!r}")

_HAVE_NUMBA = False
if _CHOICE != "numpy":
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:
        if _CHOICE == "numba":
            raise

if not _HAVE_NUMBA:
    def njit(*args, **kwargs):  # no-op decorator so the twins stay importable
        def wrap(fn):
            return fn
        return wrap if not args or not callable(args[0]) else args[0]


BACKEND = "numba" if _HAVE_NUMBA else "numpy"


def _as_f64(x):
    return np.ascontiguousarray(np.asarray(x, dtype=np.float64))


# --- Gaussian smoothing -------------------------------------------------------
#
# Default mode: kernel truncated at radius ceil(4*sigma), weights renormalized
# over the in-bounds support at every position, so constants survive at the
# boundaries. Strict mode: analytically normalized Gaussian summed over the
# whole timeline; boundary frames come out under-weighted, which is the
# behavior the renormalized mode exists to avoid.


def _smooth_renorm_numpy(x, sigma):
    T = x.shape[0]
    r = int(math.ceil(4.0 * sigma))
    if 2 * r + 1 <= T:
        d = np.arange(-r, r + 1, dtype=np.float64)
        w = np.exp(-0.5 * (d / sigma) ** 2)
        num = np.convolve(x, w, mode="same")
        den = np.convolve(np.ones(T), w, mode="same")
        return num / den
    # short signal: dense truncated weight matrix
    d = np.subtract.outer(np.arange(T), np.arange(T)).astype(np.float64)
    w = np.where(np.abs(d) <= r, np.exp(-0.5 * (d / sigma) ** 2), 0.0)
    return (w @ x) / w.sum(axis=1)


@njit(cache=True)
def _smooth_renorm_numba(x, sigma):
    T = x.shape[0]
    r = int(math.ceil(4.0 * sigma))
    w = np.empty(2 * r + 1)
    for d in range(-r, r + 1):
        w[d + r] = math.exp(-0.5 * (d / sigma) ** 2)
    out = np.empty(T)
    for t in range(T):
        lo = t - r if t - r > 0 else 0
        hi = t + r if t + r < T - 1 else T - 1
        num = 0.0
        den = 0.0
        for s in range(lo, hi + 1):
            ws = w[s - t + r]
            num += ws * x[s]
            den += ws
        out[t] = num / den
    return out


def _smooth_strict_numpy(x, sigma):
    T = x.shape[0]
    d = np.arange(-(T - 1), T, dtype=np.float64)
    w = np.exp(-0.5 * (d / sigma) ** 2) / (math.sqrt(2.0 * math.pi) * sigma)
    return np.convolve(x, w)[T - 1 : 2 * T - 1]


@njit(cache=True)
def _smooth_strict_numba(x, sigma):
    T = x.shape[0]
    norm = 1.0 / (math.sqrt(2.0 * math.pi) * sigma)
    # One weight per possible offset, computed once; the double loop then
    # only multiplies and adds.
    weights = np.empty(T)
    for d in range(T):
        weights[d] = math.exp(-0.5 * (d / sigma) ** 2)
    out = np.empty(T)
    for t in range(T):
        acc = 0.0
        for s in range(T):
            d = t - s if t >= s else s - t
            acc += x[s] * weights[d]
        out[t] = acc * norm
    return out


# --- SEQ composition ----------------------------------------------------------
#
# Given step curves u[0..L-1] in chronological order, a step can fire at t only
# if every earlier step has already peaked strictly before t and every later
# step still peaks strictly after t. Empty ranges score 0.


def _seq_numpy(u):
    has_occurred = np.zeros_like(u)
    yet_to_occur = np.zeros_like(u)
    has_occurred[:, 1:] = np.maximum.accumulate(u[:, :-1], axis=1)
    yet_to_occur[:, :-1] = np.maximum.accumulate(u[:, :0:-1], axis=1)[:, ::-1]
    before = np.ones_like(u)
    after = np.ones_like(u)
    before[1:] = np.cumprod(has_occurred[:-1], axis=0)
    after[:-1] = np.cumprod(yet_to_occur[:0:-1], axis=0)[::-1]
    return (u * before * after).max(axis=0)


@njit(cache=True)
def _seq_numba(u):
    L, T = u.shape
    H = np.zeros((L, T))
    F = np.zeros((L, T))
    for j in range(L):
        run = 0.0
        for t in range(1, T):
            if u[j, t - 1] > run:
                run = u[j, t - 1]
            H[j, t] = run
        run = 0.0
        for t in range(T - 2, -1, -1):
            if u[j, t + 1] > run:
                run = u[j, t + 1]
            F[j, t] = run
    out = np.zeros(T)
    for t in range(T):
        prefix = 1.0
        best = 0.0
        for step in range(L):
            suffix = 1.0
            for j in range(step + 1, L):
                suffix *= F[j, t]
            term = u[step, t] * prefix * suffix
            if term > best:
                best = term
            prefix *= H[step, t]
        out[t] = best
    return out


# --- RIGHT_AFTER --------------------------------------------------------------
#
# Exponential-decay pairing of a cause curve with an effect curve, O(T) via
# forward/backward accumulators instead of the O(T^2) direct sums.


def _right_after_numpy(cause, effect, kappa):
    T = cause.shape[0]
    decay = math.exp(-kappa)
    s_effect = np.empty(T)
    s_cause = np.empty(T)
    acc = 0.0
    for t in range(T):
        s_effect[t] = effect[t] * acc
        acc = (acc + cause[t]) * decay
    acc = 0.0
    for t in range(T - 1, -1, -1):
        s_cause[t] = cause[t] * acc
        acc = (acc + effect[t]) * decay
    return np.maximum(s_effect, s_cause)


@njit(cache=True)
def _right_after_numba(cause, effect, kappa):
    T = cause.shape[0]
    decay = math.exp(-kappa)
    out = np.empty(T)
    acc = 0.0
    for t in range(T):
        out[t] = effect[t] * acc
        acc = (acc + cause[t]) * decay
    acc = 0.0
    for t in range(T - 1, -1, -1):
        back = cause[t] * acc
        if back > out[t]:
            out[t] = back
        acc = (acc + effect[t]) * decay
    return out


IMPLEMENTATIONS = {
    "smooth_renorm": {"numpy": _smooth_renorm_numpy, "numba": _smooth_renorm_numba},
    "smooth_strict": {"numpy": _smooth_strict_numpy, "numba": _smooth_strict_numba},
    "seq": {"numpy": _seq_numpy, "numba": _seq_numba},
    "right_after": {"numpy": _right_after_numpy, "numba": _right_after_numba},
}

_smooth_renorm = IMPLEMENTATIONS["smooth_renorm"][BACKEND]
_smooth_strict = IMPLEMENTATIONS["smooth_strict"][BACKEND]
_seq = IMPLEMENTATIONS["seq"][BACKEND]
_right_after = IMPLEMENTATIONS["right_after"][BACKEND]


def smooth_renorm(x, sigma: float) -> np.ndarray:
    return _smooth_renorm(_as_f64(x), float(sigma))


def smooth_strict(x, sigma: float) -> np.ndarray:
    return _smooth_strict(_as_f64(x), float(sigma))


def seq_compose(u) -> np.ndarray:
    return _seq(_as_f64(u))


def right_after_compose(cause, effect, kappa: float) -> np.ndarray:
    return _right_after(_as_f64(cause), _as_f64(effect), float(kappa))
