"""Hot loops over finite spaces, in two builds.

A point of a finite space is an id in 0..p-1 and an n-tuple is packed into a
single integer code in base p with slot 1 most significant, so code order is
exactly lexicographic tuple order. All kernels take flat int64 tables:

    f_flat   value of F at every code, length p**n, C-order over slots
    g_tab    value of g at every point, length p
    rows0    0-based index matrix of the star operation, shape (n, n)
    leq      order table, leq[a, b] means a is below b, shape (p, p) bool
    g_leq    precomposed order on g-images, g_leq[a, b] = leq[g[a], g[b]]

Each kernel has a plain-loop build (compiled with numba when the backend
allows it) and a vectorized numpy build. Both return identical results,
including witness order: violations are reported in the loop order of the
plain build. benchmarks/bench_kernels.py times the two builds against each
other; _backend.BACKEND decides which one the package runs on.
"""

from __future__ import annotations

import numpy as np

from ._backend import NUMBA_ENABLED

# ---------------------------------------------------------------------------
# code packing helpers (numpy, shared by both backends)


def code_weights(p: int, n: int) -> np.ndarray:
    """Place values of the n slots: slot 0 is most significant."""
    return p ** np.arange(n - 1, -1, -1, dtype=np.int64)


def decode_codes(codes: np.ndarray, p: int, n: int) -> np.ndarray:
    """Unpack codes into digit rows, shape (len(codes), n)."""
    codes = np.asarray(codes, dtype=np.int64)
    return (codes[..., None] // code_weights(p, n)) % p


def encode_digits(digits: np.ndarray, p: int) -> np.ndarray:
    digits = np.asarray(digits, dtype=np.int64)
    return digits @ code_weights(p, digits.shape[-1])


def all_digit_rows(p: int, n: int) -> np.ndarray:
    """Every n-tuple over 0..p-1 as a (p**n, n) array, lexicographic."""
    return decode_codes(np.arange(p**n, dtype=np.int64), p, n)


# ---------------------------------------------------------------------------
# plain-loop builds (numba sources)


def _py_coincidence_mask(f_flat, g_tab, rows0, p, n):
    pn = f_flat.shape[0]
    w = np.empty(n, np.int64)
    for j in range(n):
        w[j] = p ** (n - 1 - j)
    out = np.zeros(pn, np.bool_)
    digits = np.empty(n, np.int64)
    for c in range(pn):
        r = c
        for j in range(n):
            digits[j] = r // w[j]
            r -= digits[j] * w[j]
        ok = True
        for i in range(n):
            fc = 0
            for k in range(n):
                fc += digits[rows0[i, k]] * w[k]
            if f_flat[fc] != g_tab[digits[i]]:
                ok = False
                break
        out[c] = ok
    return out


def _py_common_fixed_mask(f_flat, g_tab, rows0, p, n):
    pn = f_flat.shape[0]
    w = np.empty(n, np.int64)
    for j in range(n):
        w[j] = p ** (n - 1 - j)
    out = np.zeros(pn, np.bool_)
    digits = np.empty(n, np.int64)
    for c in range(pn):
        r = c
        for j in range(n):
            digits[j] = r // w[j]
            r -= digits[j] * w[j]
        ok = True
        for i in range(n):
            fc = 0
            for k in range(n):
                fc += digits[rows0[i, k]] * w[k]
            if f_flat[fc] != digits[i] or g_tab[digits[i]] != digits[i]:
                ok = False
                break
        out[c] = ok
    return out


def _py_fstar_codes(f_flat, rows0, p, n):
    pn = f_flat.shape[0]
    w = np.empty(n, np.int64)
    for j in range(n):
        w[j] = p ** (n - 1 - j)
    out = np.empty(pn, np.int64)
    digits = np.empty(n, np.int64)
    for c in range(pn):
        r = c
        for j in range(n):
            digits[j] = r // w[j]
            r -= digits[j] * w[j]
        acc = 0
        for i in range(n):
            fc = 0
            for k in range(n):
                fc += digits[rows0[i, k]] * w[k]
            acc += f_flat[fc] * w[i]
        out[c] = acc
    return out


def _py_bigg_codes(g_tab, p, n):
    pn = p**n
    w = np.empty(n, np.int64)
    for j in range(n):
        w[j] = p ** (n - 1 - j)
    out = np.empty(pn, np.int64)
    for c in range(pn):
        r = c
        acc = 0
        for j in range(n):
            d = r // w[j]
            r -= d * w[j]
            acc += g_tab[d] * w[j]
        out[c] = acc
    return out


def _py_monotone_violation(f_flat, g_leq, leq, p, n):
    pn = f_flat.shape[0]
    w = np.empty(n, np.int64)
    for j in range(n):
        w[j] = p ** (n - 1 - j)
    dx = np.empty(n, np.int64)
    dy = np.empty(n, np.int64)
    for cx in range(pn):
        r = cx
        for j in range(n):
            dx[j] = r // w[j]
            r -= dx[j] * w[j]
        for cy in range(pn):
            r = cy
            comp = True
            for j in range(n):
                dy[j] = r // w[j]
                r -= dy[j] * w[j]
            for j in range(n):
                if not g_leq[dx[j], dy[j]]:
                    comp = False
                    break
            if comp and not leq[f_flat[cx], f_flat[cy]]:
                return np.array([cx, cy], np.int64)
    return np.array([-1, -1], np.int64)


def _py_argumentwise_violation(f_flat, g_leq, leq, p, n):
    pn = f_flat.shape[0]
    w = np.empty(n, np.int64)
    for j in range(n):
        w[j] = p ** (n - 1 - j)
    pctx = pn // p
    digits = np.empty(n, np.int64)
    for slot in range(n):
        for u in range(p):
            for v in range(p):
                if not g_leq[u, v]:
                    continue
                for cc in range(pctx):
                    r = cc
                    pos = 0
                    for j in range(n):
                        if j == slot:
                            continue
                        q = p ** (n - 2 - pos)
                        digits[j] = r // q
                        r -= digits[j] * q
                        pos += 1
                    digits[slot] = u
                    cx = 0
                    for j in range(n):
                        cx += digits[j] * w[j]
                    cy = cx + (v - u) * w[slot]
                    if not leq[f_flat[cx], f_flat[cy]]:
                        return np.array([slot, cx, cy], np.int64)
    return np.array([-1, -1, -1], np.int64)


def _py_commuting_violation(f_flat, g_tab, p, n):
    pn = f_flat.shape[0]
    w = np.empty(n, np.int64)
    for j in range(n):
        w[j] = p ** (n - 1 - j)
    digits = np.empty(n, np.int64)
    for c in range(pn):
        r = c
        gc = 0
        for j in range(n):
            digits[j] = r // w[j]
            r -= digits[j] * w[j]
            gc += g_tab[digits[j]] * w[j]
        if g_tab[f_flat[c]] != f_flat[gc]:
            return c
    return -1


def _py_comparable_pair_codes(g_leq, p, n):
    pn = p**n
    w = np.empty(n, np.int64)
    for j in range(n):
        w[j] = p ** (n - 1 - j)
    dx = np.empty(n, np.int64)
    dy = np.empty(n, np.int64)
    count = 0
    for cx in range(pn):
        r = cx
        for j in range(n):
            dx[j] = r // w[j]
            r -= dx[j] * w[j]
        for cy in range(pn):
            r = cy
            comp = True
            for j in range(n):
                dy[j] = r // w[j]
                r -= dy[j] * w[j]
            for j in range(n):
                if not g_leq[dx[j], dy[j]]:
                    comp = False
                    break
            if comp:
                count += 1
    out = np.empty((count, 2), np.int64)
    kk = 0
    for cx in range(pn):
        r = cx
        for j in range(n):
            dx[j] = r // w[j]
            r -= dx[j] * w[j]
        for cy in range(pn):
            r = cy
            comp = True
            for j in range(n):
                dy[j] = r // w[j]
                r -= dy[j] * w[j]
            for j in range(n):
                if not g_leq[dx[j], dy[j]]:
                    comp = False
                    break
            if comp:
                out[kk, 0] = cx
                out[kk, 1] = cy
                kk += 1
    return out


# ---------------------------------------------------------------------------
# vectorized numpy builds


def _np_star_image_codes(digits, rows0, w):
    # codes of (U star i) for every code and every i, shape (p**n, n);
    # looped over i to keep the peak intermediate at p**n x n
    n = rows0.shape[0]
    out = np.empty((digits.shape[0], n), np.int64)
    for i in range(n):
        out[:, i] = digits[:, rows0[i]] @ w
    return out


def _np_coincidence_mask(f_flat, g_tab, rows0, p, n):
    digits = all_digit_rows(p, n)
    w = code_weights(p, n)
    star_codes = _np_star_image_codes(digits, rows0, w)
    return np.all(f_flat[star_codes] == g_tab[digits], axis=1)


def _np_common_fixed_mask(f_flat, g_tab, rows0, p, n):
    digits = all_digit_rows(p, n)
    w = code_weights(p, n)
    star_codes = _np_star_image_codes(digits, rows0, w)
    return np.all(
        (f_flat[star_codes] == digits) & (g_tab[digits] == digits), axis=1
    )


def _np_fstar_codes(f_flat, rows0, p, n):
    digits = all_digit_rows(p, n)
    w = code_weights(p, n)
    star_codes = _np_star_image_codes(digits, rows0, w)
    return f_flat[star_codes] @ w


def _np_bigg_codes(g_tab, p, n):
    digits = all_digit_rows(p, n)
    return g_tab[digits] @ code_weights(p, n)


def _np_monotone_violation(f_flat, g_leq, leq, p, n):
    pn = f_flat.shape[0]
    digits = all_digit_rows(p, n)
    for cx in range(pn):
        comp = np.all(g_leq[digits[cx], digits], axis=1)
        bad = comp & ~leq[f_flat[cx], f_flat]
        if bad.any():
            return np.array([cx, int(np.argmax(bad))], np.int64)
    return np.array([-1, -1], np.int64)


def _np_argumentwise_violation(f_flat, g_leq, leq, p, n):
    w = code_weights(p, n)
    f_nd = f_flat.reshape((p,) * n)
    for slot in range(n):
        f_moved = np.moveaxis(f_nd, slot, -1)
        for u in range(p):
            fu = f_moved[..., u].ravel()
            for v in range(p):
                if not g_leq[u, v]:
                    continue
                bad = ~leq[fu, f_moved[..., v].ravel()]
                if bad.any():
                    cc = int(np.argmax(bad))
                    ctx = decode_codes(np.array([cc]), p, n - 1)[0]
                    full = np.insert(ctx, slot, u)
                    cx = int(full @ w)
                    return np.array([slot, cx, cx + (v - u) * int(w[slot])], np.int64)
    return np.array([-1, -1, -1], np.int64)


def _np_commuting_violation(f_flat, g_tab, p, n):
    digits = all_digit_rows(p, n)
    g_codes = g_tab[digits] @ code_weights(p, n)
    bad = g_tab[f_flat] != f_flat[g_codes]
    return int(np.argmax(bad)) if bad.any() else -1


def _np_comparable_pair_codes(g_leq, p, n):
    digits = all_digit_rows(p, n)
    comp = np.ones((len(digits), len(digits)), dtype=bool)
    for j in range(n):
        comp &= g_leq[np.ix_(digits[:, j], digits[:, j])]
    cx, cy = np.nonzero(comp)
    return np.stack([cx, cy], axis=1).astype(np.int64)


# ---------------------------------------------------------------------------
# backend dispatch

_NUMPY_BUILD = {
    "coincidence_mask": _np_coincidence_mask,
    "common_fixed_mask": _np_common_fixed_mask,
    "fstar_codes": _np_fstar_codes,
    "bigg_codes": _np_bigg_codes,
    "monotone_violation": _np_monotone_violation,
    "argumentwise_violation": _np_argumentwise_violation,
    "commuting_violation": _np_commuting_violation,
    "comparable_pair_codes": _np_comparable_pair_codes,
}

if NUMBA_ENABLED:
    from numba import njit

    _jit = njit(cache=True)
    _NUMBA_BUILD = {
        "coincidence_mask": _jit(_py_coincidence_mask),
        "common_fixed_mask": _jit(_py_common_fixed_mask),
        "fstar_codes": _jit(_py_fstar_codes),
        "bigg_codes": _jit(_py_bigg_codes),
        "monotone_violation": _jit(_py_monotone_violation),
        "argumentwise_violation": _jit(_py_argumentwise_violation),
        "commuting_violation": _jit(_py_commuting_violation),
        "comparable_pair_codes": _jit(_py_comparable_pair_codes),
    }
else:
    _NUMBA_BUILD = None

_ACTIVE = _NUMBA_BUILD if NUMBA_ENABLED else _NUMPY_BUILD

coincidence_mask = _ACTIVE["coincidence_mask"]
common_fixed_mask = _ACTIVE["common_fixed_mask"]
fstar_codes = _ACTIVE["fstar_codes"]
bigg_codes = _ACTIVE["bigg_codes"]
monotone_violation = _ACTIVE["monotone_violation"]
argumentwise_violation = _ACTIVE["argumentwise_violation"]
commuting_violation = _ACTIVE["commuting_violation"]
comparable_pair_codes = _ACTIVE["comparable_pair_codes"]

#: both builds, for benchmarks and cross-checks; numba entry is None when
#: the compiler is unavailable
IMPLEMENTATIONS = {"numpy": _NUMPY_BUILD, "numba": _NUMBA_BUILD}
