"""Pure-Python/numpy twins of the compiled kernels in ``_kernels.pyx``."""

from __future__ import annotations

import numpy as np

I_FIRST, I_LAST, I_OTHERS = 0, 1, 2
E_FIRST, E_SECOND, E_SECOND_LAST, E_LAST, E_OTHERS = 3, 4, 5, 6, 7


def _intra(n: int, s: np.ndarray) -> list[float]:
    if n == 1:
        return [1.0]
    if n == 2:
        total = s[I_FIRST] + s[I_LAST]
        return [s[I_FIRST] / total, s[I_LAST] / total]
    share = s[I_OTHERS] / (n - 2)
    return [s[I_FIRST]] + [share] * (n - 2) + [s[I_LAST]]


def _extra(n: int, s: np.ndarray) -> list[float]:
    if n == 1:
        return [1.0]
    if n <= 4:
        # vacant roles: the rest are rescaled to keep the unit of credit
        roles = {
            2: (E_FIRST, E_LAST),
            3: (E_FIRST, E_SECOND, E_LAST),
            4: (E_FIRST, E_SECOND, E_SECOND_LAST, E_LAST),
        }[n]
        total = 0.0
        for r in roles:
            total += s[r]
        return [s[r] / total for r in roles]
    share = s[E_OTHERS] / (n - 4)
    return (
        [s[E_FIRST], s[E_SECOND]]
        + [share] * (n - 4)
        + [s[E_SECOND_LAST], s[E_LAST]]
    )


def allocate_weighted(sizes, intra, scheme) -> np.ndarray:
    sizes = np.asarray(sizes, dtype=np.int64)
    intra = np.asarray(intra, dtype=np.uint8)
    s = np.asarray(scheme, dtype=np.float64).tolist()
    out = np.empty(int(sizes.sum()), dtype=np.float64)
    off = 0
    for n, im in zip(sizes.tolist(), intra.tolist()):
        out[off:off + n] = _intra(n, s) if im else _extra(n, s)
        off += n
    return out


def allocate_fractional(sizes) -> np.ndarray:
    sizes = np.asarray(sizes, dtype=np.int64)
    return np.repeat(1.0 / sizes.astype(np.float64), sizes)


def accumulate(slot_researcher, slot_pub, w_weighted, w_fractional, pub_impact, n_researchers: int) -> np.ndarray:
    rix = np.asarray(slot_researcher, dtype=np.int64)
    pix = np.asarray(slot_pub, dtype=np.int64)
    ww = np.asarray(w_weighted, dtype=np.float64)
    wf = np.asarray(w_fractional, dtype=np.float64)
    c = np.asarray(pub_impact, dtype=np.float64)[pix]

    keep = rix >= 0
    rix, ww, wf, c = rix[keep], ww[keep], wf[keep], c[keep]
    acc = np.zeros((6, n_researchers), dtype=np.float64)
    # ufunc.at is unbuffered and walks indices in order, like the compiled loop
    np.add.at(acc[0], rix, ww)
    np.add.at(acc[1], rix, wf)
    np.add.at(acc[2], rix, 1.0)
    np.add.at(acc[3], rix, c * ww)
    np.add.at(acc[4], rix, c * wf)
    np.add.at(acc[5], rix, c)
    return acc


def average_ranks(values) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64)
    n = v.shape[0]
    order = np.argsort(v, kind="mergesort")
    sv = v[order]
    starts = np.flatnonzero(np.r_[True, sv[1:] != sv[:-1]])
    ends = np.r_[starts[1:], n] - 1
    avg = 0.5 * (starts + ends) + 1.0
    out = np.empty(n, dtype=np.float64)
    out[order] = np.repeat(avg, ends - starts + 1)
    return out
