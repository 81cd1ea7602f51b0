"""Compiled inner loop for the signed Latin-square census.

Iterative backtracking over the cells of rows start_row..n-1, one symbol per
cell, with per-column availability bitmasks and an incrementally maintained
sign parity (row and column inversions are counted as each cell is placed).
Mirrors latin._signed_sum_py exactly; totals must be bitwise identical.

Importing this module requires numba; latin.py treats it as optional.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_POP8 = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)
_LOG2 = np.zeros(256, dtype=np.int64)
for _i in range(8):
    _LOG2[1 << _i] = _i


@njit(cache=True)
def subtree_sum(n, start_row, cols, fixed_diag, parity0):  # pragma: no cover
    full = (1 << n) - 1
    diag_bit = 1 << (n - 1)
    ncells = (n - start_row) * n
    if ncells <= 0:
        return 1 - 2 * (parity0 & 1)

    cand = np.zeros(ncells, dtype=np.int64)
    placed = np.zeros(ncells, dtype=np.int64)
    row_before = np.zeros(ncells, dtype=np.int64)
    par = np.zeros(ncells + 1, dtype=np.int64)
    par[0] = parity0 & 1

    colidx = np.zeros(ncells, dtype=np.int64)
    rowidx = np.zeros(ncells, dtype=np.int64)
    for t in range(ncells):
        rowidx[t] = start_row + t // n
        colidx[t] = t % n

    total = np.int64(0)
    row_used = np.int64(0)
    pos = 0
    row_before[0] = 0
    avail = full & ~cols[0]
    if fixed_diag:
        if rowidx[0] == 0:
            avail &= diag_bit
        else:
            avail &= ~diag_bit
    cand[0] = avail

    while pos >= 0:
        c = cand[pos]
        if c == 0:
            pos -= 1
            if pos >= 0:
                b = placed[pos]
                cols[colidx[pos]] ^= b
                row_used = row_before[pos]
            continue
        b = c & (-c)
        cand[pos] = c ^ b
        s = _LOG2[b]
        j = colidx[pos]
        inv = _POP8[row_used >> (s + 1)] + _POP8[cols[j] >> (s + 1)]
        newpar = par[pos] ^ (inv & 1)
        if pos + 1 == ncells:
            total += 1 - 2 * newpar
            continue
        placed[pos] = b
        cols[j] |= b
        par[pos + 1] = newpar
        nxt = pos + 1
        if colidx[nxt] == 0:
            nr = np.int64(0)
        else:
            nr = row_used | b
        row_before[nxt] = nr
        row_used = nr
        avail = full & ~(cols[colidx[nxt]] | nr)
        if fixed_diag:
            if rowidx[nxt] == colidx[nxt]:
                avail &= diag_bit
            else:
                avail &= ~diag_bit
        cand[nxt] = avail
        pos = nxt

    return total


def subtree_sum_from(n: int, start_row: int, col_masks, fixed_diag: bool, parity0: int) -> int:
    cols = np.array(col_masks, dtype=np.int64)
    return int(subtree_sum(n, start_row, cols, bool(fixed_diag), parity0 & 1))
