"""JIT inner loop for trajectory evolution.

The sweep keeps two synchronized views of the tableau:

* row-major packed bit planes ``X``, ``Z``: (kmax, W) uint64, one row per
  generator, plus per-row phases;
* column bitsets ``CX``, ``CZ``: (n, KW) uint64, bit r of column q says
  whether row r touches qubit q with an X (resp. Z) factor.

A dephasing location with operator m then costs O(|supp m| * KW) words to
form the anticommutation bitset (XOR of the matching columns), after which
only the few anticommuting rows are edited.  Deleted pivots have their bits
cleared from the columns, so the columns always describe exactly the alive
rows; this is what makes a full L=50 square-lattice sweep run in
milliseconds.

Row edits replicate StabilizerMixedState.dephase exactly (same pivot rule,
same multiplication order, same sign bookkeeping), which is asserted by the
engine-equivalence tests.
"""

import numpy as np
from numba import njit

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_ONE = np.uint64(1)
_ZERO = np.uint64(0)


@njit(cache=True, inline="always")
def _popcnt(v):
    v = v - ((v >> np.uint64(1)) & _M1)
    v = (v & _M2) + ((v >> np.uint64(2)) & _M2)
    v = (v + (v >> np.uint64(4))) & _M4
    return (v * _H01) >> np.uint64(56)


@njit(cache=True)
def dephase_sweep(X, Z, phase, alive, CX, CZ, applied, op_nsites, op_sites, op_x, op_z):
    """Apply every flagged dephasing location in order; returns rows removed."""
    n_ops = applied.shape[0]
    W = X.shape[1]
    KW = CX.shape[1]
    B = np.zeros(KW, dtype=np.uint64)
    removed = 0
    for o in range(n_ops):
        if applied[o] == 0:
            continue
        for w in range(KW):
            B[w] = _ZERO
        for t in range(op_nsites[o]):
            s = op_sites[o, t]
            if op_z[o, t] == 1:
                for w in range(KW):
                    B[w] ^= CX[s, w]
            if op_x[o, t] == 1:
                for w in range(KW):
                    B[w] ^= CZ[s, w]
        pivot = -1
        p_ph = 0
        yp = 0
        for w in range(KW):
            word = B[w]
            while word != _ZERO:
                low = word & (_ZERO - word)
                word ^= low
                r = (w << 6) + int(_popcnt(low - _ONE))
                if pivot < 0:
                    pivot = r
                    p_ph = int(phase[pivot])
                    yp = 0
                    for ww in range(W):
                        yp += int(_popcnt(X[pivot, ww] & Z[pivot, ww]))
                    continue
                # fold the pivot into row r, phase-exact
                par = 0
                y1 = 0
                yn = 0
                for ww in range(W):
                    par += int(_popcnt(Z[r, ww] & X[pivot, ww]))
                    y1 += int(_popcnt(X[r, ww] & Z[r, ww]))
                    X[r, ww] ^= X[pivot, ww]
                    Z[r, ww] ^= Z[pivot, ww]
                    yn += int(_popcnt(X[r, ww] & Z[r, ww]))
                phase[r] = np.uint8(
                    (int(phase[r]) + p_ph + 2 * (par & 1) + y1 + yp - yn) & 3
                )
                # row r changed by the pivot's support: toggle its column bits
                rw = r >> 6
                rb = _ONE << np.uint64(r & 63)
                for ww in range(W):
                    xw = X[pivot, ww]
                    while xw != _ZERO:
                        lb = xw & (_ZERO - xw)
                        xw ^= lb
                        q = (ww << 6) + int(_popcnt(lb - _ONE))
                        CX[q, rw] ^= rb
                    zw = Z[pivot, ww]
                    while zw != _ZERO:
                        lb = zw & (_ZERO - zw)
                        zw ^= lb
                        q = (ww << 6) + int(_popcnt(lb - _ONE))
                        CZ[q, rw] ^= rb
        if pivot >= 0:
            pw = pivot >> 6
            npb = ~(_ONE << np.uint64(pivot & 63))
            for ww in range(W):
                xw = X[pivot, ww]
                while xw != _ZERO:
                    lb = xw & (_ZERO - xw)
                    xw ^= lb
                    q = (ww << 6) + int(_popcnt(lb - _ONE))
                    CX[q, pw] &= npb
                zw = Z[pivot, ww]
                while zw != _ZERO:
                    lb = zw & (_ZERO - zw)
                    zw ^= lb
                    q = (ww << 6) + int(_popcnt(lb - _ONE))
                    CZ[q, pw] &= npb
            alive[pivot] = 0
            removed += 1
    return removed
