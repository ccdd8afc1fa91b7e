"""Pure-Python sparse elimination kernel.

This is the fallback used when the compiled ``_elim`` extension is not
available, and the reference the extension is tested against.  Both expose
the same function, :func:`unit_eliminate`.

The kernel peels off every pivot that is a unit of the coefficient ring and
hands back the rows that could not be turned into unit pivots.  For a matrix
``A`` with ``k`` unit pivots and residual rows ``R`` we have

    SNF(A) = diag(1, ..., 1) (k ones)  (+)  SNF(R)

because the pivot block is unitriangular and ``R`` vanishes on every pivot
column.  ``R`` is usually tiny for the combinatorial matrices this package
builds, so the expensive part of a Smith form happens here.
"""

import heapq

import numpy as np


def _is_unit(value, modulus, prime):
    if modulus == 0:
        return value == 1 or value == -1
    return value % prime != 0


def _unit_inverse(value, modulus):
    if modulus == 0:
        return value  # +1 or -1 is its own inverse
    return pow(value, -1, modulus)


def unit_eliminate(indptr, indices, data, ncols, modulus=0, prime=0):
    """Eliminate all unit pivots of a CSR matrix.

    ``modulus == 0`` works over the integers (units are +1 and -1, entries are
    exact Python integers).  Otherwise ``modulus`` must be a power of
    ``prime`` and arithmetic is done in ``Z/modulus``, where the units are
    the entries prime to ``prime``.

    Returns ``(npivots, res_indptr, res_indices, res_data)``; the residual rows
    contain no unit entries and are zero on every pivot column.
    """
    pivot_rows = []          # list of dict col -> value, pivot entry normalised to 1
    pivot_col = []           # insertion index -> column
    pivot_of = {}            # column -> insertion index
    residual = []

    def reduce(row):
        heap = [pivot_of[c] for c in row if c in pivot_of]
        heapq.heapify(heap)
        queued = set(heap)
        while heap:
            h = heapq.heappop(heap)
            queued.discard(h)
            c = pivot_col[h]
            t = row.get(c, 0)
            if t == 0:
                continue
            for cc, v in pivot_rows[h].items():
                nv = row.get(cc, 0) - t * v
                if modulus:
                    nv %= modulus
                if nv:
                    row[cc] = nv
                    g = pivot_of.get(cc)
                    if g is not None and g > h and g not in queued:
                        heapq.heappush(heap, g)
                        queued.add(g)
                else:
                    row.pop(cc, None)
        return row

    def try_pivot(row):
        unit_cols = [c for c, v in row.items() if _is_unit(v, modulus, prime)]
        if not unit_cols:
            return False
        c = min(unit_cols)
        inv = _unit_inverse(row[c], modulus)
        if modulus:
            normed = {cc: v * inv % modulus for cc, v in row.items()}
        else:
            normed = {cc: v * inv for cc, v in row.items()}
        pivot_of[c] = len(pivot_rows)
        pivot_col.append(c)
        pivot_rows.append(normed)
        return True

    indptr = np.asarray(indptr)
    indices = np.asarray(indices)
    for r in range(len(indptr) - 1):
        lo, hi = int(indptr[r]), int(indptr[r + 1])
        row = {}
        for k in range(lo, hi):
            v = int(data[k])
            if modulus:
                v %= modulus
            if v:
                c = int(indices[k])
                row[c] = row.get(c, 0) + v
        if modulus:
            row = {c: v % modulus for c, v in row.items() if v % modulus}
        else:
            row = {c: v for c, v in row.items() if v}
        row = reduce(row)
        if not row:
            continue
        if not try_pivot(row):
            residual.append(row)

    # later pivots may meet earlier residual rows; sweep until nothing moves
    changed = True
    while changed and residual:
        changed = False
        kept = []
        for row in residual:
            row = reduce(row)
            if not row:
                continue
            if try_pivot(row):
                changed = True
            else:
                kept.append(row)
        residual = kept

    res_indptr = [0]
    res_indices = []
    res_data = []
    for row in residual:
        for c in sorted(row):
            res_indices.append(c)
            res_data.append(row[c])
        res_indptr.append(len(res_indices))
    return len(pivot_rows), res_indptr, res_indices, res_data
