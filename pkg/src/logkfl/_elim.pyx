# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled sparse unit-pivot elimination (see ``_elim_py`` for the algorithm).

Values are held in 64-bit integers.  In integer mode every multiply-add is
overflow checked and an ``OverflowError`` is raised so the caller can retry
with the exact pure-Python kernel.  Modular mode requires ``modulus < 2**31``.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t
from libcpp.vector cimport vector
from libcpp.queue cimport priority_queue

cdef extern from *:
    """
    #include <cstdint>
    static inline int logkfl_mul_add(int64_t a, int64_t t, int64_t v, int64_t *out) {
        int64_t prod;
        if (__builtin_mul_overflow(t, v, &prod)) return 1;
        if (__builtin_sub_overflow(a, prod, out)) return 1;
        return 0;
    }
    """
    int logkfl_mul_add(int64_t a, int64_t t, int64_t v, int64_t *out) nogil


cdef inline int64_t _mod(int64_t a, int64_t m) noexcept nogil:
    cdef int64_t r = a % m
    if r < 0:
        r += m
    return r


cdef int64_t _inverse(int64_t a, int64_t m) noexcept nogil:
    cdef int64_t t = 0, newt = 1, r = m, newr = _mod(a, m), q, tmp
    while newr != 0:
        q = r // newr
        tmp = t - q * newt
        t = newt
        newt = tmp
        tmp = r - q * newr
        r = newr
        newr = tmp
    if t < 0:
        t += m
    return t


cdef class _Eliminator:
    cdef int64_t ncols, modulus, prime
    cdef vector[vector[int64_t]] pcols
    cdef vector[vector[int64_t]] pvals
    cdef vector[int64_t] pivot_col
    cdef vector[int64_t] pivot_of
    cdef vector[int64_t] work
    cdef vector[char] touched_flag
    cdef vector[char] queued
    cdef vector[int64_t] touched

    def __cinit__(self, int64_t ncols, int64_t modulus, int64_t prime):
        self.ncols = ncols
        self.modulus = modulus
        self.prime = prime
        self.pivot_of.assign(ncols, -1)
        self.work.assign(ncols, 0)
        self.touched_flag.assign(ncols, 0)
        self.queued.assign(ncols, 0)

    cdef inline bint _is_unit(self, int64_t v) noexcept nogil:
        if self.modulus == 0:
            return v == 1 or v == -1
        return v % self.prime != 0

    cdef inline void _touch(self, int64_t c) noexcept nogil:
        if not self.touched_flag[c]:
            self.touched_flag[c] = 1
            self.touched.push_back(c)

    cdef int _reduce(self) except -1 nogil:
        # reduce the row held in work/touched against all pivots;
        # the heap stores negated insertion indices (max-heap as min-heap)
        cdef priority_queue[int64_t] heap
        cdef size_t k
        cdef int64_t c, h, t, cc, nv, g
        for k in range(self.touched.size()):
            c = self.touched[k]
            if self.work[c] != 0 and self.pivot_of[c] >= 0 and not self.queued[c]:
                self.queued[c] = 1
                heap.push(-self.pivot_of[c])
        while not heap.empty():
            h = -heap.top()
            heap.pop()
            c = self.pivot_col[h]
            self.queued[c] = 0
            t = self.work[c]
            if t == 0:
                continue
            for k in range(self.pcols[h].size()):
                cc = self.pcols[h][k]
                if self.modulus:
                    nv = _mod(self.work[cc] - _mod(t * self.pvals[h][k], self.modulus), self.modulus)
                else:
                    if logkfl_mul_add(self.work[cc], t, self.pvals[h][k], &nv):
                        with gil:
                            raise OverflowError("entry exceeds 64 bits")
                self.work[cc] = nv
                self._touch(cc)
                if nv != 0:
                    g = self.pivot_of[cc]
                    if g > h and not self.queued[cc]:
                        self.queued[cc] = 1
                        heap.push(-g)
        return 0

    cdef bint _try_pivot(self) noexcept nogil:
        cdef size_t k
        cdef int64_t c, best = -1, inv, v
        cdef vector[int64_t] cols
        cdef vector[int64_t] vals
        for k in range(self.touched.size()):
            c = self.touched[k]
            if self.work[c] != 0 and self._is_unit(self.work[c]):
                if best < 0 or c < best:
                    best = c
        if best < 0:
            return False
        if self.modulus:
            inv = _inverse(self.work[best], self.modulus)
        else:
            inv = self.work[best]
        for k in range(self.touched.size()):
            c = self.touched[k]
            v = self.work[c]
            if v != 0:
                cols.push_back(c)
                if self.modulus:
                    vals.push_back(_mod(v * inv, self.modulus))
                else:
                    vals.push_back(v * inv)
        self.pivot_of[best] = <int64_t> self.pcols.size()
        self.pivot_col.push_back(best)
        self.pcols.push_back(cols)
        self.pvals.push_back(vals)
        return True

    cdef void _clear(self) noexcept nogil:
        cdef size_t k
        cdef int64_t c
        for k in range(self.touched.size()):
            c = self.touched[k]
            self.work[c] = 0
            self.touched_flag[c] = 0
        self.touched.clear()

    cdef void _harvest(self, vector[int64_t]& cols, vector[int64_t]& vals) noexcept nogil:
        cdef size_t k
        cdef int64_t c
        for k in range(self.touched.size()):
            c = self.touched[k]
            if self.work[c] != 0:
                cols.push_back(c)
                vals.push_back(self.work[c])


def unit_eliminate(indptr, indices, data, ncols, modulus=0, prime=0):
    cdef cnp.int64_t[:] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef cnp.int64_t[:] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef cnp.int64_t[:] dv = np.ascontiguousarray(data, dtype=np.int64)
    cdef int64_t m = modulus, p = prime
    if m < 0 or m >= (1 << 31):
        raise ValueError("modulus out of range for the compiled kernel")
    cdef _Eliminator el = _Eliminator(ncols, m, p)
    cdef vector[vector[int64_t]] rcols
    cdef vector[vector[int64_t]] rvals
    cdef vector[vector[int64_t]] keep_cols
    cdef vector[vector[int64_t]] keep_vals
    cdef vector[int64_t] cols
    cdef vector[int64_t] vals
    cdef Py_ssize_t r, nrows = ip.shape[0] - 1
    cdef int64_t k, c, v
    cdef size_t j, q
    cdef bint changed
    for r in range(nrows):
        for k in range(ip[r], ip[r + 1]):
            c = ix[k]
            v = dv[k]
            if m:
                v = _mod(v, m)
            if v == 0:
                continue
            el._touch(c)
            if m:
                el.work[c] = _mod(el.work[c] + v, m)
            else:
                el.work[c] += v
        try:
            el._reduce()
        except OverflowError:
            el._clear()
            raise
        if not el._try_pivot():
            cols.clear()
            vals.clear()
            el._harvest(cols, vals)
            if cols.size():
                rcols.push_back(cols)
                rvals.push_back(vals)
        el._clear()

    changed = True
    while changed and rcols.size():
        changed = False
        keep_cols.clear()
        keep_vals.clear()
        for j in range(rcols.size()):
            for q in range(rcols[j].size()):
                el._touch(rcols[j][q])
                el.work[rcols[j][q]] = rvals[j][q]
            try:
                el._reduce()
            except OverflowError:
                el._clear()
                raise
            if el._try_pivot():
                changed = True
            else:
                cols.clear()
                vals.clear()
                el._harvest(cols, vals)
                if cols.size():
                    keep_cols.push_back(cols)
                    keep_vals.push_back(vals)
            el._clear()
        rcols.swap(keep_cols)
        rvals.swap(keep_vals)

    res_indptr = [0]
    res_indices = []
    res_data = []
    for j in range(rcols.size()):
        pairs = sorted([(rcols[j][q], rvals[j][q]) for q in range(rcols[j].size())])
        for c, v in pairs:
            res_indices.append(c)
            res_data.append(v)
        res_indptr.append(len(res_indices))
    return <Py_ssize_t> el.pcols.size(), res_indptr, res_indices, res_data
