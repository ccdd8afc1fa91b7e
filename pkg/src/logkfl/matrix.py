"""Integer matrices and Smith normal form.

Small matrices are dense lists of Python integers.  Large differentials are
held as scipy CSR arrays with int64 entries and are only ever reduced through
the sparse elimination kernels, never densified.
"""

import numpy as np
import scipy.sparse as sp

from . import kernels

DENSE_LIMIT = 250_000


def _check_shape(rows, cols):
    if rows < 0 or cols < 0:
        raise ValueError("matrix dimensions must be nonnegative")


class IntMatrix:
    """Immutable integer matrix.

    Either ``_dense`` (list of row lists of Python ints) or ``_csr`` (scipy CSR,
    int64) is populated; the other is derived on demand.
    """

    __slots__ = ("rows", "cols", "_dense", "_csr")

    def __init__(self, rows, cols, entries=None):
        _check_shape(rows, cols)
        self.rows = rows
        self.cols = cols
        self._csr = None
        if entries is None:
            self._dense = [[0] * cols for _ in range(rows)]
            return
        entries = list(entries)
        if entries and isinstance(entries[0], (list, tuple)):
            dense = [[int(v) for v in row] for row in entries]
            if len(dense) != rows or any(len(row) != cols for row in dense):
                raise ValueError("entry shape does not match %dx%d" % (rows, cols))
        else:
            if len(entries) != rows * cols:
                raise ValueError("expected %d entries, got %d" % (rows * cols, len(entries)))
            flat = [int(v) for v in entries]
            dense = [flat[i * cols:(i + 1) * cols] for i in range(rows)]
        self._dense = dense

    # construction

    @classmethod
    def from_rows(cls, rows_list, cols=None):
        rows_list = [list(r) for r in rows_list]
        if cols is None:
            cols = len(rows_list[0]) if rows_list else 0
        return cls(len(rows_list), cols, rows_list if rows_list else None)

    @classmethod
    def from_csr(cls, csr):
        csr = sp.csr_matrix(csr, dtype=np.int64)
        csr.eliminate_zeros()
        csr.sort_indices()
        m = cls.__new__(cls)
        m.rows, m.cols = csr.shape
        m._dense = None
        m._csr = csr
        return m

    @classmethod
    def zeros(cls, rows, cols):
        if rows * cols > DENSE_LIMIT:
            return cls.from_csr(sp.csr_matrix((rows, cols), dtype=np.int64))
        return cls(rows, cols)

    @classmethod
    def identity(cls, n):
        return cls.diagonal([1] * n)

    @classmethod
    def diagonal(cls, diag, rows=None, cols=None):
        diag = list(diag)
        rows = len(diag) if rows is None else rows
        cols = len(diag) if cols is None else cols
        m = cls(rows, cols)
        for i, d in enumerate(diag):
            m._dense[i][i] = int(d)
        return m

    # access

    @property
    def is_sparse(self):
        return self._dense is None

    def tolist(self):
        if self._dense is None:
            self._dense = [[int(v) for v in row] for row in self._csr.toarray()]
        return [row[:] for row in self._dense]

    @property
    def entries(self):
        """Row-major flat tuple of entries."""
        return tuple(v for row in self._rows() for v in row)

    def _rows(self):
        if self._dense is None:
            self.tolist()
        return self._dense

    def csr(self):
        if self._csr is None:
            big = 1 << 62
            if any(abs(v) >= big for row in self._dense for v in row):
                raise OverflowError("entries do not fit in int64")
            arr = np.array(self._dense, dtype=np.int64).reshape(self.rows, self.cols)
            self._csr = sp.csr_matrix(arr)
            self._csr.eliminate_zeros()
            self._csr.sort_indices()
        return self._csr

    def sparse_rows(self):
        """CSR triple ``(indptr, indices, data)``; data holds exact values."""
        if self._dense is None:
            c = self._csr
            return c.indptr, c.indices, c.data
        indptr = [0]
        indices = []
        data = []
        for row in self._dense:
            for j, v in enumerate(row):
                if v:
                    indices.append(j)
                    data.append(v)
            indptr.append(len(indices))
        return indptr, indices, data

    def __getitem__(self, ij):
        i, j = ij
        if self._dense is not None:
            return self._dense[i][j]
        return int(self._csr[i, j])

    def row(self, i):
        return list(self._rows()[i])

    def column(self, j):
        return [row[j] for row in self._rows()]

    @property
    def nnz(self):
        if self._dense is not None:
            return sum(1 for row in self._dense for v in row if v)
        return self._csr.nnz

    def is_zero(self):
        return self.nnz == 0

    def max_abs(self):
        if self._dense is not None:
            return max((abs(v) for row in self._dense for v in row), default=0)
        return int(np.abs(self._csr.data).max()) if self._csr.nnz else 0

    # arithmetic

    @property
    def T(self):
        if self._dense is None:
            return IntMatrix.from_csr(self._csr.T.tocsr())
        return IntMatrix(self.cols, self.rows, [list(c) for c in zip(*self._dense)] if self.rows else None)

    def _use_sparse(self, other):
        return self._dense is None or other._dense is None

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError("shape mismatch %dx%d @ %dx%d" % (self.rows, self.cols, other.rows, other.cols))
        if self._use_sparse(other) and _int64_safe(self, other):
            return IntMatrix.from_csr(self.csr() @ other.csr())
        a = self._rows()
        bt = list(zip(*other._rows())) if other.rows else [() for _ in range(other.cols)]
        out = []
        for row in a:
            nz = [(k, v) for k, v in enumerate(row) if v]
            out.append([sum(v * col[k] for k, v in nz) for col in bt])
        return IntMatrix(self.rows, other.cols, out if self.rows else None)

    def __add__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        if self._use_sparse(other):
            return IntMatrix.from_csr(self.csr() + other.csr())
        return IntMatrix(self.rows, self.cols,
                         [[x + y for x, y in zip(r, s)] for r, s in zip(self._dense, other._dense)]
                         if self.rows else None)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k):
        if self._dense is None:
            return IntMatrix.from_csr(self._csr * int(k))
        return IntMatrix(self.rows, self.cols, [[k * v for v in r] for r in self._dense] if self.rows else None)

    def __eq__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        if (self.rows, self.cols) != (other.rows, other.cols):
            return False
        if self._dense is not None and other._dense is not None:
            return self._dense == other._dense
        try:
            diff = self.csr() - other.csr()
        except OverflowError:
            return self._rows() == other._rows()
        diff.eliminate_zeros()
        return diff.nnz == 0

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        if self.rows * self.cols <= 64:
            return "IntMatrix(%r)" % (self.tolist(),)
        return "IntMatrix(%dx%d, nnz=%d)" % (self.rows, self.cols, self.nnz)

    def reduce_rows(self, moduli):
        """Reduce row ``i`` modulo ``moduli[i]`` (0 leaves the row alone)."""
        rows = self._rows()
        out = []
        for row, m in zip(rows, moduli):
            out.append([v % m for v in row] if m else list(row))
        return IntMatrix(self.rows, self.cols, out if self.rows else None)

    def kron_identity(self, k, left=True):
        """``I_k (x) A`` (block diagonal) if ``left`` else ``A (x) I_k``."""
        if k == 1:
            return self
        eye = sp.identity(k, dtype=np.int64, format="csr")
        try:
            a = self.csr()
        except OverflowError:
            a = None
        if a is not None and (self.rows * self.cols * k * k > DENSE_LIMIT or self._dense is None):
            m = sp.kron(eye, a) if left else sp.kron(a, eye)
            return IntMatrix.from_csr(m.tocsr())
        rows = self._rows()
        out = [[0] * (self.cols * k) for _ in range(self.rows * k)]
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                if v:
                    for b in range(k):
                        if left:
                            out[b * self.rows + i][b * self.cols + j] = v
                        else:
                            out[i * k + b][j * k + b] = v
        return IntMatrix(self.rows * k, self.cols * k, out if out else None)


def _int64_safe(a, b):
    if a.max_abs() >= (1 << 31) or b.max_abs() >= (1 << 31):
        return False
    return min(a.cols, 1 << 30) * a.max_abs() * b.max_abs() < (1 << 62)


def hstack(mats, rows=None):
    mats = list(mats)
    if not mats:
        return IntMatrix(rows or 0, 0)
    rows = mats[0].rows
    out = [[] for _ in range(rows)]
    for m in mats:
        if m.rows != rows:
            raise ValueError("row count mismatch")
        for i, row in enumerate(m._rows()):
            out[i].extend(row)
    cols = sum(m.cols for m in mats)
    return IntMatrix(rows, cols, out if rows else None)


def vstack(mats, cols=None):
    mats = list(mats)
    if not mats:
        return IntMatrix(0, cols or 0)
    cols = mats[0].cols
    out = []
    for m in mats:
        if m.cols != cols:
            raise ValueError("column count mismatch")
        out.extend(list(r) for r in m._rows())
    return IntMatrix(len(out), cols, out if out else None)


def block_diag(mats):
    mats = list(mats)
    rows = sum(m.rows for m in mats)
    cols = sum(m.cols for m in mats)
    out = [[0] * cols for _ in range(rows)]
    r0 = c0 = 0
    for m in mats:
        for i, row in enumerate(m._rows()):
            out[r0 + i][c0:c0 + m.cols] = row
        r0 += m.rows
        c0 += m.cols
    return IntMatrix(rows, cols, out if rows else None)


# Smith normal form (dense, with transforms)

class SNFResult:
    """``U A V = D`` with ``Uinv = U^-1`` and ``Vinv = V^-1``."""

    __slots__ = ("U", "D", "V", "Uinv", "Vinv", "diag", "rank")

    def __init__(self, U, D, V, Uinv, Vinv, diag):
        self.U, self.D, self.V, self.Uinv, self.Vinv = U, D, V, Uinv, Vinv
        self.diag = diag
        self.rank = sum(1 for d in diag if d)


def _snf_dense(a, rows, cols, transforms=True):
    """In-place Smith form of the list-of-lists ``a``.

    Pivoting picks the smallest nonzero absolute value in the active block, and
    full gcd reduction enforces the divisibility chain.
    """
    U = [[int(i == j) for j in range(rows)] for i in range(rows)] if transforms else None
    Ui = [[int(i == j) for j in range(rows)] for i in range(rows)] if transforms else None
    V = [[int(i == j) for j in range(cols)] for i in range(cols)] if transforms else None
    Vi = [[int(i == j) for j in range(cols)] for i in range(cols)] if transforms else None

    def row_swap(i, k):
        a[i], a[k] = a[k], a[i]
        if transforms:
            U[i], U[k] = U[k], U[i]
            for r in Ui:
                r[i], r[k] = r[k], r[i]

    def col_swap(j, k):
        for r in a:
            r[j], r[k] = r[k], r[j]
        if transforms:
            for r in V:
                r[j], r[k] = r[k], r[j]
            Vi[j], Vi[k] = Vi[k], Vi[j]

    def row_add(dst, src, q):
        # row_dst -= q * row_src
        if not q:
            return
        rs, rd = a[src], a[dst]
        for j in range(cols):
            if rs[j]:
                rd[j] -= q * rs[j]
        if transforms:
            us, ud = U[src], U[dst]
            for j in range(rows):
                if us[j]:
                    ud[j] -= q * us[j]
            # inverse: col_src += q * col_dst
            for r in Ui:
                if r[dst]:
                    r[src] += q * r[dst]

    def col_add(dst, src, q):
        # col_dst -= q * col_src
        if not q:
            return
        for r in a:
            if r[src]:
                r[dst] -= q * r[src]
        if transforms:
            for r in V:
                if r[src]:
                    r[dst] -= q * r[src]
            vd, vs = Vi[dst], Vi[src]
            for j in range(cols):
                if vd[j]:
                    vs[j] += q * vd[j]

    def row_neg(i):
        a[i] = [-v for v in a[i]]
        if transforms:
            U[i] = [-v for v in U[i]]
            for r in Ui:
                r[i] = -r[i]

    def quotient(x, p):
        # nearest-integer quotient keeps entries small
        q, r = divmod(x, p)
        if 2 * r > abs(p):
            q += 1 if p > 0 else -1
        return q

    t = 0
    limit = min(rows, cols)
    while t < limit:
        best = None
        for i in range(t, rows):
            row = a[i]
            for j in range(t, cols):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        if i != t:
            row_swap(i, t)
        if j != t:
            col_swap(j, t)
        while True:
            p = a[t][t]
            moved = False
            for i in range(t + 1, rows):
                if a[i][t]:
                    row_add(i, t, quotient(a[i][t], p))
            for j in range(t + 1, cols):
                if a[t][j]:
                    col_add(j, t, quotient(a[t][j], p))
            # smallest remainder becomes the new pivot
            cand = None
            for i in range(t + 1, rows):
                if a[i][t] and (cand is None or abs(a[i][t]) < cand[0]):
                    cand = (abs(a[i][t]), "r", i)
            for j in range(t + 1, cols):
                if a[t][j] and (cand is None or abs(a[t][j]) < cand[0]):
                    cand = (abs(a[t][j]), "c", j)
            if cand is not None:
                if cand[1] == "r":
                    row_swap(cand[2], t)
                else:
                    col_swap(cand[2], t)
                moved = True
            if moved:
                continue
            p = a[t][t]
            bad = None
            for i in range(t + 1, rows):
                row = a[i]
                for j in range(t + 1, cols):
                    if row[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            # fold the offending row in; the next sweep lowers the pivot
            row_add(t, bad, -1)
        if a[t][t] < 0:
            row_neg(t)
        t += 1

    diag = [a[i][i] for i in range(limit)]
    return diag, U, Ui, V, Vi


def smith_normal_form(A):
    """Return ``(U, D, V)`` with ``U A V = D`` for an :class:`IntMatrix`."""
    res = snf(A)
    return res.U, res.D, res.V


def snf(A, transforms=True):
    if A.is_sparse and A.rows * A.cols > DENSE_LIMIT:
        raise ValueError("dense Smith form requested for a large sparse matrix")
    rows, cols = A.rows, A.cols
    a = A.tolist()
    diag, U, Ui, V, Vi = _snf_dense(a, rows, cols, transforms)
    D = IntMatrix.diagonal(diag, rows, cols)
    if not transforms:
        return SNFResult(None, D, None, None, None, diag)
    mk = lambda m, n: IntMatrix(n, n, m if n else None)
    return SNFResult(mk(U, rows), D, mk(V, cols), mk(Ui, rows), mk(Vi, cols), diag)


def determinant(A):
    """Exact determinant by fraction-free (Bareiss) elimination."""
    if A.rows != A.cols:
        raise ValueError("determinant of a non-square matrix")
    n = A.rows
    a = A.tolist()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


# lattice helpers on dense matrices (columns are vectors)

def kernel_basis(A):
    """Columns spanning the integer kernel of ``A``."""
    res = snf(A)
    V = res.V.tolist()
    idx = list(range(res.rank, A.cols))
    return IntMatrix(A.cols, len(idx), [[V[i][j] for j in idx] for i in range(A.cols)] if A.cols else None)


def column_lattice_basis(S):
    """A basis (as columns) of the lattice spanned by the columns of ``S``."""
    res = snf(S)
    Ui = res.Uinv.tolist()
    r = res.rank
    return IntMatrix(S.rows, r, [[Ui[i][j] * res.diag[j] for j in range(r)] for i in range(S.rows)]
                     if S.rows else None)


class LatticeCoordinates:
    """Solve ``K c = b`` for a full-column-rank basis ``K``."""

    def __init__(self, K):
        self.K = K
        self.res = snf(K)
        if self.res.rank != K.cols:
            raise ValueError("basis matrix is not of full column rank")

    def solve(self, b):
        """Coordinates of the column vector ``b``; ValueError if not in the lattice."""
        U = self.res.U._rows()
        y = [sum(u * x for u, x in zip(row, b)) for row in U]
        n = self.K.cols
        for i in range(n, len(y)):
            if y[i]:
                raise ValueError("vector not in lattice")
        z = []
        for i in range(n):
            q, r = divmod(y[i], self.res.diag[i])
            if r:
                raise ValueError("vector not in lattice")
            z.append(q)
        V = self.res.V._rows()
        return [sum(V[i][j] * z[j] for j in range(n)) for i in range(n)]


# sparse elementary divisors through the kernel

def _residual_matrix(indptr, indices, data, ncols):
    rows = []
    for r in range(len(indptr) - 1):
        rows.append({int(indices[k]): int(data[k]) for k in range(indptr[r], indptr[r + 1])})
    return rows


def _sparse_snf_diagonal(rows):
    """Nonzero invariant factors of a sparse integer matrix given as dict rows.

    Used on the small residual left after unit elimination.  Returns the
    nonzero diagonal entries (not sorted into a chain).
    """
    rows = [dict(r) for r in rows if r]
    cols = {}
    for i, r in enumerate(rows):
        for c in r:
            cols.setdefault(c, set()).add(i)
    alive = set(range(len(rows)))
    out = []

    def set_entry(i, c, v):
        if v:
            rows[i][c] = v
            cols.setdefault(c, set()).add(i)
        else:
            if c in rows[i]:
                del rows[i][c]
                cols[c].discard(i)

    while alive:
        best = None
        for i in alive:
            for c, v in rows[i].items():
                if best is None or abs(v) < best[0]:
                    best = (abs(v), i, c)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pc = best
        while True:
            p = rows[pi][pc]
            changed = False
            # clear the pivot column
            for i in list(cols.get(pc, ())):
                if i == pi:
                    continue
                q = rows[i][pc] // p
                if q:
                    for c, v in list(rows[pi].items()):
                        set_entry(i, c, rows[i].get(c, 0) - q * v)
                if rows[i].get(pc):
                    pi, changed = i, True
                    break
            if changed:
                continue
            # clear the pivot row by column operations
            for c in list(rows[pi]):
                if c == pc:
                    continue
                q = rows[pi][c] // p
                if q:
                    for i in list(cols.get(pc, ())):
                        set_entry(i, c, rows[i].get(c, 0) - q * rows[i][pc])
                if rows[pi].get(c):
                    pc, changed = c, True
                    break
            if not changed:
                break
        out.append(abs(rows[pi][pc]))
        set_entry(pi, pc, 0)
        alive = {i for i in alive if rows[i]}
    return _normalize_diagonal(out)


def _normalize_diagonal(values):
    """Turn a diagonal matrix's entries into its invariant factor chain."""
    values = [abs(v) for v in values if v]
    primes = {}
    for v in values:
        for p, e in factorize(v).items():
            primes.setdefault(p, []).append(e)
    n = len(values)
    chain = [1] * n
    for p, exps in primes.items():
        exps = sorted(exps)
        # largest exponents go to the last factors
        for k, e in enumerate(reversed(exps)):
            chain[n - 1 - k] *= p ** e
    return chain


def factorize(n):
    n = abs(n)
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def elementary_divisors(A, backend=None):
    """Nonzero invariant factors of ``A`` over the integers (ones included)."""
    if A.rows == 0 or A.cols == 0:
        return []
    indptr, indices, data = A.sparse_rows()
    k, ri, rx, rd = kernels.unit_eliminate(indptr, indices, data, A.cols, 0, 0, backend=backend)
    rest = _sparse_snf_diagonal(_residual_matrix(ri, rx, rd, A.cols))
    return [1] * k + rest


def local_elementary_valuations(A, prime, exponent, backend=None):
    """Valuations (each < ``exponent``) of the nonzero Smith entries of ``A`` over Z/prime^exponent."""
    if A.rows == 0 or A.cols == 0:
        return []
    indptr, indices, data = A.sparse_rows()
    vals = []
    level = 0
    modulus = prime ** exponent
    data = [int(v) % modulus for v in data] if not isinstance(data, np.ndarray) else np.mod(data, modulus)
    while level < exponent:
        k, ri, rx, rd = kernels.unit_eliminate(indptr, indices, data, A.cols, modulus, prime, backend=backend)
        vals.extend([level] * k)
        if not rx:
            break
        # every residual entry is divisible by prime
        modulus //= prime
        level += 1
        indptr, indices = ri, rx
        data = [v // prime for v in rd]
    return vals


def rank_mod(A, prime, backend=None):
    return len(local_elementary_valuations(A, prime, 1, backend=backend))
