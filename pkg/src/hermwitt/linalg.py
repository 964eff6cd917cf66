"""Exact linear algebra over the local pieces of a base ring.

Z/p^k is a local principal ideal ring, so every matrix can be brought to
diagonal form diag(p^v1, ..., p^vr, 0, ...) by invertible row and column
operations.  That normal form drives solving, kernel extraction and
inversion.  The sign-exact reals use ordinary fraction arithmetic.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import NonFreeCentralizer, NotUnimodular
from .rings import RingElement


class ZModOps:
    """Scalar operations in Z/p^k on canonical integer representatives."""

    def __init__(self, p, k):
        self.p = p
        self.k = k
        self.m = p ** k

    zero = 0
    one = 1

    def canon(self, x):
        return x % self.m

    def add(self, a, b):
        return (a + b) % self.m

    def sub(self, a, b):
        return (a - b) % self.m

    def mul(self, a, b):
        return (a * b) % self.m

    def neg(self, a):
        return (-a) % self.m

    def is_unit(self, a):
        return a % self.p != 0

    def inv(self, a):
        return pow(a, -1, self.m)

    def val(self, a):
        a %= self.m
        if a == 0:
            return self.k
        v = 0
        while a % self.p == 0:
            a //= self.p
            v += 1
        return v

    def shift(self, a, v):
        # exact division by p^v; caller guarantees val(a) >= v
        return (a % self.m) // (self.p ** v)

    def pival(self, v):
        return self.p ** v

    def residue_nonzero(self, a):
        return a % self.p != 0


class RealOps:
    """Scalar operations in the sign-exact reals (a field)."""

    k = 1
    zero = Fraction(0)
    one = Fraction(1)

    def canon(self, x):
        return Fraction(x)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def is_unit(self, a):
        return a != 0

    def inv(self, a):
        return 1 / a

    def val(self, a):
        return 0 if a != 0 else 1

    def shift(self, a, v):
        return a

    def pival(self, v):
        return Fraction(1)

    def residue_nonzero(self, a):
        return a != 0


def ops_for(component):
    if component.kind == "zmod":
        return ZModOps(component.p, component.k)
    return RealOps()


def identity(ops, n):
    return [[ops.one if i == j else ops.zero for j in range(n)] for i in range(n)]


def mat_mul(ops, A, B):
    n, mid, m = len(A), len(B), len(B[0]) if B else 0
    out = [[ops.zero] * m for _ in range(n)]
    for i in range(n):
        Ai = A[i]
        for t in range(mid):
            a = Ai[t]
            if a == ops.zero:
                continue
            Bt = B[t]
            row = out[i]
            for j in range(m):
                row[j] = ops.add(row[j], ops.mul(a, Bt[j]))
    return out


def mat_vec(ops, A, v):
    return [
        _dot(ops, row, v)
        for row in A
    ]


def _dot(ops, row, v):
    s = ops.zero
    for a, b in zip(row, v):
        if a != ops.zero and b != ops.zero:
            s = ops.add(s, ops.mul(a, b))
    return s


def diagonal_form(ops, A):
    """Return (U, D, V, pivots) with U*A*V = D.

    D is diagonal with entries p^v (units normalized away); pivots is the
    list of valuations of the nonzero diagonal entries.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    D = [[ops.canon(x) for x in row] for row in A]
    U = identity(ops, m)
    V = identity(ops, n)
    pivots = []
    r = 0
    while r < m and r < n:
        best = None
        bestv = ops.k
        for i in range(r, m):
            for j in range(r, n):
                v = ops.val(D[i][j])
                if v < bestv:
                    best, bestv = (i, j), v
                    if v == 0:
                        break
            if best and bestv == 0:
                break
        if best is None:
            break
        bi, bj = best
        if bi != r:
            D[bi], D[r] = D[r], D[bi]
            U[bi], U[r] = U[r], U[bi]
        if bj != r:
            for row in D:
                row[bj], row[r] = row[r], row[bj]
            for row in V:
                row[bj], row[r] = row[r], row[bj]
        u = ops.shift(D[r][r], bestv)
        uinv = ops.inv(u)
        D[r] = [ops.mul(uinv, x) for x in D[r]]
        U[r] = [ops.mul(uinv, x) for x in U[r]]
        piv = D[r][r]
        for i in range(m):
            if i == r or D[i][r] == ops.zero:
                continue
            q = ops.shift(D[i][r], bestv)
            D[i] = [ops.sub(x, ops.mul(q, y)) for x, y in zip(D[i], D[r])]
            U[i] = [ops.sub(x, ops.mul(q, y)) for x, y in zip(U[i], U[r])]
        for j in range(n):
            if j == r or D[r][j] == ops.zero:
                continue
            q = ops.shift(D[r][j], bestv)
            for row in D:
                row[j] = ops.sub(row[j], ops.mul(q, row[r]))
            for vrow in V:
                vrow[j] = ops.sub(vrow[j], ops.mul(q, vrow[r]))
        pivots.append(bestv)
        r += 1
    return U, D, V, pivots


def solve(ops, A, b):
    """One solution of A x = b, or None when the system is inconsistent."""
    m = len(A)
    n = len(A[0]) if m else 0
    U, D, V, pivots = diagonal_form(ops, A)
    c = mat_vec(ops, U, b)
    x = [ops.zero] * n
    r = len(pivots)
    for i in range(m):
        if i < r:
            v = pivots[i]
            if ops.val(c[i]) < v:
                return None
            x[i] = ops.shift(c[i], v)
        elif c[i] != ops.zero:
            return None
    return mat_vec(ops, V, x)


def kernel_basis(ops, A, require_free=True):
    """Basis of the kernel of A when the kernel is a free direct summand.

    Over Z/p^k the kernel is free exactly when no elementary divisor is a
    proper power p^v with 0 < v < k; we raise on that case rather than
    return a wrong basis.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    U, D, V, pivots = diagonal_form(ops, A)
    r = len(pivots)
    if require_free:
        for v in pivots:
            if 0 < v < ops.k:
                raise NonFreeCentralizer("solution module is not free")
    cols = []
    for j in range(n):
        if j < r and pivots[j] == 0:
            continue
        cols.append([V[i][j] for i in range(n)])
    return cols


def mat_inv(ops, A):
    n = len(A)
    U, D, V, pivots = diagonal_form(ops, A)
    if len(pivots) < n or any(v != 0 for v in pivots):
        raise NotUnimodular("matrix is not invertible")
    return mat_mul(ops, V, U)


def is_invertible(ops, A):
    n = len(A)
    if n == 0:
        return True
    if any(len(row) != n for row in A):
        return False
    _, _, _, pivots = diagonal_form(ops, A)
    return len(pivots) == n and all(v == 0 for v in pivots)


def residue_rank(ops, A):
    """Rank of A over the residue field."""
    m = len(A)
    n = len(A[0]) if m else 0
    if isinstance(ops, RealOps):
        M = [[Fraction(x) for x in row] for row in A]
        p = None
    else:
        p = ops.p
        M = [[x % p for x in row] for row in A]
    rank = 0
    col = 0
    while rank < m and col < n:
        piv = None
        for i in range(rank, m):
            if M[i][col] != 0:
                piv = i
                break
        if piv is None:
            col += 1
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = pow(M[rank][col], -1, p) if p else 1 / M[rank][col]
        M[rank] = [x * inv % p if p else x * inv for x in M[rank]]
        for i in range(m):
            if i != rank and M[i][col] != 0:
                f = M[i][col]
                M[i] = [
                    (x - f * y) % p if p else x - f * y
                    for x, y in zip(M[i], M[rank])
                ]
        rank += 1
        col += 1
    return rank


def det(ops, A):
    """Exact determinant; Bareiss on integer lifts for Z/p^k."""
    n = len(A)
    if n == 0:
        return ops.one
    if isinstance(ops, RealOps):
        M = [[Fraction(x) for x in row] for row in A]
        sign = 1
        d = Fraction(1)
        for c in range(n):
            piv = None
            for i in range(c, n):
                if M[i][c] != 0:
                    piv = i
                    break
            if piv is None:
                return Fraction(0)
            if piv != c:
                M[c], M[piv] = M[piv], M[c]
                sign = -sign
            d *= M[c][c]
            inv = 1 / M[c][c]
            for i in range(c + 1, n):
                f = M[i][c] * inv
                if f:
                    M[i] = [x - f * y for x, y in zip(M[i], M[c])]
        return sign * d
    M = [[int(x) for x in row] for row in A]
    sign = 1
    prev = 1
    for c in range(n - 1):
        if M[c][c] == 0:
            piv = None
            for i in range(c + 1, n):
                if M[i][c] != 0:
                    piv = i
                    break
            if piv is None:
                return 0
            M[c], M[piv] = M[piv], M[c]
            sign = -sign
        for i in range(c + 1, n):
            for j in range(c + 1, n):
                M[i][j] = (M[i][j] * M[c][c] - M[i][c] * M[c][j]) // prev
            M[i][c] = 0
        prev = M[c][c]
    return ops.canon(sign * M[n - 1][n - 1])


# ---------------------------------------------------------------------------
# matrices with RingElement entries, handled componentwise


def split_matrix(M, ncomp):
    return [
        [[x.coords[c] for x in row] for row in M]
        for c in range(ncomp)
    ]


def join_vector(ring, parts):
    n = len(parts[0])
    return [
        RingElement(ring, tuple(parts[c][i] for c in range(len(parts))))
        for i in range(n)
    ]


def join_matrix(ring, parts):
    rows = len(parts[0])
    cols = len(parts[0][0]) if rows else 0
    return [
        [
            RingElement(ring, tuple(parts[c][i][j] for c in range(len(parts))))
            for j in range(cols)
        ]
        for i in range(rows)
    ]


def ring_ops(ring):
    return [ops_for(c) for c in ring.components]


def ring_solve(ring, M, b):
    """Solve M x = b over the ring; None when any component fails."""
    ncomp = len(ring.components)
    mats = split_matrix(M, ncomp)
    vecs = [[x.coords[c] for x in b] for c in range(ncomp)]
    sols = []
    for c, ops in enumerate(ring_ops(ring)):
        s = solve(ops, mats[c], vecs[c])
        if s is None:
            return None
        sols.append(s)
    return join_vector(ring, sols)


def ring_mat_inv(ring, M):
    ncomp = len(ring.components)
    mats = split_matrix(M, ncomp)
    return join_matrix(
        ring, [mat_inv(ops, mats[c]) for c, ops in enumerate(ring_ops(ring))]
    )


def ring_is_invertible(ring, M):
    ncomp = len(ring.components)
    mats = split_matrix(M, ncomp)
    return all(
        is_invertible(ops, mats[c]) for c, ops in enumerate(ring_ops(ring))
    )


def ring_kernel_basis(ring, M):
    """Free kernel basis over the ring; component kernels must agree in rank."""
    ncomp = len(ring.components)
    mats = split_matrix(M, ncomp)
    per = [
        kernel_basis(ops, mats[c]) for c, ops in enumerate(ring_ops(ring))
    ]
    dims = {len(k) for k in per}
    if len(dims) != 1:
        raise NonFreeCentralizer("kernel rank differs across components")
    dim = dims.pop()
    out = []
    for t in range(dim):
        out.append(join_vector(ring, [per[c][t] for c in range(ncomp)]))
    return out


def ring_residue_ranks(ring, M):
    ncomp = len(ring.components)
    mats = split_matrix(M, ncomp)
    return [
        residue_rank(ops, mats[c]) for c, ops in enumerate(ring_ops(ring))
    ]


def ring_det(ring, M):
    ncomp = len(ring.components)
    mats = split_matrix(M, ncomp)
    return RingElement(
        ring,
        tuple(det(ops, mats[c]) for c, ops in enumerate(ring_ops(ring))),
    )


def ring_mat_vec(ring, M, v):
    out = []
    for row in M:
        s = ring.zero()
        for a, b in zip(row, v):
            s = s + a * b
        out.append(s)
    return out
