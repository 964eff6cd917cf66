"""Hermitian forms as Gram matrices over an algebra with involution.

A form carries its algebra (whose involution is the one in force), a
central unit eps with eps^sigma * eps = 1, and an n x n Gram matrix
satisfying G_ij = eps * (G_ji)^sigma.  Most forms live on free modules;
a form may instead carry a tuple of idempotent generators w_i, meaning
the module is the direct sum of the right ideals w_i*A and the Gram is
evaluated through those generators.  Non-free modules are needed to
realize every Witt class over split quaternion algebras.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from . import algebras, linalg
from .algebras import AlgElement, AlgebraWithInvolution
from .rings import RingElement
from .errors import (
    FormMismatch,
    Inconclusive,
    InvalidEntry,
    InvalidEpsilon,
    InvalidRank,
    InvalidWitness,
    NotUnimodular,
    RingMismatch,
    Unsupported,
)

SUPPORT_LEVEL_CAP = 400_000
EXHAUSTIVE_CAP = 2_500_000
RANDOM_TRIALS = 200_000


class HermitianForm:
    def __init__(self, algebra, eps, gram, gens=None, validate=True):
        self.algebra = algebra
        if isinstance(eps, int):
            eps = algebra.scalar(eps)
        self.eps = eps
        self.gram = tuple(tuple(row) for row in gram)
        self.gens = tuple(gens) if gens is not None else None
        self.rank = len(self.gram)
        if validate:
            self._validate()

    def _validate(self):
        alg = self.algebra
        eps = self.eps
        if not eps.is_central():
            raise InvalidEpsilon("eps must be central")
        if eps.involute() * eps != alg.one():
            raise InvalidEpsilon("eps^sigma * eps must be 1")
        n = self.rank
        for row in self.gram:
            if len(row) != n:
                raise InvalidEntry("gram matrix is not square")
        for i in range(n):
            for j in range(n):
                if self.gram[i][j] != eps * self.gram[j][i].involute():
                    raise InvalidEntry("gram matrix is not eps-hermitian")
        if self.gens is not None:
            if len(self.gens) != n:
                raise InvalidEntry("one generator per slot required")
            for i, w in enumerate(self.gens):
                if w * w != w:
                    raise InvalidEntry("generator %d is not idempotent" % i)
            for i in range(n):
                for j in range(n):
                    v = self.gram[i][j]
                    if self.gens[i].involute() * v * self.gens[j] != v:
                        raise InvalidEntry(
                            "entry (%d,%d) is incompatible with the generators"
                            % (i, j)
                        )

    # -- bookkeeping ----------------------------------------------------

    @property
    def is_free(self):
        return self.gens is None

    def require_free(self):
        if not self.is_free:
            raise Unsupported("operation needs a form on a free module")

    def same_side(self, other):
        return (
            self.algebra.same_space(other.algebra)
            and self.algebra.invol == other.algebra.invol
            and self.eps == other.eps
        )

    def evaluate(self, x, y):
        """f(x, y) for coordinate vectors x, y of AlgElements."""
        alg = self.algebra
        out = alg.zero()
        for i in range(self.rank):
            xi = x[i]
            if xi.is_zero():
                continue
            xs = xi.involute()
            for j in range(self.rank):
                yj = y[j]
                if yj.is_zero():
                    continue
                out = out + xs * self.gram[i][j] * yj
        return out

    def __repr__(self):
        kind = "free" if self.is_free else "gens"
        return "<form rank %d (%s) over %r>" % (self.rank, kind, self.algebra)

    def to_json(self):
        return {
            "algebra": self.algebra.to_json(),
            "epsilon": self.eps.to_json(),
            "gram": [[x.to_json() for x in row] for row in self.gram],
        }


# ---------------------------------------------------------------------------
# constructors


def make_diagonal(alg, eps, entries):
    if isinstance(eps, int):
        eps = alg.scalar(eps)
    ents = []
    for a in entries:
        if isinstance(a, int):
            a = alg.scalar(a)
        elif isinstance(a, RingElement):
            a = alg.scalar(a)
        if a != eps * a.involute():
            raise InvalidEntry("diagonal entry is not eps-symmetric")
        if not a.is_unit():
            raise InvalidEntry("diagonal entry is not a unit")
        ents.append(a)
    zero = alg.zero()
    gram = [
        [ents[i] if i == j else zero for j in range(len(ents))]
        for i in range(len(ents))
    ]
    return HermitianForm(alg, eps, gram)


def make_hyperbolic(alg, eps, r):
    if isinstance(eps, int):
        eps = alg.scalar(eps)
    zero, one = alg.zero(), alg.one()
    n = 2 * r
    gram = [[zero] * n for _ in range(n)]
    for i in range(r):
        gram[i][r + i] = one
        gram[r + i][i] = eps
    return HermitianForm(alg, eps, gram)


def zero_form(alg, eps):
    return HermitianForm(alg, eps, [])


def direct_sum(f, g):
    if not f.same_side(g):
        raise FormMismatch("direct sum needs forms on the same side")
    if not (f.is_free and g.is_free):
        gens = (f.gens or tuple([f.algebra.one()] * f.rank)) + (
            g.gens or tuple([g.algebra.one()] * g.rank)
        )
    else:
        gens = None
    zero = f.algebra.zero()
    n, m = f.rank, g.rank
    gram = [[zero] * (n + m) for _ in range(n + m)]
    for i in range(n):
        for j in range(n):
            gram[i][j] = f.gram[i][j]
    for i in range(m):
        for j in range(m):
            gram[n + i][n + j] = g.gram[i][j]
    return HermitianForm(f.algebra, f.eps, gram, gens=gens)


def negate(f):
    """-f: Gram negation with eps kept."""
    gram = [[-x for x in row] for row in f.gram]
    return HermitianForm(f.algebra, f.eps, gram, gens=f.gens)


def conjugate(f, mu0):
    """mu0-conjugation: mu0*f over (A, Int(mu0) o sigma) with eps scaled by
    the central delta with mu0 = delta * mu0^sigma."""
    alg = f.algebra
    if not mu0.is_unit():
        raise InvalidEntry("conjugator must be a unit")
    sig_mu0 = mu0.involute()
    delta = None
    sol = linalg.ring_solve(
        alg.base, sig_mu0.left_mult_matrix(), list(mu0.coords)
    )
    if sol is not None:
        cand = alg.element(sol)
        if cand.is_central() and mu0 == cand * sig_mu0:
            delta = cand
    if delta is None:
        raise InvalidEntry("conjugator is not delta-symmetric for central delta")
    new_invol = algebras.inner_twisted_involution(alg, mu0)
    target = algebras.with_involution(alg, new_invol)
    gram = [
        [AlgElement(target, (mu0 * x).coords) for x in row] for row in f.gram
    ]
    eps = AlgElement(target, (delta * f.eps).coords)
    gens = None
    if f.gens is not None:
        gens = tuple(AlgElement(target, w.coords) for w in f.gens)
    return HermitianForm(target, eps, gram, gens=gens)


# ---------------------------------------------------------------------------
# corner transfer (e-transfer)


def corner_algebra(alg, e):
    """The corner eAe as a standalone algebra with the restricted
    involution.  e must be a sigma-invariant idempotent."""
    if e.involute() != e or e * e != e:
        raise InvalidWitness("corner needs a sigma-invariant idempotent")
    ring = alg.base
    ranks = _corner_rank(alg, e)
    if len(set(ranks)) != 1:
        raise Unsupported("corner has non-constant rank")
    basis = algebras._corner_basis(alg, e, e, ranks[0])
    mat = [[b.coords[t] for b in basis] for t in range(alg.dim)]

    def to_corner(x):
        sol = linalg.ring_solve(ring, mat, list(x.coords))
        if sol is None:
            raise Unsupported("element is not in the corner")
        return sol

    dim = len(basis)
    structure = tuple(
        tuple(tuple(to_corner(basis[i] * basis[j])) for j in range(dim))
        for i in range(dim)
    )
    invol = tuple(tuple(to_corner(b.involute())) for b in basis)
    # the corner center: images of the ambient center times e
    center = []
    seen_rows = []
    for z in alg.center_basis:
        cand = e * alg.element(z) * e
        row = to_corner(cand)
        trial = seen_rows + [row]
        m2 = [[r[t] for r in trial] for t in range(dim)]
        if all(
            r == len(trial) for r in linalg.ring_residue_ranks(ring, m2)
        ):
            center.append(tuple(row))
            seen_rows.append(row)
    import math

    deg = math.isqrt(dim // max(1, len(center)))
    corner = AlgebraWithInvolution(
        ring,
        structure,
        invol,
        center,
        max(1, deg),
        "corner",
        nrd_data=("regular",) if len(center) == dim else None,
    )
    return corner, basis, to_corner


def _corner_rank(alg, e):
    rows = [list((e * b * e).coords) for b in alg.basis()]
    mat = [[r[t] for r in rows] for t in range(alg.dim)]
    return linalg.ring_residue_ranks(alg.base, mat)


def transfer_to_corner(f, e, corner_pack=None):
    """e-transfer: the restriction of f to M*e as a form over eAe.

    Returns a free form over the corner algebra.  Works for forms with
    generators; this is the workhorse behind both the public e_transfer
    and the Morita reduction of quaternion-shaped algebras.
    """
    alg = f.algebra
    ring = alg.base
    if corner_pack is None:
        corner_pack = corner_algebra(alg, e)
    corner, cbasis, to_corner = corner_pack
    gens = f.gens or tuple([alg.one()] * f.rank)
    # a free eAe-basis of each w_i*A*e
    slot_elems = []
    wrank = len(cbasis)
    for i, w in enumerate(gens):
        target_rows = [list((w * b * e).coords) for b in alg.basis()]
        mat = [[r[t] for r in target_rows] for t in range(alg.dim)]
        total = linalg.ring_residue_ranks(ring, mat)
        if len(set(total)) != 1 or total[0] % wrank:
            raise Unsupported("slot module is not free over the corner")
        need = total[0] // wrank
        chosen = []
        rows = []
        for b in alg.basis():
            u = w * b * e
            if u.is_zero():
                continue
            trial = rows + [list((u * cb).coords) for cb in cbasis]
            m2 = [[r[t] for r in trial] for t in range(alg.dim)]
            if all(
                r == len(trial) for r in linalg.ring_residue_ranks(ring, m2)
            ):
                chosen.append((i, b))
                rows = trial
            if len(chosen) == need:
                break
        if len(chosen) != need:
            raise Unsupported("failed to select a free corner basis")
        slot_elems.extend(chosen)
    gram = []
    for (i, a) in slot_elems:
        u = gens[i] * a * e
        row = []
        for (j, b) in slot_elems:
            v = gens[j] * b * e
            val = u.involute() * _entry(f, i, j) * v
            row.append(AlgElement(corner, tuple(to_corner(val))))
        gram.append(row)
    eps_c = AlgElement(corner, tuple(to_corner(e * f.eps * e)))
    return HermitianForm(corner, eps_c, gram)


def _entry(f, i, j):
    return f.gram[i][j]


def e_transfer(f, e):
    """Transfer along a sigma-invariant diagonal idempotent with eAe of
    reduced rank one; the result is a form over the corner in the row
    model."""
    if e.involute() != e:
        raise InvalidWitness("idempotent must be sigma-invariant")
    if e * e != e or e.is_zero():
        raise InvalidWitness("transfer needs a nonzero idempotent")
    return transfer_to_corner(f, e)


# ---------------------------------------------------------------------------
# trace transfer


def trace_transfer(g):
    """Trace form over (R, id) of a 1-hermitian form over a quadratic etale
    algebra (trace) or a quaternion algebra with its symplectic involution
    (reduced trace)."""
    alg = g.algebra
    if alg.dim == 2 and alg.dim == len(alg.center_basis):

        def tr(x):
            # trace of the regular representation, Tr(a + b*lam) = 2a
            m = x.left_mult_matrix()
            out = alg.base.zero()
            for t in range(alg.dim):
                out = out + m[t][t]
            return out

    elif alg.tag == "quaternion":

        def tr(x):
            t, _ = algebras.reduced_trace_norm(x)
            return _scalar_of(alg, t)

    else:
        raise Unsupported("trace transfer needs an etale or quaternion algebra")
    if g.eps != alg.one():
        raise Unsupported("trace transfer is defined for 1-hermitian forms")
    ring = alg.base
    target = algebras.base_algebra(ring)
    gens = g.gens or tuple([alg.one()] * g.rank)
    ncomp = len(ring.components)
    # an R-basis of each slot module w*A, selected per base component and
    # CRT-assembled; components where a slot has smaller rank get zero
    # coordinates and a vanishing support idempotent
    slot_elems = []
    free = True
    for i, w in enumerate(gens):
        per_comp = []
        for c, comp in enumerate(ring.components):
            ops = linalg.ops_for(comp)
            rows = []
            sel = []
            for b in alg.basis():
                u = w * b
                vec = [u.coords[t].coords[c] for t in range(alg.dim)]
                trial = rows + [vec]
                if linalg.residue_rank(ops, trial) == len(trial):
                    rows = trial
                    sel.append(vec)
            per_comp.append(sel)
        m = max(len(s) for s in per_comp)
        for t in range(m):
            coords = []
            for tt in range(alg.dim):
                coords.append(
                    ring.element(
                        tuple(
                            per_comp[c][t][tt] if t < len(per_comp[c]) else 0
                            for c in range(ncomp)
                        )
                    )
                )
            mask = ring.element(
                tuple(
                    1 if t < len(per_comp[c]) else 0 for c in range(ncomp)
                )
            )
            if not mask.is_unit():
                free = False
            slot_elems.append((i, alg.element(coords), mask))
    gram = []
    for (i, u, _) in slot_elems:
        row = []
        for (j, v, _) in slot_elems:
            val = tr(u.involute() * g.gram[i][j] * v)
            row.append(target.scalar(val))
        gram.append(row)
    if free:
        return HermitianForm(target, 1, gram)
    out_gens = [target.scalar(mask) for (_, _, mask) in slot_elems]
    return HermitianForm(target, 1, gram, gens=out_gens)


def _scalar_of(alg, x):
    """The R-coefficient of a central scalar element."""
    for t in range(alg.dim):
        if alg._unit_coords[t].is_unit():
            return x.coords[t] * alg._unit_coords[t].inv()
    raise Unsupported("unit has no unit coordinate")


# ---------------------------------------------------------------------------
# adjoint involution


def adjoint_involution(f):
    """The involution phi -> G^-1 * (phi^sigma)^T * G on n x n matrices,
    returned as a callable; verified to square to the identity."""
    if not is_unimodular(f):
        raise NotUnimodular("adjoint involution needs a unimodular form")
    f.require_free()
    alg = f.algebra
    n = f.rank
    ginv = _alg_mat_inv(alg, f.gram)

    def theta(phi):
        star = [
            [phi[j][i].involute() for j in range(n)] for i in range(n)
        ]
        return _alg_mat_mul(alg, _alg_mat_mul(alg, ginv, star), f.gram)

    for trial in range(2):
        probe = [
            [alg.basis_element((i + j + trial) % alg.dim) for j in range(n)]
            for i in range(n)
        ]
        if theta(theta(probe)) != probe:
            raise NotUnimodular("adjoint involution failed to square to id")
    return theta


def _alg_mat_mul(alg, A, B):
    n = len(A)
    m = len(B[0]) if B else 0
    out = [[alg.zero() for _ in range(m)] for _ in range(n)]
    for i in range(n):
        for t in range(len(B)):
            a = A[i][t]
            if a.is_zero():
                continue
            for j in range(m):
                if not B[t][j].is_zero():
                    out[i][j] = out[i][j] + a * B[t][j]
    return out


def _alg_mat_inv(alg, G):
    n = len(G)
    d = alg.dim
    ring = alg.base
    big = _gram_r_matrix(alg, G)
    inv = linalg.ring_mat_inv(ring, big)
    out = [[None] * n for _ in range(n)]
    # reconstruct algebra entries column by column
    cols = []
    for j in range(n):
        col_entries = []
        unitvec = [ring.zero()] * (n * d)
        for t in range(d):
            unitvec[j * d + t] = alg._unit_coords[t]
        image = linalg.ring_mat_vec(ring, inv, unitvec)
        for i in range(n):
            col_entries.append(alg.element(image[i * d: (i + 1) * d]))
        cols.append(col_entries)
    for i in range(n):
        for j in range(n):
            out[i][j] = cols[j][i]
    probe = _alg_mat_mul(alg, out, G)
    one = alg.one()
    for i in range(n):
        for j in range(n):
            want = one if i == j else alg.zero()
            if probe[i][j] != want:
                raise NotUnimodular("gram matrix is not invertible")
    return out


def _gram_r_matrix(alg, G):
    """The R-matrix of y -> G*y on column vectors of the free module."""
    n = len(G)
    d = alg.dim
    ring = alg.base
    big = [[ring.zero()] * (n * d) for _ in range(n * d)]
    for i in range(n):
        for j in range(n):
            block = G[i][j].left_mult_matrix()
            for a in range(d):
                for b in range(d):
                    big[i * d + a][j * d + b] = block[a][b]
    return big


def is_unimodular(f):
    if f.rank == 0:
        return True
    if f.gens is None:
        return linalg.ring_is_invertible(
            f.algebra.base, _gram_r_matrix(f.algebra, f.gram)
        )
    from . import morita

    return morita.gens_form_unimodular(f)


# ---------------------------------------------------------------------------
# isotropy search


class _FastForm:
    """Per-component numpy kernels for evaluating f(x, x) quickly."""

    def __init__(self, f, c):
        alg = f.algebra
        comp = alg.base.components[c]
        self.p = comp.p
        self.k = comp.k
        self.m = comp.modulus
        d = alg.dim
        n = f.rank
        self.d, self.n = d, n
        struct, inv = alg.fast()[c]
        self.inv_mat = np.array(inv, dtype=np.int64)  # row i -> image coords
        nd = n * d
        B = np.zeros((d, nd, nd), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                gij = f.gram[i][j]
                for a in range(d):
                    ea = [0] * d
                    ea[a] = 1
                    left = rings_struct_mul(struct, ea, [
                        x.coords[c] for x in gij.coords
                    ], self.m)
                    for b in range(d):
                        eb = [0] * d
                        eb[b] = 1
                        vec = rings_struct_mul(struct, left, eb, self.m)
                        for t in range(d):
                            B[t, i * d + a, j * d + b] = vec[t]
        self.B = B % self.m

    def qvals(self, X):
        """f(x,x) coordinates for a batch of raw vectors X of shape (N, nd)."""
        n, d = self.n, self.d
        U = np.zeros_like(X)
        for i in range(n):
            U[:, i * d: (i + 1) * d] = X[:, i * d: (i + 1) * d] @ self.inv_mat
        U %= self.m
        out = np.empty((X.shape[0], d), dtype=np.int64)
        for t in range(d):
            out[:, t] = ((U @ self.B[t]) * X).sum(axis=1) % self.m
        return out % self.m


def rings_struct_mul(struct, x, y, m):
    d = len(x)
    out = [0] * d
    for i in range(d):
        if x[i] == 0:
            continue
        row = struct[i]
        for j in range(d):
            if y[j] == 0:
                continue
            s = x[i] * y[j]
            cij = row[j]
            for t in range(d):
                if cij[t]:
                    out[t] = (out[t] + s * cij[t]) % m
    return out


def find_isotropic(f, seed=0):
    """A pair (x, y) with f(x,x) = 0 and f(x,y) = 1, or None when f is
    anisotropic in this vector sense.  Raises Inconclusive if the bounded
    searches end without exhausting the space."""
    f.require_free()
    alg = f.algebra
    ring = alg.base
    if f.rank == 0:
        return None
    if not ring.is_enumerable:
        return _find_isotropic_real(f)
    per_comp = []
    for c in range(len(ring.components)):
        w = _find_isotropic_component(f, c, seed)
        if w is None:
            return None
        per_comp.append(w)
    xs = [w[0] for w in per_comp]
    ys = [w[1] for w in per_comp]
    x = _combine_vectors(alg, xs)
    y = _combine_vectors(alg, ys)
    assert f.evaluate(x, x).is_zero()
    assert f.evaluate(x, y) == alg.one()
    return x, y


def _combine_vectors(alg, per_comp_vectors):
    ring = alg.base
    n = len(per_comp_vectors[0])
    out = []
    for i in range(n):
        coords = []
        for t in range(alg.dim):
            coords.append(
                ring.element(
                    tuple(
                        v[i].coords[t].coords[0] for v in per_comp_vectors
                    )
                )
            )
        out.append(alg.element(coords))
    return out


def _find_isotropic_component(f, c, seed):
    """Witness over one Z/p^k component, by residue search then lifting."""
    alg = f.algebra
    comp = alg.base.components[c]
    p = comp.p
    sub = alg.base.component_ring(c)
    proj_alg = algebras.project_algebra(alg, c)
    proj_gram = [
        [algebras.project_element(x, proj_alg, c) for x in row]
        for row in f.gram
    ]
    fc = HermitianForm(
        proj_alg,
        algebras.project_element(f.eps, proj_alg, c),
        proj_gram,
        validate=False,
    )
    xbar = _residue_isotropic(fc, seed)
    if xbar is None:
        return None
    x = _hensel_lift_isotropic(fc, xbar)
    y = _solve_pairing_one(fc, x)
    if y is None:
        raise Inconclusive("residue witness failed to lift")
    return x, y


def _residue_isotropic(fc, seed):
    """Raw search over the residue field of the (single) component."""
    alg = fc.algebra
    comp = alg.base.components[0]
    p = comp.p
    d = alg.dim
    n = fc.rank
    nd = n * d
    fast = _FastForm(fc, 0)

    def scan(batch):
        X = np.array(batch, dtype=np.int64)
        vals = fast.qvals(X % p) % p
        hits = np.where(~vals.any(axis=1))[0]
        for h in hits:
            raw = [int(v) for v in X[h]]
            if all(v % p == 0 for v in raw):
                continue
            x = _raw_to_vec(alg, raw)
            if _solve_pairing_one_residue(fc, x) is not None:
                return x
        return None

    # supports of growing size, exhaustively while cheap
    total = p ** nd
    import random as _random

    rng = _random.Random(seed)
    for s in range(1, n + 1):
        count = 1
        for _ in range(s):
            count *= p ** d
        slots = list(itertools.combinations(range(n), s))
        level = len(slots) * count
        if level > SUPPORT_LEVEL_CAP:
            break
        batch = []
        for chosen in slots:
            for fill in itertools.product(range(p ** d), repeat=s):
                raw = [0] * nd
                skip = False
                for slot, code in zip(chosen, fill):
                    digits = _digits(code, p, d)
                    if all(v == 0 for v in digits):
                        skip = True
                        break
                    raw[slot * d: (slot + 1) * d] = digits
                if skip:
                    continue
                batch.append(raw)
                if len(batch) == 8192:
                    found = scan(batch)
                    if found is not None:
                        return found
                    batch = []
        if batch:
            found = scan(batch)
            if found is not None:
                return found
    if total <= EXHAUSTIVE_CAP:
        return _exhaustive_scan(fc, fast, p, nd)
    for _ in range(RANDOM_TRIALS // 256 + 1):
        batch = [
            [rng.randrange(p) for _ in range(nd)] for _ in range(256)
        ]
        found = scan(batch)
        if found is not None:
            return found
    raise Inconclusive(
        "no isotropic vector found within the search caps (space size %d)"
        % total
    )


def _exhaustive_scan(fc, fast, p, nd):
    alg = fc.algebra
    batch = []
    for combo in itertools.product(range(p), repeat=nd):
        batch.append(combo)
        if len(batch) == 8192:
            r = _scan_batch(fc, fast, batch, p)
            if r is not None:
                return r
            batch = []
    if batch:
        r = _scan_batch(fc, fast, batch, p)
        if r is not None:
            return r
    return None


def _scan_batch(fc, fast, batch, p):
    X = np.array(batch, dtype=np.int64)
    vals = fast.qvals(X) % p
    hits = np.where(~vals.any(axis=1))[0]
    for h in hits:
        raw = [int(v) for v in X[h]]
        if all(v == 0 for v in raw):
            continue
        x = _raw_to_vec(fc.algebra, raw)
        if _solve_pairing_one_residue(fc, x) is not None:
            return x
    return None


def _digits(code, p, d):
    out = []
    for _ in range(d):
        out.append(code % p)
        code //= p
    return out


def _raw_to_vec(alg, raw):
    d = alg.dim
    n = len(raw) // d
    ring = alg.base
    return [
        alg.element([ring.from_int(v) for v in raw[i * d: (i + 1) * d]])
        for i in range(n)
    ]


def _pairing_matrix(f, x):
    """R-matrix of y -> f(x, y) as a map A^n -> A in coordinates."""
    alg = f.algebra
    ring = alg.base
    n = f.rank
    d = alg.dim
    rows = [[ring.zero()] * (n * d) for _ in range(d)]
    for j in range(n):
        coef = alg.zero()
        for i in range(n):
            xi = x[i]
            if xi.is_zero():
                continue
            coef = coef + xi.involute() * f.gram[i][j]
        block = coef.left_mult_matrix()
        for a in range(d):
            for b in range(d):
                rows[a][j * d + b] = block[a][b]
    return rows


def _solve_pairing_one(f, x):
    alg = f.algebra
    sol = linalg.ring_solve(
        alg.base, _pairing_matrix(f, x), list(alg.one().coords)
    )
    if sol is None:
        return None
    d = alg.dim
    return [
        alg.element(sol[j * d: (j + 1) * d]) for j in range(f.rank)
    ]


def _solve_pairing_one_residue(fc, x):
    # fc already lives over Z/p^k; solvability mod p decides solvability
    alg = fc.algebra
    ring = alg.base
    comp = ring.components[0]
    mat = _pairing_matrix(fc, x)
    ops = linalg.ZModOps(comp.p, 1)
    m_p = [[v.coords[0] % comp.p for v in row] for row in mat]
    one_p = [v.coords[0] % comp.p for v in alg.one().coords]
    return linalg.solve(ops, m_p, one_p)


def _hensel_lift_isotropic(fc, x):
    """Refine x so that f(x,x) = 0 exactly over Z/p^k, keeping x mod p."""
    alg = fc.algebra
    comp = alg.base.components[0]
    p, k = comp.p, comp.k
    half = alg.base.from_int(2).inv()
    cur = list(x)
    for _ in range(k + 1):
        val = fc.evaluate(cur, cur)
        if val.is_zero():
            return cur
        # f(x,h) + eps*f(x,h)^sigma = -val needs f(x,h) = -val/2
        target = -(val * half)
        mat = _pairing_matrix(fc, cur)
        sol = linalg.ring_solve(alg.base, mat, list(target.coords))
        if sol is None:
            raise Inconclusive("correction system unsolvable during lifting")
        d = alg.dim
        h = [alg.element(sol[j * d: (j + 1) * d]) for j in range(fc.rank)]
        cur = [a + b for a, b in zip(cur, h)]
    val = fc.evaluate(cur, cur)
    if not val.is_zero():
        raise Inconclusive("lifting failed to converge")
    return cur


def _find_isotropic_real(f):
    """Sign-exact real components: verdict by signature; a witness is
    produced only when one exists with rational coordinates."""
    alg = f.algebra
    sig = signature(f)
    npos, nneg = sig
    if npos == 0 or nneg == 0:
        return None
    raise Inconclusive(
        "form is isotropic over the reals but no rational witness is computed"
    )


def signature(f):
    """(positives, negatives) of a diagonalizable form over a real base."""
    alg = f.algebra
    if alg.base.is_enumerable:
        raise Unsupported("signature needs a real base component")
    ents = diagonalize(f)
    npos = nneg = 0
    for a in ents:
        s = _scalar_of(alg, a) if a.is_central() else None
        if s is None:
            raise Unsupported("non-scalar diagonal entry over the reals")
        v = s.coords[0]
        if v > 0:
            npos += 1
        else:
            nneg += 1
    return npos, nneg


# ---------------------------------------------------------------------------
# hyperbolic splitting and Witt decomposition


def split_hyperbolic_plane(f, x, y):
    """Split the hyperbolic plane spanned by (x, z) off f; returns the
    complement form and the change-of-basis columns [x, z, complement]."""
    alg = f.algebra
    if not f.evaluate(x, x).is_zero() or f.evaluate(x, y) != alg.one():
        raise InvalidWitness("witness pair does not span a hyperbolic plane")
    half = alg.scalar(algebras_half(alg))
    c = half * f.eps.inv() * f.evaluate(y, y)
    z = [yi - xi * c for xi, yi in zip(y, x)]
    # associativity of the module action lets us reuse evaluate
    z = [yi - xi for yi, xi in zip(y, [xi * c for xi in x])]
    if not f.evaluate(z, z).is_zero() or f.evaluate(x, z) != alg.one():
        raise InvalidWitness("normalized partner failed")
    eps_s = f.eps.involute()

    def project(v):
        a = eps_s * f.evaluate(z, v)
        b = f.evaluate(x, v)
        return [
            vi - xi * a - zi * b for vi, xi, zi in zip(v, x, z)
        ]

    n = f.rank
    ring = alg.base
    basis_vecs = []
    rows = []
    d = alg.dim
    for i in range(n):
        e = [alg.zero()] * n
        e[i] = alg.one()
        w = project(e)
        flat = []
        for comp_vec in w:
            flat.extend(comp_vec.coords)
        trial = rows + [[val for val in flat]]
        stacked = _with_plane_rows(alg, x, z, trial)
        ranks = linalg.ring_residue_ranks(
            ring, [[r[t] for r in stacked] for t in range(n * d)]
        )
        if all(r == len(stacked) for r in ranks):
            basis_vecs.append(w)
            rows = trial
        if len(basis_vecs) == n - 2:
            break
    if len(basis_vecs) != n - 2:
        raise InvalidWitness("failed to complete a complement basis")
    gram = [
        [f.evaluate(u, v) for v in basis_vecs] for u in basis_vecs
    ]
    rest = HermitianForm(alg, f.eps, gram)
    return rest, [x, z] + basis_vecs


def _with_plane_rows(alg, x, z, extra_rows):
    rows = []
    for vec in (x, z):
        flat = []
        for comp_vec in vec:
            flat.extend(comp_vec.coords)
        rows.append(flat)
    rows.extend(extra_rows)
    return rows


def algebras_half(alg):
    return alg.base.from_int(2).inv()


def witt_decompose(f, seed=0):
    """(anisotropic kernel, number of hyperbolic planes split off)."""
    f.require_free()
    if not f.algebra.base.is_enumerable:
        return _witt_decompose_real(f)
    h = 0
    cur = f
    while cur.rank > 0:
        w = find_isotropic(cur, seed=seed)
        if w is None:
            break
        cur, _ = split_hyperbolic_plane(cur, w[0], w[1])
        h += 1
    return cur, h


def _witt_decompose_real(f):
    alg = f.algebra
    ents = diagonalize(f)
    pos = []
    neg = []
    for a in ents:
        s = _scalar_of(alg, a)
        (pos if s.coords[0] > 0 else neg).append(a)
    h = min(len(pos), len(neg))
    rest = pos[h:] + neg[h:]
    return make_diagonal(alg, f.eps, rest) if rest else zero_form(
        alg, f.eps
    ), h


# ---------------------------------------------------------------------------
# diagonalization


def diagonalize(f, seed=0):
    """Unit diagonal entries of a form isometric to f.

    Greedy: find a vector of unit length, split it off orthogonally,
    recurse.  Requires the standard non-symplectic hypothesis (or even
    degree), which all callers satisfy.
    """
    f.require_free()
    alg = f.algebra
    ring = alg.base
    if f.rank == 0:
        return []
    v = _find_unit_vector(f, seed)
    if v is None:
        raise Unsupported("no unit-length vector found; cannot diagonalize")
    a = f.evaluate(v, v)
    ainv = a.inv()

    def project(w):
        coef = ainv * f.evaluate(v, w)
        return [wi - vi * coef for wi, vi in zip(w, v)]

    n = f.rank
    d = alg.dim
    basis_vecs = []
    rows = [_flat(v)]
    for i in range(n):
        e = [alg.zero()] * n
        e[i] = alg.one()
        w = project(e)
        trial = rows + [_flat(w)]
        ranks = linalg.ring_residue_ranks(
            ring, [[r[t] for r in trial] for t in range(n * d)]
        )
        if all(r == len(trial) for r in ranks):
            basis_vecs.append(w)
            rows = trial
        if len(basis_vecs) == n - 1:
            break
    if len(basis_vecs) != n - 1:
        raise Unsupported("failed to split off a unit vector")
    gram = [[f.evaluate(u, w) for w in basis_vecs] for u in basis_vecs]
    rest = HermitianForm(alg, f.eps, gram)
    return [a] + diagonalize(rest, seed=seed)


def _flat(vec):
    out = []
    for comp in vec:
        out.extend(comp.coords)
    return out


def _find_unit_vector(f, seed=0):
    alg = f.algebra
    n = f.rank
    for i in range(n):
        e = [alg.zero()] * n
        e[i] = alg.one()
        if f.evaluate(e, e).is_unit():
            return e
    if alg.base.is_enumerable:
        units = list(itertools.islice(alg.base.units(), 64))
        scalars = [alg.scalar(u) for u in units]
    else:
        scalars = [alg.scalar(alg.base.from_int(v)) for v in (1, -1, 2, -2, 3)]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for u in scalars:
                e = [alg.zero()] * n
                e[i] = alg.one()
                e[j] = u
                if f.evaluate(e, e).is_unit():
                    return e
    import random as _random

    rng = _random.Random(seed)
    if alg.base.is_enumerable:
        pool = list(alg.base.elements())
        for _ in range(20000):
            e = [
                alg.element([rng.choice(pool) for _ in range(alg.dim)])
                for _ in range(n)
            ]
            if f.evaluate(e, e).is_unit():
                return e
    else:
        for _ in range(2000):
            e = [
                alg.element(
                    [alg.base.from_int(rng.randrange(-3, 4)) for _ in range(alg.dim)]
                )
                for _ in range(n)
            ]
            if f.evaluate(e, e).is_unit():
                return e
    return None


# ---------------------------------------------------------------------------
# class-level decisions (delegated to the Morita machinery)


def is_hyperbolic(f):
    from . import morita

    return morita.class_zero(f)


def witt_equivalent(f, g):
    if not f.same_side(g):
        raise FormMismatch("forms live on different sides")
    from . import morita

    return morita.class_zero(direct_sum(f, negate(g)))


def is_isometric(f, g):
    """Equal underlying modules and equal Witt classes; over a semilocal
    base this is equivalent to the existence of an isometry."""
    if not f.same_side(g):
        raise FormMismatch("forms live on different sides")
    from . import morita

    if morita.module_profile(f) != morita.module_profile(g):
        return False
    return witt_equivalent(f, g)


# ---------------------------------------------------------------------------
# discriminants


class DiscClass:
    """A discriminant: a representative unit together with its class kind
    ('square' or 'norm') and triviality verdict."""

    def __init__(self, kind, rep, trivial, norm_param=None):
        self.kind = kind
        self.rep = rep
        self.trivial = trivial
        self.norm_param = norm_param

    def same_class(self, other):
        if self.kind != other.kind:
            return False
        from .rings import norm_class, square_class

        ratio = self.rep * other.rep.inv()
        if self.kind == "square":
            return square_class(ratio)
        return norm_class(self.norm_param, ratio)

    def __repr__(self):
        return "<disc %s rep=%r trivial=%r>" % (self.kind, self.rep, self.trivial)


def discriminant(f):
    """Square-class (orthogonal) or norm-class (unitary) discriminant."""
    from .rings import norm_class, square_class

    alg = f.algebra
    types = algebras.involution_type(alg, f.eps)
    if all(t == "orthogonal" for t in types):
        n = _reduced_rank(f)
        if n % 2 or (n == 0 and f.rank > 0):
            raise InvalidRank("orthogonal discriminants need even reduced rank")
        if alg.degree == 1:
            rep = _disc_deg1_orthogonal(f)
        else:
            rep = _disc_formula_v(f)
        return DiscClass("square", rep, square_class(rep))
    if all(t == "unitary" for t in types):
        n = _reduced_rank(f)
        if n % 2:
            raise InvalidRank("unitary discriminants need even reduced rank")
        if alg.degree == 1:
            g = f
        else:
            from . import morita

            ctx = morita.shadow_context(alg, f.eps)
            if ctx.conj is not None:
                raise Unsupported("unexpected conjugation in the unitary case")
            g = morita.shadow(ctx, f)
        rep, lam_sq = _disc_deg1_unitary(g)
        return DiscClass("norm", rep, norm_class(lam_sq, rep), lam_sq)
    raise Unsupported("discriminant outside the orthogonal and unitary cases")


def _reduced_rank(f):
    if f.gens is None:
        deg_ratio = f.algebra.degree
        # rrk of the free module A^n
        n = f.rank * _module_rrk_unit(f.algebra)
        return n
    from . import morita

    return sum(morita.gens_rank_profile(f))


def _module_rrk_unit(alg):
    # rrk of A as a module over itself equals its degree over the center
    return alg.degree


def _disc_deg1_orthogonal(f):
    alg = f.algebra
    ring = alg.base
    mat = [[_scalar_of(alg, x) for x in row] for row in f.gram]
    n = f.rank
    det = linalg.ring_det(ring, mat) if n else ring.one()
    sign = ring.from_int(-1) if (n // 2) % 2 else ring.one()
    return sign * det


def _disc_formula_v(f):
    """(-1)^(n d / 2) Nrd(u)^n prod Nrd(a_i) for diagonal forms over an
    even-degree algebra; non-diagonal inputs are diagonalized first."""
    alg = f.algebra
    ring = alg.base
    if f.gens is None and all(
        f.gram[i][j].is_zero()
        for i in range(f.rank)
        for j in range(f.rank)
        if i != j
    ):
        entries = [f.gram[i][i] for i in range(f.rank)]
    else:
        from . import morita

        ctx = morita.shadow_context(alg, f.eps)
        return _disc_deg1_orthogonal(morita.shadow(ctx, f))
    d = alg.degree
    if d % 2:
        raise Unsupported("even degree required")
    n = len(entries)
    minus_eps = -f.eps
    u = None
    for cand in algebras.sym_units(alg, minus_eps, limit=1):
        u = cand
        break
    if u is None:
        raise Unsupported("no skew unit available for the discriminant")
    _, nrd_u = algebras.reduced_trace_norm(u)
    acc = ring.one()
    for a in entries:
        _, nrd_a = algebras.reduced_trace_norm(a)
        acc = acc * _scalar_of(alg, nrd_a)
    nrd_u_s = _scalar_of(alg, nrd_u)
    for _ in range(n):
        acc = acc * nrd_u_s
    if (n * d // 2) % 2:
        acc = ring.from_int(-1) * acc
    return acc


def _disc_deg1_unitary(g):
    """(-eps)^(-n/2) det over the quadratic etale center."""
    alg = g.algebra
    ring = alg.base
    n = g.rank
    det = None
    mat = [[list(x.coords) for x in row] for row in g.gram]
    det = _etale_det(alg, g.gram)
    eps = g.eps
    meps = -eps
    power = meps.inv()
    acc = alg.one()
    for _ in range(n // 2):
        acc = acc * power
    rep_alg = acc * det
    lam = _skew_generator(alg)
    lam_sq = _scalar_of(alg, lam * lam)
    if rep_alg.involute() != rep_alg:
        raise Unsupported("unitary discriminant left the fixed ring")
    rep = _scalar_of(alg, rep_alg)
    return rep, lam_sq


def _etale_det(alg, G):
    n = len(G)
    if n == 0:
        return alg.one()
    M = [list(row) for row in G]
    det = alg.one()
    for c in range(n):
        piv = None
        for i in range(c, n):
            if M[i][c].is_unit():
                piv = i
                break
        if piv is None:
            raise NotUnimodular("etale Gram determinant hit a non-unit pivot")
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det = det * M[c][c]
        inv = M[c][c].inv()
        for i in range(c + 1, n):
            factor = M[i][c] * inv
            if not factor.is_zero():
                M[i] = [x - factor * y for x, y in zip(M[i], M[c])]
    return det


def _skew_generator(alg):
    basis = algebras.sym_basis(alg, alg.scalar(-1))
    for b in basis:
        if b.is_unit():
            return b
    for b in basis:
        if not b.is_zero():
            return b
    raise Unsupported("no skew generator in the center")


def disc_algebra(ring, lam_sq, alpha):
    """The crossed product of R[lam | lam^2 = lam_sq] with alpha, as a
    quaternion-shaped algebra."""
    from .algebras import make_quaternion

    return make_quaternion(ring, lam_sq, alpha)


def disc_algebras_equal(ring, lam_sq, alpha, beta):
    from .rings import norm_class

    if isinstance(alpha, int):
        alpha = ring.from_int(alpha)
    if isinstance(beta, int):
        beta = ring.from_int(beta)
    if isinstance(lam_sq, int):
        lam_sq = ring.from_int(lam_sq)
    return norm_class(lam_sq, alpha * beta.inv())


# ---------------------------------------------------------------------------
# Lagrangians


def verify_lagrangian(f, L, M=None):
    """Check that the columns of L span a Lagrangian of f; when M is given
    it must be a complementary totally isotropic family."""
    alg = f.algebra
    ring = alg.base
    d = alg.dim
    n = f.rank
    for u in L:
        for v in L:
            if not f.evaluate(u, v).is_zero():
                return False
    if M is not None:
        for u in M:
            for v in M:
                if not f.evaluate(u, v).is_zero():
                    return False
        cols = []
        for v in list(L) + list(M):
            for b in alg.basis():
                w = [vi * b for vi in v]
                flat = []
                for comp in w:
                    flat.extend(comp.coords)
                cols.append(flat)
        if len(cols) != n * d:
            cols = _span_columns(alg, L) + _span_columns(alg, M)
        mat = [[cols[j][t] for j in range(len(cols))] for t in range(n * d)]
        return len(cols) == n * d and linalg.ring_is_invertible(ring, mat)
    cols = _span_columns(alg, L)
    mat = [[cols[j][t] for j in range(len(cols))] for t in range(n * d)]
    ranks = linalg.ring_residue_ranks(ring, mat)
    if any(r != len(cols) for r in ranks):
        return False
    return 2 * len(cols) == n * d


def _span_columns(alg, vectors):
    """R-columns spanning the right A-module generated by the vectors."""
    cols = []
    seen = set()
    ring = alg.base
    d = alg.dim
    for v in vectors:
        for b in alg.basis():
            w = [vi * b for vi in v]
            flat = []
            for comp in w:
                flat.extend(comp.coords)
            cols.append(flat)
    # prune to an R-spanning independent subset by residue ranks
    kept = []
    rows = []
    target_len = len(cols[0]) if cols else 0
    for cvec in cols:
        trial = rows + [cvec]
        mat = [[r[t] for r in trial] for t in range(target_len)]
        if all(
            rk == len(trial) for rk in linalg.ring_residue_ranks(ring, mat)
        ):
            kept.append(cvec)
            rows = trial
    return kept


def lagrangian_phi(f, L, M):
    """(-1)^(rrk L - rrk(L cap M)) at each residue component; base
    components must be fields and (sigma, eps) orthogonal."""
    alg = f.algebra
    ring = alg.base
    types = algebras.involution_type(alg, f.eps)
    if any(t != "orthogonal" for t in types):
        raise Unsupported("the sign formula needs an orthogonal pair")
    for comp in ring.components:
        if comp.kind == "zmod" and comp.k != 1:
            raise Unsupported("the sign formula is residue-field level")
    if not (
        verify_lagrangian(f, L) and verify_lagrangian(f, M)
    ):
        raise InvalidWitness("inputs are not Lagrangians")
    cols_l = _span_columns(alg, L)
    cols_m = _span_columns(alg, M)
    d = alg.dim
    n = f.rank
    out = []
    for c, comp in enumerate(ring.components):
        ops = linalg.ops_for(comp)
        A = [[col[t].coords[c] for col in cols_l] for t in range(n * d)]
        B = [[col[t].coords[c] for col in cols_m] for t in range(n * d)]
        both = [
            [col[t].coords[c] for col in cols_l + cols_m]
            for t in range(n * d)
        ]
        dim_l = linalg.residue_rank(ops, A)
        dim_m = linalg.residue_rank(ops, B)
        dim_sum = linalg.residue_rank(ops, both)
        dim_int = dim_l + dim_m - dim_sum
        unit = alg.dim // alg.degree
        rrk_l = dim_l // unit
        rrk_i = dim_int // unit
        out.append(1 if (rrk_l - rrk_i) % 2 == 0 else -1)
    return out
