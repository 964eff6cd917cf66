"""Reduction of Witt-class questions to commutative forms.

Every algebra the library constructs is, componentwise, either
commutative or of degree 2 over its center and split at all finite
residues.  Class-level questions (is a form hyperbolic, are two forms
Witt equivalent) are answered by reducing to forms over connected
commutative pieces:

* commutative algebras split into involution-orbits of primitive
  idempotents; orbit pairs carry an exchange involution and contribute
  nothing, fixed idempotents give corner transfers;
* degree-2 algebras are conjugated until the involution admits an
  invariant idempotent of reduced rank one, then corner-transferred to
  their center.

Over connected commutative pieces the vector-splitting Witt
decomposition is complete, so the reduction yields honest decisions.
"""

from __future__ import annotations

import itertools

from . import algebras, forms, linalg, rings
from .algebras import AlgElement
from .errors import Inconclusive, NotIdempotent, Unsupported

_PIECE_CACHE = {}
_SHADOW_CACHE = {}


class Piece:
    def __init__(self, kind, idem, partner=None, corner_pack=None):
        self.kind = kind  # "fixed" or "exchange"
        self.idem = idem
        self.partner = partner
        self.corner_pack = corner_pack

    def __repr__(self):
        return "<piece %s>" % self.kind


def commutative_pieces(alg):
    """Involution-orbit decomposition of a commutative algebra over an
    enumerable base into connected corners."""
    key = id(alg)
    if key in _PIECE_CACHE:
        return _PIECE_CACHE[key]
    if alg.dim != len(alg.center_basis):
        raise Unsupported("piece decomposition needs a commutative algebra")
    idems = _exact_idempotents(alg)
    primitives = []
    nonzero = [e for e in idems if not e.is_zero()]
    for e in nonzero:
        if all(
            (f == e) or (f * e != f)
            for f in nonzero
        ):
            primitives.append(e)
    total = alg.zero()
    for e in primitives:
        total = total + e
    if total != alg.one():
        raise Unsupported("primitive idempotents do not sum to 1")
    pieces = []
    used = set()
    for e in primitives:
        if id(e) in used:
            continue
        img = e.involute()
        if img == e:
            pieces.append(
                Piece("fixed", e, corner_pack=forms.corner_algebra(alg, e))
            )
            used.add(id(e))
        else:
            partner = None
            for f in primitives:
                if f == img:
                    partner = f
                    break
            if partner is None:
                raise Unsupported("involution does not permute the primitives")
            pieces.append(Piece("exchange", e, partner=partner))
            used.add(id(e))
            used.add(id(partner))
    _PIECE_CACHE[key] = pieces
    return pieces


def _exact_idempotents(alg):
    """All idempotents, lifted componentwise from the residue algebras."""
    ring = alg.base
    per_comp = []
    for c, comp in enumerate(ring.components):
        if comp.kind != "zmod":
            raise Unsupported("idempotent enumeration needs a finite base")
        p = comp.p
        struct, _ = alg.fast()[c]
        struct_p = [[[x % p for x in cell] for cell in row] for row in struct]
        found = []
        for combo in itertools.product(range(p), repeat=alg.dim):
            e = list(combo)
            if forms.rings_struct_mul(struct_p, e, e, p) == e:
                found.append(e)
        lifted = []
        full_struct = [
            [[x.coords[c] for x in cell] for cell in row]
            for row in alg.structure
        ]
        for e in found:
            lifted.append(rings.lift_idempotent(full_struct, e, comp.p, comp.k))
        per_comp.append(lifted)
    out = []
    for combo in itertools.product(*per_comp):
        coords = [
            ring.element(tuple(combo[c][t] for c in range(len(per_comp))))
            for t in range(alg.dim)
        ]
        out.append(alg.element(coords))
    return out


# ---------------------------------------------------------------------------
# degree-2 shadows


class ShadowContext:
    def __init__(self, alg, eps, conj, conj_alg, e, corner_pack):
        self.alg = alg
        self.eps = eps
        self.conj = conj
        self.conj_alg = conj_alg
        self.e = e
        self.corner_pack = corner_pack
        self.corner = corner_pack[0]


def shadow_context(alg, eps):
    key = (id(alg), tuple(eps.coords))
    if key in _SHADOW_CACHE:
        return _SHADOW_CACHE[key]
    types = algebras.involution_type(alg, alg.one())
    conj = None
    conj_alg = alg
    if any(t == "symplectic" for t in types):
        conj = _skew_unit(alg)
        conj_alg = algebras.with_involution(
            alg, algebras.inner_twisted_involution(alg, conj)
        )
    e = algebras.find_rank1_idempotent_invariant(conj_alg)
    pack = forms.corner_algebra(conj_alg, e)
    ctx = ShadowContext(alg, eps, conj, conj_alg, e, pack)
    _SHADOW_CACHE[key] = ctx
    return ctx


def _skew_unit(alg):
    if alg.lmbda is not None:
        lam = alg.lam()
        if lam.involute() == -lam and lam.is_unit():
            return lam
    for u in algebras.sym_units(alg, alg.scalar(-1), limit=1):
        return u
    raise Unsupported("no skew unit available for conjugation")


def shadow(ctx, f):
    """The corner transfer of f (after conjugation when needed)."""
    g = f
    if ctx.conj is not None:
        target = ctx.conj_alg
        gram = [
            [AlgElement(target, (ctx.conj * x).coords) for x in row]
            for row in f.gram
        ]
        eps = AlgElement(target, (-f.eps).coords)
        gens = None
        if f.gens is not None:
            gens = tuple(AlgElement(target, w.coords) for w in f.gens)
        g = forms.HermitianForm(target, eps, gram, gens=gens)
    return forms.transfer_to_corner(g, ctx.e, ctx.corner_pack)


def unshadow_unit(ctx, s):
    """The rank-one module form over (A, sigma, eps) whose shadow is <s>."""
    corner, cbasis, _ = ctx.corner_pack
    shat = ctx.conj_alg.zero()
    for coef, b in zip(s.coords, cbasis):
        shat = shat + b * coef
    if ctx.conj is not None:
        val = ctx.conj.inv() * AlgElement(ctx.alg, shat.coords)
    else:
        val = AlgElement(ctx.alg, shat.coords)
    gen = AlgElement(ctx.alg, ctx.e.coords)
    return forms.HermitianForm(
        ctx.alg, ctx.eps, [[val]], gens=[gen]
    )


# ---------------------------------------------------------------------------
# uniform commutative reduction


def commutative_reduction(f):
    """A list of free forms over connected commutative pieces carrying the
    whole Witt-theoretic content of f; exchange blocks are dropped after
    verifying their vanishing."""
    out = []
    alg = f.algebra
    ring = alg.base
    if len(ring.components) > 1:
        for c in range(len(ring.components)):
            out.extend(commutative_reduction(project_form(f, c)))
        return out
    comp = ring.components[0]
    if comp.kind == "real":
        return [("real", f)]
    if alg.dim == len(alg.center_basis):
        pieces = commutative_pieces(alg)
        if (
            len(pieces) == 1
            and pieces[0].kind == "fixed"
            and pieces[0].idem == alg.one()
            and f.gens is None
        ):
            return [("zmod", f)]
        for piece in pieces:
            if piece.kind == "exchange":
                _check_exchange_block(f, piece)
                continue
            g = forms.transfer_to_corner(f, piece.idem, piece.corner_pack)
            out.append(("zmod", g))
        return out
    # degree >= 2: exchange center first, else shadow
    z = _exchange_center_idempotent(alg)
    if z is not None:
        return []
    ctx = shadow_context(alg, f.eps)
    return commutative_reduction(shadow(ctx, f))


def _check_exchange_block(f, piece):
    e = piece.idem
    gens = f.gens or tuple([f.algebra.one()] * f.rank)
    for i in range(f.rank):
        for j in range(f.rank):
            v = e.involute() * f.gram[i][j] * e
            if not v.is_zero():
                raise Unsupported("exchange block does not vanish")


_EXCHANGE_CACHE = {}


def _exchange_center_idempotent(alg):
    """A central idempotent z with z^sigma = 1 - z, if one exists."""
    key = id(alg)
    if key in _EXCHANGE_CACHE:
        return _EXCHANGE_CACHE[key]
    out = _exchange_center_fresh(alg)
    _EXCHANGE_CACHE[key] = out
    return out


def _exchange_center_fresh(alg):
    ring = alg.base
    if not ring.is_enumerable:
        return None
    # the center is spanned by center_basis; search its idempotents
    zs = [alg.element(z) for z in alg.center_basis]
    if len(zs) < 2:
        return None
    sub_dim = len(zs)
    for combo in itertools.product(ring.elements(), repeat=sub_dim):
        cand = alg.zero()
        for coef, z in zip(combo, zs):
            cand = cand + z * coef
        if cand.is_zero() or cand == alg.one():
            continue
        if cand * cand == cand and cand.involute() == alg.one() - cand:
            return cand
    return None


def project_form(f, c):
    alg = f.algebra
    proj_alg = algebras.project_algebra(alg, c)
    gram = [
        [algebras.project_element(x, proj_alg, c) for x in row]
        for row in f.gram
    ]
    gens = None
    if f.gens is not None:
        gens = [algebras.project_element(w, proj_alg, c) for w in f.gens]
    return forms.HermitianForm(
        proj_alg,
        algebras.project_element(f.eps, proj_alg, c),
        gram,
        gens=gens,
        validate=False,
    )


# ---------------------------------------------------------------------------
# class decisions


def class_zero(f):
    """True iff f is trivial in the Witt group (equivalently hyperbolic,
    over a semilocal base)."""
    if f.rank == 0:
        return True
    alg = f.algebra
    ring = alg.base
    if not ring.is_enumerable and any(
        c.kind == "real" for c in ring.components
    ):
        if len(ring.components) > 1:
            return all(
                class_zero(project_form(f, c))
                for c in range(len(ring.components))
            )
        return _class_zero_real(f)
    pieces = commutative_reduction(f)
    for kind, g in pieces:
        if kind == "real":
            if not _class_zero_real(g):
                return False
            continue
        kernel, _ = forms.witt_decompose(g)
        if kernel.rank != 0:
            return False
    return True


def _class_zero_real(f):
    alg = f.algebra
    if alg.dim == len(alg.center_basis):
        sigs = real_signatures(f)
        return all(p == n for p, n in sigs)
    if alg.tag == "quaternion":
        lam2 = forms._scalar_of(alg, alg.lam() * alg.lam()).coords[0]
        mu2 = forms._scalar_of(alg, alg.mu_elt() * alg.mu_elt()).coords[0]
        if lam2 < 0 and mu2 < 0:
            if f.eps != alg.one():
                raise Unsupported(
                    "class decisions over definite quaternions cover the "
                    "1-hermitian case only"
                )
            tr = forms.trace_transfer(f)
            p, n = forms.signature(tr)
            return p == n
        ctx = shadow_context(alg, f.eps)
        return class_zero(shadow(ctx, f))
    raise Unsupported("no real reduction for %r" % alg.tag)


def real_signatures(f):
    """Signatures of a commutative form at each real embedding."""
    alg = f.algebra
    if alg.dim == 1:
        ents = forms.diagonalize(f)
        p = sum(1 for a in ents if forms._scalar_of(alg, a).coords[0] > 0)
        return [(p, len(ents) - p)]
    # quadratic etale over the sign-exact reals
    lam = alg.lam()
    lam2 = forms._scalar_of(alg, lam * lam).coords[0]
    theta_is_id = lam.involute() == lam
    if not theta_is_id and lam2 < 0:
        # complex conjugation: hermitian entries are real scalars
        ents = forms.diagonalize(f)
        p = sum(1 for a in ents if _etale_coeffs(alg, a)[0] > 0)
        return [(p, len(ents) - p)]
    if not theta_is_id and lam2 > 0:
        # split exchange algebra: everything is hyperbolic
        return [(0, 0)]
    # identity involution on a split or complex etale algebra
    if lam2 < 0:
        raise Unsupported("identity involution on a complex quadratic algebra")
    ents = forms.diagonalize(f)
    sigs = []
    for sign in (1, -1):
        p = n = 0
        for a in ents:
            a0, a1 = _etale_coeffs(alg, a)
            v = _eval_at_sqrt(a0, a1, lam2, sign)
            if v > 0:
                p += 1
            else:
                n += 1
        sigs.append((p, n))
    return sigs


def _etale_coeffs(alg, a):
    return a.coords[0].coords[0], a.coords[1].coords[0]


def _eval_at_sqrt(a0, a1, two, sign):
    """Sign of a0 + sign * a1 * sqrt(two), exactly over the rationals."""
    lhs = a0
    rhs = -sign * a1  # compare a0 with rhs * sqrt(two)
    if rhs == 0:
        return 1 if lhs > 0 else (-1 if lhs < 0 else 0)
    if lhs == 0:
        return 1 if -rhs > 0 else -1
    if (lhs > 0) and (rhs < 0):
        return 1
    if (lhs < 0) and (rhs > 0):
        return -1
    # same side: compare squares
    if lhs * lhs > rhs * rhs * two:
        return 1 if lhs > 0 else -1
    if lhs * lhs < rhs * rhs * two:
        return -1 if lhs > 0 else 1
    return 0


# ---------------------------------------------------------------------------
# module bookkeeping for forms with generators


def gens_rank_profile(f):
    """Per-piece rank vector of the underlying module, used to compare
    modules of forms that are not free."""
    pieces = commutative_reduction(f)
    return tuple(g.rank for kind, g in pieces)


def module_profile(f):
    """Raw R-ranks of the module against the canonical idempotent list of
    its algebra, componentwise; a complete module invariant for the
    algebras in play, including exchange blocks."""
    alg = f.algebra
    ring = alg.base
    if len(ring.components) > 1:
        out = []
        for c in range(len(ring.components)):
            out.extend(module_profile(project_form(f, c)))
        return tuple(out)
    if not ring.is_enumerable:
        return ("real", f.rank)
    idems = _canonical_idempotents(alg)
    gens = f.gens or tuple([alg.one()] * f.rank)
    out = []
    comp = ring.components[0]
    ops = linalg.ops_for(comp)
    n = f.rank
    d = alg.dim
    for z in idems:
        rows = []
        for i, w in enumerate(gens):
            for b in alg.basis():
                u = w * b * z
                row = [0] * (n * d)
                for t in range(d):
                    row[i * d + t] = u.coords[t].coords[0]
                rows.append(row)
        out.append(linalg.residue_rank(ops, rows) if rows else 0)
    return tuple(out)


_CANON_IDEMS = {}


def _canonical_idempotents(alg):
    key = id(alg)
    if key in _CANON_IDEMS:
        return _CANON_IDEMS[key]
    if alg.dim == len(alg.center_basis):
        prims = []
        for piece in commutative_pieces(alg):
            prims.append(piece.idem)
            if piece.kind == "exchange":
                prims.append(piece.partner)
        out = prims
    else:
        z = _exchange_center_idempotent(alg)
        if z is not None:
            out = [z, alg.one() - z]
        else:
            out = [alg.one()]
    _CANON_IDEMS[key] = out
    return out


def gens_form_unimodular(f):
    """Unimodularity via nondegeneracy at every residue field."""
    alg = f.algebra
    ring = alg.base
    gens = f.gens or tuple([alg.one()] * f.rank)
    d = alg.dim
    basis_rows = []
    slots = []
    for i, w in enumerate(gens):
        rows = []
        for b in alg.basis():
            u = w * b
            cand = rows + [list(u.coords)]
            mat = [[r[t] for r in cand] for t in range(d)]
            if all(
                r == len(cand)
                for r in linalg.ring_residue_ranks(ring, mat)
            ):
                rows = cand
                slots.append((i, b))
        basis_rows.extend(rows)
    m = len(slots)
    big = []
    for (i, b1) in slots:
        row = []
        for (j, b2) in slots:
            val = (gens[i] * b1).involute() * f.gram[i][j] * (gens[j] * b2)
            row.extend(val.coords)
        big.append(row)
    ranks = linalg.ring_residue_ranks(
        ring, big
    )
    return all(r == m for r in ranks)


def reduce_to_representative(f):
    """A compact Witt-class representative: the anisotropic kernels of the
    commutative reduction, plus their ranks."""
    pieces = commutative_reduction(f)
    reps = []
    for kind, g in pieces:
        if kind == "real":
            reps.append(("real", g))
            continue
        kernel, _ = forms.witt_decompose(g)
        reps.append(("zmod", kernel))
    return reps


def red_sum(red_a, red_b):
    """Class representative of the orthogonal sum, computed piecewise on
    reductions; the transfers are additive so this matches reducing the
    sum of carriers."""
    out = []
    for (ka, ga), (kb, gb) in zip(red_a, red_b):
        if ka != kb:
            raise Unsupported("mismatched reductions")
        if ka == "real":
            out.append(("real", forms.direct_sum(ga, gb)))
            continue
        kernel, _ = forms.witt_decompose(forms.direct_sum(ga, gb))
        out.append(("zmod", kernel))
    return out


def red_neg(red):
    out = []
    for kind, g in red:
        if kind == "real":
            out.append(("real", forms.negate(g)))
            continue
        out.append(("zmod", forms.negate(g)))
    return out


def red_fingerprint(red):
    """A cheap isometry invariant of a reduction: per piece, the kernel
    rank and the square or norm class bit of its determinant."""
    fp = []
    for kind, g in red:
        if kind == "real":
            fp.append(("real", tuple(real_signatures(g))))
            continue
        fp.append(("zmod", g.rank, _det_class_bit(g)))
    return tuple(fp)


def _det_class_bit(g):
    if g.rank == 0:
        return 1
    alg = g.algebra
    try:
        det = forms._etale_det(alg, g.gram)
    except Exception:
        return None
    return _unit_square_bit(alg, det)


_SQUARE_SETS = {}


def _unit_square_bit(alg, u):
    """Whether u lies in the orbit of squares times fixed-ring units'
    squares; any isometry invariant works here, and over a commutative
    piece the determinant class modulo {x * x^sigma} is one."""
    key = id(alg)
    if key not in _SQUARE_SETS:
        ring = alg.base
        if not ring.is_enumerable:
            return None
        seen = set()
        for x in alg.elements():
            if x.is_unit():
                seen.add((x * x.involute()).coords)
        _SQUARE_SETS[key] = seen
    sets = _SQUARE_SETS[key]
    if sets is None:
        return None
    return u.coords in sets


def reds_equal(red_a, red_b):
    if len(red_a) != len(red_b):
        return False
    for (ka, ga), (kb, gb) in zip(red_a, red_b):
        if ka != kb:
            return False
        if ka == "real":
            if real_signatures(ga) != real_signatures(gb):
                return False
            continue
        if ga.rank != gb.rank:
            return False
        if ga.rank and not class_zero(
            forms.direct_sum(ga, forms.negate(gb))
        ):
            return False
    return True
