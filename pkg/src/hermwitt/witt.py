"""Finite Witt groups as explicit tables.

A table holds one representative form per class, the addition table and
negation map, all verified to be a finite abelian group.  Class identity
always goes through Witt equivalence of representatives; there is no
symbolic shortcut.
"""

from __future__ import annotations

import itertools

from . import algebras, forms, morita
from .errors import (
    CapExceeded,
    HomMismatch,
    InternalInconsistency,
    NotEnumerable,
)


class WittGroupTable:
    def __init__(self, algebra, eps, classes, add, neg, label=""):
        self.algebra = algebra
        self.eps = eps
        self.classes = classes  # list of (carrier form, reduction)
        self.add = add
        self.neg = neg
        self.label = label
        self._fps = None
        self._check_group()

    @property
    def size(self):
        return len(self.classes)

    def carrier(self, i):
        return self.classes[i][0]

    def _check_group(self):
        n = self.size
        add = self.add
        for i in range(n):
            if add[0][i] != i or add[i][0] != i:
                raise InternalInconsistency("zero is not neutral")
            if add[i][self.neg[i]] != 0:
                raise InternalInconsistency("negation fails")
            for j in range(n):
                if add[i][j] != add[j][i]:
                    raise InternalInconsistency("addition is not commutative")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if add[add[i][j]][k] != add[i][add[j][k]]:
                        raise InternalInconsistency("addition is not associative")

    def locate_reduction(self, red):
        if self._fps is None:
            self._fps = [
                morita.red_fingerprint(stored) for _, stored in self.classes
            ]
        fp = morita.red_fingerprint(red)
        for idx, (_, stored) in enumerate(self.classes):
            if self._fps[idx] != fp:
                continue
            if _reductions_equal(stored, red):
                return idx
        return None

    def locate_form(self, f):
        red = morita.reduce_to_representative(f)
        return self.locate_reduction(red)

    def order_of(self, i):
        n = 1
        cur = i
        while cur != 0:
            cur = self.add[cur][i]
            n += 1
        return n

    def structure(self):
        return group_structure(self)

    def to_json(self):
        return {
            "label": self.label,
            "classes": [
                {"rank": c[0].rank} for c in self.classes
            ],
            "addition": self.add,
            "negation": self.neg,
            "structure": self.structure(),
        }


def _reductions_equal(red_a, red_b):
    if len(red_a) != len(red_b):
        return False
    for (ka, ga), (kb, gb) in zip(red_a, red_b):
        if ka != kb:
            return False
        if ka == "real":
            if morita.real_signatures(ga) != morita.real_signatures(gb):
                return False
            continue
        if ga.rank != gb.rank:
            return False
        if ga.rank and not morita.class_zero(
            forms.direct_sum(ga, forms.negate(gb))
        ):
            return False
    return True


def enumerate_witt_group(alg, eps, rank_cap=None, label=""):
    """Closure of the diagonal unit classes (and, over degree-2 or split
    algebras, the rank-one module classes) under orthogonal sum.

    Addition is performed piecewise on the reduced representatives, which
    matches reducing sums of carriers because the reductions are additive
    transfers.  Lookups are pre-filtered by a cheap isometry-invariant
    fingerprint and always confirmed by Witt equivalence.
    """
    if not alg.base.is_enumerable:
        raise NotEnumerable("tables need a fully enumerable base ring")
    if isinstance(eps, int):
        eps = alg.scalar(eps)
    if rank_cap is None:
        rank_cap = 4 * alg.degree
    zero = forms.zero_form(alg, eps)
    classes = [(zero, morita.reduce_to_representative(zero))]
    buckets = {morita.red_fingerprint(classes[0][1]): [0]}

    def locate_red(red):
        fp = morita.red_fingerprint(red)
        for idx in buckets.get(fp, []):
            if _reductions_equal(classes[idx][1], red):
                return idx
        return None

    def add_class(carrier, red):
        total = sum(
            g.rank for kind, g in red if kind != "real"
        )
        if total > rank_cap:
            raise CapExceeded(
                "representative rank %d exceeds the cap %d" % (total, rank_cap)
            )
        carrier = _compact_carrier(alg, eps, carrier, red)
        classes.append((carrier, red))
        idx = len(classes) - 1
        buckets.setdefault(morita.red_fingerprint(red), []).append(idx)
        return idx

    for seed in _seed_forms(alg, eps):
        red = morita.reduce_to_representative(seed)
        if locate_red(red) is None:
            add_class(seed, red)
    changed = True
    rounds = 0
    while changed:
        changed = False
        rounds += 1
        if rounds > 16:
            raise CapExceeded("closure did not stabilize")
        snapshot = len(classes)
        for i in range(snapshot):
            for j in range(i, snapshot):
                red = morita.red_sum(classes[i][1], classes[j][1])
                if locate_red(red) is None:
                    add_class(
                        forms.direct_sum(classes[i][0], classes[j][0]), red
                    )
                    changed = True
    n = len(classes)
    add = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            red = morita.red_sum(classes[i][1], classes[j][1])
            idx = locate_red(red)
            if idx is None:
                raise CapExceeded("closure missed the class of a sum")
            add[i][j] = idx
            add[j][i] = idx
    neg = []
    for i in range(n):
        red = morita.reduce_to_representative(
            forms.negate(classes[i][0])
        )
        idx = locate_red(red)
        if idx is None:
            raise CapExceeded("closure missed a negative")
        neg.append(idx)
    return WittGroupTable(alg, eps, classes, add, neg, label=label)


def _compact_carrier(alg, eps, f, red):
    """Prefer a carrier of minimal rank: rebuild from the reduced pieces
    when the reduction is a single commutative piece over the node itself."""
    if f.gens is None and alg.dim == len(alg.center_basis):
        if len(red) == 1 and red[0][0] == "zmod":
            g = red[0][1]
            if g.algebra.dim == alg.dim and g.algebra.base == alg.base:
                # the corner of the full idempotent is the algebra itself
                try:
                    return forms.HermitianForm(alg, eps, _pullback_gram(alg, g))
                except Exception:
                    return f
    return f


def _pullback_gram(alg, g):
    # the corner basis of 1*A*1 is the algebra basis in order
    return [
        [alg.element(x.coords) for x in row] for row in g.gram
    ]


def _seed_forms(alg, eps):
    ring = alg.base
    if len(ring.components) > 1:
        return _crt_seed_forms(alg, eps)
    seeds = []
    try:
        for u in algebras.sym_units(alg, eps):
            seeds.append(forms.make_diagonal(alg, eps, [u]))
    except Exception:
        pass
    if alg.dim == len(alg.center_basis):
        # product algebras also carry classes on single-piece modules
        pieces = morita.commutative_pieces(alg)
        if len(pieces) > 1:
            for piece in pieces:
                if piece.kind != "fixed":
                    continue
                corner, cbasis, to_corner = piece.corner_pack
                z = piece.idem
                eps_c = corner.element(to_corner(z * eps * z))
                for d in algebras.sym_units(corner, eps_c):
                    v = alg.zero()
                    for coef, b in zip(d.coords, cbasis):
                        v = v + b * coef
                    seeds.append(
                        forms.HermitianForm(alg, eps, [[v]], gens=[z])
                    )
        return seeds
    if alg.dim != len(alg.center_basis):
        # rank-one module classes over degree-2 algebras
        try:
            ctx = morita.shadow_context(alg, eps)
        except Exception:
            ctx = None
        if ctx is not None:
            corner, cbasis, to_corner = ctx.corner_pack
            eps_t = ctx.eps if ctx.conj is None else -ctx.eps
            ec = algebras.AlgElement(
                ctx.conj_alg, ctx.e.coords
            )
            eps_corner = corner.element(
                to_corner(ec * algebras.AlgElement(ctx.conj_alg, eps_t.coords) * ec)
            )
            for s in algebras.sym_units(corner, eps_corner):
                try:
                    seeds.append(morita.unshadow_unit(ctx, s))
                except Exception:
                    continue
    return seeds


def _dedupe_by_class(seeds):
    kept = []
    seen = []
    for s in seeds:
        red = morita.reduce_to_representative(s)
        fp = morita.red_fingerprint(red)
        hit = False
        for red2, fp2 in seen:
            if fp == fp2 and _reductions_equal(red, red2):
                hit = True
                break
        if not hit:
            kept.append(s)
            seen.append((red, fp))
    return kept


def _crt_seed_forms(alg, eps):
    """Rank-one seeds over a product base, one per combination of
    per-component seed classes."""
    ring = alg.base
    ncomp = len(ring.components)
    menus = []
    for c in range(ncomp):
        proj = algebras.project_algebra(alg, c)
        eps_c = algebras.project_element(eps, proj, c)
        menu = _dedupe_by_class(_seed_forms(proj, eps_c))
        # a slot may vanish entirely on one component
        menu.append(
            forms.HermitianForm(
                proj, eps_c, [[proj.zero()]], gens=[proj.zero()]
            )
        )
        menus.append(menu)
    seeds = []
    for combo in itertools.product(*menus):
        gens = []
        val_parts = []
        gen_parts = []
        for c, s in enumerate(combo):
            gen = (s.gens or (combo[c].algebra.one(),))[0]
            gen_parts.append(gen)
            val_parts.append(s.gram[0][0])
        gen = algebras.combine_elements(alg, gen_parts)
        val = algebras.combine_elements(alg, val_parts)
        gens_arg = None if gen == alg.one() else [gen]
        if gens_arg is None:
            seeds.append(forms.HermitianForm(alg, eps, [[val]]))
        else:
            seeds.append(forms.HermitianForm(alg, eps, [[val]], gens=gens_arg))
    return seeds


class WittHom:
    def __init__(self, src, dst, idx_map, label=""):
        self.src = src
        self.dst = dst
        self.idx_map = list(idx_map)
        self.label = label

    def __call__(self, i):
        return self.idx_map[i]

    def __repr__(self):
        return "<hom %s: %s>" % (self.label, self.idx_map)


def induced_hom(src_table, dst_table, functor, label=""):
    """The table map induced by a form-level functor; additivity and the
    image of zero are verified on the whole table."""
    idx_map = []
    for i in range(src_table.size):
        image = functor(src_table.carrier(i))
        j = dst_table.locate_form(image)
        if j is None:
            raise CapExceeded(
                "image of class %d missing from the target table" % i
            )
        idx_map.append(j)
    if idx_map[0] != 0:
        raise InternalInconsistency("functor does not preserve zero")
    for i in range(src_table.size):
        for j in range(src_table.size):
            lhs = idx_map[src_table.add[i][j]]
            rhs = dst_table.add[idx_map[i]][idx_map[j]]
            if lhs != rhs:
                raise InternalInconsistency(
                    "induced map is not additive at (%d, %d)" % (i, j)
                )
    return WittHom(src_table, dst_table, idx_map, label=label)


def kernel(h):
    return sorted(i for i, j in enumerate(h.idx_map) if j == 0)


def image(h):
    return sorted(set(h.idx_map))


def exact_at(h_in, h_out):
    if h_in.dst is not h_out.src:
        raise HomMismatch("homomorphisms do not compose at this node")
    return image(h_in) == kernel(h_out)


def compose(h1, h2, label=""):
    if h1.dst is not h2.src:
        raise HomMismatch("homomorphisms do not compose")
    return WittHom(
        h1.src, h2.dst, [h2.idx_map[i] for i in h1.idx_map], label=label
    )


def group_structure(table):
    """Invariant factors of the table's abelian group, ascending."""
    n = table.size
    if n == 1:
        return []
    # multiset of cyclic factors per prime, from order statistics
    order = n
    factors = {}
    primes = _prime_factors(order)
    for p in primes:
        counts = []
        i = 0
        while True:
            i += 1
            c = sum(
                1
                for x in range(n)
                if _mul_by(table, x, p ** i) == 0
            )
            counts.append(c)
            if p ** len(counts) * 1 and c == sum(
                1 for x in range(n) if _mul_by(table, x, p ** (i + 1)) == 0
            ):
                break
        dims = [0]
        for c in counts:
            dims.append(_int_log(c, p))
        cyclic = []
        for i in range(1, len(dims)):
            new = dims[i] - dims[i - 1]
            cyclic.append(new)
        # cyclic[i-1] = number of factors of order >= p^i
        orders = []
        for i in range(len(cyclic), 0, -1):
            here = cyclic[i - 1] - (cyclic[i] if i < len(cyclic) else 0)
            orders.extend([p ** i] * here)
        factors[p] = sorted(orders)
    # combine into invariant factors
    width = max(len(v) for v in factors.values())
    invariants = []
    for slot in range(width):
        f = 1
        for p, orders in factors.items():
            padded = [1] * (width - len(orders)) + orders
            f *= padded[slot]
        invariants.append(f)
    return [f for f in invariants if f > 1]


def _mul_by(table, x, m):
    acc = 0
    for _ in range(m):
        acc = table.add[acc][x]
    return acc


def _int_log(c, p):
    k = 0
    while c > 1:
        c //= p
        k += 1
    return k


def _prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out
