"""Exact arithmetic in the supported semilocal coefficient rings.

A base ring is a finite product of local pieces.  Each piece is either
Z/p^k with p an odd prime (canonical residues in [0, p^k)) or the
sign-exact reals (exact rationals; every decision made here reduces to
signs, so rationals model the reals faithfully for our purposes).
Elements are stored with one coordinate per local piece and all
operations act coordinatewise.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .errors import (
    InvalidModulus,
    InvalidSpec,
    NotAUnit,
    NotEnumerable,
    NotIdempotent,
    RingMismatch,
)

MODULUS_CAP = 10 ** 6


def _factor(m):
    """Trial-division factorization, returned as a list of (p, k) pairs."""
    out = []
    d = 3
    while d * d <= m:
        if m % d == 0:
            k = 0
            while m % d == 0:
                m //= d
                k += 1
            out.append((d, k))
        d += 2
    if m > 1:
        out.append((m, 1))
    return out


class LocalComponent:
    """One local factor of a base ring: Z/p^k or the sign-exact reals."""

    __slots__ = ("kind", "p", "k", "modulus")

    def __init__(self, kind, p=None, k=None):
        self.kind = kind
        self.p = p
        self.k = k
        self.modulus = p ** k if kind == "zmod" else None

    def __eq__(self, other):
        return (self.kind, self.p, self.k) == (other.kind, other.p, other.k)

    def __hash__(self):
        return hash((self.kind, self.p, self.k))

    def __repr__(self):
        if self.kind == "real":
            return "R"
        return "Z/%d" % self.modulus


class BaseRing:
    """A finite product of local components, with CRT structure exposed."""

    def __init__(self, components):
        if not components:
            raise InvalidSpec("empty product of rings")
        self.components = tuple(components)

    # -- construction -------------------------------------------------

    @property
    def is_enumerable(self):
        return all(c.kind == "zmod" for c in self.components)

    def __eq__(self, other):
        return isinstance(other, BaseRing) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        return " x ".join(repr(c) for c in self.components)

    # -- element constructors -----------------------------------------

    def element(self, coords):
        return RingElement(self, tuple(coords))

    def from_int(self, n):
        coords = []
        for c in self.components:
            if c.kind == "zmod":
                coords.append(n % c.modulus)
            else:
                coords.append(Fraction(n))
        return RingElement(self, tuple(coords))

    def zero(self):
        return self.from_int(0)

    def one(self):
        return self.from_int(1)

    def from_rational(self, q):
        q = Fraction(q)
        coords = []
        for c in self.components:
            if c.kind == "zmod":
                den = q.denominator % c.modulus
                inv = _zmod_inv(den, c)
                coords.append((q.numerator % c.modulus) * inv % c.modulus)
            else:
                coords.append(q)
        return RingElement(self, tuple(coords))

    # -- CRT and residue structure -------------------------------------

    def component_ring(self, i):
        return BaseRing([self.components[i]])

    def residue_ring(self, i):
        c = self.components[i]
        if c.kind == "real":
            return BaseRing([c])
        return BaseRing([LocalComponent("zmod", c.p, 1)])

    def project(self, a, i):
        """Image of a in the i-th component ring."""
        return self.component_ring(i).element((a.coords[i],))

    def combine(self, parts):
        """CRT-combine one element per component ring back into self."""
        if len(parts) != len(self.components):
            raise RingMismatch("wrong number of CRT parts")
        return self.element(tuple(p.coords[0] for p in parts))

    # -- enumeration ----------------------------------------------------

    def size(self):
        if not self.is_enumerable:
            raise NotEnumerable("ring has a real component")
        n = 1
        for c in self.components:
            n *= c.modulus
        return n

    def elements(self):
        """All elements, ascending canonical residues, lexicographic across
        components."""
        if not self.is_enumerable:
            raise NotEnumerable("ring has a real component")
        ranges = [range(c.modulus) for c in self.components]
        for coords in itertools.product(*ranges):
            yield RingElement(self, coords)

    def units(self):
        for a in self.elements():
            if a.is_unit():
                yield a


def _zmod_inv(x, comp):
    x %= comp.modulus
    if x % comp.p == 0:
        raise NotAUnit("%d is not a unit mod %d" % (x, comp.modulus))
    return pow(x, -1, comp.modulus)


class RingElement:
    """An element of a BaseRing, one canonical coordinate per component."""

    __slots__ = ("ring", "coords")

    def __init__(self, ring, coords):
        if len(coords) != len(ring.components):
            raise RingMismatch("coordinate count does not match ring")
        canon = []
        for x, c in zip(coords, ring.components):
            if c.kind == "zmod":
                canon.append(int(x) % c.modulus)
            else:
                canon.append(Fraction(x))
        self.ring = ring
        self.coords = tuple(canon)

    def _check(self, other):
        if not isinstance(other, RingElement) or other.ring != self.ring:
            raise RingMismatch("elements of different rings")

    def __add__(self, other):
        self._check(other)
        return RingElement(
            self.ring, tuple(a + b for a, b in zip(self.coords, other.coords))
        )

    def __sub__(self, other):
        self._check(other)
        return RingElement(
            self.ring, tuple(a - b for a, b in zip(self.coords, other.coords))
        )

    def __mul__(self, other):
        self._check(other)
        return RingElement(
            self.ring, tuple(a * b for a, b in zip(self.coords, other.coords))
        )

    def __neg__(self):
        return RingElement(self.ring, tuple(-a for a in self.coords))

    def __eq__(self, other):
        return (
            isinstance(other, RingElement)
            and self.ring == other.ring
            and self.coords == other.coords
        )

    def __hash__(self):
        return hash((self.ring, self.coords))

    def is_zero(self):
        return all(x == 0 for x in self.coords)

    def is_unit(self):
        for x, c in zip(self.coords, self.ring.components):
            if c.kind == "zmod":
                if x % c.p == 0:
                    return False
            else:
                if x == 0:
                    return False
        return True

    def inv(self):
        coords = []
        for x, c in zip(self.coords, self.ring.components):
            if c.kind == "zmod":
                coords.append(_zmod_inv(x, c))
            else:
                if x == 0:
                    raise NotAUnit("0 has no inverse")
                coords.append(1 / x)
        return RingElement(self.ring, tuple(coords))

    def __repr__(self):
        if len(self.coords) == 1:
            return str(self.coords[0])
        return "(" + ", ".join(str(x) for x in self.coords) + ")"

    def to_json(self):
        out = []
        for x, c in zip(self.coords, self.ring.components):
            if c.kind == "zmod":
                out.append(x)
            else:
                out.append("%d/%d" % (x.numerator, x.denominator))
        return out


def element_from_json(ring, data):
    coords = []
    for x, c in zip(data, ring.components):
        if c.kind == "zmod":
            coords.append(int(x))
        else:
            num, _, den = str(x).partition("/")
            coords.append(Fraction(int(num), int(den) if den else 1))
    return ring.element(coords)


# ---------------------------------------------------------------------------
# parsing


def make_ring(spec):
    """Build a BaseRing from a descriptor like "Z/9", "GF(5)", "R" or
    "Z/9 x GF(5)"."""
    parts = [p.strip() for p in spec.split("x")]
    if not parts or any(not p for p in parts):
        raise InvalidSpec("bad ring descriptor %r" % spec)
    comps = []
    for part in parts:
        comps.extend(_parse_one(part))
    return BaseRing(comps)


def _parse_one(part):
    if part == "R":
        return [LocalComponent("real")]
    if part.startswith("GF(") and part.endswith(")"):
        p = int(part[3:-1])
        if p < 3 or p % 2 == 0 or _factor(p) != [(p, 1)]:
            raise InvalidModulus("GF(%d): argument must be an odd prime" % p)
        return [LocalComponent("zmod", p, 1)]
    if part.startswith("Z/"):
        m = int(part[2:])
        if m % 2 == 0:
            raise InvalidModulus("Z/%d: 2 must be invertible" % m)
        if m < 3:
            raise InvalidModulus("Z/%d: modulus must be at least 3" % m)
        if m > MODULUS_CAP:
            raise InvalidModulus("Z/%d: modulus exceeds cap %d" % (m, MODULUS_CAP))
        return [LocalComponent("zmod", p, k) for p, k in _factor(m)]
    raise InvalidSpec("bad ring descriptor part %r" % part)


# ---------------------------------------------------------------------------
# arithmetic-theoretic queries


def arith(a, b, op):
    """Dispatch table used by the CLI; library code uses the operators."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "inv":
        return a.inv()
    if op == "is_unit":
        return a.is_unit()
    raise InvalidSpec("unknown op %r" % op)


def square_class(u):
    """True iff the unit u is a square in every component.

    For Z/p^k with odd p this is decided on the residue field; for the
    sign-exact reals it is the sign test.
    """
    if not u.is_unit():
        raise NotAUnit("square_class needs a unit")
    for x, c in zip(u.coords, u.ring.components):
        if c.kind == "zmod":
            if pow(x % c.p, (c.p - 1) // 2, c.p) != 1:
                return False
        else:
            if x < 0:
                return False
    return True


def norm_class(lam_sq, alpha):
    """True iff alpha is a norm from S = R[x | x^2 = lam_sq].

    Finite components are decided by enumerating the residue algebra;
    a real component with lam_sq < 0 requires alpha > 0, and a split real
    component (lam_sq > 0) accepts every unit.
    """
    if not alpha.is_unit():
        raise NotAUnit("norm_class needs a unit")
    if not lam_sq.is_unit():
        raise NotAUnit("norm_class needs a unit lambda^2")
    if alpha.ring != lam_sq.ring:
        raise RingMismatch("alpha and lambda^2 in different rings")
    for i, c in enumerate(alpha.ring.components):
        a = alpha.coords[i]
        d = lam_sq.coords[i]
        if c.kind == "real":
            if d < 0 and a < 0:
                return False
            continue
        p = c.p
        norms = set()
        for x in range(p):
            for y in range(p):
                n = (x * x - d * y * y) % p
                if n % p:
                    norms.add(n)
        if (a % p) not in norms:
            return False
    return True


def residue(a, i):
    """Reduce the i-th coordinate into the residue field of that component."""
    ring = a.ring
    c = ring.components[i]
    target = ring.residue_ring(i)
    if c.kind == "real":
        return target.element((a.coords[i],))
    return target.element((a.coords[i] % c.p,))


def enumerate_elements(ring):
    return ring.elements()


# ---------------------------------------------------------------------------
# idempotent lifting in a structure-constant algebra over one Z/p^k piece


def _struct_mul(structure, x, y, m):
    d = len(x)
    out = [0] * d
    for i in range(d):
        xi = x[i]
        if xi == 0:
            continue
        row = structure[i]
        for j in range(d):
            yj = y[j]
            if yj == 0:
                continue
            cij = row[j]
            s = xi * yj
            for t in range(d):
                if cij[t]:
                    out[t] = (out[t] + s * cij[t]) % m
    return out


def lift_idempotent(structure, coords, p, k):
    """Lift a residue idempotent to an exact one mod p^k.

    structure[i][j][t] are the multiplication constants of the algebra over
    Z/p^k; coords is an element whose reduction mod p must be idempotent.
    The iteration e <- 3e^2 - 2e^3 squares the defect each round, so k+2
    rounds always suffice.
    """
    m = p ** k
    e = [int(x) % m for x in coords]
    sq = _struct_mul(structure, e, e, m)
    if any((a - b) % p for a, b in zip(sq, e)):
        raise NotIdempotent("input is not idempotent modulo %d" % p)
    for _ in range(k + 2):
        sq = _struct_mul(structure, e, e, m)
        if sq == e:
            return e
        cube = _struct_mul(structure, sq, e, m)
        e = [(3 * a - 2 * b) % m for a, b in zip(sq, cube)]
    raise NotIdempotent("iteration failed to converge")
