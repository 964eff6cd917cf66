import pytest
from hypothesis import given, settings, strategies as st

from hermwitt.errors import InvalidModulus, InvalidSpec, NotAUnit, NotEnumerable
from hermwitt.rings import (
    element_from_json,
    enumerate_elements,
    lift_idempotent,
    make_ring,
    norm_class,
    residue,
    square_class,
)


def test_make_ring_prime_power():
    R = make_ring("Z/9")
    assert len(R.components) == 1
    assert R.components[0].p == 3 and R.components[0].k == 2


def test_make_ring_crt():
    R = make_ring("Z/45")
    assert [(c.p, c.k) for c in R.components] == [(3, 2), (5, 1)]
    assert R.size() == 45


def test_make_ring_rejects_even_modulus():
    with pytest.raises(InvalidModulus):
        make_ring("Z/4")
    with pytest.raises(InvalidModulus):
        make_ring("Z/1")


def test_make_ring_product_and_gf():
    R = make_ring("Z/9 x GF(5)")
    assert [(c.p, c.k) for c in R.components] == [(3, 2), (5, 1)]
    with pytest.raises(InvalidSpec):
        make_ring("")
    with pytest.raises(InvalidModulus):
        make_ring("GF(9)")


def test_arith_and_inverse():
    R = make_ring("Z/9")
    assert R.from_int(7).inv() == R.from_int(4)
    assert not R.from_int(3).is_unit()
    with pytest.raises(NotAUnit):
        R.from_int(3).inv()
    RS = make_ring("R")
    assert RS.from_int(-2).inv() == RS.from_rational("-1/2")


def test_square_class_examples():
    assert square_class(make_ring("Z/9").from_int(7))
    assert not square_class(make_ring("Z/3").from_int(2))
    assert not square_class(make_ring("R").from_int(-1))


def test_square_class_exhaustive_small_prime_powers():
    # explicit unit squares agree with the residue criterion for p^k <= 49
    for spec in ("Z/3", "Z/9", "Z/27", "Z/5", "Z/25", "Z/7", "Z/49"):
        R = make_ring(spec)
        squares = {(u * u).coords for u in R.units()}
        for u in R.units():
            assert square_class(u) == (u.coords in squares), (spec, u)


def test_norm_class_examples():
    R3 = make_ring("Z/3")
    # S = F9: all units of F3 are norms
    assert norm_class(R3.from_int(2), R3.from_int(2))
    RS = make_ring("R")
    assert not norm_class(RS.from_int(-1), RS.from_int(-1))
    assert norm_class(RS.from_int(1), RS.from_int(-1))
    with pytest.raises(NotAUnit):
        norm_class(R3.from_int(2), R3.from_int(0))


def test_residue_reduction():
    R9 = make_ring("Z/9")
    assert residue(R9.from_int(7), 0).coords == (1,)
    R45 = make_ring("Z/45")
    x = R45.from_int(16)
    assert residue(x, 0).coords == (1,)
    assert residue(x, 1).coords == (1,)
    RS = make_ring("R")
    assert residue(RS.from_rational("5/2"), 0) == RS.from_rational("5/2")


@given(st.integers(0, 44), st.integers(0, 44))
@settings(max_examples=60, deadline=None)
def test_residue_is_ring_homomorphism(a, b):
    R = make_ring("Z/45")
    x, y = R.from_int(a), R.from_int(b)
    for i in range(2):
        assert residue(x * y, i) == residue(x, i) * residue(y, i)
        assert residue(x + y, i) == residue(x, i) + residue(y, i)


def test_unit_iff_unit_in_every_residue_field():
    R = make_ring("Z/45")
    for a in R.elements():
        residues_ok = all(
            not residue(a, i).is_zero() for i in range(2)
        )
        assert a.is_unit() == residues_ok


def test_enumeration_order_and_count():
    R = make_ring("Z/3")
    assert [a.coords[0] for a in enumerate_elements(R)] == [0, 1, 2]
    assert len(list(make_ring("Z/9").elements())) == 9
    with pytest.raises(NotEnumerable):
        list(make_ring("R").elements())


def _mat2_structure():
    idx = [(0, 0), (0, 1), (1, 0), (1, 1)]
    c = [[[0] * 4 for _ in range(4)] for _ in range(4)]
    for i, (a, b) in enumerate(idx):
        for j, (cc, d) in enumerate(idx):
            if b == cc:
                c[i][j][idx.index((a, d))] = 1
    return c


def test_lift_idempotent_matrix_algebra():
    st_m = _mat2_structure()
    seed = [1 + 3, 3, 3, 3]  # diag(1,0) + 3*ones
    e = lift_idempotent(st_m, seed, 3, 2)
    from hermwitt.rings import _struct_mul

    assert _struct_mul(st_m, e, e, 9) == e
    assert [(x - y) % 3 for x, y in zip(e, [1, 0, 0, 0])] == [0] * 4


def test_lift_idempotent_rejects_non_idempotent():
    from hermwitt.errors import NotIdempotent

    st_m = _mat2_structure()
    with pytest.raises(NotIdempotent):
        lift_idempotent(st_m, [0, 1, 0, 0], 3, 2)


def test_lift_idempotent_quadratic_algebra():
    # Z/9[lam | lam^2 = 4]: residue idempotent (1 + lam/2)/2 mod 3
    st_q = [
        [[1, 0], [0, 1]],
        [[0, 1], [4, 0]],
    ]
    # over F3: e = 2*(1 + 2*lam) = 2 + 4 lam = 2 + lam
    e = lift_idempotent(st_q, [2, 1], 3, 2)
    from hermwitt.rings import _struct_mul

    assert _struct_mul(st_q, e, e, 9) == e


def test_json_roundtrip():
    R = make_ring("Z/9 x R")
    x = R.element([5, "7/2"])
    data = x.to_json()
    assert element_from_json(R, data) == x
