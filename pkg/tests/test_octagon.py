import itertools

import pytest

from hermwitt import algebras as A, forms as F, morita as M, octagon as O, witt as W
from hermwitt.errors import FormMismatch, InvalidOctagonData
from hermwitt.rings import make_ring

R3 = make_ring("Z/3")
R5 = make_ring("Z/5")
R9 = make_ring("Z/9")


def quaternion_data(ring, a, b, eps=1):
    return O.make_octagon(A.make_quaternion(ring, a, b), eps)


def test_make_octagon_validates():
    Q = A.make_quaternion(R3, 2, 2)
    data = O.make_octagon(Q, 1)
    lamb = data.b_elt(1, data.lam)
    assert lamb.involute() == -lamb  # tau1 is the standard involution
    lamb2 = data.b_elt(2, data.lam)
    assert lamb2.involute() == lamb2  # tau2 is the identity on B
    assert data.t_connected
    S = A.make_quadratic_etale(R3, 2)
    with pytest.raises(Exception):
        O.make_octagon(S, 1)  # no designated mu


def test_b_decomposition_dimensions():
    data = quaternion_data(R9, 2, 5)
    assert data.b1.dim == 2
    # A = B + mu B coordinatewise was validated during construction
    T8 = A.tensor_product(
        A.make_quaternion(R3, 2, 2), A.make_quadratic_etale(R3, 2)
    )
    data8 = O.make_octagon(T8, 1)
    assert data8.b1.dim == 4
    assert not data8.t_connected


def test_apply_map_signs_and_sides():
    data = quaternion_data(R3, 2, 2)
    one_b = F.make_diagonal(data.b1, data._eps_b(1), [1])
    r = O.apply_octagon_map(data, "rho1", one_b)
    assert r.gram[0][0] == data.lam
    assert r.eps == -data.eps
    with pytest.raises(FormMismatch):
        O.apply_octagon_map(data, "pi1", one_b)
    a_alg, a_eps = data.node_spec(("A", -1))
    f = F.make_diagonal(a_alg, a_eps, [data.lam])
    g = O.apply_octagon_map(data, "pi1", f)
    assert g.rank == 2 and g.algebra is data.b1
    g2 = O.apply_octagon_map(data, "pi2", f)
    assert g2.algebra is data.b2
    assert M.class_zero(g2)


def test_pi_of_zero_form():
    data = quaternion_data(R3, 2, 2)
    a_alg, a_eps = data.node_spec(("A", 1))
    z = F.zero_form(a_alg, a_eps)
    assert O.apply_octagon_map(data, "pi1", z).rank == 0


def test_chain_witness_all_pairs():
    data = quaternion_data(R3, 2, 2)
    for pos in range(8):
        key = O.NODE_ORDER[pos]
        node_alg, node_eps = data.node_spec(key)
        seeds = []
        try:
            for u in A.sym_units(node_alg, node_eps, limit=2):
                seeds.append(F.make_diagonal(node_alg, node_eps, [u]))
        except Exception:
            pass
        if not seeds:
            seeds.append(F.make_hyperbolic(node_alg, node_eps, 1))
        for s in seeds:
            comp, L, Mw = O.chain_witness(data, pos, s)
            assert comp is not None and len(L) == s.rank


def test_chain_witness_zero_form():
    data = quaternion_data(R3, 2, 2)
    a_alg, a_eps = data.node_spec(("A", 1))
    comp, L, Mw = O.chain_witness(data, 0, F.zero_form(a_alg, a_eps))
    assert comp is None and L == []


def test_octagon_exact_z3():
    data = quaternion_data(R3, 2, 2)
    rep = O.check_octagon_exact(data, rank_cap=8)
    assert rep["exact"]
    sizes = [n["size"] for n in rep["nodes"]]
    assert sizes == [1, 2, 4, 4, 4, 2, 1, 1]


def test_octagon_exact_unitary_tensor_z3():
    T8 = A.tensor_product(
        A.make_quaternion(R3, 2, 2), A.make_quadratic_etale(R3, 2)
    )
    data = O.make_octagon(T8, 1)
    rep = O.check_octagon_exact(data, rank_cap=8)
    assert rep["exact"]


def test_five_term_small():
    rep = O.lewis_five_term(R3, 2)
    assert rep["exact"]
    assert rep["tables"] == [2, 4, 4, 4, 2]
    rep_split = O.lewis_five_term(R3, 1)
    assert rep_split["exact"]
    assert rep_split["tables"][0] == 1  # exchange end vanishes


def test_seven_term_small():
    rep = O.lewis_seven_term(R3, 2, 2)
    assert rep["exact"]
    assert rep["trd_injective"]
    assert rep["w_minus1_b2_trivial"]


def test_jacobson_examples():
    res = O.jacobson_check("etale", R3, (2,), [1])
    assert res["isotropy_equiv"] and not res["f_isotropic"]
    res = O.jacobson_check("etale", R3, (2,), [1, 1])
    # <1,1> over F9 is hyperbolic, the trace form <2,2,2,2> is isotropic
    assert res["isotropy_equiv"] and res["f_isotropic"]
    RS = make_ring("R")
    res = O.jacobson_check("quaternion", RS, (-1, -1), [1, 1])
    assert res["isotropy_equiv"] and not res["f_isotropic"]
    res = O.jacobson_check("quaternion", RS, (-1, -1), [1, -2])
    assert res["isotropy_equiv"] and res["f_isotropic"]


def test_finer_predicates_match_oracle_quick():
    data = quaternion_data(R3, 2, 2)
    b2, e2 = data.node_spec(("B2", 1))
    for u in itertools.islice(A.sym_units(b2, e2), 4):
        g = F.make_diagonal(b2, e2, [u])
        pred = O.finer_predicate(data, "iv", g)
        pre = O.preimage_oracle(data, "pi2", g, search_cap=6)
        assert pred == (pre is not None)
    a_alg, a_eps = data.node_spec(("A", 1))
    f = F.make_diagonal(a_alg, a_eps, [1])
    assert not O.finer_predicate(data, "i", f)  # rrk 2, not divisible by 4
    assert O.preimage_oracle(data, "rho2", f, search_cap=6) is None


def test_finer_part_iii_branches():
    data = quaternion_data(R5, 2, 3)
    am, aem = data.node_spec(("A", -1))
    lam, mu = data.lam, data.mu
    f_true = F.make_diagonal(am, aem, [lam])
    assert O.finer_predicate(data, "iii", f_true)
    assert O.preimage_oracle(data, "rho1", f_true, search_cap=6) is not None
    f_false = F.make_diagonal(am, aem, [lam, mu * lam])
    assert not O.finer_predicate(data, "iii", f_false)
    assert O.preimage_oracle(data, "rho1", f_false, search_cap=6) is None
    assert O.isotropic_consequence(data, "iii", f_false)


def test_anisotropic_image_check():
    data = quaternion_data(R3, 2, 2)
    am, aem = data.node_spec(("A", -1))
    f = F.make_diagonal(am, aem, [data.lam])
    pre = O.anisotropic_image_check(data, "rho1", f, search_cap=6)
    img = O.apply_octagon_map(data, "rho1", pre)
    assert F.is_isometric(img, f)


def test_is_isotropic_space():
    B3 = A.base_algebra(R3)
    assert not O.is_isotropic_space(F.make_diagonal(B3, 1, [2, 2]))
    assert O.is_isotropic_space(F.make_diagonal(B3, 1, [1, -1]))
    S1 = A.make_quadratic_etale(R3, 1)
    assert O.is_isotropic_space(F.make_diagonal(S1, 1, [1]))
    Q = A.make_quaternion(R3, 2, 2)
    assert O.is_isotropic_space(F.make_diagonal(Q, 1, [1]))
