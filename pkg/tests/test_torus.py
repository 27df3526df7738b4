from fractions import Fraction as F
import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from atlas.rootdata import build_root_datum, generate_weyl
from atlas.torus import (FiniteTorusSubgroup, TorusPoint, act, bernstein_data,
                         check_condition_char, condition_holds, connectedness_hint,
                         coweight_coords, fixed_components, generic_point, identity_point,
                         point_from_coweights, pseudo_levi, stabilizer, torsion_order,
                         torus_grid)


def brute_stabilizer(rd, t):
    W = generate_weyl(rd)
    return [w for w in range(W.order) if act(W, w, t) == t]


def test_identity_stabilizer_is_everything():
    for lab in ["A2", "B2", "G2"]:
        rd = build_root_datum(lab)
        P = stabilizer(rd, identity_point(rd.rank))
        assert len(P.WA) == generate_weyl(rd).order
        assert P.is_connected and P.type_label == rd.type_label


def test_a1_adjoint_half():
    rd = build_root_datum("A1", "ad")
    P = stabilizer(rd, point_from_coweights(rd, [F(1, 2)]))
    assert len(P.WA) == 2 and len(P.WM0) == 1 and len(P.pi0) == 2


def test_sl3_pgl3_pair():
    sc = build_root_datum("A2", "sc")
    t = point_from_coweights(sc, [F(2, 3), F(2, 3)])
    assert len(stabilizer(sc, t).WA) == 1
    ad = build_root_datum("A2", "ad")
    P = pseudo_levi(ad, [point_from_coweights(ad, [F(2, 3), F(2, 3)])])
    assert P.roots == () and len(P.pi0) == 3
    assert P.pi0_group.is_abelian()
    assert bernstein_data(sc, [t]).Ws == [0]
    assert len(bernstein_data(ad, [point_from_coweights(ad, [F(2, 3), F(2, 3)])]).Ws) == 3


def test_g2_quadratic():
    rd = build_root_datum("G2", "sc")
    t = point_from_coweights(rd, [F(1, 2), 0])
    B = bernstein_data(rd, [t])
    assert B.H.type_label == "A1xA1" and B.connected and len(B.Ws) == 4
    assert connectedness_hint(rd, [t]).connected


def test_trivial_bernstein():
    rd = build_root_datum("C2", "ad")
    B = bernstein_data(rd, [identity_point(2)])
    assert len(B.Ws) == 8 and B.H.type_label == "C2"
    h = connectedness_hint(rd, [identity_point(2)])
    assert h.connected


def test_pgl3_not_connected():
    ad = build_root_datum("A2", "ad")
    h = connectedness_hint(ad, [point_from_coweights(ad, [F(2, 3), F(2, 3)])], p=5)
    assert not h.connected and not h.sc_criterion_applies


@pytest.mark.parametrize("label,iso", [("A2", "sc"), ("A2", "ad"), ("B2", "ad"), ("G2", "sc"),
                                       ("B3", "ad"), ("C3", "sc"), ("D4", "ad"),
                                       ("A1xA1", "ad"), ("A3", "ad")])
def test_grid_decomposition(label, iso):
    rd = build_root_datum(label, iso)
    W = generate_weyl(rd)
    for t in torus_grid(rd.rank, 3 if rd.rank <= 3 else 2):
        P = stabilizer(rd, t)
        assert len(P.WA) == len(P.WM0) * len(P.pi0)
        assert P.splitting_is_multiplicative()
        simple = set(P.simple)
        for s in P.pi0:
            assert set(int(x) for x in W.perms[s][list(P.simple)]) == simple
        assert sum(n for _, n, _ in P.factors) == len(P.simple)
        # every element decomposes uniquely
        for w in P.WA[:20]:
            u, s = P.decompose(w)
            assert u in P.WM0 and s in P.pi0 and W.mul(u, s) == w


@pytest.mark.parametrize("label,iso", [("A2", "ad"), ("B2", "sc"), ("G2", "sc")])
def test_stabilizer_brute_force(label, iso):
    rd = build_root_datum(label, iso)
    for t in torus_grid(rd.rank, 4):
        assert stabilizer(rd, t).WA == brute_stabilizer(rd, t)


def test_factor_identification():
    rd = build_root_datum("B4", "ad")
    types = {stabilizer(rd, t).type_label for t in torus_grid(4, 2)}
    assert {"B4", "D4", "A1xA1xC2"} <= types
    rd = build_root_datum("C3", "ad")
    types = {stabilizer(rd, t).type_label for t in torus_grid(3, 2)}
    assert "A1xC2" in types and "A2" in types


def test_coweight_roundtrip():
    rd = build_root_datum("B3", "sc")
    mu = (F(1, 3), F(1, 2), F(2, 5))
    t = point_from_coweights(rd, mu)
    assert coweight_coords(rd, t) == mu


def test_fixed_components_examples():
    rd = build_root_datum("A1", "ad")
    W = generate_weyl(rd)
    comps = fixed_components(W, 0)
    assert len(comps) == 1 and comps[0].dim == 1
    comps = fixed_components(W, 1)
    assert len(comps) == 2 and {c.base for c in comps} == {TorusPoint((F(0),)), TorusPoint((F(1, 2),))}
    rd = build_root_datum("C2", "sc")
    W = generate_weyl(rd)
    s = W.simple_reflections
    cox = W.mul(s[0], s[1])
    det = round(abs(np.linalg.det(np.eye(2) - W.comatrices[cox])))
    comps = fixed_components(W, cox)
    assert len(comps) == det and all(c.dim == 0 for c in comps)


@pytest.mark.parametrize("label,iso", [("A2", "sc"), ("A2", "ad"), ("B2", "ad"), ("G2", "sc"),
                                       ("A1xA1", "sc")])
def test_fixed_components_brute_force(label, iso):
    rd = build_root_datum(label, iso)
    W = generate_weyl(rd)
    for w in range(W.order):
        comps = fixed_components(W, w)
        for c in comps:
            assert act(W, w, c.base) == c.base
            assert c.contains(c.base)
            g = c.generic_point()
            assert act(W, w, g) == g and c.contains(g)
            for d in c.directions:
                assert tuple(int(x) for x in W.comatrices[w] @ np.array(d)) == tuple(d)
        if comps[0].dim == 0:
            # all fixed points have order dividing the number of components
            n = len(comps)
            pts = {t for t in torus_grid(rd.rank, n) if n % t.order == 0}
            fixed = [t for t in pts if act(W, w, t) == t]
            assert len(fixed) == n
            assert all(sum(c.contains(t) for c in comps) == 1 for t in fixed)


@pytest.mark.parametrize("label", ["B3", "D4", "G2", "A3"])
def test_conjugate_torsion_agrees(label):
    rd = build_root_datum(label, "ad")
    W = generate_weyl(rd)
    rng = np.random.default_rng(1)
    for w in rng.choice(W.order, 15):
        w = int(w)
        base = torsion_order(W, w)
        for g in rng.choice(W.order, 5):
            g = int(g)
            assert torsion_order(W, W.mul(W.mul(g, w), W.inv(g))) == base


def test_condition_examples():
    assert check_condition_char("A2", 5)
    assert not check_condition_char("C2", 2)
    assert check_condition_char("G2", 7)
    assert not check_condition_char("G2", 5)
    assert not check_condition_char("A2", 3)
    assert not check_condition_char("E7", 7) and check_condition_char("E8", 11)
    assert not check_condition_char("F4", 3) and check_condition_char("F4", 5)
    rep = check_condition_char(build_root_datum("A3xB2"), 3)
    assert rep.factors == [("A3", False), ("B2", True)]
    with pytest.raises(ValueError):
        check_condition_char("A2", 4)


def test_invariant_factors():
    A = FiniteTorusSubgroup((TorusPoint((F(1, 2), F(0))), TorusPoint((F(0), F(1, 3)))))
    assert A.invariant_factors() == [6]
    B = FiniteTorusSubgroup((TorusPoint((F(1, 2), F(0))), TorusPoint((F(0), F(1, 2)))))
    assert B.invariant_factors() == [2, 2] and len(B.elements()) == 4


@pytest.mark.parametrize("label,iso", [("A2", "sc"), ("A3", "sc"), ("B2", "sc"), ("C3", "sc"),
                                       ("G2", "sc"), ("A1xA1", "sc"), ("A2", "ad"), ("B2", "ad")])
def test_connectedness_implication(label, iso):
    rd = build_root_datum(label, iso)
    grid = torus_grid(rd.rank, 3)
    for t in grid:
        for p in (5, 7):
            h = connectedness_hint(rd, [t], p=p)       # raises if the implication fails
            if h.sc_criterion_applies:
                assert h.connected


def test_generic_point():
    for lab in ["A2", "B3", "G2"]:
        rd = build_root_datum(lab)
        t = generic_point(rd)
        P = stabilizer(rd, t)
        assert P.roots == () and P.WA == [0]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["A2", "B2", "G2", "B3"]),
       st.lists(st.integers(0, 11), min_size=3, max_size=3), st.integers(1, 12))
def test_stabilizer_acts(label, ks, m):
    rd = build_root_datum(label, "ad")
    W = generate_weyl(rd)
    t = TorusPoint.from_cochar([F(k, m) for k in ks[:rd.rank]])
    P = stabilizer(rd, t)
    for w in P.WA:
        assert act(W, w, t) == t
    # roots in the subsystem are integral on t
    for a in P.roots:
        assert t.pair(rd.roots[a]) == 0
