from collections import Counter
from fractions import Fraction as F
import json

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from atlas.fingrp import FiniteGroup, action_table, extended_quotient_2
from atlas.rootdata import build_root_datum, generate_weyl
from atlas.springer import (
    WLabel, affine_springer_fiber, b_invariant, classical_symbol_pair, dump_table,
    extended_springer_table, factor_springer, irr_w_count, irr_wa_count, irreducible_labels,
    sign_label, sign_twist, spherical_parameter, springer_table, trivial_label,
)
from atlas.torus import PseudoLevi, act, identity_point, point_from_coweights, torus_grid
from atlas.unipotent import (
    enumerate_unipotent_classes, factor_classes, factor_rho_labels, levi_of, parse_class, parse_factor_class,
    regular_class, trivial_class,
)

SIMPLE = [(l, n) for l in "ABCD" for n in range(1, 7)
          if not (l == "D" and n < 4) and not (l in "BC" and n < 2)] + [("G", 2)]


def npart(n):
    from atlas.unipotent import partitions_of
    return sum(1 for _ in partitions_of(n))


@pytest.mark.parametrize("letter,n", SIMPLE)
def test_bijection_and_anchors(letter, n):
    tab = factor_springer(letter, n)
    image = [v for v in tab.values() if v is not None]
    assert len(image) == len(set(image)) == len(irreducible_labels(letter, n))
    classes = factor_classes(letter, n)
    lo, hi = classes[0], classes[-1]
    assert tab[(lo, factor_rho_labels(lo)[0])] == trivial_label(letter, n)
    assert tab[(hi, factor_rho_labels(hi)[0])] == sign_label(letter, n)


@pytest.mark.parametrize("letter,n", SIMPLE)
def test_b_invariant_matches_class_dimension(letter, n):
    # after twisting by sign, b of the irrep for (x, rho) is at least the Springer
    # fibre dimension npos - dim O / 2, with equality for trivial rho
    from atlas.unipotent import factor_dim
    npos = {"A": n * (n + 1) // 2, "B": n * n, "C": n * n, "D": n * (n - 1), "G": 6}[letter]
    for (fc, rho), lab in factor_springer(letter, n).items():
        if lab is not None:
            b = b_invariant(sign_twist(lab))
            assert b >= npos - factor_dim(fc) // 2
            if rho == factor_rho_labels(fc)[0]:
                assert b == npos - factor_dim(fc) // 2


def test_irrep_counts():
    assert [len(irreducible_labels("A", n)) for n in range(1, 7)] == [npart(n + 1) for n in range(1, 7)]
    assert len(irreducible_labels("B", 3)) == 10
    assert len(irreducible_labels("D", 4)) == 13
    assert len(irreducible_labels("G", 2)) == 6


def test_type_a_examples():
    tab = factor_springer("A", 2)
    assert tab[(parse_factor_class("A2:[1,1,1]"), ())] == WLabel("A", 2, ((3,),))
    assert tab[(parse_factor_class("A2:[3]"), ())] == WLabel("A", 2, ((1, 1, 1),))


def test_geometric_pair_counts():
    assert len(springer_table(levi_of(build_root_datum("C2")), geometric_only=True)) == 5
    assert len(springer_table(levi_of(build_root_datum("C2")))) == 5
    g2 = springer_table(levi_of(build_root_datum("G2")))
    assert sum(d.geometric for d in g2) == 6 and len(g2) == 7
    nongeo = [(str(d.cls), d.rho) for d in g2 if not d.geometric]
    assert nongeo == [("G2:G2(a1)", ("sgn",))]


def test_g2_table():
    tab = {(fc.label, r): (str(v) if v else None) for (fc, r), v in factor_springer("G", 2).items()}
    assert tab == {("1", "1"): "phi1,0", ("A1", "1"): "phi'1,3", ("~A1", "1"): "phi2,1",
                   ("G2(a1)", "1"): "phi2,2", ("G2(a1)", "refl"): "phi''1,3",
                   ("G2(a1)", "sgn"): None, ("G2", "1"): "phi1,6"}


def test_c2_subregular_pair():
    fc = parse_factor_class("C2:[2,2]")
    tab = factor_springer("C", 2)
    labs = [tab[(fc, r)] for r in factor_rho_labels(fc)]
    assert len(labs) == 2 and None not in labs and labs[0] != labs[1]


def test_sign_twist_involution():
    for letter, n in SIMPLE:
        for lab in irreducible_labels(letter, n):
            assert sign_twist(sign_twist(lab)) == lab


@pytest.mark.parametrize("label", ["A1", "A2", "A3", "B2", "B3", "C3", "D4", "G2",
                                   "A1xB2", "A2xA1"])
def test_counting_identity_connected(label):
    rd = build_root_datum(label)
    M = levi_of(rd)
    W = generate_weyl(rd)
    classes = FiniteGroup(W.perms).classes
    assert len(springer_table(M, geometric_only=True)) == irr_w_count(M) == len(classes)


# ------------------------------------------------------------ Molien oracle

def _b_from_character_table(rd):
    """b-invariants of Irr(W) via the graded character of the coinvariants:
    lowest degree of sum_w chi(w) / det(1 - q w)."""
    W = generate_weyl(rd)
    G = FiniteGroup(W.perms)
    ct = G.character_table
    q = sympy.Symbol("q")
    N = rd.npos + 1
    series = []
    for c in ct.classes:
        m = sympy.Matrix(W.matrices[c.rep].tolist())
        d = sympy.expand((sympy.eye(rd.rank) - q * m).det())
        s = sympy.series(1 / d, q, 0, N).removeO()
        series.append(sympy.Poly(s, q))
    out = []
    for ch in ct.chars:
        tot = sum((series[k] * (int(ch[k].to_fraction()) * c.size) for k, c in enumerate(ct.classes)),
                  sympy.Poly(0, q))
        coeffs = tot.all_coeffs()[::-1]
        out.append(next(i for i, a in enumerate(coeffs) if a != 0))
    return Counter(out)


@pytest.mark.parametrize("label", ["A2", "A3", "B2", "B3", "C3", "D4", "G2"])
def test_b_invariants_against_molien(label):
    rd = build_root_datum(label)
    letter, n = label[0], int(label[1:])
    labs = Counter(b_invariant(l) for l in irreducible_labels(letter, n))
    assert labs == _b_from_character_table(rd)


# ------------------------------------------------------------ extended table

def test_extended_a1_adjoint_half():
    rd = build_root_datum("A1", "ad")
    t = point_from_coweights(rd, [F(1, 2)])
    M = PseudoLevi(rd, (t,))
    ext = extended_springer_table(M)
    assert len(ext) == 2 == irr_wa_count(M)
    assert {e.sigma for e in ext} == {0, 1}


def test_extended_a2_adjoint_order_three():
    rd = build_root_datum("A2", "ad")
    t = point_from_coweights(rd, [F(1, 3), F(1, 3)])
    M = PseudoLevi(rd, (t,))
    assert len(M.pi0) == 3 and len(M.WM0) == 1
    assert len(extended_springer_table(M)) == 3 == irr_wa_count(M)


@pytest.mark.parametrize("label,iso", [("A2", "ad"), ("B2", "ad"), ("C2", "ad"), ("B3", "ad"),
                                       ("G2", "sc"), ("A3", "ad"), ("A1xA1", "ad")])
def test_extended_counting_identity_on_grid(label, iso):
    rd = build_root_datum(label, iso)
    for t in torus_grid(rd.rank, 4):
        M = PseudoLevi(rd, (t,))
        assert len(extended_springer_table(M)) == irr_wa_count(M)


def test_b4_with_d4_centralizer():
    rd = build_root_datum("B4", "ad")
    for t in torus_grid(4, 2):
        M = PseudoLevi(rd, (t,))
        if M.type_label == "D4" and len(M.pi0) == 2:
            break
    ext = extended_springer_table(M)
    assert len(ext) == irr_wa_count(M)
    swapped = [e for e in ext if e.orbit_size == 2]
    # the very even pairs come in swapped twos, each contributing one datum
    assert {str(e.cls) for e in swapped} <= {"D4:[2,2,2,2]I", "D4:[2,2,2,2]II",
                                            "D4:[4,4]I", "D4:[4,4]II"}
    assert len(swapped) == 2


# ------------------------------------------------------------ affine Springer fibres

def test_fiber_generic_and_identity():
    rd = build_root_datum("B2")
    t = point_from_coweights(rd, [F(1, 7), F(2, 11)])
    fib = affine_springer_fiber(rd, t)
    assert len(fib) == 1 and fib[0].is_spherical
    fib = affine_springer_fiber(rd, identity_point(2))
    assert len(fib) == len(FiniteGroup(generate_weyl(rd).perms).classes)
    assert sum(p.is_spherical for p in fib) == 1


@pytest.mark.parametrize("label,iso", [("A1", "ad"), ("A2", "sc"), ("A2", "ad"), ("B2", "sc"),
                                       ("C2", "ad"), ("G2", "sc")])
def test_fiber_sum_is_extended_quotient(label, iso):
    rd = build_root_datum(label, iso)
    W = generate_weyl(rd)
    G = FiniteGroup(W.perms)
    pts = torus_grid(rd.rank, 4)
    tab = action_table(G, pts, lambda w, t: act(W, w, t))
    eq = extended_quotient_2(G, tab, with_tables=False)
    reps = {int(min(tab[:, i])) for i in range(len(pts))}
    total = sum(len(affine_springer_fiber(rd, pts[i])) for i in reps)
    assert total == len(eq.points)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([("A2", "ad"), ("B2", "sc"), ("C2", "ad"), ("G2", "sc")]), st.data())
def test_spherical_parameter_equivariant(case, data):
    rd = build_root_datum(*case)
    W = generate_weyl(rd)
    pts = torus_grid(rd.rank, 4)
    t = pts[data.draw(st.integers(0, len(pts) - 1))]
    w = data.draw(st.integers(0, W.order - 1))
    a, b = spherical_parameter(rd, t), spherical_parameter(rd, act(W, w, t))
    assert a.is_spherical and b.is_spherical
    assert a.cls.dim_orbit == b.cls.dim_orbit == 0
    assert len(affine_springer_fiber(rd, t)) == len(affine_springer_fiber(rd, act(W, w, t)))


def test_dump_table_formats():
    rows = springer_table(levi_of(build_root_datum("C2")))
    txt = dump_table(rows)
    assert len(txt.splitlines()) == len(rows)
    assert "C2:[2,2]\te[2]" in txt
    js = json.loads(dump_table(rows, "json"))
    assert js[0] == {"class": "C2:[1,1,1,1]", "rho": "1", "irrep": "([2],[])"}
    assert dump_table(rows) == dump_table(springer_table(levi_of(build_root_datum("C2"))))
