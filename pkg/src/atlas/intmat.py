"""Small exact integer/rational matrix helpers.

Matrices are plain tuples of tuples (or numpy int arrays where speed matters).
Smith and Hermite normal forms are delegated to sympy.
"""
from fractions import Fraction
from math import gcd

import numpy as np
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import hermite_normal_form, smith_normal_decomp


def to_matrix(rows):
    return Matrix([[int(x) for x in r] for r in rows])


def rat_inverse(rows):
    """Inverse of a square rational matrix as a list of lists of Fractions."""
    m = Matrix([[Fraction(x) for x in r] for r in rows])
    inv = m.inv()
    return [[Fraction(int(x.p), int(x.q)) for x in inv.row(i)] for i in range(inv.rows)]


def int_adjugate(rows):
    m = to_matrix(rows)
    return [[int(x) for x in m.adjugate().row(i)] for i in range(m.rows)], int(m.det())


def lattice_basis(rows, dim):
    """Row basis in Hermite normal form of the lattice spanned by integer rows."""
    m = to_matrix(rows).T
    h = hermite_normal_form(m)
    basis = [tuple(int(x) for x in h.col(j)) for j in range(h.cols)]
    if len(basis) != dim:
        raise ValueError("lattice is not of full rank")
    return tuple(basis)


def smith(rows):
    """Return (diag, S, T) with diag(d) = S * M * T, S and T unimodular."""
    m = to_matrix(rows)
    d, s, t = smith_normal_decomp(m, domain=ZZ)
    n = min(d.rows, d.cols)
    diag = [int(d[i, i]) for i in range(n)]
    return diag, np.array(s.tolist(), dtype=np.int64), np.array(t.tolist(), dtype=np.int64)


def invariant_factors(rows):
    diag, _, _ = smith(rows)
    return [abs(d) for d in diag]


def lcm(a, b):
    return a * b // gcd(a, b) if a and b else max(a, b)


def frac_mod1(x):
    x = Fraction(x)
    return x - (x.numerator // x.denominator)


def common_denominator(vec):
    d = 1
    for x in vec:
        d = lcm(d, Fraction(x).denominator)
    return d


def mat_vec(m, v):
    return tuple(sum(Fraction(a) * b for a, b in zip(row, v)) for row in m)


def rank_of(rows):
    if not rows:
        return 0
    return Matrix([[Fraction(x) for x in r] for r in rows]).rank()


def nullspace_int(rows, ncols):
    """Integer basis of the rational kernel {v : M v = 0}, scaled primitive."""
    if not rows:
        return [tuple(1 if i == j else 0 for i in range(ncols)) for j in range(ncols)]
    m = Matrix([[Fraction(x) for x in r] for r in rows])
    out = []
    for v in m.nullspace():
        den = 1
        for x in v:
            den = lcm(den, int(x.q))
        w = [int(x * den) for x in v]
        g = 0
        for x in w:
            g = gcd(g, x)
        out.append(tuple(x // g for x in w))
    return out
