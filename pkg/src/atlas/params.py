"""Parameters attached to a principal-series Bernstein block, and the finite
triangle comparing them with the extended quotient of the torus.

Everything is discrete: a parameter is a torus point t (the image of a
Frobenius), a unipotent class x of M = Z_H(t), a character rho of A_x and an
irreducible sigma of the stabiliser of (x, rho) in pi0(M).  The three kinds of
parameters share these labels and differ only in how the torus part is read.
"""
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .fingrp import action_table, extended_quotient_2, orbits_of
from .rootdata import RootDatum
from .springer import AffineSpringerParam, springer_table
from .torus import (BernsteinData, FiniteTorusSubgroup, PseudoLevi, TorusPoint, _as_subgroup,
                    act, bernstein_data, generic_point, torus_grid)
from .unipotent import (FormalPoint, UnipotentClass, align_weyl, conjugate_pair, rho_str,
                        t_q_point, transport_pair)

DEFAULT_GRID_CAP = int(os.environ.get("ATLAS_GRID_CAP", 2_000_000))


class GridTooLarge(ValueError):
    pass


class ParameterError(ValueError):
    pass


# ------------------------------------------------------------ parameter kinds

@dataclass(frozen=True)
class KLRParameter:
    rd: RootDatum
    c_s: FiniteTorusSubgroup
    t: TorusPoint
    x: UnipotentClass
    rho: tuple
    sigma: int = 0
    geometric: bool = True

    def __str__(self):
        return f"KLR(t={fmt_point(self.t)}, x={self.x}, rho={rho_text(self.rho)}, sigma={self.sigma})"


@dataclass(frozen=True)
class KLTriple:
    rd: RootDatum
    c_s: FiniteTorusSubgroup
    t_q: FormalPoint
    x: UnipotentClass
    rho_q: tuple
    sigma: int = 0

    def __str__(self):
        return f"KL(t_q={fmt_formal(self.t_q)}, x={self.x}, rho={rho_text(self.rho_q)}, sigma={self.sigma})"


KINDS = ("klr", "affine_springer", "kl_triple")


def rho_text(rho):
    return " x ".join(rho_str(r) for r in rho) if rho else "1"


def fmt_frac(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def fmt_point(t):
    return "(" + ",".join(fmt_frac(x) for x in t.v) + ")"


def fmt_formal(fp):
    """Coordinates of t * h(q^{1/2}) as e(a)q^{b}, with e(a) = exp(2 pi i a)."""
    out = []
    for a, b in zip(fp.t.v, fp.exponent):
        parts = []
        if a:
            parts.append(f"e({fmt_frac(a)})")
        if b:
            parts.append(f"q^{{{fmt_frac(b)}}}")
        out.append("".join(parts) or "1")
    return "(" + ",".join(out) + ")"


# ------------------------------------------------------------ cached structure

@lru_cache(maxsize=None)
def _bernstein(rd, c_s):
    return bernstein_data(rd, c_s)


@lru_cache(maxsize=4096)
def centralizer(rd, c_s, t):
    """M = Z_H(t) with H = Z_G(c_s)."""
    return PseudoLevi(rd, tuple(_as_subgroup(c_s).generators) + (t,))


def _context(p, data):
    if isinstance(p, (KLRParameter, KLTriple)):
        return p.rd, p.c_s
    if data is None:
        raise ParameterError("converting this kind needs the Bernstein data")
    if isinstance(data, BernsteinData):
        return data.rd, data.c_s
    rd, c_s = data
    return rd, _as_subgroup(c_s)


def _granularity_group(H, granularity):
    if granularity == "H":
        return H.WA_group
    if granularity == "H0":
        return H.WM0_group
    raise ValueError("granularity is 'H' or 'H0'")


# ------------------------------------------------------------ conversion

def convert(p, target, data=None):
    """Translate between the three kinds; the shared labels are carried over."""
    if target not in KINDS:
        raise ValueError(f"unknown parameter kind {target!r}")
    rd, c_s = _context(p, data)
    if isinstance(p, KLRParameter):
        t, x, rho, sigma = p.t, p.x, p.rho, p.sigma
    elif isinstance(p, KLTriple):
        t, x, rho, sigma = p.t_q.t, p.x, p.rho_q, p.sigma
    elif isinstance(p, AffineSpringerParam):
        t, x, rho, sigma = p.t, p.cls, p.rho, p.sigma
    else:
        raise TypeError("not a parameter")
    if target == "klr":
        return KLRParameter(rd, c_s, t, x, rho, sigma)
    if target == "affine_springer":
        return AffineSpringerParam(t, x, rho, sigma)
    M = centralizer(rd, c_s, t)
    return KLTriple(rd, c_s, t_q_point(M, t, x), x, rho, sigma)


# ------------------------------------------------------------ pair orbits at one t

@dataclass
class PairOrbit:
    cls: UnipotentClass
    rho: tuple
    members: list          # (cls, rho) pairs in the orbit
    stabilizer: object     # subgroup of M.pi0_group
    n_sigma: int


def _allowed_pi0(M, H, granularity):
    """Indices into M.pi0_group usable as conjugators at this granularity."""
    P = M.pi0_group
    if granularity == "H":
        return list(range(P.order))
    allowed = set(H.WM0)
    return [g for g in range(P.order) if P.parent[g] in allowed]


@lru_cache(maxsize=4096)
def _pair_orbits(rd, c_s, t, granularity="H"):
    M = centralizer(rd, c_s, t)
    H = _bernstein(rd, c_s).H
    data = springer_table(M, geometric_only=True)
    keys = [(d.cls, d.rho) for d in data]
    P = M.pi0_group
    Q = P.subgroup(_allowed_pi0(M, H, granularity))
    tab = action_table(Q, keys, lambda g, k: transport_pair(M, P.parent[Q.parent[g]], k[0], k[1]))
    out = []
    for orb in orbits_of(Q, tab):
        S = P.subgroup([Q.parent[g] for g in orb.stabilizer.parent])
        d = data[orb.rep]
        out.append(PairOrbit(d.cls, d.rho, [keys[i] for i in orb.members], S, len(S.classes)))
    return M, Q, out, keys, tab


def klr_at(rd, c_s, t, granularity="H"):
    """Normalised KLR parameters with Frobenius image t (t itself is kept)."""
    c_s = _as_subgroup(c_s)
    _, _, orbs, _, _ = _pair_orbits(rd, c_s, t, granularity)
    return [KLRParameter(rd, c_s, t, o.cls, o.rho, k) for o in orbs for k in range(o.n_sigma)]


# ------------------------------------------------------------ equivalence classes

def _orbit_and_mover(G, W, t):
    """Canonical point of the G-orbit of t (G a subgroup of W) and some g in G moving t there."""
    best, mover = None, None
    for g in range(G.order):
        u = act(W, G.parent[g], t)
        if best is None or u.v < best.v:
            best, mover = u, G.parent[g]
    return best, mover


def _sigma_transport(W, S_src, S_dst, c, sigma):
    """Row of S_dst's table matching sigma of S_src after conjugation by c (c S_src c^-1 = S_dst)."""
    P_src, P_dst = S_src.parent_group, S_dst.parent_group
    if S_src.order == 1:
        return 0
    ct_src, ct_dst = S_src.character_table, S_dst.character_table
    cinv = W.inv(c)
    values = []
    for cl in ct_dst.classes:
        we = P_dst.parent[S_dst.parent[cl.rep]]
        v = W.mul(W.mul(cinv, we), c)
        k = S_src.parent_pos[P_src.parent_pos[v]]
        values.append(ct_src.chars[sigma][S_src.class_of[k]])
    for i, ch in enumerate(ct_dst.chars):
        if all(a == b for a, b in zip(ch, values)):
            return i
    raise AssertionError("conjugated character not found")


def _stabilizer_of_pair(M, Q, keys, tab, key):
    P = M.pi0_group
    i = keys.index(key)
    return P.subgroup([Q.parent[g] for g in range(Q.order) if tab[g][i] == i])


def normalize(p, granularity="H"):
    """The canonical representative of the conjugacy class of a KLR parameter."""
    rd, c_s = p.rd, p.c_s
    H = _bernstein(rd, c_s).H
    W = H.W
    G = _granularity_group(H, granularity)
    t0, w = _orbit_and_mover(G, W, p.t)
    M = centralizer(rd, c_s, p.t)
    M0, Q0, orbs, keys0, tab0 = _pair_orbits(rd, c_s, t0, granularity)
    _, Q, _, keys, tab = _pair_orbits(rd, c_s, p.t, granularity)
    if (p.x, p.rho) not in keys:
        raise ParameterError("rho is not geometric for x")
    w = align_weyl(M, M0, w)
    x1, rho1 = conjugate_pair(M, M0, w, p.x, p.rho)
    # move (x1, rho1) to its orbit representative inside pi0(M0)
    P0 = M0.pi0_group
    i = keys0.index((x1, rho1))
    for orb in orbs:
        if (x1, rho1) in orb.members:
            break
    j = keys0.index((orb.cls, orb.rho))
    g = next(g for g in range(Q0.order) if tab0[g][i] == j)
    c = W.mul(P0.parent[Q0.parent[g]], w)
    S_src = _stabilizer_of_pair(M, Q, keys, tab, (p.x, p.rho))
    if not 0 <= p.sigma < len(S_src.classes):
        raise ParameterError("sigma out of range")
    sigma = _sigma_transport(W, S_src, orb.stabilizer, c, p.sigma)
    return KLRParameter(rd, c_s, t0, orb.cls, orb.rho, sigma, p.geometric)


def conjugate(p, w):
    """w . p for a Weyl element w in W^s; labels are carried along exactly."""
    rd, c_s = p.rd, p.c_s
    H = _bernstein(rd, c_s).H
    W = H.W
    if w not in set(H.WA):
        raise ParameterError("w is not in W^s")
    t1 = act(W, w, p.t)
    M, M1 = centralizer(rd, c_s, p.t), centralizer(rd, c_s, t1)
    w = align_weyl(M, M1, w)
    x1, rho1 = conjugate_pair(M, M1, w, p.x, p.rho)
    _, Q, _, keys, tab = _pair_orbits(rd, c_s, p.t)
    _, Q1, _, keys1, tab1 = _pair_orbits(rd, c_s, t1)
    S = _stabilizer_of_pair(M, Q, keys, tab, (p.x, p.rho))
    S1 = _stabilizer_of_pair(M1, Q1, keys1, tab1, (x1, rho1))
    return KLRParameter(rd, c_s, t1, x1, rho1, _sigma_transport(W, S, S1, w, p.sigma), p.geometric)


def equivalence_key(p, granularity="H"):
    q = normalize(p, granularity)
    return (q.t.v, str(q.x), rho_text(q.rho), q.sigma)


# ------------------------------------------------------------ infinitesimal character

@dataclass(frozen=True)
class InfinitesimalCharacter:
    rep: FormalPoint
    orbit_size: int

    def __str__(self):
        return fmt_formal(self.rep)

    def key(self):
        return (self.rep.t.v, self.rep.exponent)


def formal_orbit(W, elements, fp):
    """All images of a formal point under the given Weyl elements, as a set of keys."""
    out = set()
    e = np.array(fp.exponent, dtype=object)
    for w in elements:
        m = W.comatrices[w]
        ex = tuple(sum(int(m[i][j]) * e[j] for j in range(len(e))) for i in range(len(e)))
        out.add((act(W, w, fp.t).v, ex))
    return out


def infinitesimal_character(p, granularity="H"):
    """W^s-orbit of t_q = t h_x(q^{1/2}), kept formal in q."""
    H = _bernstein(p.rd, p.c_s).H
    M = centralizer(p.rd, p.c_s, p.t)
    fp = t_q_point(M, p.t, p.x)
    G = _granularity_group(H, granularity)
    orbit = formal_orbit(H.W, G.parent, fp)
    tv, ex = min(orbit)
    return InfinitesimalCharacter(FormalPoint(TorusPoint(tv), ex), len(orbit))


# ------------------------------------------------------------ the triangle

@dataclass
class OrbitRow:
    t: TorusPoint
    orbit_size: int
    extq2: int
    klr: int
    spherical: int          # number of spherical KLR parameters in the fibre

    @property
    def ok(self):
        return self.extq2 == self.klr and self.spherical == 1


@dataclass
class TriangleResult:
    rd: RootDatum
    c_s: FiniteTorusSubgroup
    bound: int
    granularity: str
    rows: list
    klr: list
    extq2_total: int
    klr_total: int

    @property
    def counts_match(self):
        return self.extq2_total == self.klr_total and all(r.ok for r in self.rows)

    def mismatches(self):
        return [r for r in self.rows if not r.ok]

    def to_json(self):
        return {
            "root_datum": str(self.rd.type_label), "bound": self.bound,
            "granularity": self.granularity,
            "orbits": [{"orbit": fmt_point(r.t), "size": r.orbit_size, "extq2": r.extq2,
                        "klr": r.klr} for r in self.rows],
            "klr": [{"t": fmt_point(p.t), "x": str(p.x), "rho": rho_text(p.rho),
                     "sigma": p.sigma} for p in self.klr],
            "counts": {"extq2": self.extq2_total, "klr": self.klr_total,
                       "match": self.counts_match},
        }


def enumerate_triangle(rd, c_s, bound, granularity="H", include_generic=True,
                       with_tables=False, cap=None):
    """Compare (T//W^s)_2 with KLR classes over the points of order <= bound.

    One generic point is added so that the free stratum is represented.  The
    extended quotient side uses only the finite group action; the KLR side
    comes from unipotent classes and the Springer tables of each Z_H(t).
    """
    c_s = _as_subgroup(c_s)
    H = _bernstein(rd, c_s).H
    W = H.W
    G = _granularity_group(H, granularity)
    cap = cap or DEFAULT_GRID_CAP
    pts = torus_grid(rd.rank, bound)
    if len(pts) * G.order > cap:
        raise GridTooLarge(f"{len(pts)} points x |W^s| = {G.order} exceeds {cap}")
    if include_generic:
        g = generic_point(rd, G.parent)
        pts = pts + sorted({act(W, w, g) for w in G.parent}, key=lambda p: p.v)
    tab = action_table(G, pts, lambda w, t: act(W, G.parent[w], t))
    eq = extended_quotient_2(G, tab, with_tables=with_tables)
    rows, klr = [], []
    for i, orb in enumerate(eq.orbits):
        t0 = min((pts[k] for k in orb.members), key=lambda p: p.v)
        ps = klr_at(rd, c_s, t0, granularity)
        klr.extend(ps)
        sph = sum(1 for p in ps if p.x.is_trivial and p.sigma == 0
                  and all(r == () or r == "1" for r in p.rho))
        rows.append(OrbitRow(t0, len(orb.members), len(eq.fiber(i)), len(ps), sph))
    rows.sort(key=lambda r: r.t.v)
    klr.sort(key=lambda p: (p.t.v, p.x.dim_orbit, str(p.x), rho_text(p.rho), p.sigma))
    return TriangleResult(rd, c_s, bound, granularity, rows, klr, len(eq.points), len(klr))


__all__ = [
    "KLRParameter", "KLTriple", "AffineSpringerParam", "InfinitesimalCharacter", "OrbitRow",
    "TriangleResult", "GridTooLarge", "ParameterError", "convert", "normalize", "conjugate",
    "equivalence_key", "infinitesimal_character", "enumerate_triangle", "klr_at", "centralizer",
    "fmt_point", "fmt_formal", "fmt_frac", "rho_text", "formal_orbit",
]
