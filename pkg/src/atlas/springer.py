"""Springer correspondence, its extension to disconnected pseudo-Levis, and the
affine Springer parameter fibres.

Normalisation: the trivial class with trivial rho goes to the trivial
representation of W, the regular class to the sign representation.  For
classical factors we compute Lusztig symbols (which give the opposite
normalisation) and tensor with the sign character.
"""
import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fingrp import action_table, orbits_of
from .rootdata import RootDatum
from .torus import BernsteinData, PseudoLevi, TorusPoint, _as_subgroup
from .unipotent import (
    G2_NAMES, UnsupportedType, as_levi, enumerate_unipotent_classes, factor_classes,
    factor_rho_labels, multiplicities, partitions_of, rho_labels, rho_str, transport_pair,
    transpose, trivial_class,
)


# ------------------------------------------------------------ W-irrep labels

@dataclass(frozen=True, order=True)
class WLabel:
    """Irreducible character of a simple Weyl group.

    A_n: a partition of n+1, with (n+1) the trivial character.
    B_n, C_n: a bipartition (alpha, beta), ((n), ()) trivial and ((), (1^n)) sign.
    D_n: an unordered pair, stored with alpha >= beta; equal pairs carry "+" or "-".
    G2: phi_{d,b} names.
    """
    letter: str
    n: int
    data: tuple
    sign: str = ""

    def __str__(self):
        def p(x):
            return "[" + ",".join(map(str, x)) + "]"
        if self.letter == "A":
            return p(self.data[0])
        if self.letter in "BC":
            return "(" + p(self.data[0]) + "," + p(self.data[1]) + ")"
        if self.letter == "D":
            return "{" + p(self.data[0]) + "," + p(self.data[1]) + "}" + self.sign
        return self.data[0]


G2_IRREPS = ("phi1,0", "phi1,6", "phi'1,3", "phi''1,3", "phi2,1", "phi2,2")
_G2_B = {"phi1,0": 0, "phi1,6": 6, "phi'1,3": 3, "phi''1,3": 3, "phi2,1": 1, "phi2,2": 2}
_G2_SIGN = {"phi1,0": "phi1,6", "phi1,6": "phi1,0", "phi'1,3": "phi''1,3",
            "phi''1,3": "phi'1,3", "phi2,1": "phi2,2", "phi2,2": "phi2,1"}
# (class, rho) -> irrep, already in the trivial-to-trivial normalisation
G2_SPRINGER = {
    ("1", "1"): "phi1,0",
    ("A1", "1"): "phi'1,3",
    ("~A1", "1"): "phi2,1",
    ("G2(a1)", "1"): "phi2,2",
    ("G2(a1)", "refl"): "phi''1,3",
    ("G2(a1)", "sgn"): None,
    ("G2", "1"): "phi1,6",
}


def _d_label(n, a, b, sign=""):
    a, b = max(a, b), min(a, b)
    if a == b and not sign:
        raise ValueError("degenerate D label needs a sign")
    return WLabel("D", n, (a, b), sign if a == b else "")


@lru_cache(maxsize=None)
def irreducible_labels(letter, n):
    if letter == "A":
        return tuple(WLabel("A", n, (p,)) for p in partitions_of(n + 1))
    if letter == "G":
        if n != 2:
            raise UnsupportedType(f"{letter}{n}")
        return tuple(WLabel("G", 2, (x,)) for x in G2_IRREPS)
    if letter not in "BCD":
        raise UnsupportedType(f"{letter}{n}")
    out = []
    for k in range(n + 1):
        for a in partitions_of(k):
            for b in partitions_of(n - k):
                if letter in "BC":
                    out.append(WLabel(letter, n, (a, b)))
                elif a > b:
                    out.append(_d_label(n, a, b))
                elif a == b:
                    out.append(_d_label(n, a, b, "+"))
                    out.append(_d_label(n, a, b, "-"))
    return tuple(out)


def _nfun(p):
    return sum(i * x for i, x in enumerate(p))


def b_invariant(lab):
    """Lowest degree of the coinvariant algebra containing the character."""
    if lab.letter == "A":
        return _nfun(lab.data[0])
    if lab.letter in "BC":
        a, b = lab.data
        return 2 * _nfun(a) + 2 * _nfun(b) + sum(b)
    if lab.letter == "D":
        a, b = lab.data
        return 2 * _nfun(a) + 2 * _nfun(b) + min(sum(a), sum(b))
    return _G2_B[lab.data[0]]


def sign_twist(lab):
    if lab.letter == "A":
        return WLabel("A", lab.n, (transpose(lab.data[0]),))
    if lab.letter in "BC":
        a, b = lab.data
        return WLabel(lab.letter, lab.n, (transpose(b), transpose(a)))
    if lab.letter == "D":
        a, b = lab.data
        return _d_label(lab.n, transpose(a), transpose(b), lab.sign)
    return WLabel("G", 2, (_G2_SIGN[lab.data[0]],))


def trivial_label(letter, n):
    if letter == "A":
        return WLabel("A", n, ((n + 1,),))
    if letter == "G":
        return WLabel("G", 2, ("phi1,0",))
    if letter == "D":
        return _d_label(n, (n,), ())
    return WLabel(letter, n, ((n,), ()))


def sign_label(letter, n):
    return sign_twist(trivial_label(letter, n))


# ------------------------------------------------------------ symbols

def _lambda_star(letter, parts):
    lam = sorted(parts)
    want = 1 if letter in "BC" else 0
    if len(lam) % 2 != want:
        lam = [0] + lam
    return lam, [p + i for i, p in enumerate(lam)]


def _rows(letter, ls):
    top_odd = letter == "B"
    top = [v // 2 for v in ls if (v % 2 == 1) == top_odd]
    bot = [v // 2 for v in ls if (v % 2 == 1) != top_odd]
    return top, bot


def _symbol_to_pair(top, bot):
    a = tuple(sorted((x - i for i, x in enumerate(sorted(top)) if x - i), reverse=True))
    b = tuple(sorted((x - i for i, x in enumerate(sorted(bot)) if x - i), reverse=True))
    return a, b


def classical_symbol_pair(fc, rho):
    """(alpha, beta) in the regular-to-trivial normalisation, or None if rho is
    not geometric.

    rho is the tuple S of relevant parts on which the character is -1.  The
    lambda* entries of the parts in S are pushed outwards: the first one moves
    down by one and the last one up by one.
    """
    lam, ls = _lambda_star(fc.letter, fc.label)
    idx = [i for i, p in enumerate(lam) if p in set(rho)]
    ls = list(ls)
    if idx:
        ls[idx[0]] -= 1
        ls[idx[-1]] += 1
    if len(set(ls)) != len(ls) or min(ls) < 0:
        return None
    top, bot = _rows(fc.letter, ls)
    if len(top) - len(bot) != (1 if fc.letter in "BC" else 0):
        return None
    return _symbol_to_pair(top, bot)


@lru_cache(maxsize=None)
def factor_springer(letter, n):
    """{(FactorClass, rho): WLabel or None} for one simple factor."""
    out = {}
    for fc in factor_classes(letter, n):
        for rho in factor_rho_labels(fc):
            if letter == "A":
                lab = WLabel("A", n, (transpose(fc.label),))
            elif letter == "G":
                name = G2_SPRINGER[(fc.label, rho)]
                lab = WLabel("G", 2, (name,)) if name else None
            else:
                pair = classical_symbol_pair(fc, rho)
                if pair is None:
                    lab = None
                else:
                    a, b = pair
                    if letter == "D":
                        lab = sign_twist(_d_label(n, a, b, {"I": "+", "II": "-"}.get(fc.flag, "")))
                    else:
                        lab = sign_twist(WLabel(letter, n, (a, b)))
            out[(fc, rho)] = lab
    image = [v for v in out.values() if v is not None]
    if len(set(image)) != len(image) or set(image) != set(irreducible_labels(letter, n)):
        raise AssertionError(f"Springer map for {letter}{n} is not a bijection onto Irr(W)")
    return out


# ------------------------------------------------------------ tables for M°

@dataclass(frozen=True)
class SpringerDatum:
    cls: object              # UnipotentClass
    rho: tuple               # per-factor character labels
    geometric: bool
    irrep: tuple             # per-factor WLabel, or None

    def row(self):
        return {"class": str(self.cls), "rho": rho_label_str(self.rho),
                "irrep": irrep_str(self.irrep) if self.geometric else None}


def rho_label_str(rho):
    return " x ".join(rho_str(r) for r in rho) if rho else "1"


def irrep_str(irrep):
    return " x ".join(str(l) for l in irrep) if irrep else "triv"


def springer_table(M, geometric_only=False):
    """All pairs (x, rho) for M°, with their W^{M°}-irreps."""
    M = as_levi(M)
    tables = [factor_springer(l, n) for l, n, _ in M.factors]
    out = []
    for c in enumerate_unipotent_classes(M):
        for rho in rho_labels(c):
            labs = tuple(t[(fc, r)] for t, fc, r in zip(tables, c.parts, rho))
            geo = all(x is not None for x in labs)
            if geometric_only and not geo:
                continue
            out.append(SpringerDatum(c, rho, geo, labs if geo else None))
    return out


def irr_w_count(M):
    """|Irr(W^{M°})| from the label sets (product over the factors)."""
    M = as_levi(M)
    k = 1
    for l, n, _ in M.factors:
        k *= len(irreducible_labels(l, n))
    return k


def dump_table(rows, fmt="text"):
    rows = [r.row() for r in rows]
    if fmt == "json":
        return json.dumps(rows, indent=1, sort_keys=True)
    lines = []
    for r in rows:
        lines.append(f"{r['class']}\t{r['rho']}\t{r['irrep'] if r['irrep'] else '-'}")
    return "\n".join(lines)


# ------------------------------------------------------------ extended table

@dataclass(frozen=True)
class ExtendedSpringerDatum:
    cls: object
    rho: tuple
    sigma: int               # row of the stabiliser's character table
    stabilizer_order: int
    orbit_size: int
    irrep: tuple

    def row(self):
        return {"class": str(self.cls), "rho": rho_label_str(self.rho), "sigma": self.sigma,
                "stabilizer": self.stabilizer_order, "orbit": self.orbit_size,
                "irrep": irrep_str(self.irrep)}


def pair_action(M, data):
    """Action table of pi0(M) on a list of SpringerDatum."""
    P = M.pi0_group
    keys = [(d.cls, d.rho) for d in data]
    return action_table(P, keys, lambda g, k: transport_pair(M, P.parent[g], k[0], k[1]))


def extended_springer_table(M):
    """Geometric data of pi0(Z_M(x)) up to M-conjugacy, one per irreducible
    of W^{M°} x| pi0(M).  The relevant 2-cocycles are trivial, so each orbit of
    pairs contributes the irreducibles of its stabiliser."""
    M = as_levi(M)
    data = springer_table(M, geometric_only=True)
    if M.is_connected:
        return [ExtendedSpringerDatum(d.cls, d.rho, 0, 1, 1, d.irrep) for d in data]
    tab = pair_action(M, data)
    out = []
    for orb in orbits_of(M.pi0_group, tab):
        d = data[orb.rep]
        for k in range(len(orb.stabilizer.classes)):
            out.append(ExtendedSpringerDatum(d.cls, d.rho, k, orb.stabilizer.order,
                                             len(orb.members), d.irrep))
    return out


def irr_wa_count(M):
    """|Irr(W^{M°} x| pi0(M))| from the character theory of the actual group."""
    M = as_levi(M)
    return len(M.WA_group.classes)


# ------------------------------------------------------------ affine Springer fibres

@dataclass(frozen=True)
class AffineSpringerParam:
    t: TorusPoint
    cls: object
    rho: tuple
    sigma: int

    @property
    def is_spherical(self):
        return self.cls.is_trivial and all(r in ((), "1") for r in self.rho) and self.sigma == 0


def centralizer_of(obj, t):
    """M = Z_H(t), with H given by a root datum, a PseudoLevi or Bernstein data."""
    if isinstance(obj, RootDatum):
        return PseudoLevi(obj, (t,))
    H = obj.H if isinstance(obj, BernsteinData) else obj
    return PseudoLevi(H.rd, tuple(H.generators) + (t,))


def affine_springer_fiber(obj, t):
    M = centralizer_of(obj, t)
    ext = extended_springer_table(M)
    out = [AffineSpringerParam(t, e.cls, e.rho, e.sigma) for e in ext]
    out.sort(key=lambda p: (p.cls.dim_orbit, str(p.cls), rho_label_str(p.rho), p.sigma))
    return out


def spherical_parameter(obj, t):
    M = centralizer_of(obj, t)
    c = trivial_class(M)
    return AffineSpringerParam(t, c, tuple(factor_rho_labels(p)[0] for p in c.parts), 0)


__all__ = [
    "WLabel", "SpringerDatum", "ExtendedSpringerDatum", "AffineSpringerParam",
    "irreducible_labels", "b_invariant", "sign_twist", "trivial_label", "sign_label",
    "classical_symbol_pair", "factor_springer", "springer_table", "extended_springer_table",
    "affine_springer_fiber", "spherical_parameter", "centralizer_of", "irr_w_count",
    "irr_wa_count", "dump_table", "pair_action", "G2_NAMES",
]
