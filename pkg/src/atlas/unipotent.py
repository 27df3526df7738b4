"""Unipotent classes of pseudo-Levi subgroups, handled as combinatorial labels.

A class of M° is a tuple of per-factor classes, one for each simple factor in
the order of ``PseudoLevi.factors``.  Classical factors are labelled by
partitions, G2 by the five Bala-Carter names.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations

import numpy as np

from .fingrp import FiniteGroup, cyclic_group, direct_product, symmetric_group
from .intmat import rat_inverse
from .rootdata import RootDatum, build_root_datum
from .torus import PseudoLevi, TorusPoint, identity_point


class UnsupportedType(ValueError):
    pass


G2_NAMES = ("1", "A1", "~A1", "G2(a1)", "G2")
# labels on (short, long)
G2_DIAGRAMS = {"1": (0, 0), "A1": (0, 1), "~A1": (1, 0), "G2(a1)": (0, 2), "G2": (2, 2)}
G2_RHO = {"G2(a1)": ("1", "refl", "sgn")}


def partitions_of(n, largest=None):
    """Partitions of n as decreasing tuples, in reverse lexicographic order."""
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in partitions_of(n - k, k):
            yield (k,) + rest


def multiplicities(parts):
    out = {}
    for p in parts:
        out[p] = out.get(p, 0) + 1
    return out


def transpose(parts):
    if not parts:
        return ()
    return tuple(sum(1 for x in parts if x > j) for j in range(parts[0]))


def is_valid_partition(letter, n, parts):
    """Partition rule of the factor: A_n on n+1, B_n on 2n+1, C_n and D_n on 2n."""
    size = {"A": n + 1, "B": 2 * n + 1, "C": 2 * n, "D": 2 * n}[letter]
    if sum(parts) != size or any(a < b for a, b in zip(parts, parts[1:])):
        return False
    if any(p <= 0 for p in parts):
        return False
    m = multiplicities(parts)
    if letter == "C":
        return all(m[p] % 2 == 0 for p in m if p % 2)
    if letter in "BD":
        return all(m[p] % 2 == 0 for p in m if p % 2 == 0)
    return True


def is_very_even(parts):
    m = multiplicities(parts)
    return bool(parts) and all(p % 2 == 0 and m[p] % 2 == 0 for p in m)


@dataclass(frozen=True, order=True)
class FactorClass:
    letter: str
    n: int
    label: object            # decreasing partition, or a G2 name
    flag: str = ""           # "I" / "II" for very even classes in type D

    def __str__(self):
        if self.letter == "G":
            return f"G2:{self.label}"
        return f"{self.letter}{self.n}:[" + ",".join(map(str, self.label)) + "]" + self.flag

    @property
    def partition(self):
        return None if self.letter == "G" else self.label


def parse_factor_class(text):
    """Inverse of str(FactorClass), e.g. "C2:[2,2]" or "D4:[2,2,2,2]II"."""
    head, _, body = text.strip().partition(":")
    letter, n = head[0].upper(), int(head[1:])
    if letter == "G":
        if body not in G2_NAMES:
            raise ValueError(f"unknown G2 class {body!r}")
        return FactorClass("G", 2, body)
    if not body.startswith("["):
        raise ValueError(f"bad class label {text!r}")
    inner, _, flag = body[1:].partition("]")
    parts = tuple(int(x) for x in inner.split(",") if x.strip())
    fc = FactorClass(letter, n, tuple(sorted(parts, reverse=True)), flag)
    if fc not in factor_classes(letter, n):
        raise ValueError(f"{text!r} is not a unipotent class of {letter}{n}")
    return fc


@lru_cache(maxsize=None)
def factor_classes(letter, n):
    """All unipotent classes of a simple factor, smallest first."""
    if letter == "G":
        if n != 2:
            raise UnsupportedType(f"unsupported type {letter}{n}")
        return tuple(FactorClass("G", 2, x) for x in G2_NAMES)
    if letter not in "ABCD":
        raise UnsupportedType(f"unsupported type {letter}{n}")
    size = {"A": n + 1, "B": 2 * n + 1, "C": 2 * n, "D": 2 * n}[letter]
    out = []
    for p in partitions_of(size):
        if not is_valid_partition(letter, n, p):
            continue
        if letter == "D" and is_very_even(p):
            out.append(FactorClass(letter, n, p, "I"))
            out.append(FactorClass(letter, n, p, "II"))
        else:
            out.append(FactorClass(letter, n, p))
    out.sort(key=lambda c: (factor_dim(c), c))
    return tuple(out)


def _h_values(parts):
    vals = []
    for d in parts:
        vals.extend(range(d - 1, -d, -2))
    return sorted(vals, reverse=True)


@lru_cache(maxsize=None)
def factor_diagram(fc):
    """Weighted Dynkin diagram in the Bourbaki ordering of the factor."""
    if fc.letter == "G":
        return G2_DIAGRAMS[fc.label]
    n = fc.n
    h = _h_values(fc.label)
    if fc.letter == "A":
        lab = [h[i] - h[i + 1] for i in range(n)]
    elif fc.letter == "B":
        lab = [h[i] - h[i + 1] for i in range(n - 1)] + [h[n - 1]]
    elif fc.letter == "C":
        lab = [h[i] - h[i + 1] for i in range(n - 1)] + [2 * h[n - 1]]
    else:
        lab = [h[i] - h[i + 1] for i in range(n - 1)] + [h[n - 2] + h[n - 1]]
        if fc.flag == "II":
            lab[-2], lab[-1] = lab[-1], lab[-2]
    if any(x not in (0, 1, 2) for x in lab):
        raise AssertionError(f"bad weighted diagram {lab} for {fc}")
    return tuple(lab)


@lru_cache(maxsize=None)
def _factor_root_coords(letter, n):
    rd = build_root_datum(f"{letter}{n}")
    return np.array(rd.root_coords[:rd.npos], dtype=np.int64)


@lru_cache(maxsize=None)
def factor_dim(fc):
    """dim of the orbit: 2 #{alpha > 0 : <alpha,h> >= 2} + #{alpha > 0 : <alpha,h> = 1}."""
    coords = _factor_root_coords(fc.letter, fc.n)
    vals = coords @ np.array(factor_diagram(fc), dtype=np.int64)
    return int(2 * np.count_nonzero(vals >= 2) + np.count_nonzero(vals == 1))


def partition_dim(letter, n, parts):
    """Closed formula for the orbit dimension, used as a cross-check."""
    dual = transpose(tuple(parts))
    sq = sum(x * x for x in dual)
    odd = sum(1 for x in parts if x % 2)
    if letter == "A":
        return (n + 1) ** 2 - sq
    if letter == "B":
        return 2 * n * n + n - (sq - odd) // 2
    if letter == "C":
        return 2 * n * n + n - (sq + odd) // 2
    if letter == "D":
        return 2 * n * n - n - (sq - odd) // 2
    raise UnsupportedType(letter)


def factor_leq(a, b):
    """Closure order within one factor: a lies in the closure of b."""
    if (a.letter, a.n) != (b.letter, b.n):
        raise ValueError("classes of different factors")
    if a == b:
        return True
    if a.letter == "G":
        return G2_NAMES.index(a.label) <= G2_NAMES.index(b.label)
    if a.label == b.label:
        return False         # the two very even classes
    s = 0
    t = 0
    for k in range(max(len(a.label), len(b.label))):
        s += a.label[k] if k < len(a.label) else 0
        t += b.label[k] if k < len(b.label) else 0
        if s > t:
            return False
    return True


# ------------------------------------------------------------ component groups

def _relevant_parts(fc):
    m = multiplicities(fc.label)
    if fc.letter == "C":
        return sorted(p for p in m if p % 2 == 0)
    if fc.letter in "BD":
        return sorted(p for p in m if p % 2)
    return []


@lru_cache(maxsize=None)
def factor_rho_labels(fc):
    """Irreducible characters of the adjoint-reduced A_x of one factor.

    For B/C/D the group is elementary abelian and a character is written as the
    tuple S of relevant parts on which it is -1 (a canonical representative).
    """
    if fc.letter == "A":
        return ((),)
    if fc.letter == "G":
        return G2_RHO.get(fc.label, ("1",))
    m = multiplicities(fc.label)
    rel = _relevant_parts(fc)
    odd_mult = {p for p in rel if m[p] % 2}
    out, seen = [], set()
    for k in range(len(rel) + 1):
        for S in combinations(rel, k):
            comp = tuple(p for p in rel if p not in S)
            if fc.letter == "B":
                # SO(2n+1): characters of {sum e = 0}; S ~ complement
                key = frozenset((S, comp))
                if key in seen:
                    continue
                seen.add(key)
                rep = S if len(odd_mult & set(S)) % 2 == 0 else comp
            else:
                # trivial on the image of the centre
                if len(odd_mult & set(S)) % 2:
                    continue
                rep = S
                if fc.letter == "D":
                    key = frozenset((S, comp))
                    if key in seen:
                        continue
                    seen.add(key)
                    if rel and rel[-1] in S:
                        rep = comp
            out.append(rep)
    out.sort(key=lambda s: (len(s), s))
    return tuple(out)


def factor_component_order(fc):
    if fc.letter == "G" and fc.label == "G2(a1)":
        return 6
    return len(factor_rho_labels(fc))


def _factor_component_group(fc):
    if fc.letter == "G" and fc.label == "G2(a1)":
        return symmetric_group(3)
    k = factor_component_order(fc).bit_length() - 1
    G = cyclic_group(1)
    for _ in range(k):
        G = direct_product(G, cyclic_group(2))
    return G


def rho_str(rho):
    """Readable form of a per-factor character label."""
    if isinstance(rho, str):
        return rho
    if not rho:
        return "1"
    return "e[" + ",".join(map(str, rho)) + "]"


def parse_rho(text):
    if text in ("1", "()"):
        return ()
    if text.startswith("e["):
        return tuple(int(x) for x in text[2:-1].split(",") if x)
    return text


# ------------------------------------------------------------ classes of M°

@dataclass(frozen=True)
class UnipotentClass:
    parts: tuple                              # FactorClass per factor of M°
    dim_orbit: int = field(compare=False)
    n_roots: int = field(compare=False)

    @property
    def d_x(self):
        """Dimension of the Springer fibre."""
        return (self.n_roots - self.dim_orbit) // 2

    @property
    def is_trivial(self):
        return self.dim_orbit == 0

    @property
    def is_regular(self):
        return self.dim_orbit == self.n_roots

    def __str__(self):
        return " x ".join(str(p) for p in self.parts) if self.parts else "1"


def as_levi(obj):
    """Accept a PseudoLevi or a root datum (the connected group itself)."""
    if isinstance(obj, PseudoLevi):
        return obj
    if isinstance(obj, RootDatum):
        return PseudoLevi(obj, ())
    if hasattr(obj, "H"):
        return obj.H
    raise TypeError("expected a PseudoLevi or a RootDatum")


def _factor_keys(M):
    return [(l, n) for l, n, _ in M.factors]


def make_class(M, parts):
    M = as_levi(M)
    keys = _factor_keys(M)
    parts = tuple(parts)
    if len(parts) != len(keys):
        raise ValueError("one class per factor expected")
    for p, (l, n) in zip(parts, keys):
        if (p.letter, p.n) != (l, n) or p not in factor_classes(l, n):
            raise ValueError(f"{p} is not a class of {l}{n}")
    return UnipotentClass(parts, sum(factor_dim(p) for p in parts), 2 * len(M.positive))


def parse_class(M, text):
    M = as_levi(M)
    text = text.strip()
    if text in ("1", "") and not M.factors:
        return make_class(M, ())
    return make_class(M, [parse_factor_class(s) for s in text.split(" x ")])


def enumerate_unipotent_classes(M):
    """All unipotent classes of M°, sorted by orbit dimension."""
    M = as_levi(M)
    combos = [()]
    for l, n in _factor_keys(M):
        combos = [c + (f,) for c in combos for f in factor_classes(l, n)]
    out = [make_class(M, c) for c in combos]
    out.sort(key=lambda c: (c.dim_orbit, [str(p) for p in c.parts]))
    return out


def trivial_class(M):
    M = as_levi(M)
    return make_class(M, [factor_classes(l, n)[0] for l, n in _factor_keys(M)])


def regular_class(M):
    M = as_levi(M)
    return make_class(M, [factor_classes(l, n)[-1] for l, n in _factor_keys(M)])


def closure_order(c1, c2):
    """'less', 'greater', 'equal' or 'incomparable'."""
    if len(c1.parts) != len(c2.parts):
        raise ValueError("classes of different groups")
    if c1 == c2:
        return "equal"
    le = all(factor_leq(a, b) for a, b in zip(c1.parts, c2.parts))
    ge = all(factor_leq(b, a) for a, b in zip(c1.parts, c2.parts))
    if le:
        return "less"
    if ge:
        return "greater"
    return "incomparable"


@dataclass(frozen=True)
class WeightedDynkin:
    labels: dict           # root index of a simple root of M -> 0, 1 or 2
    cocharacter: tuple     # h in X_* (x) Q

    def pair(self, lam):
        return sum(Fraction(a) * b for a, b in zip(lam, self.cocharacter))


def weighted_dynkin(M, c):
    M = as_levi(M)
    rd = M.rd
    labels = {}
    h = [Fraction(0)] * rd.rank
    for (l, n, idx), fc in zip(M.factors, c.parts):
        lab = factor_diagram(fc)
        C = [[rd.pairing(rd.roots[idx[j]], rd.coroots[idx[i]]) for j in range(n)] for i in range(n)]
        cinv = rat_inverse(C)
        coef = [sum(Fraction(lab[j]) * cinv[j][i] for j in range(n)) for i in range(n)]
        for i in range(n):
            for k in range(rd.rank):
                h[k] += coef[i] * rd.coroots[idx[i]][k]
        for j, a in enumerate(idx):
            labels[a] = lab[j]
    wd = WeightedDynkin(labels, tuple(h))
    for a, v in labels.items():
        if wd.pair(rd.roots[a]) != v:
            raise AssertionError("cocharacter does not realise the diagram")
    return wd


def dim_from_cocharacter(M, c):
    """Orbit dimension recomputed from <alpha, h> over the roots of M."""
    M = as_levi(M)
    wd = weighted_dynkin(M, c)
    vals = [wd.pair(M.rd.roots[a]) for a in M.positive]
    return 2 * sum(1 for v in vals if v >= 2) + sum(1 for v in vals if v == 1)


# ------------------------------------------------------------ Levi inclusions

def dominant_for(M, h):
    """The W^{M°}-conjugate of a cocharacter that is dominant for M."""
    rd = M.rd
    h = [Fraction(x) for x in h]
    moved = True
    while moved:
        moved = False
        for a in M.simple:
            v = sum(Fraction(x) * y for x, y in zip(rd.roots[a], h))
            if v < 0:
                h = [x - v * c for x, c in zip(h, rd.coroots[a])]
                moved = True
    return tuple(h)


def class_from_cocharacter(M, h):
    """The class of M° whose weighted Dynkin cocharacter is conjugate to h."""
    M = as_levi(M)
    h = dominant_for(M, h)
    rd = M.rd
    parts = []
    for l, n, idx in M.factors:
        lab = tuple(int(sum(Fraction(x) * y for x, y in zip(rd.roots[a], h))) for a in idx)
        fc = _classes_by_diagram(l, n).get(lab)
        if fc is None:
            raise AssertionError(f"no class of {l}{n} with diagram {lab}")
        parts.append(fc)
    return make_class(M, parts)


def saturate(M_small, M_big, c):
    """The class of M_big° containing a class of M_small°, where M_small° is a
    reductive subgroup of M_big° containing T."""
    return class_from_cocharacter(M_big, weighted_dynkin(M_small, c).cocharacter)


_G2_TORUS = {"1": 2, "A1": 1, "~A1": 1, "G2(a1)": 0, "G2": 0}


def factor_centralizer_rank(fc):
    """Rank of the reductive part of the centraliser in the simple factor."""
    mult = multiplicities(fc.label) if fc.letter != "G" else {}
    if fc.letter == "A":
        return len(fc.label) - 1
    if fc.letter == "C":
        return sum(r // 2 for r in mult.values())
    if fc.letter in "BD":
        return sum(r // 2 for r in mult.values())
    return _G2_TORUS[fc.label]


def centralizer_torus_rank(M, c):
    """dim of a maximal torus of Z_{M°}(x), i.e. dim Z_T(im gamma_x)°."""
    M = as_levi(M)
    return M.rd.rank - len(M.simple) + sum(factor_centralizer_rank(fc) for fc in c.parts)


# ------------------------------------------------------------ pi0(M) action

def _factor_moves(M, M2, img):
    """Per factor of M: (target factor of M2, position map), from a map of simple roots."""
    where = {}
    for j, (_, _, idx) in enumerate(M2.factors):
        for pos, a in enumerate(idx):
            where[a] = (j, pos)
    out = []
    for l, n, idx in M.factors:
        targets = [where[img[a]] for a in idx]
        j = targets[0][0]
        if any(t[0] != j for t in targets):
            raise AssertionError("a factor is not mapped onto a factor")
        out.append((j, tuple(t[1] for t in targets)))
    return out


def _factor_transport(M, s):
    """For a splitting element s: list of (target factor, position map) per factor."""
    perm = M.pi0_action_on_simple(s)
    img = {M.simple[k]: M.simple[perm[k]] for k in range(len(M.simple))}
    return _factor_moves(M, M, img)


@lru_cache(maxsize=None)
def _classes_by_diagram(letter, n):
    return {factor_diagram(fc): fc for fc in factor_classes(letter, n)}


def _apply_moves(M2, moves, c, rho):
    new_parts = [None] * len(M2.factors)
    new_rho = [None] * len(M2.factors)
    for i, (j, posmap) in enumerate(moves):
        fc = c.parts[i]
        lt, nt, _ = M2.factors[j]
        lab = factor_diagram(fc)
        new_lab = [0] * nt
        for k, p in enumerate(posmap):
            new_lab[p] = lab[k]
        target = _classes_by_diagram(lt, nt)[tuple(new_lab)]
        same = (fc.letter, fc.label) == (target.letter, target.label)
        if rho is not None and not same and factor_component_order(fc) > 1:
            raise UnsupportedType("pi0 acts by an automorphism not handled on A_x")
        new_parts[j] = target
        if rho is not None:
            new_rho[j] = rho[i]
    nc = make_class(M2, new_parts)
    return nc, (tuple(new_rho) if rho is not None else None)


def transport_pair(M, s, c, rho):
    """Image of a class (and a character label tuple) under a splitting element."""
    M = as_levi(M)
    return _apply_moves(M, _factor_transport(M, s), c, rho)


def conjugate_pair(M, M2, w, c, rho=None):
    """Image of (c, rho) under a Weyl element w carrying M onto M2.

    w must send the simple roots of M to simple roots of M2 (see align_weyl).
    """
    perm = M.W.perms[w]
    img = {a: int(perm[a]) for a in M.simple}
    if not set(img.values()) <= set(M2.simple):
        raise ValueError("w does not match the simple systems")
    return _apply_moves(M2, _factor_moves(M, M2, img), c, rho)


def align_weyl(M, M2, w):
    """u.w with u in W^{M2°} chosen so that u.w maps positive roots of M to positive roots."""
    W = M.W
    if not M.positive:
        return w
    img = W.perms[w][list(M.positive)]
    cand = W.perms[M2.WM0][:, img] < M.rd.npos
    ok = np.nonzero(cand.all(axis=1))[0]
    if not len(ok):
        raise ValueError("w does not carry M onto M2")
    return W.mul(M2.WM0[int(ok[0])], w)


def pi0_action_on_classes(M, classes=None):
    """Table tab[g][i]: image of class i under the g-th element of pi0_group."""
    from .fingrp import action_table
    M = as_levi(M)
    classes = classes if classes is not None else enumerate_unipotent_classes(M)
    P = M.pi0_group
    return action_table(P, classes, lambda g, x: transport_pair(M, P.parent[g], x, None)[0])


# ------------------------------------------------------------ component group data

@dataclass
class ComponentGroupData:
    cls: UnipotentClass
    factor_orders: tuple
    rho_labels: list            # tuples, one entry per factor
    stabilizer: FiniteGroup     # pi0(M)_[x] inside pi0_group

    @property
    def order(self):
        o = 1
        for k in self.factor_orders:
            o *= k
        return o

    @property
    def pi0_zmx_order(self):
        return self.order * self.stabilizer.order

    @cached_property
    def a_x(self):
        G = cyclic_group(1)
        for fc in self.cls.parts:
            G = direct_product(G, _factor_component_group(fc))
        return G


def rho_labels(c):
    combos = [()]
    for fc in c.parts:
        combos = [r + (x,) for r in combos for x in factor_rho_labels(fc)]
    return combos


def component_group(M, c):
    M = as_levi(M)
    P = M.pi0_group
    stab = [g for g in range(P.order) if transport_pair(M, P.parent[g], c, None)[0] == c]
    return ComponentGroupData(c, tuple(factor_component_order(fc) for fc in c.parts),
                              rho_labels(c), P.subgroup(stab))


# ------------------------------------------------------------ t_q

@dataclass(frozen=True)
class FormalPoint:
    """The point t * h(q^{1/2}): a torsion part and an exponent of q."""
    t: TorusPoint
    exponent: tuple         # h / 2 in X_* (x) Q

    def character_value(self, lam):
        """lam(t_q) as (phase in Q/Z, exponent of q)."""
        e = sum(Fraction(a) * b for a, b in zip(lam, self.exponent))
        return self.t.pair(lam), e

    def evaluate(self, lam, q):
        """lam(t_q) at a numeric q, as a complex number."""
        import cmath
        phase, e = self.character_value(lam)
        return cmath.exp(2j * cmath.pi * float(phase)) * float(q) ** float(e)


def t_q_point(M, t, c):
    M = as_levi(M)
    wd = weighted_dynkin(M, c)
    fp = FormalPoint(t, tuple(x / 2 for x in wd.cocharacter))
    # x lives in the degree-2 part: alpha(t_q) = q there
    for a in M.positive:
        if wd.pair(M.rd.roots[a]) == 2:
            ph, e = fp.character_value(M.rd.roots[a])
            if ph != 0 or e != 1:
                raise AssertionError("t_q relation fails")
    return fp


def levi_of(rd, t=None):
    """M = Z(t) for a torus point, or the whole group when t is omitted."""
    return PseudoLevi(rd, () if t is None else (t,))


__all__ = [
    "FactorClass", "UnipotentClass", "WeightedDynkin", "ComponentGroupData", "FormalPoint",
    "UnsupportedType", "factor_classes", "factor_diagram", "factor_dim", "partition_dim",
    "factor_leq", "factor_rho_labels", "enumerate_unipotent_classes", "closure_order",
    "weighted_dynkin", "dim_from_cocharacter", "component_group", "t_q_point", "transport_pair",
    "pi0_action_on_classes", "conjugate_pair", "align_weyl", "saturate", "class_from_cocharacter",
    "dominant_for", "centralizer_torus_rank", "factor_centralizer_rank", "make_class", "parse_class", "parse_factor_class",
    "trivial_class", "regular_class", "rho_labels", "rho_str", "parse_rho",
    "partitions_of", "transpose", "as_levi", "levi_of", "identity_point",
]
