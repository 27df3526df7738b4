"""Finite-order points of the complex torus T, stabilizers and pseudo-Levi subgroups.

A point is a rational vector v in X_*(T) (x) Q read modulo X_*(T); the character
alpha takes the value exp(2 pi i <alpha, v>) on it.  Weyl elements act through
their matrices on X_*.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd

import numpy as np
import sympy

from .fingrp import FiniteGroup
from .intmat import lattice_basis, rat_inverse, smith
from .rootdata import generate_weyl


def _lcm(a, b):
    return a * b // gcd(a, b)


@dataclass(frozen=True)
class TorusPoint:
    v: tuple

    @classmethod
    def from_cochar(cls, v):
        out = []
        for x in v:
            x = Fraction(x)
            out.append(x - (x.numerator // x.denominator))
        return cls(tuple(out))

    @property
    def rank(self):
        return len(self.v)

    @property
    def order(self):
        d = 1
        for x in self.v:
            d = _lcm(d, x.denominator)
        return d

    def scaled(self):
        """(D, integer vector D*v) with D the order."""
        d = self.order
        return d, np.array([int(x * d) for x in self.v], dtype=np.int64)

    def __add__(self, other):
        return TorusPoint.from_cochar([a + b for a, b in zip(self.v, other.v)])

    def __neg__(self):
        return TorusPoint.from_cochar([-a for a in self.v])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k):
        return TorusPoint.from_cochar([a * k for a in self.v])

    def pair(self, lam):
        """<lam, v> mod 1 for a character lam."""
        x = sum(Fraction(a) * b for a, b in zip(lam, self.v))
        return x - (x.numerator // x.denominator)

    def is_identity(self):
        return all(x == 0 for x in self.v)

    def __repr__(self):
        return "T(" + ", ".join(str(x) for x in self.v) + ")"


def identity_point(rank):
    return TorusPoint(tuple(Fraction(0) for _ in range(rank)))


def point_from_coweights(rd, mu):
    """Point with <alpha_i, v> = mu_i for the simple roots alpha_i."""
    if len(mu) != rd.rank:
        raise ValueError("coweight vector has the wrong length")
    ainv = rat_inverse(rd.simple_root_matrix)
    v = [sum(ainv[i][j] * Fraction(mu[j]) for j in range(rd.rank)) for i in range(rd.rank)]
    return TorusPoint.from_cochar(v)


def coweight_coords(rd, t):
    return tuple(t.pair(a) for a in rd.simple_root_matrix)


def act(W, w, t):
    """w . t through the matrix of w on X_*."""
    m = W.comatrices[w]
    return TorusPoint.from_cochar([sum(int(m[i][j]) * t.v[j] for j in range(len(t.v)))
                                   for i in range(len(t.v))])


def act_many(W, t, elements=None):
    """Scaled images D*(w.v) mod D for the given elements (all of W by default)."""
    d, V = t.scaled()
    mats = W.comatrices if elements is None else W.comatrices[list(elements)]
    return d, (mats @ V) % d


def canonical_key(t):
    return t.v


# ------------------------------------------------------------ finite subgroups

@dataclass(frozen=True)
class FiniteTorusSubgroup:
    generators: tuple

    @classmethod
    def of(cls, points):
        return cls(tuple(points))

    @property
    def rank(self):
        return self.generators[0].rank if self.generators else 0

    def elements(self, rank=None):
        rank = rank if rank is not None else self.rank
        seen = {identity_point(rank)}
        todo = list(seen)
        while todo:
            x = todo.pop()
            for g in self.generators:
                y = x + g
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        return sorted(seen, key=lambda p: p.v)

    def invariant_factors(self):
        """Invariant factors of the abstract group, by Smith normal form."""
        if not self.generators:
            return []
        r = self.rank
        d = 1
        for g in self.generators:
            d = _lcm(d, g.order)
        rows = [[int(x * d) for x in g.v] for g in self.generators]
        rows += [[d if i == j else 0 for j in range(r)] for i in range(r)]
        basis = lattice_basis(rows, r)             # d * L in standard coordinates
        binv = rat_inverse(basis)
        # coordinates of d*Z^r in the basis of d*L
        K = [[int(sum(Fraction(d if i == k else 0) * binv[k][j] for k in range(r)))
              for j in range(r)] for i in range(r)]
        diag, _, _ = smith(K)
        return sorted(abs(x) for x in diag if abs(x) > 1)

    def order(self):
        n = 1
        for f in self.invariant_factors():
            n *= f
        return n


def _as_subgroup(c_s):
    if isinstance(c_s, FiniteTorusSubgroup):
        return c_s
    if isinstance(c_s, TorusPoint):
        return FiniteTorusSubgroup((c_s,))
    return FiniteTorusSubgroup(tuple(c_s))


# ------------------------------------------------------------ pseudo-Levi data

def identify_factors(rd, simple):
    """Split a simple system into irreducible factors with Bourbaki ordering.

    Returns a list of (letter, n, ordered root indices).
    """
    k = len(simple)
    C = [[rd.pairing(rd.roots[simple[j]], rd.coroots[simple[i]]) for j in range(k)]
         for i in range(k)]
    adj = {i: [j for j in range(k) if j != i and C[i][j]] for i in range(k)}
    seen = set()
    comps = []
    for i in range(k):
        if i in seen:
            continue
        comp, todo = [], [i]
        seen.add(i)
        while todo:
            x = todo.pop()
            comp.append(x)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        comps.append(sorted(comp))
    out = []
    for comp in comps:
        n = len(comp)
        idx = [simple[i] for i in comp]
        if n == 1:
            out.append(("A", 1, (simple[comp[0]],)))
            continue
        bonds = {(i, j): C[i][j] * C[j][i] for i in comp for j in adj[i]}
        if 3 in bonds.values():
            a, b = comp
            short, long_ = (a, b) if C[a][b] == -3 else (b, a)
            out.append(("G", 2, (simple[short], simple[long_])))
            continue
        branch = [i for i in comp if len(adj[i]) == 3]
        ends = [i for i in comp if len(adj[i]) == 1]
        if branch:
            b = branch[0]
            arms = []
            for nb in adj[b]:
                arm, prev, cur = [nb], b, nb
                while True:
                    nxt = [y for y in adj[cur] if y != prev]
                    if not nxt:
                        break
                    prev, cur = cur, nxt[0]
                    arm.append(cur)
                arms.append(arm)
            arms.sort(key=lambda a: (-len(a), [simple[x] for x in a]))
            tail, leaf1, leaf2 = arms
            if len(leaf1) != 1 or len(leaf2) != 1:
                raise ValueError("unsupported branched diagram")
            order = list(reversed(tail)) + [b, leaf1[0], leaf2[0]]
            out.append(("D", n, tuple(simple[i] for i in order)))
            continue
        # a path
        def walk(start):
            path, prev, cur = [start], None, start
            while True:
                nxt = [y for y in adj[cur] if y != prev]
                if not nxt:
                    return path
                prev, cur = cur, nxt[0]
                path.append(cur)
        doubles = [e for e, m in bonds.items() if m == 2]
        if doubles:
            if n == 2:
                a, b = comp
                short, long_ = (a, b) if C[a][b] == -2 else (b, a)
                out.append(("C", 2, (simple[short], simple[long_])))
                continue
            # put the double bond at the end of the path
            for start in ends:
                path = walk(start)
                if bonds[(path[-2], path[-1])] == 2:
                    break
            last, prev = path[-1], path[-2]
            letter = "B" if C[last][prev] == -2 else "C"
            out.append((letter, n, tuple(simple[i] for i in path)))
            continue
        paths = [walk(s) for s in ends]
        path = min(paths, key=lambda p: [simple[i] for i in p])
        out.append(("A", n, tuple(simple[i] for i in path)))
    # a factor of G itself keeps G's own label and ordering
    own = {frozenset(rd.simple_indices[i] for i in idx): (l, n, tuple(rd.simple_indices[i] for i in idx))
           for l, n, idx in rd.factors}
    out = [own.get(frozenset(f[2]), f) for f in out]
    out.sort(key=lambda f: ("ABCDG".index(f[0]), -f[1], f[2]))
    return out


def _type_label(factors):
    return "x".join(f"{l}{n}" for l, n, _ in factors) if factors else "T"


class PseudoLevi:
    """Centralizer data M = Z_G(A) of a finite subgroup A of T."""

    def __init__(self, rd, generators):
        self.rd = rd
        self.W = generate_weyl(rd)
        self.generators = tuple(generators)
        W = self.W
        n = W.order
        ok = np.ones(n, dtype=bool)
        integral = np.ones(len(rd.roots), dtype=bool)
        for t in self.generators:
            d, V = t.scaled()
            if d == 1:
                continue
            diff = (W.comatrices @ V - V) % d
            ok &= ~diff.any(axis=1)
            integral &= (rd.root_array @ V) % d == 0
        self.WA = [int(i) for i in np.nonzero(ok)[0]]
        self.roots = tuple(int(i) for i in np.nonzero(integral)[0])
        npos = rd.npos
        self.positive = tuple(i for i in self.roots if i < npos)
        pos_set = set(self.positive)
        coords = {rd.root_coords[i]: i for i in self.positive}
        simple = []
        for b in self.positive:
            cb = rd.root_coords[b]
            dec = False
            for g in self.positive:
                if g == b:
                    continue
                diff = tuple(x - y for x, y in zip(cb, rd.root_coords[g]))
                if diff in coords:
                    dec = True
                    break
            if not dec:
                simple.append(b)
        self.simple = tuple(simple)
        self.factors = identify_factors(rd, self.simple)
        self.type_label = _type_label(self.factors)
        # W^{M°}: closure of the simple reflections of the subsystem
        gens = [W.reflection(a) for a in self.simple]
        self.m0_generators = gens
        elems = {0}
        todo = [0]
        while todo:
            x = todo.pop()
            for g in gens:
                y = W.mul(g, x)
                if y not in elems:
                    elems.add(y)
                    todo.append(y)
        self.WM0 = sorted(elems)
        # splitting: elements of W_A preserving the positive system
        pos_mask = np.zeros(len(rd.roots), dtype=bool)
        pos_mask[list(pos_set)] = True
        perms = W.perms[self.WA]
        pres = pos_mask[perms[:, list(self.positive)]].all(axis=1) if self.positive else \
            np.ones(len(self.WA), dtype=bool)
        self.pi0 = [w for w, keep in zip(self.WA, pres) if keep]
        if len(self.WA) != len(self.WM0) * len(self.pi0):
            raise RuntimeError("W_A is not W^{M°} x| pi0")
        wa = set(self.WA)
        if not elems <= wa:
            raise RuntimeError("W^{M°} is not inside the stabilizer")

    @property
    def is_connected(self):
        return len(self.pi0) == 1

    @cached_property
    def _positive_system_index(self):
        out = {}
        pos = list(self.positive)
        for u in self.WM0:
            out[tuple(sorted(self.W.perms[u][pos].tolist()))] = u
        return out

    def decompose(self, w):
        """w = u * s with u in W^{M°} and s in the splitting image."""
        W = self.W
        key = tuple(sorted(W.perms[w][list(self.positive)].tolist()))
        u = self._positive_system_index[key]
        s = W.mul(W.inv(u), w)
        return u, s

    def pi0_action_on_simple(self, s):
        """Permutation of self.simple induced by a splitting element."""
        img = self.W.perms[s][list(self.simple)]
        pos = {a: k for k, a in enumerate(self.simple)}
        return tuple(pos[int(a)] for a in img)

    def splitting_is_multiplicative(self):
        p = set(self.pi0)
        return all(self.W.mul(a, b) in p for a in self.pi0 for b in self.pi0)

    def _group(self, elements, gens):
        W = self.W
        G = FiniteGroup(W.perms[elements], name="", generators=None)
        G.parent = list(elements)
        pos = {e: k for k, e in enumerate(elements)}
        G.parent_pos = pos
        G._generators = [pos[g] for g in gens] if gens else None
        if not gens:
            G._generators = [] if len(elements) == 1 else None
        return G

    @cached_property
    def WA_group(self):
        gens = list(self.m0_generators) + self.pi0_generators
        return self._group(self.WA, gens)

    @cached_property
    def WM0_group(self):
        return self._group(self.WM0, list(self.m0_generators))

    @cached_property
    def pi0_group(self):
        return self._group(self.pi0, self.pi0_generators)

    @cached_property
    def pi0_generators(self):
        W = self.W
        gens, span = [], {0}
        for s in self.pi0:
            if s in span:
                continue
            gens.append(s)
            todo = list(span)
            while todo:
                x = todo.pop()
                for g in gens:
                    y = W.mul(g, x)
                    if y not in span:
                        span.add(y)
                        todo.append(y)
        return gens

    def describe(self):
        pi = self.pi0_group
        if pi.order == 1:
            return f"W({self.type_label})"
        inv = _abelian_invariants(pi)
        name = "x".join(f"Z/{k}" for k in inv) if inv else f"order {pi.order}"
        if not self.roots:
            return name
        return f"W({self.type_label}) x| {name}"

    def __repr__(self):
        return f"PseudoLevi({self.type_label}, |W_A|={len(self.WA)}, |pi0|={len(self.pi0)})"


def _abelian_invariants(G):
    """Invariant factors of an abelian group, or None when G is not abelian."""
    if not G.is_abelian():
        return None
    primary = []
    for p in sympy.primefactors(G.order):
        # s_k = log_p #{x : x^(p^k) = 1}; differences give the conjugate partition
        sizes = [0]
        k = 1
        while True:
            cnt = sum(1 for o in G.orders if (p ** k) % o == 0)
            sizes.append(sympy.multiplicity(p, cnt))
            if cnt == p ** sympy.multiplicity(p, G.order):
                break
            k += 1
        conj = [sizes[i + 1] - sizes[i] for i in range(len(sizes) - 1)]
        parts = [sum(1 for c in conj if c > j) for j in range(conj[0])] if conj else []
        primary.append([p ** e for e in parts])
    inv = []
    while any(primary):
        f = 1
        for lst in primary:
            if lst:
                f *= lst.pop(0)
        inv.append(f)
    return sorted(inv)


def stabilizer(rd, t):
    return PseudoLevi(rd, (t,))


def pseudo_levi(rd, A):
    A = _as_subgroup(A)
    return PseudoLevi(rd, A.generators)


# ------------------------------------------------------------ Bernstein data

@dataclass
class BernsteinData:
    rd: object
    c_s: FiniteTorusSubgroup
    H: PseudoLevi

    @property
    def Ws(self):
        return self.H.WA

    @property
    def Ws_group(self):
        return self.H.WA_group

    @property
    def connected(self):
        return self.H.is_connected


def bernstein_data(rd, c_s):
    A = _as_subgroup(c_s)
    return BernsteinData(rd=rd, c_s=A, H=PseudoLevi(rd, A.generators))


# ------------------------------------------------------------ residual characteristic

def condition_holds(letter, n, p):
    letter = letter.upper()
    if letter == "A":
        return p > n + 1
    if letter in "BCD":
        return p != 2
    if letter == "F":
        return p not in (2, 3)
    if letter == "G" or (letter == "E" and n == 6):
        return p not in (2, 3, 5)
    if letter == "E":
        return p not in (2, 3, 5, 7)
    raise ValueError(f"unknown type {letter}{n}")


@dataclass
class ConditionReport:
    p: int
    ok: bool
    factors: list           # (label, passes)

    def __bool__(self):
        return self.ok


def check_condition_char(rd_or_label, p):
    if not sympy.isprime(p):
        raise ValueError(f"{p} is not prime")
    if isinstance(rd_or_label, str):
        import re
        parts = [x for x in re.split(r"[x×*\s]+", rd_or_label.strip()) if x]
        facs = []
        for x in parts:
            m = re.fullmatch(r"([A-Ga-g])(\d+)", x)
            if not m:
                raise ValueError(f"cannot parse {x!r}")
            facs.append((m.group(1).upper(), int(m.group(2))))
    else:
        facs = [(l, n) for l, n, _ in rd_or_label.factors]
    rep = [(f"{l}{n}", condition_holds(l, n, p)) for l, n in facs]
    return ConditionReport(p=p, ok=all(x for _, x in rep), factors=rep)


@dataclass
class ConnectednessHint:
    connected: bool
    sc_criterion_applies: bool
    derived_simply_connected: bool
    condition_ok: bool
    prime_to_p_cyclic: bool


def connectedness_hint(rd, c_s, p=None):
    """Computed connectedness of H next to the sufficient criterion.

    The criterion needs a simply connected derived group, the condition on p,
    and the prime-to-p part of the image of c^s cyclic.  Without p the whole
    image must be cyclic.
    """
    A = _as_subgroup(c_s)
    H = PseudoLevi(rd, A.generators)
    inv = A.invariant_factors()
    if p is None:
        cond = True
        coprime = inv
    else:
        cond = bool(check_condition_char(rd, p))
        coprime = []
        for f in inv:
            while f % p == 0:
                f //= p
            if f > 1:
                coprime.append(f)
    cyclic = len(coprime) <= 1
    applies = rd.derived_simply_connected and cond and cyclic
    hint = ConnectednessHint(connected=H.is_connected, sc_criterion_applies=applies,
                             derived_simply_connected=rd.derived_simply_connected,
                             condition_ok=cond, prime_to_p_cyclic=cyclic)
    if applies and not hint.connected:
        raise AssertionError("connectedness criterion applies but H is disconnected")
    return hint


# ------------------------------------------------------------ fixed components

@dataclass(frozen=True)
class FixedComponent:
    w: int
    base: TorusPoint
    label: tuple            # torsion coordinates k_i/d_i mod 1
    dim: int
    directions: tuple       # integer vectors spanning the identity component
    _tinv: tuple = field(repr=False, compare=False, default=())
    _diag: tuple = field(repr=False, compare=False, default=())

    def contains(self, t):
        u = [sum(Fraction(self._tinv[i][j]) * t.v[j] for j in range(len(t.v)))
             for i in range(len(t.v))]
        for i, d in enumerate(self._diag):
            if d:
                if (u[i] - self.label[i]) % 1 != 0:
                    return False
        return True

    def generic_point(self, prime=10007):
        """A point of the component with coordinates of large prime denominator."""
        v = list(self.base.v)
        for k, n in enumerate(self.directions):
            x = Fraction(3 ** (k + 1) + 7 * k + 1, prime)
            v = [a + x * b for a, b in zip(v, n)]
        return TorusPoint.from_cochar(v)


def fixed_components(W, w):
    """Connected components of T^w, via the Smith form of 1 - w on X_*."""
    r = W.rd.rank
    M = np.eye(r, dtype=np.int64) - W.comatrices[w]
    diag, S, Tm = smith(M.tolist())
    diag = list(diag) + [0] * (r - len(diag))
    # M = S^-1 D T^-1 ; T^w = {v : D (T^-1 v) integral}
    Tm = np.array(Tm, dtype=np.int64)
    tinv = rat_inverse(Tm.tolist())
    tinv = tuple(tuple(int(x) for x in row) for row in tinv)
    directions = tuple(tuple(int(x) for x in Tm[:, i]) for i in range(r) if diag[i] == 0)
    ranges = [range(abs(d)) if d else range(1) for d in diag]
    out = []
    import itertools
    for ks in itertools.product(*ranges):
        label = tuple(Fraction(k, abs(d)) if d else Fraction(0) for k, d in zip(ks, diag))
        v = [sum(int(Tm[i][j]) * label[j] for j in range(r)) for i in range(r)]
        base = TorusPoint.from_cochar(v)
        out.append(FixedComponent(w=w, base=base, label=label, dim=len(directions),
                                  directions=directions, _tinv=tinv, _diag=tuple(diag)))
    return out


def torsion_order(W, w):
    r = W.rd.rank
    M = np.eye(r, dtype=np.int64) - W.comatrices[w]
    diag, _, _ = smith(M.tolist())
    n = 1
    for d in diag:
        if d:
            n *= abs(d)
    return n


# ------------------------------------------------------------ grids

def torus_grid(rank, bound):
    """All points of order <= bound (each coordinate in (1/m)Z/Z for some m <= bound)."""
    import itertools
    seen = set()
    out = []
    for m in range(1, bound + 1):
        for ks in itertools.product(range(m), repeat=rank):
            t = TorusPoint.from_cochar([Fraction(k, m) for k in ks])
            if t.order == m and t not in seen:
                seen.add(t)
                out.append(t)
    return out


def generic_point(rd, group_elements=None, prime=10007):
    """A point with no integral roots and trivial stabilizer in the given elements."""
    W = generate_weyl(rd)
    elements = group_elements if group_elements is not None else range(W.order)
    p = prime
    while True:
        t = TorusPoint.from_cochar([Fraction(5 ** (i + 1) + i, p) for i in range(rd.rank)])
        d, V = t.scaled()
        if not ((rd.root_array @ V) % d == 0).any():
            imgs = (W.comatrices[list(elements)] @ V - V) % d
            if sum(1 for row in imgs if not row.any()) == 1:
                return t
        p = int(sympy.nextprime(p))
