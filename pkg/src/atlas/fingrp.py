"""Finite groups as permutation groups, exact character tables, Clifford theory.

Every group is stored as an array of permutations (one row per element) with the
composition convention ``(g*h)(x) = g(h(x))``.  Character tables are computed
with the Dixon-Schneider method modulo a suitable prime and lifted to exact
cyclotomic values.
"""
import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np
import sympy
from sympy import GF
from sympy.polys.matrices import DomainMatrix

from .cyclotomic import Cyc

MAX_GROUP_ORDER = 10 ** 6
MAX_TABLE_ORDER = 20000


class GroupError(ValueError):
    pass


class FiniteGroup:
    """A finite group given by a faithful permutation representation."""

    def __init__(self, perms, name="", generators=None):
        perms = np.asarray(perms)
        if perms.ndim != 2:
            raise GroupError("perms must be a 2-d array")
        if len(perms) > MAX_GROUP_ORDER:
            raise GroupError(f"group order exceeds {MAX_GROUP_ORDER}")
        dt = np.int16 if perms.shape[1] < 30000 else np.int32
        self.perms = perms.astype(dt)
        self.name = name
        self.order = len(perms)
        self.degree = perms.shape[1]
        self.index = {p.tobytes(): i for i, p in enumerate(self.perms)}
        if len(self.index) != self.order:
            raise GroupError("repeated elements")
        ident = np.arange(self.degree, dtype=dt).tobytes()
        if ident not in self.index:
            raise GroupError("identity missing")
        self.identity = self.index[ident]
        self._generators = list(generators) if generators is not None else None

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"FiniteGroup({self.name or '?'}, order={self.order})"

    # ------------------------------------------------------------ basic ops
    @classmethod
    def from_generators(cls, gens, name="", degree=None):
        gens = [np.asarray(g) for g in gens]
        if degree is None:
            degree = len(gens[0]) if gens else 1
        ident = np.arange(degree)
        if not gens:
            return cls([ident], name=name, generators=[])
        perms, seen = _closure(gens, degree)
        g = cls(perms, name=name)
        g._generators = [g.lookup(x) for x in gens]
        return g

    @classmethod
    def from_table(cls, table, name=""):
        """Left regular representation of a multiplication table."""
        t = np.asarray(table)
        n = len(t)
        if t.shape != (n, n):
            raise GroupError("table must be square")
        for row in t:
            if sorted(row.tolist()) != list(range(n)):
                raise GroupError("table row is not a permutation")
        g = cls(t, name=name)
        # associativity: left multiplication must compose as the table says
        for a in range(n):
            for b in range(n):
                if not np.array_equal(t[a][t[b]], t[t[a][b]]):
                    raise GroupError("table is not associative")
        return g

    def lookup(self, perm):
        return self.index[np.asarray(perm, dtype=self.perms.dtype).tobytes()]

    def mul(self, i, j):
        return self.index[self.perms[i][self.perms[j]].tobytes()]

    def inv(self, i):
        return self._inverses[i]

    @cached_property
    def _inverses(self):
        inv = np.argsort(self.perms, axis=1).astype(self.perms.dtype)
        return [self.index[r.tobytes()] for r in inv]

    def conj(self, g, x):
        """g x g^-1."""
        return self.mul(self.mul(g, x), self.inv(g))

    def element_order(self, i):
        return self.orders[i]

    @cached_property
    def orders(self):
        out = []
        ident = self.perms[self.identity]
        for p in self.perms:
            k, q = 1, p
            while not np.array_equal(q, ident):
                q = p[q]
                k += 1
            out.append(k)
        return out

    @cached_property
    def exponent(self):
        e = 1
        for o in set(self.orders):
            e = e * o // math.gcd(e, o)
        return e

    def power(self, i, k):
        k %= self.orders[i]
        r = self.identity
        base = i
        while k:
            if k & 1:
                r = self.mul(r, base)
            base = self.mul(base, base)
            k >>= 1
        return r

    @property
    def generators(self):
        if self._generators is None:
            self._generators = _greedy_generators(self)
        return self._generators

    @cached_property
    def table(self):
        if self.order > MAX_TABLE_ORDER:
            raise GroupError("group too large for a multiplication table")
        t = np.empty((self.order, self.order), dtype=np.int32)
        for i in range(self.order):
            prods = self.perms[i][self.perms]
            t[i] = [self.index[r.tobytes()] for r in prods]
        return t

    def is_abelian(self):
        gens = self.generators
        return all(self.mul(a, b) == self.mul(b, a) for a in gens for b in gens)

    def subgroup(self, elements, name=""):
        """Subgroup on the given parent indices; ``parent`` maps back."""
        elements = sorted(set(int(e) for e in elements))
        sub = FiniteGroup(self.perms[elements], name=name)
        sub.parent = elements
        sub.parent_group = self
        sub.parent_pos = {e: k for k, e in enumerate(elements)}
        return sub

    def check_axioms(self, samples=50, seed=0):
        """Spot-check associativity and inverses on random triples."""
        rng = random.Random(seed)
        n = self.order
        for _ in range(samples):
            a, b, c = (rng.randrange(n) for _ in range(3))
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)):
                return False
            if self.mul(a, self.inv(a)) != self.identity:
                return False
        return True

    # --------------------------------------------------------------- classes
    @cached_property
    def classes(self):
        return conjugacy_classes(self)

    @cached_property
    def class_of(self):
        cm = [0] * self.order
        for k, c in enumerate(self.classes):
            for e in c.elements:
                cm[e] = k
        return cm

    @cached_property
    def character_table(self):
        return character_table(self)


def _closure(gens, degree):
    dt = np.int16 if degree < 30000 else np.int32
    gens = [np.asarray(g, dtype=dt) for g in gens]
    ident = np.arange(degree, dtype=dt)
    seen = {ident.tobytes()}
    out = [ident]
    frontier = [ident]
    while frontier:
        new = []
        for g in gens:
            for row in frontier:
                c = g[row]
                k = c.tobytes()
                if k not in seen:
                    seen.add(k)
                    new.append(c)
                    out.append(c)
                    if len(out) > MAX_GROUP_ORDER:
                        raise GroupError(f"group order exceeds {MAX_GROUP_ORDER}")
        frontier = new
    return np.array(out), seen


def _greedy_generators(G):
    gens = []
    span = {G.identity}
    for i in range(G.order):
        if i in span:
            continue
        gens.append(i)
        # closure of span under the new generator set
        frontier = list(span)
        span = set(span)
        todo = list(frontier)
        while todo:
            x = todo.pop()
            for s in gens:
                y = G.mul(s, x)
                if y not in span:
                    span.add(y)
                    todo.append(y)
        if len(span) == G.order:
            break
    return gens


# ------------------------------------------------------------ constructors

def cyclic_group(n):
    return FiniteGroup.from_generators([np.roll(np.arange(n), 1)], name=f"Z{n}", degree=n)


def symmetric_group(n):
    gens = []
    if n > 1:
        gens.append([1, 0] + list(range(2, n)))
    if n > 2:
        gens.append(list(range(1, n)) + [0])
    return FiniteGroup.from_generators(gens, name=f"S{n}", degree=n)


def alternating_group(n):
    gens = []
    for k in range(2, n):
        p = list(range(n))
        p[0], p[1], p[k] = p[1], p[k], p[0]
        gens.append(p)
    return FiniteGroup.from_generators(gens, name=f"A{n}", degree=n)


def dihedral_group(n):
    """Symmetries of an n-gon, order 2n."""
    r = [(i + 1) % n for i in range(n)]
    s = [(-i) % n for i in range(n)]
    return FiniteGroup.from_generators([r, s], name=f"D{2 * n}", degree=n)


def quaternion_group():
    # left regular action on the 8 elements +-1, +-i, +-j, +-k
    names = ["1", "i", "j", "k"]
    mult = {("1", x): (1, x) for x in names}
    mult.update({(x, "1"): (1, x) for x in names})
    mult.update({("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"), ("k", "k"): (-1, "1"),
                 ("i", "j"): (1, "k"), ("j", "k"): (1, "i"), ("k", "i"): (1, "j"),
                 ("j", "i"): (-1, "k"), ("k", "j"): (-1, "i"), ("i", "k"): (-1, "j")})
    elems = [(s, x) for s in (1, -1) for x in names]
    pos = {e: k for k, e in enumerate(elems)}
    table = []
    for (s1, a) in elems:
        row = []
        for (s2, b) in elems:
            s3, c = mult[(a, b)]
            row.append(pos[(s1 * s2 * s3, c)])
        table.append(row)
    return FiniteGroup.from_table(table, name="Q8")


def matrix_group(mats, p, name=""):
    """Group generated by invertible matrices over F_p, acting on F_p^k."""
    k = len(mats[0])
    vecs = list(itertools.product(range(p), repeat=k))
    pos = {v: i for i, v in enumerate(vecs)}
    gens = []
    for m in mats:
        perm = []
        for v in vecs:
            w = tuple(sum(m[i][j] * v[j] for j in range(k)) % p for i in range(k))
            perm.append(pos[w])
        gens.append(perm)
    return FiniteGroup.from_generators(gens, name=name, degree=len(vecs))


def translation_group(p, k):
    """(Z/p)^k acting on F_p^k by translations."""
    vecs = list(itertools.product(range(p), repeat=k))
    pos = {v: i for i, v in enumerate(vecs)}
    gens = []
    for i in range(k):
        e = [0] * k
        e[i] = 1
        gens.append([pos[tuple((v[j] + e[j]) % p for j in range(k))] for v in vecs])
    return FiniteGroup.from_generators(gens, name=f"({p})^{k}", degree=len(vecs))


# ------------------------------------------------------ homomorphisms

def _words(G):
    """For each element a word in G.generators (as generator positions)."""
    gens = G.generators
    words = {G.identity: ()}
    todo = [G.identity]
    while todo:
        nxt = []
        for x in todo:
            for k, s in enumerate(gens):
                y = G.mul(s, x)
                if y not in words:
                    words[y] = (k,) + words[x]
                    nxt.append(y)
        todo = nxt
    return words


def hom_from_images(G, images, compose, identity):
    """Extend generator images to a map on G; checks it is a homomorphism.

    ``compose(a, b)`` multiplies targets; returns a list indexed by G elements.
    """
    gens = G.generators
    if len(images) != len(gens):
        raise GroupError("one image per generator required")
    words = _words(G)
    out = [None] * G.order
    for x, w in words.items():
        v = identity
        for k in reversed(w):
            v = compose(images[k], v)
        out[x] = v
    for k, s in enumerate(gens):
        for x in range(G.order):
            if out[G.mul(s, x)] != compose(images[k], out[x]):
                raise GroupError("generator images do not define a homomorphism")
    return out


def automorphism_action(N, Gamma, images):
    """Action Gamma -> Aut(N) from automorphisms of N given on Gamma's generators.

    Each image is a tuple mapping N-indices to N-indices.  Returns a list over
    Gamma elements and verifies both multiplicativity conditions.
    """
    images = [tuple(int(x) for x in im) for im in images]
    for im in images:
        check_automorphism(N, im)

    def compose(a, b):
        return tuple(a[x] for x in b)

    return hom_from_images(Gamma, images, compose, tuple(range(N.order)))


def check_automorphism(N, phi):
    if sorted(phi) != list(range(N.order)):
        raise GroupError("action is not a bijection of N")
    for s in N.generators:
        for b in range(N.order):
            if phi[N.mul(s, b)] != N.mul(phi[s], phi[b]):
                raise GroupError("action is not multiplicative")
    return True


def normalizer_action(N, Gamma):
    """Conjugation action of a permutation group Gamma normalizing N (same degree)."""
    if N.degree != Gamma.degree:
        raise GroupError("degree mismatch")
    out = []
    for g in range(Gamma.order):
        p = Gamma.perms[g]
        pinv = np.argsort(p)
        try:
            out.append(tuple(N.lookup(p[N.perms[a][pinv]]) for a in range(N.order)))
        except KeyError:
            raise GroupError("Gamma does not normalize N")
    for phi in out:
        check_automorphism(N, phi)
    return out


def trivial_action(N, Gamma):
    return [tuple(range(N.order))] * Gamma.order


def inner_automorphism(N, g):
    return tuple(N.conj(g, a) for a in range(N.order))


def check_action(N, Gamma, action):
    """Verify that a list over Gamma is a homomorphism into Aut(N)."""
    if len(action) != Gamma.order:
        raise GroupError("action must list one automorphism per element")
    for phi in action:
        check_automorphism(N, phi)
    for s in Gamma.generators:
        for g in range(Gamma.order):
            sg = Gamma.mul(s, g)
            if tuple(action[s][x] for x in action[g]) != tuple(action[sg]):
                raise GroupError("action is not multiplicative")
    return True


def semidirect_product(N, Gamma, action, name=""):
    """N x| Gamma; element (a, g) has index g*|N| + a."""
    check_action(N, Gamma, action)
    n, m = N.order, Gamma.order
    tN = N.table
    tG = Gamma.table
    perms = np.empty((n * m, n + m), dtype=np.int32)
    for g in range(m):
        phi = np.asarray(action[g])
        for a in range(n):
            # x in N -> a * phi_g(x); delta in Gamma -> g delta
            perms[g * n + a, :n] = tN[a][phi]
            perms[g * n + a, n:] = n + tG[g]
    G = FiniteGroup(perms, name=name or f"{N.name}x|{Gamma.name}")
    G.normal_part = list(range(n))
    G.complement = [g * n for g in range(m)]
    return G


def direct_product(G, H):
    return semidirect_product(G, H, trivial_action(G, H), name=f"{G.name}x{H.name}")


def is_isomorphic(G, H):
    """Brute-force isomorphism test for small groups."""
    if G.order != H.order or sorted(G.orders) != sorted(H.orders):
        return False
    if len(G.classes) != len(H.classes):
        return False
    gens = G.generators
    cands = [[h for h in range(H.order) if H.orders[h] == G.orders[g]] for g in gens]

    def compose(a, b):
        return H.mul(a, b)

    for imgs in itertools.product(*cands):
        try:
            f = hom_from_images(G, list(imgs), compose, H.identity)
        except GroupError:
            continue
        if len(set(f)) == H.order:
            return True
    return False


# ------------------------------------------------------ conjugacy classes

@dataclass(frozen=True)
class ConjClass:
    rep: int
    elements: tuple
    size: int
    order: int


def conjugacy_classes(G):
    """Conjugacy classes ordered by (element order, size, lexicographic rep)."""
    n = G.order
    gens = G.generators
    label = np.full(n, -1, dtype=np.int64)
    perms = G.perms
    # conjugation images of all elements by each generator, vectorised
    conj_maps = []
    for s in gens:
        p = perms[s]
        pinv = np.argsort(p)
        imgs = p[perms[:, pinv]]
        conj_maps.append(np.array([G.index[r.tobytes()] for r in imgs], dtype=np.int64))
    raw = []
    for x in range(n):
        if label[x] >= 0:
            continue
        k = len(raw)
        label[x] = k
        members = [x]
        todo = [x]
        while todo:
            y = todo.pop()
            for cm in conj_maps:
                z = int(cm[y])
                if label[z] < 0:
                    label[z] = k
                    members.append(z)
                    todo.append(z)
        raw.append(members)
    lex_rank = np.empty(n, dtype=np.int64)
    lex_rank[np.lexsort(perms.T[::-1])] = np.arange(n)
    out = []
    for members in raw:
        rep = min(members, key=lambda e: lex_rank[e])
        if n % len(members):
            raise GroupError("class size does not divide the group order")
        out.append(ConjClass(rep=int(rep), elements=tuple(sorted(members)),
                             size=len(members), order=G.orders[rep]))
    out.sort(key=lambda c: (c.order, c.size, int(lex_rank[c.rep])))
    return out


# ------------------------------------------------------ character tables

@dataclass
class CharacterTable:
    group: FiniteGroup
    classes: list
    chars: list          # chars[i][k] = value of irreducible i on class k (Cyc)
    exponent: int

    @property
    def degrees(self):
        return [int(ch[0].to_fraction()) for ch in self.chars]

    def __len__(self):
        return len(self.chars)

    def value(self, i, g):
        return self.chars[i][self.group.class_of[g]]

    def inner(self, f1, f2):
        """<f1, f2> for class functions given as lists of Cyc over classes."""
        s = Cyc.rational(0)
        for c, a, b in zip(self.classes, f1, f2):
            s = s + a * b.conj() * c.size
        return s * Fraction(1, self.group.order)

    def check(self):
        n = self.group.order
        if sum(d * d for d in self.degrees) != n:
            raise GroupError("sum of squared degrees is not |G|")
        if len(self.chars) != len(self.classes):
            raise GroupError("table is not square")
        for i, a in enumerate(self.chars):
            for j in range(i, len(self.chars)):
                ip = self.inner(a, self.chars[j])
                if ip != (1 if i == j else 0):
                    raise GroupError("row orthogonality fails")
        return True


def _prime_for(n, e):
    lo = max(1000, 2 * math.isqrt(n) + 3)
    p = (lo // e + 1) * e + 1
    while not sympy.isprime(p):
        p += e
    return p


def _rref_mod(rows, p):
    """Reduced row echelon basis mod p and pivot columns."""
    m = [list(r) for r in rows]
    piv = []
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        k = next((i for i in range(r, len(m)) if m[i][c] % p), None)
        if k is None:
            continue
        m[r], m[k] = m[k], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [(x * inv) % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] % p:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        piv.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], piv


def _nullspace_mod(mat, p):
    """Basis of {v : mat v = 0} mod p."""
    ncols = len(mat[0])
    red, piv = _rref_mod(mat, p) if mat else ([], [])
    free = [c for c in range(ncols) if c not in piv]
    out = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for row, c in zip(red, piv):
            v[c] = (-row[f]) % p
        out.append(v)
    return out


def _charpoly_roots_mod(X, p):
    m = len(X)
    F = GF(p)
    M = DomainMatrix([[F(int(v)) for v in row] for row in X], (m, m), F)
    x = sympy.Symbol("x")
    coeffs = [int(F.to_int(c)) % p for c in M.charpoly()]
    poly = sympy.Poly(coeffs, x, modulus=p)
    roots = []
    for fac, mult in poly.factor_list()[1]:
        if fac.degree() != 1:
            return None
        c = fac.all_coeffs()
        roots.append(int((-c[1] * pow(int(c[0]), -1, p)) % p))
    return sorted(set(roots))


def character_table(G, seed=0):
    """Exact character table by Dixon-Schneider with a cyclotomic lift."""
    if G.order > MAX_TABLE_ORDER:
        raise GroupError("group too large for a character table")
    classes = G.classes
    k = len(classes)
    n = G.order
    cls = G.class_of
    e = G.exponent
    p = _prime_for(n, e)
    reps = [c.rep for c in classes]
    sizes = [c.size for c in classes]
    inv_class = [cls[G.inv(r)] for r in reps]

    # a[j][i][l] = #{x in C_j : x^-1 g_l in C_i}
    a = np.zeros((k, k, k), dtype=np.int64)
    invperm = np.argsort(G.perms, axis=1)
    cls_arr = np.array(cls)
    for l, g in enumerate(reps):
        prods = invperm[:, G.perms[g]]
        ys = np.array([G.index[r.astype(G.perms.dtype).tobytes()] for r in prods])
        np.add.at(a, (cls_arr, cls_arr[ys], l), 1)

    rng = random.Random(seed)
    spaces = [[[1 if i == j else 0 for j in range(k)] for i in range(k)]]
    order = [None] + list(range(1, k))
    for step in order:
        if all(len(s) == 1 for s in spaces):
            break
        if step is None:
            coef = [rng.randrange(1, p) for _ in range(k)]
            M = np.tensordot(np.array(coef, dtype=np.int64), a % p, axes=1) % p
        else:
            M = a[step] % p
        new = []
        for B in spaces:
            if len(B) == 1:
                new.append(B)
                continue
            red, piv = _rref_mod(B, p)
            img = [[int(x) for x in (M.dot(np.array(b, dtype=np.int64)) % p)] for b in red]
            m = len(red)
            X = [[img[s][piv[t]] for s in range(m)] for t in range(m)]
            roots = _charpoly_roots_mod(X, p)
            if roots is None:
                new.append(red)
                continue
            pieces = []
            for lam in roots:
                A = [[(X[t][s] - (lam if s == t else 0)) % p for s in range(m)] for t in range(m)]
                coeffs = _nullspace_mod(A, p)
                vecs = [[sum(cc[s] * red[s][j] for s in range(m)) % p for j in range(k)]
                        for cc in coeffs]
                pieces.append(vecs)
            if sum(len(v) for v in pieces) != m:
                new.append(red)
                continue
            new.extend(pieces)
        spaces = new
    if not all(len(s) == 1 for s in spaces):
        raise GroupError("class matrices failed to split the character space")

    z = pow(sympy.primitive_root(p), (p - 1) // e, p)
    powmap = [[cls[G.power(r, s)] for s in range(G.orders[r])] for r in reps]
    chars = []
    for (v,) in spaces:
        if v[0] % p == 0:
            raise GroupError("degenerate eigenvector")
        inv0 = pow(v[0], -1, p)
        w = [(x * inv0) % p for x in v]
        S = sum(w[l] * w[inv_class[l]] * pow(sizes[l], -1, p) for l in range(k)) % p
        target = (n * pow(S, -1, p)) % p
        deg = next((d for d in range(1, math.isqrt(n) + 1) if n % d == 0 and (d * d) % p == target),
                   None)
        if deg is None:
            raise GroupError("no degree matches")
        modvals = [(w[l] * deg * pow(sizes[l], -1, p)) % p for l in range(k)]
        row = []
        for l, r in enumerate(reps):
            o = G.orders[r]
            step = e // o
            coeffs = [0] * e
            total = 0
            inv_o = pow(o, -1, p)
            for t in range(o):
                acc = 0
                for s in range(o):
                    acc += modvals[powmap[l][s]] * pow(z, (-t * s * step) % e, p)
                mult = (acc * inv_o) % p
                if mult > deg:
                    raise GroupError("eigenvalue multiplicity out of range")
                coeffs[t * step] = mult
                total += mult
            if total != deg:
                raise GroupError("eigenvalue multiplicities do not sum to the degree")
            val = Cyc(e, coeffs)
            if val.is_rational():
                val = Cyc.rational(val.to_fraction())
            row.append(val)
        chars.append(row)

    def key(ch):
        trivial = all(x == 1 for x in ch)
        return (int(ch[0].to_fraction()), 0 if trivial else 1,
                tuple(tuple(-c for c in x.key(e)) for x in ch))

    chars.sort(key=key)
    ct = CharacterTable(group=G, classes=classes, chars=chars, exponent=e)
    ct.check()
    return ct


# ------------------------------------------------------ extended quotients

def action_table(Gamma, points, act):
    """Tabulate an action: act(g, x) -> point, for g in Gamma indices."""
    pos = {x: i for i, x in enumerate(points)}
    tab = np.empty((Gamma.order, len(points)), dtype=np.int64)
    for g in range(Gamma.order):
        for i, x in enumerate(points):
            tab[g, i] = pos[act(g, x)]
    check_action_table(Gamma, tab)
    return tab


def check_action_table(Gamma, tab):
    tab = np.asarray(tab)
    for s in Gamma.generators:
        for g in range(Gamma.order):
            if not np.array_equal(tab[Gamma.mul(s, g)], tab[s][tab[g]]):
                raise GroupError("not a group action")
    if not np.array_equal(tab[Gamma.identity], np.arange(tab.shape[1])):
        raise GroupError("identity does not act trivially")
    return True


@dataclass
class Orbit:
    rep: int
    members: tuple
    stabilizer: FiniteGroup
    transversal: dict       # member -> Gamma element carrying rep to it


def orbits_of(Gamma, tab):
    tab = np.asarray(tab)
    check_action_table(Gamma, tab)
    npts = tab.shape[1]
    seen = [False] * npts
    out = []
    for x in range(npts):
        if seen[x]:
            continue
        trans = {x: Gamma.identity}
        todo = [x]
        while todo:
            y = todo.pop()
            for s in Gamma.generators:
                z = int(tab[s][y])
                if z not in trans:
                    trans[z] = Gamma.mul(s, trans[y])
                    todo.append(z)
        for y in trans:
            seen[y] = True
        stab = [g for g in range(Gamma.order) if tab[g][x] == x]
        out.append(Orbit(rep=x, members=tuple(sorted(trans)),
                         stabilizer=Gamma.subgroup(stab), transversal=trans))
    return out


@dataclass
class ExtendedQuotientFinite:
    kind: int                    # 1: conjugacy classes, 2: irreducibles
    base_size: int
    group: FiniteGroup
    orbits: list
    points: list                 # (orbit index, label index); label 0 is identity/trivial
    labels: list = field(default_factory=list)   # per orbit: descriptions of labels

    def projection(self, point):
        return point[0]

    def fiber(self, orbit_index):
        return [pt for pt in self.points if pt[0] == orbit_index]

    def canonical_inclusion(self):
        return [(i, 0) for i in range(len(self.orbits))]

    def __len__(self):
        return len(self.points)


def extended_quotient_1(Gamma, tab):
    orbs = orbits_of(Gamma, tab)
    points, labels = [], []
    for i, o in enumerate(orbs):
        cl = o.stabilizer.classes
        labels.append([o.stabilizer.parent[c.rep] for c in cl])
        points.extend((i, j) for j in range(len(cl)))
    return ExtendedQuotientFinite(1, np.asarray(tab).shape[1], Gamma, orbs, points, labels)


def extended_quotient_2(Gamma, tab, with_tables=True):
    """(X//Gamma)_2; with_tables=False counts irreducibles as classes."""
    orbs = orbits_of(Gamma, tab)
    points, labels = [], []
    for i, o in enumerate(orbs):
        if with_tables:
            ct = o.stabilizer.character_table
            labels.append(ct.chars)
            m = len(ct)
        else:
            m = len(o.stabilizer.classes)
            labels.append(None)
        points.extend((i, j) for j in range(m))
    eq = ExtendedQuotientFinite(2, np.asarray(tab).shape[1], Gamma, orbs, points, labels)
    if with_tables:
        for i, o in enumerate(orbs):
            if not all(x == 1 for x in labels[i][0]):
                raise GroupError("label 0 is not the trivial representation")
    return eq


# ------------------------------------------------------ Clifford theory

def irr_action(N, action):
    """Permutation action of Gamma on Irr(N): (g.chi)(a) = chi(g^-1 a)."""
    ct = N.character_table
    cls = N.class_of
    rows = {tuple(x.key(ct.exponent) for x in ch): i for i, ch in enumerate(ct.chars)}
    out = []
    for phi in action:
        inv = [0] * N.order
        for a, b in enumerate(phi):
            inv[b] = a
        perm = []
        for ch in ct.chars:
            moved = tuple(ch[cls[inv[c.rep]]].key(ct.exponent) for c in ct.classes)
            perm.append(rows[moved])
        out.append(perm)
    return np.array(out, dtype=np.int64)


@dataclass
class CliffordReport:
    order: int
    irr_product: int
    twisted_count: int           # sum over orbits of |Irr(Gamma_chi)|
    cocycle_trivial_everywhere: bool
    normal_abelian: bool
    orbit_data: list             # (orbit size, |Gamma_chi|, |Irr Gamma_chi|, #irreducibles over orbit)

    @property
    def equal(self):
        return self.irr_product == self.twisted_count


def clifford_count(N, Gamma, action, name=""):
    G = semidirect_product(N, Gamma, action, name=name)
    ctN = N.character_table
    ctG = G.character_table
    tab = irr_action(N, action)
    eq = extended_quotient_2(Gamma, tab)
    # restriction of each irreducible of G to N, evaluated on N-class reps
    n = N.order
    over = [0] * len(eq.orbits)
    owner = {}
    for i, o in enumerate(eq.orbits):
        for m in o.members:
            owner[m] = i
    for psi in ctG.chars:
        res = [psi[G.class_of[c.rep]] for c in ctN.classes]   # (a, 1) has index a
        hits = set()
        for j, chi in enumerate(ctN.chars):
            if not ctN.inner(res, chi).is_zero():
                hits.add(owner[j])
        if len(hits) != 1:
            raise GroupError("an irreducible lies over more than one orbit")
        over[hits.pop()] += 1
    data = []
    flag = True
    for i, o in enumerate(eq.orbits):
        nirr = len(eq.fiber(i))
        data.append((len(o.members), o.stabilizer.order, nirr, over[i]))
        flag = flag and over[i] == nirr
    return CliffordReport(order=G.order, irr_product=len(ctG), twisted_count=len(eq),
                          cocycle_trivial_everywhere=flag, normal_abelian=N.is_abelian(),
                          orbit_data=data)


# ------------------------------------------------------ c-Irr systems

@dataclass
class CIrrSystem:
    group: FiniteGroup
    table: np.ndarray
    orbits: list
    psi: list                   # per orbit: class index -> irreducible index
    admissible: list            # per orbit: number of admissible bijections

    def _locate(self, y):
        for i, o in enumerate(self.orbits):
            if y in o.transversal:
                return i, o, o.transversal[y]
        raise KeyError(y)

    def psi_character(self, y, g):
        """psi_y([g]) as a function on elements of Gamma_y (parent indices)."""
        G = self.group
        i, o, gam = self._locate(y)
        stab = o.stabilizer
        g0 = G.mul(G.inv(gam), G.mul(g, gam))
        cidx = stab.class_of[stab.parent_pos[g0]]
        chi = stab.character_table.chars[self.psi[i][cidx]]

        def value(h):
            h0 = G.mul(G.inv(gam), G.mul(h, gam))
            return chi[stab.class_of[stab.parent_pos[h0]]]
        return value

    def epsilon(self):
        """Induced map X//Gamma -> (X//Gamma)_2 on labelled points."""
        return {(i, c): (i, self.psi[i][c]) for i in range(len(self.orbits))
                for c in range(len(self.psi[i]))}

    def verify(self, max_checks=None):
        G, tab = self.group, self.table
        for i, o in enumerate(self.orbits):
            if self.psi[i][0] != 0:
                return False
            if sorted(self.psi[i]) != list(range(len(self.psi[i]))):
                return False
        eps = self.epsilon()
        if len(set(eps.values())) != len(eps) or any(a[0] != b[0] for a, b in eps.items()):
            return False
        checks = 0
        npts = tab.shape[1]
        for y in range(npts):
            stab_y = [g for g in range(G.order) if tab[g][y] == y]
            for g in stab_y:
                left_base = self.psi_character(y, g)
                for d in range(G.order):
                    dy = int(tab[d][y])
                    dg = G.conj(d, g)
                    right = self.psi_character(dy, dg)
                    dinv = G.inv(d)
                    for h in [G.conj(d, s) for s in stab_y]:
                        if right(h) != left_base(G.conj(dinv, h)):
                            return False
                    checks += 1
                    if max_checks and checks >= max_checks:
                        return True
        return True


def c_irr_system(Gamma, tab):
    """Deterministic c-Irr system: the i-th class goes to the i-th irreducible."""
    tab = np.asarray(tab)
    orbs = orbits_of(Gamma, tab)
    psi, adm = [], []
    for o in orbs:
        k = len(o.stabilizer.classes)
        if len(o.stabilizer.character_table) != k:
            raise GroupError("classes and irreducibles differ in number")
        psi.append(list(range(k)))
        adm.append(math.factorial(k - 1))
    return CIrrSystem(group=Gamma, table=tab, orbits=orbs, psi=psi, admissible=adm)


def admissible_bijections(k):
    """All bijections c -> Irr fixing index 0 (identity class to trivial)."""
    for rest in itertools.permutations(range(1, k)):
        yield (0,) + rest


# ------------------------------------------------------ corpus and files

def read_table(path):
    """Read a multiplication table: lines of integers, '#' starts a comment."""
    rows = []
    name = ""
    with open(path) as fh:
        for line in fh:
            s = line.strip()
            if s.startswith("#"):
                if s[1:].strip().startswith("name:"):
                    name = s.split(":", 1)[1].strip()
                continue
            if s:
                rows.append([int(x) for x in s.split()])
    return FiniteGroup.from_table(rows, name=name)


def write_table(G, path):
    with open(path, "w") as fh:
        fh.write(f"# name: {G.name}\n")
        fh.write(f"# order: {G.order}\n")
        for row in G.table:
            fh.write(" ".join(str(int(x)) for x in row) + "\n")


def _affine(p, k, mats, name):
    N = translation_group(p, k)
    Gam = matrix_group(mats, p, name=name)
    return N, Gam, normalizer_action(N, Gam)


def clifford_corpus():
    """Built-in (name, N, Gamma, action) cases, all with |N x| Gamma| <= 200."""
    out = []

    def add(name, N, Gam, act):
        out.append((name, N, Gam, act))

    # Z/3 x| Z/2 by inversion = S3
    add("S3", *_affine(3, 1, [[[2]]], "Z2"))
    # (Z/2)^2 x| Z/3 cyclic shift = A4
    add("A4", *_affine(2, 2, [[[0, 1], [1, 1]]], "Z3"))
    add("F20", *_affine(5, 1, [[[2]]], "Z4"))
    add("Z7:Z3", *_affine(7, 1, [[[2]]], "Z3"))
    add("Z13:Z4", *_affine(13, 1, [[[5]]], "Z4"))
    add("(Z2)^2:S3=S4", *_affine(2, 2, [[[0, 1], [1, 1]], [[0, 1], [1, 0]]], "S3"))
    add("(Z2)^3:Z7", *_affine(2, 3, [[[0, 0, 1], [1, 0, 1], [0, 1, 0]]], "Z7"))
    add("(Z2)^3:F21", *_affine(2, 3, [[[0, 0, 1], [1, 0, 1], [0, 1, 0]],
                                      [[1, 0, 0], [0, 0, 1], [0, 1, 1]]], "F21"))
    add("(Z2)^3:S3", *_affine(2, 3, [[[0, 1, 0], [1, 0, 0], [0, 0, 1]],
                                     [[0, 1, 0], [0, 0, 1], [1, 0, 0]]], "S3"))
    add("(Z3)^2:Q8", *_affine(3, 2, [[[0, 2], [1, 0]], [[1, 1], [1, 2]]], "Q8"))
    add("(Z3)^2:Z4", *_affine(3, 2, [[[0, 2], [1, 0]]], "Z4"))
    add("(Z3)^2:V4", *_affine(3, 2, [[[0, 1], [1, 0]], [[2, 0], [0, 2]]], "V4"))
    add("(Z5)^2:Z3", *_affine(5, 2, [[[0, 4], [1, 4]]], "Z3"))
    add("(Z2)^4:Z5", *_affine(2, 4, [[[0, 0, 0, 1], [1, 0, 0, 1], [0, 1, 0, 1], [0, 0, 1, 1]]],
                              "Z5"))
    add("D8", *_affine(4, 1, [[[3]]], "Z2"))

    # nonabelian normal subgroups with cyclic or abelian acting groups
    S5 = symmetric_group(5)
    A5 = alternating_group(5)
    tr = [1, 0, 2, 3, 4]
    Z2 = FiniteGroup.from_generators([tr], name="Z2", degree=5)
    add("A5:Z2=S5", A5, Z2, normalizer_action(A5, Z2))
    S3 = symmetric_group(3)
    A4 = alternating_group(4)
    Z2b = FiniteGroup.from_generators([[1, 0, 2, 3]], name="Z2", degree=4)
    add("A4:Z2=S4", A4, Z2b, normalizer_action(A4, Z2b))
    Q8 = quaternion_group()
    Z3 = cyclic_group(3)
    i_, j_ = 1, 2
    k_ = Q8.mul(i_, j_)
    rot = _q8_automorphism(Q8, {i_: j_, j_: k_})
    add("Q8:Z3=SL(2,3)", Q8, Z3, automorphism_action(Q8, Z3, [rot]))
    S3g = symmetric_group(3)
    # S3 acting on Q8 through Aut(Q8): 3-cycle rotates i,j,k, transposition swaps i,j
    sw = _q8_automorphism(Q8, {i_: Q8.inv(j_), j_: Q8.inv(i_)})
    imgs = []
    for gidx in S3g.generators:
        p = S3g.perms[gidx].tolist()
        imgs.append(rot if p == [1, 2, 0] else sw)
    try:
        add("Q8:S3=GL(2,3)", Q8, S3g, automorphism_action(Q8, S3g, imgs))
    except GroupError:
        pass
    V4 = FiniteGroup.from_generators([[1, 0, 2, 3], [0, 1, 3, 2]], name="V4", degree=4)
    S3n = symmetric_group(3)
    t = S3n.lookup([1, 0, 2])
    add("S3:V4", S3n, V4, automorphism_action(S3n, V4, [inner_automorphism(S3n, t),
                                                       tuple(range(6))]))
    D8 = dihedral_group(4)
    add("D8xZ3", D8, Z3, trivial_action(D8, Z3))
    add("S3xS3", S3, S3g, trivial_action(S3, S3g))
    Z5 = cyclic_group(5)
    add("Q8xZ5", Q8, Z5, trivial_action(Q8, Z5))
    return [c for c in out if c[1].order * c[2].order <= 200]


def _q8_automorphism(Q8, gen_images):
    gens = list(gen_images)
    Q = FiniteGroup(Q8.perms, name="Q8", generators=gens)
    images = [gen_images[g] for g in gens]
    return tuple(hom_from_images(Q, images, Q8.mul, Q8.identity))


def inner_pair_example():
    """Q8 x| V4 through inner automorphisms: a nontrivial cocycle occurs."""
    Q8 = quaternion_group()
    V4 = FiniteGroup.from_generators([[1, 0, 2, 3], [0, 1, 3, 2]], name="V4", degree=4)
    act = automorphism_action(Q8, V4, [inner_automorphism(Q8, 1), inner_automorphism(Q8, 2)])
    return "Q8:V4(inner)", Q8, V4, act
