"""Based root data of semisimple complex groups and their Weyl groups.

Coordinates: X^*(T) = Z^r and X_*(T) = Z^r in dual bases, so the pairing is the
dot product.  For isogeny "sc" the character lattice is the weight lattice
(basis of fundamental weights), for "ad" it is the root lattice (basis of simple
roots).  An explicit lattice is given by integer rows in fundamental-weight
coordinates; its Hermite basis is used as the basis of X^*.

Cartan matrix convention: cartan[i][j] = <alpha_j, alpha_i^vee>.
"""
import os
import re
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
import sympy

from .intmat import int_adjugate, lattice_basis, rat_inverse

MAX_RANK = 8
DEFAULT_MAX_W = 10 ** 6


class RootDatumError(ValueError):
    pass


class WeylOrderError(RuntimeError):
    pass


def cartan_matrix(letter, n):
    c = [[0] * n for _ in range(n)]
    for i in range(n):
        c[i][i] = 2
    if letter == "G":
        if n != 2:
            raise RootDatumError("only G2 is supported among exceptional types")
        # alpha_1 short, alpha_2 long
        c[0][1] = -3
        c[1][0] = -1
        return c
    if letter == "D":
        for i in range(n - 2):
            c[i][i + 1] = c[i + 1][i] = -1
        c[n - 3][n - 1] = c[n - 1][n - 3] = -1
        return c
    for i in range(n - 1):
        c[i][i + 1] = c[i + 1][i] = -1
    if letter == "B":
        c[n - 1][n - 2] = -2
    elif letter == "C":
        c[n - 2][n - 1] = -2
    return c


_MIN_RANK = {"A": 1, "B": 2, "C": 2, "D": 4, "G": 2}


def parse_type(label):
    """'A1xA1' -> [('A', 1), ('A', 1)]."""
    parts = [p for p in re.split(r"[x×*\s]+", label.strip()) if p]
    if not parts:
        raise RootDatumError("empty type label")
    out = []
    for p in parts:
        m = re.fullmatch(r"([A-Ga-g])(\d+)", p)
        if not m:
            raise RootDatumError(f"cannot parse type factor {p!r}")
        letter, n = m.group(1).upper(), int(m.group(2))
        if letter not in _MIN_RANK:
            raise RootDatumError(f"unsupported type {p}")
        if n < _MIN_RANK[letter] or (letter == "G" and n != 2):
            raise RootDatumError(f"unsupported type {p}")
        out.append((letter, n))
    if sum(n for _, n in out) > MAX_RANK:
        raise RootDatumError(f"rank exceeds {MAX_RANK}")
    return out


def type_string(factors):
    return "x".join(f"{l}{n}" for l, n in factors) if factors else "T"


@dataclass(frozen=True)
class RootDatum:
    type_label: str
    isogeny: str
    rank: int
    cartan: tuple
    factors: tuple          # ((letter, n, simple indices), ...)
    lattice: tuple          # basis rows of X^* in fundamental-weight coordinates
    roots: tuple            # X^* coordinates; positives first, root i+N = -root i
    coroots: tuple          # X_* coordinates
    root_coords: tuple      # coordinates in the simple roots
    simple_indices: tuple

    @property
    def npos(self):
        return len(self.roots) // 2

    def is_positive(self, i):
        return i < self.npos

    def neg(self, i):
        n = self.npos
        return i + n if i < n else i - n

    def pairing(self, lam, mu):
        return sum(a * b for a, b in zip(lam, mu))

    @cached_property
    def root_index(self):
        return {r: i for i, r in enumerate(self.roots)}

    @cached_property
    def root_array(self):
        return np.array(self.roots, dtype=np.int64).reshape(len(self.roots), self.rank)

    @cached_property
    def coroot_array(self):
        return np.array(self.coroots, dtype=np.int64).reshape(len(self.coroots), self.rank)

    @cached_property
    def simple_root_matrix(self):
        """Rows are the simple roots in X^* coordinates."""
        return [list(self.roots[i]) for i in self.simple_indices]

    @cached_property
    def simple_coroot_matrix(self):
        return [list(self.coroots[i]) for i in self.simple_indices]

    @property
    def derived_simply_connected(self):
        # X_* equals the coroot lattice
        return self.isogeny == "sc" or (
            self.isogeny == "explicit" and abs(_det(self.simple_coroot_matrix)) == 1)

    @property
    def adjoint(self):
        return self.isogeny == "ad" or (
            self.isogeny == "explicit" and abs(_det(self.simple_root_matrix)) == 1)

    def reflect_root(self, a, b):
        """Index of s_a(root b)."""
        k = self.pairing(self.roots[b], self.coroots[a])
        v = tuple(x - k * y for x, y in zip(self.roots[b], self.roots[a]))
        return self.root_index[v]

    def __repr__(self):
        return f"RootDatum({self.type_label}, {self.isogeny})"


def _det(rows):
    return int(sympy.Matrix(rows).det()) if rows else 1


def _root_system(cartan):
    """Roots and coroots in simple (co)root coordinates, via reflection closure."""
    r = len(cartan)
    start = []
    for i in range(r):
        e = tuple(1 if k == i else 0 for k in range(r))
        start.append((e, e))
    seen = {p[0]: p[1] for p in start}
    todo = list(start)
    while todo:
        beta, cobeta = todo.pop()
        for j in range(r):
            k = sum(beta[m] * cartan[j][m] for m in range(r))
            kk = sum(cobeta[m] * cartan[m][j] for m in range(r))
            nb = tuple(beta[m] - (k if m == j else 0) for m in range(r))
            nc = tuple(cobeta[m] - (kk if m == j else 0) for m in range(r))
            if nb not in seen:
                seen[nb] = nc
                todo.append((nb, nc))
    pos = [b for b in seen if all(x >= 0 for x in b)]
    if len(pos) * 2 != len(seen):
        raise RootDatumError("root closure is not sign-symmetric")
    pos.sort(key=lambda b: (sum(b), tuple(-x for x in b)))
    roots = pos + [tuple(-x for x in b) for b in pos]
    return roots, [seen[b] for b in roots]


def build_root_datum(type_label, isogeny="sc", lattice=None):
    """Build the based root datum of the given Cartan type and isogeny."""
    factors = parse_type(type_label)
    if isogeny not in ("sc", "ad", "explicit"):
        raise RootDatumError(f"unknown isogeny {isogeny!r}")
    r = sum(n for _, n in factors)
    cartan = [[0] * r for _ in range(r)]
    fac = []
    off = 0
    for letter, n in factors:
        c = cartan_matrix(letter, n)
        for i in range(n):
            for j in range(n):
                cartan[off + i][off + j] = c[i][j]
        fac.append((letter, n, tuple(range(off, off + n))))
        off += n

    if isogeny == "sc":
        basis = tuple(tuple(1 if i == j else 0 for j in range(r)) for i in range(r))
        simple = [[cartan[i][k] for i in range(r)] for k in range(r)]
        cosimple = [[1 if i == k else 0 for i in range(r)] for k in range(r)]
    elif isogeny == "ad":
        basis = tuple(tuple(cartan[k][i] for i in range(r)) for k in range(r))
        simple = [[1 if i == k else 0 for i in range(r)] for k in range(r)]
        cosimple = [list(cartan[k]) for k in range(r)]
    else:
        if lattice is None:
            raise RootDatumError("explicit isogeny needs a lattice")
        rows = [tuple(int(x) for x in row) for row in lattice]
        if any(len(row) != r for row in rows):
            raise RootDatumError("lattice rows have the wrong length")
        try:
            basis = lattice_basis(rows, r)
        except ValueError as e:
            raise RootDatumError(str(e))
        binv = rat_inverse(basis)
        simple = []
        for k in range(r):
            a = [cartan[i][k] for i in range(r)]
            v = [sum(a[i] * binv[i][j] for i in range(r)) for j in range(r)]
            if any(x.denominator != 1 for x in v):
                raise RootDatumError("lattice does not contain the root lattice")
            simple.append([int(x) for x in v])
        cosimple = [[basis[i][k] for i in range(r)] for k in range(r)]

    rc, cc = _root_system(cartan)
    roots = [tuple(sum(b[k] * simple[k][i] for k in range(r)) for i in range(r)) for b in rc]
    coroots = [tuple(sum(b[k] * cosimple[k][i] for k in range(r)) for i in range(r)) for b in cc]
    rd = RootDatum(type_label=type_string(factors), isogeny=isogeny, rank=r,
                   cartan=tuple(map(tuple, cartan)), factors=tuple(fac),
                   lattice=tuple(map(tuple, basis)), roots=tuple(roots),
                   coroots=tuple(coroots), root_coords=tuple(rc),
                   simple_indices=tuple(range(r)))
    check_root_datum(rd)
    return rd


def check_root_datum(rd):
    for a, c in zip(rd.roots, rd.coroots):
        if rd.pairing(a, c) != 2:
            raise RootDatumError("<alpha, alpha^vee> != 2")
    idx = rd.root_index
    for a in range(len(rd.roots)):
        img = {rd.reflect_root(a, b) for b in range(len(rd.roots))}
        if len(img) != len(rd.roots):
            raise RootDatumError("reflection does not permute the roots")
    if abs(_det(rd.simple_root_matrix)) == 0:
        raise RootDatumError("simple roots are dependent")
    for b in rd.root_coords[:rd.npos]:
        if any(x < 0 for x in b):
            raise RootDatumError("positive root with a negative coefficient")
    return True


# ---------------------------------------------------------------- Weyl group

def max_weyl_order():
    v = os.environ.get("ATLAS_MAX_W")
    return int(v) if v else DEFAULT_MAX_W


@dataclass(frozen=True)
class WeylElement:
    perm: tuple
    length: int
    matrix: tuple       # acts on X^* (column vectors)
    comatrix: tuple     # contragredient action on X_*

    def act_char(self, lam):
        return tuple(sum(a * b for a, b in zip(row, lam)) for row in self.matrix)

    def act_cochar(self, mu):
        return tuple(sum(a * b for a, b in zip(row, mu)) for row in self.comatrix)


class WeylGroup:
    """Weyl group stored as permutations of the root list (numpy rows)."""

    def __init__(self, rd, perms, lengths):
        self.rd = rd
        self.perms = perms
        self.lengths = lengths
        self.index = {p.tobytes(): i for i, p in enumerate(perms)}
        self.order = len(perms)

    def __len__(self):
        return self.order

    def __iter__(self):
        return (self.element(i) for i in range(self.order))

    def __getitem__(self, i):
        return self.element(i)

    def lookup(self, perm):
        return self.index[np.asarray(perm, dtype=self.perms.dtype).tobytes()]

    def mul(self, i, j):
        return self.index[self.perms[i][self.perms[j]].tobytes()]

    def inv(self, i):
        return self.index[np.argsort(self.perms[i]).astype(self.perms.dtype).tobytes()]

    @cached_property
    def simple_reflections(self):
        rd = self.rd
        out = []
        for a in rd.simple_indices:
            p = [rd.reflect_root(a, b) for b in range(len(rd.roots))]
            out.append(self.lookup(p))
        return out

    def reflection(self, a):
        rd = self.rd
        return self.lookup([rd.reflect_root(a, b) for b in range(len(rd.roots))])

    @cached_property
    def matrices(self):
        """Integer matrices of all elements on X^* (acting on column vectors)."""
        return _matrices(self.rd.root_array, self.rd.simple_indices, self.perms)

    @cached_property
    def comatrices(self):
        return _matrices(self.rd.coroot_array, self.rd.simple_indices, self.perms)

    def element(self, i):
        return WeylElement(perm=tuple(int(x) for x in self.perms[i]),
                           length=int(self.lengths[i]),
                           matrix=tuple(map(tuple, self.matrices[i].tolist())),
                           comatrix=tuple(map(tuple, self.comatrices[i].tolist())))

    def longest(self):
        return int(np.argmax(self.lengths))


def _matrices(vecs, simple, perms):
    s = vecs[list(simple)].T                    # columns = simple (co)roots
    adj, det = int_adjugate(s.tolist())
    adj = np.array(adj, dtype=np.int64)
    imgs = vecs[perms[:, list(simple)]]         # (n, r, r): rows = images
    num = np.einsum("nki,ij->nkj", np.transpose(imgs, (0, 2, 1)), adj)
    if np.any(num % det):
        raise RootDatumError("non-integral Weyl matrix")
    return num // det


@lru_cache(maxsize=64)
def generate_weyl(rd, max_order=None):
    """All Weyl group elements, by breadth-first closure of simple reflections."""
    cap = max_order or max_weyl_order()
    nroots = len(rd.roots)
    dtype = np.int16 if nroots < 30000 else np.int32
    gens = []
    for a in rd.simple_indices:
        gens.append(np.array([rd.reflect_root(a, b) for b in range(nroots)], dtype=dtype))
    ident = np.arange(nroots, dtype=dtype)
    seen = {ident.tobytes()}
    layers = [ident[None, :]]
    depth = [0]
    frontier = layers[0]
    d = 0
    total = 1
    while len(frontier):
        d += 1
        new = []
        for g in gens:
            cand = g[frontier]
            for row in cand:
                key = row.tobytes()
                if key not in seen:
                    seen.add(key)
                    new.append(row)
        if not new:
            break
        frontier = np.array(new, dtype=dtype)
        total += len(frontier)
        if total > cap:
            raise WeylOrderError(f"Weyl group order exceeds cap {cap}")
        layers.append(frontier)
        depth.append(d)
    perms = np.concatenate(layers)
    blen = np.concatenate([np.full(len(l), k) for l, k in zip(layers, depth)])
    npos = rd.npos
    lengths = (perms[:, :npos] >= npos).sum(axis=1)
    if not np.array_equal(lengths, blen):
        raise RootDatumError("inversion count and word length disagree")
    return WeylGroup(rd, perms, lengths)


def poincare_polynomial(rd, q=None):
    q = q if q is not None else sympy.Symbol("q")
    W = generate_weyl(rd)
    counts = np.bincount(W.lengths)
    return sympy.Poly(sum(int(c) * q ** k for k, c in enumerate(counts)), q)
