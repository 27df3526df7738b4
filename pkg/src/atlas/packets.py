"""Components of the extended quotient T//W^s, their unipotent labels and
correcting cocharacters, the maps theta_z, and the L-packet criterion.

A point of T//W^s is a pair (w, t) with w t = t, up to W^s-conjugacy.  The
components are the pieces T^w_c of the fixed-point sets, modulo the
centraliser of w.  Labels are constant on components and are computed at a
generic point of the component.
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
import sympy

from .intmat import smith
from .params import (KLRParameter, _bernstein, centralizer, enumerate_triangle, fmt_formal,
                     fmt_point, formal_orbit, infinitesimal_character, klr_at)
from .torus import (FiniteTorusSubgroup, FixedComponent, PseudoLevi, TorusPoint, _as_subgroup,
                    act, fixed_components, identity_point, torus_grid)
from .unipotent import (FormalPoint, UnipotentClass, align_weyl, as_levi, centralizer_torus_rank,
                        conjugate_pair,
                        closure_order, enumerate_unipotent_classes, factor_rho_labels,
                        saturate, transport_pair, trivial_class, weighted_dynkin)

log = logging.getLogger(__name__)


class LabelError(RuntimeError):
    pass


# ------------------------------------------------------------ components of T//W^s

@dataclass
class LabelledComponent:
    index: int
    w: int                      # Weyl element (a conjugacy class representative of W^s)
    component: FixedComponent
    t_generic: TorusPoint
    M: object                   # Z_H(t_generic)
    label: UnipotentClass       # class of M°
    h_c: tuple                  # weighted Dynkin cocharacter of the label in M°
    h_label: str                # the label as an H-class
    candidates: list = field(default_factory=list)
    warning: str = ""

    @property
    def dim(self):
        return self.component.dim

    def row(self):
        return {"index": self.index, "w": self.w, "base": fmt_point(self.component.base),
                "dim": self.dim, "label": self.h_label,
                "h_c": "(" + ",".join(str(x) for x in self.h_c) + ")",
                "warning": self.warning}


def _weyl_length_in(W, L, x):
    if not L.positive:
        return 0
    return int((W.perms[x][list(L.positive)] >= L.rd.npos).sum())


def _twisted_min_length(W, L, w):
    """Write w = m n with m in W(L°) and n preserving the positive roots of L;
    return the least length of v m n(v)^-1 over v in W(L°)."""
    pos = list(L.positive)
    m = n = None
    for u in L.WM0:
        cand = W.mul(W.inv(u), w)
        if not pos or (W.perms[cand][pos] < L.rd.npos).all():
            m, n = u, cand
            break
    if m is None:
        raise LabelError("w does not normalise the Levi")
    ninv = W.inv(n)
    best = None
    for v in L.WM0:
        x = W.mul(W.mul(W.mul(v, m), n), W.mul(W.inv(v), ninv))
        k = _weyl_length_in(W, L, x)
        best = k if best is None else min(best, k)
    return best


def _reduced_dim(L, u):
    """dim Z_L(u) - dim Z(L)°."""
    return len(L.simple) + 2 * len(L.positive) - u.dim_orbit


def _closure_minimal(cands):
    out = []
    for c in cands:
        if not any(closure_order(d, c) == "less" for d in cands if d != c):
            out.append(c)
    return sorted(out, key=lambda c: (c.dim_orbit, str(c)))


def h_class_label(H, M, x):
    """The H-class of a class of M° (saturate to H°, then reduce by pi0(H))."""
    y = saturate(M, H, x)
    P = H.pi0_group
    names = [str(transport_pair(H, P.parent[g], y, None)[0]) for g in range(P.order)]
    return min(names)


def _pi0_name(M, x):
    """Name of the pi0(M)-orbit of a class of M°."""
    P = M.pi0_group
    return min(str(transport_pair(M, P.parent[g], x, None)[0]) for g in range(P.order))


@dataclass
class _Draft:
    index: int
    w: int
    comp: FixedComponent
    t: TorusPoint
    M: object
    ell: int
    options: dict               # class of M° -> cost |d(u) - ell|
    label: object = None
    warning: str = ""


def _draft(H, w, comp, index):
    rd = H.rd
    W = H.W
    t = comp.generic_point()
    M = PseudoLevi(rd, tuple(H.generators) + (t,))
    if w not in set(M.WA):
        raise LabelError("w does not fix the generic point")
    zero = next(c for c in fixed_components(W, w) if c.base.is_identity())
    g0 = zero.generic_point(prime=10009) if zero.dim else None
    L = PseudoLevi(rd, tuple(M.generators) + ((g0,) if g0 is not None else ()))
    ell = _twisted_min_length(W, L, w)
    options = {}
    for u in enumerate_unipotent_classes(L):
        x = saturate(L, M, u)
        cost = abs(_reduced_dim(L, u) - ell)
        options[x] = min(cost, options.get(x, cost))
    return _Draft(index, w, comp, t, M, ell, options)


def _default_label(d):
    best = min(d.options.values())
    pool = [x for x, c in d.options.items() if c == best]
    chosen = _closure_minimal(pool)
    warn = ""
    if best:
        warn = f"no class with reduced centraliser dimension {d.ell}"
    if len(chosen) > 1:
        warn = (warn + "; " if warn else "") + "ambiguous among " + ", ".join(map(str, chosen))
    return chosen[0], warn


def _assign(slots, supply):
    """Min-cost matching of slots (lists of (name, cost)) to a multiset of names."""
    n = len(slots)
    items = sorted(supply)
    if len(items) != n:
        return None
    INF = float("inf")
    best = {0: (0, ())}
    for k in range(n):
        nxt = {}
        for mask, (cost, picks) in best.items():
            used = set()
            for j in range(n):
                if mask >> j & 1 or items[j] in used:
                    continue
                used.add(items[j])
                c = slots[k].get(items[j], INF)
                if c == INF:
                    continue
                m2 = mask | (1 << j)
                cand = (cost + c, picks + (items[j],))
                if m2 not in nxt or cand < nxt[m2]:
                    nxt[m2] = cand
        best = nxt
    full = best.get((1 << n) - 1)
    return None if full is None else list(full[1])


def label_component(H, w, comp, index=0):
    """Unipotent label of a single component by the length rule alone.

    L_w is the centraliser in M° of the identity component of T^w, where
    M = Z_H(t) for a generic t on the component.  Writing w = m n with m in
    W(L_w) and n preserving a positive system of L_w, the label is the class u
    of L_w with dim Z_L(u) - dim Z(L)° equal to the least length in the
    n-twisted class of m, saturated to M°.  Ties go to the closure-minimal
    candidate.  component_table refines this fibre by fibre.
    """
    d = _draft(H, w, comp, index)
    x, warn = _default_label(d)
    return _finish(H, d, x, warn)


def _finish(H, d, x, warn):
    h = weighted_dynkin(d.M, x).cocharacter
    return LabelledComponent(d.index, d.w, d.comp, d.t, d.M, x, h, h_class_label(H, d.M, x),
                             candidates=sorted(d.options, key=str), warning=warn)


@dataclass
class ComponentTable:
    rd: object
    c_s: FiniteTorusSubgroup
    components: list
    lookup: dict                # (class rep w, component position) -> (index, mover to the stored one)

    def __len__(self):
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]


def _enumerate_components(H):
    W = H.W
    G = H.WA_group
    out, lookup = [], {}
    for cl in G.classes:
        w = G.parent[cl.rep]
        fc = fixed_components(W, w)
        cent = [G.parent[g] for g in range(G.order) if G.mul(g, cl.rep) == G.mul(cl.rep, g)]
        seen = set()
        for k, c in enumerate(fc):
            if k in seen:
                continue
            idx = len(out)
            for z in cent:
                img = act(W, z, c.base)
                j = next(j for j, e in enumerate(fc) if e.contains(img))
                if j not in seen:
                    seen.add(j)
                    lookup[(w, j)] = (idx, W.inv(z))
            out.append((w, c))
    return out, lookup


def _locate(H, lookup, w, t):
    W = H.W
    G = H.WA_group
    gi = G.parent_pos[w]
    rep = G.classes[G.class_of[gi]].rep
    for v in range(G.order):
        if G.conj(v, gi) == rep:
            w1 = G.parent[rep]
            t1 = act(W, G.parent[v], t)
            fc = fixed_components(W, w1)
            j = next(j for j, d in enumerate(fc) if d.contains(t1))
            idx, z = lookup[(w1, j)]
            return idx, W.mul(z, G.parent[v])
    raise LabelError("no class representative found")


def _to_fibre(H, d, x, v, t):
    """The class x of M_c carried to Z_H(t), for a point (w, t) with v.t on the component."""
    W = H.W
    rd = H.rd
    t1 = act(W, v, t)
    M1 = PseudoLevi(rd, tuple(H.generators) + (t1,))
    y = saturate(d.M, M1, x)
    Mt = PseudoLevi(rd, tuple(H.generators) + (t,))
    if t1 == t and v in set(Mt.WM0):
        return Mt, y
    u = align_weyl(M1, Mt, W.inv(v))
    return Mt, conjugate_pair(M1, Mt, u, y)[0]


@lru_cache(maxsize=64)
def component_table(rd, c_s):
    """All components of T//W^s with labels compatible with the KLR fibres."""
    from .params import klr_at
    c_s = _as_subgroup(c_s)
    H = _bernstein(rd, c_s).H
    W = H.W
    G = H.WA_group
    raw, lookup = _enumerate_components(H)
    drafts = [_draft(H, w, c, i) for i, (w, c) in enumerate(raw)]
    order = sorted(range(len(drafts)), key=lambda i: (-drafts[i].comp.dim, i))
    for i in order:
        if drafts[i].label is not None:
            continue
        t = drafts[i].t
        stab = [g for g in range(G.order) if act(W, G.parent[g], t) == t]
        S = G.subgroup(stab)
        Mt = centralizer(rd, c_s, t)
        supply = [_pi0_name(Mt, p.x) for p in klr_at(rd, c_s, t)]
        slots, owners = [], []
        for cl in S.classes:
            w = G.parent[S.parent[cl.rep]]
            idx, v = _locate(H, lookup, w, t)
            d = drafts[idx]
            if d.label is not None:
                name = _pi0_name(*_to_fibre(H, d, d.label, v, t))
                if name in supply:
                    supply.remove(name)
                continue
            opts = {}
            for x, cost in d.options.items():
                name = _pi0_name(*_to_fibre(H, d, x, v, t))
                if cost < opts.get(name, (float("inf"),))[0]:
                    opts[name] = (cost, x)
            slots.append({k: c for k, (c, _) in opts.items()})
            owners.append((d, opts))
        picks = _assign(slots, supply)
        for k, (d, opts) in enumerate(owners):
            if d.label is not None:
                continue
            if picks is None:
                d.label, d.warning = _default_label(d)
                d.warning = (d.warning + "; " if d.warning else "") + "fibre matching failed"
                log.warning("component %d: %s", d.index, d.warning)
            else:
                d.label = opts[picks[k]][1]
                if d.options[d.label]:
                    d.warning = f"length {d.ell} matched approximately"
    comps = [_finish(H, d, d.label, d.warning) for d in drafts]
    return ComponentTable(rd, c_s, comps, lookup)


def label_components(rd, c_s, denominator_bound=None):
    """List of labelled components (independent of the bound, which only
    affects the grid used by the packet report)."""
    return list(component_table(rd, _as_subgroup(c_s)).components)


def locate(table, w, t):
    """Index of the component containing the point (w, t) of T//W^s, and a
    conjugator v with v.t on the stored representative."""
    H = _bernstein(table.rd, table.c_s).H
    return _locate(H, table.lookup, w, t)


# ------------------------------------------------------------ theta

@dataclass(frozen=True)
class ThetaValue:
    """The W^s-orbit of t h(z) with z = q^a, kept formal."""
    base: TorusPoint
    shift: tuple
    a: Fraction
    key: tuple

    def __str__(self):
        return fmt_formal(FormalPoint(TorusPoint(self.key[0]), self.key[1]))


def _orbit_key(H, t, exponent):
    orbit = formal_orbit(H.W, H.WA, FormalPoint(t, tuple(exponent)))
    return min(orbit)


def theta(lc, t, z=Fraction(1, 2), table=None):
    """theta_z at a point t of the component; z = q^a is given by a (0 means z = 1)."""
    a = Fraction(z)
    if not lc.component.contains(t):
        raise LabelError("t is not on the component")
    H = lc.M if table is None else _bernstein(table.rd, table.c_s).H
    if table is None:
        raise ValueError("theta needs the component table")
    return ThetaValue(t, lc.h_c, a, _orbit_key(H, t, [a * x for x in lc.h_c]))


def projection(table, t):
    """b(t): the W^s-orbit of t."""
    H = _bernstein(table.rd, table.c_s).H
    return _orbit_key(H, t, [0] * len(t.v))


def klr_of_point(table, lc, t):
    """The KLR parameter (t, x_t, 1) attached to a point of a labelled component."""
    rd, c_s = table.rd, table.c_s
    Mt = centralizer(rd, c_s, t)
    x = saturate(lc.M, Mt, lc.label)
    rho = tuple(factor_rho_labels(p)[0] for p in x.parts)
    return KLRParameter(rd, c_s, t, x, rho, 0)


# ------------------------------------------------------------ points and packets

@dataclass(frozen=True)
class QuotientPoint:
    t: TorusPoint
    w: int
    component: int
    label: str
    theta_key: tuple            # orbit of (t, h_c): equal keys <=> theta_z agree for all z


def point(table, w, t):
    idx, v = locate(table, w, t)
    lc = table[idx]
    H = _bernstein(table.rd, table.c_s).H
    W = H.W
    t1 = act(W, v, t)
    key = _orbit_key(H, t1, lc.h_c)
    return QuotientPoint(t, w, idx, lc.h_label, key)


def same_L_packet(p1, p2):
    """Same unipotent label and theta_z equal for every z."""
    return p1.label == p2.label and p1.theta_key == p2.theta_key


def fiber_points(table, t):
    """One point (w, t) for each conjugacy class of the stabiliser of t in W^s."""
    H = _bernstein(table.rd, table.c_s).H
    W = H.W
    G = H.WA_group
    stab = [g for g in range(G.order) if act(W, G.parent[g], t) == t]
    S = G.subgroup(stab)
    return [point(table, G.parent[S.parent[c.rep]], t) for c in S.classes]


def packets_of(points):
    groups = []
    for p in points:
        for g in groups:
            if same_L_packet(g[0], p):
                g.append(p)
                break
        else:
            groups.append([p])
    return groups


# ------------------------------------------------------------ temperedness and discreteness

def is_tempered(p):
    """Phi(W_F) bounded: finite-order Frobenius image, no real q-shift."""
    if isinstance(p, KLRParameter):
        return True
    if isinstance(p, FormalPoint):
        return all(x == 0 for x in p.exponent)
    if isinstance(p, TorusPoint):
        return True
    raise TypeError("expected a KLR parameter or a point")


def is_essentially_discrete(p):
    """Not contained in a proper Levi: the torus Z_T(t)° cap Z_T(im gamma_x)° is
    the connected centre of G."""
    M = centralizer(p.rd, p.c_s, p.t)
    centre = p.rd.rank - len(p.rd.simple_indices)
    return centralizer_torus_rank(M, p.x) == centre


@dataclass
class ResidualCoset:
    cls: UnipotentClass
    dim: int                    # dim Z_T(im gamma_x)°
    components: int             # components of the kernel of the Bala-Carter roots
    shift: FormalPoint          # h_x(q^{1/2})
    levi_roots: tuple

    def __str__(self):
        return f"{self.cls}: dim {self.dim}, {self.components} component(s), shift {fmt_formal(self.shift)}"


def _levi_point(rd, M, J, prime=10037):
    """A point cutting out the standard Levi of M° on the simple roots J."""
    roots = [rd.roots[a] for a in J]
    A = sympy.Matrix(roots) if roots else sympy.zeros(0, rd.rank)
    basis = A.nullspace() if roots else [sympy.eye(rd.rank)[:, i] for i in range(rd.rank)]
    v = [Fraction(0)] * rd.rank
    for k, b in enumerate(basis):
        c = Fraction(7 ** (k + 1) + 3 * k + 1, prime)
        den = math.lcm(*[int(sympy.fraction(x)[1]) for x in b])
        for i in range(rd.rank):
            v[i] += c * Fraction(int(b[i] * den))
    return TorusPoint.from_cochar(v)


def bala_carter_levi(M, x):
    """A minimal standard Levi L of M° containing x as a distinguished class."""
    M = as_levi(M)
    rd = M.rd
    simple = list(M.simple)
    for k in range(len(simple) + 1):
        for J in itertools.combinations(simple, k):
            L = PseudoLevi(rd, tuple(M.generators) + (_levi_point(rd, M, J),))
            for u in enumerate_unipotent_classes(L):
                if centralizer_torus_rank(L, u) != rd.rank - len(L.simple):
                    continue
                if saturate(L, M, u) == x:
                    return L
    raise LabelError("no Bala-Carter Levi found")


def residual_points(H, x):
    """Z_T(im gamma_x)° h_x(q^{1/2}) for a class x of H°."""
    H = as_levi(H)
    rd = H.rd
    L = bala_carter_levi(H, x)
    dim = rd.rank - len(L.simple)
    if dim != centralizer_torus_rank(H, x):
        raise AssertionError("Bala-Carter Levi and centraliser rank disagree")
    rows = [list(rd.roots[a]) for a in L.simple]
    if rows:
        diag, _, _ = smith(rows)
        comps = 1
        for d in diag:
            if d:
                comps *= abs(int(d))
    else:
        comps = 1
    h = weighted_dynkin(H, x).cocharacter
    shift = FormalPoint(identity_point(rd.rank), tuple(Fraction(a) / 2 for a in h))
    return ResidualCoset(x, dim, comps, shift, tuple(L.simple))


# ------------------------------------------------------------ report

@dataclass
class PacketReport:
    table: ComponentTable
    fibers: list                # (t, [QuotientPoint])
    packets: list               # lists of QuotientPoint
    theta_checks: int
    label_count_mismatches: list

    def to_json(self):
        return {
            "components": [c.row() for c in self.table.components],
            "points": [{"t": fmt_point(t), "points": [
                {"w": p.w, "component": p.component, "label": p.label} for p in pts]}
                for t, pts in self.fibers],
            "packets": [[f"[{p.w},{fmt_point(p.t)}]" for p in g] for g in self.packets],
            "theta_checks": self.theta_checks,
            "label_count_mismatches": [fmt_point(t) for t in self.label_count_mismatches],
        }


def check_theta(table, lc, t):
    """theta_1 = b(t) and theta_{q^{1/2}} = infinitesimal character; returns 2 checks."""
    H = _bernstein(table.rd, table.c_s).H
    th1 = theta(lc, t, 0, table)
    if th1.key != projection(table, t):
        raise AssertionError("theta_1 differs from the projection")
    thq = theta(lc, t, Fraction(1, 2), table)
    ic = infinitesimal_character(klr_of_point(table, lc, t))
    if thq.key != ic.key():
        raise AssertionError("theta_{q^1/2} differs from the infinitesimal character")
    return 2


def packet_report(rd, c_s, bound, include_generic=True):
    c_s = _as_subgroup(c_s)
    table = component_table(rd, c_s)
    tri = enumerate_triangle(rd, c_s, bound, include_generic=include_generic)
    H = _bernstein(rd, c_s).H
    fibers, packets, checks, bad = [], [], 0, []
    for row in tri.rows:
        t = row.t
        pts = fiber_points(table, t)
        for p in pts:
            lc = table[p.component]
            _, v = locate(table, p.w, t)
            checks += check_theta(table, lc, act(H.W, v, t))
        fibers.append((t, pts))
        packets.extend(packets_of(pts))
        # labels should reproduce the classes of the KLR parameters over t
        got = sorted(p.label for p in pts)
        Mt = centralizer(rd, c_s, t)
        want = sorted(h_class_label(H, Mt, q.x) for q in klr_at(rd, c_s, t))
        if got != want:
            bad.append(t)
    return PacketReport(table, fibers, packets, checks, bad)


__all__ = [
    "LabelledComponent", "ComponentTable", "ThetaValue", "QuotientPoint", "ResidualCoset",
    "PacketReport", "LabelError", "label_component", "label_components", "component_table",
    "locate", "theta", "projection", "klr_of_point", "point", "same_L_packet", "fiber_points",
    "packets_of", "is_tempered", "is_essentially_discrete", "residual_points",
    "bala_carter_levi", "packet_report", "check_theta",
]
