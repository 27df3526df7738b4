"""Exact arithmetic in cyclotomic fields Q(zeta_n).

An element is stored as integer coefficients over a common positive denominator,
in the power basis 1, z, ..., z^(phi(n)-1) after reduction modulo the n-th
cyclotomic polynomial.
"""
from fractions import Fraction
from functools import lru_cache
from math import gcd

import sympy


@lru_cache(maxsize=None)
def cyclotomic_coeffs(n):
    """Coefficients of Phi_n, lowest degree first."""
    x = sympy.Symbol("x")
    p = sympy.Poly(sympy.cyclotomic_poly(n, x), x)
    return tuple(int(c) for c in reversed(p.all_coeffs()))


def _reduce(n, coeffs):
    """Reduce integer coefficients (any length) modulo z^n - 1 and Phi_n."""
    full = [0] * n
    for k, c in enumerate(coeffs):
        if c:
            full[k % n] += c
    phi = cyclotomic_coeffs(n)
    deg = len(phi) - 1
    for k in range(n - 1, deg - 1, -1):
        c = full[k]
        if c:
            full[k] = 0
            base = k - deg
            for i in range(deg):
                if phi[i]:
                    full[base + i] -= c * phi[i]
    return full[:deg]


def _normalize(nums, den):
    g = den
    for x in nums:
        if x:
            g = gcd(g, x)
            if g == 1:
                break
    if den < 0:
        g = -g
    if g != 1:
        nums = [x // g for x in nums]
        den //= g
    return tuple(nums), den


class Cyc:
    __slots__ = ("n", "c", "d")

    def __init__(self, n, coeffs=None, den=1, reduced=False):
        self.n = n
        coeffs = list(coeffs or ())
        if any(isinstance(x, Fraction) for x in coeffs):
            dd = 1
            for x in coeffs:
                dd = dd * Fraction(x).denominator // gcd(dd, Fraction(x).denominator)
            coeffs = [int(Fraction(x) * dd) for x in coeffs]
            den *= dd
        else:
            coeffs = [int(x) for x in coeffs]
        if not reduced:
            coeffs = _reduce(n, coeffs)
        self.c, self.d = _normalize(coeffs, den)

    @classmethod
    def rational(cls, q, n=1):
        q = Fraction(q)
        return cls(n, [q.numerator], den=q.denominator)

    @classmethod
    def root(cls, n, k=1):
        """zeta_n ** k with zeta_n = exp(2 pi i / n)."""
        coeffs = [0] * n
        coeffs[k % n] = 1
        return cls(n, coeffs)

    def lift(self, m):
        """Same number written in Q(zeta_m), n | m."""
        if m == self.n:
            return self
        if m % self.n:
            raise ValueError("cannot lift to a field not containing zeta_n")
        s = m // self.n
        coeffs = [0] * m
        for k, c in enumerate(self.c):
            coeffs[(k * s) % m] += c
        return Cyc(m, coeffs, den=self.d)

    def _common(self, other):
        if not isinstance(other, Cyc):
            other = Cyc.rational(other)
        if other.n == self.n:
            return self, other
        if self.is_rational():
            return Cyc(other.n, [self.c[0] if self.c else 0], den=self.d), other
        if other.is_rational():
            return self, Cyc(self.n, [other.c[0] if other.c else 0], den=other.d)
        m = self.n * other.n // gcd(self.n, other.n)
        return self.lift(m), other.lift(m)

    def __add__(self, other):
        a, b = self._common(other)
        la, lb = len(a.c), len(b.c)
        size = max(la, lb)
        out = [0] * size
        for i, x in enumerate(a.c):
            out[i] += x * b.d
        for i, x in enumerate(b.c):
            out[i] += x * a.d
        return Cyc(a.n, out, den=a.d * b.d, reduced=True)

    __radd__ = __add__

    def __neg__(self):
        return Cyc(self.n, [-x for x in self.c], den=self.d, reduced=True)

    def __sub__(self, other):
        if not isinstance(other, Cyc):
            other = Cyc.rational(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._common(other)
        if len(b.c) <= 1:
            k = b.c[0] if b.c else 0
            return Cyc(a.n, [x * k for x in a.c], den=a.d * b.d, reduced=True)
        if len(a.c) <= 1:
            k = a.c[0] if a.c else 0
            return Cyc(a.n, [x * k for x in b.c], den=a.d * b.d, reduced=True)
        prod = [0] * (len(a.c) + len(b.c))
        for i, x in enumerate(a.c):
            if x:
                for j, y in enumerate(b.c):
                    if y:
                        prod[i + j] += x * y
        return Cyc(a.n, prod, den=a.d * b.d)

    __rmul__ = __mul__

    def conj(self):
        if self.is_rational():
            return self
        coeffs = [0] * self.n
        for k, c in enumerate(self.c):
            coeffs[(-k) % self.n] += c
        return Cyc(self.n, coeffs, den=self.d)

    def is_zero(self):
        return not any(self.c)

    def is_rational(self):
        return not any(self.c[1:])

    def to_fraction(self):
        if not self.is_rational():
            raise ValueError("not rational")
        return Fraction(self.c[0] if self.c else 0, self.d)

    def coefficients(self):
        return tuple(Fraction(x, self.d) for x in self.c)

    def __eq__(self, other):
        if not isinstance(other, Cyc):
            try:
                other = Cyc.rational(other)
            except TypeError:
                return NotImplemented
        a, b = self._common(other)
        if a.d != b.d:
            return False
        la, lb = len(a.c), len(b.c)
        if la != lb:
            # trailing zeros may differ after reduction in a field of degree 1
            return list(a.c) + [0] * (lb - la) == list(b.c) + [0] * (la - lb)
        return a.c == b.c

    def __hash__(self):
        # the power-basis coordinates depend on n; only rationals have a stable form
        if self.is_rational():
            return hash(self.to_fraction())
        return hash("cyc")

    def key(self, m=None):
        """Coefficient tuple in Q(zeta_m), usable as a sort key."""
        v = self.lift(m) if m else self
        return tuple(Fraction(x, v.d) for x in v.c)

    def __complex__(self):
        import cmath
        z = cmath.exp(2j * cmath.pi / self.n)
        return complex(sum(c * z ** k for k, c in enumerate(self.c)) / self.d)

    def __repr__(self):
        if self.is_rational():
            return str(self.to_fraction())
        terms = []
        for k, c in enumerate(self.coefficients()):
            if not c:
                continue
            if k == 0:
                terms.append(str(c))
            else:
                coef = "" if c == 1 else ("-" if c == -1 else f"{c}*")
                terms.append(f"{coef}E({self.n})" + (f"^{k}" if k > 1 else ""))
        return " + ".join(terms).replace("+ -", "- ")
