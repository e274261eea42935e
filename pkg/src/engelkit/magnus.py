"""Truncated free associative algebra over the integers.

``a_i -> 1 + X_i`` embeds the free nilpotent group of class ``c`` into the
units of ``Z<X_1..X_m>`` modulo terms of degree ``> c``.  The catalog uses it
to derive conjugate relations for free nilpotent presentations, and the
tests use it as an independent arithmetic oracle.
"""

from __future__ import annotations

from fractions import Fraction


class MagnusElement:
    __slots__ = ("terms", "degree")

    def __init__(self, terms: dict, degree: int):
        self.terms = {w: c for w, c in terms.items() if c and len(w) <= degree}
        self.degree = degree

    @classmethod
    def one(cls, degree):
        return cls({(): 1}, degree)

    @classmethod
    def generator(cls, i, degree):
        return cls({(): 1, (i,): 1}, degree)

    def __mul__(self, other):
        out: dict = {}
        d = self.degree
        for u, a in self.terms.items():
            for v, b in other.terms.items():
                if len(u) + len(v) <= d:
                    w = u + v
                    out[w] = out.get(w, 0) + a * b
        return MagnusElement(out, d)

    def __invert__(self):
        # (1 + u)^-1 = 1 - u + u^2 - ...
        if self.terms.get((), 0) != 1:
            raise ValueError("only elements with constant term 1 are invertible here")
        u = MagnusElement({w: c for w, c in self.terms.items() if w}, self.degree)
        result = MagnusElement.one(self.degree)
        term = MagnusElement.one(self.degree)
        for k in range(1, self.degree + 1):
            term = term * u
            sign = -1 if k % 2 else 1
            for w, c in term.terms.items():
                result.terms[w] = result.terms.get(w, 0) + sign * c
        return MagnusElement(result.terms, self.degree)

    def __pow__(self, k):
        base = self if k >= 0 else ~self
        k = abs(k)
        result = MagnusElement.one(self.degree)
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        return isinstance(other, MagnusElement) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def homogeneous(self, d: int) -> dict:
        return {w: c for w, c in self.terms.items() if len(w) == d}

    def __repr__(self):
        return f"MagnusElement({self.terms})"


def group_commutator(x: MagnusElement, y: MagnusElement) -> MagnusElement:
    return ~x * ~y * x * y


def solve_integer_combination(targets: list, vector: dict) -> list:
    """Write ``vector`` as an integer combination of ``targets`` (dicts word -> int).

    Exact Gaussian elimination over the rationals; raises ``ValueError`` if the
    targets are dependent or the solution is not integral.
    """
    keys = sorted({w for t in targets for w in t} | set(vector))
    ncols = len(targets)
    rows = [[Fraction(t.get(k, 0)) for t in targets] + [Fraction(vector.get(k, 0))] for k in keys]
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            raise ValueError("basis leading terms are linearly dependent")
        rows[r], rows[piv] = rows[piv], rows[r]
        lead = rows[r][col]
        rows[r] = [v / lead for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(r)
        r += 1
    for i in range(r, len(rows)):
        if rows[i][-1] != 0:
            raise ValueError("vector is not in the span of the basis leading terms")
    sol = [rows[i][-1] for i in pivots]
    if any(s.denominator != 1 for s in sol):
        raise ValueError(f"non-integral coordinates {sol}")
    return [int(s) for s in sol]
