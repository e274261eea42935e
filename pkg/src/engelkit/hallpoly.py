"""Closed-form multiplication for free nilpotent pc bases.

In a torsion-free nilpotent group with a Mal'cev basis the exponents of a
product ``x*y`` (and of ``x^-1``) are polynomials in the exponents of ``x`` and
``y``.  For the Hall basis of a free nilpotent group they fall out of the
Magnus embedding with symbolic exponents: ``(1+u)^e = sum_k binom(e, k) u^k``
is polynomial in ``e`` and peeling layers is linear.  The polynomials are
compiled to plain integer Python code; quotients of exponent ``q`` reuse them
and reduce modulo ``q``.

Collection stays the reference; the catalog cross-checks the two before use.
"""

from __future__ import annotations

import math

from sympy import QQ, Matrix, Rational
from sympy.polys.rings import ring


def _binomial_poly(e, k):
    out = e.ring.one
    for t in range(k):
        out = out * (e - t)
    return out * QQ(1, math.factorial(k))


class _SymMagnus:
    """Magnus element whose coefficients live in a polynomial ring."""

    __slots__ = ("terms", "degree", "R")

    def __init__(self, terms, degree, R):
        self.terms = {w: c for w, c in terms.items() if c and len(w) <= degree}
        self.degree = degree
        self.R = R

    def __mul__(self, other):
        out: dict = {}
        d = self.degree
        for u, a in self.terms.items():
            for v, b in other.terms.items():
                if len(u) + len(v) <= d:
                    w = u + v
                    out[w] = out.get(w, self.R.zero) + a * b
        return _SymMagnus(out, d, self.R)

    def power(self, e):
        """``self^e`` for a unipotent ``self`` and a polynomial exponent ``e``."""
        u = _SymMagnus({w: c for w, c in self.terms.items() if w}, self.degree, self.R)
        result = {(): self.R.one}
        term = _SymMagnus({(): self.R.one}, self.degree, self.R)
        for k in range(1, self.degree + 1):
            term = term * u
            if not term.terms:
                break
            b = _binomial_poly(e, k)
            for w, c in term.terms.items():
                result[w] = result.get(w, self.R.zero) + b * c
        return _SymMagnus(result, self.degree, self.R)

    def homogeneous(self, d):
        return {w: c for w, c in self.terms.items() if len(w) == d}


def _lift(values, R, degree):
    return [_SymMagnus({w: R(c) for w, c in v.terms.items()}, degree, R) for v in values]


def _left_inverses(model):
    """Per weight layer: rational matrix mapping leading coefficients to exponents."""
    out = []
    for w in range(1, model.c + 1):
        idx = [k for k, wk in enumerate(model.weights) if wk == w]
        keys = sorted({word for k in idx for word in model._leads[k]})
        A = Matrix([[model._leads[k].get(word, 0) for k in idx] for word in keys])
        pinv = (A.T * A).inv() * A.T
        out.append((idx, keys, pinv))
    return out


def _symbolic_normal_form(u, model, values, layers, R):
    n = len(model.basis)
    exps = [R.zero] * n
    cur = u
    for idx, keys, pinv in layers:
        h = cur.homogeneous(model.weights[idx[0]])
        vec = [h.get(word, R.zero) for word in keys]
        for row, k in enumerate(idx):
            e = R.zero
            for col, v in enumerate(vec):
                coef = pinv[row, col]
                if coef:
                    e += v * QQ(int(Rational(coef).p), int(Rational(coef).q))
            exps[k] = e
        # divide out the layer: cur <- layer^-1 * cur
        inv_layer = _SymMagnus({(): R.one}, model.c, R)
        for k in reversed(idx):
            if exps[k]:
                inv_layer = inv_layer * values[k].power(-exps[k])
        cur = inv_layer * cur
    return exps


def _compile(polys, names, label):
    """Turn integer-valued rational polynomials into one Python function."""
    lines = [f"def {label}({', '.join(names)}):"]
    outs = []
    for k, f in enumerate(polys):
        den = 1
        for _, c in f.terms():
            den = math.lcm(den, int(c.denominator))
        parts = []
        for monom, c in f.terms():
            coef = int(c * den)
            factors = [str(coef)]
            for var, e in zip(names, monom):
                factors.extend([var] * e)
            parts.append("*".join(factors))
        expr = " + ".join(parts) if parts else "0"
        if den == 1:
            lines.append(f"    z{k} = {expr}")
        else:
            lines.append(f"    z{k} = ({expr}) // {den}")
        outs.append(f"z{k}")
    lines.append(f"    return ({', '.join(outs)},)")
    scope: dict = {}
    exec("\n".join(lines), scope)
    return scope[label]


class HallArithmetic:
    """Polynomial ``mul``/``inv`` on exponent vectors of a free nilpotent Hall basis.

    ``modulus`` reduces every output coordinate (exponent quotients); ``None``
    keeps integers.
    """

    def __init__(self, model, modulus: int | None = None, _polys=None):
        self.model = model
        self.modulus = modulus
        self.n = len(model.basis)
        if _polys is None:
            _polys = _derive(model)
        self._polys = _polys
        mul_fn, inv_fn = _polys
        self._mul_fn = mul_fn
        self._inv_fn = inv_fn

    def reduced(self, modulus: int) -> HallArithmetic:
        return HallArithmetic(self.model, modulus, self._polys)

    def mul(self, x, y) -> tuple:
        z = self._mul_fn(*x, *y)
        if self.modulus is not None:
            q = self.modulus
            return tuple(v % q for v in z)
        return z

    def inv(self, x) -> tuple:
        z = self._inv_fn(*x)
        if self.modulus is not None:
            q = self.modulus
            return tuple(v % q for v in z)
        return z


def _derive(model):
    n = len(model.basis)
    xs = [f"x{k}" for k in range(n)]
    ys = [f"y{k}" for k in range(n)]
    R, *gens = ring(",".join(xs + ys), QQ)
    X, Y = gens[:n], gens[n:]
    values = _lift(model.values, R, model.c)
    layers = _left_inverses(model)

    def element(exps):
        out = _SymMagnus({(): R.one}, model.c, R)
        for v, e in zip(values, exps):
            out = out * v.power(e)
        return out

    ex, ey = element(X), element(Y)
    prod = _symbolic_normal_form(ex * ey, model, values, layers, R)
    inv_u = _SymMagnus({(): R.one}, model.c, R)
    for v, e in reversed(list(zip(values, X))):
        inv_u = inv_u * v.power(-e)
    inv = _symbolic_normal_form(inv_u, model, values, layers, R)
    mul_fn = _compile(prod, xs + ys, "hall_mul")
    inv_fn = _compile(inv, xs, "hall_inv")
    return mul_fn, inv_fn
