"""Polycyclic presentations and collection to normal form.

Every group in the package lives inside a :class:`PcPresentation`: generators
``g_1 .. g_n`` with relative orders ``r_i`` (``None`` for infinite), power
relations ``g_i^{r_i} = T_i`` and conjugate relations ``g_j^{g_i} = w_ij``
where every right-hand side only involves generators of index greater than
``i``.  Elements are stored as exponent vectors ``(e_1, .., e_n)`` meaning
``g_1^{e_1} ... g_n^{e_n}``, with ``0 <= e_i < r_i`` for finite ``r_i``; that
vector is unique, so equality of elements is equality of vectors.

Multiplication is collection from the left, organised recursively: pushing
``g_i^e`` into a normal word ``P g_i^a S`` (``S`` in the subgroup generated by
``g_{i+1} ..``) gives ``P g_i^{a+e} S^{g_i^e}``, and conjugation by ``g_i`` is an
automorphism of that subgroup, so everything reduces to work in strictly
smaller subgroups.  Powers of the conjugation automorphisms are tabulated at
powers of two, which keeps big exponents (``p^2`` sized, or unbounded in
torsion-free groups) cheap.

Internally 0-based indices are used.  Text forms (``g1^2 g3^-1``) are 1-based.
"""

from __future__ import annotations

import itertools
import math
import re
import threading
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from math import gcd

from engelkit.errors import (
    CollectionBudgetExceeded,
    InfiniteGroupError,
    PresentationError,
    PresentationMismatch,
    BudgetExhausted,
)

INFINITY = math.inf
DEFAULT_COLLECTION_BUDGET = 10**7
DEFAULT_CONSISTENCY_TRIPLES = 1000

Vec = tuple


class _Steps:
    __slots__ = ("left",)

    def __init__(self, budget: int):
        self.left = budget

    def tick(self):
        self.left -= 1
        if self.left < 0:
            raise CollectionBudgetExceeded("rewrite-step budget exceeded during collection")


# ---------------------------------------------------------------------------
# free words


_TOKEN = re.compile(r"(?:g(\d+)|([A-Za-z]))(?:\^(-?\d+))?")


@dataclass(frozen=True)
class FreeWord:
    """A word in the generators and their inverses, not reduced.

    ``letters`` holds ``(index, exponent)`` pairs, 0-based indices and nonzero
    exponents; ``alphabet`` is the number of available generators.
    """

    letters: tuple = ()
    alphabet: int = 0

    def __post_init__(self):
        letters = tuple((int(i), int(e)) for i, e in self.letters)
        for i, e in letters:
            if e == 0:
                raise ValueError("free word letters need nonzero exponents")
            if not 0 <= i < self.alphabet:
                raise ValueError(f"generator index {i + 1} outside alphabet of size {self.alphabet}")
        object.__setattr__(self, "letters", letters)

    def __add__(self, other: FreeWord) -> FreeWord:
        if self.alphabet != other.alphabet:
            raise ValueError("cannot concatenate words over different alphabets")
        return FreeWord(self.letters + other.letters, self.alphabet)

    def __len__(self):
        return sum(abs(e) for _, e in self.letters)

    def inverse(self) -> FreeWord:
        return FreeWord(tuple((i, -e) for i, e in reversed(self.letters)), self.alphabet)

    def reduced(self) -> FreeWord:
        out = []
        for i, e in self.letters:
            if out and out[-1][0] == i:
                e += out.pop()[1]
            if e:
                out.append((i, e))
        return FreeWord(tuple(out), self.alphabet)

    def is_empty(self) -> bool:
        return not self.letters

    @classmethod
    def parse(cls, text: str, alphabet: int) -> FreeWord:
        """Parse ``"g1^2 g3^-1"`` or letter shorthand ``"a b^-1 A"`` / ``"ab^2A"`` (capital = inverse)."""
        letters = []
        for tok in text.replace("*", " ").split():
            if tok == "1":
                continue
            pos = 0
            while pos < len(tok):
                m = _TOKEN.match(tok, pos)
                if not m:
                    raise ValueError(f"bad word token {tok!r}")
                num, letter, exp = m.groups()
                e = int(exp) if exp is not None else 1
                if num is not None:
                    i = int(num) - 1
                elif letter.isupper():
                    i, e = ord(letter) - ord("A"), -e
                else:
                    i = ord(letter) - ord("a")
                if e:
                    letters.append((i, e))
                pos = m.end()
        return cls(tuple(letters), alphabet)

    def __str__(self):
        if not self.letters:
            return "1"
        return " ".join(f"g{i + 1}^{e}" for i, e in self.letters)


def normal_word(exps: Sequence[int]) -> FreeWord:
    return FreeWord(tuple((i, e) for i, e in enumerate(exps) if e), len(exps))


def format_normal_word(exps: Sequence[int]) -> str:
    return str(normal_word(exps))


def parse_normal_word(text: str, ngens: int) -> tuple:
    """Parse the ascending ``g<k>^<int>`` grammar into an exponent vector."""
    exps = [0] * ngens
    last = -1
    for tok in text.split():
        if tok == "1":
            continue
        m = re.match(r"^g(\d+)(?:\^(-?\d+))?$", tok)
        if not m:
            raise PresentationError(f"bad normal word token {tok!r}")
        k = int(m.group(1)) - 1
        e = int(m.group(2)) if m.group(2) is not None else 1
        if not 0 <= k < ngens:
            raise PresentationError(f"generator g{k + 1} out of range")
        if k <= last:
            raise PresentationError(f"normal word {text!r} is not in ascending generator order")
        last = k
        exps[k] = e
    return tuple(exps)


# ---------------------------------------------------------------------------
# presentations


class PcPresentation:
    """An immutable polycyclic presentation.

    Parameters
    ----------
    relative_orders:
        One entry per generator; ``None`` or ``0`` means infinite.
    powers:
        ``{i: exponent vector}`` giving ``g_i^{r_i}`` for finite ``r_i``.  Missing
        entries are trivial.
    conjugates:
        ``{(j, i): exponent vector}`` giving ``g_j^{g_i}`` for ``i < j``.  Missing
        entries mean the two generators commute.
    weights:
        Optional lower-central weight of each generator.
    check_triples:
        Number of random triples used for the associativity test at load
        time; ``0`` skips the test (catalog builders verify on their own).
    """

    def __init__(
        self,
        relative_orders: Sequence[int | None],
        powers: Mapping[int, Sequence[int]] | None = None,
        conjugates: Mapping[tuple, Sequence[int]] | None = None,
        label: str = "",
        weights: Sequence[int] | None = None,
        check_triples: int = DEFAULT_CONSISTENCY_TRIPLES,
        seed: int = 0,
        budget: int = DEFAULT_COLLECTION_BUDGET,
    ):
        n = len(relative_orders)
        orders = []
        for r in relative_orders:
            if r is None or r == 0:
                orders.append(None)
            elif int(r) >= 2:
                orders.append(int(r))
            else:
                raise PresentationError(f"relative order {r} must be >= 2 or infinite")
        self.ngens = n
        self.relative_orders = tuple(orders)
        self.label = label
        self.weights = tuple(weights) if weights is not None else None
        if self.weights is not None and len(self.weights) != n:
            raise PresentationError("weights must have one entry per generator")
        self.budget = budget
        self._zero = (0,) * n
        self._lock = threading.RLock()
        self._fast = None

        self._powers: list = [None] * n
        for i, vec in (powers or {}).items():
            vec = self._check_vector(vec, f"power of g{i + 1}")
            if self.relative_orders[i] is None:
                if any(vec):
                    raise PresentationError(f"g{i + 1} has infinite order but a power relation")
                continue
            if any(vec[: i + 1]):
                raise PresentationError(f"power tail of g{i + 1} must use higher generators only")
            self._powers[i] = vec if any(vec) else None

        images = {}
        for (j, i), vec in (conjugates or {}).items():
            if not 0 <= i < j < n:
                raise PresentationError(f"conjugate key ({j + 1}, {i + 1}) needs i < j")
            vec = self._check_vector(vec, f"conjugate g{j + 1}^g{i + 1}")
            if any(vec[: i + 1]):
                raise PresentationError(
                    f"conjugate g{j + 1}^g{i + 1} must lie in the subgroup of higher generators"
                )
            images[j, i] = vec

        self.nilpotent_shape = True
        aut = []
        for i in range(n):
            row = []
            for j in range(i + 1, n):
                vec = images.get((j, i))
                if vec is None or vec == self._unit(j):
                    row.append(None)
                    continue
                if any(vec[:j]) or vec[j] != 1:
                    self.nilpotent_shape = False
                row.append(vec)
            aut.append(row)
        if not self.nilpotent_shape and None in self.relative_orders:
            raise PresentationError(
                "presentations with infinite relative orders must have nilpotent shape "
                "(g_j^g_i = g_j * higher generators)"
            )
        self._aut = aut
        self._action_trivial = [all(v is None for v in row) for row in aut]
        self._conjugates = {k: v for k, v in images.items() if v != self._unit(k[0])}
        self._pow_tables = [[row] for row in aut]
        self._inv_tables: list = [None] * n
        self._derive_inverse_actions()

        if check_triples:
            self.check_consistency(check_triples, seed=seed)

    # -- construction helpers -------------------------------------------------

    def _unit(self, j: int) -> tuple:
        v = [0] * self.ngens
        v[j] = 1
        return tuple(v)

    def _check_vector(self, vec, what) -> tuple:
        vec = tuple(int(e) for e in vec)
        if len(vec) != self.ngens:
            raise PresentationError(f"{what}: expected {self.ngens} exponents")
        for k, e in enumerate(vec):
            r = self.relative_orders[k]
            if r is not None and not 0 <= e < r:
                raise PresentationError(f"{what}: exponent of g{k + 1} outside [0, {r})")
        return vec

    def _derive_inverse_actions(self):
        n = self.ngens
        for i in range(n - 1, -1, -1):
            if self._action_trivial[i]:
                self._inv_tables[i] = [[None] * (n - i - 1)]
                continue
            steps = _Steps(self.budget)
            inv = [None] * (n - i - 1)
            if self.nilpotent_shape:
                for j in range(n - 1, i, -1):
                    img = self._aut[i][j - i - 1]
                    if img is None:
                        continue
                    tail = self._zero[: j + 1] + img[j + 1:]
                    t_inv = self._inv(tail, steps)
                    moved = self._apply(inv, t_inv, i, steps)
                    inv[j - i - 1] = self._zero[:j] + (1,) + moved[j + 1:]
            else:
                r = self.relative_orders[i]
                power_tail = self._powers[i] or self._zero
                power_tail_inv = self._inv(power_tail, steps)
                for j in range(i + 1, n):
                    y = self._act(i, r - 1, self._unit(j), steps)
                    y = self._mul(self._mul(power_tail, y, steps), power_tail_inv, steps)
                    inv[j - i - 1] = None if y == self._unit(j) else y
            self._inv_tables[i] = [inv]

    # -- collection kernel ----------------------------------------------------

    def _table(self, i: int, bit: int, inverse: bool):
        """Images of ``g_j`` under conjugation by ``g_i^(+-2^bit)``; ``None`` marks a fixed generator."""
        tables = self._inv_tables[i] if inverse else self._pow_tables[i]
        if bit < len(tables):
            return tables[bit]
        with self._lock:
            steps = _Steps(self.budget)
            while len(tables) <= bit:
                prev = tables[-1]
                nxt = []
                for pos, img in enumerate(prev):
                    if img is not None:
                        img = self._apply(prev, img, i, steps)
                        if img == self._unit(i + 1 + pos):
                            img = None
                    nxt.append(img)
                tables.append(nxt)
            return tables[bit]

    def _apply(self, images, x, i, steps):
        """Apply an automorphism of the subgroup above ``g_i`` given by generator images."""
        out = self._zero
        for j in range(i + 1, self.ngens):
            e = x[j]
            if not e:
                continue
            img = images[j - i - 1]
            if img is None:
                out = self._mul_gen(out, j, e, steps)
            else:
                out = self._mul(out, self._pow(img, e, steps), steps)
        return out

    def _act(self, i, e, x, steps):
        """``x^{g_i^e}`` for ``x`` in the subgroup of higher generators."""
        if e == 0 or self._action_trivial[i]:
            return x
        inverse = e < 0
        k = -e if inverse else e
        bit = 0
        while k:
            if k & 1:
                x = self._apply(self._table(i, bit, inverse), x, i, steps)
            k >>= 1
            bit += 1
        return x

    def _mul_gen(self, x, i, e, steps):
        steps.tick()
        if self._fast is not None:
            return self._fast.mul(x, self._zero[:i] + (e,) + self._zero[i + 1:])
        v = x[i] + e
        r = self.relative_orders[i]
        carry = None
        if r is not None:
            q, v = divmod(v, r)
            if q and self._powers[i] is not None:
                carry = self._pow(self._powers[i], q, steps)
        suffix = x[i + 1:]
        if not any(suffix):
            if carry is None:
                return x[:i] + (v,) + suffix
            return x[:i] + (v,) + carry[i + 1:]
        rest = self._zero[: i + 1] + suffix
        if not self._action_trivial[i]:
            rest = self._act(i, e, rest, steps)
        if carry is not None:
            rest = self._mul(carry, rest, steps)
        return x[:i] + (v,) + rest[i + 1:]

    def _mul(self, x, y, steps):
        if self._fast is not None:
            steps.tick()
            return self._fast.mul(x, y)
        for i, e in enumerate(y):
            if e:
                x = self._mul_gen(x, i, e, steps)
        return x

    def _inv(self, x, steps):
        if self._fast is not None:
            steps.tick()
            return self._fast.inv(x)
        for k, a in enumerate(x):
            if a:
                rest = self._zero[: k + 1] + x[k + 1:]
                return self._mul_gen(self._inv(rest, steps), k, -a, steps)
        return x

    def _pow(self, x, k, steps):
        if k == 0:
            return self._zero
        if k < 0:
            x, k = self._inv(x, steps), -k
        nz = [j for j, e in enumerate(x) if e]
        if not nz:
            return x
        if len(nz) == 1:
            j = nz[0]
            return self._mul_gen(self._zero, j, x[j] * k, steps)
        if all(self._aut[a][b - a - 1] is None for a in nz for b in nz if a < b):
            # pairwise commuting support: (prod g_j^e_j)^k = prod g_j^(e_j k)
            result = self._zero
            for j in nz:
                result = self._mul(result, self._mul_gen(self._zero, j, x[j] * k, steps), steps)
            return result
        result = self._zero
        base = x
        while True:
            if k & 1:
                result = self._mul(result, base, steps)
            k >>= 1
            if not k:
                return result
            base = self._mul(base, base, steps)

    def attach_arithmetic(self, fast) -> None:
        """Route ``_mul``/``_inv`` through ``fast`` (an object with ``mul``/``inv`` on exponent vectors).

        The caller is responsible for having checked ``fast`` against collection.
        """
        self._fast = fast

    # -- public surface -------------------------------------------------------

    def steps(self, budget: int | None = None) -> _Steps:
        return _Steps(self.budget if budget is None else budget)

    @property
    def is_finite(self) -> bool:
        return None not in self.relative_orders

    def order(self):
        if not self.is_finite:
            return INFINITY
        return math.prod(self.relative_orders)

    def identity(self) -> GroupElement:
        return GroupElement(self, self._zero)

    def gen(self, i: int) -> GroupElement:
        """Generator ``g_{i+1}`` (0-based ``i``)."""
        return GroupElement(self, self._unit(i))

    def gens(self) -> list:
        return [self.gen(i) for i in range(self.ngens)]

    def element(self, exps: Sequence[int]) -> GroupElement:
        """Element with the given exponents; finite coordinates are collected into range."""
        exps = tuple(int(e) for e in exps)
        if len(exps) != self.ngens:
            raise ValueError(f"expected {self.ngens} exponents, got {len(exps)}")
        return GroupElement(self, self._mul(self._zero, exps, self.steps()))

    def parse(self, text: str) -> GroupElement:
        return collect(self, FreeWord.parse(text, self.ngens))

    def power_tail(self, i: int) -> tuple:
        return self._powers[i] or self._zero

    def conjugate_image(self, j: int, i: int) -> tuple:
        """Normal form of ``g_j^{g_i}`` (0-based, ``i < j``)."""
        img = self._aut[i][j - i - 1]
        return self._unit(j) if img is None else img

    def inverse_conjugate_image(self, j: int, i: int) -> tuple:
        img = self._inv_tables[i][0][j - i - 1]
        return self._unit(j) if img is None else img

    def defining_generators(self) -> list:
        """Indices of weight-1 generators (all generators when weights are unknown)."""
        if self.weights is None:
            return list(range(self.ngens))
        return [i for i, w in enumerate(self.weights) if w == 1]

    def relators(self) -> list:
        """The pc relators as free words over the pc generators."""
        rels = []
        n = self.ngens
        for i, r in enumerate(self.relative_orders):
            if r is not None:
                rels.append(FreeWord(((i, r),), n) + normal_word(self.power_tail(i)).inverse())
        for i in range(n):
            for j in range(i + 1, n):
                img = self.conjugate_image(j, i)
                w = FreeWord(((i, -1), (j, 1), (i, 1)), n) + normal_word(img).inverse()
                rels.append(w.reduced())
        return rels

    def check_consistency(self, triples: int = DEFAULT_CONSISTENCY_TRIPLES, seed: int = 0):
        """Randomised associativity test; raises :class:`PresentationError` on failure."""
        import random

        rng = random.Random(seed)
        checks = [(self._unit(i), self._unit(j), self._unit(k))
                  for i in range(self.ngens) for j in range(self.ngens) for k in range(self.ngens)
                  if self.ngens <= 6]
        for _ in range(triples):
            checks.append(tuple(self._sample(rng, 6) for _ in range(3)))
        for x, y, z in checks:
            steps = self.steps()
            left = self._mul(self._mul(x, y, steps), z, steps)
            right = self._mul(x, self._mul(y, z, steps), steps)
            if left != right:
                raise PresentationError(
                    f"presentation {self.label!r} failed associativity on "
                    f"({format_normal_word(x)}), ({format_normal_word(y)}), ({format_normal_word(z)})"
                )
        # inverses of power relations must close up
        steps = self.steps()
        for i, r in enumerate(self.relative_orders):
            x = self._unit(i)
            if self._mul(self._inv(x, steps), x, steps) != self._zero:
                raise PresentationError(f"inverse check failed for g{i + 1}")

    def _sample(self, rng, spread: int) -> tuple:
        return tuple(
            rng.randrange(r) if r is not None else rng.randint(-spread, spread)
            for r in self.relative_orders
        )

    def __eq__(self, other):
        if not isinstance(other, PcPresentation):
            return NotImplemented
        return self is other or (
            self.relative_orders == other.relative_orders
            and self._powers == other._powers
            and self._conjugates == other._conjugates
        )

    def __hash__(self):
        return hash((self.relative_orders, tuple(sorted(self._conjugates.items()))))

    def __repr__(self):
        return f"PcPresentation({self.label or 'unnamed'}, ngens={self.ngens})"


class GroupElement:
    """Normal-form element ``g_1^{e_1} ... g_n^{e_n}`` of a presentation.

    Supports ``*``, ``~`` (inverse), ``**`` with any integer, and equality.
    """

    __slots__ = ("pres", "exps")

    def __init__(self, pres: PcPresentation, exps: tuple):
        self.pres = pres
        self.exps = exps

    def _same(self, other: GroupElement):
        if not isinstance(other, GroupElement):
            raise TypeError(f"expected GroupElement, got {type(other).__name__}")
        if other.pres is not self.pres and other.pres != self.pres:
            raise PresentationMismatch("elements belong to different presentations")

    def __mul__(self, other: GroupElement) -> GroupElement:
        if not isinstance(other, GroupElement):
            return NotImplemented
        self._same(other)
        return GroupElement(self.pres, self.pres._mul(self.exps, other.exps, self.pres.steps()))

    def __invert__(self) -> GroupElement:
        return GroupElement(self.pres, self.pres._inv(self.exps, self.pres.steps()))

    def __pow__(self, k: int) -> GroupElement:
        return GroupElement(self.pres, self.pres._pow(self.exps, int(k), self.pres.steps()))

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.exps == other.exps and (self.pres is other.pres or self.pres == other.pres)

    def __hash__(self):
        return hash(self.exps)

    def __lt__(self, other):
        return self.exps < other.exps

    def is_identity(self) -> bool:
        return not any(self.exps)

    def conj(self, by: GroupElement) -> GroupElement:
        """``self^by = by^-1 self by``."""
        return ~by * self * by

    def word(self) -> FreeWord:
        return normal_word(self.exps)

    def __str__(self):
        return format_normal_word(self.exps)

    def __repr__(self):
        return f"<{self.pres.label or 'pc'}: {self}>"


# ---------------------------------------------------------------------------
# operations


def _check_same(elements):
    first = elements[0]
    for x in elements[1:]:
        first._same(x)


def collect(p: PcPresentation, w: FreeWord, budget: int | None = None) -> GroupElement:
    """Collect a free word over the pc generators into normal form."""
    if w.alphabet > p.ngens:
        for i, _ in w.letters:
            if i >= p.ngens:
                raise IndexError(f"generator g{i + 1} outside presentation with {p.ngens} generators")
    steps = p.steps(budget)
    x = p._zero
    for i, e in w.letters:
        x = p._mul_gen(x, i, e, steps)
    return GroupElement(p, x)


def multiply(x: GroupElement, y: GroupElement) -> GroupElement:
    return x * y


def inverse(x: GroupElement) -> GroupElement:
    return ~x


def power(x: GroupElement, k: int) -> GroupElement:
    return x ** k


def commutator(xs: Sequence[GroupElement]) -> GroupElement:
    """Left-normed commutator ``[x_1, .., x_k]`` with ``[a, b] = a^-1 b^-1 a b``."""
    xs = list(xs)
    if not xs:
        raise ValueError("commutator of an empty list")
    _check_same(xs)
    c = xs[0]
    for y in xs[1:]:
        c = ~c * ~y * c * y
    return c


def engel_commutator(x: GroupElement, y: GroupElement, n: int) -> GroupElement:
    """``[x, _n y]``; ``n = 0`` returns ``x``."""
    if n < 0:
        raise ValueError("Engel length must be nonnegative")
    x._same(y)
    y_inv = ~y
    c = x
    for _ in range(n):
        if c.is_identity():
            break
        c = ~c * y_inv * c * y
    return c


def element_order(x: GroupElement):
    """Order of ``x``, or ``INFINITY``.

    Walks the polycyclic series: if the leading exponent sits on a generator
    of relative order ``r``, the image of ``x`` in that cyclic factor has order
    ``r / gcd(e, r)``, and that power of ``x`` drops into the next term of the
    series.  An infinite factor with nonzero exponent means infinite order.
    """
    p = x.pres
    steps = p.steps()
    v = x.exps
    order = 1
    while True:
        k = next((j for j, e in enumerate(v) if e), None)
        if k is None:
            return order
        r = p.relative_orders[k]
        if r is None:
            return INFINITY
        m = r // gcd(v[k], r)
        order *= m
        v = p._pow(v, m, steps)


def enumerate_elements(p: PcPresentation) -> Iterator[GroupElement]:
    if not p.is_finite:
        raise InfiniteGroupError(f"{p.label or 'group'} is infinite; cannot enumerate")
    for exps in itertools.product(*(range(r) for r in p.relative_orders)):
        yield GroupElement(p, exps)


def random_element(p: PcPresentation, rng, ball: Sequence[GroupElement] | None = None) -> GroupElement:
    """Uniform random element.

    Without ``ball`` the group must be finite and each exponent is drawn
    uniformly, which is exactly uniform on the group.  With ``ball`` (a
    precomputed, canonically ordered list) the draw is uniform on it.
    """
    if ball is not None:
        return ball[rng.randrange(len(ball))]
    if not p.is_finite:
        raise InfiniteGroupError("uniform sampling needs a finite group; pass a ball instead")
    return GroupElement(p, tuple(rng.randrange(r) for r in p.relative_orders))


def growth_ball(p: PcPresentation, gens: Sequence[GroupElement], n: int,
                keep: bool = False, max_items: int = 2_000_000):
    """Size of the ball of radius ``n`` w.r.t. ``gens`` and their inverses.

    Returns ``(count, ball)``; ``ball`` is a sorted list when ``keep`` is true,
    else ``None``.  Raises :class:`BudgetExhausted` past ``max_items``.
    """
    sizes, ball = growth_curve(p, gens, n, max_items=max_items)
    return sizes[-1], (sorted(ball, key=lambda g: g.exps) if keep else None)


def growth_curve(p: PcPresentation, gens: Sequence[GroupElement], n: int,
                 max_items: int = 2_000_000):
    """Ball sizes for radii ``0..n`` plus the final ball as a set."""
    if n < 0:
        raise ValueError("radius must be nonnegative")
    steps = p.steps(10**12)
    letters = []
    for g in gens:
        p.identity()._same(g)
        for h in (g.exps, p._inv(g.exps, steps)):
            if h not in letters:
                letters.append(h)
    seen = {p._zero}
    frontier = [p._zero]
    sizes = [1]
    for _ in range(n):
        nxt = []
        for x in frontier:
            for h in letters:
                y = p._mul(x, h, steps)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        if len(seen) > max_items:
            raise BudgetExhausted(f"ball exceeds {max_items} elements")
        frontier = nxt
        sizes.append(len(seen))
    return sizes, {GroupElement(p, v) for v in seen}
