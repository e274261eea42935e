"""Engel-law checks, Engel element classification and degrees of nilpotency."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.stats import norm

from engelkit.errors import BudgetExhausted, InfiniteGroupError
from engelkit.pc import (
    GroupElement,
    PcPresentation,
    commutator,
    engel_commutator,
    element_order,
    enumerate_elements,
    growth_curve,
    random_element,
)

DEFAULT_TUPLE_BUDGET = 10**7
TABLE_LIMIT = 256
DEFAULT_ENGEL_CAP = 10

# Semigroup laws as (lhs, rhs) strings over x, y.  Exponents are expanded.
ENGEL2_LAW = ("yx^2y", "xy^2x")
ENGEL3_LAW_A = ("xy^2xyx^2y", "yx^2yxy^2x")
ENGEL3_LAW_B = ("xy^2xyxyx^2y", "yx^2y^2x^2y^2x")
ENGEL4_LAW = (
    "xy^2xyx^2y^2x^2yxy^2xyx^2yxy^2x^2y^2xyx^2y",
    "yx^2yxy^2x^2y^2xyx^2yxy^2xyx^2y^2x^2yxy^2x",
)


def expand_law_word(text: str) -> list:
    """``"xy^2x"`` -> ``['x', 'y', 'y', 'x']``."""
    out = []
    k = 0
    while k < len(text):
        ch = text[k]
        k += 1
        e = 1
        if k < len(text) and text[k] == "^":
            k += 1
            start = k
            while k < len(text) and text[k].isdigit():
                k += 1
            e = int(text[start:k])
        out.extend([ch] * e)
    return out


@dataclass(frozen=True)
class LawSpec:
    """A law in two variables (or the parametric ``[x^r, x_1..x_m] = 1``)."""

    kind: str
    n: int = 0
    r: int = 0
    m: int = 0

    KINDS = ("engel2_law", "engel3_law_a", "engel3_law_b", "engel4_law",
             "engel_n_commutator", "locally_nilpotent_law")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown law kind {self.kind!r}")
        if self.kind == "engel_n_commutator" and self.n < 1:
            raise ValueError("engel_n_commutator needs n >= 1")
        if self.kind == "locally_nilpotent_law" and (self.r < 1 or self.m < 1):
            raise ValueError("locally_nilpotent_law needs r >= 1 and m >= 1")

    @property
    def arity(self) -> int:
        return self.m + 1 if self.kind == "locally_nilpotent_law" else 2

    def semigroup_words(self):
        return {
            "engel2_law": ENGEL2_LAW,
            "engel3_law_a": ENGEL3_LAW_A,
            "engel3_law_b": ENGEL3_LAW_B,
            "engel4_law": ENGEL4_LAW,
        }.get(self.kind)

    def evaluate(self, values) -> tuple:
        """Both sides of the law at a substitution; commutator laws compare with 1."""
        words = self.semigroup_words()
        if words is not None:
            env = {"x": values[0], "y": values[1]}
            return tuple(_eval_positive(expand_law_word(w), env) for w in words)
        one = values[0].pres.identity()
        if self.kind == "engel_n_commutator":
            return engel_commutator(values[0], values[1], self.n), one
        return commutator([values[0] ** self.r, *values[1:]]), one

    def __str__(self):
        if self.kind == "engel_n_commutator":
            return f"[x,_{self.n} y] = 1"
        if self.kind == "locally_nilpotent_law":
            return f"[x^{self.r}, x_1..x_{self.m}] = 1"
        lhs, rhs = self.semigroup_words()
        return f"{lhs} = {rhs}"


def _eval_positive(letters, env) -> GroupElement:
    it = iter(letters)
    out = env[next(it)]
    for ch in it:
        out = out * env[ch]
    return out


@dataclass
class Verdict:
    holds: bool
    checked: int
    witness: tuple | None = None
    note: str = ""

    def __bool__(self):
        return self.holds


def _substitutions(p: PcPresentation, arity: int, mode: str, samples: int, rng):
    if mode == "exhaustive":
        if not p.is_finite:
            raise InfiniteGroupError("exhaustive checks need a finite group")
        elements = list(enumerate_elements(p))
        return itertools.product(elements, repeat=arity)
    if mode == "sampled":
        if rng is None:
            raise ValueError("sampled mode needs an rng")
        return ((tuple(_sample(p, rng) for _ in range(arity))) for _ in range(samples))
    raise ValueError(f"unknown mode {mode!r}")


def _sample(p, rng):
    if p.is_finite:
        return random_element(p, rng)
    return p.element([rng.randint(-10, 10) for _ in range(p.ngens)])


def check_law(p: PcPresentation, law: LawSpec, mode: str = "exhaustive", samples: int = 10_000,
              rng=None) -> Verdict:
    """Check ``law`` on every (or ``samples`` random) substitution(s)."""
    checked = 0
    for values in _substitutions(p, law.arity, mode, samples, rng):
        lhs, rhs = law.evaluate(values)
        checked += 1
        if lhs != rhs:
            return Verdict(False, checked, tuple(values))
    return Verdict(True, checked)


def is_n_engel(p: PcPresentation, n: int, mode: str = "exhaustive", samples: int = 10_000,
               rng=None) -> Verdict:
    if n < 1:
        raise ValueError("n must be positive")
    checked = 0
    for x, y in _substitutions(p, 2, mode, samples, rng):
        checked += 1
        if not engel_commutator(x, y, n).is_identity():
            return Verdict(False, checked, (x, y))
    return Verdict(True, checked)


# ---------------------------------------------------------------------------
# Engel elements


def _least_engel_length(g: GroupElement, x: GroupElement, n_max: int, side: str):
    """Least n <= n_max with [g,_n x] = 1 (right) or [x,_n g] = 1 (left)."""
    a, b = (g, x) if side == "right" else (x, g)
    c = a
    b_inv = ~b
    for n in range(1, n_max + 1):
        c = ~c * b_inv * c * b
        if c.is_identity():
            return n
    return None


@dataclass
class EngelClassification:
    side: str
    n_max: int
    engel: dict = field(default_factory=dict)      # element -> least uniform n
    undetermined: list = field(default_factory=list)

    @property
    def note(self) -> str:
        return (f"{len(self.undetermined)} element(s) not Engel within n_max={self.n_max} "
                "(undetermined beyond the cap, not a proof of non-Engel)")

    def bounded(self, n: int) -> set:
        """Elements that are (side) n-Engel."""
        return {g for g, k in self.engel.items() if k <= n}


def classify_engel_elements(p: PcPresentation, side: str = "right",
                            n_max: int = DEFAULT_ENGEL_CAP) -> EngelClassification:
    """For every element, the least n such that it is a bounded (side) n-Engel element.

    In a finite group right/left Engel elements are bounded, so the uniform n
    over all x is reported; elements with no n <= n_max are listed as
    undetermined.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    elements = list(enumerate_elements(p))
    out = EngelClassification(side, n_max)
    for g in elements:
        worst = 0
        for x in elements:
            k = _least_engel_length(g, x, n_max, side)
            if k is None:
                worst = None
                break
            worst = max(worst, k)
        if worst is None:
            out.undetermined.append(g)
        else:
            out.engel[g] = max(worst, 1)
    return out


def check_engel_inclusions(p: PcPresentation, n_max: int = DEFAULT_ENGEL_CAP) -> Verdict:
    """Check R(G)^-1 in L(G) and R_n(G)^-1 in L_{n+1}(G) on the classification."""
    right = classify_engel_elements(p, "right", n_max)
    left = classify_engel_elements(p, "left", n_max + 1)
    checked = 0
    for g, n in right.engel.items():
        checked += 1
        k = left.engel.get(~g)
        if k is None or k > n + 1:
            return Verdict(False, checked, (g,), note=f"right {n}-Engel element whose inverse is not left {n + 1}-Engel")
    return Verdict(True, checked, note=right.note if right.undetermined else "")


# ---------------------------------------------------------------------------
# degree of nilpotency


@dataclass
class DegreeReport:
    n: int
    mode: str
    value: Fraction | float
    sample_count: int
    satisfied_count: int
    half_width: float = 0.0
    confidence: float = 1.0

    @property
    def interval(self):
        v = float(self.value)
        return (max(0.0, v - self.half_width), min(1.0, v + self.half_width))


def wilson_interval(successes: int, trials: int, confidence: float):
    z = float(norm.ppf(0.5 + confidence / 2))
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return centre, half


def _count_trivial_tuples(elements, n):
    """Number of (n+1)-tuples with trivial left-normed commutator.

    Prefixes are grouped by their partial commutator value, so work is
    proportional to (distinct partial values) * |G| per level rather than
    |G|^(n+1).
    """
    layer = {}
    for x in elements:
        layer[x] = layer.get(x, 0) + 1
    size = len(elements)
    for _ in range(n):
        nxt = {}
        for c, mult in layer.items():
            if c.is_identity():
                nxt[c] = nxt.get(c, 0) + mult * size
                continue
            c_inv = ~c
            for y in elements:
                v = c_inv * ~y * c * y
                nxt[v] = nxt.get(v, 0) + mult
        layer = nxt
    return sum(mult for c, mult in layer.items() if c.is_identity())


class _Classes:
    """Conjugacy classes, computed lazily as orbits under the pc generators."""

    def __init__(self, p: PcPresentation, budget: int):
        self.gens = p.gens()
        self.order = p.order()
        self.of: dict = {}
        self.steps = 0
        self.budget = budget

    def __call__(self, x: GroupElement) -> list:
        cls = self.of.get(x)
        if cls is None:
            cls = [x]
            seen = {x}
            for y in cls:
                for g in self.gens:
                    z = y.conj(g)
                    if z not in seen:
                        seen.add(z)
                        cls.append(z)
            self.steps += len(cls) * len(self.gens)
            if self.steps > self.budget:
                raise BudgetExhausted(f"conjugacy class work exceeds budget {self.budget}")
            for y in cls:
                self.of[y] = cls
        return cls


def _count_trivial_tuples_group(p: PcPresentation, n: int, budget: int) -> int:
    """Exact count of trivial (n+1)-fold commutators over the whole group.

    For fixed ``c``, ``y -> [c, y] = c^-1 c^y`` hits each ``c^-1 c'`` with ``c'``
    conjugate to ``c`` exactly ``|C(c)|`` times, so each level costs one
    conjugacy class per distinct partial value instead of ``|G|``.
    """
    if p.order() * p.ngens > budget:
        raise BudgetExhausted(f"|G| * ngens = {p.order() * p.ngens} exceeds budget {budget}")
    classes = _Classes(p, budget)
    order = classes.order
    layer = {x: 1 for x in enumerate_elements(p)}
    for _ in range(n - 1):
        nxt: dict = {}
        for c, mult in layer.items():
            cls = classes(c)
            weight = mult * (order // len(cls))
            c_inv = ~c
            for d in cls:
                v = c_inv * d
                nxt[v] = nxt.get(v, 0) + weight
        layer = nxt
    return sum(mult * (order // len(classes(c))) for c, mult in layer.items())


def degree_of_nilpotency(p: PcPresentation, n: int = 1, mode: str = "exact", samples: int = 100_000,
                         confidence: float = 0.95, rng=None, budget: int = DEFAULT_TUPLE_BUDGET) -> DegreeReport:
    """Probability that a uniform (n+1)-tuple has trivial left-normed commutator."""
    if n < 1:
        raise ValueError("n must be positive")
    if not p.is_finite:
        raise InfiniteGroupError("degree of nilpotency needs a finite group; use degree_ball_estimate")
    order = p.order()
    if mode == "exact":
        total = order ** (n + 1)
        hits = _count_trivial_tuples_group(p, n, budget)
        return DegreeReport(n, "exact", Fraction(hits, total), total, hits)
    if mode == "montecarlo":
        if rng is None:
            raise ValueError("Monte Carlo mode needs a seeded rng")
        if order <= TABLE_LIMIT:
            hits = _table_hits(p, n, samples, rng)
        else:
            hits = 0
            for _ in range(samples):
                xs = [random_element(p, rng) for _ in range(n + 1)]
                if commutator(xs).is_identity():
                    hits += 1
        centre, half = wilson_interval(hits, samples, confidence)
        return DegreeReport(n, "montecarlo", centre, samples, hits, half, confidence)
    raise ValueError(f"unknown mode {mode!r}")


def _cayley(p: PcPresentation):
    elements = list(enumerate_elements(p))
    index = {g.exps: k for k, g in enumerate(elements)}
    mul = np.array([[index[(a * b).exps] for b in elements] for a in elements], dtype=np.int64)
    inv = np.array([index[(~a).exps] for a in elements], dtype=np.int64)
    return elements, index, mul, inv


def _table_hits(p: PcPresentation, n: int, samples: int, rng) -> int:
    # same sampling law as the generic path; tuples are evaluated through the Cayley table
    elements, index, mul, inv = _cayley(p)
    gen = np.random.default_rng(rng.getrandbits(64))
    xs = gen.integers(0, len(elements), size=(n + 1, samples))
    c = xs[0]
    for k in range(1, n + 1):
        y = xs[k]
        c = mul[mul[inv[c], inv[y]], mul[c, y]]
    return int(np.count_nonzero(c == index[p._zero]))


def degree_ball_estimate(p: PcPresentation, gens, n: int, m_max: int, exact_limit: int = 2_000_000,
                         samples: int = 20_000, rng=None) -> list:
    """Finite-radius approximations of the ball-based degree of n-nilpotency.

    Returns ``[(radius, ball size, ratio, exact?)]`` for radii ``0..m_max``.
    These are raw curve values, not the limsup.
    """
    out = []
    for m in range(m_max + 1):
        _, ball = growth_curve(p, gens, m)
        ball = sorted(ball)
        size = len(ball)
        if size ** (n + 1) <= exact_limit:
            hits = _count_trivial_tuples(ball, n)
            out.append((m, size, Fraction(hits, size ** (n + 1)), True))
        else:
            if rng is None:
                raise BudgetExhausted("ball too large for exact counting and no rng given for sampling")
            hits = sum(
                commutator([ball[rng.randrange(size)] for _ in range(n + 1)]).is_identity()
                for _ in range(samples)
            )
            out.append((m, size, hits / samples, False))
    return out


# ---------------------------------------------------------------------------
# structural invariants used by the bound checks


def center(p: PcPresentation) -> list:
    gens = p.gens()
    return [z for z in enumerate_elements(p) if all(z * g == g * z for g in gens)]


def subgroup_closure(p: PcPresentation, gens, max_items: int = 2_000_000) -> set:
    """Elements of the subgroup generated by ``gens`` (finite groups)."""
    one = p.identity()
    seen = {one}
    frontier = [one]
    gens = [g for g in gens if not g.is_identity()]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = x * g
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        if len(seen) > max_items:
            raise BudgetExhausted("subgroup closure exceeded its budget")
        frontier = nxt
    return seen


def _normal_closure(p, gens, max_items=2_000_000) -> set:
    G = p.gens()
    pool = list(gens)
    while True:
        H = subgroup_closure(p, pool, max_items)
        extra = [h.conj(g) for h in pool for g in G if h.conj(g) not in H]
        if not extra:
            return H
        pool.extend(extra)


def lower_central_series(p: PcPresentation, max_terms: int = 20, max_items: int = 2_000_000) -> list:
    """Orders of gamma_1, gamma_2, ... up to the trivial term or the first repeat."""
    G = p.gens()
    current = set(enumerate_elements(p)) if p.order() <= max_items else None
    if current is None:
        raise BudgetExhausted("group too large for a brute-force lower central series")
    sizes = [len(current)]
    gens = G
    for _ in range(max_terms):
        if len(current) == 1:
            return sizes
        comms = {commutator([h, g]) for h in gens for g in G}
        nxt = _normal_closure(p, [c for c in comms if not c.is_identity()], max_items)
        if len(nxt) == len(current):
            return sizes
        sizes.append(len(nxt))
        current = nxt
        gens = sorted(nxt)
    return sizes


def nilpotency_class(p: PcPresentation):
    """Nilpotency class, or ``None`` if the group is not nilpotent."""
    sizes = lower_central_series(p)
    if sizes[-1] != 1:
        return None
    return len(sizes) - 1


def exponent(p: PcPresentation) -> int:
    return math.lcm(*(element_order(x) for x in enumerate_elements(p)))


@dataclass
class BoundsReport:
    n: int
    degree: Fraction
    order: int
    nilpotency_class: int | None
    trivial_center: bool
    checks: list = field(default_factory=list)   # (name, applicable, holds, detail)

    @property
    def all_hold(self) -> bool:
        return all(h for _, applicable, h, _ in self.checks if applicable)


def check_degree_bounds(p: PcPresentation, n: int = 1) -> BoundsReport:
    """Evaluate the degree bounds and the 5/8 and 1/2 implications on ``p``."""
    d = degree_of_nilpotency(p, n, "exact").value
    cls = nilpotency_class(p)
    z = center(p)
    trivial_center = len(z) == 1 and p.order() > 1
    report = BoundsReport(n, d, p.order(), cls, trivial_center)

    not_class_n = cls is None or cls > n
    bound1 = Fraction(2 ** (n + 2) - 3, 2 ** (n + 2))
    report.checks.append(("not-class-n bound", not_class_n, (d <= bound1) if not_class_n else True,
                          f"d={d} <= {bound1}"))
    bound2 = Fraction(2 ** n - 1, 2 ** n)
    report.checks.append(("trivial-center bound", trivial_center, (d <= bound2) if trivial_center else True,
                          f"d={d} <= {bound2}"))
    if n == 1:
        abelian = cls is not None and cls <= 1
        report.checks.append(("d > 5/8 implies abelian", d > Fraction(5, 8), abelian or d <= Fraction(5, 8),
                              f"d={d}, abelian={abelian}"))
        report.checks.append(("d > 1/2 implies nilpotent", d > Fraction(1, 2), cls is not None or d <= Fraction(1, 2),
                              f"d={d}, nilpotent={cls is not None}"))
        report.checks.append(("d = 1 iff abelian", True, (d == 1) == (cls is not None and cls <= 1),
                              f"d={d}"))
    return report
