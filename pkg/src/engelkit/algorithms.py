"""Solvers for decision and search problems over pc groups.

Search functions return ``None`` when the answer is provably absent and raise
:class:`~engelkit.errors.BudgetExhausted` when they stop without knowing.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from engelkit.errors import BudgetExhausted, InfiniteGroupError, PresentationMismatch
from engelkit.pc import (
    FreeWord,
    GroupElement,
    PcPresentation,
    collect,
    element_order,
    enumerate_elements,
    INFINITY,
)


@dataclass(frozen=True)
class SearchBudget:
    max_steps: int = 10**7
    max_memory_items: int = 10**6
    time_hint: float | None = None

    def __post_init__(self):
        if self.max_steps <= 0 or self.max_memory_items <= 0:
            raise ValueError("budgets must be positive")


DEFAULT_BUDGET = SearchBudget()


class _Counter:
    def __init__(self, budget: SearchBudget, what: str):
        self.left = budget.max_steps
        self.what = what

    def tick(self, k: int = 1):
        self.left -= k
        if self.left < 0:
            raise BudgetExhausted(f"{self.what}: step budget exhausted")


def word_problem(p: PcPresentation, w: FreeWord) -> bool:
    """True iff ``w`` represents the identity."""
    return collect(p, w).is_identity()


def power_decision(x: GroupElement, y: GroupElement, budget: SearchBudget = DEFAULT_BUDGET):
    """Some ``n`` with ``y = x^n`` (least nonnegative when ``x`` has finite order), else ``None``.

    Walks down the polycyclic series: the leading exponent of ``x`` pins ``n``
    exactly (torsion-free factor) or modulo the order of its image (finite
    factor); in the latter case the problem moves to ``x^m`` one level down.
    """
    x._same(y)
    p = x.pres
    counter = _Counter(budget, "power problem")
    offset, stride = 0, 1
    cur_x, cur_y = x, y
    while True:
        counter.tick()
        k = next((j for j, e in enumerate(cur_x.exps) if e), None)
        if k is None:
            if not cur_y.is_identity():
                return None
            break
        lead_y = next((j for j, e in enumerate(cur_y.exps) if e), None)
        if lead_y is not None and lead_y < k:
            return None
        a, b = cur_x.exps[k], cur_y.exps[k]
        r = p.relative_orders[k]
        if r is None:
            if b % a:
                return None
            t = b // a
            if cur_x ** t != cur_y:
                return None
            offset += stride * t
            break
        g = math.gcd(a, r)
        if b % g:
            return None
        m = r // g
        t0 = (b // g) * pow(a // g, -1, m) % m if m > 1 else 0
        offset += stride * t0
        cur_y = ~(cur_x ** t0) * cur_y
        cur_x = cur_x ** m
        stride *= m
    order = element_order(x)
    if order != INFINITY:
        offset %= order
    if x ** offset != y:
        raise AssertionError("power decision produced an unverified exponent")
    return offset


def generalized_dlp(p: PcPresentation, basis, y: GroupElement) -> tuple:
    """Exponents ``(a_1..a_n)`` with ``prod basis_i^{a_i} = y`` for the pc generating sequence."""
    if [b.exps for b in basis] != [g.exps for g in p.gens()]:
        raise ValueError("basis must be the presentation's polycyclic generating sequence")
    if y.pres != p:
        raise PresentationMismatch("target element outside the presentation")
    return y.exps


def dlp_cyclic(x: GroupElement, y: GroupElement, budget: SearchBudget = DEFAULT_BUDGET):
    """Least ``n >= 0`` with ``x^n = y`` by baby-step giant-step, or ``None``."""
    x._same(y)
    order = element_order(x)
    if order == INFINITY:
        raise InfiniteGroupError("baby-step giant-step needs an element of finite order")
    m = math.isqrt(order - 1) + 1 if order > 1 else 1
    if m > budget.max_memory_items:
        raise BudgetExhausted(f"baby-step table of {m} entries exceeds the memory budget")
    table = {}
    cur = x.pres.identity()
    for j in range(m):
        table.setdefault(cur, j)
        cur = cur * x
    giant = ~(x ** m)
    gamma = y
    for i in range(m + 1):
        j = table.get(gamma)
        if j is not None:
            n = i * m + j
            if n < order:
                return n
        gamma = gamma * giant
    return None


def _finite(p: PcPresentation, what: str):
    if not p.is_finite:
        raise InfiniteGroupError(f"{what} is only supported for finite groups")


def nth_root(a: GroupElement, n: int, budget: SearchBudget = DEFAULT_BUDGET, mode: str = "any"):
    """Solutions of ``x^n = a`` by exhaustive scan.

    ``mode='any'`` returns one witness or ``None``; ``mode='all'`` returns the
    sorted list of every solution.
    """
    if n < 1:
        raise ValueError("n must be positive")
    p = a.pres
    _finite(p, "root extraction")
    if mode not in ("any", "all"):
        raise ValueError("mode must be 'any' or 'all'")
    if p.order() > budget.max_steps:
        raise BudgetExhausted("group larger than the step budget")
    found = []
    for x in enumerate_elements(p):
        if x ** n == a:
            if mode == "any":
                return x
            found.append(x)
    return found if mode == "all" else None


def conjugacy_search(pairs, variant: str = "single", budget: SearchBudget = DEFAULT_BUDGET):
    """Find a conjugator by exhaustive scan.

    ``single``/``multiple``: ``c`` with ``a_i^c = b_i`` for all pairs.
    ``power``: one pair ``(x, y)``; returns ``(n, g)`` with ``x^n = y^g``.
    The first witness in normal-form order is returned, or ``None``.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("need at least one pair")
    p = pairs[0][0].pres
    _finite(p, "conjugacy search")
    counter = _Counter(budget, "conjugacy search")
    if variant in ("single", "multiple"):
        if variant == "single" and len(pairs) != 1:
            raise ValueError("single variant takes exactly one pair")
        candidates = None
        for a, b in pairs:
            a._same(b)
            sols = []
            pool = enumerate_elements(p) if candidates is None else candidates
            for c in pool:
                counter.tick()
                if a.conj(c) == b:
                    sols.append(c)
            candidates = sols
            if not candidates:
                return None
        c = candidates[0]
        if not all(a.conj(c) == b for a, b in pairs):
            raise AssertionError("conjugator failed re-verification")
        return c
    if variant == "power":
        if len(pairs) != 1:
            raise ValueError("power variant takes exactly one pair")
        x, y = pairs[0]
        x._same(y)
        elements = list(enumerate_elements(p))
        exp_g = math.lcm(*(element_order(g) for g in elements))
        conj_y = [(g, y.conj(g)) for g in elements]
        xn = p.identity()
        for n in range(1, exp_g + 1):
            xn = xn * x
            for g, yg in conj_y:
                counter.tick()
                if yg == xn:
                    if x ** n != y.conj(g):
                        raise AssertionError("power conjugator failed re-verification")
                    return n, g
        return None
    raise ValueError(f"unknown variant {variant!r}")


def geodesic_length(p: PcPresentation, gens, g: GroupElement, budget: SearchBudget = DEFAULT_BUDGET):
    """``(l_X(g), witness)``; the witness is a word over ``gens`` (index into ``gens``).

    Breadth-first search over products of ``gens`` and their inverses; the
    first word found in letter order is returned.
    """
    gens = list(gens)
    letters = [(k, s) for k in range(len(gens)) for s in (1, -1)]
    moves = [(gens[k] if s == 1 else ~gens[k]).exps for k, s in letters]
    start = p._zero
    steps = p.steps(10**12)
    parent = {start: None}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        if v == g.exps:
            word = []
            while parent[v] is not None:
                v, letter = parent[v]
                word.append(letter)
            word.reverse()
            return len(word), FreeWord(tuple(word), len(gens))
        for letter, h in zip(letters, moves):
            w = p._mul(v, h, steps)
            if w not in parent:
                parent[w] = (v, letter)
                queue.append(w)
        if len(parent) > budget.max_memory_items:
            raise BudgetExhausted("geodesic search exceeded the memory budget")
    return None


def subgroup_membership(p: PcPresentation, h_gens, g: GroupElement,
                        budget: SearchBudget = DEFAULT_BUDGET) -> bool:
    from engelkit.analysis import subgroup_closure

    _finite(p, "subgroup membership")
    H = subgroup_closure(p, list(h_gens), budget.max_memory_items)
    if p.order() % len(H):
        raise AssertionError("subgroup order does not divide the group order")
    return g in H


def random_free_word(alphabet: int, length: int, rng) -> FreeWord:
    return FreeWord(tuple((rng.randrange(alphabet), rng.choice((1, -1))) for _ in range(length)), alphabet)


def random_trivial_word(p: PcPresentation, factors: int = 8, conjugator_length: int = 16, rng=None,
                        relators=None) -> FreeWord:
    """A product of conjugates of relators and their inverses; always trivial in ``p``."""
    if rng is None:
        raise ValueError("an rng is required")
    rels = list(relators) if relators is not None else p.relators()
    if factors and not rels:
        raise ValueError("presentation has no relators")
    w = FreeWord((), p.ngens)
    for _ in range(factors):
        u = random_free_word(p.ngens, rng.randint(0, conjugator_length), rng)
        r = rels[rng.randrange(len(rels))]
        if rng.random() < 0.5:
            r = r.inverse()
        w = w + u + r + u.inverse()
    return w


def random_nontrivial_word(p: PcPresentation, length: int = 16, rng=None, max_tries: int = 1000) -> FreeWord:
    """A random word resampled until it is not the identity in ``p``."""
    if rng is None:
        raise ValueError("an rng is required")
    for _ in range(max_tries):
        w = random_free_word(p.ngens, length, rng)
        if not word_problem(p, w):
            return w
    raise BudgetExhausted("no nontrivial word found within the resampling budget")
