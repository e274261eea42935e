"""Reference implementations that share no code with engelkit.

Coset enumeration for group orders from finite presentations, integer
matrices for the Heisenberg group, permutations for small classical groups.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


# -- Todd-Coxeter (HLT with union-find coincidences) --------------------------


class CosetOverflow(Exception):
    pass


def coset_enumeration(ngens: int, relators, max_cosets: int = 200_000) -> int:
    """Index of the trivial subgroup, i.e. the group order."""
    return len(coset_table(ngens, relators, max_cosets))


def coset_table(ngens: int, relators, max_cosets: int = 200_000) -> list:
    """Regular action of the presented group: ``table[c][col]`` with coset 0 = identity.

    Column ``2*i`` is generator ``i+1``, column ``2*i+1`` its inverse.

    Relators are sequences of nonzero ints: ``i`` is generator ``i`` (1-based),
    ``-i`` its inverse.
    """
    ncols = 2 * ngens
    rels = [[2 * (abs(a) - 1) + (a < 0) for a in r] for r in relators]
    table = [[None] * ncols]
    parent = [0]

    def define(c, x):
        if len(table) >= max_cosets:
            raise CosetOverflow(max_cosets)
        d = len(table)
        table.append([None] * ncols)
        parent.append(d)
        table[c][x] = d
        table[d][x ^ 1] = c

    def rep(c):
        root = c
        while parent[root] != root:
            root = parent[root]
        while parent[c] != root:
            parent[c], c = root, parent[c]
        return root

    def merge(a, b, queue):
        a, b = rep(a), rep(b)
        if a == b:
            return
        if b < a:
            a, b = b, a
        parent[b] = a
        queue.append(b)

    def coincidence(a, b):
        queue = []
        merge(a, b, queue)
        i = 0
        while i < len(queue):
            e = queue[i]
            i += 1
            for x in range(ncols):
                f = table[e][x]
                if f is None:
                    continue
                table[f][x ^ 1] = None
                e1, f1 = rep(e), rep(f)
                if table[e1][x] is not None:
                    merge(f1, table[e1][x], queue)
                elif table[f1][x ^ 1] is not None:
                    merge(e1, table[f1][x ^ 1], queue)
                else:
                    table[e1][x] = f1
                    table[f1][x ^ 1] = e1

    def scan_and_fill(c, w):
        f, b = c, c
        i, j = 0, len(w) - 1
        while True:
            while i <= j and table[f][w[i]] is not None:
                f = table[f][w[i]]
                i += 1
            if i > j:
                if f != b:
                    coincidence(f, b)
                return
            while j >= i and table[b][w[j] ^ 1] is not None:
                b = table[b][w[j] ^ 1]
                j -= 1
            if j < i:
                coincidence(f, b)
                return
            if i == j:
                table[f][w[i]] = b
                table[b][w[i] ^ 1] = f
                return
            define(f, w[i])

    c = 0
    while c < len(table):
        for r in rels:
            if parent[c] != c:
                break
            scan_and_fill(c, r)
        if parent[c] == c:
            for x in range(ncols):
                if table[c][x] is None:
                    define(c, x)
        c += 1
    live = [k for k in range(len(table)) if parent[k] == k]
    renum = {k: n for n, k in enumerate(live)}
    return [[renum[rep(table[k][x])] for x in range(ncols)] for k in live]


def trace(table, coset: int, letters) -> int:
    """Follow ``(index, exponent)`` letters (0-based generators) from ``coset``."""
    for i, e in letters:
        col = 2 * i + (e < 0)
        for _ in range(abs(e)):
            coset = table[coset][col]
    return coset


def pc_relators_as_ints(p) -> list:
    out = []
    for w in p.relators():
        r = []
        for i, e in w.letters:
            r.extend([(i + 1) if e > 0 else -(i + 1)] * abs(e))
        out.append(r)
    return out


def _reduced_words(ngens: int, length: int):
    letters = [g for i in range(1, ngens + 1) for g in (i, -i)]
    for w in itertools.product(letters, repeat=length):
        if all(w[k] != -w[k + 1] for k in range(length - 1)):
            yield w


def exponent3_relators(ngens: int, max_len: int = 3) -> list:
    """Cubes of all reduced words up to ``max_len``, one per cyclic/inverse class."""
    seen = set()
    out = []
    for n in range(1, max_len + 1):
        for w in _reduced_words(ngens, n):
            if n > 1 and w[0] == -w[-1]:
                continue
            variants = set()
            for v in (w, tuple(-a for a in reversed(w))):
                for s in range(n):
                    variants.add(v[s:] + v[:s])
            key = min(variants)
            if key in seen:
                continue
            seen.add(key)
            out.append(list(w) * 3)
    return out


# -- Heisenberg as upper unitriangular integer matrices ------------------------


def mat_mul(A, B):
    return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(3)) for j in range(3)) for i in range(3))


def mat_inv(A):
    # unitriangular 3x3
    a, b, c = A[0][1], A[1][2], A[0][2]
    return ((1, -a, a * b - c), (0, 1, -b), (0, 0, 1))


def mat_pow(A, k):
    if k < 0:
        return mat_pow(mat_inv(A), -k)
    out = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    base = A
    while k:
        if k & 1:
            out = mat_mul(out, base)
        base = mat_mul(base, base)
        k >>= 1
    return out


def mat_comm(A, B):
    return mat_mul(mat_mul(mat_inv(A), mat_inv(B)), mat_mul(A, B))


UT_A = ((1, 1, 0), (0, 1, 0), (0, 0, 1))
UT_B = ((1, 0, 0), (0, 1, 1), (0, 0, 1))
UT_C = mat_comm(UT_A, UT_B)


def ut_from_exponents(e):
    return mat_mul(mat_mul(mat_pow(UT_A, e[0]), mat_pow(UT_B, e[1])), mat_pow(UT_C, e[2]))


# -- permutations --------------------------------------------------------------


def perm_mul(p, q):
    """Apply ``p`` then ``q`` (right action, matching x*y = 'x first')."""
    return tuple(q[p[i]] for i in range(len(p)))


def perm_inv(p):
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


def perm_closure(gens):
    ident = tuple(range(len(gens[0])))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = perm_mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def brute_degree(elements, mul, inv, ident) -> Fraction:
    hits = 0
    for x in elements:
        for y in elements:
            if mul(mul(inv(x), inv(y)), mul(x, y)) == ident:
                hits += 1
    return Fraction(hits, len(elements) ** 2)


# -- quaternions as 2x2 complex (Gaussian-integer) matrices -------------------


def q_mul(A, B):
    return tuple(
        tuple(sum(A[i][k] * B[k][j] for k in range(2)) for j in range(2)) for i in range(2)
    )


def q_inv(A):
    # unitary with determinant 1: inverse is conjugate transpose
    return tuple(tuple(A[j][i].conjugate() for j in range(2)) for i in range(2))


Q_I = ((1j, 0), (0, -1j))
Q_J = ((0, 1), (-1, 0))
