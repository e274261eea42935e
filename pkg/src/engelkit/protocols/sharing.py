"""Secret sharing through the word problem.

A bit is hidden in a word: ``1`` is a product of conjugated relators (trivial
in the participant's group), ``0`` a random word checked to be nontrivial.
Only someone who knows the group (sent over the secure channel) can read the
bits off the openly transmitted words.

Scheme 1 is (n, n): the bit column is XOR-split into n columns.  Scheme 2 is
(t, n): Shamir shares ``f(i) mod p`` are written as bit columns and carried
the same way.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

from sympy import isprime

from engelkit.algorithms import random_nontrivial_word, random_trivial_word, word_problem
from engelkit.errors import ProtocolError
from engelkit.pc import FreeWord, PcPresentation

DEFAULT_FACTORS = 8
DEFAULT_CONJUGATOR_LENGTH = 16
DEFAULT_NOISE_LENGTH = 16


@dataclass(frozen=True)
class ShareColumn:
    bits: tuple

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if not bits:
            raise ValueError("a share column needs at least one bit")
        if any(b not in (0, 1) for b in bits):
            raise ValueError("bits must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    def __len__(self):
        return len(self.bits)

    def __xor__(self, other: ShareColumn) -> ShareColumn:
        if len(self) != len(other):
            raise ValueError("columns differ in length")
        return ShareColumn(tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    @classmethod
    def random(cls, k: int, rng) -> ShareColumn:
        return cls(tuple(rng.randrange(2) for _ in range(k)))

    @classmethod
    def from_int(cls, value: int, k: int) -> ShareColumn:
        if not 0 <= value < 2**k:
            raise ValueError(f"{value} does not fit in {k} bits")
        return cls(tuple((value >> (k - 1 - i)) & 1 for i in range(k)))

    def to_int(self) -> int:
        return reduce(lambda acc, b: (acc << 1) | b, self.bits, 0)


@dataclass
class SharePackage:
    """What participant ``index`` receives.

    ``group`` travels over the secure channel; ``words`` over the open one.
    ``point`` is the Shamir abscissa for Scheme 2 (``None`` for Scheme 1).
    """

    index: int
    group: PcPresentation
    words: list = field(default_factory=list)
    point: int | None = None


def encode_column(column: ShareColumn, group: PcPresentation, rng, factors=DEFAULT_FACTORS,
                  conjugator_length=DEFAULT_CONJUGATOR_LENGTH, noise_length=DEFAULT_NOISE_LENGTH) -> list:
    words = []
    for bit in column.bits:
        if bit:
            words.append(random_trivial_word(group, factors, conjugator_length, rng))
        else:
            words.append(random_nontrivial_word(group, noise_length, rng))
    return words


def decode_words(words, group: PcPresentation) -> ShareColumn:
    return ShareColumn(tuple(1 if word_problem(group, w) else 0 for w in words))


def decode_package(package: SharePackage) -> ShareColumn:
    return decode_words(package.words, package.group)


def _choose_groups(n: int, groups, rng) -> list:
    groups = list(groups)
    if not groups:
        raise ValueError("need at least one platform group")
    if len(groups) == n:
        return groups
    return [groups[rng.randrange(len(groups))] for _ in range(n)]


def xor_split(secret: ShareColumn, n: int, rng) -> list:
    """``n`` columns, the first ``n-1`` uniform, XOR-ing to ``secret``."""
    columns = [ShareColumn.random(len(secret), rng) for _ in range(n - 1)]
    columns.append(reduce(lambda a, b: a ^ b, columns, secret))
    return columns


def sss1_deal(secret: ShareColumn, n: int, groups, rng, **word_options) -> list:
    """Split ``secret`` into ``n`` word-encoded XOR shares."""
    if n < 1:
        raise ValueError("need at least one participant")
    columns = xor_split(secret, n, rng)
    chosen = _choose_groups(n, groups, rng)
    return [
        SharePackage(j + 1, G, encode_column(col, G, rng, **word_options))
        for j, (col, G) in enumerate(zip(columns, chosen))
    ]


def sss1_reconstruct(columns, n: int) -> ShareColumn:
    """XOR of all ``n`` decoded columns; every participant must contribute."""
    columns = list(columns)
    if len(columns) != n:
        raise ProtocolError(f"(n,n) scheme: need all {n} columns, got {len(columns)}")
    return reduce(lambda a, b: a ^ b, columns)


def share_width(prime: int) -> int:
    return prime.bit_length()


def shamir_shares(secret: int, t: int, n: int, prime: int, rng) -> list:
    """``[(i, f(i) mod p)]`` for a random degree ``t-1`` polynomial with ``f(0) = secret``."""
    if not isprime(prime):
        raise ValueError(f"{prime} is not prime")
    if prime <= n:
        raise ValueError("prime must exceed the number of participants")
    if not 2 <= t <= n:
        raise ValueError("threshold must satisfy 2 <= t <= n")
    if not 0 <= secret < prime:
        raise ValueError("secret must lie in [0, p)")
    coeffs = [secret] + [rng.randrange(prime) for _ in range(t - 1)]

    def f(v):
        acc = 0
        for c in reversed(coeffs):
            acc = (acc * v + c) % prime
        return acc

    return [(i, f(i)) for i in range(1, n + 1)]


def sss2_deal(secret: int, t: int, n: int, prime: int, groups, rng, **word_options) -> list:
    """Shamir shares carried as word columns of width ``prime.bit_length()``."""
    shares = shamir_shares(secret, t, n, prime, rng)
    k = share_width(prime)
    chosen = _choose_groups(n, groups, rng)
    return [
        SharePackage(i, G, encode_column(ShareColumn.from_int(y, k), G, rng, **word_options), point=i)
        for (i, y), G in zip(shares, chosen)
    ]


def sss2_reconstruct(shares, t: int, prime: int) -> int:
    """Lagrange interpolation at 0 over ``Z_p`` from at least ``t`` points ``(i, y_i)``."""
    shares = list(shares)
    xs = [x % prime for x, _ in shares]
    if len(set(xs)) != len(xs):
        raise ProtocolError("duplicate share abscissae")
    if len(shares) < t:
        raise ProtocolError(f"need at least {t} shares, got {len(shares)}")
    secret = 0
    for j, (xj, yj) in enumerate(shares):
        num, den = 1, 1
        for m, (xm, _) in enumerate(shares):
            if m != j:
                num = num * (-xm) % prime
                den = den * (xj - xm) % prime
        secret = (secret + yj * num * pow(den, -1, prime)) % prime
    return secret
