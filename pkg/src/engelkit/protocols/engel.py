"""Key exchange in 2-Engel groups and the 4-Engel signature.

Both rest on positive laws: ``xy^2x = yx^2y`` in 2-Engel groups, and the long
4-Engel law whose sides split into public pieces

    LHS = S y P Y P y S y P y T y P y
    RHS = y P y T y P y S y P Y P y S

with ``P = x^2``, ``Y = y^2``, ``S = xy^2x`` and ``T = xy^2x^2y^2x``.  That split
is how :func:`engel4_verify` checks a signature from the public tokens and
the verifier's ``y`` alone.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from engelkit.errors import ProtocolError
from engelkit.pc import PcPresentation, random_element


_ENGEL2_CHECKED: dict = {}


def _require_2engel(p: PcPresentation, samples: int = 200):
    from engelkit.analysis import is_n_engel

    key = id(p)
    if key not in _ENGEL2_CHECKED:
        mode = "exhaustive" if p.is_finite and p.order() <= 81 else "sampled"
        _ENGEL2_CHECKED[key] = bool(is_n_engel(p, 2, mode, samples=samples, rng=random.Random(0)))
    if not _ENGEL2_CHECKED[key]:
        raise ProtocolError(f"{p.label or 'group'} failed the 2-Engel check")


def engel2_keyexchange(x, y, check: bool = True):
    """Returns ``(alice_key, bob_key, (x^2, y^2))``."""
    if check and hasattr(x, "pres"):
        _require_2engel(x.pres)
    x2, y2 = x * x, y * y
    alice = x * y2 * x
    bob = y * x2 * y
    return alice, bob, (x2, y2)


def engel4_sign(x, y) -> tuple:
    """Tokens ``(x^2, y^2, xy^2x, xy^2x^2y^2x)``."""
    x2, y2 = x * x, y * y
    s = x * y2 * x
    t = x * y2 * x2 * y2 * x
    return x2, y2, s, t


def _assemble(y, tokens):
    P, Y, S, T = tokens
    lhs = [S, y, P, Y, P, y, S, y, P, y, T, y, P, y]
    rhs = [y, P, y, T, y, P, y, S, y, P, Y, P, y, S]

    def prod(items):
        out = items[0]
        for z in items[1:]:
            out = out * z
        return out

    return prod(lhs), prod(rhs)


def engel4_verify(y, tokens, public_key=None) -> bool:
    """Accept iff the tokens are well formed and both assembled law sides agree."""
    if len(tokens) != 4:
        raise ProtocolError("a signature has exactly four tokens")
    P, Y, S, T = tokens
    if public_key is not None and P != public_key:
        return False
    if Y != y * y:
        return False
    lhs, rhs = _assemble(y, tokens)
    return lhs == rhs


def engel4_verify_reference(x, y) -> bool:
    """Check the 4-Engel law directly with both secrets (testing aid)."""
    return engel4_verify(y, engel4_sign(x, y))


# -- direct product with a unit group (platform hardening) --------------------


@dataclass(frozen=True)
class RingUnitElement:
    """``(g, u)`` in ``G x Z_N^*``, multiplied componentwise."""

    g: object
    u: int
    modulus: int

    def __mul__(self, other):
        return RingUnitElement(self.g * other.g, self.u * other.u % self.modulus, self.modulus)

    def __invert__(self):
        return RingUnitElement(~self.g, pow(self.u, -1, self.modulus), self.modulus)

    def __pow__(self, k):
        return RingUnitElement(self.g ** k, pow(self.u, k, self.modulus), self.modulus)

    def is_identity(self):
        return self.g.is_identity() and self.u == 1


@dataclass(frozen=True)
class RingUnitPlatform:
    """An Engel platform combined with the units modulo ``N = pq``."""

    group: PcPresentation
    modulus: int

    def element(self, g, u: int) -> RingUnitElement:
        if math.gcd(u, self.modulus) != 1:
            raise ValueError("unit component must be coprime to the modulus")
        return RingUnitElement(g, u % self.modulus, self.modulus)

    def random(self, rng) -> RingUnitElement:
        while True:
            u = rng.randrange(1, self.modulus)
            if math.gcd(u, self.modulus) == 1:
                return RingUnitElement(random_element(self.group, rng), u, self.modulus)
