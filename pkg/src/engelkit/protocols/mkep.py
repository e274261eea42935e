"""Multi-party key agreement from the multilinearity of commutators.

In a nilpotent group of class n+1, ``[g_1^{a_1}, .., g_k^{a_k}] = [g_1, .., g_k]^{a_1 .. a_k}``.
User j publishes ``g^{a_j}`` and computes ``[x^{a_j}, g^{a_i} (i != j)]``; every user
lands on ``[x,_n g]^{prod a}``.
"""

from __future__ import annotations

import math

from engelkit.errors import ProtocolError
from engelkit.pc import INFINITY, GroupElement, commutator, element_order, engel_commutator


def _check_setup(x: GroupElement, g: GroupElement, users: int) -> GroupElement:
    if users < 2:
        raise ProtocolError("need at least two users")
    base = engel_commutator(x, g, users - 1)
    if base.is_identity():
        raise ProtocolError(f"degenerate setup: [x,_{users - 1} g] = 1")
    return base


def mkep_user_key(x: GroupElement, own_secret: int, others_public) -> GroupElement:
    """The key as computed by one user from its secret and the other users' ``g^{a_i}`` (in user order)."""
    if own_secret == 0:
        raise ProtocolError("private exponents must be nonzero")
    return commutator([x ** own_secret, *others_public])


def mkep_expected_key(x: GroupElement, g: GroupElement, secrets) -> GroupElement:
    return engel_commutator(x, g, len(secrets) - 1) ** math.prod(secrets)


def mkep_run(x: GroupElement, g: GroupElement, secrets) -> list:
    """Run the protocol for ``len(secrets)`` users; returns every user's key."""
    secrets = list(secrets)
    _check_setup(x, g, len(secrets))
    if any(a == 0 for a in secrets):
        raise ProtocolError("private exponents must be nonzero")
    public = [g ** a for a in secrets]
    keys = []
    for j, a in enumerate(secrets):
        keys.append(mkep_user_key(x, a, public[:j] + public[j + 1:]))
    return keys


def sample_mkep_secrets(x: GroupElement, g: GroupElement, users: int, rng, bound: int | None = None) -> list:
    """Nonzero exponents in ``[1, bound)`` whose product does not annihilate the key.

    ``bound`` defaults to the order of ``g`` when finite, else 2^32.
    """
    base = _check_setup(x, g, users)
    key_order = element_order(base)
    if bound is None:
        og = element_order(g)
        bound = og if og != INFINITY else 2**32
    while True:
        secrets = [rng.randrange(1, bound) for _ in range(users)]
        if key_order == INFINITY or math.prod(secrets) % key_order:
            return secrets
