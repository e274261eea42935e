"""Key exchange in the holomorph ``G x| <phi>``.

``(g, phi^r)(h, phi^s) = (phi^s(g) h, phi^(r+s))``.  Alice publishes the first
component ``a`` of ``(g, phi)^m``, Bob the first component ``b`` of
``(g, phi)^n``; both keys equal the first component of ``(g, phi)^(m+n)``.
"""

from __future__ import annotations

from engelkit.catalog import GroupHom, HolomorphElement, hom_is_invertible
from engelkit.errors import PresentationMismatch, ProtocolError


def holomorph_mul(u: HolomorphElement, v: HolomorphElement) -> HolomorphElement:
    if u.phi is not v.phi and u.phi != v.phi:
        raise PresentationMismatch("holomorph elements use different automorphisms")
    return HolomorphElement(u.phi.power(v.r)(u.g) * v.g, u.r + v.r, u.phi)


def holomorph_pow(u: HolomorphElement, m: int) -> HolomorphElement:
    """``u^m`` for ``m >= 1`` by square-and-multiply."""
    if m < 1:
        raise ValueError("exponent must be positive")
    result = None
    base = u
    while m:
        if m & 1:
            result = base if result is None else holomorph_mul(result, base)
        m >>= 1
        if m:
            base = holomorph_mul(base, base)
    return result


_INVERTIBLE: dict = {}


def check_automorphism(phi: GroupHom) -> None:
    key = id(phi)
    if key not in _INVERTIBLE:
        ok, _ = hom_is_invertible(phi)
        _INVERTIBLE[key] = (ok, phi)
    if not _INVERTIBLE[key][0]:
        raise ProtocolError("phi is not an automorphism")


def sdpkex_public(g, phi: GroupHom, secret: int):
    """First component of ``(g, phi)^secret``."""
    return holomorph_pow(HolomorphElement(g, 1, phi), secret).g


def sdpkex_key(phi: GroupHom, own_secret: int, own_public, peer_public):
    """``phi^own(peer) * own_public``."""
    return phi.power(own_secret)(peer_public) * own_public


def sdpkex_run(g, phi: GroupHom, alice_m: int, bob_n: int):
    """Returns ``(K_A, K_B, (a, b))``."""
    if alice_m < 1 or bob_n < 1:
        raise ProtocolError("private exponents must be positive")
    check_automorphism(phi)
    a = sdpkex_public(g, phi, alice_m)
    b = sdpkex_public(g, phi, bob_n)
    return sdpkex_key(phi, alice_m, a, b), sdpkex_key(phi, bob_n, b, a), (a, b)
