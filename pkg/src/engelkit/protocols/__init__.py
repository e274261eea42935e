"""Key agreement, signature, secret sharing and sampling protocols over pc groups."""

from engelkit.protocols.engel import (
    RingUnitElement,
    RingUnitPlatform,
    engel2_keyexchange,
    engel4_sign,
    engel4_verify,
    engel4_verify_reference,
)
from engelkit.protocols.lhn import lhn_sample
from engelkit.protocols.mkep import mkep_expected_key, mkep_run, mkep_user_key, sample_mkep_secrets
from engelkit.protocols.semidirect import holomorph_mul, holomorph_pow, sdpkex_run
from engelkit.protocols.sharing import (
    ShareColumn,
    SharePackage,
    decode_package,
    sss1_deal,
    xor_split,
    sss1_reconstruct,
    sss2_deal,
    sss2_reconstruct,
)

__all__ = [
    "RingUnitElement", "RingUnitPlatform", "engel2_keyexchange", "engel4_sign", "engel4_verify",
    "engel4_verify_reference", "lhn_sample", "mkep_expected_key", "mkep_run", "mkep_user_key",
    "sample_mkep_secrets", "holomorph_mul", "holomorph_pow", "sdpkex_run", "ShareColumn",
    "SharePackage", "decode_package", "sss1_deal", "sss1_reconstruct", "xor_split", "sss2_deal", "sss2_reconstruct",
]
