"""Pluggable public-key cryptosystems with deterministic cost accounting."""

from .base import REJECT, KeyPair, Scheme, unwrap_chain
from .cramer_shoup import (
    CsGroup,
    CsPublicKey,
    CsScheme,
    CsSecretKey,
    cs_decrypt,
    cs_encrypt,
    cs_keygen,
    cs_keygen_from_group,
    cs_keypair_from_exponents,
    make_group,
)
from .gm import (
    GmPublicKey,
    GmScheme,
    GmSecretKey,
    gm_decrypt_component,
    gm_encrypt_bit,
    gm_keygen,
    gm_keypair_from_primes,
)
from .leaky import LeakProfile, LeakyScheme, leaky_wrap

__all__ = [
    "REJECT",
    "KeyPair",
    "Scheme",
    "unwrap_chain",
    "CsGroup",
    "CsPublicKey",
    "CsScheme",
    "CsSecretKey",
    "cs_decrypt",
    "cs_encrypt",
    "cs_keygen",
    "cs_keygen_from_group",
    "cs_keypair_from_exponents",
    "make_group",
    "GmPublicKey",
    "GmScheme",
    "GmSecretKey",
    "gm_decrypt_component",
    "gm_encrypt_bit",
    "gm_keygen",
    "gm_keypair_from_primes",
    "LeakProfile",
    "LeakyScheme",
    "leaky_wrap",
]
