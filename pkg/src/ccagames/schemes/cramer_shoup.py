"""Cramer-Shoup encryption over a prime-order subgroup of Z_p*.

Keys: c = g1^x1 * g2^x2, d = g1^y1 * g2^y2, h = g1^z (mod p), with g1,
g2 of exact prime order q dividing p - 1. Encryption of a subgroup
element m with randomness r in [1, q-1]:

    u1 = g1^r,  u2 = g2^r,  e = h^r * m,
    alpha = H(u1, u2, e) mod q,  v = c^r * d^(r * alpha).

Decryption recomputes v from (u1, u2, e) and the secret exponents and
rejects on mismatch; the rejection path performs the same ledgered work
as the accept path unless an early-abort comparison is requested.

All game-visible exponentiations go through the constant-cost ladder at
width bitlen(p), so the base scheme's cost profile is input-independent;
timing leaks are introduced only by the leak-profile wrapper.

H is SHA-256 over the canonical encoding of (u1, u2, e) reduced mod q;
a toy concatenate-and-reduce hash is available for hand-checkable
tiny-group tests.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

from ..errors import DomainError, SearchExhaustedError
from ..numtheory import CostLedger, gen_prime, is_probable_prime, mod_mul, mod_pow_ladder
from ..serialize import encode_naturals
from .base import REJECT, KeyPair, Scheme

HASH_IDS = ("sha256", "toy")


@dataclass(frozen=True)
class CsGroup:
    p: int
    q: int  # prime, q | p - 1
    g1: int
    g2: int


@dataclass(frozen=True)
class CsPublicKey:
    group: CsGroup
    c: int
    d: int
    h: int
    hash_id: str


@dataclass(frozen=True)
class CsSecretKey:
    group: CsGroup
    x1: int
    x2: int
    y1: int
    y2: int
    z: int
    hash_id: str


def make_group(group_bits: int, rng: random.Random, max_attempts: int = 4096) -> CsGroup:
    """A subgroup description (p, q, g1, g2) with q of exactly group_bits bits."""
    if group_bits < 3:
        raise DomainError("need at least 3-bit group order")
    q = gen_prime(group_bits, rng)
    p = None
    for k in range(2, 2 + 2 * max_attempts, 2):  # k even keeps p odd
        candidate = k * q + 1
        if candidate.bit_length() > 2 * group_bits + 8:
            break
        if is_probable_prime(candidate, rng=rng):
            p = candidate
            break
    if p is None:
        raise SearchExhaustedError(f"no prime p = kq + 1 found for q={q}")
    cofactor = (p - 1) // q
    generators = []
    for _ in range(max_attempts):
        g = pow(rng.randrange(2, p - 1), cofactor, p)
        if g != 1 and g not in generators:
            generators.append(g)
            if len(generators) == 2:
                return CsGroup(p=p, q=q, g1=generators[0], g2=generators[1])
    raise SearchExhaustedError("generator search exhausted")


def hash_to_exponent(hash_id: str, u1: int, u2: int, e: int, q: int) -> int:
    blob = encode_naturals("cs-hash", [u1, u2, e])
    if hash_id == "sha256":
        return int.from_bytes(hashlib.sha256(blob).digest(), "big") % q
    if hash_id == "toy":
        return int.from_bytes(blob, "big") % q
    raise DomainError(f"unknown hash id {hash_id!r}")


def cs_keypair_from_exponents(
    group: CsGroup, x1: int, x2: int, y1: int, y2: int, z: int, hash_id: str = "sha256"
) -> KeyPair:
    p = group.p
    c = (pow(group.g1, x1, p) * pow(group.g2, x2, p)) % p
    d = (pow(group.g1, y1, p) * pow(group.g2, y2, p)) % p
    h = pow(group.g1, z, p)
    return KeyPair(
        pk=CsPublicKey(group=group, c=c, d=d, h=h, hash_id=hash_id),
        sk=CsSecretKey(group=group, x1=x1, x2=x2, y1=y1, y2=y2, z=z, hash_id=hash_id),
        security_parameter=group.q.bit_length(),
    )


def cs_keygen_from_group(group: CsGroup, rng: random.Random, hash_id: str = "sha256") -> KeyPair:
    exponents = [rng.randrange(group.q) for _ in range(5)]
    return cs_keypair_from_exponents(group, *exponents, hash_id=hash_id)


def cs_keygen(group_bits: int, rng: random.Random, hash_id: str = "sha256") -> KeyPair:
    return cs_keygen_from_group(make_group(group_bits, rng), rng, hash_id=hash_id)


def cs_encrypt(pk: CsPublicKey, m: int, rng: random.Random, ledger: CostLedger):
    group = pk.group
    p, q = group.p, group.q
    if not 0 < m < p or pow(m, q, p) != 1:
        raise DomainError("plaintext must lie in the order-q subgroup")
    r = rng.randrange(1, q)  # r = 0 would give the identity ciphertext
    width = p.bit_length()
    u1 = mod_pow_ladder(group.g1, r, p, ledger, width=width)
    u2 = mod_pow_ladder(group.g2, r, p, ledger, width=width)
    hr = mod_pow_ladder(pk.h, r, p, ledger, width=width)
    e = mod_mul(hr, m, p, ledger)
    alpha = hash_to_exponent(pk.hash_id, u1, u2, e, q)
    cr = mod_pow_ladder(pk.c, r, p, ledger, width=width)
    dra = mod_pow_ladder(pk.d, (r * alpha) % q, p, ledger, width=width)
    v = mod_mul(cr, dra, p, ledger)
    return (u1, u2, e, v)


def cs_decrypt(sk: CsSecretKey, ciphertext, ledger: CostLedger, early_abort: bool = False):
    group = sk.group
    p, q = group.p, group.q
    if len(ciphertext) != 4:
        raise DomainError("ciphertext must have four components")
    u1, u2, e, v = ciphertext
    for component in ciphertext:
        if not 0 <= component < p:
            raise DomainError("ciphertext components must be reduced mod p")
    width = p.bit_length()
    alpha = hash_to_exponent(sk.hash_id, u1, u2, e, q)
    t1 = mod_pow_ladder(u1, (sk.x1 + sk.y1 * alpha) % q, p, ledger, width=width)
    t2 = mod_pow_ladder(u2, (sk.x2 + sk.y2 * alpha) % q, p, ledger, width=width)
    v_expected = mod_mul(t1, t2, p, ledger)
    # The candidate plaintext is computed on both paths so accept and
    # reject cost the same ledgered work.
    u1z = mod_pow_ladder(u1, sk.z, p, ledger, width=width)
    inverse = mod_pow_ladder(u1z, p - 2, p, ledger, width=width)
    m = mod_mul(e, inverse, p, ledger)
    if early_abort:
        # Bitwise compare from the most significant position, stopping
        # at the first mismatch: the cost reveals the mismatch index.
        valid = True
        for i in range(width - 1, -1, -1):
            ledger.add_branch(1)
            if (v_expected >> i) & 1 != (v >> i) & 1:
                valid = False
                break
    else:
        ledger.add_branch(width)
        valid = v_expected == v
    return m if valid else REJECT


class CsScheme(Scheme):
    """Cramer-Shoup with group parameters fixed at construction.

    The group is generated once from ``setup_seed`` and shared by every
    keygen; per-trial keys draw fresh secret exponents. Sharing the
    group keeps the ladder width, and therefore the cost profile,
    constant across trials, which fixed-time calibration relies on.
    """

    def __init__(
        self,
        group_bits: int = 32,
        hash_id: str = "sha256",
        setup_seed: int = 0,
        group: CsGroup | None = None,
    ):
        if hash_id not in HASH_IDS:
            raise DomainError(f"unknown hash id {hash_id!r}")
        self.hash_id = hash_id
        self.group = group if group is not None else make_group(
            group_bits, random.Random(("cs-setup", group_bits, setup_seed).__repr__())
        )
        self.group_bits = self.group.q.bit_length()
        self.name = f"cs-{self.group_bits}"
        self.security_bits = self.group_bits

    def keygen(self, rng):
        return cs_keygen_from_group(self.group, rng, hash_id=self.hash_id)

    def encrypt(self, pk, message, rng, ledger):
        return cs_encrypt(pk, message, rng, ledger)

    def decrypt(self, sk, ciphertext, ledger, early_abort=False):
        return cs_decrypt(sk, ciphertext, ledger, early_abort=early_abort)

    def sample_message(self, pk, rng):
        group = pk.group
        return pow(group.g1, rng.randrange(1, group.q), group.p)

    def message_size(self, message) -> int:
        return 1  # every plaintext is one group element

    def message_popcount(self, message) -> int:
        return message.bit_count()

    def max_message_popcount(self, pk) -> int:
        return pk.group.p.bit_length()

    def encode_message(self, message) -> str:
        return format(message, "x")

    def ciphertext_bytes(self, ciphertext) -> bytes:
        return encode_naturals("cs-ct", ciphertext)

    def public_key_bytes(self, pk) -> bytes:
        return encode_naturals(
            f"cs-pk-{pk.hash_id}",
            [pk.group.p, pk.group.q, pk.group.g1, pk.group.g2, pk.c, pk.d, pk.h],
        )

    def mutate_ciphertext(self, pk, ciphertext, rng):
        # Flip the lowest bit of v that keeps the component below p;
        # v is determined by (u1, u2, e), so any change is rejected.
        u1, u2, e, v = ciphertext
        for bit in range(pk.group.p.bit_length()):
            flipped = v ^ (1 << bit)
            if flipped < pk.group.p:
                return (u1, u2, e, flipped)
        raise DomainError("could not mutate ciphertext")  # unreachable for p >= 3
