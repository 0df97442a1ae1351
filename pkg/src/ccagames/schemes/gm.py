"""Goldwasser-Micali probabilistic encryption.

Bit b encrypts to y^b * r^2 mod N for a fresh r coprime to N, where y is
a pseudo-square (Jacobi symbol +1, non-residue mod both primes).
Multi-bit messages encrypt bitwise: a ciphertext is one Natural per
plaintext bit. Decryption takes the Legendre symbol mod p.

The pseudo-square multiplication is performed for both bit values
(times y or times 1) so a ciphertext component always costs exactly two
ledgered multiplications; GM itself is not the timing-leaky target here.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from ..errors import DomainError, SearchExhaustedError
from ..numtheory import CostLedger, gen_prime, mod_mul, mod_pow_ladder
from ..serialize import encode_naturals
from .base import REJECT, KeyPair, Scheme


@dataclass(frozen=True)
class GmPublicKey:
    n: int  # p * q
    y: int  # pseudo-square mod n


@dataclass(frozen=True)
class GmSecretKey:
    p: int
    q: int


def _is_nonresidue(y: int, p: int) -> bool:
    return pow(y, (p - 1) // 2, p) == p - 1


def find_pseudo_square(p: int, q: int, rng: random.Random, max_attempts: int = 4096) -> int:
    """Rejection-sample y with Jacobi(y, pq) = 1 that is a non-residue
    mod both factors."""
    n = p * q
    for _ in range(max_attempts):
        y = rng.randrange(2, n - 1)
        if math.gcd(y, n) != 1:
            continue
        if _is_nonresidue(y, p) and _is_nonresidue(y, q):
            return y
    raise SearchExhaustedError(f"no pseudo-square found mod {n}")


def gm_keypair_from_primes(p: int, q: int, rng: random.Random) -> KeyPair:
    if p == q:
        raise DomainError("primes must be distinct")
    if p % 4 != 3 or q % 4 != 3:
        raise DomainError("Blum primes (== 3 mod 4) required")
    y = find_pseudo_square(p, q, rng)
    return KeyPair(
        pk=GmPublicKey(n=p * q, y=y),
        sk=GmSecretKey(p=p, q=q),
        security_parameter=max(p.bit_length(), q.bit_length()),
    )


def gm_keygen(bits_per_prime: int, rng: random.Random) -> KeyPair:
    if bits_per_prime < 3:
        raise DomainError("need at least 3-bit primes")
    p = gen_prime(bits_per_prime, rng, congruence=(3, 4))
    q = p
    while q == p:
        q = gen_prime(bits_per_prime, rng, congruence=(3, 4))
    return gm_keypair_from_primes(p, q, rng)


def gm_encrypt_bit(pk: GmPublicKey, bit: int, r: int, ledger: CostLedger) -> int:
    """One ciphertext component: y^bit * r^2 mod n, always two mults."""
    if bit not in (0, 1):
        raise DomainError("plaintext bit must be 0 or 1")
    square = mod_mul(r, r, pk.n, ledger)
    return mod_mul(square, pk.y if bit else 1, pk.n, ledger)


def gm_decrypt_component(sk: GmSecretKey, component: int, ledger: CostLedger) -> int:
    """0 if the component is a quadratic residue mod p, else 1.

    Legendre symbol via the constant-cost ladder at width bitlen(p).
    """
    p = sk.p
    symbol = mod_pow_ladder(component % p, (p - 1) // 2, p, ledger, width=p.bit_length())
    return 0 if symbol == 1 else 1


class GmScheme(Scheme):
    """GM over Blum primes; messages are fixed-length bit tuples."""

    def __init__(self, prime_bits: int = 16, message_bits: int = 8):
        if prime_bits < 3:
            raise DomainError("need at least 3-bit primes")
        if message_bits < 1:
            raise DomainError("need at least one message bit")
        self.prime_bits = prime_bits
        self.message_bits = message_bits
        self.name = f"gm-{prime_bits}"
        self.security_bits = prime_bits

    def keygen(self, rng):
        return gm_keygen(self.prime_bits, rng)

    def _sample_unit(self, n: int, rng) -> int:
        while True:
            r = rng.randrange(2, n - 1)
            if math.gcd(r, n) == 1:
                return r

    def encrypt(self, pk, message, rng, ledger):
        if len(message) != self.message_bits:
            raise DomainError("message has the wrong bit length")
        components = []
        for bit in message:
            r = self._sample_unit(pk.n, rng)
            components.append(gm_encrypt_bit(pk, bit, r, ledger))
        return tuple(components)

    def decrypt(self, sk, ciphertext, ledger, early_abort=False):
        # early_abort has no lever here: GM has no validity comparison,
        # only the gcd check, which is not ledgered.
        n = sk.p * sk.q
        bits = []
        for component in ciphertext:
            if math.gcd(component, n) != 1:
                return REJECT
            bits.append(gm_decrypt_component(sk, component, ledger))
        return tuple(bits)

    def sample_message(self, pk, rng):
        return tuple(rng.randrange(2) for _ in range(self.message_bits))

    def message_size(self, message) -> int:
        return len(message)

    def message_popcount(self, message) -> int:
        return sum(message)

    def max_message_popcount(self, pk) -> int:
        return self.message_bits

    def encode_message(self, message) -> str:
        return "".join(str(bit) for bit in message)

    def ciphertext_bytes(self, ciphertext) -> bytes:
        return encode_naturals("gm-ct", ciphertext)

    def public_key_bytes(self, pk) -> bytes:
        return encode_naturals("gm-pk", [pk.n, pk.y])

    def mutate_ciphertext(self, pk, ciphertext, rng):
        # A zero component shares every factor with n: always rejected.
        return (0,) + tuple(ciphertext[1:])
