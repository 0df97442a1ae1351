"""Leak-profile wrapper: the vulnerable target for the timing games.

``enc_leak`` charges that many extra ledger units per set bit of the
plaintext encoding, so encryption cost grows linearly in popcount.
``dec_early_abort`` switches the wrapped scheme's validity comparison to
an abort-at-first-mismatch scan, so rejection cost reveals the mismatch
position. With the zero profile the wrapper is observationally identical
to the base scheme (outputs and ledger).
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import DomainError
from .base import Scheme


@dataclass(frozen=True)
class LeakProfile:
    enc_leak: int = 0  # ledger units per set plaintext bit
    dec_early_abort: bool = False

    def __post_init__(self):
        if self.enc_leak < 0:
            raise DomainError("enc_leak must be >= 0")

    @property
    def is_zero(self) -> bool:
        return self.enc_leak == 0 and not self.dec_early_abort


class LeakyScheme(Scheme):
    def __init__(self, base: Scheme, profile: LeakProfile):
        self.base = base
        self.profile = profile
        self.name = f"leaky({base.name},enc={profile.enc_leak}," \
                    f"abort={'y' if profile.dec_early_abort else 'n'})"
        self.security_bits = base.security_bits

    def keygen(self, rng):
        return self.base.keygen(rng)

    def encrypt(self, pk, message, rng, ledger):
        ciphertext = self.base.encrypt(pk, message, rng, ledger)
        ledger.add_branch(self.profile.enc_leak * self.base.message_popcount(message))
        return ciphertext

    def decrypt(self, sk, ciphertext, ledger, early_abort=False):
        return self.base.decrypt(
            sk, ciphertext, ledger,
            early_abort=early_abort or self.profile.dec_early_abort,
        )

    def sample_message(self, pk, rng):
        return self.base.sample_message(pk, rng)

    def message_size(self, message):
        return self.base.message_size(message)

    def message_popcount(self, message):
        return self.base.message_popcount(message)

    def max_message_popcount(self, pk):
        return self.base.max_message_popcount(pk)

    def encode_message(self, message):
        return self.base.encode_message(message)

    def ciphertext_bytes(self, ciphertext):
        return self.base.ciphertext_bytes(ciphertext)

    def public_key_bytes(self, pk):
        return self.base.public_key_bytes(pk)

    def mutate_ciphertext(self, pk, ciphertext, rng):
        return self.base.mutate_ciphertext(pk, ciphertext, rng)


def leaky_wrap(base: Scheme, profile: LeakProfile) -> Scheme:
    return LeakyScheme(base, profile)
