"""The cryptosystem abstraction: keygen / encrypt / decrypt plus the
message-space hooks the game harness and adversaries rely on."""

from __future__ import annotations

import abc
import random
from dataclasses import dataclass
from typing import Any

from ..numtheory import CostLedger


class _Reject:
    """Typed rejection outcome for decryption; not a fault."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "REJECT"


REJECT = _Reject()


@dataclass(frozen=True)
class KeyPair:
    pk: Any
    sk: Any
    security_parameter: int


class Scheme(abc.ABC):
    """A public-key cryptosystem with cost-instrumented calls.

    Schemes are immutable after construction; encrypt/decrypt are safe
    from multiple threads provided each call uses its own ledger and rng.
    ``base`` is non-None for wrappers (leak profile, fixed-time) and
    points at the wrapped scheme.
    """

    name: str = "abstract"
    security_bits: int = 0
    base: "Scheme | None" = None

    @abc.abstractmethod
    def keygen(self, rng: random.Random) -> KeyPair: ...

    @abc.abstractmethod
    def encrypt(self, pk, message, rng: random.Random, ledger: CostLedger): ...

    @abc.abstractmethod
    def decrypt(self, sk, ciphertext, ledger: CostLedger, early_abort: bool = False): ...

    @abc.abstractmethod
    def sample_message(self, pk, rng: random.Random): ...

    @abc.abstractmethod
    def message_size(self, message) -> int:
        """Declared plaintext length; challenge pairs must match."""

    @abc.abstractmethod
    def message_popcount(self, message) -> int:
        """Set bits in the canonical plaintext encoding (drives leaks)."""

    @abc.abstractmethod
    def max_message_popcount(self, pk) -> int:
        """Upper bound on message_popcount over the whole message space.

        Lets worst-case calibration certify a popcount-proportional
        cost ceiling without enumerating the space.
        """

    @abc.abstractmethod
    def encode_message(self, message) -> str: ...

    @abc.abstractmethod
    def ciphertext_bytes(self, ciphertext) -> bytes:
        """Canonical serialization; used for digests and c* exclusion."""

    @abc.abstractmethod
    def public_key_bytes(self, pk) -> bytes: ...

    @abc.abstractmethod
    def mutate_ciphertext(self, pk, ciphertext, rng: random.Random):
        """An invalid (rejected) variant of a valid ciphertext.

        Used by calibration to probe the rejection path's cost.
        """


def unwrap_chain(scheme: Scheme) -> list[Scheme]:
    """The wrapper chain from outermost to the base scheme."""
    chain = [scheme]
    while chain[-1].base is not None:
        chain.append(chain[-1].base)
    return chain
