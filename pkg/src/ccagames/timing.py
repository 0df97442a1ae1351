"""Abstract-time machinery: adversary-visible timing views, the network
delay model, and the fixed-time wrapper with worst-case calibration.

"Runtime" throughout is the deterministic ledger total, never
wall-clock, so the observable channel is reproducible bit for bit.
Fixed-time padding is accounting-level: the wrapper reports exactly the
configured budget instead of busy-waiting. An inner call that exceeds
its budget is a hard :class:`~ccagames.errors.BudgetOverflowError`,
never a silent clamp.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field

from .errors import BudgetOverflowError, DomainError
from .numtheory import CostLedger
from .schemes.base import Scheme

PHASES = ("phase1", "challenge", "phase2")


@dataclass(frozen=True)
class TimingView:
    """What the timing-aware adversary sees for one interaction."""

    op_kind: str  # "encrypt" | "decrypt"
    compute_cost: int  # ledger total of the call
    network_delay_out: int
    network_delay_back: int
    phase: str

    def to_dict(self) -> dict:
        return {
            "op_kind": self.op_kind,
            "compute_cost": self.compute_cost,
            "network_delay_out": self.network_delay_out,
            "network_delay_back": self.network_delay_back,
            "phase": self.phase,
        }


@dataclass(frozen=True)
class DelayModel:
    """delay(msg) = base + per_byte * len(msg) + jitter(index).

    Jitter is drawn deterministically per message index from
    ``jitter_seed``, uniform on [0, jitter_max]; the whole model is
    reproducible per seed.
    """

    base: int = 0
    per_byte: int = 0
    jitter_seed: int | None = None
    jitter_max: int = 0

    def jitter(self, index: int) -> int:
        if self.jitter_max <= 0 or self.jitter_seed is None:
            return 0
        digest = hashlib.sha256(f"jitter:{self.jitter_seed}:{index}".encode()).digest()
        return int.from_bytes(digest[:8], "big") % (self.jitter_max + 1)


def network_delay(model: DelayModel, message_bytes: int, index: int) -> int:
    return model.base + model.per_byte * message_bytes + model.jitter(index)


@dataclass(frozen=True)
class FixedTimeConfig:
    t_ft_encrypt: int
    t_ft_decrypt: int

    def __post_init__(self):
        if self.t_ft_encrypt < 1 or self.t_ft_decrypt < 1:
            raise DomainError("fixed-time targets must be >= 1")


class FixedTimeScheme(Scheme):
    """Pads every encrypt to t_ft_encrypt and every decrypt -- accept,
    reject, or invalid input alike -- to t_ft_decrypt. Functional
    outputs are unchanged."""

    def __init__(self, base: Scheme, cfg: FixedTimeConfig):
        self.base = base
        self.cfg = cfg
        self.name = f"fixed-time({base.name},E={cfg.t_ft_encrypt},D={cfg.t_ft_decrypt})"
        self.security_bits = base.security_bits

    def _charge(self, inner: CostLedger, budget: int, op: str, ledger: CostLedger) -> None:
        if inner.total > budget:
            raise BudgetOverflowError(
                f"{op} cost {inner.total} exceeds fixed-time budget {budget}"
            )
        ledger.add_modmul(inner.modmul_count)
        ledger.add_branch(inner.branch_count + (budget - inner.total))

    def keygen(self, rng):
        return self.base.keygen(rng)

    def encrypt(self, pk, message, rng, ledger):
        inner = CostLedger()
        ciphertext = self.base.encrypt(pk, message, rng, inner)
        self._charge(inner, self.cfg.t_ft_encrypt, "encrypt", ledger)
        return ciphertext

    def decrypt(self, sk, ciphertext, ledger, early_abort=False):
        inner = CostLedger()
        result = self.base.decrypt(sk, ciphertext, inner, early_abort=early_abort)
        self._charge(inner, self.cfg.t_ft_decrypt, "decrypt", ledger)
        return result

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


def wrap_fixed_time(scheme: Scheme, cfg: FixedTimeConfig) -> Scheme:
    return FixedTimeScheme(scheme, cfg)


@dataclass(frozen=True)
class CalibrationResult:
    config: FixedTimeConfig
    encrypt_costs: tuple[int, ...]
    decrypt_costs: tuple[int, ...]
    note: str = field(
        default="worst-case padding: every call is charged the maximum "
        "observed cost, so the system always runs at its slowest sampled pace"
    )

    def to_dict(self) -> dict:
        return {
            "t_ft_encrypt": self.config.t_ft_encrypt,
            "t_ft_decrypt": self.config.t_ft_decrypt,
            "encrypt_cost_max": max(self.encrypt_costs),
            "decrypt_cost_max": max(self.decrypt_costs),
            "samples_encrypt": len(self.encrypt_costs),
            "samples_decrypt": len(self.decrypt_costs),
            "note": self.note,
        }


def calibrate_worst_case(
    scheme: Scheme,
    keypair,
    messages,
    ciphertexts,
    rng: random.Random,
) -> CalibrationResult:
    """Per-function maxima of observed ledger costs over the sample.

    ``ciphertexts`` should include invalid probes so the rejection
    path's cost is part of the decrypt maximum.
    """
    if not messages or not ciphertexts:
        raise DomainError("calibration needs non-empty samples for E and D")
    encrypt_costs = []
    for message in messages:
        ledger = CostLedger()
        scheme.encrypt(keypair.pk, message, rng, ledger)
        encrypt_costs.append(ledger.total)
    decrypt_costs = []
    for ciphertext in ciphertexts:
        ledger = CostLedger()
        scheme.decrypt(keypair.sk, ciphertext, ledger)
        decrypt_costs.append(ledger.total)
    cfg = FixedTimeConfig(
        t_ft_encrypt=max(encrypt_costs), t_ft_decrypt=max(decrypt_costs)
    )
    return CalibrationResult(
        config=cfg,
        encrypt_costs=tuple(encrypt_costs),
        decrypt_costs=tuple(decrypt_costs),
    )


def certified_encrypt_budget(
    scheme: Scheme, pk, calibration: CalibrationResult, messages
) -> int:
    """Encrypt budget covering the whole message space, not just the sample.

    A popcount-proportional leak makes the sampled maximum an
    underestimate whenever the population holds a heavier message than
    the sample did. Cost decomposes as constant + leak * popcount, so
    the certified worst case is that constant plus the leak at the
    scheme's popcount ceiling. Without a leak this is just the sampled
    maximum.
    """
    from .schemes.base import unwrap_chain
    from .schemes.leaky import LeakyScheme

    leak_per_bit = sum(
        layer.profile.enc_leak
        for layer in unwrap_chain(scheme)
        if isinstance(layer, LeakyScheme)
    )
    sampled_max = calibration.config.t_ft_encrypt
    if leak_per_bit == 0:
        return sampled_max
    base_constant = max(
        cost - leak_per_bit * scheme.message_popcount(message)
        for message, cost in zip(messages, calibration.encrypt_costs)
    )
    ceiling = base_constant + leak_per_bit * scheme.max_message_popcount(pk)
    return max(sampled_max, ceiling)
