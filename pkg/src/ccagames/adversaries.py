"""Concrete adversary strategies.

Adversaries are strategy objects driven by the harness: the harness
calls ``choose_plaintexts`` during phase 1 and ``guess`` during phase 2,
handing over only the public key, the oracle handle, and timing views.
A factory builds a fresh instance per trial; nothing is shared across
trials. Factory requirements are checked against the experiment policy
before any trial runs, and incompatible pairings fail fast.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable

from .errors import PairingError
from .numtheory import CostLedger, mod_mul
from .schemes.base import REJECT, Scheme, unwrap_chain
from .schemes.cramer_shoup import CsScheme
from .schemes.gm import GmScheme
from .schemes.leaky import LeakyScheme


@dataclass(frozen=True)
class AdversaryFactory:
    name: str
    needs_oracle_phase1: bool
    needs_oracle_phase2: bool
    needs_timing: bool
    _build: Callable[[Scheme, random.Random], object]
    _accepts: Callable[[Scheme], None]

    def check(self, scheme: Scheme, policy) -> None:
        if self.needs_oracle_phase1 and not policy.phase1_decrypt_allowed:
            raise PairingError(f"{self.name} needs a phase-1 decryption oracle")
        if self.needs_oracle_phase2 and not policy.phase2_decrypt_allowed:
            raise PairingError(f"{self.name} needs a phase-2 decryption oracle")
        if self.needs_timing and not policy.timing_visible:
            raise PairingError(f"{self.name} needs timing visibility")
        self._accepts(scheme)

    def build(self, scheme: Scheme, rng: random.Random):
        return self._build(scheme, rng)


def _any_scheme(scheme: Scheme) -> None:
    pass


class _RandomGuess:
    """The zero-advantage baseline: arbitrary valid pair, fair-coin guess."""

    def __init__(self, scheme: Scheme, rng: random.Random):
        self._scheme = scheme
        self._rng = rng

    def choose_plaintexts(self, pk, oracle):
        m0 = self._scheme.sample_message(pk, self._rng)
        m1 = m0
        while m1 == m0:
            m1 = self._scheme.sample_message(pk, self._rng)
        return m0, m1

    def guess(self, c_star, challenge_view, oracle):
        return self._rng.randrange(2)


def random_guess_adversary() -> AdversaryFactory:
    return AdversaryFactory(
        name="random-guess",
        needs_oracle_phase1=False,
        needs_oracle_phase2=False,
        needs_timing=False,
        _build=_RandomGuess,
        _accepts=_any_scheme,
    )


def _require_gm(scheme: Scheme) -> None:
    if not isinstance(unwrap_chain(scheme)[-1], GmScheme):
        raise PairingError("malleability attack targets the GM scheme")


class _GmMalleability:
    """Wins CCA2 against GM via ciphertext re-randomization.

    Chooses all-zero vs all-one bit strings; in phase 2 multiplies each
    challenge component by a fresh square r^2 mod N. The result is a
    different ciphertext of the same plaintext, so only the exact-match
    c* exclusion stands between the oracle and the challenge bit.
    """

    def __init__(self, scheme: Scheme, rng: random.Random):
        self._scheme = scheme
        self._gm: GmScheme = unwrap_chain(scheme)[-1]
        self._rng = rng
        self._pk = None
        self._m1 = None

    def choose_plaintexts(self, pk, oracle):
        self._pk = pk
        bits = self._gm.message_bits
        self._m1 = (1,) * bits
        return (0,) * bits, self._m1

    def guess(self, c_star, challenge_view, oracle):
        n = self._pk.n
        ledger = CostLedger()
        rerandomized = []
        for component in c_star:
            r = self._rng.randrange(2, n - 1)
            while math.gcd(r, n) != 1:
                r = self._rng.randrange(2, n - 1)
            square = mod_mul(r, r, n, ledger)
            rerandomized.append(mod_mul(component, square, n, ledger))
        result, _view = oracle.decrypt(tuple(rerandomized))
        if result is REJECT:
            return self._rng.randrange(2)
        return 1 if result == self._m1 else 0


def gm_malleability_adversary() -> AdversaryFactory:
    # The phase-2 oracle is not a declared requirement: under CCA1 the
    # attack is allowed to run, fault on its phase-2 query, and have the
    # faults scored as losses. That contrast is the point of the pairing.
    return AdversaryFactory(
        name="gm-malleability",
        needs_oracle_phase1=False,
        needs_oracle_phase2=False,
        needs_timing=False,
        _build=_GmMalleability,
        _accepts=_require_gm,
    )


def _require_encrypt_leak(scheme: Scheme) -> None:
    for layer in unwrap_chain(scheme):
        if isinstance(layer, LeakyScheme) and layer.profile.enc_leak > 0:
            return
    raise PairingError("timing distinguisher needs an encryption-cost leak")


class _TimingDistinguisher:
    """Distinguishes via the challenge's compute cost.

    Picks the lowest- and highest-popcount messages among a sample,
    builds a reference cost table by running the public encryption
    locally on each, then outputs the arm whose reference is nearest to
    the observed challenge cost (network delays are known and separated
    out by the timing view). Ties fall back to a fair coin, which is
    what worst-case fixed-time padding forces.
    """

    CANDIDATE_SAMPLES = 32

    def __init__(self, scheme: Scheme, rng: random.Random):
        self._scheme = scheme
        self._rng = rng
        self._reference: tuple[int, int] | None = None

    def choose_plaintexts(self, pk, oracle):
        samples = [
            self._scheme.sample_message(pk, self._rng)
            for _ in range(self.CANDIDATE_SAMPLES)
        ]
        m0 = min(samples, key=self._scheme.message_popcount)
        m1 = max(samples, key=self._scheme.message_popcount)
        while m1 == m0:
            m1 = self._scheme.sample_message(pk, self._rng)
        references = []
        for message in (m0, m1):
            ledger = CostLedger()
            self._scheme.encrypt(pk, message, self._rng, ledger)
            references.append(ledger.total)
        self._reference = (references[0], references[1])
        return m0, m1

    def guess(self, c_star, challenge_view, oracle):
        if challenge_view is None:
            return self._rng.randrange(2)
        cost = challenge_view.compute_cost
        d0 = abs(cost - self._reference[0])
        d1 = abs(cost - self._reference[1])
        if d0 < d1:
            return 0
        if d1 < d0:
            return 1
        return self._rng.randrange(2)


def timing_distinguisher_adversary() -> AdversaryFactory:
    return AdversaryFactory(
        name="timing-distinguisher",
        needs_oracle_phase1=False,
        needs_oracle_phase2=False,
        needs_timing=True,
        _build=_TimingDistinguisher,
        _accepts=_require_encrypt_leak,
    )


def _require_early_abort_cs(scheme: Scheme) -> None:
    chain = unwrap_chain(scheme)
    if not isinstance(chain[-1], CsScheme):
        raise PairingError("early-abort probe crafts Cramer-Shoup ciphertexts")
    for layer in chain:
        if isinstance(layer, LeakyScheme) and layer.profile.dec_early_abort:
            return
    raise PairingError("early-abort probe needs dec_early_abort in the leak profile")


class _EarlyAbortProbe:
    """Witnesses the rejection-time leak; does not try to win.

    Phase 1: encrypts a message locally, submits variants of the valid
    ciphertext with single bits of v flipped at different positions, and
    records each rejection's compute cost. Guess is a fair coin; the
    value of this adversary is its diagnostics.
    """

    def __init__(self, scheme: Scheme, rng: random.Random):
        self._scheme = scheme
        self._rng = rng
        self._probes: list[dict] = []

    def _flip_positions(self, v: int, p: int, width: int):
        # High-position mismatch: clear the top set bit of v (always < p).
        # Low-position mismatch: flip the lowest bit that keeps v below p.
        positions = []
        if v:
            top = v.bit_length() - 1
            positions.append((width - 1 - top, v ^ (1 << top)))
        for bit in range(width):
            flipped = v ^ (1 << bit)
            if flipped < p:
                positions.append((width - 1 - bit, flipped))
                break
        return positions

    def choose_plaintexts(self, pk, oracle):
        p = pk.group.p
        width = p.bit_length()
        message = self._scheme.sample_message(pk, self._rng)
        ledger = CostLedger()
        u1, u2, e, v = self._scheme.encrypt(pk, message, self._rng, ledger)
        for compare_position, flipped in self._flip_positions(v, p, width):
            result, view = oracle.decrypt((u1, u2, e, flipped))
            self._probes.append(
                {
                    "compare_position": compare_position,
                    "rejected": result is REJECT,
                    "compute_cost": None if view is None else view.compute_cost,
                }
            )
        m0 = message
        m1 = m0
        while m1 == m0:
            m1 = self._scheme.sample_message(pk, self._rng)
        return m0, m1

    def guess(self, c_star, challenge_view, oracle):
        return self._rng.randrange(2)

    def diagnostics(self) -> dict:
        costs = [probe["compute_cost"] for probe in self._probes]
        return {
            "probes": self._probes,
            "rejection_costs": costs,
            "constant_rejection_cost": len(set(costs)) <= 1,
        }


def early_abort_probe_adversary() -> AdversaryFactory:
    return AdversaryFactory(
        name="early-abort-probe",
        needs_oracle_phase1=True,
        needs_oracle_phase2=False,
        needs_timing=True,
        _build=_EarlyAbortProbe,
        _accepts=_require_early_abort_cs,
    )


ADVERSARY_FACTORIES = {
    "random-guess": random_guess_adversary,
    "gm-malleability": gm_malleability_adversary,
    "timing-distinguisher": timing_distinguisher_adversary,
    "early-abort-probe": early_abort_probe_adversary,
}


def adversary_by_id(adversary_id: str) -> AdversaryFactory:
    try:
        return ADVERSARY_FACTORIES[adversary_id]()
    except KeyError:
        known = ", ".join(sorted(ADVERSARY_FACTORIES))
        raise PairingError(f"unknown adversary {adversary_id!r}; known: {known}") from None
