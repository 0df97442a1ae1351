"""Challenger, oracle-policy enforcement, experiment drivers, and
advantage estimation for the four indistinguishability games.

A trial is one run of the experiment: keygen, phase 1 (oracle access per
policy), the adversary's challenge pair (m0, m1), the challenger's coin
b and challenge ciphertext c*, phase 2, and the adversary's guess.
Advantage is estimated with a two-arm design: Experiment(0) forces
b = 0, Experiment(1) forces b = 1, and

    advantage = |Pr[Experiment(0) = 1] - Pr[Experiment(1) = 1]|.

Per-trial rng streams are derived from (master_seed, arm, trial_index),
so trials are order-independent and the whole observable channel is
deterministic per seed.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass, field
from enum import Enum

from .errors import (
    ForbiddenQueryError,
    GameFault,
    InvalidChallengeError,
    PolicyViolationError,
)
from .numtheory import CostLedger
from .schemes.base import REJECT, Scheme
from .serialize import digest_hex
from .timing import DelayModel, TimingView, network_delay


class ExperimentKind(str, Enum):
    CPA = "CPA"
    CCA1 = "CCA1"
    CCA2 = "CCA2"
    CCA2_TA = "CCA2-TA"


@dataclass(frozen=True)
class OraclePolicy:
    phase1_decrypt_allowed: bool
    phase2_decrypt_allowed: bool
    challenge_ciphertext_forbidden: bool
    timing_visible: bool


_POLICIES = {
    ExperimentKind.CPA: OraclePolicy(False, False, True, False),
    ExperimentKind.CCA1: OraclePolicy(True, False, True, False),
    ExperimentKind.CCA2: OraclePolicy(True, True, True, False),
    ExperimentKind.CCA2_TA: OraclePolicy(True, True, True, True),
}


def policy_for(kind: ExperimentKind) -> OraclePolicy:
    return _POLICIES[ExperimentKind(kind)]


@dataclass(frozen=True)
class OracleQuery:
    phase: str
    ciphertext_digest: str
    outcome: str  # "ok" | "reject"


class DecryptionOracle:
    """Decryption oracle handle given to the adversary.

    Enforces the per-phase policy and the exact-match exclusion of the
    challenge ciphertext; any modified ciphertext is answerable. Never
    exposes the secret key or the challenge bit.
    """

    def __init__(self, scheme: Scheme, keypair, policy: OraclePolicy,
                 delay_model: DelayModel):
        self._scheme = scheme
        self._keypair = keypair
        self._policy = policy
        self._delay_model = delay_model
        self._phase = "phase1"
        self._c_star_bytes: bytes | None = None
        self._message_index = 0
        self.queries: list[OracleQuery] = []
        self.views: list[TimingView] = []

    @property
    def phase(self) -> str:
        return self._phase

    def _advance(self, phase: str) -> None:
        self._phase = phase

    def _set_challenge(self, c_star_bytes: bytes) -> None:
        self._c_star_bytes = c_star_bytes

    def _next_index(self) -> int:
        index = self._message_index
        self._message_index += 1
        return index

    def decrypt(self, ciphertext):
        """Returns (plaintext-or-REJECT, TimingView-or-None)."""
        policy = self._policy
        allowed = (
            policy.phase1_decrypt_allowed
            if self._phase == "phase1"
            else policy.phase2_decrypt_allowed and self._phase == "phase2"
        )
        if not allowed:
            raise PolicyViolationError(
                f"decryption oracle not available in {self._phase}"
            )
        c_bytes = self._scheme.ciphertext_bytes(ciphertext)
        if (
            self._phase == "phase2"
            and policy.challenge_ciphertext_forbidden
            and c_bytes == self._c_star_bytes
        ):
            raise ForbiddenQueryError("the challenge ciphertext itself is excluded")
        ledger = CostLedger()
        result = self._scheme.decrypt(self._keypair.sk, ciphertext, ledger)
        rejected = result is REJECT
        view = TimingView(
            op_kind="decrypt",
            compute_cost=ledger.total,
            network_delay_out=network_delay(
                self._delay_model, len(c_bytes), self._next_index()
            ),
            network_delay_back=network_delay(
                self._delay_model, 1 if rejected else 32, self._next_index()
            ),
            phase=self._phase,
        )
        self.views.append(view)
        self.queries.append(
            OracleQuery(self._phase, digest_hex(c_bytes), "reject" if rejected else "ok")
        )
        return result, (view if policy.timing_visible else None)


@dataclass
class Transcript:
    """Full record of one game trial. Never contains secret-key material."""

    trial_index: int
    scheme: str
    kind: str
    m0: str
    m1: str
    queries: list[OracleQuery] = field(default_factory=list)
    timing_views: list[TimingView] = field(default_factory=list)
    b: int | None = None
    guess: int | None = None
    win: bool = False
    fault: str | None = None
    challenge_digest: str | None = None
    diagnostics: dict | None = None

    def to_dict(self) -> dict:
        return {
            "trial_index": self.trial_index,
            "scheme": self.scheme,
            "kind": self.kind,
            "m0": self.m0,
            "m1": self.m1,
            "queries": [
                {"phase": q.phase, "ciphertext_digest": q.ciphertext_digest,
                 "outcome": q.outcome}
                for q in self.queries
            ],
            "timing_views": [v.to_dict() for v in self.timing_views],
            "challenge_digest": self.challenge_digest,
            "guess": self.guess,
            "win": self.win,
            "b": self.b,
            "fault": self.fault,
            "diagnostics": self.diagnostics,
        }


def run_trial(
    kind: ExperimentKind,
    scheme: Scheme,
    factory,
    forced_b: int | None = None,
    rng: random.Random | None = None,
    delay_model: DelayModel | None = None,
    trial_index: int = 0,
) -> Transcript:
    """One experiment trial; faults abort the trial and score as a loss.

    A faulting adversary's guess is replaced by a fair coin from the
    trial rng, so rule-breaking can never build a two-arm advantage.
    """
    kind = ExperimentKind(kind)
    policy = policy_for(kind)
    factory.check(scheme, policy)
    if rng is None:
        rng = random.Random(trial_index)
    if delay_model is None:
        delay_model = DelayModel()
    keypair = scheme.keygen(rng)
    oracle = DecryptionOracle(scheme, keypair, policy, delay_model)
    adversary = factory.build(scheme, rng)
    transcript = Transcript(
        trial_index=trial_index, scheme=scheme.name, kind=kind.value, m0="", m1=""
    )
    if forced_b is not None and forced_b not in (0, 1):
        raise InvalidChallengeError("forced_b must be 0 or 1")
    b: int | None = None
    try:
        m0, m1 = adversary.choose_plaintexts(keypair.pk, oracle)
        if scheme.message_size(m0) != scheme.message_size(m1):
            raise InvalidChallengeError("challenge plaintexts must have equal size")
        if m0 == m1:
            raise InvalidChallengeError("challenge plaintexts must differ")
        transcript.m0 = scheme.encode_message(m0)
        transcript.m1 = scheme.encode_message(m1)
        b = forced_b if forced_b is not None else rng.randrange(2)
        oracle._advance("challenge")
        ledger = CostLedger()
        c_star = scheme.encrypt(keypair.pk, m1 if b else m0, rng, ledger)
        c_star_bytes = scheme.ciphertext_bytes(c_star)
        transcript.challenge_digest = digest_hex(c_star_bytes)
        challenge_view = TimingView(
            op_kind="encrypt",
            compute_cost=ledger.total,
            network_delay_out=network_delay(
                delay_model, len(c_star_bytes), oracle._next_index()
            ),
            network_delay_back=network_delay(delay_model, 1, oracle._next_index()),
            phase="challenge",
        )
        oracle.views.append(challenge_view)
        oracle._set_challenge(c_star_bytes)
        oracle._advance("phase2")
        guess = adversary.guess(
            c_star, challenge_view if policy.timing_visible else None, oracle
        )
        if guess not in (0, 1):
            raise InvalidChallengeError(f"guess must be a bit, got {guess!r}")
    except GameFault as fault:
        transcript.fault = f"{type(fault).__name__}: {fault}"
        if b is None:
            b = forced_b if forced_b is not None else rng.randrange(2)
        guess = rng.randrange(2)
    transcript.b = b
    transcript.guess = guess
    transcript.win = guess == b
    transcript.queries = oracle.queries
    if policy.timing_visible:
        transcript.timing_views = oracle.views
    diagnostics = getattr(adversary, "diagnostics", None)
    if diagnostics is not None:
        transcript.diagnostics = diagnostics() if callable(diagnostics) else diagnostics
    return transcript


def wilson_halfwidth(successes: int, trials: int, z: float = 1.959963984540054) -> float:
    """Half-width of the Wilson score interval for a binomial proportion."""
    if trials <= 0:
        return 1.0
    p = successes / trials
    z2 = z * z
    return (z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials))) / (
        1 + z2 / trials
    )


@dataclass(frozen=True)
class AdvantageEstimate:
    p_exp0: float
    p_exp1: float
    advantage: float
    trials_per_arm: int
    ci95_halfwidth: float
    negligible_threshold: float

    def to_dict(self) -> dict:
        return {
            "p_exp0": self.p_exp0,
            "p_exp1": self.p_exp1,
            "advantage": self.advantage,
            "trials_per_arm": self.trials_per_arm,
            "ci95_halfwidth": self.ci95_halfwidth,
            "negligible_threshold": self.negligible_threshold,
        }


def estimate_advantage(
    ones_exp0: int, ones_exp1: int, trials_per_arm: int, threshold: float = 0.05
) -> AdvantageEstimate:
    """|Pr[Experiment(0)=1] - Pr[Experiment(1)=1]| from raw count tables.

    The per-arm Wilson 95% half-widths are combined in quadrature to
    bound the absolute difference.
    """
    if trials_per_arm < 1:
        raise ValueError("need at least one trial per arm")
    advantage = abs(ones_exp0 - ones_exp1) / trials_per_arm
    hw0 = wilson_halfwidth(ones_exp0, trials_per_arm)
    hw1 = wilson_halfwidth(ones_exp1, trials_per_arm)
    return AdvantageEstimate(
        p_exp0=ones_exp0 / trials_per_arm,
        p_exp1=ones_exp1 / trials_per_arm,
        advantage=advantage,
        trials_per_arm=trials_per_arm,
        ci95_halfwidth=math.hypot(hw0, hw1),
        negligible_threshold=threshold,
    )


VERDICT_NEGLIGIBLE = "consistent-with-negligible"
VERDICT_DETECTED = "advantage-detected"
VERDICT_INCONCLUSIVE = "inconclusive"


def negligible_check(est: AdvantageEstimate) -> str:
    if est.advantage - est.ci95_halfwidth > est.negligible_threshold:
        return VERDICT_DETECTED
    if est.advantage + est.ci95_halfwidth <= est.negligible_threshold:
        return VERDICT_NEGLIGIBLE
    return VERDICT_INCONCLUSIVE


def derive_trial_seed(master_seed: int, arm: int, trial_index: int) -> int:
    digest = hashlib.sha256(f"{master_seed}:{arm}:{trial_index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass
class ExperimentRecord:
    kind: str
    scheme: str
    adversary: str
    trials_per_arm: int
    master_seed: int
    estimate: AdvantageEstimate
    win_rate: float
    fault_count: int
    transcripts: list[Transcript]

    def to_dict(self, include_transcripts: bool = True) -> dict:
        doc = {
            "kind": self.kind,
            "scheme": self.scheme,
            "adversary": self.adversary,
            "trials_per_arm": self.trials_per_arm,
            "master_seed": self.master_seed,
            "estimate": self.estimate.to_dict(),
            "verdict": negligible_check(self.estimate),
            "win_rate": self.win_rate,
            "fault_count": self.fault_count,
        }
        if include_transcripts:
            doc["trials"] = [t.to_dict() for t in self.transcripts]
        return doc


def run_experiment(
    kind: ExperimentKind,
    scheme: Scheme,
    factory,
    trials_per_arm: int,
    master_seed: int,
    delay_model: DelayModel | None = None,
    threshold: float = 0.05,
) -> ExperimentRecord:
    """Two-arm Monte-Carlo estimate of the adversary's advantage."""
    kind = ExperimentKind(kind)
    if trials_per_arm < 1:
        raise ValueError("need at least one trial per arm")
    factory.check(scheme, policy_for(kind))
    ones = [0, 0]
    wins = 0
    faults = 0
    transcripts: list[Transcript] = []
    for arm in (0, 1):
        for i in range(trials_per_arm):
            trial_rng = random.Random(derive_trial_seed(master_seed, arm, i))
            transcript = run_trial(
                kind,
                scheme,
                factory,
                forced_b=arm,
                rng=trial_rng,
                delay_model=delay_model,
                trial_index=arm * trials_per_arm + i,
            )
            ones[arm] += transcript.guess
            wins += transcript.win
            faults += transcript.fault is not None
            transcripts.append(transcript)
    estimate = estimate_advantage(ones[0], ones[1], trials_per_arm, threshold)
    return ExperimentRecord(
        kind=kind.value,
        scheme=scheme.name,
        adversary=factory.name,
        trials_per_arm=trials_per_arm,
        master_seed=master_seed,
        estimate=estimate,
        win_rate=wins / (2 * trials_per_arm),
        fault_count=faults,
        transcripts=transcripts,
    )
