"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument violated a documented precondition."""


class SearchExhaustedError(RuntimeError):
    """A bounded randomized search (prime generation, etc.) gave up."""


class BudgetOverflowError(RuntimeError):
    """An inner call cost more than its fixed-time budget.

    This is a harness configuration error: the fixed-time target was
    calibrated too low for the input population. It is never silently
    clamped.
    """


class SerializationError(ValueError):
    """Malformed canonical key/ciphertext encoding."""


class GameFault(Exception):
    """Base class for protocol violations inside a single game trial.

    Faults abort the trial; the harness records them and scores the
    trial as a loss for the adversary.
    """


class InvalidChallengeError(GameFault):
    """Adversary emitted (m0, m1) with unequal sizes or m0 == m1."""


class PolicyViolationError(GameFault):
    """Decryption oracle queried in a phase the experiment forbids."""


class ForbiddenQueryError(GameFault):
    """Phase-2 decryption query of the challenge ciphertext itself."""


class PairingError(TypeError):
    """Adversary and scheme/experiment are incompatible; refused up front."""


class ConfigError(ValueError):
    """Invalid suite configuration document."""
