"""Arbitrary-precision modular arithmetic with deterministic cost accounting.

Every modular multiplication or squaring performed by ``mod_mul`` and the
exponentiation routines is charged to a caller-owned :class:`CostLedger`.
The ledger is the abstract clock of the whole artifact: "runtime"
everywhere else means ledger units, never wall-clock.

Two exponentiation routines exist on purpose:

* :func:`mod_pow_leaky` -- classic square-and-multiply whose cost depends
  on the exponent's bit pattern (the vulnerable primitive).
* :func:`mod_pow_ladder` -- Montgomery-ladder walk over a fixed bit
  width, costing exactly ``2*width`` multiplications for every exponent.

The inner loops live in a compiled extension when available
(``_kernels``), with a pure-Python fallback (``_kernels_py``) selected at
import time.  Set ``CCAGAMES_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass

from .errors import DomainError, SearchExhaustedError

if os.environ.get("CCAGAMES_PURE_PYTHON"):
    from . import _kernels_py as _impl

    KERNEL_BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        KERNEL_BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as _impl  # type: ignore[no-redef]

        KERNEL_BACKEND = "python"


@dataclass
class CostLedger:
    """Deterministic abstract-time counter.

    One unit per modular multiplication or squaring; branch-like work
    (comparison steps, synthetic leak units, fixed-time padding) is
    charged to ``branch_count``. ``total`` is always their sum. Ledgers
    are caller-owned and must never be shared between concurrent calls.
    """

    modmul_count: int = 0
    branch_count: int = 0

    @property
    def total(self) -> int:
        return self.modmul_count + self.branch_count

    def add_modmul(self, units: int = 1) -> None:
        if units < 0:
            raise DomainError("ledger counters are monotone")
        self.modmul_count += units

    def add_branch(self, units: int = 1) -> None:
        if units < 0:
            raise DomainError("ledger counters are monotone")
        self.branch_count += units


def _check_modulus(n: int) -> None:
    if n < 2:
        raise DomainError(f"modulus must be >= 2, got {n}")


def mod_mul(a: int, b: int, n: int, ledger: CostLedger) -> int:
    """a*b mod n, charging exactly one multiplication to the ledger."""
    _check_modulus(n)
    if not (0 <= a < n and 0 <= b < n):
        raise DomainError("operands must be reduced mod n")
    ledger.add_modmul(1)
    return _impl.mul(a, b, n)


def mod_pow_leaky(base: int, exp: int, n: int, ledger: CostLedger) -> int:
    """base**exp mod n via square-and-multiply; cost leaks the exponent.

    Ledger cost is (bitlen(exp) - 1) squarings plus (popcount(exp) - 1)
    multiplies for exp >= 1, and zero for exp == 0.
    """
    _check_modulus(n)
    if not 0 <= base < n:
        raise DomainError("base must be reduced mod n")
    if exp < 0:
        raise DomainError("exponent must be non-negative")
    result, mults = _impl.pow_leaky(base, exp, n)
    ledger.add_modmul(mults)
    return result


def mod_pow_ladder(
    base: int, exp: int, n: int, ledger: CostLedger, width: int | None = None
) -> int:
    """base**exp mod n at a cost of exactly 2*width multiplications.

    ``width`` defaults to the modulus bit length, matching constant-time
    exponentiation practice. Exponents at or above 2**width are refused.
    """
    _check_modulus(n)
    if not 0 <= base < n:
        raise DomainError("base must be reduced mod n")
    if exp < 0:
        raise DomainError("exponent must be non-negative")
    if width is None:
        width = n.bit_length()
    if width < 1:
        raise DomainError("width must be >= 1")
    if exp >> width:
        raise DomainError(f"exponent does not fit in {width} bits")
    result, mults = _impl.pow_ladder(base, exp, n, width)
    ledger.add_modmul(mults)
    return result


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n >= 3, by binary reciprocity."""
    if n < 3 or n % 2 == 0:
        raise DomainError("Jacobi symbol needs an odd modulus >= 3")
    a %= n
    result = 1
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def is_probable_prime(n: int, rounds: int = 20, rng: random.Random | None = None) -> bool:
    """Miller-Rabin verdict, deterministic for a fixed rng seed.

    With no rng supplied, bases are drawn from a stream seeded by n
    itself, so repeated calls agree.
    """
    if n < 2:
        raise DomainError("primality is asked of integers >= 2")
    if rounds < 1:
        raise DomainError("need at least one round")
    if n in (2, 3):
        return True
    if n % 2 == 0:
        return False
    if rng is None:
        rng = random.Random(n)
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = (x * x) % n
            if x == n - 1:
                break
        else:
            return False
    return True


def gen_prime(
    bits: int,
    rng: random.Random,
    congruence: tuple[int, int] | None = None,
    rounds: int = 20,
    max_attempts: int | None = None,
) -> int:
    """Probable prime of exactly ``bits`` bits, deterministic per seed.

    ``congruence=(r, m)`` restricts candidates to p == r (mod m), e.g.
    (3, 4) for Blum-style primes. Gives up after a bounded number of
    attempts when the condition is unsatisfiable at tiny sizes.
    """
    if bits < 2:
        raise DomainError("need at least 2 bits")
    if max_attempts is None:
        max_attempts = 4096 * max(bits, 8)
    lo = 1 << (bits - 1)
    for _ in range(max_attempts):
        candidate = lo | rng.getrandbits(bits - 1)
        if bits > 2:
            candidate |= 1
        if congruence is not None:
            residue, modulus = congruence
            if candidate % modulus != residue:
                continue
        if is_probable_prime(candidate, rounds=rounds, rng=rng):
            return candidate
    raise SearchExhaustedError(
        f"no {bits}-bit prime found (congruence={congruence}) "
        f"after {max_attempts} attempts"
    )
