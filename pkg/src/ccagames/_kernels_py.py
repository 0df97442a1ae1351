"""Pure-Python fallback for the hot modular-arithmetic kernels.

Must stay observationally identical to the compiled ``_kernels``
extension: same results and, crucially, the same multiplication counts,
because the counts are the abstract clock of the whole artifact.
"""


def mul(a, b, n):
    return (a * b) % n


def pow_leaky(base, exp, n):
    """Left-to-right square-and-multiply.

    Returns (result, mults) where mults = (bitlen(exp) - 1) squarings
    plus (popcount(exp) - 1) multiplies for exp >= 1, and 0 for exp == 0.
    The count depends on the exponent's bit pattern: this is the leak.
    """
    if exp == 0:
        return 1 % n, 0
    result = base % n
    mults = 0
    for i in range(exp.bit_length() - 2, -1, -1):
        result = (result * result) % n
        mults += 1
        if (exp >> i) & 1:
            result = (result * base) % n
            mults += 1
    return result, mults


def pow_ladder(base, exp, n, width):
    """Montgomery ladder over a fixed bit width.

    Exactly two multiplications per step, 2*width in total, for every
    exponent below 2**width. Caller guarantees exp < 2**width.
    """
    r0 = 1 % n
    r1 = base % n
    for i in range(width - 1, -1, -1):
        if (exp >> i) & 1:
            r0 = (r0 * r1) % n
            r1 = (r1 * r1) % n
        else:
            r1 = (r0 * r1) % n
            r0 = (r0 * r0) % n
    return r0, 2 * width
