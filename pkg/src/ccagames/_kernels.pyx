# cython: language_level=3
"""Compiled hot kernels for modular exponentiation.

The fast path handles word-sized operands (modulus below 2**63,
exponent below 2**64) entirely in C with 128-bit intermediate products.
Anything larger is delegated to the pure-Python fallback so both
backends share one source of truth for the general case.

Results and multiplication counts are bit-for-bit identical to
``_kernels_py``; the parity test suite enforces this.
"""

from ccagames import _kernels_py as _py

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"


cdef inline unsigned long long _mulmod(unsigned long long a,
                                       unsigned long long b,
                                       unsigned long long n) nogil:
    return <unsigned long long>((<u128>a * b) % n)


def mul(a, b, n):
    if n.bit_length() < 64 and 0 <= a < n and 0 <= b < n:
        return _mulmod(a, b, n)
    return (a * b) % n


def pow_leaky(base, exp, n):
    cdef unsigned long long cbase, cexp, cn, result
    cdef int i, nbits
    cdef long long mults
    if exp == 0:
        return 1 % n, 0
    if n.bit_length() < 64 and exp.bit_length() <= 64 and 0 <= base < n:
        cn = n
        cbase = base
        cexp = exp
        nbits = exp.bit_length()
        result = cbase % cn
        mults = 0
        for i in range(nbits - 2, -1, -1):
            result = _mulmod(result, result, cn)
            mults += 1
            if (cexp >> i) & 1:
                result = _mulmod(result, cbase, cn)
                mults += 1
        return result, mults
    return _py.pow_leaky(base, exp, n)


def pow_ladder(base, exp, n, width):
    cdef unsigned long long cbase, cexp, cn, r0, r1
    cdef int i, w
    if (width <= 64 and n.bit_length() < 64
            and exp.bit_length() <= 64 and 0 <= base < n):
        cn = n
        cbase = base
        cexp = exp
        w = width
        r0 = 1 % cn
        r1 = cbase % cn
        for i in range(w - 1, -1, -1):
            if (cexp >> i) & 1:
                r0 = _mulmod(r0, r1, cn)
                r1 = _mulmod(r1, r1, cn)
            else:
                r1 = _mulmod(r0, r1, cn)
                r0 = _mulmod(r0, r0, cn)
        return r0, 2 * width
    return _py.pow_ladder(base, exp, n, width)
