# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled statevector kernels; see vqss._pykernels for the reference versions."""

from cython.view cimport array as cvarray
from libc.math cimport sqrt

ctypedef long long i64


cpdef void phase_apply(double complex[::1] amps, const double complex[::1] roots,
                       i64 p, i64 q):
    """In place: amps[j] *= roots[(j*p + j*j*q) mod d]."""
    cdef Py_ssize_t d = amps.shape[0], j
    cdef i64 e
    for j in range(d):
        e = ((j * p) % d + (((j * j) % d) * q) % d) % d
        amps[j] = amps[j] * roots[e]


cpdef void mub_fill(double complex[::1] out, const double complex[::1] roots,
                    i64 l, i64 k):
    """out[j] = roots[j*(l + k*j) mod d] / sqrt(d)."""
    cdef Py_ssize_t d = out.shape[0], j
    cdef double norm = 1.0 / sqrt(<double>d)
    cdef i64 e
    for j in range(d):
        e = (j * ((l + (k * j) % d) % d)) % d
        out[j] = roots[e] * norm


cpdef void mub_probs(const double complex[::1] amps, const double complex[::1] roots,
                     i64 k, double[::1] out):
    """out[l] = |<phi_l^k | amps>|^2 for every l."""
    cdef Py_ssize_t d = amps.shape[0], j, l
    cdef double complex acc
    cdef double complex[::1] chirped = cvarray(shape=(max(d, 1),), itemsize=sizeof(double complex),
                                               format="Zd")
    cdef i64 e, jj
    cdef double scale = 1.0 / <double>d
    # conj(omega^e) == omega^(d-e); strip the quadratic phase once
    for j in range(d):
        jj = (j * j) % d
        e = (k * jj) % d
        chirped[j] = roots[(d - e) % d] * amps[j]
    for l in range(d):
        acc = 0
        e = 0  # exponent of conj(omega^(j*l)), stepped without a modulo
        for j in range(d):
            acc = acc + roots[e] * chirped[j]
            e -= l
            if e < 0:
                e += d
        out[l] = (acc.real * acc.real + acc.imag * acc.imag) * scale


cpdef Py_ssize_t sample_index(double[::1] probs, double u):
    """Inverse-CDF draw after clamping negatives and renormalising in place."""
    cdef Py_ssize_t d = probs.shape[0], i
    cdef double total = 0.0, acc = 0.0, target
    for i in range(d):
        if probs[i] < 0.0:
            probs[i] = 0.0
        total += probs[i]
    target = u * total
    for i in range(d):
        acc += probs[i]
        if target < acc:
            return i
    # u*total landed on the top edge through rounding
    i = d - 1
    while i > 0 and probs[i] == 0.0:
        i -= 1
    return i
