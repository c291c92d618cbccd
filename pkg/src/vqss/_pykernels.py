"""Reference (uncompiled) statevector kernels.

Same signatures and in-place conventions as the compiled ``_ckernels``.
"""

import numpy as np


def phase_apply(amps, roots, p, q):
    d = amps.shape[0]
    j = np.arange(d, dtype=np.int64)
    e = ((j * p) % d + ((j * j) % d) * q % d) % d
    amps *= roots[e]


def mub_fill(out, roots, l, k):
    d = out.shape[0]
    j = np.arange(d, dtype=np.int64)
    e = (j * ((l + (k * j) % d) % d)) % d
    out[:] = roots[e] / np.sqrt(d)


def mub_probs(amps, roots, k, out):
    # <phi_l^k|a> = d^-1/2 sum_j omega^{-jl} (omega^{-k j^2} a_j): a DFT of the chirped vector
    d = amps.shape[0]
    j = np.arange(d, dtype=np.int64)
    chirp = roots[(d - (k * ((j * j) % d)) % d) % d]
    f = np.fft.fft(chirp * amps)
    out[:] = (f.real ** 2 + f.imag ** 2) / d


def sample_index(probs, u):
    np.maximum(probs, 0.0, out=probs)
    total = probs.sum()
    cdf = np.cumsum(probs)
    i = int(np.searchsorted(cdf, u * total, side="right"))
    if i >= probs.shape[0]:
        nz = np.flatnonzero(probs)
        i = int(nz[-1]) if nz.size else probs.shape[0] - 1
    return i
