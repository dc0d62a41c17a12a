"""Shared test helpers (numpy-based, independent of the package)."""

import numpy as np


def random_unitary(dim, rng):
    """Orthonormalize a complex Gaussian matrix (QR with phase fix)."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_psd(dim, rank, rng):
    x = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    return x @ x.conj().T


def matrix_units(n):
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = 1
            yield i, j, e
