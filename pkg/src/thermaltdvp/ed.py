"""Dense exact reference for small systems.

Everything here goes through full matrices and eigendecompositions; no MPS
contraction code is shared with the evolution engine, so agreement between
the two is a meaningful check rather than a tautology.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MatrixCapError
from .pauli import WeightedPauliSum, embed_on_physical_sites

DENSE_SPECTRUM_CAP = 12
PURIFIED_CAP = 24


@dataclass(frozen=True)
class SpectrumCache:
    """Eigendecomposition of one model, keyed by its term content."""

    key: tuple
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None


@dataclass(frozen=True)
class ErrorValue:
    """A relative error, or an absolute one when the reference is ~0."""

    error: float
    absolute: bool


_spectra: dict[tuple, SpectrumCache] = {}


def _model_key(h):
    return (h.n_sites, tuple((c, s.x_bits, s.z_bits) for c, s in h.terms))


def dense_spectrum(h, cap=DENSE_SPECTRUM_CAP, keep_vectors=True):
    """Full Hermitian eigendecomposition of a Pauli sum (ascending eigenvalues).

    Results are cached per model; repeated calls are free.
    """
    if h.n_sites > cap:
        raise MatrixCapError(
            f"dense spectrum for {h.n_sites} sites refused (cap {cap})"
        )
    key = _model_key(h)
    hit = _spectra.get(key)
    if hit is not None and (hit.eigenvectors is not None or not keep_vectors):
        return hit
    mat = h.dense_matrix(cap=cap)
    if keep_vectors:
        evals, evecs = np.linalg.eigh(mat)
    else:
        evals, evecs = np.linalg.eigvalsh(mat), None
    out = SpectrumCache(key=key, eigenvalues=evals, eigenvectors=evecs)
    _spectra[key] = out
    return out


def thermal_energy(spectrum, beta):
    """Thermal average sum(E exp(-beta E)) / sum(exp(-beta E)).

    Weights are shifted by the dominant eigenvalue so no exp overflows.
    """
    if beta < 0:
        raise ValueError("beta must be >= 0")
    e = spectrum.eigenvalues
    w = np.exp(-beta * (e - e[0]))
    return float((e * w).sum() / w.sum())


def partition_function(spectrum, beta):
    """sum(exp(-beta E)), computed without shift (fine at desk scale)."""
    return float(np.exp(-beta * spectrum.eigenvalues).sum())


def purified_reference(h, beta, cap=PURIFIED_CAP):
    """Exact purified thermal vector on 2N sites for an N-site Hamiltonian.

    Applies exp(-beta H/2) to the physical (odd) sites of the beta = 0
    product-of-pairs state. The squared norm equals Tr exp(-beta H) / 2^N.
    """
    n = h.n_sites
    if 2 * n > cap:
        raise MatrixCapError(
            f"purified reference on {2 * n} sites refused (cap {cap})"
        )
    spec = dense_spectrum(h, cap=cap, keep_vectors=True)
    v = spec.eigenvectors
    half = v @ (np.exp(-0.5 * beta * spec.eigenvalues)[:, None] * v.conj().T)
    # beta = 0 pair state as a (physical, ancilla) matrix: kron of X/sqrt2
    pair = np.array([[0.0, 1.0], [1.0, 0.0]]) / np.sqrt(2.0)
    m = np.array([[1.0]])
    for _ in range(n):
        m = np.kron(m, pair)
    m = half @ m.astype(complex)
    # interleave (p1..pN, a1..aN) -> (p1 a1 p2 a2 ...)
    t = m.reshape((2,) * (2 * n))
    order = []
    for j in range(n):
        order.append(j)
        order.append(n + j)
    return np.transpose(t, axes=order).reshape(-1)


def purified_energy(h, vec):
    """<vec|H_embedded|vec> / <vec|vec> for a dense purified vector."""
    h2 = embed_on_physical_sites(h)
    mat = h2.dense_matrix(cap=PURIFIED_CAP)
    num = np.vdot(vec, mat @ vec)
    den = np.vdot(vec, vec)
    return float((num / den).real)


def relative_error(value, reference, zero_tol=1e-12):
    """|value - reference| / |reference|, or the absolute error (flagged)
    when the reference is numerically zero."""
    if abs(reference) < zero_tol:
        return ErrorValue(error=abs(value - reference), absolute=True)
    return ErrorValue(error=abs(value - reference) / abs(reference), absolute=False)
