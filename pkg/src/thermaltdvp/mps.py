"""Purified matrix product states and their linear-algebra kernels.

Chain positions are 1-based; odd positions carry physical spins, even ones
the auxiliary (ancilla) spins of the purification. Tensors are complex
arrays of shape (left, 2, right). Bond b lives between sites b and b+1.

Conventions fixed here and relied on elsewhere:
  * merged two-site blocks have shape (left, 4, right) with site k as the
    slow half of the joint index (j = 2*s_k + s_{k+1}), matching np.kron
    order of the 4x4 unitaries applied to them;
  * the running state is kept at norm 1, every stripped scale factor is
    accumulated in ``log_norm`` (so exp(2*log_norm) tracks the squared norm
    of the unnormalized evolved state);
  * stored bond spectra are descending with unit square-sum, entropies use
    the natural logarithm.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    MatrixCapError,
    NonUnitaryError,
    NumericalConsistencyError,
    SizeMismatchError,
    StatePreparationError,
)
from .pauli import pauli_matrix

SNAPSHOT_FORMAT_VERSION = 1


class SiteRole(enum.Enum):
    PHYSICAL = "physical"
    ANCILLA = "ancilla"


@dataclass(frozen=True)
class TruncationPolicy:
    """Bond truncation: keep at most ``max_bond`` singular values, drop those
    below ``rel_cutoff`` times the largest."""

    max_bond: int
    rel_cutoff: float = 1e-10

    def __post_init__(self):
        if self.max_bond < 1:
            raise ValueError("max_bond must be >= 1")
        if self.rel_cutoff < 0:
            raise ValueError("rel_cutoff must be >= 0")


@dataclass(frozen=True)
class SvdReport:
    kept: int
    discarded_weight: float
    entropy: float


class MPSState:
    """A chain of site tensors with role tags, canonical center and spectra.

    Single-owner and mutated in place by gauge moves and sweeps. ``center``
    is a 1-based site index or None when no canonical structure holds.
    ``bond_spectra`` holds the last spectrum recorded per bond; it is exact
    for the current state only where the state has not been modified since
    (use :func:`schmidt_spectrum` to recompute on demand).
    """

    def __init__(self, tensors, center=None, log_norm=0.0, bond_spectra=None):
        self.tensors = [np.asarray(t, dtype=complex) for t in tensors]
        n = len(self.tensors)
        if n % 2 != 0:
            raise SizeMismatchError("purified chains have an even number of sites")
        for j, t in enumerate(self.tensors):
            if t.ndim != 3 or t.shape[1] != 2:
                raise SizeMismatchError(f"tensor {j + 1} is not (left, 2, right)")
            if j and self.tensors[j - 1].shape[2] != t.shape[0]:
                raise SizeMismatchError(f"bond dimension mismatch at bond {j}")
        if self.tensors[0].shape[0] != 1 or self.tensors[-1].shape[2] != 1:
            raise SizeMismatchError("boundary bonds must have dimension 1")
        self.roles = [
            SiteRole.PHYSICAL if j % 2 == 0 else SiteRole.ANCILLA for j in range(n)
        ]
        self.center = center
        self.log_norm = float(log_norm)
        self.bond_spectra = dict(bond_spectra or {})

    @property
    def n_sites(self):
        return len(self.tensors)

    @property
    def bond_dims(self):
        return tuple(t.shape[2] for t in self.tensors[:-1])

    def tensor(self, k):
        """Site tensor at 1-based position k."""
        return self.tensors[k - 1]

    def set_tensor(self, k, arr):
        self.tensors[k - 1] = np.asarray(arr, dtype=complex)

    def copy(self):
        out = MPSState(
            [t.copy() for t in self.tensors],
            center=self.center,
            log_norm=self.log_norm,
            bond_spectra={b: s.copy() for b, s in self.bond_spectra.items()},
        )
        return out

    def move_center(self, k):
        """Gauge-move the canonical center to site k (QR based, exact)."""
        n = self.n_sites
        if not 1 <= k <= n:
            raise SizeMismatchError(f"site {k} out of range 1..{n}")
        if self.center is None:
            # right-canonicalize everything onto site 1 first
            for j in range(n, 1, -1):
                self._pull_center_left(j)
            self.center = 1
        while self.center < k:
            self._push_center_right(self.center)
        while self.center > k:
            self._pull_center_left(self.center)

    def _push_center_right(self, j):
        t = self.tensors[j - 1]
        dl, _, dr = t.shape
        q, r = np.linalg.qr(t.reshape(dl * 2, dr))
        self.tensors[j - 1] = q.reshape(dl, 2, q.shape[1])
        self.tensors[j] = np.tensordot(r, self.tensors[j], axes=(1, 0))
        self.center = j + 1

    def _pull_center_left(self, j):
        t = self.tensors[j - 1]
        dl, _, dr = t.shape
        r, q = scipy.linalg.rq(t.reshape(dl, 2 * dr), mode="economic")
        self.tensors[j - 1] = q.reshape(q.shape[0], 2, dr)
        self.tensors[j - 2] = np.tensordot(self.tensors[j - 2], r, axes=(2, 0))
        self.center = j - 1

    def check_canonical(self, tol=1e-10):
        """Verify the isometry conditions around the center. Raises on failure."""
        if self.center is None:
            raise StatePreparationError("state has no canonical center")
        for j in range(1, self.center):
            t = self.tensors[j - 1]
            dl, _, dr = t.shape
            m = t.reshape(dl * 2, dr)
            if np.linalg.norm(m.conj().T @ m - np.eye(dr)) > tol:
                raise StatePreparationError(f"site {j} is not left-isometric")
        for j in range(self.center + 1, self.n_sites + 1):
            t = self.tensors[j - 1]
            dl, _, dr = t.shape
            m = t.reshape(dl, 2 * dr)
            if np.linalg.norm(m @ m.conj().T - np.eye(dl)) > tol:
                raise StatePreparationError(f"site {j} is not right-isometric")

    def norm(self):
        """Norm of the stored (running) tensors, excluding log_norm."""
        return float(np.sqrt(overlap(self, self).real))


def infinite_temperature_mps(n_physical):
    """The beta = 0 purified state on 2*n_physical sites.

    Each physical site 2i-1 is maximally entangled with its ancilla 2i:
    odd tensors are [1,0]/[0,1] rows, even tensors [0,1]/[1,0] columns over
    sqrt(2). Norm is exactly 1; bond spectra are filled analytically
    (1/sqrt2 pair inside each purification pair, trivial in between).
    """
    if n_physical < 1:
        raise SizeMismatchError("need at least one physical site")
    odd = np.zeros((1, 2, 2), dtype=complex)
    odd[0, 0, 0] = 1.0
    odd[0, 1, 1] = 1.0
    even = np.zeros((2, 2, 1), dtype=complex)
    even[1, 0, 0] = 1.0 / np.sqrt(2.0)
    even[0, 1, 0] = 1.0 / np.sqrt(2.0)
    tensors = []
    for _ in range(n_physical):
        tensors.append(odd.copy())
        tensors.append(even.copy())
    spectra = {}
    for b in range(1, 2 * n_physical):
        if b % 2 == 1:
            spectra[b] = np.array([1.0, 1.0]) / np.sqrt(2.0)
        else:
            spectra[b] = np.array([1.0])
    return MPSState(tensors, center=None, log_norm=0.0, bond_spectra=spectra)


def entropy_of_spectrum(s):
    """Von Neumann entropy -sum s^2 ln s^2 of a (normalized) spectrum."""
    p = np.asarray(s, dtype=float) ** 2
    total = p.sum()
    if total <= 0:
        raise ValueError("empty or zero spectrum")
    p = p / total
    nz = p[p > 1e-300]
    return float(-(nz * np.log(nz)).sum())


def merge(state, k):
    """Contract tensors k and k+1 into a (left, 4, right) block.

    Requires the canonical center at k or k+1 so the block is the local
    wavefunction in an isometric frame.
    """
    if not 1 <= k < state.n_sites:
        raise SizeMismatchError(f"bond {k} out of range")
    if state.center not in (k, k + 1):
        raise StatePreparationError(
            f"center must be at {k} or {k + 1}, is {state.center}"
        )
    a = state.tensor(k)
    b = state.tensor(k + 1)
    block = np.tensordot(a, b, axes=(2, 0))  # (Dl, 2, 2, Dr)
    return block.reshape(a.shape[0], 4, b.shape[2])


def split(block, policy, direction="right"):
    """Truncated SVD of a two-site block across its central bond.

    Returns ``(left_tensor, right_tensor, spectrum, report, log_factor)``.
    The kept spectrum is renormalized to unit square-sum; singular values are
    folded into the right tensor for ``direction="right"`` (center moves to
    k+1) and into the left one otherwise. ``log_factor`` is the natural log
    of the stripped scale (ln of the kept norm of the block as given).
    """
    dl, four, dr = block.shape
    if four != 4:
        raise SizeMismatchError("expected a merged two-site block (left, 4, right)")
    m = block.reshape(dl, 2, 2, dr).reshape(dl * 2, 2 * dr)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    total_sq = float((s**2).sum())
    if total_sq == 0.0:
        raise ValueError("cannot split a zero block")
    keep = min(policy.max_bond, len(s))
    cutoff = policy.rel_cutoff * s[0]
    while keep > 1 and s[keep - 1] < cutoff:
        keep -= 1
    kept_sq = float((s[:keep] ** 2).sum())
    spectrum = s[:keep] / np.sqrt(kept_sq)
    discarded = 1.0 - kept_sq / total_sq
    report = SvdReport(
        kept=keep,
        discarded_weight=max(discarded, 0.0),
        entropy=entropy_of_spectrum(spectrum),
    )
    u = u[:, :keep]
    vh = vh[:keep, :]
    if direction == "right":
        left = u.reshape(dl, 2, keep)
        right = (spectrum[:, None] * vh).reshape(keep, 2, dr)
    elif direction == "left":
        left = (u * spectrum[None, :]).reshape(dl, 2, keep)
        right = vh.reshape(keep, 2, dr)
    else:
        raise ValueError(f"unknown split direction {direction!r}")
    return left, right, spectrum, report, 0.5 * np.log(kept_sq)


def apply_split(state, k, block, policy, direction="right"):
    """Split ``block`` back into sites (k, k+1) of ``state`` and update the
    center, bond spectrum and log_norm."""
    left, right, spectrum, report, logf = split(block, policy, direction)
    state.tensors[k - 1] = left
    state.tensors[k] = right
    state.bond_spectra[k] = spectrum
    state.center = k + 1 if direction == "right" else k
    state.log_norm += logf
    return report


def apply_two_site_unitary(block, u, tol=1e-10):
    """Rotate the joint physical index of a block by a 4x4 unitary."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4):
        raise SizeMismatchError("expected a 4x4 matrix")
    if np.linalg.norm(u.conj().T @ u - np.eye(4)) > tol:
        raise NonUnitaryError("matrix is not unitary to tolerance")
    return np.einsum("ij,ljr->lir", u, block)


def _transfer(env, tensor, op):
    """Extend a (bra, ket) environment through one site.

    ``env`` may be None, meaning an exact identity (valid in isometric
    gauges); ``op`` may be None for the identity operator.
    """
    dl = tensor.shape[0]
    e = np.eye(dl, dtype=complex) if env is None else env
    ket = np.tensordot(e, tensor, axes=(1, 0))  # (bra_l, 2, Dr)
    if op is not None:
        ket = np.einsum("su,aur->asr", op, ket)
    return np.tensordot(tensor.conj(), ket, axes=((0, 1), (0, 1)))  # (bra_r, ket_r)


def overlap(state, other):
    """<state|other> of the running tensors (log_norm excluded)."""
    if state.n_sites != other.n_sites:
        raise SizeMismatchError("chain lengths differ")
    env = np.ones((1, 1), dtype=complex)
    for ab, ak in zip(state.tensors, other.tensors):
        ket = np.tensordot(env, ak, axes=(1, 0))
        env = np.tensordot(ab.conj(), ket, axes=((0, 1), (0, 1)))
    return complex(env[0, 0])


def _string_expectation(state, string):
    env = np.ones((1, 1), dtype=complex)
    for j in range(1, state.n_sites + 1):
        letter = string.site(j)
        op = None if letter == "I" else pauli_matrix(letter)
        env = _transfer(env, state.tensor(j), op)
    return complex(env[0, 0]) * string.sign


def expectation(state, h, imag_tol=1e-10):
    """Normalized expectation value <psi|h|psi>/<psi|psi> of a Pauli sum.

    Works in any gauge (full transfer contraction per term). The imaginary
    residue must stay below ``imag_tol`` relative to the scale of the value,
    otherwise a numerical-consistency error is raised.
    """
    if h.n_sites != state.n_sites:
        raise SizeMismatchError(
            f"operator on {h.n_sites} sites, state on {state.n_sites}"
        )
    num = 0.0 + 0.0j
    for coef, string in h.terms:
        num += coef * _string_expectation(state, string)
    den = overlap(state, state).real
    if den <= 0:
        raise NumericalConsistencyError("state has nonpositive norm")
    val = num / den
    if abs(val.imag) > imag_tol * max(1.0, abs(val.real)):
        raise NumericalConsistencyError(
            f"expectation has imaginary residue {val.imag:.3e}"
        )
    return float(val.real)


def schmidt_spectrum(state, b):
    """Exact Schmidt spectrum at bond b (recomputed; updates bond_spectra).

    Moves the canonical center to site b as a side effect.
    """
    if not 1 <= b < state.n_sites:
        raise SizeMismatchError(f"bond {b} out of range")
    state.move_center(b)
    t = state.tensor(b)
    dl, _, dr = t.shape
    s = np.linalg.svd(t.reshape(dl * 2, dr), compute_uv=False)
    total = np.sqrt((s**2).sum())
    if total == 0:
        raise StatePreparationError("zero-norm state has no Schmidt spectrum")
    spectrum = s / total
    state.bond_spectra[b] = spectrum
    return spectrum


def bond_entropy(state, b):
    """Entanglement entropy at bond b from the recorded spectrum.

    Raises if no spectrum is known there; use :func:`schmidt_spectrum` to
    compute one.
    """
    if b not in state.bond_spectra:
        raise StatePreparationError(
            f"no spectrum recorded at bond {b}; move the center there first"
        )
    return entropy_of_spectrum(state.bond_spectra[b])


def statevector(state, cap=24, include_log_norm=False):
    """Contract the chain into a dense vector (site 1 slowest index)."""
    n = state.n_sites
    if n > cap:
        raise MatrixCapError(f"dense statevector for {n} sites refused (cap {cap})")
    v = np.ones((1, 1), dtype=complex)
    for t in state.tensors:
        v = np.tensordot(v, t, axes=(1, 0))
        v = v.reshape(v.shape[0] * 2, v.shape[2])
    vec = v[:, 0]
    if include_log_norm:
        vec = vec * np.exp(state.log_norm)
    return vec


def save_state(state, path):
    """Write a versioned snapshot (npz container, bit-exact round trip)."""
    meta = {
        "format_version": SNAPSHOT_FORMAT_VERSION,
        "n_sites": state.n_sites,
        "center": -1 if state.center is None else state.center,
        "roles": "".join(
            "P" if r is SiteRole.PHYSICAL else "A" for r in state.roles
        ),
    }
    arrays = {
        "meta_json": np.frombuffer(json.dumps(meta).encode(), dtype=np.uint8),
        "log_norm": np.array([state.log_norm]),
        "spectrum_bonds": np.array(sorted(state.bond_spectra), dtype=np.int64),
    }
    for j, t in enumerate(state.tensors):
        arrays[f"tensor_{j}"] = t
    for b in sorted(state.bond_spectra):
        arrays[f"spectrum_{b}"] = state.bond_spectra[b]
    np.savez(path, **arrays)


def load_state(path):
    with np.load(path) as data:
        meta = json.loads(bytes(data["meta_json"]).decode())
        if meta["format_version"] != SNAPSHOT_FORMAT_VERSION:
            raise ValueError(
                f"unsupported snapshot version {meta['format_version']}"
            )
        n = meta["n_sites"]
        tensors = [data[f"tensor_{j}"] for j in range(n)]
        spectra = {
            int(b): data[f"spectrum_{int(b)}"] for b in data["spectrum_bonds"]
        }
        center = meta["center"]
        return MPSState(
            tensors,
            center=None if center == -1 else center,
            log_norm=float(data["log_norm"][0]),
            bond_spectra=spectra,
        )
