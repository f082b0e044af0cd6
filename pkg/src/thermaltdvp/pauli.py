"""Signed Pauli strings in binary symplectic form, and real-weighted sums of them.

A string on ``n_sites`` spin-1/2 sites is stored as two bit masks plus a sign:
bit ``j - 1`` of ``x_bits`` / ``z_bits`` holds the X / Z component on site ``j``
(sites are 1-based everywhere in the public interface). The letter on a site
decodes as (x, z): (0,0) -> I, (1,0) -> X, (1,1) -> Y, (0,1) -> Z, with Y
carrying its conventional imaginary entries internally, so every stored string
is Hermitian. Products and commutators reduce to XOR/popcount on the masks.

Textual form: a sign token followed by site letters, e.g. ``"+1 XIZY"``
(site 1 leftmost). ``parse_pauli`` and ``PauliString.to_text`` round-trip
exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MatrixCapError, PauliFormatError, SizeMismatchError

_LETTERS = ("I", "X", "Y", "Z")
# letter -> (x, z)
_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}

_SINGLE_SITE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_PHASES = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)  # i**k

DENSE_CAP_DEFAULT = 14


@dataclass(frozen=True)
class PauliString:
    """A signed n-site Pauli word. Immutable and hashable."""

    n_sites: int
    x_bits: int = 0
    z_bits: int = 0
    sign: int = 1

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError(f"n_sites must be positive, got {self.n_sites}")
        mask = (1 << self.n_sites) - 1
        if self.x_bits & ~mask or self.z_bits & ~mask:
            raise ValueError("bit masks extend beyond n_sites")
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")

    @classmethod
    def identity(cls, n_sites):
        return cls(n_sites)

    @classmethod
    def from_letters(cls, letters, sign=1):
        """Build from a letter string like ``"XIZY"`` (site 1 leftmost)."""
        x = z = 0
        for j, c in enumerate(letters):
            if c not in _BITS:
                raise PauliFormatError(f"unknown Pauli letter {c!r}")
            xb, zb = _BITS[c]
            x |= xb << j
            z |= zb << j
        return cls(len(letters), x, z, sign)

    @classmethod
    def single(cls, n_sites, site, letter, sign=1):
        """A single non-identity letter on ``site`` (1-based), identity elsewhere."""
        if not 1 <= site <= n_sites:
            raise SizeMismatchError(f"site {site} out of range 1..{n_sites}")
        xb, zb = _BITS[letter]
        return cls(n_sites, xb << (site - 1), zb << (site - 1), sign)

    def site(self, j):
        """Letter on site ``j`` (1-based)."""
        if not 1 <= j <= self.n_sites:
            raise SizeMismatchError(f"site {j} out of range 1..{self.n_sites}")
        x = (self.x_bits >> (j - 1)) & 1
        z = (self.z_bits >> (j - 1)) & 1
        return _LETTERS[_code_to_letter_index(x, z)]

    @property
    def letters(self):
        return "".join(self.site(j) for j in range(1, self.n_sites + 1))

    @property
    def support(self):
        """1-based sites where the string is not the identity."""
        occ = self.x_bits | self.z_bits
        return tuple(j + 1 for j in range(self.n_sites) if (occ >> j) & 1)

    @property
    def weight(self):
        return (self.x_bits | self.z_bits).bit_count()

    def is_identity(self):
        return self.x_bits == 0 and self.z_bits == 0

    def with_sign(self, sign):
        return PauliString(self.n_sites, self.x_bits, self.z_bits, sign)

    def to_text(self):
        """Canonical text form, e.g. ``"+1 XIZY"``."""
        tok = "+1" if self.sign == 1 else "-1"
        return f"{tok} {self.letters}"

    def __str__(self):
        return self.to_text()


def _code_to_letter_index(x, z):
    # (0,0)->I(0), (1,0)->X(1), (1,1)->Y(2), (0,1)->Z(3)
    if x == 0:
        return 0 if z == 0 else 3
    return 1 if z == 0 else 2


def parse_pauli(text):
    """Parse the canonical text form produced by :meth:`PauliString.to_text`."""
    parts = text.split(" ")
    if len(parts) != 2 or parts[0] not in ("+1", "-1") or not parts[1]:
        raise PauliFormatError(f"expected '<sign> <letters>', got {text!r}")
    sign = 1 if parts[0] == "+1" else -1
    return PauliString.from_letters(parts[1], sign)


def _check_same_length(p, q):
    if p.n_sites != q.n_sites:
        raise SizeMismatchError(
            f"strings act on different chains: {p.n_sites} vs {q.n_sites} sites"
        )


def multiply(p, q):
    """Product of two strings.

    Returns ``(phase, product)`` with ``phase`` in {1, -1, i, -i} such that
    ``dense(p) @ dense(q) == phase * dense(product)``. The product carries
    sign +1; both input signs are folded into the phase.
    """
    _check_same_length(p, q)
    rx = p.x_bits ^ q.x_bits
    rz = p.z_bits ^ q.z_bits
    # power of i from composing W(x,z) = i^{xz} X^x Z^z site by site
    e = (
        (p.x_bits & p.z_bits).bit_count()
        + (q.x_bits & q.z_bits).bit_count()
        + 2 * (p.z_bits & q.x_bits).bit_count()
        - (rx & rz).bit_count()
    ) % 4
    phase = _PHASES[e] * (p.sign * q.sign)
    return phase, PauliString(p.n_sites, rx, rz, 1)


def commutes(p, q):
    """True iff the symplectic form of the two strings is even (they commute)."""
    _check_same_length(p, q)
    parity = ((p.x_bits & q.z_bits).bit_count() + (p.z_bits & q.x_bits).bit_count()) & 1
    return parity == 0


def dense_matrix(p, cap=DENSE_CAP_DEFAULT):
    """Dense 2^n x 2^n matrix of the string, site 1 as the slowest index.

    Refuses for ``n_sites > cap`` (default 14): the result would not fit in
    reasonable memory.
    """
    if p.n_sites > cap:
        raise MatrixCapError(
            f"dense matrix for {p.n_sites} sites refused (cap {cap}); "
            "raise the cap explicitly if you really want this"
        )
    m = np.array([[p.sign]], dtype=complex)
    for j in range(1, p.n_sites + 1):
        m = np.kron(m, _SINGLE_SITE[p.site(j)])
    return m


def pauli_matrix(letter):
    """The 2x2 matrix for a single letter (copy-safe view)."""
    return _SINGLE_SITE[letter]


@dataclass(frozen=True)
class WeightedPauliSum:
    """A Hermitian operator ``sum_i a_i P_i`` with real coefficients.

    String signs are folded into the coefficients at construction, so every
    stored string has sign +1. Exact duplicate strings are NOT merged unless
    :meth:`merged_duplicates` is called explicitly; the term count is part of
    the operator's bookkeeping contract.
    """

    n_sites: int
    terms: tuple

    def __init__(self, n_sites, terms):
        normalized = []
        for coef, string in terms:
            coef = float(coef)
            if not np.isfinite(coef):
                raise ValueError("coefficients must be real and finite")
            if string.n_sites != n_sites:
                raise SizeMismatchError(
                    f"term on {string.n_sites} sites in a {n_sites}-site sum"
                )
            normalized.append((coef * string.sign, string.with_sign(1)))
        object.__setattr__(self, "n_sites", n_sites)
        object.__setattr__(self, "terms", tuple(normalized))

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def map_strings(self, fn):
        """New sum with ``(coef, string) -> fn(coef, string)`` applied per term."""
        return WeightedPauliSum(self.n_sites, [fn(c, s) for c, s in self.terms])

    def merged_duplicates(self):
        """New sum with coefficients of identical strings combined (order of
        first appearance kept). Never called implicitly."""
        order = []
        acc = {}
        for c, s in self.terms:
            key = (s.x_bits, s.z_bits)
            if key not in acc:
                acc[key] = [c, s]
                order.append(key)
            else:
                acc[key][0] += c
        return WeightedPauliSum(self.n_sites, [tuple(acc[k]) for k in order])

    def coefficient_norm(self):
        return sum(abs(c) for c, _ in self.terms)

    def dense_matrix(self, cap=DENSE_CAP_DEFAULT):
        dim = 2**self.n_sites
        if self.n_sites > cap:
            raise MatrixCapError(
                f"dense matrix for {self.n_sites} sites refused (cap {cap})"
            )
        out = np.zeros((dim, dim), dtype=complex)
        for coef, string in self.terms:
            out += coef * dense_matrix(string, cap=cap)
        return out

    def to_text(self):
        return "\n".join(f"{c!r} {s.letters}" for c, s in self.terms)


def embed_on_physical_sites(h):
    """Map an N-site operator onto the odd sites of a 2N-site purified chain.

    Physical site j (1-based) lands on chain position 2j - 1; every even
    position carries the identity. Coefficients are unchanged.
    """
    n = h.n_sites
    out_terms = []
    for coef, s in h.terms:
        x = z = 0
        for j in range(n):
            x |= ((s.x_bits >> j) & 1) << (2 * j)
            z |= ((s.z_bits >> j) & 1) << (2 * j)
        out_terms.append((coef, PauliString(2 * n, x, z, 1)))
    return WeightedPauliSum(2 * n, out_terms)
