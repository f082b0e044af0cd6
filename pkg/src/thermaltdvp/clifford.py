"""Clifford circuits as stabilizer tableaus acting on Pauli strings.

A tableau stores the images of the single-site generators X_k and Z_k under
conjugation; conjugating an arbitrary string is then a short product of
images with exact phase bookkeeping (the result always carries sign +1 or -1
for Hermitian inputs). Two-site tableaus additionally get a 16-entry lookup
table and an exact dense 4x4 unitary, which is what the sweep applies to MPS
blocks.

The catalog of all 720 two-site tableaus (the binary symplectic group on two
sites, signs fixed to +1) is the search space of the disentangler. Pauli
prefactors are deliberately excluded: they change neither singular-value
spectra nor entropies, so including them would only multiply the search cost.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InternalStateError, PauliFormatError, SizeMismatchError
from .pauli import PauliString, WeightedPauliSum, commutes, dense_matrix, multiply

_PHASES = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


@dataclass(frozen=True)
class CliffordTableau:
    """Images of X_1..X_n and Z_1..Z_n under conjugation by a Clifford unitary."""

    n_sites: int
    x_images: tuple
    z_images: tuple

    def __init__(self, x_images, z_images, validate=True):
        x_images = tuple(x_images)
        z_images = tuple(z_images)
        if len(x_images) != len(z_images) or not x_images:
            raise SizeMismatchError("need one X image and one Z image per site")
        n = len(x_images)
        for img in x_images + z_images:
            if img.n_sites != n:
                raise SizeMismatchError("generator image has wrong length")
        object.__setattr__(self, "n_sites", n)
        object.__setattr__(self, "x_images", x_images)
        object.__setattr__(self, "z_images", z_images)
        if validate:
            self.validate()

    @classmethod
    def identity(cls, n_sites):
        xs = [PauliString.single(n_sites, j, "X") for j in range(1, n_sites + 1)]
        zs = [PauliString.single(n_sites, j, "Z") for j in range(1, n_sites + 1)]
        return cls(xs, zs, validate=False)

    def is_identity(self):
        return self == CliffordTableau.identity(self.n_sites)

    def validate(self):
        """Check the symplectic condition on the generator images.

        X_k and Z_k images must anticommute pairwise on the same site and
        commute across sites. Independent of the GF(2)-matrix route used by
        the catalog enumeration.
        """
        gens = []
        for k in range(self.n_sites):
            gens.append(("X", k, self.x_images[k]))
            gens.append(("Z", k, self.z_images[k]))
        for a in range(len(gens)):
            for b in range(a + 1, len(gens)):
                la, ka, pa = gens[a]
                lb, kb, pb = gens[b]
                same_pair = ka == kb  # X_k vs Z_k
                want_commute = same_pair is False
                if commutes(pa, pb) != want_commute:
                    raise InternalStateError(
                        f"symplectic condition violated between {la}{ka + 1} "
                        f"and {lb}{kb + 1} images"
                    )

    def to_text(self):
        """One-line text form: images of X1, Z1, ..., Xn, Zn."""
        toks = []
        for k in range(self.n_sites):
            toks.append(self.x_images[k].to_text())
            toks.append(self.z_images[k].to_text())
        return " ".join(toks)

    @classmethod
    def from_text(cls, line):
        parts = line.split(" ")
        if len(parts) % 4 != 0:
            raise PauliFormatError(f"malformed tableau line: {line!r}")
        imgs = [
            PauliString.from_letters(parts[i + 1], 1 if parts[i] == "+1" else -1)
            for i in range(0, len(parts), 2)
        ]
        return cls(imgs[0::2], imgs[1::2])


def conjugate(t, p):
    """Return C p C^dagger as a signed Pauli string.

    Decomposes p = sign * i^q * prod_k X_k^{x_k} Z_k^{z_k} and substitutes the
    generator images; the accumulated phase is exact and must land on +-1.
    """
    if t.n_sites != p.n_sites:
        raise SizeMismatchError(
            f"tableau on {t.n_sites} sites, string on {p.n_sites}"
        )
    q = (p.x_bits & p.z_bits).bit_count()
    phase = _PHASES[q % 4] * p.sign
    acc = PauliString.identity(p.n_sites)
    for k in range(p.n_sites):
        if (p.x_bits >> k) & 1:
            ph, acc = multiply(acc, t.x_images[k])
            phase *= ph
        if (p.z_bits >> k) & 1:
            ph, acc = multiply(acc, t.z_images[k])
            phase *= ph
    if phase.imag != 0.0 or abs(phase.real) != 1.0:
        raise InternalStateError(f"conjugation produced non-Hermitian phase {phase}")
    return acc.with_sign(int(phase.real))


@lru_cache(maxsize=8192)
def _two_site_table(t):
    """(code -> code', sign) for all 16 two-site words; code = x1 z1 x2 z2 bits."""
    if t.n_sites != 2:
        raise SizeMismatchError("lookup tables exist for two-site tableaus only")
    codes = np.zeros(16, dtype=np.int64)
    signs = np.zeros(16, dtype=np.int64)
    for code in range(16):
        p = _string_from_code(code)
        r = conjugate(t, p)
        codes[code] = _code_from_string(r)
        signs[code] = r.sign
    codes.setflags(write=False)
    signs.setflags(write=False)
    return codes, signs


def _string_from_code(code):
    x = ((code >> 3) & 1) | (((code >> 1) & 1) << 1)
    z = ((code >> 2) & 1) | ((code & 1) << 1)
    return PauliString(2, x, z, 1)


def _code_from_string(p):
    x1 = p.x_bits & 1
    z1 = p.z_bits & 1
    x2 = (p.x_bits >> 1) & 1
    z2 = (p.z_bits >> 1) & 1
    return (x1 << 3) | (z1 << 2) | (x2 << 1) | z2


def conjugate_at(t2, k, p):
    """Conjugate a chain string by a two-site tableau acting on sites (k, k+1).

    Only the restriction of p to the two sites is transformed; identity
    restrictions pass through untouched. O(1) per call via the lookup table.
    """
    if t2.n_sites != 2:
        raise SizeMismatchError("positioned conjugation needs a two-site tableau")
    if not 1 <= k < p.n_sites:
        raise SizeMismatchError(f"position {k} out of range 1..{p.n_sites - 1}")
    shift = k - 1
    x1 = (p.x_bits >> shift) & 1
    z1 = (p.z_bits >> shift) & 1
    x2 = (p.x_bits >> (shift + 1)) & 1
    z2 = (p.z_bits >> (shift + 1)) & 1
    code = (x1 << 3) | (z1 << 2) | (x2 << 1) | z2
    if code == 0:
        return p
    codes, signs = _two_site_table(t2)
    out = int(codes[code])
    nx1 = (out >> 3) & 1
    nz1 = (out >> 2) & 1
    nx2 = (out >> 1) & 1
    nz2 = out & 1
    clear = ~(0b11 << shift)
    new_x = (p.x_bits & clear) | (nx1 << shift) | (nx2 << (shift + 1))
    new_z = (p.z_bits & clear) | (nz1 << shift) | (nz2 << (shift + 1))
    return PauliString(p.n_sites, new_x, new_z, p.sign * int(signs[code]))


def conjugate_sum(t, h, position=None):
    """Conjugate every term of a weighted Pauli sum, folding signs into the
    coefficients.

    With ``position=k`` the tableau must be two-site and acts on chain sites
    (k, k+1); otherwise the tableau must span the whole chain. Term count and
    the sum of |coefficients| are invariant.
    """
    if position is None:
        if t.n_sites != h.n_sites:
            raise SizeMismatchError(
                f"tableau on {t.n_sites} sites, sum on {h.n_sites}"
            )
        out = h.map_strings(lambda c, s: (c, conjugate(t, s)))
    else:
        if not 1 <= position < h.n_sites:
            raise SizeMismatchError(
                f"position {position} out of range 1..{h.n_sites - 1}"
            )
        out = h.map_strings(lambda c, s: (c, conjugate_at(t, position, s)))
    if len(out) != len(h):
        raise InternalStateError("conjugation changed the term count")
    return out


def compose(outer, inner):
    """Tableau of the product unitary (inner applied first).

    conjugate(compose(a, b), p) == conjugate(a, conjugate(b, p)).
    """
    if outer.n_sites != inner.n_sites:
        raise SizeMismatchError("compose needs equal chain lengths; embed first")
    xs = [conjugate(outer, img) for img in inner.x_images]
    zs = [conjugate(outer, img) for img in inner.z_images]
    return CliffordTableau(xs, zs, validate=False)


def embed_two_site(t2, k, n_sites):
    """Extend a two-site tableau to a chain tableau acting on sites (k, k+1)."""
    if t2.n_sites != 2:
        raise SizeMismatchError("embedding is defined for two-site tableaus")
    if not 1 <= k < n_sites:
        raise SizeMismatchError(f"position {k} out of range 1..{n_sites - 1}")

    def extend(img):
        shift = k - 1
        return PauliString(n_sites, img.x_bits << shift, img.z_bits << shift, img.sign)

    xs, zs = [], []
    for j in range(1, n_sites + 1):
        if j == k:
            xs.append(extend(t2.x_images[0]))
            zs.append(extend(t2.z_images[0]))
        elif j == k + 1:
            xs.append(extend(t2.x_images[1]))
            zs.append(extend(t2.z_images[1]))
        else:
            xs.append(PauliString.single(n_sites, j, "X"))
            zs.append(PauliString.single(n_sites, j, "Z"))
    return CliffordTableau(xs, zs, validate=False)


def compose_embedded(t2, k, accumulated):
    """compose(embed_two_site(t2, k, n), accumulated), done in O(n) table lookups."""
    xs = [conjugate_at(t2, k, img) for img in accumulated.x_images]
    zs = [conjugate_at(t2, k, img) for img in accumulated.z_images]
    return CliffordTableau(xs, zs, validate=False)


def local_unitary(t):
    """Exact dense 4x4 unitary realizing a two-site tableau.

    Built from the rank-1 projector onto the joint +1 eigenvector of the two
    Z images, with columns generated by the X images. The global phase is
    fixed canonically: the first nonzero entry of column 0 is made real
    positive. Conjugation by the result reproduces the tableau on all 16
    two-site words, sign included.
    """
    if t.n_sites != 2:
        raise SizeMismatchError("local unitaries are built for two-site tableaus")
    eye = np.eye(4, dtype=complex)
    gz1 = dense_matrix(t.z_images[0])
    gz2 = dense_matrix(t.z_images[1])
    proj = (eye + gz1) @ (eye + gz2) / 4.0
    col = int(np.argmax(np.linalg.norm(proj, axis=0)))
    phi0 = proj[:, col]
    phi0 = phi0 / np.linalg.norm(phi0)
    gx1 = dense_matrix(t.x_images[0])
    gx2 = dense_matrix(t.x_images[1])
    u = np.column_stack([phi0, gx2 @ phi0, gx1 @ phi0, gx1 @ (gx2 @ phi0)])
    nz = np.flatnonzero(np.abs(u[:, 0]) > 1e-9)[0]
    u = u * (np.conj(u[nz, 0]) / np.abs(u[nz, 0]))
    return u


def _pairing(u, v):
    # symplectic form on 4-bit row codes (x1 z1 x2 z2)
    return (
        ((u >> 3) & (v >> 2)) ^ ((u >> 2) & (v >> 3)) ^ ((u >> 1) & v) ^ (u & (v >> 1))
    ) & 1


class TwoSiteCliffordCatalog:
    """All 720 two-site tableaus, identity first, rest in ascending bit order.

    Built once and shared read-only; the dense unitaries for every entry are
    materialized lazily as a (720, 4, 4) array for batched block transforms.
    """

    def __init__(self, entries):
        self.entries = tuple(entries)
        self._unitaries = None

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    @property
    def unitaries(self):
        if self._unitaries is None:
            self._unitaries = np.stack([local_unitary(t) for t in self.entries])
            self._unitaries.setflags(write=False)
        return self._unitaries


_IDENTITY_MASK = (8 << 12) | (4 << 8) | (2 << 4) | 1


def _tableau_from_mask(mask):
    rows = [(mask >> 12) & 0xF, (mask >> 8) & 0xF, (mask >> 4) & 0xF, mask & 0xF]
    xs = [_string_from_code(rows[0]), _string_from_code(rows[2])]
    zs = [_string_from_code(rows[1]), _string_from_code(rows[3])]
    return CliffordTableau(xs, zs, validate=False)


def _mask_is_symplectic(mask):
    r = ((mask >> 12) & 0xF, (mask >> 8) & 0xF, (mask >> 4) & 0xF, mask & 0xF)
    if _pairing(r[0], r[1]) != 1 or _pairing(r[2], r[3]) != 1:
        return False
    return (
        _pairing(r[0], r[2]) == 0
        and _pairing(r[0], r[3]) == 0
        and _pairing(r[1], r[2]) == 0
        and _pairing(r[1], r[3]) == 0
    )


@lru_cache(maxsize=1)
def enumerate_two_site_cliffords():
    """Deterministic catalog of the 720 sign-positive two-site tableaus.

    Every 16-bit candidate (rows = images of X1, Z1, X2, Z2 as x1 z1 x2 z2
    bit codes) is kept iff it preserves the symplectic form. The identity is
    pinned at index 0; the remaining entries keep ascending mask order.
    """
    masks = [m for m in range(1 << 16) if _mask_is_symplectic(m)]
    masks.remove(_IDENTITY_MASK)
    masks.insert(0, _IDENTITY_MASK)
    return TwoSiteCliffordCatalog([_tableau_from_mask(m) for m in masks])
