"""Sparse operator algebra over complex-weighted Pauli strings.

Conventions used throughout the package:

* Sites are numbered ``1..L``.  Site 1 is the *most significant* qubit of
  the ``2**L`` dense basis, and ``|0> = spin up`` (``sigma^z`` eigenvalue +1).
* A Pauli string is stored as two bit-planes ``(x, z)``; bit ``L - l`` of a
  plane belongs to site ``l``, so the planes read in the same order as dense
  basis indices.  Letters map as ``(x,z) = (0,0) I, (1,0) X, (1,1) Y,
  (0,1) Z``, and the string operator is the tensor product of true Pauli
  matrices, i.e. ``i**popcount(x & z) * X^x * Z^z``.
* The Hilbert-Schmidt inner product is ``<A,B> = tr(A^dag B) / 2**L`` under
  which the Pauli strings are orthonormal, so it reduces to a coefficient
  dot product.

String multiplication is XOR on the bit-planes plus a power-of-i phase from
popcounts, O(1) per string pair.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, Mapping, Tuple

import numpy as np

from .errors import DimensionError, ShapeMismatchError

#: Coefficients below this magnitude are dropped after every arithmetic op.
DROP_TOL = 1e-14

_LETTERS = "IXYZ"
_LETTER_TO_XZ = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}

#: 2x2 Pauli matrices in the (|0>=up, |1>=down) basis.
PAULI_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

_I4 = 1j ** np.arange(4)


@dataclass(frozen=True, slots=True)
class PauliString:
    """A single length-``L`` Pauli word (no amplitude).

    Parameters
    ----------
    length:
        Number of sites L (>= 1).
    x, z:
        Bit-planes; bit ``length - l`` belongs to site ``l``.
    """

    length: int
    x: int
    z: int

    def __post_init__(self):
        if self.length < 1:
            raise ShapeMismatchError("PauliString needs length >= 1")
        mask = (1 << self.length) - 1
        if (self.x | self.z) & ~mask:
            raise ShapeMismatchError("bit-planes exceed the string length")

    @classmethod
    def from_letters(cls, letters: str) -> "PauliString":
        x = z = 0
        for ch in letters:
            bx, bz = _LETTER_TO_XZ[ch]
            x = (x << 1) | bx
            z = (z << 1) | bz
        return cls(len(letters), x, z)

    @classmethod
    def identity(cls, length: int) -> "PauliString":
        return cls(length, 0, 0)

    @classmethod
    def single(cls, length: int, site: int, letter: str) -> "PauliString":
        """String with one non-identity ``letter`` at ``site`` (1-based)."""
        bx, bz = _LETTER_TO_XZ[letter]
        shift = length - site
        return cls(length, bx << shift, bz << shift)

    def letters(self) -> str:
        # index x_bit | (z_bit << 1): 0 -> I, 1 -> X, 2 -> Z, 3 -> Y
        lut = "IXZY"
        out = []
        for site in range(1, self.length + 1):
            shift = self.length - site
            out.append(lut[((self.x >> shift) & 1) | (((self.z >> shift) & 1) << 1)])
        return "".join(out)

    def letter_at(self, site: int) -> str:
        shift = self.length - site
        return "IXZY"[((self.x >> shift) & 1) | (((self.z >> shift) & 1) << 1)]

    @property
    def support(self) -> Tuple[int, ...]:
        """Sites carrying a non-identity letter (1-based, ascending)."""
        occ = self.x | self.z
        return tuple(
            site for site in range(1, self.length + 1) if (occ >> (self.length - site)) & 1
        )

    @property
    def body(self) -> int:
        """Number of non-identity letters (p)."""
        return (self.x | self.z).bit_count()

    @property
    def span(self) -> int:
        """Range r = max(support) - min(support) + 1; 0 for the identity."""
        occ = self.x | self.z
        if occ == 0:
            return 0
        return occ.bit_length() - (occ & -occ).bit_length() + 1

    def commutes_with(self, other: "PauliString") -> bool:
        if self.length != other.length:
            raise ShapeMismatchError("length mismatch")
        sym = (self.x & other.z).bit_count() + (self.z & other.x).bit_count()
        return sym % 2 == 0

    def mul(self, other: "PauliString") -> Tuple[complex, "PauliString"]:
        """Product ``self @ other`` -> (phase, string); phase in {1,-1,i,-i}."""
        if self.length != other.length:
            raise ShapeMismatchError("length mismatch")
        phase, x, z = _mul_xz(self.x, self.z, other.x, other.z)
        return phase, PauliString(self.length, x, z)

    def shifted(self, offset: int, new_length: int) -> "PauliString":
        """Embed into ``new_length`` sites with the support moved by ``offset``.

        A positive offset moves letters towards larger site numbers.
        """
        occ = self.x | self.z
        if occ == 0:
            return PauliString(new_length, 0, 0)
        # shift in site numbering = shift of bit positions by (new_length -
        # length - offset) relative to the low end
        bitshift = (new_length - self.length) - offset
        if bitshift >= 0:
            x, z = self.x << bitshift, self.z << bitshift
        else:
            if (self.x | self.z) & ((1 << -bitshift) - 1):
                raise ShapeMismatchError("shift pushes support off the chain")
            x, z = self.x >> -bitshift, self.z >> -bitshift
        return PauliString(new_length, x, z)

    def to_dense(self) -> np.ndarray:
        return _string_to_dense(self.length, self.x, self.z, 1.0)

    def __str__(self) -> str:
        return self.letters()


def _mul_xz(x1: int, z1: int, x2: int, z2: int) -> Tuple[complex, int, int]:
    x, z = x1 ^ x2, z1 ^ z2
    k = (
        (x1 & z1).bit_count()
        + (x2 & z2).bit_count()
        + 2 * (z1 & x2).bit_count()
        - (x & z).bit_count()
    ) % 4
    return _I4[k], x, z


class PauliPoly:
    """Complex-weighted sum of Pauli strings on ``L`` sites.

    Zero coefficients (below :data:`DROP_TOL`) are never stored.  Instances
    are treated as immutable; all arithmetic returns new objects, which keeps
    them safe to share across threads.
    """

    __slots__ = ("length", "_terms")

    def __init__(self, length: int, terms: Mapping[Tuple[int, int], complex] | None = None):
        self.length = length
        data: Dict[Tuple[int, int], complex] = {}
        if terms:
            for key, c in terms.items():
                if abs(c) > DROP_TOL:
                    data[key] = complex(c)
        self._terms = data

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, length: int) -> "PauliPoly":
        return cls(length)

    @classmethod
    def identity(cls, length: int, coeff: complex = 1.0) -> "PauliPoly":
        return cls(length, {(0, 0): coeff})

    @classmethod
    def from_string(cls, string: PauliString, coeff: complex = 1.0) -> "PauliPoly":
        return cls(string.length, {(string.x, string.z): coeff})

    @classmethod
    def from_letter_terms(cls, length: int, terms: Mapping[str, complex]) -> "PauliPoly":
        data = {}
        for letters, c in terms.items():
            s = PauliString.from_letters(letters)
            if s.length != length:
                raise ShapeMismatchError("letter string has wrong length")
            data[(s.x, s.z)] = data.get((s.x, s.z), 0.0) + c
        return cls(length, data)

    @classmethod
    def single_site(cls, length: int, site: int, letter: str, coeff: complex = 1.0) -> "PauliPoly":
        s = PauliString.single(length, site, letter)
        return cls(length, {(s.x, s.z): coeff})

    @classmethod
    def sigma_plus(cls, length: int, site: int, coeff: complex = 1.0) -> "PauliPoly":
        """``coeff * sigma^+_site`` with ``sigma^+ = (X + iY)/2``."""
        sx = PauliString.single(length, site, "X")
        sy = PauliString.single(length, site, "Y")
        return cls(length, {(sx.x, sx.z): 0.5 * coeff, (sy.x, sy.z): 0.5j * coeff})

    @classmethod
    def sigma_minus(cls, length: int, site: int, coeff: complex = 1.0) -> "PauliPoly":
        sx = PauliString.single(length, site, "X")
        sy = PauliString.single(length, site, "Y")
        return cls(length, {(sx.x, sx.z): 0.5 * coeff, (sy.x, sy.z): -0.5j * coeff})

    @classmethod
    def total_z(cls, length: int) -> "PauliPoly":
        data = {}
        for site in range(1, length + 1):
            s = PauliString.single(length, site, "Z")
            data[(s.x, s.z)] = 1.0
        return cls(length, data)

    # -- container behaviour -------------------------------------------

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[Tuple[PauliString, complex]]:
        for (x, z), c in self._terms.items():
            yield PauliString(self.length, x, z), c

    def coefficient(self, string: PauliString) -> complex:
        if string.length != self.length:
            raise ShapeMismatchError("length mismatch")
        return self._terms.get((string.x, string.z), 0.0)

    def items_raw(self):
        """Raw ``((x, z), coeff)`` pairs; internal fast path."""
        return self._terms.items()

    # -- linear structure ----------------------------------------------

    def _check(self, other: "PauliPoly"):
        if self.length != other.length:
            raise ShapeMismatchError(
                f"polys live on {self.length} vs {other.length} sites"
            )

    def __add__(self, other: "PauliPoly") -> "PauliPoly":
        self._check(other)
        data = dict(self._terms)
        for key, c in other._terms.items():
            data[key] = data.get(key, 0.0) + c
        return PauliPoly(self.length, data)

    def __sub__(self, other: "PauliPoly") -> "PauliPoly":
        return self + (other * -1.0)

    def __mul__(self, scalar: complex) -> "PauliPoly":
        return PauliPoly(self.length, {k: c * scalar for k, c in self._terms.items()})

    __rmul__ = __mul__

    def __neg__(self) -> "PauliPoly":
        return self * -1.0

    def dagger(self) -> "PauliPoly":
        # Pauli strings are Hermitian, so only coefficients conjugate.
        return PauliPoly(self.length, {k: c.conjugate() for k, c in self._terms.items()})

    # -- products --------------------------------------------------------

    def __matmul__(self, other: "PauliPoly") -> "PauliPoly":
        """Operator product ``self @ other``."""
        self._check(other)
        if (
            self.length <= 62
            and len(self._terms) * len(other._terms) > 200_000
        ):
            return self._matmul_vec(other)
        data: Dict[Tuple[int, int], complex] = {}
        for (x1, z1), c1 in self._terms.items():
            for (x2, z2), c2 in other._terms.items():
                phase, x, z = _mul_xz(x1, z1, x2, z2)
                key = (x, z)
                data[key] = data.get(key, 0.0) + phase * c1 * c2
        return PauliPoly(self.length, data)

    def _matmul_vec(self, other: "PauliPoly") -> "PauliPoly":
        """Vectorized product for large polys (bit-planes fit in uint64)."""
        xa, za, ca = self._as_arrays()
        xb, zb, cb = other._as_arrays()
        pa = np.bitwise_count(xa & za).astype(np.int64)
        pb = np.bitwise_count(xb & zb).astype(np.int64)
        x = xa[:, None] ^ xb[None, :]
        z = za[:, None] ^ zb[None, :]
        k = (
            pa[:, None]
            + pb[None, :]
            + 2 * np.bitwise_count(za[:, None] & xb[None, :]).astype(np.int64)
            - np.bitwise_count(x & z).astype(np.int64)
        ) % 4
        coeff = ca[:, None] * cb[None, :] * _I4[k]
        x, z, coeff = x.ravel(), z.ravel(), coeff.ravel()
        order = np.lexsort((z, x))
        x, z, coeff = x[order], z[order], coeff[order]
        boundary = np.empty(x.shape[0], dtype=bool)
        boundary[0] = True
        np.not_equal(x[1:], x[:-1], out=boundary[1:])
        boundary[1:] |= z[1:] != z[:-1]
        starts = np.flatnonzero(boundary)
        sums = np.add.reduceat(coeff, starts)
        keep = np.abs(sums) > DROP_TOL
        data = {
            (int(x[s]), int(z[s])): sums[i]
            for i, s in enumerate(starts)
            if keep[i]
        }
        return PauliPoly(self.length, data)

    def _as_arrays(self):
        n = len(self._terms)
        x = np.empty(n, dtype=np.uint64)
        z = np.empty(n, dtype=np.uint64)
        c = np.empty(n, dtype=complex)
        for i, ((xi, zi), ci) in enumerate(self._terms.items()):
            x[i], z[i], c[i] = xi, zi, ci
        return x, z, c

    def commutator(self, other: "PauliPoly") -> "PauliPoly":
        """``[self, other] = self@other - other@self``.

        Pairs of commuting strings are skipped; anticommuting pairs
        contribute twice the single product.
        """
        self._check(other)
        if (
            self.length <= 62
            and len(self._terms) * len(other._terms) > 200_000
        ):
            return self._matmul_vec(other) - other._matmul_vec(self)
        data: Dict[Tuple[int, int], complex] = {}
        for (x1, z1), c1 in self._terms.items():
            for (x2, z2), c2 in other._terms.items():
                sym = (x1 & z2).bit_count() + (z1 & x2).bit_count()
                if sym % 2 == 0:
                    continue
                phase, x, z = _mul_xz(x1, z1, x2, z2)
                key = (x, z)
                data[key] = data.get(key, 0.0) + 2.0 * phase * c1 * c2
        return PauliPoly(self.length, data)

    # -- metric ----------------------------------------------------------

    def hs_inner(self, other: "PauliPoly") -> complex:
        """``tr(self^dag other)/2**L`` via the coefficient dot product."""
        self._check(other)
        a, b = self._terms, other._terms
        if len(b) < len(a):
            return sum(b[k] * a[k].conjugate() for k in b.keys() & a.keys())
        return sum(a[k].conjugate() * b[k] for k in a.keys() & b.keys())

    def hs_norm(self) -> float:
        return float(np.sqrt(sum(abs(c) ** 2 for c in self._terms.values())))

    # -- locality ----------------------------------------------------------

    def locality_weights(self) -> "LocalityReport":
        body_weights: Dict[int, float] = {}
        body_range: Dict[Tuple[int, int], list] = {}
        for (x, z), c in self._terms.items():
            occ = x | z
            w = abs(c) ** 2
            p = occ.bit_count()
            r = 0 if occ == 0 else occ.bit_length() - (occ & -occ).bit_length() + 1
            body_weights[p] = body_weights.get(p, 0.0) + w
            cell = body_range.setdefault((p, r), [0.0, 0])
            cell[0] += w
            cell[1] += 1
        return LocalityReport(
            body_weights=body_weights,
            body_range={k: (v[0], v[1]) for k, v in body_range.items()},
        )

    # -- dense conversion --------------------------------------------------

    def to_dense(self) -> np.ndarray:
        if self.length > 14:
            raise DimensionError("dense conversion capped at L=14")
        dim = 1 << self.length
        out = np.zeros((dim, dim), dtype=complex)
        cols = np.arange(dim, dtype=np.uint64)
        for (x, z), c in self._terms.items():
            out[cols ^ np.uint64(x), cols] += (
                c
                * _I4[(x & z).bit_count() % 4]
                * (1.0 - 2.0 * (np.bitwise_count(cols & np.uint64(z)) & 1))
            )
        return out

    # -- shifting / embedding ----------------------------------------------

    def embedded(self, new_length: int, offset: int = 0) -> "PauliPoly":
        """Embed into a longer chain, moving site ``l`` to ``l + offset``."""
        data = {}
        for (x, z), c in self._terms.items():
            s = PauliString(self.length, x, z).shifted(offset, new_length)
            data[(s.x, s.z)] = data.get((s.x, s.z), 0.0) + c
        return PauliPoly(new_length, data)

    # -- serialization -------------------------------------------------------

    def to_json_terms(self) -> list:
        """JSON form: list of ``(letters, re, im)`` sorted by letters."""
        rows = [
            (PauliString(self.length, x, z).letters(), c.real, c.imag)
            for (x, z), c in self._terms.items()
        ]
        rows.sort(key=lambda r: r[0])
        return [[s, re, im] for s, re, im in rows]

    @classmethod
    def from_json_terms(cls, length: int, rows: Iterable) -> "PauliPoly":
        data = {}
        for letters, re, im in rows:
            s = PauliString.from_letters(letters)
            if s.length != length:
                raise ShapeMismatchError("letter string has wrong length")
            data[(s.x, s.z)] = complex(re, im)
        return cls(length, data)

    def __repr__(self) -> str:
        parts = []
        for (x, z), c in sorted(self._terms.items()):
            parts.append(f"({c:.6g})*{PauliString(self.length, x, z).letters()}")
            if len(parts) >= 8:
                parts.append(f"... [{len(self._terms)} terms]")
                break
        return "PauliPoly(" + " + ".join(parts) + ")" if parts else "PauliPoly(0)"


@dataclass(frozen=True)
class LocalityReport:
    """Pauli-weight bookkeeping by body count p and range r.

    ``body_weights[p]`` is the total weight ``sum |c|^2`` over strings with
    ``p`` non-identity letters; ``body_range[(p, r)]`` holds the pair
    ``(total weight, term count)`` resolved by range.
    """

    body_weights: Dict[int, float]
    body_range: Dict[Tuple[int, int], Tuple[float, int]]

    def average_weight(self, p: int, r: int) -> float:
        w, n = self.body_range.get((p, r), (0.0, 0))
        return w / n if n else 0.0

    def total_weight(self) -> float:
        return sum(self.body_weights.values())


def _string_to_dense(length: int, x: int, z: int, coeff: complex) -> np.ndarray:
    dim = 1 << length
    out = np.zeros((dim, dim), dtype=complex)
    cols = np.arange(dim, dtype=np.uint64)
    out[cols ^ np.uint64(x), cols] = (
        coeff
        * _I4[(x & z).bit_count() % 4]
        * (1.0 - 2.0 * (np.bitwise_count(cols & np.uint64(z)) & 1))
    )
    return out


# Per-site kernel K[p, i, j] = conj(sigma_p[i, j]) / 2 for the dense -> Pauli
# coefficient transform.
_FROM_DENSE_KERNEL = np.stack(
    [PAULI_MATS[ch].conj() / 2.0 for ch in _LETTERS]
)


def poly_from_dense(op: np.ndarray, drop_tol: float = DROP_TOL) -> PauliPoly:
    """Expand a dense operator over the Pauli-string basis.

    Coefficients are ``c_P = tr(sigma_P^dag op) / 2**L``, computed with a
    per-site tensor contraction in O(L 4^L).  Raises
    :class:`~u1lab.errors.DimensionError` if the matrix dimension is not a
    power of two.
    """
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise DimensionError("expected a square matrix")
    dim = op.shape[0]
    length = dim.bit_length() - 1
    if 1 << length != dim:
        raise DimensionError(f"dimension {dim} is not a power of two")
    if length > 12:
        raise DimensionError("Pauli transform capped at L=12")
    # interleave row/column bits per site: axes (r1, c1, r2, c2, ...)
    tensor = op.reshape((2,) * (2 * length))
    perm = []
    for l in range(length):
        perm.extend([l, length + l])
    tensor = tensor.transpose(perm)
    for _ in range(length):
        # contract the leading (r_l, c_l) pair; the new letter axis is appended
        tensor = np.tensordot(tensor, _FROM_DENSE_KERNEL, axes=([0, 1], [1, 2]))
    # axes are now (p_1, ..., p_L) because each contraction appended its axis
    flat = tensor.ravel()
    data = {}
    for idx in np.flatnonzero(np.abs(flat) > drop_tol):
        letters_idx = np.unravel_index(idx, (4,) * length)
        x = z = 0
        for li in letters_idx:
            bx, bz = _LETTER_TO_XZ[_LETTERS[li]]
            x = (x << 1) | bx
            z = (z << 1) | bz
        data[(x, z)] = complex(flat[idx])
    return PauliPoly(length, data)


def dense_hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """``tr(a^dag b) / dim`` for dense operators."""
    return complex(np.vdot(a, b) / a.shape[0])


def dense_hs_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a) / np.sqrt(a.shape[0]))
