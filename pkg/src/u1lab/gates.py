"""Two-qubit U(1) gate, closed-form exponential, and brickwall propagators.

The elementary gate is ``exp(-i h tau)`` with

    h = XX + YY + delta ZZ + b (Z_2 - Z_1) + d (X_1 Y_2 - Y_1 X_2)
        + m (Z_1 + Z_2),

which conserves ``Z_1 + Z_2``.  One Floquet step applies the odd-bond layer
(1,2), (3,4), ... first to states, then the even-bond layer (2,3), (4,5), ...
(plus the wrap bond (L,1) under periodic boundaries).  The layer order is
pinned by the discrete continuity equation for the even-bond spin current;
see :mod:`u1lab.transport`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigurationError

OBC = "obc"
PBC = "pbc"


@dataclass(frozen=True)
class GateParams:
    """Dimensionless gate parameters (anisotropy, chiral, staggered/uniform
    fields) and the gate duration."""

    delta: float
    d: float
    b: float
    tau: float
    m: float = 0.0

    def j_eff(self) -> float:
        """Effective middle-block coupling ``sqrt(1 + d^2 + b^2)`` (>= 1)."""
        return math.sqrt(1.0 + self.d * self.d + self.b * self.b)

    def frak_d(self) -> float:
        """Generalized anisotropy ratio controlling the transport phase.

        ``sin(2 tau delta)/sin(2 tau j_eff) * j_eff/sqrt(1+d^2)``; returns
        a signed infinity at resonant (localization) durations where the
        denominator vanishes.
        """
        j = self.j_eff()
        num = math.sin(2.0 * self.tau * self.delta) * j / math.sqrt(1.0 + self.d * self.d)
        den = math.sin(2.0 * self.tau * j)
        if den == 0.0:
            return math.inf if num >= 0.0 else -math.inf
        return num / den

    def theta(self) -> float:
        """Twist angle: ``tan(2 theta) = d`` with ``2 theta`` in (-pi/2, pi/2)."""
        return 0.5 * math.atan(self.d)

    def tau_over_quarter_pi(self) -> float:
        return self.tau / (math.pi / 4.0)

    def with_tau(self, tau: float) -> "GateParams":
        return replace(self, tau=tau)


def gate_matrix(p: GateParams) -> np.ndarray:
    """Closed-form ``exp(-i h tau)`` in the ordered basis (00, 01, 10, 11).

    The generator is block diagonal: corner phases ``delta +- 2m`` and a
    middle 2x2 block ``-delta I + A`` with ``A = [[-2b, 2+2id], [2-2id, 2b]]``
    whose square is ``(2 j_eff)^2 I``, so the exponential follows from the
    analytic 2x2 spectral decomposition.
    """
    j = p.j_eff()
    tau = p.tau
    c, s = math.cos(2.0 * tau * j), math.sin(2.0 * tau * j)
    mid_phase = np.exp(1j * p.delta * tau)
    out = np.zeros((4, 4), dtype=complex)
    out[0, 0] = np.exp(-1j * tau * (p.delta + 2.0 * p.m))
    out[3, 3] = np.exp(-1j * tau * (p.delta - 2.0 * p.m))
    out[1, 1] = mid_phase * (c + 1j * s * p.b / j)
    out[1, 2] = mid_phase * (-1j * s * (1.0 + 1j * p.d) / j)
    out[2, 1] = mid_phase * (-1j * s * (1.0 - 1j * p.d) / j)
    out[2, 2] = mid_phase * (c - 1j * s * p.b / j)
    return out


def gate_hamiltonian(p: GateParams) -> np.ndarray:
    """Dense 4x4 generator h (used by the matrix-exponential oracle)."""
    out = np.zeros((4, 4), dtype=complex)
    out[0, 0] = p.delta + 2.0 * p.m
    out[3, 3] = p.delta - 2.0 * p.m
    out[1, 1] = -p.delta - 2.0 * p.b
    out[2, 2] = -p.delta + 2.0 * p.b
    out[1, 2] = 2.0 + 2.0j * p.d
    out[2, 1] = 2.0 - 2.0j * p.d
    return out


@dataclass(frozen=True)
class DensePropagator:
    """One Floquet step as a dense ``2**L x 2**L`` unitary."""

    matrix: np.ndarray
    length: int
    boundary: str
    #: which sublattice layer acts first on states
    layer_order: str = "odd-first"

    @property
    def dim(self) -> int:
        return 1 << self.length


def _apply_adjacent(mat: np.ndarray, gate: np.ndarray, site: int, length: int) -> np.ndarray:
    """Left-multiply ``mat`` by ``gate`` embedded on sites (site, site+1)."""
    d1 = 1 << (site - 1)
    m3 = mat.reshape(d1, 4, -1)
    out = np.tensordot(gate, m3, axes=(1, 1))  # (4, d1, rest)
    return out.transpose(1, 0, 2).reshape(mat.shape)


def _apply_wrap(mat: np.ndarray, gate: np.ndarray, length: int) -> np.ndarray:
    """Left-multiply by ``gate`` on the wrap bond (L, 1)."""
    dim = 1 << length
    g4 = gate.reshape(2, 2, 2, 2)  # (aL, a1, bL, b1)
    m4 = mat.reshape(2, 1 << (length - 2), 2, dim)  # (b1, mid, bL, col)
    out = np.einsum("ABab,bmac->BmAc", g4, m4, optimize=True)
    return out.reshape(dim, dim)


def build_propagator(p: GateParams, length: int, boundary: str = OBC) -> DensePropagator:
    """Dense one-step brickwall propagator for an even chain (L <= 14)."""
    if length % 2 != 0 or length < 2:
        raise ConfigurationError("brickwall propagator needs even L >= 2")
    if length > 14:
        raise ConfigurationError("dense propagators are capped at L = 14")
    if boundary not in (OBC, PBC):
        raise ConfigurationError(f"unknown boundary {boundary!r}")
    g = gate_matrix(p)
    dim = 1 << length
    mat = np.eye(dim, dtype=complex)
    for site in range(1, length, 2):  # odd-bond layer acts first
        mat = _apply_adjacent(mat, g, site, length)
    for site in range(2, length - 1, 2):
        mat = _apply_adjacent(mat, g, site, length)
    if boundary == PBC and length >= 4:
        mat = _apply_wrap(mat, g, length)
    return DensePropagator(matrix=mat, length=length, boundary=boundary)


def build_tilde_propagator(p: GateParams, length: int) -> DensePropagator:
    """``U . sigma^z_1 sigma^z_L`` (open boundaries only)."""
    base = build_propagator(p, length, OBC)
    dim = 1 << length
    idx = np.arange(dim)
    signs = 1.0 - 2.0 * (((idx >> (length - 1)) ^ idx) & 1)
    return DensePropagator(matrix=base.matrix * signs[None, :], length=length, boundary=OBC)


# ---------------------------------------------------------------------------
# conjugation transforms
# ---------------------------------------------------------------------------


def twist_w(length: int, theta: float) -> np.ndarray:
    """Diagonal twist ``exp(-i theta sum_l l sigma^z_l)``."""
    idx = np.arange(1 << length)
    weighted = np.zeros(idx.shape, dtype=float)
    for site in range(1, length + 1):
        zval = 1.0 - 2.0 * ((idx >> (length - site)) & 1)
        weighted += site * zval
    return np.diag(np.exp(-1j * theta * weighted))


def particle_hole(length: int) -> np.ndarray:
    """``prod_l sigma^x_l`` as a dense permutation."""
    dim = 1 << length
    out = np.zeros((dim, dim), dtype=complex)
    idx = np.arange(dim)
    out[idx ^ (dim - 1), idx] = 1.0
    return out


def reflection(length: int) -> np.ndarray:
    """Spatial reflection ``l -> L + 1 - l`` as a dense permutation."""
    dim = 1 << length
    rev = np.zeros(dim, dtype=np.int64)
    for b in range(dim):
        r = 0
        for site in range(length):
            r |= ((b >> site) & 1) << (length - 1 - site)
        rev[b] = r
    out = np.zeros((dim, dim), dtype=complex)
    out[rev, np.arange(dim)] = 1.0
    return out


def translation(length: int, shift: int = 2) -> np.ndarray:
    """Site-relabeling permutation ``l -> l + shift (mod L)``.

    Satisfies ``T sigma_l T^dag = sigma_{l+shift}`` for any single-site
    operator.
    """
    dim = 1 << length
    dest = np.zeros(dim, dtype=np.int64)
    for b in range(dim):
        r = 0
        for site in range(1, length + 1):
            bit = (b >> (length - site)) & 1
            new_site = (site - 1 + shift) % length + 1
            r |= bit << (length - new_site)
        dest[b] = r
    out = np.zeros((dim, dim), dtype=complex)
    out[dest, np.arange(dim)] = 1.0
    return out


def total_z_dense(length: int) -> np.ndarray:
    idx = np.arange(1 << length)
    diag = np.zeros(idx.shape, dtype=float)
    for site in range(1, length + 1):
        diag += 1.0 - 2.0 * ((idx >> (length - site)) & 1)
    return np.diag(diag.astype(complex))


def dist_up_to_phase(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius distance between ``a`` and ``b`` minimized over a global phase."""
    overlap = np.trace(b.conj().T @ a)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(a - phase * b))
