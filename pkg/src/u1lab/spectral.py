"""Exact-diagonalization analysis of brickwall propagators.

Eigenphase spectra and their degeneracy clusters, SU(2) multiplet counting,
and reconstruction of SU(2) ladder generators from degenerate blocks with a
locality-maximizing gauge optimization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from .errors import GaugeAmbiguityError, MultipletMismatchError
from .gates import DensePropagator, GateParams, build_propagator, total_z_dense

#: eigenphase clustering tolerance (radians)
CLUSTER_TOL = 1e-8


def multiplet_count(length: int, s: int) -> int:
    """Number of total-spin-``s`` multiplets for ``length`` spins 1/2.

    ``C(L+1, L/2-s) (1+2s)/(L+1)``; the sum rule
    ``sum_s count(s) (2s+1) = 2**L`` holds exactly.
    """
    if length % 2 != 0 or length < 2:
        raise ValueError("multiplet counting implemented for even L >= 2")
    if not float(s).is_integer() or s < 0 or s > length // 2:
        raise ValueError(f"invalid total spin s={s} for L={length}")
    s = int(s)
    num = math.comb(length + 1, length // 2 - s) * (1 + 2 * s)
    if num % (length + 1) != 0:
        raise AssertionError("multiplet count is not an integer")
    return num // (length + 1)


def su2_degeneracy_multiset(length: int) -> Tuple[int, ...]:
    """Sorted eigenphase-degeneracy multiset implied by pure SU(2) symmetry."""
    sizes: List[int] = []
    for s in range(length // 2 + 1):
        sizes.extend([2 * s + 1] * multiplet_count(length, s))
    return tuple(sorted(sizes))


# ---------------------------------------------------------------------------
# eigenphase clustering
# ---------------------------------------------------------------------------


def cluster_phases(phases: np.ndarray, tol: float = CLUSTER_TOL) -> List[np.ndarray]:
    """Group phases on the unit circle by gap-based splitting.

    Sorts the angles and cuts wherever the circular gap exceeds ``tol``;
    the wrap-around gap at +-pi is treated like any other.
    """
    n = phases.shape[0]
    order = np.argsort(phases)
    sp = phases[order]
    gaps = np.diff(sp)
    wrap_gap = sp[0] + 2.0 * math.pi - sp[-1]
    breaks = np.flatnonzero(gaps > tol)
    if breaks.size == 0:
        return [order]
    clusters = []
    start = 0
    for brk in breaks:
        clusters.append(order[start : brk + 1])
        start = brk + 1
    clusters.append(order[start:])
    if wrap_gap <= tol and len(clusters) > 1:
        clusters[0] = np.concatenate([clusters.pop(), clusters[0]])
    return clusters


@dataclass
class SpectrumReport:
    """Eigenphases of one propagator with degeneracy bookkeeping."""

    eigenphases: np.ndarray
    clusters: List[np.ndarray]
    degeneracy_multiset: Tuple[int, ...]
    multiplet_prediction: Tuple[int, ...]
    matches_su2: bool
    n_distinct: int
    ambiguous: bool
    tolerance_stable: bool
    tau: Optional[float] = None

    @property
    def is_localization_pattern(self) -> bool:
        """Exactly L distinct eigenphases (resonantly annulled hopping)."""
        return self.n_distinct == _length_from_dim(self.eigenphases.shape[0])


def _length_from_dim(dim: int) -> int:
    return dim.bit_length() - 1


def spectrum_report(
    matrix: np.ndarray, tol: float = CLUSTER_TOL, tau: Optional[float] = None
) -> SpectrumReport:
    """Cluster the eigenphases of a unitary and compare against SU(2) counts."""
    phases = np.sort(np.angle(np.linalg.eigvals(matrix)))
    length = _length_from_dim(matrix.shape[0])
    clusters = cluster_phases(phases, tol)
    multiset = tuple(sorted(len(c) for c in clusters))
    if sum(multiset) != matrix.shape[0]:
        raise AssertionError("cluster sizes do not sum to the dimension")
    prediction = su2_degeneracy_multiset(length)
    # ambiguity: some inter-cluster spacing within 10x of the tolerance
    ambiguous = False
    if len(clusters) > 1:
        means = np.sort([_circular_mean(phases[c]) for c in clusters])
        gaps = np.diff(means)
        gaps = np.append(gaps, means[0] + 2.0 * math.pi - means[-1])
        ambiguous = bool(np.min(gaps) < 10.0 * tol)
    stable = all(
        tuple(sorted(len(c) for c in cluster_phases(phases, t))) == multiset
        for t in (1e-9, 1e-7)
    )
    return SpectrumReport(
        eigenphases=phases,
        clusters=clusters,
        degeneracy_multiset=multiset,
        multiplet_prediction=prediction,
        matches_su2=multiset == prediction,
        n_distinct=len(clusters),
        ambiguous=ambiguous,
        tolerance_stable=stable,
        tau=tau,
    )


def _circular_mean(angles: np.ndarray) -> float:
    return float(np.angle(np.exp(1j * angles).mean()))


@dataclass
class SpectrumScan:
    """Per-tau spectrum reports plus flagged special durations."""

    reports: List[SpectrumReport]
    su2_taus: List[float]
    localization_taus: List[float]
    extra_degeneracy_taus: List[float]
    baseline_distinct: int


def spectrum_vs_tau(
    base: GateParams,
    taus: Sequence[float],
    length: int,
    boundary: str = "obc",
    tol: float = CLUSTER_TOL,
) -> SpectrumScan:
    """Eigenphase spectra along a gate-duration scan (L <= 12).

    Flags durations whose degeneracy multiset matches the SU(2) prediction,
    localization points (exactly L distinct eigenphases), and points with
    enhanced degeneracy beyond the scan's generic pattern (commensurate/extra
    degeneracies).
    """
    if length > 12:
        raise ValueError("spectrum scans capped at L=12")
    reports = []
    for tau in taus:
        u = build_propagator(base.with_tau(float(tau)), length, boundary)
        reports.append(spectrum_report(u.matrix, tol, tau=float(tau)))
    counts = np.array([r.n_distinct for r in reports])
    vals, freq = np.unique(counts, return_counts=True)
    baseline = int(vals[np.argmax(freq)])
    su2_taus, loc_taus, extra_taus = [], [], []
    for r in reports:
        if r.matches_su2:
            su2_taus.append(r.tau)
        if r.is_localization_pattern:
            loc_taus.append(r.tau)
        elif r.n_distinct < baseline and not r.matches_su2:
            extra_taus.append(r.tau)
    return SpectrumScan(
        reports=reports,
        su2_taus=su2_taus,
        localization_taus=loc_taus,
        extra_degeneracy_taus=extra_taus,
        baseline_distinct=baseline,
    )


# ---------------------------------------------------------------------------
# SU(2) generators from degenerate blocks
# ---------------------------------------------------------------------------


@dataclass
class _LadderElement:
    """One ``|m+1><m|`` matrix element of the block-wise raising operator."""

    coeff: float  # sqrt(s(s+1) - m(m+1))
    bra: np.ndarray  # |m>
    ket: np.ndarray  # |m+1>


@dataclass
class Su2Generators:
    """Reconstructed SU(2) ladder operators commuting with a propagator.

    ``s_plus`` is assembled block-wise from the degenerate eigenspaces, so it
    commutes with the propagator by construction; ``gauge_phases`` hold the
    per-ladder-element unit phases (the eigenvector gauge freedom).
    """

    length: int
    s_plus: np.ndarray
    z: np.ndarray
    gauge_phases: np.ndarray
    ladder: List[_LadderElement] = field(repr=False, default_factory=list)

    @property
    def s_minus(self) -> np.ndarray:
        return self.s_plus.conj().T

    @property
    def x(self) -> np.ndarray:
        return self.s_plus + self.s_minus

    @property
    def y(self) -> np.ndarray:
        return -1j * (self.s_plus - self.s_minus)

    def casimir(self) -> np.ndarray:
        """``X^2 + Y^2 + Z^2``; its Pauli weights are gauge independent."""
        x, y = self.x, self.y
        return x @ x + y @ y + self.z @ self.z

    def with_gauge(self, phases: np.ndarray) -> "Su2Generators":
        s_plus = np.zeros_like(self.s_plus)
        for u, elem in zip(phases, self.ladder):
            s_plus += (u * elem.coeff) * np.outer(elem.ket, elem.bra.conj())
        return Su2Generators(
            length=self.length,
            s_plus=s_plus,
            z=self.z,
            gauge_phases=np.asarray(phases, dtype=complex),
            ladder=self.ladder,
        )


def reconstruct_su2(
    u: DensePropagator, tol: float = CLUSTER_TOL, z_int_tol: float = 1e-8
) -> Su2Generators:
    """Build SU(2) raising/lowering operators from degenerate blocks.

    Diagonalizes the propagator, groups eigenvectors into equal-phase blocks,
    and inside each block diagonalizes the projected total magnetization to
    obtain the ``|m>`` ladder basis.  Raises
    :class:`~u1lab.errors.MultipletMismatchError` when the degeneracy multiset
    is not the SU(2) one and :class:`~u1lab.errors.GaugeAmbiguityError` when a
    magnetization eigenvalue repeats inside a block (symmetry beyond SU(2)).
    """
    mat = u.matrix
    length = u.length
    t, q = scipy.linalg.schur(mat, output="complex")
    offdiag = np.abs(t - np.diag(np.diag(t))).max()
    if offdiag > 1e-10:
        raise AssertionError(f"Schur form of a unitary should be diagonal ({offdiag:.2e})")
    phases = np.angle(np.diag(t))
    clusters = cluster_phases(phases, tol)
    multiset = tuple(sorted(len(c) for c in clusters))
    prediction = su2_degeneracy_multiset(length)
    if multiset != prediction:
        raise MultipletMismatchError(
            "degeneracy multiset is not SU(2)-compatible",
            observed=multiset,
            expected=prediction,
        )
    z = total_z_dense(length)
    zdiag = np.real(np.diag(z)).copy()
    ladder: List[_LadderElement] = []
    for cluster in clusters:
        block = q[:, cluster]
        s = (len(cluster) - 1) / 2.0
        # projected magnetization inside the degenerate block
        zb = block.conj().T @ (zdiag[:, None] * block)
        vals, vecs = np.linalg.eigh(zb)
        rounded = np.round(vals)
        if np.abs(vals - rounded).max() > z_int_tol:
            raise GaugeAmbiguityError(
                "projected magnetization is not near-integer in a block",
                block_phases=phases[cluster],
                z_eigenvalues=vals,
            )
        if np.any(np.diff(rounded) < 1.0):
            raise GaugeAmbiguityError(
                "repeated magnetization eigenvalue inside a degenerate block",
                block_phases=phases[cluster],
                z_eigenvalues=vals,
            )
        states = block @ vecs  # columns ordered by ascending m (z = 2m)
        for i in range(len(cluster) - 1):
            m = rounded[i] / 2.0
            coeff = math.sqrt(s * (s + 1.0) - m * (m + 1.0))
            ladder.append(_LadderElement(coeff=coeff, bra=states[:, i], ket=states[:, i + 1]))
    dim = mat.shape[0]
    s_plus = np.zeros((dim, dim), dtype=complex)
    for elem in ladder:
        s_plus += elem.coeff * np.outer(elem.ket, elem.bra.conj())
    return Su2Generators(
        length=length,
        s_plus=s_plus,
        z=z,
        gauge_phases=np.ones(len(ladder), dtype=complex),
        ladder=ladder,
    )


# ---------------------------------------------------------------------------
# gauge optimization
# ---------------------------------------------------------------------------


def _one_body_components(gen: Su2Generators) -> np.ndarray:
    """Matrix A[(site, X/Y), j] of 1-body Pauli coefficients per ladder element.

    A raising operator carries magnetization charge +2, so only the X and Y
    single-site strings can appear.
    """
    length = gen.length
    dim = 1 << length
    norm = 1.0 / dim
    rows = []
    idx = np.arange(dim)
    for site in range(1, length + 1):
        flip = idx ^ (1 << (length - site))
        sign = 1.0 - 2.0 * ((idx >> (length - site)) & 1)
        row_x = []
        row_y = []
        for elem in gen.ladder:
            ket, bra = elem.ket, elem.bra
            # <m| X_l |m+1> and <m| Y_l |m+1>
            xval = np.vdot(bra, ket[flip])
            yval = np.vdot(bra, -1j * sign * ket[flip])
            row_x.append(elem.coeff * xval * norm)
            row_y.append(elem.coeff * yval * norm)
        rows.append(row_x)
        rows.append(row_y)
    return np.array(rows, dtype=complex)


def _quasirandom_phases(n: int, seed_index: int) -> np.ndarray:
    """Deterministic low-discrepancy phases; keeps the pipeline RNG-free."""
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    frac = (np.arange(1, n + 1) * golden * (seed_index + 1)) % 1.0
    return np.exp(2j * math.pi * frac)


def optimize_gauge(
    gen: Su2Generators,
    restarts: int = 3,
    max_sweeps: int = 500,
    improve_tol: float = 1e-10,
) -> Su2Generators:
    """Choose eigenvector phases maximizing the 1-body Pauli weight of S+.

    The objective ``w_1(u) = u^dag G u`` (``G`` the Gram matrix of 1-body
    components) is a sum of cosines of phase differences, so each coordinate
    update has a closed-form argmax; sweeps are monotone and stop once the
    improvement per sweep drops below ``improve_tol``.  A few deterministic
    quasi-random restarts guard against local optima.
    """
    n = len(gen.ladder)
    if n == 0:
        return gen
    a = _one_body_components(gen)
    gram = a.conj().T @ a
    diag = np.real(np.diag(gram))
    hollow = gram - np.diag(diag)

    def ascend(u: np.ndarray) -> Tuple[np.ndarray, float]:
        u = u.astype(complex).copy()
        prev = float(np.real(np.vdot(u, gram @ u)))
        for _ in range(max_sweeps):
            for j in range(n):
                h = np.vdot(hollow[j].conj(), u)  # sum_k hollow[j,k] u_k
                if abs(h) > 0.0:
                    u[j] = h / abs(h)
            cur = float(np.real(np.vdot(u, gram @ u)))
            if cur - prev < improve_tol:
                prev = cur
                break
            prev = cur
        return u, prev

    starts = [np.ones(n, dtype=complex)]
    starts.extend(_quasirandom_phases(n, i) for i in range(max(0, restarts - 1)))
    best_u, best_val = None, -np.inf
    for u0 in starts:
        u, val = ascend(u0)
        if val > best_val:
            best_u, best_val = u, val
    return gen.with_gauge(best_u)


def one_body_weight(gen: Su2Generators) -> float:
    """Total weight of 1-body Pauli strings in S+ (the gauge objective)."""
    a = _one_body_components(gen)
    vec = a @ gen.gauge_phases
    return float(np.sum(np.abs(vec) ** 2))
