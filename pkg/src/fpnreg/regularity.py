"""Regularity decomposition for sparse subsets of F_p^n.

A translate v is regular for A with respect to H when every nontrivial
Fourier coefficient of the localization A_H^v (transform over H) is at most
eps |A| / N.  A subspace is regular when the irregular translates carry mass
at most eps N.  Refinement annihilates one witnessing frequency per irregular
coset, which provably raises the energy d(A, H) by at least eps^3 while
growing the index by at most a factor p^{|V/H|}; iterating from H = V yields
the decomposition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, InputError
from .fourier import _multi_dft, rep_for_eta
from .vectorspace import (
    DenseSubset,
    SpaceDescriptor,
    SubspaceBasis,
    annihilator_within,
    same_space,
)

# Energy increments are ratios of exact integer counts; this slack only
# absorbs double-precision rounding.
ENERGY_TOL = 1e-9

_SCAN_BLOCK = 1 << 20


# ---------------------------------------------------------------------------
# Per-coset scan
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VectorClassification:
    """Per-coset regularity records for A with respect to H."""

    H: SubspaceBasis
    eps: float
    threshold: float
    reps: np.ndarray
    sup_values: np.ndarray
    counts: np.ndarray
    regular: np.ndarray
    witness_freqs: np.ndarray  # maximizing dual rep per irregular coset, -1 otherwise
    irregular_mass: int

    @property
    def is_regular(self) -> bool:
        return self.irregular_mass <= self.eps * self.H.space.N

    def irregular_reps(self) -> np.ndarray:
        return self.reps[~self.regular]


def _batched_spectra(vecs: np.ndarray, p: int, dim: int) -> np.ndarray:
    """Row-wise flat spectra of coefficient-order vectors (rows = cosets)."""
    b = vecs.shape[0]
    t = np.asarray(vecs, dtype=complex).reshape((b,) + (p,) * dim)
    w = np.exp(-2j * np.pi * (np.outer(np.arange(p), np.arange(p)) % p) / p)
    for ax in range(1, dim + 1):
        t = np.moveaxis(np.tensordot(w, t, axes=(1, ax)), 0, ax)
    return t.reshape(b, -1) / p**dim


def restricted_sup(A: DenseSubset, H: SubspaceBasis, v: int) -> float:
    """sup over xi outside H^perp of |fhat(xi)| for the localization A_H^v."""
    space = same_space(A, H)
    digs = (H.element_digits() - space.digits(int(v))) % space.p
    vec = A.mask[space.index(digs)].astype(np.float64)
    if H.size == 1:
        return 0.0
    spec = _multi_dft(vec, space.p, H.dim) / H.size
    return float(np.abs(spec[1:]).max())


def classify_vectors(A: DenseSubset, H: SubspaceBasis, eps: float) -> VectorClassification:
    """Classify every coset representative of V/H as regular or irregular.

    Regularity is coset-invariant, so scanning representatives covers V; the
    witness frequency per irregular coset is the maximizer, ties broken by
    minimal flat index.
    """
    if not 0 < eps < 1:
        raise InputError(f"eps must lie in (0, 1), got {eps}")
    space = same_space(A, H)
    cs = H.coset_system()
    reps = cs.reps
    K = len(reps)
    threshold = eps * A.card / space.N

    sups = np.zeros(K)
    counts = np.zeros(K, dtype=np.int64)
    witnesses = np.full(K, -1, dtype=np.int64)
    hdig = H.element_digits()
    xi_of_eta = rep_for_eta(H)

    block = max(1, _SCAN_BLOCK // max(H.size, 1))
    for lo in range(0, K, block):
        hi = min(lo + block, K)
        rdig = space.digits(reps[lo:hi])  # (B, n)
        idx = space.index((hdig[None, :, :] - rdig[:, None, :]) % space.p)
        vecs = A.mask[idx].astype(np.float64)
        counts[lo:hi] = vecs.sum(axis=1).astype(np.int64)
        if H.size > 1:
            spec = np.abs(_batched_spectra(vecs, space.p, H.dim))
            sups[lo:hi] = spec[:, 1:].max(axis=1)
            for j in range(lo, hi):
                if sups[j] > threshold:
                    row = spec[j - lo]
                    ties = np.flatnonzero(row[1:] == sups[j]) + 1
                    witnesses[j] = xi_of_eta[ties].min()

    regular = sups <= threshold
    irregular_mass = int((~regular).sum()) * H.size
    return VectorClassification(
        H=H,
        eps=eps,
        threshold=threshold,
        reps=reps,
        sup_values=sups,
        counts=counts,
        regular=regular,
        witness_freqs=witnesses,
        irregular_mass=irregular_mass,
    )


# ---------------------------------------------------------------------------
# Energy
# ---------------------------------------------------------------------------


def localized_counts(A: DenseSubset, H: SubspaceBasis) -> np.ndarray:
    """|A_H^v| for every coset representative v, via one bincount pass.

    a in A lands in the coset of v exactly when v + H = -a + H.
    """
    space = same_space(A, H)
    cs = H.coset_system()
    ids = cs.coset_id[space.neg(A.members())]
    return np.bincount(ids, minlength=cs.K).astype(np.int64)


def energy(A: DenseSubset, H: SubspaceBasis) -> float:
    """d(A, H): mean squared coset density of A over H, normalized by the
    squared global density.  Equals 1 at H = V and N/|A| at H = {0}."""
    space = same_space(A, H)
    if A.card == 0:
        raise InputError("energy is undefined for an empty set")
    cnt = localized_counts(A, H)
    return float((cnt.astype(np.float64) ** 2).sum()) * space.N / (H.size * A.card**2)


# ---------------------------------------------------------------------------
# Refinement
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RefineDiagnostics:
    witnesses: tuple
    energy_before: float
    energy_after: float
    index_before: int
    index_after: int

    @property
    def increment(self) -> float:
        return self.energy_after - self.energy_before


def refine_step(
    A: DenseSubset,
    H: SubspaceBasis,
    eps: float,
    classification: VectorClassification | None = None,
) -> tuple[SubspaceBasis, RefineDiagnostics]:
    """One energy-increment step: annihilate one witnessing frequency per
    irregular coset.  Requires H not to be eps-regular for A."""
    space = same_space(A, H)
    cls = classification if classification is not None else classify_vectors(A, H, eps)
    if cls.H != H or cls.eps != eps:
        raise InputError("classification was computed for different inputs")
    if cls.is_regular:
        raise ContractError("refine_step called on an eps-regular subspace")
    witnesses = np.unique(cls.witness_freqs[~cls.regular])
    new_h = annihilator_within(H, witnesses)
    diag = RefineDiagnostics(
        witnesses=tuple(int(x) for x in witnesses),
        energy_before=energy(A, H),
        energy_after=energy(A, new_h),
        index_before=space.N // H.size,
        index_after=space.N // new_h.size,
    )
    return new_h, diag


# ---------------------------------------------------------------------------
# Iteration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegularityReport:
    """Outcome of the refinement iteration (single- or multi-set)."""

    H_final: SubspaceBasis
    iterations: int
    energy_trace: tuple
    index_trace: tuple
    mass_trace: tuple  # summed irregular mass at each visited subspace
    classifications: tuple
    succeeded: bool
    stop_reason: str  # regular | step_cap | floor_hit
    step_cap: int
    statement_step_cap: int
    claim_bound: float | None = None
    claim_ok: bool | None = None

    @property
    def classification(self) -> VectorClassification:
        return self.classifications[0]


def _step_caps(eps: float, alpha: float, m: int) -> tuple[int, int]:
    proof = math.ceil(4 * m * m * eps**-3 * alpha**-2)
    statement = math.ceil(4 * m * m * (eps * alpha) ** -2)
    return proof, statement


def _validate_params(eps, alpha, floor):
    if not 0 < eps < 1:
        raise InputError(f"eps must lie in (0, 1), got {eps}")
    if not 0 < alpha <= 1:
        raise InputError(f"alpha must lie in (0, 1], got {alpha}")
    if floor < 1:
        raise InputError(f"floor must be >= 1, got {floor}")


def _iterate(parts, eps, alpha, floor, m, sigma=None, delta=None):
    space = same_space(*parts)
    step_cap, statement_cap = _step_caps(eps, alpha, m)
    H = SubspaceBasis.full(space)
    nonempty = [A for A in parts if A.card]

    def total_energy(h):
        return float(sum(energy(A, h) for A in nonempty))

    trace = [total_energy(H)] if nonempty else []
    index_trace = [1] if nonempty else []
    mass_trace = []
    iterations = 0
    while True:
        classes = [classify_vectors(A, H, eps) for A in parts]
        if nonempty:
            mass_trace.append(sum(c.irregular_mass for c in classes))
        failing = next((i for i, c in enumerate(classes) if not c.is_regular), None)
        if failing is None:
            stop, ok = "regular", True
            break
        if iterations >= step_cap:
            stop, ok = "step_cap", False
            break
        new_h, _ = refine_step(parts[failing], H, eps, classes[failing])
        if new_h.size < floor:
            stop, ok = "floor_hit", False
            break
        H = new_h
        iterations += 1
        trace.append(total_energy(H))
        index_trace.append(space.N // H.size)

    claim_bound = claim_ok = None
    if sigma is not None and delta is not None and m == 1:
        claim_bound = (1 + delta) ** 2 * 4 / alpha**2
        checked = [
            e
            for e, k in zip(trace, index_trace)
            if space.N // k >= sigma * space.N
        ]
        claim_ok = all(e <= claim_bound + ENERGY_TOL for e in checked)

    return RegularityReport(
        H_final=H,
        iterations=iterations,
        energy_trace=tuple(trace),
        index_trace=tuple(index_trace),
        mass_trace=tuple(mass_trace),
        classifications=tuple(classes),
        succeeded=ok,
        stop_reason=stop,
        step_cap=step_cap,
        statement_step_cap=statement_cap,
        claim_bound=claim_bound,
        claim_ok=claim_ok,
    )


def regularize(
    A: DenseSubset,
    eps: float,
    alpha: float,
    floor: int = 1,
    sigma: float | None = None,
    delta: float | None = None,
) -> RegularityReport:
    """Refine from H = V until H is eps-regular for A.

    alpha enters only through the step cap ceil(4 eps^-3 alpha^-2) (and the
    energy-bound check when A sits inside a (sigma, delta)-certified set, in
    which case d(A, H) <= (1+delta)^2 4/alpha^2 is asserted along the trace
    for every H of size >= sigma N).  An empty A is vacuously regular at V.
    """
    _validate_params(eps, alpha, floor)
    return _iterate([A], eps, alpha, floor, 1, sigma=sigma, delta=delta)


def regularize_multi(parts, eps: float, alpha: float, floor: int = 1) -> RegularityReport:
    """Find one H that is eps-regular for every part simultaneously.

    Refines on the lowest-index failing part using the summed energy; the
    step cap is ceil(4 m^2 eps^-3 alpha^-2).  Parts must be disjoint.
    """
    parts = list(parts)
    if not parts:
        raise InputError("need at least one part")
    _validate_params(eps, alpha, floor)
    same_space(*parts)
    total = np.zeros(parts[0].space.N, dtype=np.int64)
    for A in parts:
        total += A.mask
    if int(total.max(initial=0)) > 1:
        raise InputError("parts must be pairwise disjoint")
    return _iterate(parts, eps, alpha, floor, len(parts))


# ---------------------------------------------------------------------------
# Tower function
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TowerValue:
    """W(t) with W(1) = 2p, W(t) = (2p)^W(t-1); exact while <= 2^63."""

    t: int
    value: int | None
    overflow: bool


def tower(t: int, p: int) -> TowerValue:
    if not isinstance(t, int) or t < 1:
        raise InputError(f"tower level must be a positive integer, got {t}")
    if p < 2:
        raise InputError(f"p must be at least 2, got {p}")
    base = 2 * p
    value = base
    for _ in range(t - 1):
        if value > 63:  # base >= 6, so base^value certainly exceeds 2^63
            return TowerValue(t, None, True)
        value = base**value
        if value > 2**63:
            return TowerValue(t, None, True)
    return TowerValue(t, int(value), False)
