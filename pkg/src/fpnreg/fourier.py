"""Discrete Fourier analysis on V = F_p^n and on arbitrary subspaces H <= V.

The transform of f over H is fhat(xi) = (1/|H|) sum_{x in H} f(x) e(-<x,xi>/p)
with e(z) = exp(2 pi i z).  Characters of H are the quotient V/H^perp, so a
spectrum carries one entry per canonical coset representative of V/H^perp
(|H| entries); the entry value depends on xi only through its coset.

Transforms run as dim(H) sequential length-p passes over the coefficient
tensor of H, O(|H| dim p) per call.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InputError
from .vectorspace import (
    DenseSubset,
    SpaceDescriptor,
    SubspaceBasis,
    _check_index,
    _weights,
    same_space,
)


@lru_cache(maxsize=None)
def _root_matrix(p: int) -> np.ndarray:
    """W[a, b] = exp(-2 pi i a b / p), from one high-accuracy primitive root."""
    k = np.arange(p)
    w = np.exp(-2j * np.pi * (np.outer(k, k) % p) / p)
    w.flags.writeable = False
    return w


def _multi_dft(vec: np.ndarray, p: int, dim: int, inverse: bool = False) -> np.ndarray:
    """Length-p DFT along every axis of the (p,)*dim coefficient tensor."""
    t = np.asarray(vec, dtype=complex).reshape((p,) * dim)
    w = _root_matrix(p)
    if inverse:
        w = w.conj()
    for ax in range(dim):
        t = np.moveaxis(np.tensordot(w, t, axes=(1, ax)), 0, ax)
    return t.reshape(-1)


def _dual_data(H: SubspaceBasis):
    """(freqs, eta, rep_for_eta): canonical dual reps of V/H^perp, their
    coefficient-space frequency for the tensor transform, and the inverse map."""
    if "dual" not in H._cache:
        space = H.space
        freqs = H.annihilator().coset_system().reps
        if len(freqs) != H.size:
            raise AssertionError("dual representative count must equal |H|")
        if H.dim:
            e = (space.digits(freqs) @ H.rows.T) % space.p
            eta = e @ _weights(space.p, H.dim)
        else:
            eta = np.zeros(1, dtype=np.int64)
        rep_for_eta = np.empty(H.size, dtype=np.int64)
        rep_for_eta[eta] = freqs
        for arr in (eta, rep_for_eta):
            arr.flags.writeable = False
        H._cache["dual"] = (freqs, eta, rep_for_eta)
    return H._cache["dual"]


def _sorted_positions(H: SubspaceBasis) -> np.ndarray:
    """Position of each coefficient-order element inside elements()."""
    if "sorted_pos" not in H._cache:
        pos = np.searchsorted(H.elements(), H._coeff_elements())
        pos.flags.writeable = False
        H._cache["sorted_pos"] = pos
    return H._cache["sorted_pos"]


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


class DenseFunction:
    """A real-valued function on V or on a subspace of V.

    Values align with the support's elements in ascending index order;
    support None means all of V.
    """

    __slots__ = ("space", "support", "values")

    def __init__(self, space: SpaceDescriptor, values, support: SubspaceBasis | None = None):
        values = np.asarray(values, dtype=np.float64)
        expected = space.N if support is None else support.size
        if values.shape != (expected,):
            raise InputError(f"expected {expected} values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise InputError("function values must be finite")
        if support is not None and support.space != space:
            raise InputError("support subspace lives in a different space")
        values = values.copy()
        values.flags.writeable = False
        self.space = space
        self.support = support
        self.values = values

    @classmethod
    def from_subset(cls, A: DenseSubset, support: SubspaceBasis | None = None) -> "DenseFunction":
        if support is None:
            return cls(A.space, A.mask.astype(np.float64))
        same_space(A, support)
        return cls(A.space, A.mask[support.elements()].astype(np.float64), support)

    @classmethod
    def constant(cls, space: SpaceDescriptor, c: float, support: SubspaceBasis | None = None) -> "DenseFunction":
        size = space.N if support is None else support.size
        return cls(space, np.full(size, float(c)), support)

    def domain_elements(self) -> np.ndarray:
        if self.support is None:
            return np.arange(self.space.N, dtype=np.int64)
        return self.support.elements()

    def __repr__(self):
        dom = "V" if self.support is None else f"H(dim={self.support.dim})"
        return f"DenseFunction(p={self.space.p}, n={self.space.n}, on {dom})"


@dataclass(frozen=True)
class Spectrum:
    """Fourier coefficients of a function over the subspace `base`.

    freqs are the canonical dual representatives (minimal index per coset of
    V/base^perp), ascending; freqs[0] == 0 is the trivial character.
    """

    base: SubspaceBasis
    freqs: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.freqs) != len(self.values):
            raise InputError("frequency/value length mismatch")
        self.freqs.flags.writeable = False
        self.values.flags.writeable = False

    @property
    def space(self) -> SpaceDescriptor:
        return self.base.space

    def value_at(self, xi: int) -> complex:
        """Entry for any xi in V (resolved through its coset mod base^perp)."""
        xi = int(_check_index(self.space, xi))
        rep = int(self.base.annihilator().coset_system().rep_of(xi))
        pos = int(np.searchsorted(self.freqs, rep))
        return complex(self.values[pos])

    def sup_nontrivial(self) -> float:
        """sup over xi outside base^perp of |fhat(xi)|."""
        if len(self.values) <= 1:
            return 0.0
        return float(np.abs(self.values[1:]).max())


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------


def _coeff_values(f: DenseFunction, H: SubspaceBasis) -> np.ndarray:
    """f's values over H in coefficient order; restricts full-space functions."""
    if f.space != H.space:
        raise InputError("function and subspace live in different spaces")
    if f.support is None or f.support.is_full():
        # full-space values align with flat indices, so restriction is a gather
        return f.values[H._coeff_elements()]
    if f.support == H:
        return f.values[_sorted_positions(H)]
    raise InputError("function support does not match the transform subspace")


def dft(f: DenseFunction, H: SubspaceBasis) -> Spectrum:
    """Transform of f with respect to H."""
    g = _coeff_values(f, H)
    ghat = _multi_dft(g, H.space.p, H.dim) / H.size
    freqs, eta, _ = _dual_data(H)
    return Spectrum(H, freqs, ghat[eta])


def _idft_complex(s: Spectrum) -> np.ndarray:
    """Inverse transform, complex, aligned with base.elements()."""
    H = s.base
    _, eta, _ = _dual_data(H)
    ghat = np.zeros(H.size, dtype=complex)
    ghat[eta] = s.values
    g = _multi_dft(ghat, H.space.p, H.dim, inverse=True)
    out = np.empty(H.size, dtype=complex)
    out[_sorted_positions(H)] = g
    return out


def idft(s: Spectrum) -> DenseFunction:
    """Inverse transform; intended for spectra of real functions, keeps the
    real part (the imaginary residue is round-off for such spectra)."""
    vals = _idft_complex(s).real
    H = s.base
    if H.is_full():
        # elements() of the full basis is arange(N), so vals align flat
        return DenseFunction(H.space, vals)
    return DenseFunction(H.space, vals, H)


def convolve(f: DenseFunction, g: DenseFunction, H: SubspaceBasis) -> DenseFunction:
    """Normalized convolution f*g(h) = E_{x in H} f(x) g(h-x), computed
    spectrally; satisfies dft(f*g) = dft(f) dft(g) entrywise."""
    sf = dft(f, H)
    sg = dft(g, H)
    return idft(Spectrum(H, sf.freqs, sf.values * sg.values))


@dataclass(frozen=True)
class IdentitySuiteReport:
    """Max deviations of the four basic transform identities."""

    parseval: float
    plancherel: float
    inversion: float
    convolution: float

    def max_deviation(self) -> float:
        return max(self.parseval, self.plancherel, self.inversion, self.convolution)


def identity_suite(f: DenseFunction, g: DenseFunction, H: SubspaceBasis) -> IdentitySuiteReport:
    """Residuals of Parseval, Plancherel, inversion, and the convolution theorem."""
    fv = _coeff_values(f, H)
    gv = _coeff_values(g, H)
    sf = dft(f, H)
    sg = dft(g, H)

    parseval = abs(float(np.mean(fv * fv)) - float((np.abs(sf.values) ** 2).sum()))
    plancherel = abs(complex(np.mean(fv * gv)) - complex((sf.values * sg.values.conj()).sum()))

    recon = _idft_complex(sf)
    fsorted = np.empty(H.size)
    fsorted[_sorted_positions(H)] = fv
    inversion = float(np.abs(recon - fsorted).max())

    conv = convolve(f, g, H)
    sconv = dft(conv, H)
    convolution = float(np.abs(sconv.values - sf.values * sg.values).max())

    return IdentitySuiteReport(parseval, float(plancherel), inversion, convolution)


# ---------------------------------------------------------------------------
# Fast localized-indicator helpers (hot path for the regularity iteration)
# ---------------------------------------------------------------------------


def localized_coeff_vector(A: DenseSubset, H: SubspaceBasis, v: int) -> np.ndarray:
    """Indicator of A_H^v = (A+v) ^ H over H's elements in coefficient order."""
    space = same_space(A, H)
    digs = (H.element_digits() - space.digits(int(v))) % space.p
    return A.mask[space.index(digs)].astype(np.float64)


def coeff_spectrum(vec: np.ndarray, H: SubspaceBasis) -> np.ndarray:
    """Flat spectrum tensor (indexed by eta) of a coefficient-order vector."""
    return _multi_dft(vec, H.space.p, H.dim) / H.size


def rep_for_eta(H: SubspaceBasis) -> np.ndarray:
    """Canonical dual representative for each flat eta index."""
    return _dual_data(H)[2]


def full_spectrum(space: SpaceDescriptor, values) -> np.ndarray:
    """Full-group transform with flat-index alignment on both sides:
    out[xi] = (1/N) sum_x values[x] e(-<x,xi>/p).  The flat ordering of the
    coefficient tensor pairs point digits with frequency digits directly."""
    return _multi_dft(np.asarray(values, dtype=np.float64), space.p, space.n) / space.N


# ---------------------------------------------------------------------------
# Structured-text form
# ---------------------------------------------------------------------------


def spectrum_to_dict(s: Spectrum) -> dict:
    return {
        "p": s.space.p,
        "n": s.space.n,
        "H_rows": [[int(x) for x in row] for row in s.base.rows],
        "entries": [
            [int(xi), float(val.real), float(val.imag)]
            for xi, val in zip(s.freqs, s.values)
        ],
    }


def spectrum_from_dict(d: dict) -> Spectrum:
    space = SpaceDescriptor(int(d["p"]), int(d["n"]))
    base = SubspaceBasis.from_rows(space, np.asarray(d["H_rows"], dtype=np.int64).reshape(-1, space.n))
    entries = d["entries"]
    freqs = np.asarray([e[0] for e in entries], dtype=np.int64)
    values = np.asarray([complex(e[1], e[2]) for e in entries])
    return Spectrum(base, freqs, values)
