"""Cayley graphs on (V, V) generated by difference sets, and their edge
statistics.

G_A has an edge (v1, v2) whenever v2 - v1 lies in A, making it |A|-regular.
Edge counts come either from a direct pair scan or from the spectral identity
e(X, Y) = N^2 sum_xi Ahat(xi) Xhat(xi) Yhat(-xi); certificates bound the
worst-case edge discrepancy through sup |Ahat| over nontrivial frequencies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .fourier import full_spectrum
from .rng import substream, sample_without_replacement
from .vectorspace import (
    DenseSubset,
    SpaceDescriptor,
    SubspaceBasis,
    _check_index,
    localized_count,
    same_space,
)

_PAIR_BLOCK = 1 << 22


@dataclass(frozen=True)
class CayleyGraph:
    """The |A|-regular difference-set graph on two copies of V."""

    generator: DenseSubset

    @property
    def space(self) -> SpaceDescriptor:
        return self.generator.space

    @property
    def degree(self) -> int:
        return self.generator.card

    def density(self) -> float:
        return self.generator.card / self.space.N

    def is_edge(self, v1, v2):
        space = self.space
        return self.generator.mask[space.sub(_check_index(space, v2), _check_index(space, v1))]

    def edge_count(self, X: DenseSubset, Y: DenseSubset) -> int:
        return edge_count_direct(self.generator, X, Y)


# ---------------------------------------------------------------------------
# Edge counting
# ---------------------------------------------------------------------------


def _scan(mask: np.ndarray, space: SpaceDescriptor, outer: np.ndarray, inner: np.ndarray, sign: int) -> int:
    """sum over o in outer, i in inner of mask[i + sign*o], blockwise."""
    if len(outer) == 0 or len(inner) == 0:
        return 0
    total = 0
    idig = space.digits(inner)
    block = max(1, _PAIR_BLOCK // max(len(inner), 1))
    for lo in range(0, len(outer), block):
        odig = space.digits(outer[lo : lo + block])
        idx = space.index((idig[None, :, :] + sign * odig[:, None, :]) % space.p)
        total += int(mask[idx].sum())
    return total


def edge_count_direct(A: DenseSubset, X: DenseSubset, Y: DenseSubset) -> int:
    """Exact number of pairs (x, y) in X x Y with y - x in A."""
    same_space(A, X, Y)
    space = A.space
    costs = {
        "xy": X.card * Y.card,
        "ax": A.card * X.card,
        "ay": A.card * Y.card,
    }
    if min(costs.values()) == 0:
        return 0
    best = min(costs, key=costs.get)
    if best == "xy":
        # pairs with y - x in A: scan x, look up A at (y - x)
        return _scan(A.mask, space, X.members(), Y.members(), -1)
    if best == "ax":
        # y = x + a ranges over Y
        return _scan(Y.mask, space, A.members(), X.members(), +1)
    # x = y - a ranges over X
    return _scan(X.mask, space, A.members(), Y.members(), -1)


def edge_count_fourier(A: DenseSubset, X: DenseSubset, Y: DenseSubset) -> float:
    """Spectral edge count N^2 sum_xi Ahat(xi) Xhat(xi) Yhat(-xi); equals the
    direct count up to round-off."""
    space = same_space(A, X, Y)
    ahat = full_spectrum(space, A.mask)
    xhat = full_spectrum(space, X.mask)
    yhat = full_spectrum(space, Y.mask)
    neg = space.neg(np.arange(space.N, dtype=np.int64))
    total = (ahat * xhat * yhat[neg]).sum() * space.N**2
    return float(total.real)


def edge_count(A: DenseSubset, X: DenseSubset, Y: DenseSubset) -> int:
    """Exact count, auto-selecting pair scan vs rounded spectral evaluation."""
    space = same_space(A, X, Y)
    direct_cost = min(X.card * Y.card, A.card * X.card, A.card * Y.card)
    spectral_cost = 4 * space.N * space.n
    if direct_cost <= spectral_cost:
        return edge_count_direct(A, X, Y)
    return int(round(edge_count_fourier(A, X, Y)))


# ---------------------------------------------------------------------------
# Sigma-regularity certificate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegularityCertificate:
    """Certifies |e(X,Y) - |R||X||Y|/N| <= delta |R||X||Y|/N for all
    |X|, |Y| >= sigma N, via fourier_sup <= delta sigma |R| / N."""

    sigma: float
    delta: float
    fourier_sup: float
    passed: bool
    set_card: int
    space_size: int

    def edge_bound(self, x_card: int, y_card: int) -> float:
        return self.delta * self.set_card * x_card * y_card / self.space_size


def sigma_certificate(R: DenseSubset, sigma: float, delta: float) -> RegularityCertificate:
    if not 0 < sigma < 1 or not 0 < delta < 1:
        raise InputError("sigma and delta must lie in (0, 1)")
    space = R.space
    spec = full_spectrum(space, R.mask)
    sup = float(np.abs(spec[1:]).max()) if space.N > 1 else 0.0
    passed = sup <= delta * sigma * R.card / space.N
    return RegularityCertificate(sigma, delta, sup, passed, R.card, space.N)


# ---------------------------------------------------------------------------
# Sparseness probe
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SparseCheckReport:
    passed: bool
    trials: int
    max_ratio: float
    witness: tuple | None  # (X members, Y members, density, bound) on violation


def sparse_check(A: DenseSubset, b: float, sigma: float, samples: int, seed: int) -> SparseCheckReport:
    """Probe d(X, Y) <= b d(G_A) over seeded random pairs with |X|, |Y| >= sigma N.

    Every other trial reuses X as Y: diagonal pairs are the classic violators
    (a perfect matching concentrates edges on them), so a sampler that never
    correlates the sides would miss exactly the interesting cases.
    """
    if b <= 0 or not 0 < sigma <= 1 or samples < 1:
        raise InputError("need b > 0, sigma in (0, 1], samples >= 1")
    space = A.space
    min_size = math.ceil(sigma * space.N)
    d_graph = A.card / space.N
    everything = np.arange(space.N, dtype=np.int64)

    max_ratio = 0.0
    witness = None
    for trial in range(samples):
        gen = substream(seed, trial)
        nx = int(gen.integers(min_size, space.N + 1))
        X = DenseSubset.from_members(space, sample_without_replacement(gen, everything, nx))
        if gen.integers(2):
            Y = X
        else:
            ny = int(gen.integers(min_size, space.N + 1))
            Y = DenseSubset.from_members(space, sample_without_replacement(gen, everything, ny))
        e = edge_count(A, X, Y)
        d_xy = e / (X.card * Y.card)
        ratio = d_xy / (b * d_graph) if d_graph > 0 else (math.inf if d_xy > 0 else 0.0)
        if ratio > max_ratio:
            max_ratio = ratio
        if d_xy > b * d_graph * (1 + 1e-12) and witness is None:
            witness = (
                tuple(int(i) for i in X.members()),
                tuple(int(i) for i in Y.members()),
                d_xy,
                b * d_graph,
            )
    return SparseCheckReport(witness is None, samples, max_ratio, witness)


# ---------------------------------------------------------------------------
# Relative-regularity pair check
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PairDensityReport:
    applicable: bool
    sup: float
    threshold: float
    expected_density: float | None
    trials: int
    max_ratio: float | None
    passed: bool | None


def pair_density_check(
    A: DenseSubset,
    H: SubspaceBasis,
    vi: int,
    vj: int,
    eps: float,
    samples: int,
    seed: int,
) -> PairDensityReport:
    """Sampled check of the relative-regularity deviation bound between the
    affine translates vi + H and vj + H.

    Requires the translate difference to be an eps-regular vector for A
    w.r.t. H; otherwise the report is marked inapplicable.  Sampled X, Y have
    size at least eps^(1/3) |H|; each pair must satisfy
    |d(X,Y) - d(H_i,H_j)| <= eps |A_H^diff| |H|^2 / (|X||Y| N).

    With the localization convention A_H^v = (A+v) ^ H, the exact identity is
    e(H_i, H_j) = |H| |A_H^(vi-vj)|, so diff = vi - vj throughout.
    """
    from .regularity import restricted_sup  # local import avoids a cycle

    space = same_space(A, H)
    if not 0 < eps < 1 or samples < 1:
        raise InputError("need eps in (0, 1) and samples >= 1")
    vi = int(_check_index(space, vi))
    vj = int(_check_index(space, vj))
    diff = int(space.sub(vi, vj))
    sup = restricted_sup(A, H, diff)
    threshold = eps * A.card / space.N
    if sup > threshold:
        return PairDensityReport(False, sup, threshold, None, 0, None, None)

    cnt = localized_count(A, H, diff)
    expected = cnt / H.size
    min_size = math.ceil(eps ** (1 / 3) * H.size)
    hi_elems = space.add(H.elements(), vi)
    hj_elems = space.add(H.elements(), vj)

    max_ratio = 0.0
    for trial in range(samples):
        gen = substream(seed, trial)
        nx = int(gen.integers(min_size, H.size + 1))
        ny = int(gen.integers(min_size, H.size + 1))
        X = DenseSubset.from_members(space, sample_without_replacement(gen, hi_elems, nx))
        Y = DenseSubset.from_members(space, sample_without_replacement(gen, hj_elems, ny))
        e = edge_count(A, X, Y)
        dev = abs(e / (X.card * Y.card) - expected)
        bound = eps * cnt * H.size**2 / (X.card * Y.card * space.N)
        if bound == 0:
            ratio = 0.0 if dev == 0 else math.inf
        else:
            ratio = dev / bound
        max_ratio = max(max_ratio, ratio)
    return PairDensityReport(True, sup, threshold, expected, samples, max_ratio, max_ratio <= 1 + 1e-9)


# ---------------------------------------------------------------------------
# Midpoint petal graph
# ---------------------------------------------------------------------------


class PetalGraph:
    """Bipartite midpoint graph on (H - v1, H - v2): u1 ~ u2 whenever
    (u1 + u2) / 2 lies in A.  Odd p makes the halving well defined."""

    def __init__(self, generator: DenseSubset, H: SubspaceBasis, v1: int, v2: int):
        space = same_space(generator, H)
        self.generator = generator
        self.H = H
        self.v1 = int(_check_index(space, v1))
        self.v2 = int(_check_index(space, v2))
        self.space = space
        self.u = H.size
        self._left = space.sub(H.elements(), self.v1)
        self._right = space.sub(H.elements(), self.v2)
        self._left_deg = None

    def left_points(self) -> np.ndarray:
        return self._left

    def right_points(self) -> np.ndarray:
        return self._right

    def _edge_block(self, lpos, rpos) -> np.ndarray:
        """Boolean adjacency block for positions lpos x rpos."""
        space = self.space
        ld = space.digits(self._left[np.asarray(lpos, dtype=np.int64)])
        rd = space.digits(self._right[np.asarray(rpos, dtype=np.int64)])
        mid = space.inv2 * (ld[:, None, :] + rd[None, :, :]) % space.p
        return self.generator.mask[space.index(mid)]

    def edges_between(self, lpos, rpos) -> int:
        lpos = np.asarray(lpos, dtype=np.int64)
        rpos = np.asarray(rpos, dtype=np.int64)
        if len(lpos) == 0 or len(rpos) == 0:
            return 0
        total = 0
        block = max(1, _PAIR_BLOCK // max(len(rpos), 1))
        for lo in range(0, len(lpos), block):
            total += int(self._edge_block(lpos[lo : lo + block], rpos).sum())
        return total

    def any_edge(self, lpos, rpos) -> bool:
        lpos = np.asarray(lpos, dtype=np.int64)
        rpos = np.asarray(rpos, dtype=np.int64)
        if len(lpos) == 0 or len(rpos) == 0:
            return False
        block = max(1, _PAIR_BLOCK // max(len(rpos), 1))
        for lo in range(0, len(lpos), block):
            if self._edge_block(lpos[lo : lo + block], rpos).any():
                return True
        return False

    def edge_count(self) -> int:
        return self.edges_between(np.arange(self.u), np.arange(self.u))

    def density(self) -> float:
        return self.edge_count() / self.u**2

    def left_degrees(self) -> np.ndarray:
        if self._left_deg is None:
            deg = np.empty(self.u, dtype=np.int64)
            rall = np.arange(self.u, dtype=np.int64)
            block = max(1, _PAIR_BLOCK // self.u)
            for lo in range(0, self.u, block):
                lpos = np.arange(lo, min(lo + block, self.u), dtype=np.int64)
                deg[lpos] = self._edge_block(lpos, rall).sum(axis=1)
            self._left_deg = deg
        return self._left_deg

    def right_degrees_into(self, lpos) -> np.ndarray:
        lpos = np.asarray(lpos, dtype=np.int64)
        if len(lpos) == 0:
            return np.zeros(self.u, dtype=np.int64)
        deg = np.empty(self.u, dtype=np.int64)
        block = max(1, _PAIR_BLOCK // max(len(lpos), 1))
        for lo in range(0, self.u, block):
            rpos = np.arange(lo, min(lo + block, self.u), dtype=np.int64)
            deg[rpos] = self._edge_block(lpos, rpos).sum(axis=0)
        return deg


def petal_graph(A: DenseSubset, H: SubspaceBasis, v1: int, v2: int) -> PetalGraph:
    return PetalGraph(A, H, v1, v2)
