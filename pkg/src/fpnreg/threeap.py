"""Three-term arithmetic progressions in F_p^n.

Counting follows the ordered-(a, d) convention: the pair (a, d) contributes
when a, a+d, a+2d all lie in the set, and d = 0 gives the |A| trivial pairs.
The spectral count N^2 sum_xi Ahat(-xi)^2 Ahat(2xi) reproduces the naive
count exactly after rounding.  The flower search splits A into parts,
regularizes them jointly, collects dense regular coset representatives per
part, and extracts the midpoint-centered progression family the quotient
supports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .fourier import full_spectrum
from .regularity import RegularityReport, VectorClassification, classify_vectors, regularize_multi
from .rng import sample_without_replacement, substream
from .vectorspace import (
    DenseSubset,
    SpaceDescriptor,
    SubspaceBasis,
    same_space,
)


@dataclass(frozen=True)
class APTriple:
    """The progression a, a+d, a+2d; nontrivial iff d != 0."""

    a: int
    d: int

    def terms(self, space: SpaceDescriptor) -> tuple[int, int, int]:
        return (
            self.a,
            int(space.add(self.a, self.d)),
            int(space.add(self.a, space.smul(2, self.d))),
        )

    @property
    def nontrivial(self) -> bool:
        return self.d != 0


# ---------------------------------------------------------------------------
# Counting
# ---------------------------------------------------------------------------


def count_3aps_naive(A: DenseSubset, include_trivial: bool = True) -> int:
    """Exhaustive count of (a, d) pairs with a, a+d, a+2d in A."""
    space = A.space
    if A.card == 0:
        return 0
    all_d = np.arange(space.N, dtype=np.int64)
    dbl = space.smul(2, all_d)
    total = 0
    for a in A.members():
        total += int((A.mask[space.add(int(a), all_d)] & A.mask[space.add(int(a), dbl)]).sum())
    return total if include_trivial else total - A.card


def count_3aps_fourier(A: DenseSubset) -> int:
    """Spectral count (trivial pairs included), rounded to the nearest integer."""
    space = A.space
    ahat = full_spectrum(space, A.mask)
    idx = np.arange(space.N, dtype=np.int64)
    neg = space.neg(idx)
    dbl = space.smul(2, idx)
    total = (ahat[neg] ** 2 * ahat[dbl]).sum() * float(space.N) ** 2
    return int(round(total.real))


def find_nontrivial_3ap(A: DenseSubset) -> APTriple | None:
    """First nontrivial triple in (a, d)-lexicographic scan order, or None."""
    space = A.space
    all_d = np.arange(space.N, dtype=np.int64)
    dbl = space.smul(2, all_d)
    for a in A.members():
        hits = A.mask[space.add(int(a), all_d)] & A.mask[space.add(int(a), dbl)]
        hits[0] = False
        pos = np.flatnonzero(hits)
        if pos.size:
            return APTriple(int(a), int(pos[0]))
    return None


# ---------------------------------------------------------------------------
# Cap-set oracle
# ---------------------------------------------------------------------------


def _ap_sets_gf3(space: SpaceDescriptor) -> list[int]:
    """All nontrivial AP supports as bit masks (p = 3: x+y+z = 0 triples)."""
    seen = set()
    for a in range(space.N):
        for d in range(1, space.N):
            t = (a, int(space.add(a, d)), int(space.add(a, space.smul(2, d))))
            seen.add((1 << t[0]) | (1 << t[1]) | (1 << t[2]))
    return sorted(seen)


def capset_max_exhaustive(p: int, n: int) -> tuple[int, DenseSubset]:
    """Maximum size of a 3AP-free subset of F_3^n with one witness.

    n <= 2 runs the full 2^N subset sweep; n = 3 uses pruned backtracking.
    """
    if p != 3:
        raise InputError("the cap-set oracle is defined over F_3 only")
    if n not in (1, 2, 3):
        raise InputError(f"cap-set search caps at n = 3, got n = {n}")
    space = SpaceDescriptor(3, n)
    if n <= 2:
        aps = _ap_sets_gf3(space)
        best_size, best_mask = 0, 0
        for m in range(1 << space.N):
            size = m.bit_count()
            if size <= best_size:
                continue
            if all((m & ap) != ap for ap in aps):
                best_size, best_mask = size, m
        members = [i for i in range(space.N) if (best_mask >> i) & 1]
        return best_size, DenseSubset.from_members(space, members)

    # n = 3: DFS in ascending index order; adding w after s, t is blocked
    # when s + t + w = 0 (in F_3 every permutation of an AP is an AP).
    N = space.N
    neg_sum = np.empty((N, N), dtype=np.int64)
    for s in range(N):
        neg_sum[s] = space.neg(space.add(s, np.arange(N, dtype=np.int64)))
    best: list = [0, []]
    blocked = np.zeros(N, dtype=np.int64)
    chosen: list = []

    def dfs(start: int):
        if len(chosen) + (N - start) <= best[0]:
            return
        for w in range(start, N):
            if blocked[w]:
                continue
            newly = neg_sum[w, chosen] if chosen else np.empty(0, dtype=np.int64)
            blocked[newly] += 1
            chosen.append(w)
            if len(chosen) > best[0]:
                best[0], best[1] = len(chosen), list(chosen)
            dfs(w + 1)
            chosen.pop()
            blocked[newly] -= 1

    dfs(0)
    return best[0], DenseSubset.from_members(space, best[1])


# ---------------------------------------------------------------------------
# Density testing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DensityTestReport:
    alpha: float
    subset_size: int
    trials: int
    failures: int
    failure_freq: float
    witnesses: tuple  # up to 10 member tuples of 3AP-free subsets
    outcomes: tuple  # per-trial flag: 1 when the sampled subset was 3AP-free


def density_test(R: DenseSubset, alpha: float, trials: int, seed: int) -> DensityTestReport:
    """Randomized refutation search for (alpha, 3AP)-density of R.

    Samples uniform ceil(alpha |R|)-subsets of R and reports the fraction
    lacking a nontrivial progression, with up to 10 witness subsets.
    """
    if not 0 < alpha <= 1:
        raise InputError(f"alpha must lie in (0, 1], got {alpha}")
    if trials < 1:
        raise InputError("trials must be >= 1")
    k = math.ceil(alpha * R.card)
    if k > R.card:
        raise InputError(f"subset size {k} exceeds |R| = {R.card}")
    members = R.members()
    space = R.space

    failures = 0
    witnesses = []
    outcomes = []
    for t in range(trials):
        gen = substream(seed, t)
        sub = DenseSubset.from_members(space, sample_without_replacement(gen, members, k))
        nontrivial = count_3aps_fourier(sub) - sub.card
        ap_free = nontrivial == 0
        outcomes.append(1 if ap_free else 0)
        if ap_free:
            failures += 1
            if len(witnesses) < 10:
                if find_nontrivial_3ap(sub) is not None:
                    raise AssertionError("spectral count and scan disagree on a witness")
                witnesses.append(tuple(int(x) for x in sub.members()))
    return DensityTestReport(
        alpha, k, trials, failures, failures / trials, tuple(witnesses), tuple(outcomes)
    )


# ---------------------------------------------------------------------------
# Petal candidates and flowers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PetalCandidates:
    """Coset representatives where one part is both regular and dense."""

    H: SubspaceBasis
    reps: np.ndarray = field(compare=False)  # selected reps, ascending
    target: int
    pre_truncation: int
    shortfall: bool


def build_petal_candidates(
    A_i: DenseSubset,
    H: SubspaceBasis,
    eps: float,
    alpha: float,
    m: int,
    classification: VectorClassification | None = None,
) -> PetalCandidates:
    """Representatives v with v eps-regular for A_i w.r.t. H and
    |(A_i)_H^v| >= (1/4)|A_i||H|/N, truncated to ceil((alpha/4m) K) lowest."""
    space = same_space(A_i, H)
    if m < 1:
        raise InputError("m must be >= 1")
    cls = classification if classification is not None else classify_vectors(A_i, H, eps)
    if cls.H != H:
        raise InputError("classification was computed for a different subspace")
    K = len(cls.reps)
    dens = 0.25 * A_i.card * H.size / space.N
    qualify = cls.regular & (cls.counts >= dens)
    selected = cls.reps[qualify]
    target = math.ceil(alpha / (4 * m) * K)
    pre = len(selected)
    if pre > target:
        selected = selected[:target]
    sel = np.array(selected, dtype=np.int64)
    sel.flags.writeable = False
    return PetalCandidates(H, sel, target, pre, pre < target)


@dataclass(frozen=True)
class Flower:
    """A subspace H, a center coset where one part of A is regular and dense,
    and petal coset pairs forming midpoint progressions with the center in V/H."""

    H: SubspaceBasis
    parts: tuple  # the m DenseSubsets, canonical split of A
    i0: int
    j0: int
    k0: int
    center: int
    petals: tuple  # ordered (u, w) rep pairs with u + w = 2 center mod H
    eps: float
    alpha: float
    m: int
    case: str  # triple_overlap | disjoint_parts

    @property
    def petal_count(self) -> int:
        return len(self.petals)


@dataclass(frozen=True)
class FlowerSearchReport:
    found: bool
    flower: Flower | None
    failure_stage: str | None  # no_regular_subspace | empty_petal_candidates | no_cross_part_3aps
    case: str | None
    part_sizes: tuple
    bi_sizes: tuple
    bi_shortfalls: tuple
    b_size: int
    case1_threshold: float
    multi_report: RegularityReport | None
    eligible_sizes: tuple = ()
    discard_bound: float | None = None


def canonical_split(A: DenseSubset, m: int) -> list[DenseSubset]:
    """Partition A into m near-equal parts by ascending index blocks."""
    if m < 1:
        raise InputError("m must be >= 1")
    members = A.members()
    base, rem = divmod(len(members), m)
    parts = []
    at = 0
    for i in range(m):
        size = base + (1 if i < rem else 0)
        parts.append(DenseSubset.from_members(A.space, members[at : at + size]))
        at += size
    return parts


def flower_find(
    A: DenseSubset,
    m: int,
    eps: float,
    alpha: float,
    floor: int = 1,
    seed: int = 0,
) -> FlowerSearchReport:
    """Search for the maximum-petal flower in the canonical m-part split of A.

    Pipeline: split, regularize jointly, build per-part candidate reps,
    branch on the size of the triple-overlap set B (case 1 keeps B-members,
    case 2 assigns non-triply-shared reps to disjoint per-part pools), then
    maximize the midpoint petal count exactly over (i0, j0, k0) and centers.
    Failures report the stage that degenerated.
    """
    if m < 3:
        raise InputError("flowers need at least 3 parts")
    space = A.space
    parts = canonical_split(A, m)
    part_sizes = tuple(p.card for p in parts)

    mrep = regularize_multi(parts, eps, alpha, floor)
    if not mrep.succeeded:
        return FlowerSearchReport(
            False, None, "no_regular_subspace", None, part_sizes,
            (), (), 0, 0.0, mrep,
        )
    H = mrep.H_final
    cs = H.coset_system()
    K = cs.K

    cands = [
        build_petal_candidates(parts[i], H, eps, alpha, m, mrep.classifications[i])
        for i in range(m)
    ]
    bi_sizes = tuple(len(c.reps) for c in cands)
    bi_shortfalls = tuple(c.shortfall for c in cands)
    bi_sets = [set(int(x) for x in c.reps) for c in cands]

    counts: dict[int, int] = {}
    for s in bi_sets:
        for v in s:
            counts[v] = counts.get(v, 0) + 1
    b_set = {v for v, c in counts.items() if c >= 3}
    case1_threshold = alpha / (8 * m) * K

    if all(len(s) == 0 for s in bi_sets):
        return FlowerSearchReport(
            False, None, "empty_petal_candidates", None, part_sizes,
            bi_sizes, bi_shortfalls, len(b_set), case1_threshold, mrep,
        )

    discard_bound = None
    if len(b_set) >= case1_threshold:
        case = "triple_overlap"
        eligible = [sorted(b_set & s) for s in bi_sets]
    else:
        case = "disjoint_parts"
        eligible = [[] for _ in range(m)]
        union = sorted(set().union(*bi_sets) - b_set)
        for v in union:
            for i in range(m):
                if v in bi_sets[i]:
                    eligible[i].append(v)
                    break
        discard_bound = 3.0 * sum(len(e) ** 2 for e in eligible)

    elig_arrays = [np.array(e, dtype=np.int64) for e in eligible]
    elig_sets = [set(e) for e in eligible]

    best = None  # (count, i0, j0, k0, center, petals)
    for i0 in range(m):
        for j0 in range(m):
            if j0 == i0 or len(elig_arrays[j0]) == 0:
                continue
            for k0 in range(m):
                if k0 in (i0, j0) or not elig_sets[k0]:
                    continue
                for c in elig_arrays[i0]:
                    us = elig_arrays[j0]
                    ws = cs.rep_of(space.sub(space.smul(2, int(c)), us))
                    ok = np.array(
                        [int(u) != int(c) and int(w) in elig_sets[k0] for u, w in zip(us, ws)]
                    )
                    cnt = int(ok.sum())
                    if cnt and (best is None or cnt > best[0]):
                        petals = tuple(
                            (int(u), int(w)) for u, w, good in zip(us, ws, ok) if good
                        )
                        best = (cnt, i0, j0, k0, int(c), petals)

    if best is None:
        return FlowerSearchReport(
            False, None, "no_cross_part_3aps", case, part_sizes,
            bi_sizes, bi_shortfalls, len(b_set), case1_threshold, mrep,
            tuple(len(e) for e in eligible), discard_bound,
        )

    cnt, i0, j0, k0, center, petals = best
    flower = Flower(
        H=H,
        parts=tuple(parts),
        i0=i0,
        j0=j0,
        k0=k0,
        center=center,
        petals=petals,
        eps=eps,
        alpha=alpha,
        m=m,
        case=case,
    )
    return FlowerSearchReport(
        True, flower, None, case, part_sizes,
        bi_sizes, bi_shortfalls, len(b_set), case1_threshold, mrep,
        tuple(len(e) for e in eligible), discard_bound,
    )


# ---------------------------------------------------------------------------
# Structured-text form (full provenance for out-of-process validation)
# ---------------------------------------------------------------------------


def flower_to_dict(f: Flower) -> dict:
    return {
        "p": f.H.space.p,
        "n": f.H.space.n,
        "H_rows": [[int(x) for x in row] for row in f.H.rows],
        "parts": [[int(x) for x in part.members()] for part in f.parts],
        "i0": f.i0,
        "j0": f.j0,
        "k0": f.k0,
        "center": f.center,
        "petals": [[int(u), int(w)] for u, w in f.petals],
        "eps": f.eps,
        "alpha": f.alpha,
        "m": f.m,
        "case": f.case,
    }


def flower_from_dict(d: dict) -> Flower:
    space = SpaceDescriptor(int(d["p"]), int(d["n"]))
    H = SubspaceBasis.from_rows(space, np.asarray(d["H_rows"], dtype=np.int64).reshape(-1, space.n))
    parts = tuple(DenseSubset.from_members(space, mem) for mem in d["parts"])
    return Flower(
        H=H,
        parts=parts,
        i0=int(d["i0"]),
        j0=int(d["j0"]),
        k0=int(d["k0"]),
        center=int(d["center"]),
        petals=tuple((int(u), int(w)) for u, w in d["petals"]),
        eps=float(d["eps"]),
        alpha=float(d["alpha"]),
        m=int(d["m"]),
        case=str(d["case"]),
    )
