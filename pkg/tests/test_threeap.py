import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fpnreg.errors import InputError
from fpnreg.randmodel import sample_exact
from fpnreg.rng import substream
from fpnreg.threeap import (
    build_petal_candidates,
    canonical_split,
    capset_max_exhaustive,
    count_3aps_fourier,
    count_3aps_naive,
    density_test,
    find_nontrivial_3ap,
    flower_find,
    flower_from_dict,
    flower_to_dict,
)
from fpnreg.vectorspace import DenseSubset, SpaceDescriptor, SubspaceBasis

from helpers import random_subset, validate_flower

SP31 = SpaceDescriptor(3, 1)
SP32 = SpaceDescriptor(3, 2)
SP34 = SpaceDescriptor(3, 4)
SP36 = SpaceDescriptor(3, 6)
CAP4 = DenseSubset.from_members(SP32, [0, 1, 3, 4])


class TestCounting:
    def test_full_space(self):
        assert count_3aps_naive(DenseSubset.full(SP32)) == 81
        assert count_3aps_naive(DenseSubset.full(SP32), include_trivial=False) == 72
        assert count_3aps_fourier(DenseSubset.full(SP32)) == 81

    def test_two_points_no_progression(self):
        assert count_3aps_naive(DenseSubset.from_members(SP31, [0, 1]), include_trivial=False) == 0

    def test_cap_set_free(self):
        assert count_3aps_naive(CAP4, include_trivial=False) == 0

    def test_line_count(self):
        line = DenseSubset.from_members(SP32, [0, 1, 2])
        assert count_3aps_fourier(line) == 9
        assert count_3aps_naive(line) == 9

    def test_exhaustive_f32_sweep(self):
        for m in range(512):
            A = DenseSubset(SP32, np.array([(m >> i) & 1 for i in range(9)], bool))
            assert count_3aps_fourier(A) == count_3aps_naive(A)

    @given(st.integers(0, 10**6))
    @settings(max_examples=40)
    def test_random_agreement_f34(self, seed):
        gen = np.random.default_rng(seed)
        A = random_subset(SP34, gen)
        assert count_3aps_fourier(A) == count_3aps_naive(A)

    @given(st.integers(0, 10**6))
    @settings(max_examples=15)
    def test_monotone_under_growth(self, seed):
        gen = np.random.default_rng(seed)
        members = gen.permutation(SP34.N)
        prev = 0
        for size in (5, 20, 40, 81):
            A = DenseSubset.from_members(SP34, members[:size])
            cur = count_3aps_naive(A, include_trivial=False)
            assert cur >= prev
            prev = cur

    def test_p5_counts(self):
        sp52 = SpaceDescriptor(5, 2)
        gen = np.random.default_rng(3)
        for _ in range(10):
            A = random_subset(sp52, gen)
            assert count_3aps_fourier(A) == count_3aps_naive(A)


class TestFindTriple:
    def test_canonical_first(self):
        t = find_nontrivial_3ap(DenseSubset.full(SP31))
        assert (t.a, t.d) == (0, 1) and t.nontrivial
        assert t.terms(SP31) == (0, 1, 2)

    def test_absent_cases(self):
        assert find_nontrivial_3ap(CAP4) is None
        assert find_nontrivial_3ap(DenseSubset.empty(SP32)) is None

    @given(st.integers(0, 10**6))
    @settings(max_examples=20)
    def test_absent_iff_zero_count(self, seed):
        gen = np.random.default_rng(seed)
        A = random_subset(SP32, gen, density=0.3)
        absent = find_nontrivial_3ap(A) is None
        assert absent == (count_3aps_naive(A, include_trivial=False) == 0)


class TestCapset:
    def test_dimension_one(self):
        size, witness = capset_max_exhaustive(3, 1)
        assert size == 2 and sorted(witness.members()) == [0, 1]

    def test_dimension_two(self):
        size, witness = capset_max_exhaustive(3, 2)
        assert size == 4
        assert witness == CAP4
        assert find_nontrivial_3ap(witness) is None

    def test_dimension_three(self):
        size, witness = capset_max_exhaustive(3, 3)
        assert size == 9
        assert witness.card == 9
        assert find_nontrivial_3ap(witness) is None

    def test_rejects_out_of_scope(self):
        with pytest.raises(InputError):
            capset_max_exhaustive(3, 4)
        with pytest.raises(InputError):
            capset_max_exhaustive(5, 2)


class TestDensityTest:
    def test_full_space_alpha_one(self):
        rep = density_test(DenseSubset.full(SP32), 1.0, 5, 1)
        assert rep.failure_freq == 0.0 and rep.witnesses == ()

    def test_cap_set_always_fails(self):
        rep = density_test(CAP4, 1.0, 6, 1)
        assert rep.failure_freq == 1.0
        assert len(rep.witnesses) == 6
        assert rep.outcomes == (1,) * 6

    def test_random_sparse_set_passes(self):
        sp310 = SpaceDescriptor(3, 10)
        R = sample_exact(sp310, int(30 * np.sqrt(sp310.N)), 5)
        rep = density_test(R, 0.5, 20, 7)
        assert rep.failure_freq == 0.0

    def test_rejects_bad_alpha(self):
        with pytest.raises(InputError):
            density_test(CAP4, 1.5, 5, 1)

    def test_deterministic(self):
        a = density_test(CAP4, 0.75, 10, 3)
        b = density_test(CAP4, 0.75, 10, 3)
        assert a == b


class TestCanonicalSplit:
    @given(st.integers(0, 10**6), st.integers(1, 5))
    @settings(max_examples=25)
    def test_partition_properties(self, seed, m):
        gen = np.random.default_rng(seed)
        A = random_subset(SP34, gen)
        parts = canonical_split(A, m)
        sizes = [p.card for p in parts]
        assert sum(sizes) == A.card
        assert max(sizes) - min(sizes) <= 1
        union = np.zeros(SP34.N, dtype=int)
        for p in parts:
            union += p.mask
        assert union.max(initial=0) <= 1
        assert np.array_equal(union.astype(bool), A.mask)


class TestPetalCandidates:
    def test_full_set_all_reps_qualify(self):
        H = SubspaceBasis.from_rows(SP34, np.eye(4, dtype=int)[:2])
        cands = build_petal_candidates(DenseSubset.full(SP34), H, 0.5, 1.0, 3)
        K = SP34.N // H.size
        assert cands.pre_truncation == K
        assert len(cands.reps) == cands.target
        assert not cands.shortfall
        # truncation keeps the lowest rep indices
        cs = H.coset_system()
        assert list(cands.reps) == [int(x) for x in cs.reps[: cands.target]]

    def test_concentrated_set_shortfall(self):
        H = SubspaceBasis.from_rows(SP34, np.eye(4, dtype=int)[:2])
        A = DenseSubset.from_members(SP34, H.elements())  # a single coset
        cands = build_petal_candidates(A, H, 0.5, 1.0, 3)
        assert list(cands.reps) == [0]
        assert cands.target == 1 and not cands.shortfall
        # a larger target exposes the shortfall of the concentrated set
        cands2 = build_petal_candidates(A, H, 0.5, 1.0, 1)
        assert cands2.target == 3 and cands2.shortfall
        assert list(cands2.reps) == [0]


class TestFlowerFind:
    def test_full_set_has_flower(self):
        sp33 = SpaceDescriptor(3, 3)
        rep = flower_find(DenseSubset.full(sp33), 3, 0.4, 1.0, 1, 7)
        assert rep.found
        assert rep.flower.petal_count >= 1
        assert validate_flower(rep.flower, DenseSubset.full(sp33)) == []

    def test_constructed_no_cross_part(self):
        # three parallel lines whose quotient image is 3AP-free
        sp33 = SpaceDescriptor(3, 3)
        H1 = SubspaceBasis.from_rows(sp33, [[1, 0, 0]])
        cs = H1.coset_system()
        quot = [cs.reps[0], cs.reps[1], cs.reps[3]]
        members = np.concatenate([sp33.add(H1.elements(), int(v)) for v in quot])
        A = DenseSubset.from_members(sp33, members)
        rep = flower_find(A, 3, 0.2, 1.0, 1, 7)
        assert not rep.found and rep.failure_stage == "no_cross_part_3aps"

    def test_requires_three_parts(self):
        with pytest.raises(InputError):
            flower_find(DenseSubset.full(SP32), 2, 0.3, 0.5, 1, 1)

    def test_found_rate_calibrated(self):
        # eps = 0.15 drives refinement deep enough that candidates abound;
        # at these exact seeds every instance yields a flower (pilot: 50/50)
        found = 0
        validated = 0
        for seed in range(20):
            A = _half_of_half_instance(seed)
            rep = flower_find(A, 3, 0.15, 0.5, 1, seed)
            if rep.found:
                found += 1
                if validate_flower(rep.flower, A) == []:
                    validated += 1
        assert found >= 16  # frozen from the 50-seed pilot (100% observed)
        assert validated == found

    def test_failure_reports_are_data(self):
        rep = flower_find(DenseSubset.from_members(SP36, [0, 1, 2]), 3, 0.3, 0.5, 1, 1)
        assert not rep.found
        assert rep.failure_stage in {"no_regular_subspace", "empty_petal_candidates", "no_cross_part_3aps"}

    def test_serialization_round_trip(self):
        sp33 = SpaceDescriptor(3, 3)
        rep = flower_find(DenseSubset.full(sp33), 3, 0.4, 1.0, 1, 7)
        f = rep.flower
        back = flower_from_dict(flower_to_dict(f))
        assert back.H == f.H and back.center == f.center and back.petals == f.petals
        assert back.parts == f.parts
        assert validate_flower(back) == []

    def test_deterministic(self):
        A = _half_of_half_instance(3)
        r1 = flower_find(A, 3, 0.15, 0.5, 1, 3)
        r2 = flower_find(A, 3, 0.15, 0.5, 1, 3)
        assert r1.found == r2.found
        if r1.found:
            assert r1.flower.petals == r2.flower.petals
            assert r1.flower.center == r2.flower.center


def _half_of_half_instance(seed):
    """A = uniform half of a random half-density R in F_3^6."""
    R = sample_exact(SP36, SP36.N // 2, seed)
    gen = substream(seed, 1)
    members = R.members()
    pick = np.sort(gen.choice(len(members), size=int(0.5 * R.card), replace=False))
    return DenseSubset.from_members(SP36, members[pick])
