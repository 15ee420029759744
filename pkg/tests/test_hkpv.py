import math

import numpy as np
import pytest
from scipy import stats as scipy_stats

from ginibre import hkpv, kernels, linalg
from ginibre.kernels import BasisSubset
from ginibre.records import RejectionDiagnostics


def conditioned_basis(n):
    return BasisSubset(radius=math.sqrt(n), indices=tuple(range(n)))


class TestFeatureVector:
    def test_origin_activates_only_index_zero(self):
        v = hkpv.feature_vector(conditioned_basis(4), 0.0)
        assert v[0] != 0.0
        assert np.all(v[1:] == 0.0)

    def test_norm_equals_kernel_diagonal(self):
        rng = np.random.default_rng(1)
        basis = conditioned_basis(6)
        for _ in range(20):
            z = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            v = hkpv.feature_vector(basis, z)
            diag = kernels.conditioned_kernel(6, z, z).real
            assert float(np.sum(np.abs(v) ** 2)) == pytest.approx(diag, rel=1e-10)

    def test_total_norm_integrates_to_size(self, disk_quad):
        basis = BasisSubset(radius=1.5, indices=(0, 1, 3, 4, 7))
        z, w = disk_quad(1.5)
        v = hkpv.feature_vector(basis, z)
        total = float(np.sum(w * np.sum(np.abs(v) ** 2, axis=0)))
        assert total == pytest.approx(basis.size, abs=1e-5)

    def test_zero_outside_disk(self):
        v = hkpv.feature_vector(conditioned_basis(3), 10.0 + 0j)
        assert np.all(v == 0.0)


class TestConditionalDensity:
    def test_first_step_is_norm_over_n(self):
        basis = conditioned_basis(5)
        state = hkpv.OrthoState(basis=basis)
        rng = np.random.default_rng(2)
        for _ in range(10):
            z = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            v = hkpv.feature_vector(basis, z)
            expected = float(np.sum(np.abs(v) ** 2)) / 5
            assert hkpv.conditional_density(state, z) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("n", [2, 5, 8])
    def test_integrates_to_one_every_step(self, n, disk_quad):
        radius = math.sqrt(n)
        basis = conditioned_basis(n)
        z, w = disk_quad(radius, n_r=96, n_theta=4 * n + 8)
        state = hkpv.OrthoState(basis=basis)
        rng = np.random.default_rng(3)
        sup = hkpv.sup_feature_norm_sq(basis)
        for step in range(n):
            mass = float(np.sum(w * hkpv.conditional_density(state, z)))
            assert mass == pytest.approx(1.0, abs=1e-4)
            pt = hkpv.rejection_step(state, rng, sup / state.remaining)
            state.add_point(pt)

    def test_vanishes_at_accepted_points(self):
        n = 6
        basis = conditioned_basis(n)
        state = hkpv.OrthoState(basis=basis)
        rng = np.random.default_rng(4)
        sup = hkpv.sup_feature_norm_sq(basis)
        while state.remaining > 1:
            pt = hkpv.rejection_step(state, rng, sup / state.remaining)
            state.add_point(pt)
            for accepted in state.accepted:
                assert hkpv.conditional_density(state, accepted) <= 1e-8

    def test_two_point_formula_determinant_ratio(self):
        # p_1(x) after accepting X equals p2(X, x) / p1(X) with the
        # densities built from determinants of the projection kernel
        n = 2
        basis = conditioned_basis(n)
        state = hkpv.OrthoState(basis=basis)
        first = 0.4 + 0.3j
        state.add_point(first)
        rng = np.random.default_rng(5)
        for _ in range(20):
            z = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            kmat = np.array([
                [kernels.conditioned_kernel(n, first, first),
                 kernels.conditioned_kernel(n, first, z)],
                [kernels.conditioned_kernel(n, z, first),
                 kernels.conditioned_kernel(n, z, z)],
            ])
            p2 = linalg.lu_det(kmat).real / 2.0
            p1 = kmat[0, 0].real / 2.0
            assert hkpv.conditional_density(state, z) == pytest.approx(
                p2 / p1, rel=1e-10, abs=1e-12)

    def test_negative_density_raises(self):
        basis = conditioned_basis(3)
        state = hkpv.OrthoState(basis=basis)
        state.add_point(0.1 + 0.1j)
        # corrupt the orthonormal set so the projection overshoots
        state.ortho = state.ortho * 1.5
        with pytest.raises(hkpv.OrthogonalityError):
            state.accepted.append(0.1 + 0.1j)  # pretend two accepted
            hkpv.conditional_density(state, 0.1 + 0.1j)


class TestEnvelope:
    def test_matches_dense_grid(self):
        basis = conditioned_basis(2)
        state = hkpv.OrthoState(basis=basis)
        sup = hkpv.sup_feature_norm_sq(basis)
        grid = np.linspace(0, basis.disk_radius, 20001).astype(complex)
        v = hkpv.feature_vector(basis, grid)
        dense = float(np.max(np.sum(np.abs(v) ** 2, axis=0)))
        assert sup == pytest.approx(dense, rel=1e-6)
        assert hkpv.envelope_bound(state, sup) == pytest.approx(dense / 2, rel=1e-6)

    def test_bounds_density_throughout_run(self):
        n = 20
        basis = conditioned_basis(n)
        state = hkpv.OrthoState(basis=basis)
        rng = np.random.default_rng(6)
        sup = hkpv.sup_feature_norm_sq(basis)
        probes = np.array([
            complex(r * math.cos(t), r * math.sin(t))
            for r, t in zip(basis.disk_radius * np.sqrt(rng.random(500)),
                            rng.uniform(-math.pi, math.pi, 500))
        ])
        while state.remaining > 0:
            envelope = sup / state.remaining
            dens = hkpv.conditional_density(state, probes)
            assert np.all(dens <= envelope * (1 + 1e-9))
            pt = hkpv.rejection_step(state, rng, envelope)
            state.add_point(pt)

    def test_adaptive_bound_dominates_density(self):
        n = 8
        basis = conditioned_basis(n)
        state = hkpv.OrthoState(basis=basis)
        rng = np.random.default_rng(7)
        sup = hkpv.sup_feature_norm_sq(basis)
        for _ in range(4):
            state.add_point(hkpv.rejection_step(state, rng, sup / state.remaining))
        probes = (rng.uniform(-1, 1, 300) + 1j * rng.uniform(-1, 1, 300)) * math.sqrt(n) / 2
        dens = hkpv.conditional_density(state, probes)
        bound = hkpv.adaptive_envelope(state, probes)
        simple = hkpv.conditional_density(
            hkpv.OrthoState(basis=basis), probes) * n / state.remaining
        assert np.all(dens <= bound + 1e-12)
        assert np.all(bound <= simple + 1e-12)

    def test_adaptive_tighter_near_accepted(self):
        n = 4
        basis = conditioned_basis(n)
        state = hkpv.OrthoState(basis=basis)
        state.add_point(0.5 + 0.2j)
        near = 0.5 + 0.21j
        chk_adaptive = hkpv.adaptive_envelope(state, near)
        norm_bound = float(np.sum(np.abs(hkpv.feature_vector(basis, near)) ** 2)) / state.remaining
        assert chk_adaptive < norm_bound


class TestRejectionStep:
    def test_rank_one_radius_histogram(self):
        # |phi_0|^2 radial law on B_1: P(|X| <= r) = gamma(1, r^2)/gamma(1, 1)
        basis = BasisSubset(radius=1.0, indices=(0,))
        state = hkpv.OrthoState(basis=basis)
        rng = np.random.default_rng(8)
        sup = hkpv.sup_feature_norm_sq(basis)
        m = 100_000
        radii = np.empty(m)
        for i in range(m):
            radii[i] = abs(hkpv.rejection_step(state, rng, sup))
        edges = np.linspace(0.0, 1.0, 9)
        gam1 = 1 - math.exp(-1.0)
        cdf = (1 - np.exp(-edges ** 2)) / gam1
        expected = np.diff(cdf)
        counts, _ = np.histogram(radii, bins=edges)
        for obs, p in zip(counts, expected):
            sigma = math.sqrt(m * p * (1 - p))
            assert abs(obs - m * p) <= 3.5 * sigma

    def test_acceptance_rate_identity(self):
        # acceptance probability = 1 / (envelope * disk area)
        basis = conditioned_basis(3)
        state = hkpv.OrthoState(basis=basis)
        rng = np.random.default_rng(9)
        sup = hkpv.sup_feature_norm_sq(basis)
        envelope = sup / 3
        diag = RejectionDiagnostics()
        m = 20_000
        for _ in range(m):
            hkpv.rejection_step(state, rng, envelope, diagnostics=diag)
        area = math.pi * basis.disk_radius ** 2
        p = 1.0 / (envelope * area)
        rate = diag.acceptances / diag.proposals
        sigma = math.sqrt(p * (1 - p) / diag.proposals)
        assert abs(rate - p) <= 4 * sigma

    def test_counters_monotone(self):
        basis = conditioned_basis(2)
        state = hkpv.OrthoState(basis=basis)
        rng = np.random.default_rng(10)
        diag = RejectionDiagnostics()
        sup = hkpv.sup_feature_norm_sq(basis)
        last_p, last_a = 0, 0
        for _ in range(50):
            hkpv.rejection_step(state, rng, sup / 2, diagnostics=diag)
            assert diag.proposals > last_p and diag.acceptances > last_a
            assert diag.acceptances <= diag.proposals
            last_p, last_a = diag.proposals, diag.acceptances

    def test_proposal_cap_raises(self):
        basis = conditioned_basis(1)
        state = hkpv.OrthoState(basis=basis)
        rng = np.random.default_rng(11)
        with pytest.raises(hkpv.RejectionCapError):
            # absurd envelope forces rejection of every proposal
            hkpv.rejection_step(state, rng, 1e12, max_proposals=50)


class TestSampleProjectionDpp:
    @pytest.mark.parametrize("n", [1, 2, 7])
    def test_exact_count(self, n):
        pts = hkpv.sample_projection_dpp(conditioned_basis(n), np.random.default_rng(n))
        assert len(pts) == n
        assert np.all(np.abs(pts) <= math.sqrt(n) + 1e-9)

    def test_rank_one_radius_ks(self):
        basis = BasisSubset(radius=1.0, indices=(0,))
        rng = np.random.default_rng(12)
        m = 20_000
        sup = hkpv.sup_feature_norm_sq(basis)
        radii = np.array([
            abs(hkpv.sample_projection_dpp(basis, rng, sup_norm_sq=sup)[0])
            for _ in range(m)])
        gam1 = 1 - math.exp(-1.0)
        res = scipy_stats.kstest(radii, lambda r: (1 - np.exp(-r ** 2)) / gam1)
        assert res.pvalue > 0.01

    def test_orthonormal_vectors_maintained_n100(self):
        n = 100
        basis = conditioned_basis(n)
        state = hkpv.OrthoState(basis=basis)
        rng = np.random.default_rng(13)
        sup = hkpv.sup_feature_norm_sq(basis)
        while state.remaining > 0:
            state.add_point(hkpv.rejection_step(state, rng, sup / state.remaining))
        gram = state.ortho @ state.ortho.conj().T
        assert np.max(np.abs(gram - np.eye(n))) <= 1e-8

    def test_exchangeability_first_vs_last(self):
        # the output set is exchangeable: the first-accepted and
        # last-accepted marginal radius laws coincide
        basis = conditioned_basis(3)
        rng = np.random.default_rng(14)
        m = 4000
        sup = hkpv.sup_feature_norm_sq(basis)
        first = np.empty(m)
        last = np.empty(m)
        for i in range(m):
            pts = hkpv.sample_projection_dpp(basis, rng, sup_norm_sq=sup)
            first[i] = abs(pts[0])
            last[i] = abs(pts[-1])
        res = scipy_stats.ks_2samp(first, last)
        assert res.pvalue > 0.01

    def test_adaptive_pretest_distribution_unchanged(self):
        basis = conditioned_basis(3)
        rng = np.random.default_rng(15)
        m = 4000
        sup = hkpv.sup_feature_norm_sq(basis)
        plain = np.concatenate([
            np.abs(hkpv.sample_projection_dpp(basis, rng, sup_norm_sq=sup))
            for _ in range(m)])
        rng = np.random.default_rng(16)
        squeezed = np.concatenate([
            np.abs(hkpv.sample_projection_dpp(basis, rng, use_adaptive_pretest=True,
                                              sup_norm_sq=sup))
            for _ in range(m)])
        res = scipy_stats.ks_2samp(plain, squeezed)
        assert res.pvalue > 0.01

    def test_two_point_density_ratio_probes(self):
        # pair-count ratio at two probe pairs vs the joint density ratio
        n = 2
        basis = conditioned_basis(n)
        rng = np.random.default_rng(17)
        m = 200_000
        sup = hkpv.sup_feature_norm_sq(basis)
        pair_a = (-0.55 + 0.0j, 0.55 + 0.0j)   # well separated
        pair_b = (-0.18 + 0.0j, 0.18 + 0.0j)   # close: repulsion suppressed
        eps = 0.3
        hits_a = hits_b = 0
        for _ in range(m):
            pts = hkpv.sample_projection_dpp(basis, rng, sup_norm_sq=sup)
            for pair in ((pair_a, "a"), (pair_b, "b")):
                probes, tag = pair
                match = (
                    (abs(pts[0] - probes[0]) < eps and abs(pts[1] - probes[1]) < eps)
                    or (abs(pts[0] - probes[1]) < eps and abs(pts[1] - probes[0]) < eps)
                )
                if match:
                    if tag == "a":
                        hits_a += 1
                    else:
                        hits_b += 1

        def joint(pair):
            kmat = np.array([
                [kernels.conditioned_kernel(n, pair[0], pair[0]),
                 kernels.conditioned_kernel(n, pair[0], pair[1])],
                [kernels.conditioned_kernel(n, pair[1], pair[0]),
                 kernels.conditioned_kernel(n, pair[1], pair[1])],
            ])
            return linalg.lu_det(kmat).real / 2.0

        ratio_emp = hits_a / hits_b
        # bin-averaged theoretical ratio: integrate the joint density over
        # the two probe disks by midpoint sampling
        quad = np.random.default_rng(18)
        offs = (quad.uniform(-eps, eps, (400, 2))
                + 1j * quad.uniform(-eps, eps, (400, 2)))
        offs = offs[np.all(np.abs(offs) < eps, axis=1)]

        def smeared(pair):
            vals = [2.0 * joint((pair[0] + o1, pair[1] + o2)) for o1, o2 in offs]
            return float(np.mean(vals))

        ratio_th = smeared(pair_a) / smeared(pair_b)
        sigma = ratio_emp * math.sqrt(1 / max(hits_a, 1) + 1 / max(hits_b, 1))
        assert abs(ratio_emp - ratio_th) <= 3.5 * sigma
