"""Kernel-level checks: entropies, the flip channel, and cube symmetries."""

import numpy as np
import pytest

from noisycube import (
    BscChannel,
    Pmf,
    VertexSet,
    binary_entropy,
    canonical_form,
    channel_kernel,
    entropy,
    is_monotone,
    noise_transform,
    permute_coordinates,
    star,
    uniform_pmf_on,
    xor_translate,
)

KERNEL_TOL = 1e-12


def naive_kernel(n, noise):
    """Transition matrix built entry by entry from bit differences."""
    out = np.zeros((2**n, 2**n))
    for x in range(2**n):
        for y in range(2**n):
            p = 1.0
            for i in range(n):
                flipped = ((x >> i) & 1) != ((y >> i) & 1)
                p *= noise[i] if flipped else 1.0 - noise[i]
            out[x, y] = p
    return out


def random_pmf(rng, n):
    return Pmf(n, rng.dirichlet(np.ones(2**n)))


class TestBinaryEntropy:
    def test_endpoints(self):
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0
        assert binary_entropy(0.5) == 1.0

    def test_quarter_matches_extended_precision(self):
        # -(1/4)log2(1/4) - (3/4)log2(3/4) evaluated at 50 digits
        assert abs(binary_entropy(0.25) - 0.8112781244591329) < 1e-15

    def test_symmetry(self):
        rng = np.random.default_rng(0)
        for p in rng.uniform(0, 1, 50):
            assert abs(binary_entropy(p) - binary_entropy(1 - p)) < 1e-12

    @pytest.mark.parametrize("bad", [-0.1, 1.1, 2.0])
    def test_domain(self, bad):
        with pytest.raises(ValueError):
            binary_entropy(bad)


class TestStar:
    def test_identity_and_absorbing(self):
        assert star(0.3, 0.0) == 0.3
        assert star(0.3, 0.5) == 0.5

    def test_hand_value(self):
        assert abs(star(1 / 3, 1 / 4) - 5 / 12) < 1e-15

    def test_commutative(self):
        rng = np.random.default_rng(1)
        for a, b in rng.uniform(0, 1, (50, 2)):
            assert abs(star(a, b) - star(b, a)) < 1e-15

    def test_domain(self):
        with pytest.raises(ValueError):
            star(-0.2, 0.3)
        with pytest.raises(ValueError):
            star(0.2, 1.3)


class TestVertexSet:
    def test_orders_members(self):
        s = VertexSet(3, (5, 1, 3))
        assert s.members == (1, 3, 5)

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            VertexSet(3, (1, 1, 2))

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            VertexSet(2, (0, 4))
        with pytest.raises(ValueError):
            VertexSet(2, (-1,))

    def test_dimension_caps(self):
        with pytest.raises(ValueError):
            VertexSet(0, ())
        with pytest.raises(ValueError):
            VertexSet(25, ())


class TestPmf:
    def test_rejects_negative_mass(self):
        with pytest.raises(ValueError):
            Pmf(1, np.array([1.2, -0.2]))

    def test_rejects_bad_total(self):
        with pytest.raises(ValueError):
            Pmf(1, np.array([0.6, 0.3]))

    def test_mass_is_immutable(self):
        p = Pmf(1, np.array([0.5, 0.5]))
        with pytest.raises(ValueError):
            p.mass[0] = 1.0


class TestUniformPmf:
    def test_whole_cube(self):
        s = VertexSet(3, tuple(range(8)))
        assert np.allclose(uniform_pmf_on(s).mass, 1 / 8)

    def test_point_mass(self):
        p = uniform_pmf_on(VertexSet(3, (0,)))
        assert p.mass[0] == 1.0 and p.mass[1:].sum() == 0.0

    def test_two_point(self):
        p = uniform_pmf_on(VertexSet(2, (0, 3)))
        assert np.array_equal(p.mass, [0.5, 0.0, 0.0, 0.5])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            uniform_pmf_on(VertexSet(2, ()))


class TestNoiseTransform:
    def test_zero_noise_is_identity(self):
        rng = np.random.default_rng(2)
        p = random_pmf(rng, 4)
        out = noise_transform(p, 0.0)
        assert np.array_equal(out.mass, p.mass)

    def test_half_noise_is_uniform(self):
        rng = np.random.default_rng(3)
        p = random_pmf(rng, 4)
        out = noise_transform(p, 0.5)
        assert np.max(np.abs(out.mass - 1 / 16)) < KERNEL_TOL

    def test_point_mass_product_formula(self):
        n, alpha, v = 4, 0.2, 0b1011
        out = noise_transform(uniform_pmf_on(VertexSet(n, (v,))), alpha)
        for y in range(2**n):
            d = bin(v ^ y).count("1")
            assert abs(out.mass[y] - alpha**d * (1 - alpha) ** (n - d)) < KERNEL_TOL

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_matches_naive_convolution(self, n):
        rng = np.random.default_rng(n)
        noise = rng.uniform(0, 0.5, size=n)
        p = random_pmf(rng, n)
        expected = p.mass @ naive_kernel(n, noise)
        assert np.max(np.abs(noise_transform(p, noise).mass - expected)) < KERNEL_TOL

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_kernel_matrix_matches_naive(self, n):
        rng = np.random.default_rng(10 + n)
        noise = rng.uniform(0, 0.5, size=n)
        assert np.max(np.abs(channel_kernel(n, noise) - naive_kernel(n, noise))) < KERNEL_TOL

    def test_rejects_bad_noise(self):
        p = uniform_pmf_on(VertexSet(2, (0,)))
        with pytest.raises(ValueError):
            noise_transform(p, 0.7)
        with pytest.raises(ValueError):
            noise_transform(p, [0.1, 0.2, 0.3])

    def test_doubly_stochastic(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            n = int(rng.integers(1, 6))
            uniform = Pmf(n, np.full(2**n, 2.0**-n))
            out = noise_transform(uniform, rng.uniform(0, 0.5, size=n))
            assert np.max(np.abs(out.mass - 2.0**-n)) < KERNEL_TOL

    def test_entropy_never_decreases(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            n = int(rng.integers(1, 9))
            p = random_pmf(rng, n)
            alpha = float(rng.uniform(0, 0.5))
            assert entropy(noise_transform(p, alpha)) >= entropy(p) - 1e-12

    def test_composition_law(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            n = int(rng.integers(1, 7))
            p = random_pmf(rng, n)
            a, b = rng.uniform(0, 0.5, 2)
            two_step = noise_transform(noise_transform(p, a), b)
            one_step = noise_transform(p, star(a, b))
            assert np.max(np.abs(two_step.mass - one_step.mass)) < KERNEL_TOL

    def test_coordinates_apply_independently(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            n = int(rng.integers(2, 6))
            p = random_pmf(rng, n)
            noise = rng.uniform(0, 0.5, size=n)
            joint = noise_transform(p, noise)
            sequential = p
            for i in range(n):
                one_coord = np.zeros(n)
                one_coord[i] = noise[i]
                sequential = noise_transform(sequential, one_coord)
            assert np.max(np.abs(joint.mass - sequential.mass)) < KERNEL_TOL


class TestEntropy:
    def test_point_mass(self):
        assert entropy(uniform_pmf_on(VertexSet(3, (5,)))) == 0.0

    def test_uniform(self):
        assert abs(entropy(Pmf(4, np.full(16, 1 / 16))) - 4.0) < KERNEL_TOL

    def test_one_fair_bit(self):
        assert abs(entropy(Pmf(2, np.array([0.5, 0.5, 0.0, 0.0]))) - 1.0) < KERNEL_TOL

    def test_invariant_under_symmetries(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            n = int(rng.integers(1, 7))
            mass = rng.dirichlet(np.ones(2**n))
            t = int(rng.integers(0, 2**n))
            perm = list(rng.permutation(n))
            translated = np.empty_like(mass)
            translated[np.arange(2**n) ^ t] = mass
            permuted = np.zeros_like(mass)
            for v in range(2**n):
                w = 0
                for k, src in enumerate(perm):
                    w |= ((v >> src) & 1) << k
                permuted[w] = mass[v]
            base = entropy(Pmf(n, mass))
            assert abs(entropy(Pmf(n, translated)) - base) < KERNEL_TOL
            assert abs(entropy(Pmf(n, permuted)) - base) < KERNEL_TOL


class TestSymmetries:
    def test_xor_translate(self):
        s = VertexSet(3, (0, 5))
        assert xor_translate(s, 5).members == (0, 5)
        assert xor_translate(s, 1).members == (1, 4)

    def test_permute_coordinates(self):
        # swap coordinates 1 and 2 of {x1=1} -> {x2=1}
        s = VertexSet(2, (1,))
        assert permute_coordinates(s, [1, 0]).members == (2,)

    def test_permute_rejects_non_permutation(self):
        with pytest.raises(ValueError):
            permute_coordinates(VertexSet(2, (0,)), [0, 0])

    def test_canonical_form_invariant_on_orbits(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            n = int(rng.integers(1, 6))
            m = int(rng.integers(1, 2**n + 1))
            s = VertexSet(n, tuple(int(v) for v in rng.choice(2**n, m, replace=False)))
            image = xor_translate(s, int(rng.integers(0, 2**n)))
            image = permute_coordinates(image, list(rng.permutation(n)))
            assert canonical_form(image) == canonical_form(s)

    def test_canonical_form_contains_zero_and_is_idempotent(self):
        rng = np.random.default_rng(9)
        for _ in range(30):
            n = int(rng.integers(1, 6))
            m = int(rng.integers(1, 2**n + 1))
            s = VertexSet(n, tuple(int(v) for v in rng.choice(2**n, m, replace=False)))
            canon = canonical_form(s)
            assert canon.members[0] == 0
            assert canonical_form(canon) == canon


class TestIsMonotone:
    def test_examples(self):
        assert is_monotone(VertexSet(3, (0, 1, 2)))
        assert is_monotone(VertexSet(3, ()))
        assert not is_monotone(VertexSet(3, (1, 3)))
        assert is_monotone(VertexSet(3, tuple(range(8))))


class TestBscChannel:
    def test_validation(self):
        assert BscChannel(0.25).alpha == 0.25
        with pytest.raises(ValueError):
            BscChannel(0.7)
        with pytest.raises(ValueError):
            BscChannel(-0.01)
