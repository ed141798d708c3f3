import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beamlink import beamformer, stbc
from beamlink.rng import substream

from oracles import ml_decode_index


def _random_symbols(rng, const, n):
    idx = rng.integers(0, const.order, n)
    return const.points[idx], idx


class TestConstellations:
    def test_bpsk_mapping(self):
        c = stbc.make_constellation(2)
        assert stbc.map_bits(np.array([0]), c) == 1.0 + 0j
        assert stbc.map_bits(np.array([1]), c) == -1.0 + 0j

    def test_qpsk_unit_modulus(self):
        c = stbc.make_constellation(4)
        np.testing.assert_allclose(np.abs(c.points) ** 2, 1.0, atol=1e-12)

    @pytest.mark.parametrize("order", [2, 4, 16, 64])
    def test_unit_average_energy(self, order):
        c = stbc.make_constellation(order)
        # independent accumulation, entry by entry
        total = 0.0
        for p in c.points:
            total += abs(p) ** 2
        assert total / order == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("order", [2, 4, 16, 64])
    def test_labels_distinct_and_roundtrip(self, order):
        c = stbc.make_constellation(order)
        seen = {tuple(row) for row in c.labels}
        assert len(seen) == order
        for i in range(order):
            sym = stbc.map_bits(c.labels[i], c)
            assert np.array_equal(stbc.demap(sym, c), c.labels[i])

    @pytest.mark.parametrize("order", [16, 64])
    def test_gray_neighbours_differ_in_one_bit(self, order):
        c = stbc.make_constellation(order)
        n_levels = int(np.sqrt(order))
        spacing = 2.0 / np.sqrt(2.0 * (order - 1) / 3.0)
        for i in range(order):
            for j in range(i + 1, order):
                d = abs(c.points[i] - c.points[j])
                if d == pytest.approx(spacing, rel=1e-9):
                    assert np.sum(c.labels[i] != c.labels[j]) == 1

    def test_noisy_demap_nearest(self):
        c = stbc.make_constellation(16)
        sym = c.points[5] + (0.01 + 0.02j)
        assert np.array_equal(stbc.demap(sym, c), c.labels[5])

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            stbc.make_constellation(8)
        c = stbc.make_constellation(4)
        with pytest.raises(ValueError):
            stbc.map_bits(np.array([0, 1, 0]), c)


class TestAlamoutiCodeword:
    @settings(max_examples=100, deadline=None)
    @given(
        re1=st.floats(-2, 2), im1=st.floats(-2, 2),
        re2=st.floats(-2, 2), im2=st.floats(-2, 2),
    )
    def test_orthogonality(self, re1, im1, re2, im2):
        s = stbc.alamouti_codeword(re1 + 1j * im1, re2 + 1j * im2)
        energy = abs(re1 + 1j * im1) ** 2 + abs(re2 + 1j * im2) ** 2
        np.testing.assert_allclose(s @ s.conj().T, energy * np.eye(2), atol=1e-12)

    def test_determinant_is_energy(self):
        rng = substream(0, 41)
        for _ in range(100):
            s1, s2 = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            s = stbc.alamouti_codeword(s1, s2)
            det = np.linalg.det(s)
            assert det.imag == pytest.approx(0.0, abs=1e-12)
            assert det.real == pytest.approx(abs(s1) ** 2 + abs(s2) ** 2, abs=1e-10)

    def test_identity_like_codeword(self):
        np.testing.assert_allclose(stbc.alamouti_codeword(1.0, 0.0), np.eye(2))


class TestEncode:
    def test_eq1_codeword(self):
        c = stbc.make_constellation(4)
        bf = beamformer.build_dft_atb(2)
        bits = np.array([0, 1, 1, 0], dtype=np.uint8)
        s, x = stbc.encode_alamouti(bits, c, bf)
        np.testing.assert_allclose(x, bf.matrix @ s)

    def test_eq10_scaling(self):
        c = stbc.make_constellation(4)
        bf = beamformer.build_dft_atb(2)
        bits = np.array([0, 1, 1, 0], dtype=np.uint8)
        _, x1 = stbc.encode_alamouti(bits, c, bf, gamma0=4.0, mode="eq1")
        _, x10 = stbc.encode_alamouti(bits, c, bf, gamma0=4.0, mode="eq10")
        np.testing.assert_allclose(x10, np.sqrt(4.0 * bf.kappa) * x1)

    def test_eq10_power_audit(self):
        # E ||X||_F^2 = gamma0 * kappa * E ||F S||_F^2 = 4 gamma0 kappa for
        # orthonormal-column F and unit-energy symbols
        c = stbc.make_constellation(16)
        bf = beamformer.build_dft_atb(2)
        rng = substream(0, 42)
        gamma0 = 7.0
        total = 0.0
        n = 4000
        for _ in range(n):
            bits = rng.integers(0, 2, 8).astype(np.uint8)
            _, x = stbc.encode_alamouti(bits, c, bf, gamma0=gamma0, mode="eq10")
            total += np.linalg.norm(x) ** 2
        assert total / n == pytest.approx(4.0 * gamma0 * bf.kappa, rel=0.05)

    def test_dimension_checks(self):
        c = stbc.make_constellation(4)
        with pytest.raises(ValueError):
            stbc.encode_alamouti(np.array([0, 1], dtype=np.uint8), c, beamformer.build_dft_atb(2))
        with pytest.raises(ValueError):
            stbc.encode_alamouti(
                np.array([0, 1, 0, 1], dtype=np.uint8), c, beamformer.build_dft_atb(3)
            )


class TestTransmitReceive:
    def test_noiseless_unit_channel_picks_first_row(self):
        x = np.arange(8, dtype=np.complex128).reshape(4, 2)
        h = np.zeros(4, dtype=complex)
        h[0] = 1.0
        y = stbc.transmit_receive(x, h, substream(0, 43), amplitude=2.0, sigma2=0.0)
        np.testing.assert_allclose(y, 2.0 * x[0])

    def test_zero_codeword_gives_pure_noise(self):
        x = np.zeros((4, 2), dtype=complex)
        h = np.ones(4, dtype=complex)
        y = stbc.transmit_receive(x, h, substream(0, 44), sigma2=1.0)
        z = stbc.transmit_receive(x, h, substream(0, 44), sigma2=1.0)
        assert np.array_equal(y, z)
        assert np.all(y != 0)

    def test_noise_variance(self):
        x = np.zeros((2, 2), dtype=complex)
        h = np.ones(2, dtype=complex)
        rng = substream(0, 45)
        samples = np.concatenate(
            [stbc.transmit_receive(x, h, rng, sigma2=2.0) for _ in range(500_000)]
        )
        var = np.mean(np.abs(samples) ** 2)
        se = np.std(np.abs(samples) ** 2, ddof=1) / np.sqrt(samples.size)
        assert abs(var - 2.0) < 3 * se

    def test_eq1_amplitude(self):
        assert stbc.eq1_amplitude(9.0, 4, 3) == pytest.approx(np.sqrt(12.0))


class TestDecode:
    @pytest.mark.parametrize("order", [2, 4, 16, 64])
    @pytest.mark.parametrize("scheme", ["dft", "bpr"])
    def test_noiseless_roundtrip(self, order, scheme):
        c = stbc.make_constellation(order)
        rng = substream(0, 46)
        if scheme == "dft":
            bf = beamformer.build_dft_atb(2)
        else:
            bf = beamformer.build_bpr_atb(
                2, beamformer.REAL_GOLDEN, np.array([0.0, np.pi]), np.array([np.pi, np.pi])
            )
        for _ in range(50):
            h = (rng.standard_normal(4) + 1j * rng.standard_normal(4)) / np.sqrt(2)
            h_eq = beamformer.equivalent_channel(bf, h)
            bits = rng.integers(0, 2, 2 * c.bits_per_symbol).astype(np.uint8)
            _, x = stbc.encode_alamouti(bits, c, bf)
            y = stbc.transmit_receive(x, h, rng, amplitude=1.5, sigma2=0.0)
            assert np.array_equal(stbc.decode_alamouti(y, h_eq, c, amplitude=1.5), bits)

    def test_matches_exhaustive_ml(self):
        c = stbc.make_constellation(4)
        bf = beamformer.build_dft_atb(2)
        codewords, labels = stbc.alamouti_codebook(c)
        rng = substream(0, 47)
        for _ in range(1000):
            h = (rng.standard_normal(4) + 1j * rng.standard_normal(4)) / np.sqrt(2)
            h_eq = beamformer.equivalent_channel(bf, h)
            if np.linalg.norm(h_eq) < 1e-6:
                continue
            bits = rng.integers(0, 2, 4).astype(np.uint8)
            _, x = stbc.encode_alamouti(bits, c, bf)
            y = stbc.transmit_receive(x, h, rng, amplitude=1.0, sigma2=0.5)
            fast = stbc.decode_alamouti(y, h_eq, c)
            ml = labels[ml_decode_index(y, h_eq, codewords, 1.0)]
            assert np.array_equal(fast, ml)

    def test_pure_guessing_limit(self):
        c = stbc.make_constellation(4)
        bf = beamformer.build_dft_atb(2)
        rng = substream(0, 48)
        errors = 0
        bits_total = 0
        for _ in range(5000):
            h = (rng.standard_normal(4) + 1j * rng.standard_normal(4)) / np.sqrt(2)
            h_eq = beamformer.equivalent_channel(bf, h)
            bits = rng.integers(0, 2, 4).astype(np.uint8)
            _, x = stbc.encode_alamouti(bits, c, bf)
            y = stbc.transmit_receive(x, h, rng, amplitude=1.0, sigma2=1e8)
            errors += np.count_nonzero(stbc.decode_alamouti(y, h_eq, c) != bits)
            bits_total += 4
        assert errors / bits_total == pytest.approx(0.5, abs=0.02)

    def test_degenerate_channel_convention(self):
        c = stbc.make_constellation(4)
        out = stbc.decode_alamouti(np.array([1.0 + 0j, 1.0 + 0j]), np.zeros(2, dtype=complex), c)
        assert np.array_equal(out, np.concatenate([c.labels[0], c.labels[0]]))


class TestErrorMatrix:
    def test_orthogonal_difference_property(self):
        c = stbc.make_constellation(4)
        codewords, _ = stbc.alamouti_codebook(c)
        n = codewords.shape[0]
        for k in range(n):
            for l in range(n):
                if k == l:
                    continue
                err = stbc.error_matrix(codewords[k], codewords[l], (k, l))
                prod = err.matrix @ err.matrix.conj().T
                np.testing.assert_allclose(prod, err.scale * np.eye(2), atol=1e-10)
                assert err.scale > 0

    def test_codebook_shape_and_labels(self):
        c = stbc.make_constellation(16)
        codewords, labels = stbc.alamouti_codebook(c)
        assert codewords.shape == (256, 2, 2)
        assert labels.shape == (256, 8)
        # codeword i1*M+i2 holds symbols (i1, i2)
        assert codewords[5 * 16 + 3][0, 0] == c.points[5]
        assert codewords[5 * 16 + 3][1, 0] == c.points[3]
