import numpy as np
import pytest

from wavesmooth.image import Image, load_image
from wavesmooth.wavelet import (
    DB4,
    HAAR,
    SubbandSet,
    WaveletBasis,
    dump_subbands,
    dwt2,
    get_basis,
    idwt2,
)

BASES = [HAAR, DB4]


def random_image(rng, rows, cols, scale=100.0):
    return Image(rng.standard_normal((rows, cols)) * scale)


class TestBasis:
    @pytest.mark.parametrize("basis", BASES)
    def test_lowpass_invariants(self, basis):
        h = basis.h
        assert abs(float(h @ h) - 1.0) <= 1e-12
        assert abs(float(h.sum()) - np.sqrt(2.0)) <= 1e-12

    @pytest.mark.parametrize("basis", BASES)
    def test_highpass_is_quadrature_mirror(self, basis):
        h, g = basis.h, basis.g
        n = h.size
        expected = [(-1.0) ** k * h[n - 1 - k] for k in range(n)]
        assert np.array_equal(g, expected)

    def test_invalid_filter_rejected(self):
        with pytest.raises(ValueError):
            WaveletBasis("bad", (0.5, 0.5))

    def test_get_basis(self):
        assert get_basis("haar") is HAAR
        assert get_basis("DB4") is DB4
        assert get_basis(DB4) is DB4
        with pytest.raises(ValueError):
            get_basis("sym8")


class TestAnalysis:
    def test_haar_2x2_butterfly(self):
        # oracle: the explicit orthonormal 4x4 matrix acting on [a, b, c, d]
        mat = 0.5 * np.array(
            [
                [1, 1, 1, 1],   # ca
                [1, 1, -1, -1],  # chd
                [1, -1, 1, -1],  # cvd
                [1, -1, -1, 1],  # cdd
            ],
            dtype=float,
        )
        rng = np.random.Generator(np.random.PCG64(11))
        for _ in range(20):
            a, b, c, d = rng.standard_normal(4) * 10
            sb = dwt2(Image(np.array([[a, b], [c, d]])), HAAR)
            got = np.array([sb.ca[0, 0], sb.chd[0, 0], sb.cvd[0, 0], sb.cdd[0, 0]])
            expect = mat @ np.array([a, b, c, d])
            assert np.allclose(got, expect, rtol=0, atol=1e-12 * max(1.0, np.abs(expect).max()))

    def test_constant_image_haar(self):
        c = 7.25  # short mantissa keeps the lowpass chain exact
        sb = dwt2(Image(np.full((4, 4), c)), HAAR)
        assert np.allclose(sb.ca, 2 * c, rtol=1e-12)
        assert np.array_equal(sb.chd, np.zeros((2, 2)))
        assert np.array_equal(sb.cvd, np.zeros((2, 2)))
        assert np.array_equal(sb.cdd, np.zeros((2, 2)))

    @pytest.mark.parametrize("basis", BASES)
    def test_energy_equality_scalar_loop(self, basis):
        rng = np.random.Generator(np.random.PCG64(12))
        img = random_image(rng, 8, 8)
        sb = dwt2(img, basis)

        def loop_energy(plane):
            total = 0.0
            for row in plane:
                for v in row:
                    total += float(v) * float(v)
            return total

        e_img = loop_energy(img.data)
        e_sub = sum(loop_energy(p) for p in (sb.ca, sb.chd, sb.cvd, sb.cdd))
        assert abs(e_img - e_sub) <= 1e-9 * e_img

    def test_subband_dimensions(self):
        sb = dwt2(Image(np.zeros((10, 14))), HAAR)
        assert sb.ca.shape == (5, 7)
        assert (sb.source_rows, sb.source_cols) == (10, 14)

    def test_undersized_image_rejected(self):
        with pytest.raises(ValueError):
            dwt2(Image(np.zeros((3, 8))), DB4)
        with pytest.raises(ValueError):
            dwt2(Image(np.zeros((8, 3))), DB4)


class TestReconstruction:
    @pytest.mark.parametrize("basis", BASES)
    def test_perfect_reconstruction(self, basis):
        rng = np.random.Generator(np.random.PCG64(13))
        for _ in range(10):
            img = random_image(rng, 16, 16)
            rec = idwt2(dwt2(img, basis), basis)
            bound = 1e-9 * max(1.0, np.abs(img.data).max())
            assert np.abs(rec.data - img.data).max() <= bound
            assert rec.depth_bits == img.depth_bits

    def test_zero_subbands_give_zero_image(self):
        z = np.zeros((4, 4))
        sb = SubbandSet(z, z.copy(), z.copy(), z.copy(), 8, 8)
        assert np.array_equal(idwt2(sb, DB4).data, np.zeros((8, 8)))

    @pytest.mark.parametrize("basis", BASES)
    def test_analysis_of_synthesis_is_identity(self, basis):
        rng = np.random.Generator(np.random.PCG64(14))
        planes = [rng.standard_normal((8, 8)) for _ in range(4)]
        sb = SubbandSet(*planes, source_rows=16, source_cols=16)
        back = dwt2(idwt2(sb, basis), basis)
        for got, want in zip((back.ca, back.chd, back.cvd, back.cdd), planes):
            assert np.abs(got - want).max() <= 1e-9 * max(1.0, np.abs(want).max())

    @pytest.mark.parametrize("basis", BASES)
    def test_linearity(self, basis):
        rng = np.random.Generator(np.random.PCG64(15))
        x = rng.standard_normal((8, 8))
        y = rng.standard_normal((8, 8))
        alpha, beta = 2.5, -1.25
        lhs = dwt2(Image(alpha * x + beta * y), basis)
        sx = dwt2(Image(x), basis)
        sy = dwt2(Image(y), basis)
        for name in ("ca", "chd", "cvd", "cdd"):
            want = alpha * getattr(sx, name) + beta * getattr(sy, name)
            got = getattr(lhs, name)
            assert np.abs(got - want).max() <= 1e-9 * max(1.0, np.abs(want).max())

    @pytest.mark.parametrize("shape", [(15, 17), (9, 8), (8, 9)])
    def test_odd_dimensions_pad_and_crop(self, shape):
        rng = np.random.Generator(np.random.PCG64(16))
        img = random_image(rng, *shape)
        sb = dwt2(img, DB4)
        assert sb.ca.shape == ((shape[0] + 1) // 2, (shape[1] + 1) // 2)
        rec = idwt2(sb, DB4)
        assert rec.data.shape == shape
        assert np.abs(rec.data - img.data).max() <= 1e-9 * max(1.0, np.abs(img.data).max())

    def test_mismatched_subbands_rejected(self):
        z = np.zeros((4, 4))
        with pytest.raises(ValueError):
            SubbandSet(z, z, z, np.zeros((4, 5)), 8, 8)
        with pytest.raises(ValueError):
            SubbandSet(z, z, z, z, 9, 9)  # inconsistent with recorded source size


def test_dump_subbands_writes_planes_and_sidecar(tmp_path):
    rng = np.random.Generator(np.random.PCG64(17))
    sb = dwt2(Image(rng.standard_normal((16, 16)) * 50), DB4)
    paths = dump_subbands(sb, tmp_path, prefix="dbg")
    pgms = [p for p in paths if p.suffix == ".pgm"]
    assert len(pgms) == 4
    for p in pgms:
        img = load_image(p)
        assert img.depth_bits == 16
        assert img.data.shape == sb.ca.shape
    sidecar = tmp_path / "dbg_mapping.txt"
    assert sidecar.exists()
    lines = sidecar.read_text().splitlines()
    assert len(lines) == 4
    assert all(("min=" in ln and "max=" in ln) for ln in lines)
