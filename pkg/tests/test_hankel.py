import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from szego.dynamics import initial_field
from szego.hankel import (
    UnderResolvedError,
    build_hankel,
    build_toeplitz,
    gap_ratio,
    h2_eigen_residual,
    hankel_and_toeplitz,
    hs_identity_residual,
    isospectral_drift,
    kronecker_range_check,
    lax_identity_residual,
    range_residual,
    rank_estimate,
    read_hankel_text,
    spectral_report,
    spectrum_Au,
    takagi_values,
    traveling_wave_identity_residual,
)
from szego.hardy import FrequencyGrid, SpectralField, synth_rational
from szego.rational import RationalSymbol
from szego.solitons import SolitonParams
from strategies import complex_numbers, hardy_coeffs, rational_symbols

UNIT = RationalSymbol.simple(1.0, -1j)
TWO = RationalSymbol.from_terms([(-1j, 1, 1.0), (1.5 - 2j, 1, 0.5j)])
SMALL = dict(cutoff=40.0, size=512)


@pytest.fixture(scope="module")
def H_unit():
    return build_hankel(UNIT, **SMALL)


class TestConstruction:
    def test_entries_of_unit_soliton(self, H_unit):
        n, w = H_unit.nodes, H_unit.spacing
        expected = -1j * w * np.exp(-(n[:, None] + n[None, :]))
        np.testing.assert_allclose(H_unit.matrix, expected, rtol=1e-13)

    @settings(max_examples=20)
    @given(rational_symbols(max_poles=2))
    def test_complex_symmetric(self, sym):
        H = build_hankel(sym, 20.0, 64)
        np.testing.assert_array_equal(H.matrix, H.matrix.T)

    @settings(max_examples=20)
    @given(rational_symbols(max_poles=2), rational_symbols(max_poles=2), complex_numbers())
    def test_linear_in_the_symbol(self, a, b, lam):
        lhs = build_hankel(a + lam * b, 20.0, 64).matrix
        rhs = build_hankel(a, 20.0, 64).matrix + lam * build_hankel(b, 20.0, 64).matrix
        np.testing.assert_allclose(lhs, rhs, atol=1e-12 * (1 + np.max(np.abs(rhs))))

    def test_field_entries_are_coefficients(self):
        g = FrequencyGrid(64.0, 256)
        u = SpectralField(g, np.arange(g.n_modes) + 1j)
        H = build_hankel(u, size=8)
        assert H.matrix[2, 5] == u.coeffs[7] and H.provenance == "field"

    def test_field_band_too_wide(self):
        g = FrequencyGrid(64.0, 256)
        with pytest.raises(UnderResolvedError):
            build_hankel(SpectralField.zeros(g), size=100)

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            build_hankel(UNIT, cutoff=-1.0)
        with pytest.raises(TypeError):
            build_hankel(np.ones(4))

    def test_text_export_round_trip(self, tmp_path):
        H = build_hankel(TWO, 10.0, 16)
        H.to_text(tmp_path / "H.txt")
        cutoff, size, prov, M = read_hankel_text(tmp_path / "H.txt")
        assert (cutoff, size, prov) == (10.0, 16, "rational")
        np.testing.assert_array_equal(M, H.matrix)


class TestSingularValues:
    def test_soliton_value_converges_at_second_order(self):
        errs = [abs(takagi_values(build_hankel(UNIT, 40.0, K), top=1)[0] - 0.5) for K in (256, 512, 1024)]
        assert all(3.9 < errs[i] / errs[i + 1] < 4.1 for i in range(2))

    def test_homogeneity(self, H_unit):
        lam = 2.5 - 1j
        scaled = takagi_values(build_hankel(lam * UNIT, **SMALL), top=2)
        np.testing.assert_allclose(scaled, abs(lam) * takagi_values(H_unit, top=2), atol=1e-14)

    def test_ranks(self, H_unit):
        assert rank_estimate(H_unit) == 1
        H2 = build_hankel(TWO, **SMALL)
        vals = takagi_values(H2)
        assert rank_estimate(H2, values=vals) == 2 and gap_ratio(vals, 2) > 1e12
        zero = build_hankel(SpectralField.zeros(FrequencyGrid(32.0, 64)), size=8)
        assert rank_estimate(zero) == 0 and not np.any(takagi_values(zero))

    @pytest.mark.parametrize("sym", [
        # 1/((x+i)(x+2i)) = -i/(x+i) + i/(x+2i)
        RationalSymbol.from_terms([(-1j, 1, -1j), (-2j, 1, 1j)]),
        RationalSymbol.from_terms([(-1j, 2, 1.0)]),
    ])
    def test_rank_two_examples(self, sym):
        assert rank_estimate(build_hankel(sym, **SMALL)) == 2

    def test_lanczos_agrees_with_dense(self):
        H = build_hankel(TWO, 40.0, 1024)
        np.testing.assert_allclose(takagi_values(H, top=3)[:2], takagi_values(H)[:2], rtol=1e-12)

    def test_kernel_element_action(self, H_unit):
        # H_u u = Pi(|u|^2) = (i/2) u for u = 1/(x+i)
        v = H_unit.vector(UNIT)
        err = np.linalg.norm(H_unit.apply(v) - 0.5j * v) / np.linalg.norm(v)
        assert err < 2e-3


class TestKronecker:
    def test_range_contains_poles(self):
        H = build_hankel(TWO, **SMALL)
        rep = kronecker_range_check(TWO, H)
        assert rep.passed and rep.complement_overlap < 1e-6

    def test_foreign_pole_is_outside_the_range(self, H_unit):
        left = np.linalg.svd(H_unit.matrix)[0][:, :1]
        assert range_residual(H_unit.vector(RationalSymbol.simple(1.0, 2 - 2j)), left) > 0.5

    def test_hs_identity_converges(self):
        res = [hs_identity_residual(UNIT, build_hankel(UNIT, 40.0, K)) for K in (256, 512, 1024)]
        assert res[0] > res[1] > res[2] and res[2] < 3e-4


class TestToeplitz:
    def test_hermitian(self):
        T = build_toeplitz(TWO.abs2(), 20.0, 64)
        np.testing.assert_allclose(T.matrix, T.matrix.conj().T, atol=1e-15)

    def test_field_and_rational_agree_on_entries(self):
        g = FrequencyGrid(256.0, 4096)
        u = synth_rational(UNIT, g)
        T = build_toeplitz(u, size=16)
        # (1/L) * transform of 1/(x^2+1) = (pi/L) exp(-|xi|); squaring the
        # periodized field instead of periodizing the square costs O(1/L)
        k = np.arange(16)
        expected = np.pi / g.L * np.exp(-np.abs(k[:, None] - k[None, :]) * g.dxi)
        np.testing.assert_allclose(T.matrix, expected, rtol=8 / g.L)

    def test_samples_must_be_real(self):
        g = FrequencyGrid(32.0, 64)
        with pytest.raises(ValueError):
            build_toeplitz(np.full(64, 1j), grid=g, size=4)
        with pytest.raises(ValueError):
            build_toeplitz(np.ones(64))

    def test_constant_symbol_is_identity(self):
        g = FrequencyGrid(32.0, 64)
        T = build_toeplitz(np.full(64, 3.0), grid=g, size=8)
        np.testing.assert_allclose(T.matrix, 3 * np.eye(8), atol=1e-14)


class TestIdentities:
    def test_lax_identity_on_fields(self):
        g = FrequencyGrid(256.0, 4096)
        for spec in ({"kind": "soliton", "C": 1.0, "p": [0, -1]}, {"kind": "random", "seed": 1}):
            u, _ = initial_field(spec, g)
            assert lax_identity_residual(u) < 1e-8

    @settings(max_examples=10)
    @given(hardy_coeffs(257, band=40))
    def test_lax_identity_property(self, c):
        u = SpectralField(FrequencyGrid(32.0, 512), c)
        assert lax_identity_residual(u, size=128) < 1e-10

    def test_lax_identity_refuses_wide_fields(self):
        g = FrequencyGrid(32.0, 512)
        u = SpectralField(g, np.ones(g.n_modes))
        with pytest.raises(UnderResolvedError):
            lax_identity_residual(u)

    def test_traveling_wave_identity_rational(self):
        ops = hankel_and_toeplitz(UNIT, 40.0, 1024)
        assert traveling_wave_identity_residual(UNIT, 0.5, 0.25, ops=ops) < 1e-3
        assert traveling_wave_identity_residual(UNIT, 0.5, 0.5, ops=ops) > 0.1

    def test_traveling_wave_identity_is_exact_on_the_torus(self):
        g = FrequencyGrid(256.0, 4096)
        params = SolitonParams(1.0, -1j)
        u = synth_rational(params.symbol(), g)
        c, omega = params.periodic_speeds(g)
        assert traveling_wave_identity_residual(u, c, omega) < 1e-10

    def test_h2_eigenrelation(self):
        H = build_hankel(UNIT, 40.0, 1024)
        assert h2_eigen_residual(UNIT, 0.5, H=H) < 2e-4

    def test_Au_of_soliton(self):
        spec = spectrum_Au(UNIT, 0.5, 40.0, 1024)
        assert spec.n_negative == 1 and spec.overlap > 0.999
        assert spec.lowest == pytest.approx(-0.5, abs=1e-3)

    def test_Au_of_zero_field_is_the_frequency_operator(self):
        g = FrequencyGrid(32.0, 128)
        spec = spectrum_Au(SpectralField.zeros(g), 1.0)
        np.testing.assert_allclose(np.sort(spec.eigenvalues), spec.nodes, atol=1e-14)
        assert spec.n_negative == 0 and spec.overlap == 0.0

    def test_zero_velocity_rejected(self):
        with pytest.raises(ValueError):
            spectrum_Au(UNIT, 0.0)
        with pytest.raises(ValueError):
            traveling_wave_identity_residual(UNIT, 0.0, 1.0)


def test_isospectral_drift_of_constant_record():
    class Record:
        singular_values = [np.array([1.0, 0.5]), np.array([1.0, 0.5])]
        snapshots = []

    assert isospectral_drift(Record(), 2) == 0.0


def test_spectral_report_lists_gaps():
    import json

    out = json.loads(spectral_report(np.array([1.0, 0.5, 0.0]), source="x"))
    assert out["gaps"] == [2.0, None] and out["source"] == "x"
