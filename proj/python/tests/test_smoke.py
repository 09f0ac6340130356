import math

import numpy as np
import pytest

import andersonlab as al


def test_coefficients_match_numpy_fft():
    c = al.white_noise(2, 16, 3)
    assert c.shape == (16, 16)
    v = al.values(c)
    np.testing.assert_allclose(np.fft.fftn(v) / 16**2, c, atol=1e-12)
    assert np.max(np.abs(v.imag)) < 1e-12


def test_white_noise_is_deterministic():
    np.testing.assert_array_equal(al.white_noise(3, 8, 5), al.white_noise(3, 8, 5))
    assert al.white_noise(3, 8, 5)[0, 0, 0] == 0


def test_reconstruction():
    f = al.white_noise(2, 32, 1)
    g = al.white_noise(2, 32, 2)
    total = al.para_lt(f, g) + al.resonant(f, g) + al.para_gt(f, g)
    np.testing.assert_allclose(total, al.product(f, g), atol=1e-10)


def test_character_norms():
    e = al.mode(2, 32, (5, 0, 0))
    for p in (1.0, 2.0, 4.0, math.inf):
        assert al.lp_norm(e, p) == pytest.approx(1.0)
    assert al.sobolev_norm(e, 1.0) == pytest.approx(math.sqrt(1 + 4 * math.pi**2 * 25))
    assert al.besov_norm(e, 0.5, 2.0, 2.0) == pytest.approx(8.0**0.5)


def test_renormalization_constants():
    assert al.renorm_constant_2d(1.0, 16) == pytest.approx(3.0)
    c1, _ = al.renorm_constants_3d(1.0, 16)
    assert c1 == pytest.approx(6.0)


def test_free_phase():
    e = al.mode(2, 16, (1, 0, 0))
    out = al.free_propagate(e, 0.25)
    assert out[1, 0] == pytest.approx(np.exp(1j * 4 * math.pi**2 * 0.25))


def test_anderson2d_group():
    op = al.Anderson2d(M=32, eps=0.125, K=6.0, seed=3)
    assert op.shift >= 1.0
    u = op.random_band_field(4, 1.0)
    np.testing.assert_allclose(op.gamma_inverse(op.gamma(u)), u, atol=1e-9)
    v = op.propagate(u, 0.5)
    assert op.mass(v) == pytest.approx(op.mass(u), rel=1e-10)
    assert max(op.eigenvalues()) <= -1.0 + 1e-9


def test_errors_are_value_errors():
    with pytest.raises(ValueError):
        al.white_noise(2, 12, 1)
    with pytest.raises(ValueError):
        al.values(np.zeros((4, 8), dtype=complex))


def test_scaling_report():
    rep = al.laplacian_scaling(2, 4.0, [4, 8, 16, 32], list(range(1, 21)), M=128, n_t=64)
    assert rep["theory_slope"] == 0.0
    assert rep["pass"]
