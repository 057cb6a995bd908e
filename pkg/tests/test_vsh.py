import numpy as np
import pytest
from scipy.special import sph_harm_y

from photon_angmom.grid import GridSpec, build_grid
from photon_angmom.vsh import (
    VshExpansion,
    analyze,
    legendre_normalized,
    scalar_ylm,
    synthesize,
    vsh_pair,
)
from photon_angmom.wavefunction import WaveFunction, norm


@pytest.fixture(scope="module")
def grid():
    # resolves l_max = 10 with headroom
    return build_grid(GridSpec(n_k=6, k_min=0.4, k_max=1.6, n_theta=16, n_phi=25))


def _random_angles(seed, n=200):
    rng = np.random.default_rng(seed)
    theta = np.arccos(rng.uniform(-0.999, 0.999, n))
    phi = rng.uniform(0.0, 2.0 * np.pi, n)
    return theta, phi


def test_legendre_against_scipy():
    theta, _ = _random_angles(0)
    table = legendre_normalized(12, np.cos(theta))
    for l, m in [(0, 0), (1, 0), (1, 1), (5, 3), (12, 12), (9, 0), (11, 7)]:
        ref = sph_harm_y(l, m, theta, 0.0)
        np.testing.assert_allclose(table[l, m], ref.real, atol=1e-13)


def test_legendre_orthogonality():
    # int P_lm P_l'm dx = 1/(2 pi) delta_ll' in this normalization
    x, w = np.polynomial.legendre.leggauss(40)
    table = legendre_normalized(14, x)
    for m in (0, 2, 5):
        for l in range(m, 15):
            for lp in range(m, 15):
                val = np.sum(w * table[l, m] * table[lp, m])
                ref = (1.0 if l == lp else 0.0) / (2.0 * np.pi)
                np.testing.assert_allclose(val, ref, atol=2e-14)


def test_scalar_ylm_closed_forms():
    theta, phi = _random_angles(1)
    np.testing.assert_allclose(
        scalar_ylm(0, 0, theta, phi), np.full_like(theta, 1.0 / np.sqrt(4 * np.pi)),
        atol=1e-15,
    )
    np.testing.assert_allclose(
        scalar_ylm(1, 0, theta, phi), np.sqrt(3 / (4 * np.pi)) * np.cos(theta),
        atol=1e-14,
    )
    # Condon-Shortley: Y_{1,1} carries the minus sign
    np.testing.assert_allclose(
        scalar_ylm(1, 1, theta, phi),
        -np.sqrt(3 / (8 * np.pi)) * np.sin(theta) * np.exp(1j * phi),
        atol=1e-14,
    )
    np.testing.assert_allclose(
        scalar_ylm(1, -1, theta, phi),
        np.sqrt(3 / (8 * np.pi)) * np.sin(theta) * np.exp(-1j * phi),
        atol=1e-14,
    )


def test_scalar_ylm_against_scipy():
    theta, phi = _random_angles(2)
    for l, m in [(2, -2), (3, 2), (4, 0), (7, -5), (10, 10), (6, 1)]:
        np.testing.assert_allclose(
            scalar_ylm(l, m, theta, phi), sph_harm_y(l, m, theta, phi), atol=1e-13
        )


def test_scalar_ylm_rejects_bad_m():
    with pytest.raises(ValueError):
        scalar_ylm(2, 3, 0.5, 0.5)


def test_vsh_pair_closed_form_l1_m0():
    theta, phi = _random_angles(3)
    y1, y2 = vsh_pair(1, 0, theta, phi)
    amp = 1j * np.sqrt(3 / (8 * np.pi)) * np.sin(theta)
    ref = np.stack([-amp * np.sin(phi), amp * np.cos(phi), np.zeros_like(amp)], axis=-1)
    np.testing.assert_allclose(y1, ref, atol=1e-14)
    khat = np.stack(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)],
        axis=-1,
    )
    np.testing.assert_allclose(y2, np.cross(khat, y1), atol=1e-14)


def test_vsh_transversality():
    theta, phi = _random_angles(4)
    khat = np.stack(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)],
        axis=-1,
    )
    for l, m in [(1, 1), (3, -2), (5, 0), (8, 8), (6, -6)]:
        y1, y2 = vsh_pair(l, m, theta, phi)
        np.testing.assert_allclose(np.einsum("nc,nc->n", khat, y1), 0.0, atol=1e-13)
        np.testing.assert_allclose(np.einsum("nc,nc->n", khat, y2), 0.0, atol=1e-13)


def test_vsh_rejects_l0():
    with pytest.raises(ValueError):
        vsh_pair(0, 0, 0.5, 0.5)


def _basis_matrix(grid, l_cut):
    """All Y^(a)_lm with l <= l_cut sampled on the angular subgrid."""
    th = np.repeat(grid.theta_nodes, grid.spec.n_phi)
    ph = np.tile(grid.phi_nodes, grid.spec.n_theta)
    rows = []
    labels = []
    for a in (1, 2):
        for l in range(1, l_cut + 1):
            for m in range(-l, l + 1):
                y1, y2 = vsh_pair(l, m, th, ph)
                rows.append((y1 if a == 1 else y2).reshape(-1))
                labels.append((a, l, m))
    return np.array(rows), labels


def test_orthonormality_up_to_l8():
    grid = build_grid(GridSpec(n_k=1, k_min=0.9, k_max=1.1, n_theta=12, n_phi=20))
    basis, _ = _basis_matrix(grid, 8)
    w3 = np.repeat(grid.angular_weights, 3)
    gram = (basis.conj() * w3[None, :]) @ basis.T
    dev = np.abs(gram - np.eye(len(basis))).max()
    assert dev < 1e-10


def test_analyze_single_basis_element(grid):
    th = grid.theta
    ph = grid.phi
    y1, y2 = vsh_pair(2, 1, th, ph)
    v = WaveFunction(grid, y1, check=False)
    e = analyze(v, l_max=6)
    np.testing.assert_allclose(e.coefficient(1, 2, 1), 1.0, atol=1e-12)
    total = np.abs(e.coeffs).sum()
    np.testing.assert_allclose(total, grid.spec.n_k, atol=1e-10)

    g = 1.0 + 0.5 * grid.k_nodes  # radial profile recovered per node
    vals = (g[:, None, None] * y2.reshape(grid.shape + (3,)).reshape(grid.spec.n_k, -1, 3)).reshape(-1, 3)
    v2 = WaveFunction(grid, vals, check=False)
    e2 = analyze(v2, l_max=6)
    np.testing.assert_allclose(e2.coefficient(2, 2, 1), g, atol=1e-12)


def test_round_trip_random_bandlimited(grid):
    rng = np.random.default_rng(17)
    e = VshExpansion.zero(grid, l_max=10)
    for a in (1, 2):
        for l in range(1, 11):
            for m in range(-l, l + 1):
                e.coeffs[a - 1, :, l, m + 10] = rng.standard_normal(
                    grid.spec.n_k
                ) + 1j * rng.standard_normal(grid.spec.n_k)
    v = synthesize(e)
    e_back = analyze(v, l_max=10)
    np.testing.assert_allclose(e_back.coeffs, e.coeffs, atol=1e-10)
    v_back = synthesize(e_back)
    np.testing.assert_allclose(v_back.values, v.values, atol=1e-10)


def test_parseval(grid):
    rng = np.random.default_rng(23)
    e = VshExpansion.zero(grid, l_max=5)
    e.coeffs[:] = rng.standard_normal(e.coeffs.shape) + 1j * rng.standard_normal(
        e.coeffs.shape
    )
    # zero out structural slots (|m| > l and l = 0)
    for l in range(6):
        for m in range(-5, 6):
            if l == 0 or abs(m) > l:
                e.coeffs[:, :, l, m + 5] = 0.0
    v = synthesize(e)
    np.testing.assert_allclose(norm(v) ** 2, e.norm_squared(), rtol=1e-12)


def test_windowed_analyze_matches_full(grid):
    rng = np.random.default_rng(29)
    e = VshExpansion.zero(grid, l_max=8)
    for l in range(2, 9):
        e.coeffs[0, :, l, 2 + 8] = rng.standard_normal(grid.spec.n_k)
        e.coeffs[1, :, l, 2 + 8] = rng.standard_normal(grid.spec.n_k)
    v = synthesize(e)
    full = analyze(v, l_max=8)
    windowed = analyze(v, l_max=8, m_window=(1, 3))
    for a in (1, 2):
        for l in range(1, 9):
            for m in (1, 2, 3):
                np.testing.assert_allclose(
                    windowed.coefficient(a, l, m),
                    full.coefficient(a, l, m),
                    atol=1e-12,
                )


def test_analyze_resolution_preconditions(grid):
    v = WaveFunction(grid, np.zeros((grid.n_nodes, 3)), check=False)
    with pytest.raises(ValueError):
        analyze(v, l_max=20)  # n_theta too small
    with pytest.raises(ValueError):
        analyze(v, l_max=13)  # n_phi too small for full window
    # windowed form lifts only the azimuthal requirement
    e = analyze(v, l_max=13, m_window=(-1, 1))
    assert e.l_max == 13


def test_expansion_arithmetic(grid):
    rad = np.ones(grid.spec.n_k)
    a = VshExpansion.single(grid, 6, 1, 3, 2, rad)
    b = VshExpansion.single(grid, 6, 2, 4, -1, rad)
    s = a + 2.0 * b
    np.testing.assert_allclose(s.coefficient(1, 3, 2), 1.0)
    np.testing.assert_allclose(s.coefficient(2, 4, -1), 2.0)
    d = s - a
    np.testing.assert_allclose(d.coefficient(1, 3, 2), 0.0, atol=1e-15)


def test_to_rows_dump(grid):
    rad = np.linspace(1.0, 2.0, grid.spec.n_k)
    e = VshExpansion.single(grid, 4, 2, 3, -2, rad)
    rows = e.to_rows()
    assert len(rows) == 1
    row = rows[0]
    assert (row["a"], row["l"], row["m"]) == (2, 3, -2)
    np.testing.assert_allclose([c[0] for c in row["radial"]], rad)
