import json

import numpy as np
import pytest

from photon_angmom.grid import GridSpec, build_grid
from photon_angmom.modes import ModeSpec, build_mode
from photon_angmom.synthesis import (
    SpaceTimeLattice,
    com_convergence_shift,
    cube_lattice,
    divergence_residual,
    export_fields,
    export_slice,
    k_space_com,
    real_space_com,
    synthesize_fields,
)
from photon_angmom.wavefunction import WaveFunction, random_state


def tiny_setup():
    grid = build_grid(GridSpec(n_k=2, k_min=0.8, k_max=1.2, n_theta=4, n_phi=5))
    v = random_state(grid, seed=11)
    lattice = SpaceTimeLattice(
        origin=(-1.0, -0.8, -0.5), extents=(2.0, 1.7, 1.3), n_x=4, n_y=3, n_z=2
    )
    return grid, v, lattice


def direct_fields(v, lattice, time):
    # brute-force triple loop; the oracle for the factorized-phase path
    g = v.grid
    om = g.k
    coef = g.weights / (2.0 * np.pi * np.sqrt(om)) * np.exp(-1j * om * time)
    nx, ny, nz = lattice.shape
    A = np.zeros((nx, ny, nz, 3), dtype=complex)
    E = np.zeros_like(A)
    dA = np.zeros((nx, ny, nz, 3, 3), dtype=complex)
    for ix, x in enumerate(lattice.axis(0)):
        for iy, y in enumerate(lattice.axis(1)):
            for iz, z in enumerate(lattice.axis(2)):
                ph = coef * np.exp(1j * (g.kvec @ np.array([x, y, z])))
                A[ix, iy, iz] = ph @ v.values
                E[ix, iy, iz] = (1j * om * ph) @ v.values
                for a in range(3):
                    dA[ix, iy, iz, a] = (1j * g.kvec[:, a] * ph) @ v.values
    return A, E, dA


def test_lattice_axes_and_weights():
    lat = SpaceTimeLattice(origin=(-1.0, 0.0, 2.0), extents=(2.0, 3.0, 4.0),
                           n_x=5, n_y=4, n_z=3)
    ax = lat.axis(0)
    assert ax[0] == -1.0 and ax[-1] == 1.0
    assert lat.spacing(0) == pytest.approx(0.5)
    np.testing.assert_allclose(lat.axis(2), [2.0, 4.0, 6.0])
    for j in range(3):
        assert lat.axis_weights(j).sum() == pytest.approx(lat.extents[j])
    w = lat.axis_weights(0)
    assert w[0] == pytest.approx(0.25) and w[1] == pytest.approx(0.5)


def test_lattice_validation():
    with pytest.raises(ValueError):
        SpaceTimeLattice(origin=(0, 0, 0), extents=(1, 1, 1), n_x=1, n_y=4, n_z=4)
    with pytest.raises(ValueError):
        SpaceTimeLattice(origin=(0, 0, 0), extents=(1, 0, 1), n_x=4, n_y=4, n_z=4)
    with pytest.raises(KeyError, match="n_z"):
        SpaceTimeLattice.from_dict(
            {"origin": [0, 0, 0], "extents": [1, 1, 1], "n_x": 4, "n_y": 4}
        )


def test_lattice_dict_roundtrip():
    lat = SpaceTimeLattice(origin=(-3.0, -3.0, -3.0), extents=(6.0, 6.0, 6.0),
                           n_x=8, n_y=8, n_z=8, times=(0.0, 1.5))
    again = SpaceTimeLattice.from_dict(lat.to_dict())
    assert again == lat


def test_cube_lattice_default_side():
    lat = cube_lattice(k0=2.0, n=16)
    side = 8.0 * 2.0 * np.pi / 2.0
    assert lat.extents == (side,) * 3
    assert lat.origin == (-side / 2,) * 3
    assert lat.axis(0)[0] == pytest.approx(-side / 2)


def test_synthesis_matches_direct_sum():
    _, v, lattice = tiny_setup()
    for time in (0.0, 0.3):
        snap = synthesize_fields(v, lattice, time=time, chunk=7)
        A, E, dA = direct_fields(v, lattice, time)
        np.testing.assert_allclose(snap.A, A, atol=1e-13 * np.abs(A).max())
        np.testing.assert_allclose(snap.E, E, atol=1e-13 * np.abs(E).max())
        np.testing.assert_allclose(snap.dA, dA, atol=1e-13 * np.abs(dA).max())
        curl = np.stack(
            [
                dA[..., 1, 2] - dA[..., 2, 1],
                dA[..., 2, 0] - dA[..., 0, 2],
                dA[..., 0, 1] - dA[..., 1, 0],
            ],
            axis=-1,
        )
        np.testing.assert_allclose(snap.B, curl, atol=1e-13 * np.abs(curl).max())


def test_electric_field_is_time_derivative():
    # E = dA/dx0 with x0 = -t, so E(0) = -(A(dt) - A(-dt)) / (2 dt) + O(dt^2)
    _, v, lattice = tiny_setup()
    dt = 1e-4
    a_plus = synthesize_fields(v, lattice, time=dt).A
    a_minus = synthesize_fields(v, lattice, time=-dt).A
    e_zero = synthesize_fields(v, lattice, time=0.0).E
    fd = -(a_plus - a_minus) / (2.0 * dt)
    np.testing.assert_allclose(fd, e_zero, atol=1e-7 * np.abs(e_zero).max())


def test_divergence_vanishes_for_transverse_states():
    _, v, lattice = tiny_setup()
    snap = synthesize_fields(v, lattice)
    assert divergence_residual(snap) < 1e-12

    raw = np.einsum("nc,n->nc", v.grid.khat, np.exp(-v.grid.k))
    bad = WaveFunction(v.grid, raw.astype(complex), check=False)
    snap_bad = synthesize_fields(bad, lattice)
    assert divergence_residual(snap_bad) > 0.1


def test_aliasing_spacing_rejected():
    grid = build_grid(GridSpec(n_k=2, k_min=0.8, k_max=1.2, n_theta=4, n_phi=5))
    v = random_state(grid, seed=3)
    # spacing 5.0 > pi / 1.2, violates the sampling bound
    lat = SpaceTimeLattice(origin=(-5.0, -5.0, -5.0), extents=(10.0, 10.0, 10.0),
                           n_x=3, n_y=8, n_z=8)
    with pytest.raises(ValueError, match="alias"):
        synthesize_fields(v, lat)


def com_setup():
    grid = build_grid(GridSpec(n_k=20, k_min=0.25, k_max=1.75, n_theta=28, n_phi=44))
    spec = ModeSpec(
        kind="j3_w_eigenstate", m=1, w=1,
        radial_profile={"k0": 1.0, "sigma_k": 0.25},
        theta_profile={"kind": "gaussian_in_theta", "theta0": 0.0,
                       "sigma_theta": 0.2},
    )
    v = build_mode(spec, grid)
    lattice = SpaceTimeLattice(origin=(-15.0,) * 3, extents=(30.0,) * 3,
                               n_x=26, n_y=26, n_z=26)
    return v, lattice


def test_com_crosscheck_localized_packet():
    # coarse end-to-end check; the acceptance suite runs the tight version
    v, lattice = com_setup()
    ks = k_space_com(v)
    rs = real_space_com(synthesize_fields(v, lattice))
    scale = max(abs(ks["P0"]), 1.0)
    for key in ("P0", "P", "J", "L", "S"):
        a = np.atleast_1d(ks[key]).astype(float)
        b = np.atleast_1d(rs[key]).astype(float)
        for x, y in zip(a, b):
            assert abs(x - y) <= 5e-3 * max(abs(x), 1e-3 * scale)
    assert rs["P0"] > 0.0
    np.testing.assert_allclose(rs["J"], rs["L"] + rs["S"], rtol=0, atol=1e-12)


def test_com_time_invariance_coarse():
    v, lattice = com_setup()
    rs0 = real_space_com(synthesize_fields(v, lattice, time=0.0))
    rs1 = real_space_com(synthesize_fields(v, lattice, time=2.0))
    scale = max(abs(rs0["P0"]), 1.0)
    for key in ("P0", "P", "J", "L", "S"):
        a = np.atleast_1d(rs0[key]).astype(float)
        b = np.atleast_1d(rs1[key]).astype(float)
        assert np.max(np.abs(a - b)) < 5e-3 * scale


def test_com_convergence_shift_flags_undersized_box():
    v, lattice = com_setup()
    # box cut to a third of its converged size: large shift expected
    small = SpaceTimeLattice(origin=(-5.0,) * 3, extents=(10.0,) * 3,
                             n_x=10, n_y=10, n_z=10)
    assert com_convergence_shift(v, small, factor=1.6) > 1e-2
    with pytest.raises(ValueError):
        com_convergence_shift(v, lattice, factor=1.0)


def test_export_fields_roundtrip(tmp_path):
    _, v, lattice = tiny_setup()
    snap = synthesize_fields(v, lattice, time=0.2)
    path = str(tmp_path / "fields.bin")
    geometry = export_fields(snap, path)

    n_sites = lattice.n_x * lattice.n_y * lattice.n_z
    raw = np.fromfile(path, dtype="<f8").reshape(3, n_sites * 3, 2)
    for i, arr in enumerate((snap.A, snap.E, snap.B)):
        flat = raw[i, :, 0] + 1j * raw[i, :, 1]
        np.testing.assert_allclose(flat, arr.reshape(-1), rtol=0, atol=0)

    with open(path + ".geometry.json") as fh:
        sidecar = json.load(fh)
    assert sidecar["fields"] == ["A", "E", "B"]
    assert sidecar["lattice"]["n_x"] == lattice.n_x
    assert sidecar["time"] == pytest.approx(0.2)
    assert geometry["shape"] == [4, 3, 2, 3]


def test_export_slice(tmp_path):
    _, v, lattice = tiny_setup()
    snap = synthesize_fields(v, lattice)
    path = str(tmp_path / "slice.csv")
    export_slice(snap, path, field="E", iz=1)
    with open(path) as fh:
        header = fh.readline().strip()
    assert header.split(",")[:3] == ["x", "y", "z"]
    assert "re_E1" in header and "im_E3" in header
    table = np.loadtxt(path, delimiter=",", skiprows=1)
    assert table.shape == (lattice.n_x * lattice.n_y, 9)
    row = table[0]
    assert row[0] == pytest.approx(lattice.axis(0)[0])
    assert row[2] == pytest.approx(lattice.axis(2)[1])
    expect = snap.E[0, 0, 1]
    np.testing.assert_allclose(row[3::2], expect.real, atol=1e-15)
    np.testing.assert_allclose(row[4::2], expect.imag, atol=1e-15)

    with pytest.raises(ValueError):
        export_slice(snap, path, field="E", iz=99)
    with pytest.raises(ValueError):
        export_slice(snap, path, field="Q")
