"""Spherical wave-vector grids with product Gauss quadrature.

The grid discretizes momentum space in spherical coordinates: Gauss-Legendre
nodes in the radial variable k on [k_min, k_max] (the k^2 Jacobian is folded
into the weights), Gauss-Legendre nodes in x = cos(theta) on (-1, 1), and a
uniform trapezoid rule in the azimuth phi with weight 2*pi/n_phi.  Polar nodes
are strictly interior, so theta = 0 and theta = pi never appear and the
circular polarization basis is single valued on every node.

Node order is radial-major: index = (ik * n_theta + itheta) * n_phi + iphi.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "GridSpec",
    "WaveVectorGrid",
    "build_grid",
    "integrate",
    "angular_integrate",
]


@dataclass(frozen=True)
class GridSpec:
    """Grid resolution and radial support.

    Parameters
    ----------
    n_k : int
        Number of radial Gauss-Legendre nodes, at least 1.
    k_min, k_max : float
        Radial support, 0 < k_min < k_max.  Keeping k_min positive excludes
        the singular point k = 0 where helicity vectors are undefined.
    n_theta : int
        Number of polar nodes (Gauss-Legendre in cos(theta)), at least 2.
    n_phi : int
        Number of uniform azimuthal nodes, at least 4.
    """

    n_k: int
    k_min: float
    k_max: float
    n_theta: int
    n_phi: int

    def __post_init__(self):
        if self.n_k < 1:
            raise ValueError("n_k must be >= 1")
        if self.n_theta < 2:
            raise ValueError("n_theta must be >= 2")
        if self.n_phi < 4:
            raise ValueError("n_phi must be >= 4")
        if not (0.0 < self.k_min < self.k_max):
            raise ValueError("require 0 < k_min < k_max")

    def to_dict(self):
        return {
            "n_k": self.n_k,
            "k_min": self.k_min,
            "k_max": self.k_max,
            "n_theta": self.n_theta,
            "n_phi": self.n_phi,
        }

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(
                n_k=int(d["n_k"]),
                k_min=float(d["k_min"]),
                k_max=float(d["k_max"]),
                n_theta=int(d["n_theta"]),
                n_phi=int(d["n_phi"]),
            )
        except KeyError as err:
            raise KeyError(f"grid spec missing key {err.args[0]!r}") from None


class WaveVectorGrid:
    """Quadrature nodes and weights for one GridSpec.

    Attributes
    ----------
    spec : GridSpec
    k, theta, phi : ndarray, shape (n_nodes,)
        Spherical coordinates of every node, radial-major order.
    kvec : ndarray, shape (n_nodes, 3)
        Cartesian wave vectors.
    khat : ndarray, shape (n_nodes, 3)
        Unit directions.
    weights : ndarray, shape (n_nodes,)
        Full measure weights, sum(weights * f) ~ int d^3k f.
    x_nodes, x_weights : ndarray, shape (n_theta,)
        The polar Gauss-Legendre rule in x = cos(theta).
    theta_nodes, phi_nodes : ndarray
        The shared angular subgrid, one copy per radial shell.
    angular_weights : ndarray, shape (n_theta * n_phi,)
        Solid-angle weights; they sum to 4*pi.
    radial_weights : ndarray, shape (n_k,)
        Radial weights including the k^2 Jacobian.
    """

    def __init__(self, spec: GridSpec):
        self.spec = spec
        xr, wr = np.polynomial.legendre.leggauss(spec.n_k)
        half = 0.5 * (spec.k_max - spec.k_min)
        self.k_nodes = spec.k_min + half * (xr + 1.0)
        self.radial_weights = half * wr * self.k_nodes**2

        xt, wt = np.polynomial.legendre.leggauss(spec.n_theta)
        # leggauss returns ascending x, i.e. descending theta
        self.x_nodes = xt
        self.x_weights = wt
        self.theta_nodes = np.arccos(xt)
        self.phi_nodes = 2.0 * np.pi * np.arange(spec.n_phi) / spec.n_phi
        phi_w = 2.0 * np.pi / spec.n_phi
        self.angular_weights = np.repeat(wt, spec.n_phi) * phi_w

        K, TH, PH = np.meshgrid(
            self.k_nodes, self.theta_nodes, self.phi_nodes, indexing="ij"
        )
        self.k = K.ravel()
        self.theta = TH.ravel()
        self.phi = PH.ravel()
        W = (
            self.radial_weights[:, None, None]
            * wt[None, :, None]
            * np.full(spec.n_phi, phi_w)[None, None, :]
        )
        self.weights = W.ravel()

        st = np.sin(self.theta)
        self.khat = np.stack(
            [st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)],
            axis=1,
        )
        self.kvec = self.k[:, None] * self.khat
        self.n_nodes = self.k.size
        self.shape = (spec.n_k, spec.n_theta, spec.n_phi)
        self._cache = {}

    def node_fields(self, values):
        """Reshape flat node samples to (n_k, n_theta, n_phi, ...)."""
        values = np.asarray(values)
        return values.reshape(self.shape + values.shape[1:])


def build_grid(spec: GridSpec) -> WaveVectorGrid:
    """Construct the quadrature grid for a GridSpec."""
    return WaveVectorGrid(spec)


def integrate(grid: WaveVectorGrid, samples) -> complex:
    """Quadrature of node samples over d^3k.

    `samples` has shape (n_nodes,) for scalar fields or (n_nodes, c) for
    vector fields, in which case the components are summed as well.
    """
    samples = np.asarray(samples)
    if samples.shape[0] != grid.n_nodes:
        raise ValueError("sample array does not match grid node count")
    if samples.ndim == 1:
        return np.sum(grid.weights * samples)
    return np.sum(grid.weights[:, None] * samples)


def angular_integrate(grid: WaveVectorGrid, samples):
    """Integrate node samples over the sphere only, one value per radial shell.

    Returns an array of shape (n_k,) for scalar samples, or (n_k, c) when
    `samples` has trailing component axes.
    """
    samples = np.asarray(samples)
    if samples.shape[0] != grid.n_nodes:
        raise ValueError("sample array does not match grid node count")
    n_ang = grid.spec.n_theta * grid.spec.n_phi
    resh = samples.reshape((grid.spec.n_k, n_ang) + samples.shape[1:])
    if samples.ndim == 1:
        return resh @ grid.angular_weights
    return np.einsum("ka...,a->k...", resh, grid.angular_weights)
