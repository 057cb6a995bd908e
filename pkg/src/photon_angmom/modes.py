"""Named mode families: J3-helicity eigenstates, spin-coherent wave packets
concentrated about a direction, and paraxial vector Laguerre-Gauss modes.

All builders sample closed-form amplitudes on a WaveVectorGrid and return
normalized states; nothing here differentiates or iterates.

J3-W eigenstates:   v(k) = a(k, theta) e^{i (m - w) phi} eps^(w)(khat)
with a = radial Gaussian times a theta profile.  Exact J3 and W eigenstates
for any profile; their S3 dispersion is controlled by the distribution p(x)
of x = cos(theta) and never vanishes.

Spin wave packets: a surface delta concentrated at khat = w s is replaced
by the von Mises-Fisher kernel exp(kappa khat . (w s)).  The carrier
polarization is eps^(+)(s); by default it is projected onto the local
helicity-w line at each node (the packet is then an exact helicity
eigenstate and <S> -> s with error O(1/kappa)); `carrier="projected"`
keeps the literal transverse projection of eps^(+)(s) instead, which mixes
a O(1/kappa^2) opposite-helicity tail into W.

Vector LG modes: the paraxial spinors

    w = +1:  (1,  i, -theta e^{+i phi}) / sqrt(2) * phi_{m-1, p}
    w = -1:  (i,  1, -i theta e^{-i phi}) / sqrt(2) * phi_{m+1, p}

times a narrow radial carrier at k_fixed, restricted to the forward
hemisphere theta <= pi/2 (the scalar profile depends on k only through
rho = k sin(theta), so without the cutoff an equally weighted backward
image with reversed helicity would appear; at w0 k_fixed >= 20 the profile
at the equator is below e^{-100} and the restriction changes nothing
numerically).  Exact J3 eigenstates with eigenvalue m; W and transversality
residuals vanish quadratically in 1/(w0 k_fixed).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from .grid import WaveVectorGrid
from .polarization import eps_plus, helicity_basis
from .wavefunction import WaveFunction, normalize

__all__ = [
    "ModeSpec",
    "ThetaDistribution",
    "build_mode",
    "build_j3_w_eigenstate",
    "build_sam_wavepacket",
    "build_vector_lg",
    "scalar_lg",
    "theta_distribution",
]

_KINDS = ("j3_w_eigenstate", "sam_wavepacket", "vector_lg")
PARAXIAL_WARN_THRESHOLD = 20.0


@dataclass
class ModeSpec:
    """Declarative mode description; every free function is pinned down.

    Fields are interpreted per kind:

    j3_w_eigenstate: m, w, radial_profile {k0, sigma_k},
        theta_profile {kind: gaussian_in_theta, theta0, sigma_theta}
        or {kind: uniform_band, x_lo, x_hi}.
    sam_wavepacket: w, s_direction, kappa, radial_profile,
        carrier in {helicity, projected}.
    vector_lg: m, w, p, w0, k_fixed, radial_profile.sigma_k
        (defaults to k_fixed / 50).
    """

    kind: str
    m: int = 0
    w: int = 1
    p: int = 0
    s_direction: tuple = (0.0, 0.0, 1.0)
    kappa: float = 100.0
    radial_profile: dict = field(default_factory=lambda: {"k0": 1.0, "sigma_k": 0.1})
    theta_profile: dict = field(default_factory=lambda: {"kind": "uniform_band"})
    w0: float = 25.0
    k_fixed: float = 1.0
    carrier: str = "helicity"

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown mode kind {self.kind!r}")
        if self.w not in (1, -1):
            raise ValueError("helicity w must be +1 or -1")
        if self.p < 0:
            raise ValueError("radial index p must be >= 0")
        if self.kind == "sam_wavepacket":
            if self.kappa <= 0.0:
                raise ValueError("kappa must be positive")
            s = np.asarray(self.s_direction, dtype=float)
            if np.linalg.norm(s) == 0.0:
                raise ValueError("s_direction must be a nonzero vector")
            if self.carrier not in ("helicity", "projected"):
                raise ValueError("carrier must be 'helicity' or 'projected'")
        if self.kind in ("j3_w_eigenstate", "sam_wavepacket"):
            k0 = float(self.radial_profile.get("k0", 0.0))
            sk = float(self.radial_profile.get("sigma_k", 0.0))
            if not (0.0 < sk < k0):
                raise ValueError("radial profile requires 0 < sigma_k < k0")
        if self.kind == "j3_w_eigenstate":
            kind = self.theta_profile.get("kind")
            if kind not in ("gaussian_in_theta", "uniform_band"):
                raise ValueError(f"unknown theta profile kind {kind!r}")
        if self.kind == "vector_lg":
            if self.w0 <= 0.0 or self.k_fixed <= 0.0:
                raise ValueError("vector_lg requires positive w0 and k_fixed")
            if self.w0 * self.k_fixed <= 2.0 * np.pi:
                raise ValueError(
                    "vector_lg is only meaningful for w0 * k_fixed well above 2 pi"
                )

    def to_dict(self):
        return {
            "kind": self.kind,
            "m": self.m,
            "w": self.w,
            "p": self.p,
            "s_direction": list(self.s_direction),
            "kappa": self.kappa,
            "radial_profile": dict(self.radial_profile),
            "theta_profile": dict(self.theta_profile),
            "w0": self.w0,
            "k_fixed": self.k_fixed,
            "carrier": self.carrier,
        }

    @classmethod
    def from_dict(cls, d):
        allowed = {
            "kind", "m", "w", "p", "s_direction", "kappa", "radial_profile",
            "theta_profile", "w0", "k_fixed", "carrier",
        }
        unknown = set(d) - allowed
        if unknown:
            raise KeyError(f"unknown mode key {sorted(unknown)[0]!r}")
        if "kind" not in d:
            raise KeyError("mode spec missing key 'kind'")
        kwargs = {k: d[k] for k in d}
        kwargs["kind"] = str(kwargs["kind"])
        for intkey in ("m", "w", "p"):
            if intkey in kwargs:
                kwargs[intkey] = int(kwargs[intkey])
        if "s_direction" in kwargs:
            kwargs["s_direction"] = tuple(float(c) for c in kwargs["s_direction"])
        return cls(**kwargs)


def _radial_gaussian(k, k0, sigma_k):
    # amplitude profile; |g|^2 is a Gaussian density of std sigma_k
    return np.exp(-((k - k0) ** 2) / (4.0 * sigma_k**2))


def _theta_amplitude(spec: ModeSpec, theta):
    prof = spec.theta_profile
    kind = prof.get("kind")
    if kind == "gaussian_in_theta":
        theta0 = float(prof.get("theta0", 0.0))
        sigma = float(prof.get("sigma_theta", 0.3))
        if sigma <= 0.0:
            raise ValueError("sigma_theta must be positive")
        return np.exp(-((theta - theta0) ** 2) / (4.0 * sigma**2))
    if kind == "uniform_band":
        x_lo = float(prof.get("x_lo", -1.0))
        x_hi = float(prof.get("x_hi", 1.0))
        if not (-1.0 <= x_lo < x_hi <= 1.0):
            raise ValueError("uniform band requires -1 <= x_lo < x_hi <= 1")
        x = np.cos(theta)
        return ((x >= x_lo) & (x <= x_hi)).astype(float)
    raise ValueError(f"unknown theta profile kind {kind!r}")


def build_j3_w_eigenstate(spec: ModeSpec, grid: WaveVectorGrid) -> WaveFunction:
    """Exact simultaneous J3 (eigenvalue m) and W (eigenvalue w) eigenstate."""
    if spec.kind != "j3_w_eigenstate":
        raise ValueError("spec.kind must be 'j3_w_eigenstate'")
    m, w = spec.m, spec.w
    max_order = max(abs(m - w), abs(m + w))
    if grid.spec.n_phi < 2 * max_order + 2:
        raise ValueError(
            f"n_phi = {grid.spec.n_phi} cannot carry azimuthal order {max_order}"
        )
    ep, em = helicity_basis(grid.khat)
    pol = ep if w == 1 else em
    amp = (
        _radial_gaussian(grid.k, spec.radial_profile["k0"], spec.radial_profile["sigma_k"])
        * _theta_amplitude(spec, grid.theta)
        * np.exp(1j * (m - w) * grid.phi)
    )
    return normalize(WaveFunction(grid, amp[:, None] * pol, check=False))


@dataclass
class ThetaDistribution:
    """Probability density of x = cos(theta) carried by a J3-W eigenstate.

    Sampled on the grid's polar nodes; moments use the matching
    Gauss-Legendre weights.  The helicity label w enters only the first
    moment: S_l = khat_l W gives <S> = w <x> zhat, while the second
    moments carry w^2 = 1.
    """

    x: np.ndarray
    weights: np.ndarray
    p: np.ndarray
    w: int = 1

    def moment(self, f) -> float:
        return float(np.sum(self.weights * self.p * f(self.x)))

    @property
    def mean_x(self) -> float:
        return self.moment(lambda x: x)

    @property
    def mean_x2(self) -> float:
        return self.moment(lambda x: x * x)

    def sam_expectation(self):
        """Predicted <S> = w <x> zhat (hbar units)."""
        return np.array([0.0, 0.0, self.w * self.mean_x])

    def sam_second_moments(self):
        """Predicted diag(<1-x^2>/2, <1-x^2>/2, <x^2>) (hbar^2 units)."""
        x2 = self.mean_x2
        t = 0.5 * (1.0 - x2)
        return np.diag([t, t, x2])

    def sam_variance(self):
        mat = self.sam_second_moments()
        s = self.sam_expectation()
        return mat - np.outer(s, s)


def theta_distribution(spec: ModeSpec, grid: WaveVectorGrid) -> ThetaDistribution:
    """Collapse |a(k, theta)|^2 over the radial direction onto p(x)."""
    if spec.kind != "j3_w_eigenstate":
        raise ValueError("theta_distribution applies to j3_w_eigenstate specs")
    g2 = _radial_gaussian(
        grid.k_nodes, spec.radial_profile["k0"], spec.radial_profile["sigma_k"]
    ) ** 2
    h2 = np.abs(_theta_amplitude(spec, grid.theta_nodes)) ** 2
    radial = float(np.sum(grid.radial_weights * g2))
    p = radial * h2
    total = float(np.sum(grid.x_weights * p))
    if total <= 0.0:
        raise ValueError("theta profile vanishes on the grid")
    p /= total
    dist = ThetaDistribution(
        x=grid.x_nodes.copy(), weights=grid.x_weights.copy(), p=p, w=spec.w
    )
    if abs(np.sum(dist.weights * dist.p) - 1.0) > 1e-10:
        raise AssertionError("p(x) failed to normalize")
    return dist


def build_sam_wavepacket(spec: ModeSpec, grid: WaveVectorGrid) -> WaveFunction:
    """Normalizable packet concentrated at khat = w s, carrier eps^(+)(s)."""
    if spec.kind != "sam_wavepacket":
        raise ValueError("spec.kind must be 'sam_wavepacket'")
    s = np.asarray(spec.s_direction, dtype=float)
    s = s / np.linalg.norm(s)
    carrier_vec = eps_plus(s)  # raises at the excluded theta = pi
    n = spec.w * s
    kernel = np.exp(spec.kappa * (grid.khat @ n - 1.0))
    g = _radial_gaussian(
        grid.k, spec.radial_profile["k0"], spec.radial_profile["sigma_k"]
    )
    if spec.carrier == "helicity":
        ep, em = helicity_basis(grid.khat)
        pol = ep if spec.w == 1 else em
        amp = np.einsum("nc,c->n", np.conj(pol), carrier_vec)
        vals = (g * kernel * amp)[:, None] * pol
    else:
        lon = grid.khat @ carrier_vec
        proj = carrier_vec[None, :] - lon[:, None] * grid.khat
        vals = (g * kernel)[:, None] * proj
    return normalize(WaveFunction(grid, vals, check=False))


def scalar_lg(m: int, p: int, w0: float, rho, phi):
    """Transverse-plane Laguerre-Gauss mode phi_{m,p}(rho, phi), unit L2 norm.

    Includes the (i w0 rho / sqrt 2)^{|m|} phase convention; the radial
    argument of the generalized Laguerre polynomial is u = w0^2 rho^2 / 2.
    """
    if p < 0:
        raise ValueError("radial index p must be >= 0")
    rho = np.asarray(rho, dtype=float)
    phi = np.asarray(phi, dtype=float)
    am = abs(m)
    u = 0.5 * w0 * w0 * rho * rho
    norm_factor = (w0 / np.sqrt(2.0 * np.pi)) * np.exp(
        0.5 * (gammaln(p + 1.0) - gammaln(p + am + 1.0))
    )
    radial = (w0 * rho / np.sqrt(2.0)) ** am * eval_genlaguerre(p, am, u) * np.exp(-0.5 * u)
    return norm_factor * (1j**am) * radial * np.exp(1j * m * phi)


def build_vector_lg(spec: ModeSpec, grid: WaveVectorGrid) -> WaveFunction:
    """Paraxial vector LG mode; exact J3 eigenvalue m, approximate helicity w."""
    if spec.kind != "vector_lg":
        raise ValueError("spec.kind must be 'vector_lg'")
    wk = spec.w0 * spec.k_fixed
    if wk < PARAXIAL_WARN_THRESHOLD:
        warnings.warn(
            f"w0 * k_fixed = {wk:.3g} is below {PARAXIAL_WARN_THRESHOLD}; "
            "paraxial error terms are not small",
            stacklevel=2,
        )
    scalar_m = spec.m - spec.w
    theta = grid.theta
    phi = grid.phi
    rho = grid.k * np.sin(theta)
    profile = scalar_lg(scalar_m, spec.p, spec.w0, rho, phi)
    sigma_k = float(spec.radial_profile.get("sigma_k", spec.k_fixed / 50.0))
    carrier = _radial_gaussian(grid.k, spec.k_fixed, sigma_k)
    forward = (theta <= 0.5 * np.pi).astype(float)
    amp = profile * carrier * forward / np.sqrt(2.0)

    vals = np.zeros((grid.n_nodes, 3), dtype=complex)
    if spec.w == 1:
        vals[:, 0] = amp
        vals[:, 1] = 1j * amp
        vals[:, 2] = -theta * np.exp(1j * phi) * amp
    else:
        vals[:, 0] = 1j * amp
        vals[:, 1] = amp
        vals[:, 2] = -1j * theta * np.exp(-1j * phi) * amp
    return normalize(WaveFunction(grid, vals, check=False))


def build_mode(spec: ModeSpec, grid: WaveVectorGrid) -> WaveFunction:
    """Dispatch on spec.kind."""
    builder = {
        "j3_w_eigenstate": build_j3_w_eigenstate,
        "sam_wavepacket": build_sam_wavepacket,
        "vector_lg": build_vector_lg,
    }[spec.kind]
    return builder(spec, grid)
