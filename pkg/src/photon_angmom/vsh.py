"""Scalar and transverse vector spherical harmonics with grid transforms.

Scalar harmonics Y_lm use the orthonormal convention with the Condon-Shortley
phase, built from normalized associated Legendre recurrences (stable to
l of order 1000, no factorials).

The transverse vector harmonics are

    Y1_lm = (1/sqrt(l(l+1))) * (angular momentum operator) Y_lm
    Y2_lm = khat x Y1_lm

with l >= 1.  Y1 is evaluated through ladder-operator closed forms: with
c_pm(l, m) = sqrt(l(l+1) - m(m +- 1)) and N = sqrt(l(l+1)),

    (Y1)_x = (c_plus Y_{l,m+1} + c_minus Y_{l,m-1}) / (2 N)
    (Y1)_y = (c_plus Y_{l,m+1} - c_minus Y_{l,m-1}) / (2i N)
    (Y1)_z = m Y_lm / N

so no numerical differentiation appears anywhere.  Together the two
families form a complete orthonormal basis of the transverse subspace at
each point of the sphere.

Transforms (`analyze` / `synthesize`) map between grid samples and
coefficient tables over (a, l, m) with one radial profile per entry.  The
azimuthal part is handled by FFT and the polar part by Gauss-Legendre
sums, both exact for bandlimited content.
"""

from __future__ import annotations

import numpy as np

from .grid import WaveVectorGrid
from .wavefunction import WaveFunction

__all__ = [
    "VshExpansion",
    "scalar_ylm",
    "vsh_pair",
    "analyze",
    "synthesize",
    "legendre_normalized",
]


def _ladder(l, m, sign):
    """sqrt(l(l+1) - m(m+sign)) for sign = +-1; zero when the shift leaves |m|<=l."""
    val = l * (l + 1) - m * (m + sign)
    return np.sqrt(val) if val > 0 else 0.0


def legendre_normalized(l_max: int, x):
    """Normalized associated Legendre table P[l, m, i] at points x.

    P[l, m] carries the full spherical-harmonic normalization and
    Condon-Shortley sign, so Y_lm(theta, phi) = P[l, m](cos theta) e^{i m phi}
    for m >= 0.  Entries with m > l are zero.
    """
    x = np.asarray(x, dtype=float)
    if l_max < 0:
        raise ValueError("l_max must be >= 0")
    out = np.zeros((l_max + 1, l_max + 1) + x.shape)
    sx = np.sqrt(np.maximum(0.0, 1.0 - x * x))
    # diagonal: P_mm = (-1)^m sqrt((2m+1)/(4 pi) * (2m-1)!!/(2m)!!) (1-x^2)^{m/2}
    pmm = np.full(x.shape, 1.0 / np.sqrt(4.0 * np.pi))
    out[0, 0] = pmm
    for m in range(1, l_max + 1):
        pmm = -pmm * np.sqrt((2.0 * m + 1.0) / (2.0 * m)) * sx
        out[m, m] = pmm
    # first off-diagonal, then the three-term recurrence upward in l
    for m in range(0, l_max):
        out[m + 1, m] = x * np.sqrt(2.0 * m + 3.0) * out[m, m]
        for l in range(m + 2, l_max + 1):
            a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            out[l, m] = a * (x * out[l - 1, m] - b * out[l - 2, m])
    return out


def _legendre_cached(grid: WaveVectorGrid, l_max: int):
    """Legendre table on the grid's polar nodes, grown on demand."""
    entry = grid._cache.get("legendre")
    if entry is None or entry[0] < l_max:
        table = legendre_normalized(l_max, grid.x_nodes)
        grid._cache["legendre"] = (l_max, table)
        return table
    return entry[1]


def _assoc_at(table, l, m):
    """Signed-m lookup: Y_{l,m} = _assoc_at(...) * e^{i m phi}; zero if |m| > l."""
    if abs(m) > l:
        return None
    if m >= 0:
        return table[l, m]
    # Y_{l,-m} = (-1)^m conj(Y_{l,m}) transfers to the real prefactor
    return table[l, -m] if m % 2 == 0 else -table[l, -m]


def scalar_ylm(l: int, m: int, theta, phi):
    """Spherical harmonic Y_lm at angles theta in (0, pi), phi."""
    if abs(m) > l:
        raise ValueError(f"|m| = {abs(m)} exceeds l = {l}")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    table = legendre_normalized(l, np.cos(theta))
    return _assoc_at(table, l, m) * np.exp(1j * m * phi)


def vsh_pair(l: int, m: int, theta, phi):
    """Vector spherical harmonics (Y1, Y2) at angles, each shape (..., 3)."""
    if l < 1:
        raise ValueError("vector harmonics require l >= 1")
    if abs(m) > l:
        raise ValueError(f"|m| = {abs(m)} exceeds l = {l}")
    theta, phi = np.broadcast_arrays(
        np.asarray(theta, dtype=float), np.asarray(phi, dtype=float)
    )
    table = legendre_normalized(l, np.cos(theta))
    invn = 1.0 / np.sqrt(l * (l + 1.0))
    cp = _ladder(l, m, +1)
    cm = _ladder(l, m, -1)

    def term(mu, amp):
        q = _assoc_at(table, l, mu)
        if q is None or amp == 0.0:
            return np.zeros(theta.shape, dtype=complex)
        return amp * q * np.exp(1j * mu * phi)

    up = term(m + 1, cp)  # raises m, multiplies e^{i(m+1)phi}
    dn = term(m - 1, cm)
    zc = term(m, float(m))
    y1 = np.stack(
        [0.5 * (up + dn) * invn, -0.5j * (up - dn) * invn, zc * invn], axis=-1
    )
    st = np.sin(theta)
    khat = np.stack(
        [st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1
    ).astype(complex)
    y2 = np.cross(khat, y1)
    return y1, y2


class VshExpansion:
    """Coefficient table c[a, l, m](k) over a contiguous azimuthal window.

    Storage: coeffs has shape (2, n_k, l_max+1, n_m) indexed by
    (a-1, radial node, l, m - m_min).  The l = 0 row and all |m| > l slots
    are structurally zero; transverse fields have no l = 0 content.
    """

    def __init__(self, grid: WaveVectorGrid, l_max: int, m_min: int, m_max: int, coeffs):
        if l_max < 1:
            raise ValueError("l_max must be >= 1")
        if m_min > m_max:
            raise ValueError("empty azimuthal window")
        n_m = m_max - m_min + 1
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != (2, grid.spec.n_k, l_max + 1, n_m):
            raise ValueError("coefficient array shape mismatch")
        self.grid = grid
        self.l_max = l_max
        self.m_min = m_min
        self.m_max = m_max
        self.coeffs = coeffs

    @classmethod
    def zero(cls, grid, l_max, m_min=None, m_max=None):
        if m_min is None:
            m_min, m_max = -l_max, l_max
        n_m = m_max - m_min + 1
        return cls(
            grid, l_max, m_min, m_max,
            np.zeros((2, grid.spec.n_k, l_max + 1, n_m), dtype=complex),
        )

    @classmethod
    def single(cls, grid, l_max, a, l, m, radial):
        """Expansion with one (a, l, m) entry carrying the given radial profile."""
        if a not in (1, 2):
            raise ValueError("family a must be 1 or 2")
        if not (1 <= l <= l_max) or abs(m) > l:
            raise ValueError("invalid (l, m) for this l_max")
        e = cls.zero(grid, l_max)
        e.coeffs[a - 1, :, l, m - e.m_min] = np.asarray(radial, dtype=complex)
        return e

    @property
    def m_values(self):
        return np.arange(self.m_min, self.m_max + 1)

    def coefficient(self, a, l, m):
        """Radial profile of one (a, l, m) entry (zero array if outside the window)."""
        if a not in (1, 2):
            raise ValueError("family a must be 1 or 2")
        if l < 1 or l > self.l_max or abs(m) > l or not (self.m_min <= m <= self.m_max):
            return np.zeros(self.grid.spec.n_k, dtype=complex)
        return self.coeffs[a - 1, :, l, m - self.m_min]

    def norm_squared(self) -> float:
        """Parseval sum: radial integral of all |coefficient|^2."""
        dens = np.sum(np.abs(self.coeffs) ** 2, axis=(0, 2, 3))
        return float(np.sum(self.grid.radial_weights * dens))

    def copy(self):
        return VshExpansion(
            self.grid, self.l_max, self.m_min, self.m_max, self.coeffs.copy()
        )

    def _window_like(self, m_min, m_max):
        """Same coefficients embedded in a wider window."""
        if m_min > self.m_min or m_max < self.m_max:
            raise ValueError("target window does not contain current window")
        out = VshExpansion.zero(self.grid, self.l_max, m_min, m_max)
        lo = self.m_min - m_min
        out.coeffs[:, :, :, lo : lo + self.coeffs.shape[3]] = self.coeffs
        return out

    def __add__(self, other):
        if other.grid is not self.grid or other.l_max != self.l_max:
            raise ValueError("expansions are not compatible")
        m_min = min(self.m_min, other.m_min)
        m_max = max(self.m_max, other.m_max)
        a = self._window_like(m_min, m_max)
        b = other._window_like(m_min, m_max)
        a.coeffs += b.coeffs
        return a

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, scalar):
        return VshExpansion(
            self.grid, self.l_max, self.m_min, self.m_max, self.coeffs * scalar
        )

    __rmul__ = __mul__

    def to_rows(self):
        """JSON-ready list of {"a", "l", "m", "radial": [[re, im], ...]}."""
        rows = []
        for a in (1, 2):
            for l in range(1, self.l_max + 1):
                for m in range(max(-l, self.m_min), min(l, self.m_max) + 1):
                    rad = self.coeffs[a - 1, :, l, m - self.m_min]
                    if np.all(rad == 0.0):
                        continue
                    rows.append(
                        {
                            "a": a,
                            "l": l,
                            "m": m,
                            "radial": [[float(z.real), float(z.imag)] for z in rad],
                        }
                    )
        return rows


def _azimuthal_moments(grid, values):
    """Azimuthal integrals F_mu = int dphi e^{-i mu phi} g per (k, theta) line.

    Returns the FFT array (n_k, n_theta, n_phi, ...) scaled by 2 pi / n_phi;
    the bin for signed order mu is mu % n_phi.
    """
    cube = values.reshape(grid.shape + values.shape[1:])
    return np.fft.fft(cube, axis=2) * (2.0 * np.pi / grid.spec.n_phi)


def analyze(v: WaveFunction, l_max: int, m_window=None) -> VshExpansion:
    """Project grid samples onto the vector harmonics up to l_max.

    With the default full window m in [-l_max, l_max] the grid must satisfy
    n_theta >= l_max + 1 and n_phi >= 2 l_max + 1.  A narrower contiguous
    window (m_lo, m_hi) may be given for azimuthally bandlimited states;
    the caller is then responsible for the azimuthal content actually
    fitting the grid (the transform itself stays exact in that case even
    on coarse azimuthal grids).
    """
    grid = v.grid
    spec = grid.spec
    if l_max < 1:
        raise ValueError("l_max must be >= 1")
    if spec.n_theta < l_max + 1:
        raise ValueError(
            f"insufficient angular resolution: n_theta = {spec.n_theta} "
            f"< l_max + 1 = {l_max + 1}"
        )
    if m_window is None:
        if spec.n_phi < 2 * l_max + 1:
            raise ValueError(
                f"insufficient angular resolution: n_phi = {spec.n_phi} "
                f"< 2 l_max + 1 = {2 * l_max + 1}"
            )
        m_min, m_max = -l_max, l_max
    else:
        m_min, m_max = int(m_window[0]), int(m_window[1])
        if m_min > m_max or m_min < -l_max or m_max > l_max:
            raise ValueError("azimuthal window must lie within [-l_max, l_max]")

    table = _legendre_cached(grid, l_max)
    n_phi = spec.n_phi
    vals = v.values.reshape(grid.shape + (3,))
    fp = _azimuthal_moments(grid, (vals[..., 0] + 1j * vals[..., 1]).reshape(-1))
    fm = _azimuthal_moments(grid, (vals[..., 0] - 1j * vals[..., 1]).reshape(-1))
    fz = _azimuthal_moments(grid, vals[..., 2].reshape(-1))
    # second family reads the rotated field v x khat
    cross = np.cross(v.values, grid.khat.astype(complex)).reshape(grid.shape + (3,))
    gp = _azimuthal_moments(grid, (cross[..., 0] + 1j * cross[..., 1]).reshape(-1))
    gm = _azimuthal_moments(grid, (cross[..., 0] - 1j * cross[..., 1]).reshape(-1))
    gz = _azimuthal_moments(grid, cross[..., 2].reshape(-1))

    wt = grid.x_weights
    out = VshExpansion.zero(grid, l_max, m_min, m_max)

    def polar_dot(q, moments, mu):
        # sum over theta of w_th q(x_th) F_mu -> per radial node
        return (moments[:, :, mu % n_phi] * (wt * q)[None, :]).sum(axis=1)

    for l in range(1, l_max + 1):
        invn = 1.0 / np.sqrt(l * (l + 1.0))
        for m in range(max(-l, m_min), min(l, m_max) + 1):
            cp = _ladder(l, m, +1)
            cm = _ladder(l, m, -1)
            qp = _assoc_at(table, l, m + 1)
            qm = _assoc_at(table, l, m - 1)
            qz = _assoc_at(table, l, m)
            for fam, (hp, hm, hz) in enumerate(((fp, fm, fz), (gp, gm, gz))):
                acc = np.zeros(spec.n_k, dtype=complex)
                if qp is not None and cp != 0.0:
                    acc += 0.5 * cp * polar_dot(qp, hp, m + 1)
                if qm is not None and cm != 0.0:
                    acc += 0.5 * cm * polar_dot(qm, hm, m - 1)
                if m != 0:
                    acc += m * polar_dot(qz, hz, m)
                out.coeffs[fam, :, l, m - m_min] = invn * acc
    return out


def synthesize(e: VshExpansion, grid: WaveVectorGrid | None = None) -> WaveFunction:
    """Sum the expansion back to grid samples (transverse by construction)."""
    if grid is None:
        grid = e.grid
    elif grid.spec != e.grid.spec:
        raise ValueError("expansion was built on an incompatible grid")
    spec = grid.spec
    n_phi = spec.n_phi
    table = _legendre_cached(grid, e.l_max)

    # channel accumulators per family: (n_k, n_theta, azimuthal bin)
    shape = (spec.n_k, spec.n_theta, n_phi)
    chans = {
        fam: [np.zeros(shape, dtype=complex) for _ in range(3)] for fam in (0, 1)
    }
    for l in range(1, e.l_max + 1):
        invn = 1.0 / np.sqrt(l * (l + 1.0))
        for m in range(max(-l, e.m_min), min(l, e.m_max) + 1):
            cp = _ladder(l, m, +1)
            cm = _ladder(l, m, -1)
            qp = _assoc_at(table, l, m + 1)
            qm = _assoc_at(table, l, m - 1)
            qz = _assoc_at(table, l, m)
            for fam in (0, 1):
                rad = e.coeffs[fam, :, l, m - e.m_min]
                if np.all(rad == 0.0):
                    continue
                plus, minus, zc = chans[fam]
                block = invn * rad[:, None]
                if qp is not None and cp != 0.0:
                    plus[:, :, (m + 1) % n_phi] += cp * block * qp[None, :]
                if qm is not None and cm != 0.0:
                    minus[:, :, (m - 1) % n_phi] += cm * block * qm[None, :]
                if m != 0:
                    zc[:, :, m % n_phi] += m * block * qz[None, :]

    def assemble(fam):
        plus, minus, zc = chans[fam]
        # bins hold e^{i mu phi} amplitudes; inverse FFT evaluates at the nodes
        p = np.fft.ifft(plus, axis=2) * n_phi
        q = np.fft.ifft(minus, axis=2) * n_phi
        z = np.fft.ifft(zc, axis=2) * n_phi
        vx = 0.5 * (p + q)
        vy = -0.5j * (p - q)
        return np.stack([vx, vy, z], axis=-1).reshape(-1, 3)

    vals = assemble(0)
    w2 = assemble(1)
    if np.any(w2):
        vals = vals + np.cross(grid.khat.astype(complex), w2)
    return WaveFunction(grid, vals, check=False)
