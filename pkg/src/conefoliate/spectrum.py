"""Spectrum of the link operator on Sigma = sqrt(p/(n-1))S^p x sqrt(q/(n-1))S^q.

Product harmonics phi_{j,k} diagonalize Delta_Sigma; the Jacobi link operator
Delta_Sigma + (n-1) has eigenvalues -mu with mu = nu_j^p + nu_k^q - (n-1).
Each mode carries the indicial roots gamma^{+-} of the radial equation
r^2 a'' + (n-1) r a' - mu a = 0.

Only the zonal (axisymmetric, k = 1) eigenfunctions are realized numerically,
via the Gegenbauer three-term recurrence on a Gauss grid in the polar angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import roots_gegenbauer

from .geometry import ConeParams

CLASS_DILATION = "dilation"
CLASS_TRANSLATION = "translation"
CLASS_ROTATION = "rotation"
CLASS_GRAPHICAL = "graphical"


def nu_exact(j: int, p: int, n: int) -> Fraction:
    """Eigenvalue (j-1)(n-1)(j+p-2)/p of the scaled S^p Laplacian, exact."""
    if j < 1:
        raise ValueError("mode index j must be >= 1")
    return Fraction((j - 1) * (n - 1) * (j + p - 2), p)


def nu(j: int, p: int, n: int) -> float:
    return float(nu_exact(j, p, n))


def _classify(j: int, k: int) -> str:
    if (j, k) == (1, 1):
        return CLASS_DILATION
    if (j, k) in ((1, 2), (2, 1)):
        return CLASS_TRANSLATION
    if (j, k) == (2, 2):
        return CLASS_ROTATION
    return CLASS_GRAPHICAL


@dataclass(frozen=True)
class Mode:
    """One product-harmonic mode (j, k) with its radial growth exponents."""

    j: int
    k: int
    nu_p: float
    nu_q: float
    mu: float
    gamma_plus: float
    gamma_minus: float
    klass: str
    mu_exact: Fraction = field(repr=False)
    index: int | None = None

    @property
    def graphical(self) -> bool:
        return self.klass == CLASS_GRAPHICAL

    def gamma_exact(self, cone: ConeParams):
        """(gamma+, gamma-) as Fractions when the discriminant is a perfect square."""
        disc = Fraction(cone.n - 2) ** 2 + 4 * self.mu_exact
        if disc < 0:
            return None
        root = _fraction_sqrt(disc)
        if root is None:
            return None
        b = Fraction(-(cone.n - 2))
        return ((b + root) / 2, (b - root) / 2)


def _fraction_sqrt(f: Fraction):
    if f < 0:
        return None
    num = math.isqrt(f.numerator)
    den = math.isqrt(f.denominator)
    if num * num == f.numerator and den * den == f.denominator:
        return Fraction(num, den)
    return None


def make_mode(j: int, k: int, cone: ConeParams, index: int | None = None) -> Mode:
    if j < 1 or k < 1:
        raise ValueError("mode indices must be >= 1")
    n = cone.n
    nup = nu_exact(j, cone.p, n)
    nuq = nu_exact(k, cone.q, n)
    mu = nup + nuq - (n - 1)
    disc = Fraction(n - 2) ** 2 + 4 * mu
    if disc < 0:
        raise ValueError(
            f"negative indicial discriminant for mode ({j},{k}) on ({cone.p},{cone.q})"
        )
    sq = math.sqrt(float(disc))
    gp = (-(n - 2) + sq) / 2.0
    gm = (-(n - 2) - sq) / 2.0
    return Mode(
        j=j,
        k=k,
        nu_p=float(nup),
        nu_q=float(nuq),
        mu=float(mu),
        gamma_plus=gp,
        gamma_minus=gm,
        klass=_classify(j, k),
        mu_exact=mu,
        index=index,
    )


def enumerate_modes(cone: ConeParams, mu_max: float) -> list[Mode]:
    """All modes with mu <= mu_max, sorted by (mu, j, k); index is the rank."""
    if not math.isfinite(mu_max):
        raise ValueError("mu_max must be finite")
    n = cone.n
    out = []
    j = 1
    while float(nu_exact(j, cone.p, n)) - (n - 1) <= mu_max:
        k = 1
        while True:
            mu = nu_exact(j, cone.p, n) + nu_exact(k, cone.q, n) - (n - 1)
            if float(mu) > mu_max:
                break
            out.append(make_mode(j, k, cone))
            k += 1
        j += 1
    out.sort(key=lambda m: (m.mu_exact, m.j, m.k))
    return [
        Mode(**{**m.__dict__, "index": i + 1}) for i, m in enumerate(out)
    ]


def gamma4_plus(cone: ConeParams) -> float:
    """Growth exponent of the lowest graphical mode (rank 4)."""
    jm = make_mode(3, 1, cone)
    km = make_mode(1, 3, cone)
    return min(jm.gamma_plus, km.gamma_plus)


def harmonic_multiplicity(j: int, p: int) -> int:
    """Dimension of degree-(j-1) spherical harmonics on S^p (reporting only)."""
    m = j - 1
    if m == 0:
        return 1
    return math.comb(m + p, p) - math.comb(m - 2 + p, p)


def sphere_area(m: int) -> float:
    """Surface area of the unit m-sphere."""
    return 2.0 * math.pi ** ((m + 1) / 2.0) / gamma_fn((m + 1) / 2.0)


def link_area(cone: ConeParams) -> float:
    return (
        cone.rho_p**cone.p
        * sphere_area(cone.p)
        * cone.rho_q**cone.q
        * sphere_area(cone.q)
    )


def _gegenbauer_table(kmax: int, lam: float, x: np.ndarray) -> np.ndarray:
    """C_k^lam(x) for k = 0..kmax by the three-term recurrence, shape (kmax+1, len(x))."""
    x = np.asarray(x, dtype=float)
    out = np.empty((kmax + 1, x.size))
    out[0] = 1.0
    if kmax >= 1:
        out[1] = 2.0 * lam * x
    for k in range(2, kmax + 1):
        out[k] = (2.0 * x * (k + lam - 1.0) * out[k - 1] - (k + 2.0 * lam - 2.0) * out[k - 2]) / k
    return out


class ZonalBasis:
    """L2(Sigma)-orthonormal zonal eigenfunctions on a Gauss-Gegenbauer theta grid.

    Nodes and weights integrate smooth zonal functions against the full link
    measure; phi[j] is the (j,1)-mode eigenfunction, positive at theta = 0.
    """

    def __init__(self, cone: ConeParams, n_theta: int, jmax: int | None = None):
        self.cone = cone
        self.n_theta = int(n_theta)
        self.jmax = int(jmax) if jmax is not None else self.n_theta
        if self.jmax > self.n_theta:
            raise ValueError("jmax cannot exceed the node count")
        lam = (cone.p - 1) / 2.0
        x, w = roots_gegenbauer(self.n_theta, lam)
        order = np.argsort(-x)  # theta increasing
        x, w = x[order], w[order]
        self.costheta = x
        self.theta = np.arccos(np.clip(x, -1.0, 1.0))
        # weight for int_Sigma f dA over zonal f
        meas = (
            cone.rho_p**cone.p * sphere_area(cone.p - 1) * cone.rho_q**cone.q * sphere_area(cone.q)
        )
        self.weights = w * meas
        table = _gegenbauer_table(self.jmax - 1, lam, x)
        # orthonormalize against the discrete measure (exact for these degrees)
        phi = np.empty_like(table)
        self.norms = np.empty(self.jmax)
        for idx in range(self.jmax):
            nrm = math.sqrt(float(np.sum(self.weights * table[idx] ** 2)))
            self.norms[idx] = nrm
            phi[idx] = table[idx] / nrm
        self.phi = phi  # phi[j-1, node]
        self.d_theta, self.d2_theta = self._derivative_tables(lam)

    def _derivative_tables(self, lam: float):
        """d/dtheta and d2/dtheta2 of each basis function at the nodes."""
        x = self.costheta
        s = np.sqrt(np.maximum(1.0 - x * x, 0.0))
        kmax = self.jmax - 1
        dCdx = np.zeros((self.jmax, x.size))
        d2Cdx2 = np.zeros((self.jmax, x.size))
        if kmax >= 1:
            dCdx[1:] = 2.0 * lam * _gegenbauer_table(kmax - 1, lam + 1.0, x)
        if kmax >= 2:
            d2Cdx2[2:] = 4.0 * lam * (lam + 1.0) * _gegenbauer_table(kmax - 2, lam + 2.0, x)
        dth = -s[None, :] * dCdx
        d2th = s[None, :] ** 2 * d2Cdx2 - x[None, :] * dCdx
        return dth / self.norms[:, None], d2th / self.norms[:, None]

    def eigenfunction(self, j: int, theta) -> np.ndarray | float:
        """Normalized zonal eigenfunction at arbitrary polar angles."""
        if j < 1:
            raise ValueError("j must be >= 1")
        if j > self.jmax:
            raise ValueError("j exceeds the basis size")
        th = np.asarray(theta, dtype=float)
        lam = (self.cone.p - 1) / 2.0
        vals = _gegenbauer_table(j - 1, lam, np.cos(th).ravel())[j - 1]
        vals = vals / self.norms[j - 1]
        if np.isscalar(theta) or th.ndim == 0:
            return float(vals[0])
        return vals.reshape(th.shape)

    def project(self, values: np.ndarray) -> np.ndarray:
        """Zonal coefficients <f, phi_j> from nodal values (last axis = theta)."""
        return np.asarray(values) * self.weights @ self.phi.T

    def synthesize(self, coeffs: np.ndarray) -> np.ndarray:
        """Nodal values from zonal coefficients (last axis = mode)."""
        return np.asarray(coeffs) @ self.phi

    def angular_eigenvalues_unit(self) -> np.ndarray:
        """Zonal Laplacian eigenvalues -(j-1)(j+p-2) on the unit S^p, j = 1..jmax."""
        j = np.arange(1, self.jmax + 1)
        return -((j - 1.0) * (j + self.cone.p - 2.0))

    def modes(self) -> list[Mode]:
        """The axisymmetric modes (j, 1) matching the basis columns."""
        return [make_mode(j, 1, self.cone) for j in range(1, self.jmax + 1)]


@lru_cache(maxsize=32)
def zonal_basis(cone: ConeParams, n_theta: int, jmax: int | None = None) -> ZonalBasis:
    return ZonalBasis(cone, n_theta, jmax)


def axisym_eigenfunction(j: int, theta, cone: ConeParams) -> np.ndarray | float:
    """L2(Sigma)-normalized zonal eigenfunction of the (j, 1) mode."""
    basis = zonal_basis(cone, max(2 * j + 8, 16), max(j, 2))
    return basis.eigenfunction(j, theta)


@dataclass(frozen=True)
class BoundaryData:
    """Finite expansion g = sum_i g_i phi_i over distinct product modes."""

    cone: ConeParams
    entries: tuple

    def __post_init__(self):
        seen = set()
        for mode, _ in self.entries:
            key = (mode.j, mode.k)
            if key in seen:
                raise ValueError(f"duplicate mode {key}")
            seen.add(key)

    @staticmethod
    def from_pairs(cone: ConeParams, pairs) -> "BoundaryData":
        entries = tuple((make_mode(j, k, cone), float(c)) for (j, k), c in pairs)
        return BoundaryData(cone, entries)

    @staticmethod
    def zonal(cone: ConeParams, coeffs) -> "BoundaryData":
        """Axisymmetric data from coefficients indexed by j = 1, 2, ..."""
        pairs = [((j + 1, 1), c) for j, c in enumerate(coeffs) if c != 0.0]
        return BoundaryData.from_pairs(cone, pairs)

    def project_pi(self) -> "BoundaryData":
        """Drop every mode with mu <= n-1 (dilations, translations, rotations)."""
        kept = tuple((m, c) for m, c in self.entries if m.mu_exact > self.cone.n - 1)
        return BoundaryData(self.cone, kept)

    def low_entries(self) -> tuple:
        return tuple((m, c) for m, c in self.entries if m.mu_exact <= self.cone.n - 1)

    def is_axisymmetric(self) -> bool:
        return all(m.k == 1 for m, _ in self.entries)

    def coefficient(self, j: int, k: int = 1) -> float:
        for m, c in self.entries:
            if (m.j, m.k) == (j, k):
                return c
        return 0.0

    def zonal_coeffs(self, jmax: int) -> np.ndarray:
        if not self.is_axisymmetric():
            raise ValueError("boundary data has non-axisymmetric modes")
        out = np.zeros(jmax)
        for m, c in self.entries:
            if m.j <= jmax:
                out[m.j - 1] = c
        return out

    def synthesize(self, theta, basis: ZonalBasis | None = None) -> np.ndarray:
        """Nodal values of axisymmetric boundary data at polar angles theta."""
        if not self.is_axisymmetric():
            raise ValueError("synthesis only supported in the zonal sector")
        th = np.asarray(theta, dtype=float)
        out = np.zeros_like(th)
        for m, c in self.entries:
            out = out + c * np.asarray(axisym_eigenfunction(m.j, th, self.cone))
        return out

    def c2_norm(self) -> float:
        """Discrete C^2 norm on the link of axisymmetric data (estimator)."""
        if not self.entries:
            return 0.0
        jmax = max(m.j for m, _ in self.entries)
        basis = zonal_basis(self.cone, max(4 * jmax + 16, 32), jmax)
        coeffs = self.zonal_coeffs(jmax)
        vals = coeffs @ basis.phi[:jmax]
        d1 = coeffs @ basis.d_theta[:jmax]
        d2 = coeffs @ basis.d2_theta[:jmax]
        rp = self.cone.rho_p
        return float(
            np.max(np.abs(vals)) + np.max(np.abs(d1)) / rp + np.max(np.abs(d2)) / rp**2
        )

    def __add__(self, other: "BoundaryData") -> "BoundaryData":
        acc: dict = {}
        for m, c in self.entries + other.entries:
            key = (m.j, m.k)
            if key in acc:
                acc[key] = (m, acc[key][1] + c)
            else:
                acc[key] = (m, c)
        return BoundaryData(self.cone, tuple(acc.values()))

    def __mul__(self, s: float) -> "BoundaryData":
        return BoundaryData(self.cone, tuple((m, c * s) for m, c in self.entries))

    __rmul__ = __mul__


def project_Pi(g: BoundaryData) -> BoundaryData:
    return g.project_pi()
