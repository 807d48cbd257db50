"""Ambient geometry of quadratic (generalized Simons) cones C(S^p x S^q).

The cone lives in R^{p+1} x R^{q+1} and is cut out by q|x|^2 = p|y|^2.
Everything here is elementary vector algebra on the two factors; the polar
"profile plane" coordinates (|x|, |y|) do most of the work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

E_PLUS = "E_plus"
E_MINUS = "E_minus"
ON_CONE = "on_cone"

# (p, q) pairs with p+q == 6 whose cones are area minimizing.
_MINIMIZING_LOW = {(3, 3), (2, 4), (4, 2)}


@dataclass(frozen=True)
class ConeParams:
    """The pair (p, q); the cone is a hypersurface of dimension n = p+q+1."""

    p: int
    q: int

    def __post_init__(self):
        if self.p < 2 or self.q < 2:
            raise ValueError(f"cone requires p, q >= 2, got ({self.p}, {self.q})")

    @property
    def n(self) -> int:
        """Hypersurface dimension (ambient dimension is n+1)."""
        return self.p + self.q + 1

    @property
    def minimizing(self) -> bool:
        return self.p + self.q > 6 or (self.p, self.q) in _MINIMIZING_LOW

    @property
    def rho_p(self) -> float:
        """Radius of the S^p factor of the link."""
        return math.sqrt(self.p / (self.n - 1))

    @property
    def rho_q(self) -> float:
        """Radius of the S^q factor of the link."""
        return math.sqrt(self.q / (self.n - 1))

    @property
    def alpha(self) -> float:
        """Opening angle of the cone line |y|/|x| = sqrt(q/p) in the profile plane."""
        return math.atan2(self.rho_q, self.rho_p)

    def require_minimizing(self):
        if not self.minimizing:
            raise ValueError(f"cone ({self.p},{self.q}) is not area minimizing")


@dataclass(frozen=True)
class AmbientPoint:
    """A point (x, y) in R^{p+1} x R^{q+1}."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float))
        if self.x.ndim != 1 or self.y.ndim != 1:
            raise ValueError("x and y must be vectors")

    def check_dims(self, cone: ConeParams):
        if self.x.shape != (cone.p + 1,) or self.y.shape != (cone.q + 1,):
            raise ValueError(
                f"dimension mismatch: got ({self.x.shape[0]}, {self.y.shape[0]}), "
                f"cone needs ({cone.p + 1}, {cone.q + 1})"
            )

    @property
    def norm(self) -> float:
        return math.hypot(np.linalg.norm(self.x), np.linalg.norm(self.y))

    def as_pair(self):
        return self.x, self.y


@dataclass(frozen=True)
class LinkCoords:
    """Axisymmetric link point: polar angle theta of the x-factor about e1."""

    theta: float

    def to_ambient(self, cone: ConeParams) -> AmbientPoint:
        """Representative link point at polar angle theta (y along its e1 axis)."""
        x = np.zeros(cone.p + 1)
        x[0] = cone.rho_p * math.cos(self.theta)
        if cone.p >= 1:
            x[1] = cone.rho_p * math.sin(self.theta)
        y = np.zeros(cone.q + 1)
        y[0] = cone.rho_q
        return AmbientPoint(x, y)


def side_classify(pt: AmbientPoint, cone: ConeParams, tol: float = 1e-12) -> str:
    """Classify a point against q|x|^2 = p|y|^2, with a relative tolerance.

    The discriminant is scaled by |pt|^2 so classification is scale invariant.
    """
    pt.check_dims(cone)
    nx2 = float(np.dot(pt.x, pt.x))
    ny2 = float(np.dot(pt.y, pt.y))
    total = nx2 + ny2
    if total == 0.0:
        return ON_CONE
    disc = cone.q * nx2 - cone.p * ny2
    if disc > tol * total:
        return E_PLUS
    if disc < -tol * total:
        return E_MINUS
    return ON_CONE


def _profile_split(pt: AmbientPoint):
    """Radii and unit directions of the two factors; raises on a factor axis."""
    X = float(np.linalg.norm(pt.x))
    Y = float(np.linalg.norm(pt.y))
    if X == 0.0 or Y == 0.0:
        raise ValueError("point lies on a factor axis; profile direction undefined")
    return X, Y, pt.x / X, pt.y / Y


def link_normal(w: AmbientPoint, cone: ConeParams, tol: float = 1e-8) -> AmbientPoint:
    """Unit normal of the cone at a link point, tangent to the unit sphere.

    Rotates the profile-plane position (|x|, |y|) by +90 degrees and lifts the
    result along the factor directions; for p = q and x parallel to y this is
    the factor swap w = (w1, w2) -> (-w2, w1).
    """
    w.check_dims(cone)
    X, Y, xi, eta = _profile_split(w)
    if abs(X - cone.rho_p) > tol or abs(Y - cone.rho_q) > tol:
        raise ValueError("point is not on the link within tolerance")
    return AmbientPoint(-Y * xi, X * eta)


def cone_normal(pt: AmbientPoint, cone: ConeParams) -> AmbientPoint:
    """Unit normal of the cone at any cone point (scale invariant)."""
    X, Y, xi, eta = _profile_split(pt)
    r = math.hypot(X, Y)
    return AmbientPoint((-Y / r) * xi, (X / r) * eta)


def spherical_exp(w: AmbientPoint, t: float, cone: ConeParams) -> AmbientPoint:
    """Geodesic of the unit sphere from a link point in the cone-normal direction."""
    if abs(t) >= math.pi / 2:
        raise ValueError("|t| must be < pi/2")
    nu = link_normal(w, cone)
    c, s = math.cos(t), math.sin(t)
    return AmbientPoint(c * w.x + s * nu.x, c * w.y + s * nu.y)


def T_map(pt: AmbientPoint) -> AmbientPoint:
    """The factor swap (x, y) -> (-y, x); requires p = q, squares to -Id."""
    if pt.x.shape != pt.y.shape:
        raise ValueError("T map requires equal factor dimensions (p = q)")
    return AmbientPoint(-pt.y.copy(), pt.x.copy())


def random_link_point(cone: ConeParams, rng: np.random.Generator) -> AmbientPoint:
    """Uniform-ish random point of the link (for tests and probes)."""
    x = rng.standard_normal(cone.p + 1)
    y = rng.standard_normal(cone.q + 1)
    x *= cone.rho_p / np.linalg.norm(x)
    y *= cone.rho_q / np.linalg.norm(y)
    return AmbientPoint(x, y)
