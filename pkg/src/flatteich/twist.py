"""Twist geodesics: parameters of the geodesic realising a Dehn twist power,
points along a leg, and the triangle x0, tau_1^n x0, tau_2^-n x0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, Optional

from .errors import BadK, BadModulus, BadN, FixtureIncomplete
from .surface import MarkedPoint, Rotate, Stretch, Twist


@dataclass(frozen=True)
class TwistParameters:
    R: float
    M: float
    n: int
    sigma: float  # pi/2 at n = 0 (limit), negative for n < 0
    k: float
    K: float

    @property
    def distance(self) -> float:
        return 0.5 * math.log(self.K)


def stretch_factor(x: float) -> float:
    """(1+k)/(1-k) for k = x/sqrt(1+x^2), in a form without cancellation."""
    return (x + math.sqrt(1.0 + x * x)) ** 2


def twist_parameters(R: float, n: int) -> TwistParameters:
    if not R > 1:
        raise BadModulus(f"cylinder modulus parameter R must exceed 1, got {R}")
    M = math.log(R) / (2 * math.pi)
    return _params(R, M, n)


def twist_parameters_for_modulus(modulus: float, n: int) -> TwistParameters:
    """Same as :func:`twist_parameters` with R = exp(2 pi modulus), without overflow."""
    if not modulus > 0:
        raise BadModulus(f"cylinder modulus must be positive, got {modulus}")
    R = math.exp(2 * math.pi * float(modulus)) if modulus < 100 else math.inf
    return _params(R, float(modulus), n)


def _params(R, M, n) -> TwistParameters:
    x = abs(n) / (2 * M)
    k = x / math.sqrt(1 + x * x)
    sigma = math.atan(2 * M / n) if n else math.pi / 2
    return TwistParameters(R, M, n, sigma, k, stretch_factor(x))


def twist_direction(n: int, M: float) -> float:
    """Rotation angle of the differential whose horizontal stretch realises tau^n."""
    if n == 0:
        raise BadN("the twist direction is undefined for n = 0")
    return -(math.atan(2 * M / n) + math.pi)


def k_from_K(K: float) -> float:
    return (K - 1) / (K + 1)


def leg_point(base: MarkedPoint, theta: float, k) -> MarkedPoint:
    """Point at parameter k on the geodesic from ``base`` in direction ``theta``."""
    if not 0 <= k < 1:
        raise BadK(f"k must lie in [0, 1), got {k}")
    if k == 0:
        return base
    K = (1 + k) / (1 - k)
    return base.then(Rotate(theta), Stretch(K), Rotate(-theta))


@dataclass(frozen=True)
class TriangleInstance:
    n: int
    x0: MarkedPoint
    y1: MarkedPoint
    y2: MarkedPoint
    q_cylinders: tuple  # (C1, C2) ids of the two-cylinder structure on y1
    modulus: Fraction
    params: TwistParameters
    roles: Dict[str, str]
    curves: Dict[str, object] = field(repr=False)
    annuli: Dict[str, object] = field(default_factory=dict, repr=False)  # role A1/A2 -> Annulus
    y_star: Optional[MarkedPoint] = None

    @property
    def theta_12(self) -> float:
        """Direction of the geodesic from y1 to y2."""
        return twist_direction(-self.n, self.params.M)

    @property
    def theta_01(self) -> float:
        return twist_direction(self.n, self.params.M)

    def vertices(self) -> Dict[str, MarkedPoint]:
        out = {"x0": self.x0, "y1": self.y1, "y2": self.y2}
        if self.y_star is not None:
            out["y*"] = self.y_star
        return out

    def curve_family(self) -> Dict[str, Dict[str, object]]:
        """Every role curve transported to every vertex."""
        from .curves import transport_curve
        return {vn: {role: transport_curve(self.curves[name], pt) for role, name in self.roles.items()}
                for vn, pt in self.vertices().items()}


def triangle_vertices(fixture, n: int) -> TriangleInstance:
    """Build x0, y1 = tau_1^n x0, y2 = tau_2^-n x0 and the midpoint y* on [y1 y2]."""
    need = ("beta1", "beta2", "gamma1", "gamma2", "A1", "A2")
    missing = [r for r in need if r not in fixture.roles]
    if missing:
        raise FixtureIncomplete(f"fixture {fixture.name} lacks experiment roles {missing}")
    s = fixture.surface
    curves = fixture.curves
    for r in ("beta1", "beta2", "gamma1", "gamma2"):
        if fixture.roles[r] not in curves:
            raise FixtureIncomplete(f"role {r} names unknown curve {fixture.roles[r]!r}")
    c1 = curves[fixture.roles["beta1"]].core_of
    c2 = curves[fixture.roles["beta2"]].core_of
    if c1 is None or c2 is None:
        raise FixtureIncomplete("beta1 and beta2 must be cylinder cores")
    m1, m2 = s.cylinder(c1).modulus, s.cylinder(c2).modulus
    if m1 != m2:
        raise FixtureIncomplete(f"cylinders {c1} and {c2} have different moduli {m1} and {m2}")
    x0 = MarkedPoint(s)
    y1 = x0.then(Twist(c1, n)) if n else x0
    y2 = x0.then(Twist(c2, -n)) if n else x0
    roles = {r: fixture.roles[r] for r in ("beta1", "beta2", "gamma1", "gamma2")}
    annuli = {}
    for r in ("A1", "A2"):
        if fixture.roles[r] not in fixture.annuli:
            raise FixtureIncomplete(f"role {r} names unknown annulus {fixture.roles[r]!r}")
        annuli[r] = fixture.annuli[fixture.roles[r]]
    inst = TriangleInstance(n, x0, y1, y2, (c1, c2), m1, twist_parameters_for_modulus(m1, n), roles,
                            dict(curves), annuli)
    return replace(inst, y_star=midpoint_y_star(inst) if n >= 1 else x0)


def midpoint_y_star(t: TriangleInstance) -> MarkedPoint:
    """Point on [y1 y2] at stretch factor n from y1."""
    if t.n < 1:
        raise BadN(f"y* needs n >= 1, got {t.n}")
    if t.n == 1:
        return t.y1
    k = Fraction(t.n - 1, t.n + 1)
    return leg_point(t.y1, t.theta_12, k)
