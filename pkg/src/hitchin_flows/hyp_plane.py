"""Upper-half-plane geometry for PSL_2(R).

Boundary points are projective pairs ``(u, v)`` standing for ``u / v``; the
point at infinity is ``(1, 0)``.  Crossing angles use the standard
(counter-clockwise) orientation of the upper half-plane, read through the
global ``ORIENTATION`` sign below.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import (
    BadDeterminant,
    NotHyperbolic,
    NotHyperbolicSignature,
    SharedEndpoint,
    ShootingFailed,
)
from .groups import Representation, orbifold_presentation, surface_presentation
from .lie_core import DET_TOL, sym_embed

HYP_TOL = 1e-9
ENDPOINT_TOL = 1e-10

# +1: angles measured counter-clockwise in the upper half-plane as drawn.
# -1: measured clockwise.  With -1 the crossing of (0, inf) by (-1, 3) has
# angle pi/3, and positive twists raise lengths of crossing curves whenever
# the crossing angles are acute (see tests/test_probes.py).
ORIENTATION = -1


def classify(M, tol=HYP_TOL):
    M = np.asarray(M, dtype=float)
    # rounding in det of a long product scales with |M|^2
    if abs(np.linalg.det(M) - 1.0) > DET_TOL * max(1.0, np.sum(M * M)):
        raise BadDeterminant(f"det = {np.linalg.det(M)!r}")
    t = abs(np.trace(M))
    if t > 2 + tol:
        return "hyperbolic"
    if t < 2 - tol:
        return "elliptic"
    return "parabolic"


def translation_length(M):
    t = abs(np.trace(M))
    if t <= 2 + HYP_TOL:
        raise NotHyperbolic(f"|tr| = {t}")
    return 2 * np.arccosh(t / 2)


def _unit(p):
    p = np.asarray(p, dtype=float)
    return p / np.linalg.norm(p)


def point(x):
    """Boundary point from a real number or ``np.inf``."""
    if np.isinf(x):
        return np.array([1.0, 0.0])
    return _unit([x, 1.0])


def to_real(p):
    u, v = p
    return np.inf if abs(v) < 1e-300 else u / v


def boundary_angle(p):
    """Angle on the boundary circle (Cayley picture) in ``[0, 2 pi)``."""
    u, v = p
    return (2 * np.arctan2(u, v)) % (2 * np.pi)


def mobius(M, z):
    """Act on an interior point (complex) or a projective boundary pair."""
    M = np.asarray(M, dtype=float)
    if np.iscomplexobj(z) or np.isscalar(z):
        (a, b), (c, d) = M
        return (a * z + b) / (c * z + d)
    return _unit(M @ z)


@dataclass(frozen=True)
class Geodesic:
    """Oriented geodesic from ``start`` to ``end`` (projective pairs)."""

    start: np.ndarray
    end: np.ndarray

    @classmethod
    def from_reals(cls, a, b):
        return cls(point(a), point(b))

    @property
    def endpoints(self):
        return to_real(self.start), to_real(self.end)

    def reversed(self):
        return Geodesic(self.end, self.start)

    def image(self, M):
        return Geodesic(mobius(M, self.start), mobius(M, self.end))

    def same_endpoints(self, other, tol=1e-8):
        def close(p, q):
            return abs(p[0] * q[1] - p[1] * q[0]) < tol
        return (close(self.start, other.start) and close(self.end, other.end)) or (
            close(self.start, other.end) and close(self.end, other.start)
        )


def axis(M):
    """Axis of a hyperbolic element, oriented from repelling to attracting fixed point."""
    M = np.asarray(M, dtype=float)
    if classify(M) != "hyperbolic":
        raise NotHyperbolic(f"|tr| = {abs(np.trace(M))}")
    ev, V = np.linalg.eig(M)
    order = np.argsort(-np.abs(ev))
    V = V[:, order].real
    return Geodesic(_unit(V[:, 1]), _unit(V[:, 0]))


@dataclass(frozen=True)
class CrossingGeom:
    point: complex
    angle: float
    sign: int


def _normalizer(g):
    """Orientation-preserving matrix sending ``g.start -> 0`` and ``g.end -> inf``."""
    P = np.column_stack([g.end, g.start])
    if np.linalg.det(P) < 0:
        P[:, 1] *= -1
    P /= np.sqrt(np.linalg.det(P))
    return np.linalg.inv(P), P


def cross(g1, g2):
    """Transverse intersection of two geodesics, or ``None``.

    The angle is the turn from the first geodesic to the second measured in
    the ``ORIENTATION`` sense, as an angle between unoriented lines in
    ``(0, pi)``; the sign is that of the turn between the oriented tangents.
    """
    angles = [boundary_angle(p) for p in (g1.start, g1.end, g2.start, g2.end)]
    for i in (0, 1):
        for j in (2, 3):
            d = abs(angles[i] - angles[j]) % (2 * np.pi)
            if min(d, 2 * np.pi - d) < ENDPOINT_TOL:
                raise SharedEndpoint("geodesics share an endpoint")
    T, Tinv = _normalizer(g1)
    p, q = (to_real(mobius(T, e)) for e in (g2.start, g2.end))
    if np.isinf(p) or np.isinf(q) or p * q >= 0:
        return None
    y = np.sqrt(-p * q)
    c = (p + q) / 2
    # tangent of g2 at i*y, pointing from p towards q; g1 is vertical upward
    ty = np.array([y, c]) if p < q else np.array([-y, -c])
    psi = np.arctan2(-ty[0], ty[1])  # signed turn from (0, 1) to ty
    psi *= ORIENTATION
    sign = 1 if psi > 0 else -1
    angle = psi % np.pi
    return CrossingGeom(complex(mobius(Tinv, 1j * y)), float(angle), sign)


def rotation(theta):
    """Counter-clockwise rotation by ``theta`` about ``i``."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, s], [-s, c]])


def boost(r):
    """Translation by ``r`` along the imaginary axis."""
    return np.diag([np.exp(r / 2), np.exp(-r / 2)])


def rotation_embed(phi, n):
    """Principal image of the rotation matrix with half-angle ``phi / 2``."""
    c, s = np.cos(phi / 2), np.sin(phi / 2)
    return sym_embed(np.array([[c, s], [-s, c]]), n)


# ---------------------------------------------------------------------------
# base representations


def _octagon_generators(r):
    """Side pairings of a regular octagon whose edge midpoints sit at distance ``r/2`` from ``i``."""

    def half_turn(k):
        Rk = rotation(k * np.pi / 4)
        return Rk @ boost(r) @ rotation(np.pi) @ boost(-r) @ Rk.T

    def pairing(j, k):
        return half_turn(k) @ rotation((k - j) * np.pi / 4)

    return [
        pairing(2, 0),
        np.linalg.inv(pairing(3, 1)),
        pairing(6, 4),
        np.linalg.inv(pairing(7, 5)),
    ]


def _relator(r):
    a1, b1, a2, b2 = _octagon_generators(r)
    inv = np.linalg.inv
    return a1 @ b1 @ inv(a1) @ inv(b1) @ a2 @ b2 @ inv(a2) @ inv(b2)


def octagon_rep(tol=1e-9):
    """Fuchsian genus-2 representation from a regular octagon with vertex angles ``pi / 4``.

    The edge distance is found by shooting: the relator is a small rotation
    whose sense flips as the octagon passes through vertex angle ``pi / 4``.
    """
    seed = np.arccosh(1 + np.sqrt(2))

    def shoot(r):
        R = _relator(r)
        return R[1, 0] - R[0, 1]

    lo, hi = seed * 0.97, seed * 1.03
    try:
        if shoot(lo) * shoot(hi) > 0:
            raise ShootingFailed("calibration bracket has no sign change")
        r = brentq(shoot, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    except (RuntimeError, ValueError) as exc:
        raise ShootingFailed(str(exc)) from exc
    rep = Representation(surface_presentation(2), _octagon_generators(r))
    if rep.relator_residual > tol:
        raise ShootingFailed(f"relator residual {rep.relator_residual:.3g}")
    return rep


def triangle_rep(p, q, r):
    """Orbifold group of the ``(p, q, r)`` triangle, ``s1 s2 s3 = 1``."""
    if q * r + p * r + p * q >= p * q * r:
        raise NotHyperbolicSignature(f"1/{p} + 1/{q} + 1/{r} >= 1")
    # triangle with angles pi/p at i, pi/q at the point i e^{d}, on the imaginary axis
    a, b, c = np.pi / p, np.pi / q, np.pi / r
    d = np.arccosh((np.cos(a) * np.cos(b) + np.cos(c)) / (np.sin(a) * np.sin(b)))
    x = rotation(2 * a)
    y = boost(d) @ rotation(2 * b) @ boost(-d)
    z = np.linalg.inv(x @ y)
    if abs(abs(np.trace(z)) - 2 * np.cos(c)) > 1e-9:
        x = rotation(-2 * a)
        y = boost(d) @ rotation(-2 * b) @ boost(-d)
        z = np.linalg.inv(x @ y)
    pres = orbifold_presentation(0, (p, q, r))
    return Representation(pres, [x, y, z])
