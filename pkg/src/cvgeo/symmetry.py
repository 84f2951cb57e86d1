"""Killing vector fields, their first integrals and containment surfaces.

The isometry algebra of the metric family contains the four fields (frame
components converted to coordinates)

    X = (2 m x y,      D - 2 m x^2,  -l x / 2)
    Y = (D - 2 m y^2,  2 m x y,       l y / 2)
    Z = (0, 0, 1)
    R = (-y, x, 0)                    rotation about the z axis

with D = 1 + m (x^2 + y^2).  Each one pairs with the velocity of any
geodesic to a conserved quantity g(v, K); from the origin with velocity
(u, v, w) the four constants are (v, u, w, 0).

The vanishing rotational integral confines every origin geodesic to a
surface: a circular cylinder l w (x^2+y^2) + 2 v x - 2 u y = 0 when both l
and w are nonzero, else the vertical plane v x - u y = 0.  (The quadric is
validated against the integrator; see docs/geodesic_atlas.md for the sign
conventions.)  The second containment surface is the rotation of the
geodesic itself about the z axis, carried here as a sampled profile.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .connection import GeodesicState, christoffel, integrate_geodesic
from .space import MetricParams, Point3, _xyz, metric_tensor, require_in_domain

__all__ = [
    "KILLING_NAMES",
    "killing_eval",
    "killing_defect",
    "field_killing_defect",
    "first_integrals",
    "ContainmentSurfaces",
    "containment_surfaces",
]

KILLING_NAMES = ("X", "Y", "Z", "R")


def killing_eval(params: MetricParams, which: str, p) -> np.ndarray:
    """Coordinate components of the named Killing field at p."""
    require_in_domain(params, p)
    x, y, _ = _xyz(p)
    l, m = params.l, params.m
    if which == "X":
        d = 1.0 + m * (x * x + y * y)
        return np.array([2.0 * m * x * y, d - 2.0 * m * x * x, -0.5 * l * x])
    if which == "Y":
        d = 1.0 + m * (x * x + y * y)
        return np.array([d - 2.0 * m * y * y, 2.0 * m * x * y, 0.5 * l * y])
    if which == "Z":
        return np.array([0.0, 0.0, 1.0])
    if which == "R":
        return np.array([-y, x, 0.0])
    raise ValueError(f"unknown Killing field {which!r}; expected one of {KILLING_NAMES}")


def field_killing_defect(params: MetricParams, field, p, h: float = 1e-6) -> float:
    """Max-norm of nabla_i K_j + nabla_j K_i for an arbitrary field.

    The field's metric-lowered components are differentiated by central
    differences (step h); the connection term uses analytic Christoffels.
    Zero (to discretisation error) exactly for Killing fields.
    """
    x, y, z = _xyz(p)

    def lowered(q):
        return metric_tensor(params, q) @ np.asarray(field(q), dtype=float)

    dW = np.zeros((3, 3))
    for a, (dx, dy, dz) in enumerate(((1, 0, 0), (0, 1, 0), (0, 0, 1))):
        wp = lowered((x + h * dx, y + h * dy, z + h * dz))
        wm = lowered((x - h * dx, y - h * dy, z - h * dz))
        dW[a] = (wp - wm) / (2.0 * h)
    w0 = lowered((x, y, z))
    gam = christoffel(params, p)
    nabla = dW - np.einsum("kij,k->ij", gam, w0)
    return float(np.max(np.abs(nabla + nabla.T)))


def killing_defect(params: MetricParams, which: str, p, h: float = 1e-6) -> float:
    """Killing-equation defect of the named basis field at p."""
    return field_killing_defect(params, lambda q: killing_eval(params, which, q), p, h=h)


def first_integrals(params: MetricParams, state: GeodesicState) -> np.ndarray:
    """(g(v, X), g(v, Y), g(v, Z), g(v, R)) at the state.

    Constant along geodesics; from the origin with velocity (u, v, w) the
    values are (v, u, w, 0).
    """
    p = state.point
    g = metric_tensor(params, p)
    gv = g @ np.asarray(state.velocity, dtype=float)
    return np.array([float(killing_eval(params, k, p) @ gv) for k in KILLING_NAMES])


@dataclass(frozen=True)
class ContainmentSurfaces:
    """First containment surface of an origin geodesic, plus the profile
    (radius, z) samples whose revolution about the z axis gives the second.

    kind "cylinder": residual  quad * (x^2 + y^2) + cx * x + cy * y
    kind "plane":    residual  cx * x + cy * y
    """

    kind: str
    quad: float
    cx: float
    cy: float
    profile: np.ndarray

    def residual(self, p) -> float:
        x, y, _ = _xyz(p)
        r = self.cx * x + self.cy * y
        if self.kind == "cylinder":
            r += self.quad * (x * x + y * y)
        return r

    def max_residual(self, points) -> float:
        pts = np.asarray(points, dtype=float)
        r = self.cx * pts[:, 0] + self.cy * pts[:, 1]
        if self.kind == "cylinder":
            r = r + self.quad * (pts[:, 0] ** 2 + pts[:, 1] ** 2)
        return float(np.max(np.abs(r)))


def containment_surfaces(
    params: MetricParams,
    v0,
    t_span: float = 2.0,
    n_profile: int = 65,
    tol: float = 1e-10,
) -> ContainmentSurfaces:
    """Containment surfaces for the origin geodesic with velocity v0 = (u, v, w)."""
    u, v, w = (float(c) for c in v0)
    if u == 0.0 and v == 0.0 and w == 0.0:
        raise ValueError("initial velocity must be nonzero")
    l = params.l
    if l != 0.0 and w != 0.0:
        kind, quad, cx, cy = "cylinder", l * w, 2.0 * v, -2.0 * u
    else:
        kind, quad, cx, cy = "plane", 0.0, v, -u
    traj = integrate_geodesic(
        params,
        GeodesicState(Point3(0.0, 0.0, 0.0), np.array([u, v, w])),
        t_span,
        tol=tol,
        samples=n_profile,
    )
    pos = traj.positions()
    profile = np.column_stack([np.hypot(pos[:, 0], pos[:, 1]), pos[:, 2]])
    return ContainmentSurfaces(kind=kind, quad=quad, cx=cx, cy=cy, profile=profile)
