"""Levi-Civita connection, curvature and the numeric geodesic integrator.

Christoffel symbols are assembled from closed-form partial derivatives of
the metric components (rational functions of x and y; the metric does not
depend on z) through the Koszul formula, with the exact inverse metric from
the orthonormal frame.  A finite-difference Koszul oracle is provided for
validation.

The geodesic integrator is the adaptive embedded Runge-Kutta 4(5) stepper
from `_rk`, default tolerance 1e-10, with cubic Hermite dense output.  It
is the independent oracle against which every closed-form geodesic of this
package is checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _rk
from .space import (
    DomainError,
    MetricParams,
    Point3,
    _xyz,
    frame,
    metric_tensor,
    require_in_domain,
)

__all__ = [
    "GeodesicState",
    "Trajectory",
    "christoffel",
    "christoffel_fd",
    "geodesic_rhs",
    "integrate_geodesic",
    "curvature_tensor",
    "sectional_curvature",
    "frame_sectional",
    "state_speed",
]

DEFAULT_TOL = 1e-10

# Margin at which integration stops before the m < 0 disk boundary.
BOUNDARY_MARGIN = 1e-9

# Coordinate bound beyond which integration stops: for m > 0 the chart
# misses one vertical fiber (the antipodal axis) and geodesics aimed at it
# leave every bounded region in finite time.
CHART_BOUND = 1e6


@dataclass(frozen=True)
class GeodesicState:
    """A base point together with a coordinate velocity vector."""

    point: Point3
    velocity: np.ndarray

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.point.as_array(), np.asarray(self.velocity, dtype=float)])


def _gamma_entries(l: float, m: float, x: float, y: float):
    """Gamma^k_ij as nested lists, from analytic metric partials.

    Metric components: g = [[Q + a^2, a b, a], [a b, Q + b^2, b], [a, b, 1]]
    with Q = 1/D^2, a = l y / (2D), b = -l x / (2D), D = 1 + m (x^2 + y^2).
    """
    rho2 = x * x + y * y
    D = 1.0 + m * rho2
    if D <= 0.0:
        raise DomainError(f"metric degenerate: D = {D!r}")
    D2 = D * D
    al = 0.5 * l * y / D
    be = -0.5 * l * x / D
    iD2 = 1.0 / D2
    iD3 = iD2 / D
    qx = -4.0 * m * x * iD3
    qy = -4.0 * m * y * iD3
    ax = -l * m * x * y * iD2
    ay = 0.5 * l * (D - 2.0 * m * y * y) * iD2
    bx = -0.5 * l * (D - 2.0 * m * x * x) * iD2
    by = l * m * x * y * iD2

    gxy_x = ax * be + al * bx
    gxy_y = ay * be + al * by
    dgx = (
        (qx + 2.0 * al * ax, gxy_x, ax),
        (gxy_x, qx + 2.0 * be * bx, bx),
        (ax, bx, 0.0),
    )
    dgy = (
        (qy + 2.0 * al * ay, gxy_y, ay),
        (gxy_y, qy + 2.0 * be * by, by),
        (ay, by, 0.0),
    )
    zero3 = (0.0, 0.0, 0.0)
    dg = (dgx, dgy, (zero3, zero3, zero3))

    gi = (
        (D2, 0.0, -0.5 * D * l * y),
        (0.0, D2, 0.5 * D * l * x),
        (-0.5 * D * l * y, 0.5 * D * l * x, 1.0 + 0.25 * l * l * rho2),
    )

    gam = [[[0.0] * 3 for _ in range(3)] for _ in range(3)]
    for k in range(3):
        gik = gi[k]
        for i in range(3):
            dgi = dg[i]
            for j in range(i, 3):
                dgj = dg[j]
                s = 0.0
                for a in range(3):
                    s += gik[a] * (dgi[j][a] + dgj[i][a] - dg[a][i][j])
                s *= 0.5
                gam[k][i][j] = s
                gam[k][j][i] = s
    return gam


def christoffel(params: MetricParams, p) -> np.ndarray:
    """Gamma^k_ij of the Levi-Civita connection, shape (3, 3, 3)."""
    require_in_domain(params, p)
    x, y, _ = _xyz(p)
    return np.array(_gamma_entries(params.l, params.m, x, y))


def christoffel_fd(params: MetricParams, p, h: float = 1e-5) -> np.ndarray:
    """Finite-difference Koszul oracle for `christoffel`.

    Metric partials by central differences of `metric_tensor` (step h) and
    the inverse by linear solve; independent of the analytic partials.
    """
    x, y, z = _xyz(p)
    dg = np.zeros((3, 3, 3))
    for a, (dx, dy, dz) in enumerate(((1, 0, 0), (0, 1, 0), (0, 0, 1))):
        gp = metric_tensor(params, (x + h * dx, y + h * dy, z + h * dz))
        gm = metric_tensor(params, (x - h * dx, y - h * dy, z - h * dz))
        dg[a] = (gp - gm) / (2.0 * h)
    ginv = np.linalg.inv(metric_tensor(params, p))
    brack = dg + np.einsum("jil->ijl", dg) - np.einsum("lij->ijl", dg)
    return 0.5 * np.einsum("kl,ijl->kij", ginv, brack)


def _rhs_entries(l: float, m: float, y6) -> np.ndarray:
    x, yy = y6[0], y6[1]
    vx, vy, vz = y6[3], y6[4], y6[5]
    gam = _gamma_entries(l, m, x, yy)
    acc = [0.0, 0.0, 0.0]
    for k in range(3):
        gk = gam[k]
        acc[k] = -(
            gk[0][0] * vx * vx
            + gk[1][1] * vy * vy
            + gk[2][2] * vz * vz
            + 2.0 * (gk[0][1] * vx * vy + gk[0][2] * vx * vz + gk[1][2] * vy * vz)
        )
    return np.array([vx, vy, vz, acc[0], acc[1], acc[2]])


def geodesic_rhs(params: MetricParams, state: GeodesicState) -> np.ndarray:
    """(dx, dy, dz, -Gamma^k_ij v^i v^j) for the geodesic equation."""
    require_in_domain(params, state.point)
    return _rhs_entries(params.l, params.m, state.as_array())


def state_speed(params: MetricParams, point, velocity) -> float:
    g = metric_tensor(params, point)
    v = np.asarray(velocity, dtype=float)
    return math.sqrt(max(float(v @ g @ v), 0.0))


@dataclass
class Trajectory:
    """A time-sampled geodesic with conserved-quantity annotations.

    `states` rows are (x, y, z, vx, vy, vz); `integrals` rows hold the four
    Killing-field pairings g(v, X), g(v, Y), g(v, Z), g(v, R); `speeds` the
    metric norm of the velocity.  `exit_reason` is "complete" or
    "domain-exit": the m < 0 disk boundary was approached, or the path left
    the chart (m > 0 geodesics through the antipodal fiber), and
    integration stopped with the partial trajectory.

    Conservation caveat: in the m < 0 stop shell the conformal factor
    collapses (D ~ 1e-9) and the metric entries reach ~1/D^2, so the
    integral and speed annotations there are ill-conditioned in the state;
    they are reported as computed.  Away from the shell (D bounded below)
    they are constant to integrator accuracy.
    """

    params: MetricParams
    ts: np.ndarray
    states: np.ndarray
    integrals: np.ndarray
    speeds: np.ndarray
    exit_reason: str
    _knots_t: np.ndarray = field(repr=False, default=None)
    _knots_y: np.ndarray = field(repr=False, default=None)
    _knots_f: np.ndarray = field(repr=False, default=None)

    @property
    def complete(self) -> bool:
        return self.exit_reason == "complete"

    @property
    def t_end(self) -> float:
        return float(self.ts[-1])

    def sample(self, t_query) -> np.ndarray:
        """Interpolated (n, 6) states at the requested times."""
        return _rk.hermite_sample(self._knots_t, self._knots_y, self._knots_f, t_query)

    def positions(self) -> np.ndarray:
        return self.states[:, :3]


def _annotate(params: MetricParams, ts, states, exit_reason) -> Trajectory:
    from .symmetry import first_integrals  # deferred: symmetry imports this module

    n = len(ts)
    integrals = np.empty((n, 4))
    speeds = np.empty(n)
    for i in range(n):
        pt = states[i, :3]
        vel = states[i, 3:]
        st = GeodesicState(Point3(*pt), vel)
        integrals[i] = first_integrals(params, st)
        speeds[i] = state_speed(params, pt, vel)
    return Trajectory(
        params=params,
        ts=np.asarray(ts, dtype=float),
        states=np.asarray(states, dtype=float),
        integrals=integrals,
        speeds=speeds,
        exit_reason=exit_reason,
    )


def integrate_geodesic(
    params: MetricParams,
    s0: GeodesicState,
    t_max: float,
    tol: float = DEFAULT_TOL,
    samples: int | None = None,
) -> Trajectory:
    """Integrate the geodesic from s0 over [0, t_max].

    With `samples` given, the trajectory rows sit on a uniform time grid
    (cubic Hermite dense output); otherwise the accepted integration steps
    are returned.  For m < 0 the run stops with exit_reason "domain-exit"
    when the path comes within BOUNDARY_MARGIN of the disk boundary.
    """
    require_in_domain(params, s0.point)
    if samples is not None and samples < 2:
        raise ValueError("samples must be at least 2")
    l, m = params.l, params.m

    def rhs(y6):
        return _rhs_entries(l, m, y6)

    if m < 0.0:
        rho2_stop = -1.0 / m - BOUNDARY_MARGIN

        def guard(y6, _lim=rho2_stop):
            return y6[0] * y6[0] + y6[1] * y6[1] < _lim

    else:

        def guard(y6):
            return max(abs(y6[0]), abs(y6[1]), abs(y6[2])) < CHART_BOUND

    ts, ys, fs, exit_reason = _rk.rk45(
        rhs, s0.as_array(), t_max, tol, guard=guard, guard_error=DomainError
    )
    if samples is None:
        t_out, y_out = ts, ys
    else:
        t_out = np.linspace(0.0, ts[-1], samples)
        y_out = _rk.hermite_sample(ts, ys, fs, t_out)
    traj = _annotate(params, t_out, y_out, exit_reason)
    traj._knots_t, traj._knots_y, traj._knots_f = ts, ys, fs
    return traj


def curvature_tensor(params: MetricParams, p, h: float = 1e-4) -> np.ndarray:
    """Coordinate curvature R[i, j, k, l] = g(R(d_i, d_j) d_k, d_l).

    Built from analytic Christoffels with fourth-order central differences
    of the symbols (the symbols do not depend on z, so the z derivative is
    zero).  The five-point stencil keeps the symmetry defects below 1e-10
    even close to the m < 0 disk boundary, where a plain central stencil
    at step 1e-5 drifts to ~1e-8.
    """
    require_in_domain(params, p)
    x, y, z = _xyz(p)
    gam = christoffel(params, p)

    def d4(chris_at):
        return (
            -chris_at(2.0 * h) + 8.0 * chris_at(h) - 8.0 * chris_at(-h) + chris_at(-2.0 * h)
        ) / (12.0 * h)

    dgam = np.zeros((3, 3, 3, 3))
    dgam[0] = d4(lambda s: christoffel(params, (x + s, y, z)))
    dgam[1] = d4(lambda s: christoffel(params, (x, y + s, z)))
    # R^l_{.ijk}: coefficient of d_l in R(d_i, d_j) d_k
    rup = (
        np.einsum("iljk->lijk", dgam)
        - np.einsum("jlik->lijk", dgam)
        + np.einsum("lim,mjk->lijk", gam, gam)
        - np.einsum("ljm,mik->lijk", gam, gam)
    )
    g = metric_tensor(params, p)
    return np.einsum("ls,sijk->ijkl", g, rup)


def sectional_curvature(params: MetricParams, p, u, v) -> float:
    """Sectional curvature of the plane spanned by coordinate vectors u, v."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    g = metric_tensor(params, p)
    gram = (u @ g @ u) * (v @ g @ v) - (u @ g @ v) ** 2
    scale = max(float(u @ u) * float(v @ v), 1e-300)
    if gram <= 1e-12 * scale:
        raise ValueError("degenerate plane: u, v are metrically collinear")
    r = curvature_tensor(params, p)
    num = float(np.einsum("ijkl,i,j,k,l->", r, u, v, v, u))
    return num / float(gram)


def frame_sectional(params: MetricParams, p) -> tuple[float, float]:
    """Sectional curvatures of the (E1, E2) and (E1, E3) frame planes."""
    fr = frame(params, p)
    return (
        sectional_curvature(params, p, fr.e1, fr.e2),
        sectional_curvature(params, p, fr.e1, fr.e3),
    )
