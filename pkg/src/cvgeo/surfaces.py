"""Immersed rotational surfaces: fundamental forms, geodesic criteria,
surface geodesics and the integrability obstruction of the horizontal
distribution.

A surface of revolution is the image of

    X(u, v) = (f(u) cos v, f(u) sin v, g(u)),        0 <= v < 2 pi,

with a `RevolutionProfile` supplying f, g and derivatives.  The first
fundamental form is the pullback of the ambient metric through the
Jacobian of X; the second uses the metric unit normal and ambient
covariant derivatives of the coordinate tangents.  Surface geodesics are
integrated from the pullback metric itself (finite-difference u
derivatives); the rotational momentum p_v = 2 G v' + 2 F u' it conserves
is the independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _rk
from .connection import christoffel
from .profiles import RevolutionProfile
from .space import DomainError, MetricParams, coframe_values, metric_tensor, require_in_domain

__all__ = [
    "FundamentalForms",
    "SurfaceGeodesicState",
    "SurfaceTrajectory",
    "embed",
    "first_fundamental_form",
    "reference_form_coefficients",
    "second_fundamental_form",
    "totally_geodesic_defect",
    "umbilic_defect",
    "frobenius_scalar",
    "surface_geodesic_integrate",
    "parallel_is_geodesic",
    "meridian_is_geodesic",
    "meridian_profile_ode_residual",
    "default_grid",
]

PARALLEL_TOL = 1e-10
MERIDIAN_TOL = 1e-8
SURFACE_DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class FundamentalForms:
    """First and second fundamental forms and the oriented unit normal."""

    first: np.ndarray
    second: np.ndarray
    normal: np.ndarray
    second_asymmetry: float = 0.0


@dataclass(frozen=True)
class SurfaceGeodesicState:
    u: float
    v: float
    du: float
    dv: float

    def as_array(self) -> np.ndarray:
        return np.array([self.u, self.v, self.du, self.dv], dtype=float)


def embed(profile: RevolutionProfile, q) -> tuple[np.ndarray, np.ndarray]:
    """Ambient point and 3x2 Jacobian (columns X_u, X_v) at q = (u, v)."""
    u, v = float(q[0]), float(q[1])
    fv, fpv, gv, gpv = profile.f(u), profile.fp(u), profile.g(u), profile.gp(u)
    cv, sv = math.cos(v), math.sin(v)
    point = np.array([fv * cv, fv * sv, gv])
    jac = np.array(
        [
            [fpv * cv, -fv * sv],
            [fpv * sv, fv * cv],
            [gpv, 0.0],
        ]
    )
    return point, jac


def first_fundamental_form(params: MetricParams, profile: RevolutionProfile, q) -> np.ndarray:
    """Pullback J^T g J of the ambient metric through the embedding."""
    point, jac = embed(profile, q)
    require_in_domain(params, point)
    g = metric_tensor(params, point)
    form = jac.T @ g @ jac
    det = form[0, 0] * form[1, 1] - form[0, 1] * form[1, 0]
    if det <= 0.0:
        raise ValueError("degenerate surface Jacobian")
    return form


def reference_form_coefficients(params: MetricParams, profile: RevolutionProfile, u: float):
    """Closed-form induced-metric coefficients (E, F, G).

    Independent of the pullback route; used to cross-check it:
        E = f'^2 / (1 + m f^2)^2 + g'^2
        F = -l f^2 g' / (2 (1 + m f^2))
        G = (4 f^2 + l^2 f^4) / (4 (1 + m f^2)^2)
    """
    l, m = params.l, params.m
    fv, fpv, gpv = profile.f(u), profile.fp(u), profile.gp(u)
    d = 1.0 + m * fv * fv
    e = fpv * fpv / (d * d) + gpv * gpv
    fcoef = -0.5 * l * fv * fv * gpv / d
    gcoef = (4.0 * fv * fv + l * l * fv ** 4) / (4.0 * d * d)
    return e, fcoef, gcoef


def _unit_normal(params: MetricParams, point, jac) -> np.ndarray:
    """Metric unit normal, oriented by the sign of its omega^3 value
    (falling back to omega^1 then omega^2 where earlier ones vanish)."""
    g = metric_tensor(params, point)
    r1 = g @ jac[:, 0]
    r2 = g @ jac[:, 1]
    n = np.cross(r1, r2)
    norm2 = float(n @ g @ n)
    if norm2 <= 1e-28:
        raise ValueError("degenerate tangent plane")
    n = n / math.sqrt(norm2)
    w = coframe_values(params, point, n)
    for comp in (w[2], w[0], w[1]):
        if abs(comp) > 1e-10:
            if comp < 0.0:
                n = -n
            break
    return n


def second_fundamental_form(
    params: MetricParams, profile: RevolutionProfile, q, h: float = 1e-6
) -> FundamentalForms:
    """Second fundamental form against the oriented metric unit normal.

    B_ab = g(nabla_{X_a} X_b, xi) with ambient Christoffels and central
    finite differences of the analytic tangent vectors for the coordinate
    second derivatives.
    """
    u, v = float(q[0]), float(q[1])
    point, jac = embed(profile, q)
    require_in_domain(params, point)
    first = first_fundamental_form(params, profile, q)
    xi = _unit_normal(params, point, jac)
    g = metric_tensor(params, point)
    gxi = g @ xi
    gam = christoffel(params, point)

    _, jac_up = embed(profile, (u + h, v))
    _, jac_um = embed(profile, (u - h, v))
    _, jac_vp = embed(profile, (u, v + h))
    _, jac_vm = embed(profile, (u, v - h))
    d_u = (jac_up - jac_um) / (2.0 * h)  # columns: X_uu, X_vu
    d_v = (jac_vp - jac_vm) / (2.0 * h)  # columns: X_uv, X_vv
    second_derivs = {
        (0, 0): d_u[:, 0],
        (0, 1): d_v[:, 0],
        (1, 0): d_u[:, 1],
        (1, 1): d_v[:, 1],
    }

    b = np.empty((2, 2))
    for (a, c), dd in second_derivs.items():
        cov = dd + np.einsum("kij,i,j->k", gam, jac[:, a], jac[:, c])
        b[a, c] = float(cov @ gxi)
    asym = abs(b[0, 1] - b[1, 0])
    b_sym = 0.5 * (b + b.T)
    return FundamentalForms(first=first, second=b_sym, normal=xi, second_asymmetry=asym)


def default_grid(profile: RevolutionProfile, nu: int = 10, nv: int = 8, margin: float = 0.02):
    """(u, v) sample pairs covering the profile domain."""
    lo, hi = profile.u_domain
    pad = margin * (hi - lo)
    us = np.linspace(lo + pad, hi - pad, nu)
    vs = np.linspace(0.0, 2.0 * math.pi, nv, endpoint=False)
    return [(u, v) for u in us for v in vs]


def totally_geodesic_defect(params: MetricParams, profile: RevolutionProfile, sample_grid) -> float:
    """Max over the grid of the max-norm of the second fundamental form."""
    worst = 0.0
    for q in sample_grid:
        forms = second_fundamental_form(params, profile, q)
        worst = max(worst, float(np.max(np.abs(forms.second))))
    return worst


def umbilic_defect(params: MetricParams, profile: RevolutionProfile, sample_grid) -> float:
    """Max over the grid of || B - (tr_g B / 2) I || (max-norm).

    Zero exactly on umbilical surfaces; the trace is taken with the
    inverse of the first fundamental form.
    """
    worst = 0.0
    for q in sample_grid:
        forms = second_fundamental_form(params, profile, q)
        first_inv = np.linalg.inv(forms.first)
        lam = 0.5 * float(np.trace(first_inv @ forms.second))
        dev = forms.second - lam * forms.first
        worst = max(worst, float(np.max(np.abs(dev))))
    return worst


def frobenius_scalar(params: MetricParams, p=None, h: float = 1e-6) -> float:
    """Integrability obstruction of the distribution orthogonal to E3.

    Computes the 3-form omega ^ d(omega) for the vertical coframe element
    omega = omega^3 by finite-difference exterior derivative, and
    normalises against the metric volume form (oriented so the twist
    parameter comes out with its sign): the result equals l, at every
    point, and vanishes exactly when the distribution is integrable.
    """
    if p is None:
        if params.m < 0.0:
            s = 0.3 / math.sqrt(-params.m)
        else:
            s = 0.5
        p = (0.617 * s, -0.459 * s, 0.2)
    require_in_domain(params, p)
    x, y, z = (float(c) for c in p)

    def omega(q):
        # covector components of omega^3: (alpha, beta, 1)
        d = 1.0 + params.m * (q[0] * q[0] + q[1] * q[1])
        return np.array([0.5 * params.l * q[1] / d, -0.5 * params.l * q[0] / d, 1.0])

    dw = np.zeros((3, 3))
    base = (x, y, z)
    for a in range(3):
        qp = list(base)
        qm = list(base)
        qp[a] += h
        qm[a] -= h
        dw[a] = (omega(qp) - omega(qm)) / (2.0 * h)
    f_xy = dw[0][1] - dw[1][0]
    f_yz = dw[1][2] - dw[2][1]
    f_zx = dw[2][0] - dw[0][2]
    w0 = omega(base)
    coeff = w0[0] * f_yz + w0[1] * f_zx + w0[2] * f_xy
    d0 = 1.0 + params.m * (x * x + y * y)
    return -d0 * d0 * coeff


def _induced_metric(params: MetricParams, profile: RevolutionProfile, u: float, v: float):
    """Pullback J^T g J in scalar arithmetic, skipping the profile height.

    The ambient metric does not depend on z, so the induced metric can be
    pulled back at height zero; this keeps quadrature-backed heights out
    of the integration hot path.
    """
    l, m = params.l, params.m
    fv, fpv, gpv = profile.f(u), profile.fp(u), profile.gp(u)
    if m < 0.0 and fv * fv >= -1.0 / m:
        raise DomainError(f"profile radius {fv!r} outside the m < 0 disk")
    cv, sv = math.cos(v), math.sin(v)
    x, y = fv * cv, fv * sv
    d = 1.0 + m * fv * fv
    q = 1.0 / (d * d)
    al = 0.5 * l * y / d
    be = -0.5 * l * x / d
    # tangents X_u = (f' cos v, f' sin v, g'), X_v = (-f sin v, f cos v, 0)
    xu = (fpv * cv, fpv * sv, gpv)
    xv = (-fv * sv, fv * cv, 0.0)
    wu = al * xu[0] + be * xu[1] + xu[2]
    wv = al * xv[0] + be * xv[1] + xv[2]
    e0 = q * (xu[0] * xu[0] + xu[1] * xu[1]) + wu * wu
    f0 = q * (xu[0] * xv[0] + xu[1] * xv[1]) + wu * wv
    g0 = q * (xv[0] * xv[0] + xv[1] * xv[1]) + wv * wv
    return e0, f0, g0


def _surface_rhs(params: MetricParams, profile: RevolutionProfile, y4, h: float = 1e-6):
    u, v, du, dv = y4
    if not profile.contains(u):
        raise DomainError(f"u = {u!r} outside the profile domain")
    e0, f0, g0 = _induced_metric(params, profile, u, v)
    lo, hi = profile.u_domain
    if u - h < lo or u + h > hi:
        # one-sided shift keeps the stencil inside the domain
        uc = min(max(u, lo + h), hi - h)
    else:
        uc = u
    ep, fp_, gp_ = _induced_metric(params, profile, uc + h, v)
    em, fm, gm = _induced_metric(params, profile, uc - h, v)
    de = (ep - em) / (2.0 * h)
    df = (fp_ - fm) / (2.0 * h)
    dg = (gp_ - gm) / (2.0 * h)

    det = e0 * g0 - f0 * f0
    # Lowered symbols [ab, c] = (d_a h_bc + d_b h_ac - d_c h_ab)/2 with the
    # induced metric depending on u only:
    l_uu_u = 0.5 * de
    l_uu_v = df
    l_uv_u = 0.0
    l_uv_v = 0.5 * dg
    l_vv_u = -0.5 * dg
    l_vv_v = 0.0

    # raise the first index with the inverse of [[e, f], [f, g]]
    h_uu = g0 / det
    h_uv = -f0 / det
    h_vv = e0 / det

    g_u_uu = h_uu * l_uu_u + h_uv * l_uu_v
    g_v_uu = h_uv * l_uu_u + h_vv * l_uu_v
    g_u_uv = h_uu * l_uv_u + h_uv * l_uv_v
    g_v_uv = h_uv * l_uv_u + h_vv * l_uv_v
    g_u_vv = h_uu * l_vv_u + h_uv * l_vv_v
    g_v_vv = h_uv * l_vv_u + h_vv * l_vv_v

    acc_u = -(g_u_uu * du * du + 2.0 * g_u_uv * du * dv + g_u_vv * dv * dv)
    acc_v = -(g_v_uu * du * du + 2.0 * g_v_uv * du * dv + g_v_vv * dv * dv)
    return np.array([du, dv, acc_u, acc_v])


@dataclass
class SurfaceTrajectory:
    """Sampled surface geodesic with conserved-quantity annotations."""

    params: MetricParams
    profile: RevolutionProfile
    ts: np.ndarray
    states: np.ndarray  # rows (u, v, du, dv)
    momenta: np.ndarray  # p_v = 2 G v' + 2 F u'
    speeds: np.ndarray  # induced-metric speed
    exit_reason: str

    @property
    def complete(self) -> bool:
        return self.exit_reason == "complete"


def surface_geodesic_integrate(
    params: MetricParams,
    profile: RevolutionProfile,
    s0: SurfaceGeodesicState,
    t_max: float,
    tol: float = SURFACE_DEFAULT_TOL,
    samples: int | None = None,
) -> SurfaceTrajectory:
    """Integrate the geodesic equations of the induced metric.

    Conserves the induced speed and the rotational momentum
    p_v = 2 G v' + 2 F u' to integrator accuracy.  Leaving the profile
    domain ends the run with the partial trajectory ("domain-exit").
    """
    lo, hi = profile.u_domain
    if not profile.contains(s0.u):
        raise ValueError(f"u0 = {s0.u!r} outside the profile domain [{lo!r}, {hi!r}]")

    def rhs(y4):
        return _surface_rhs(params, profile, y4)

    margin = 2e-6 * (hi - lo)

    def guard(y4):
        return lo + margin <= y4[0] <= hi - margin

    ts, ys, fs, exit_reason = _rk.rk45(
        rhs, s0.as_array(), t_max, tol, guard=guard, guard_error=DomainError
    )
    if samples is not None:
        t_out = np.linspace(0.0, ts[-1], samples)
        y_out = _rk.hermite_sample(ts, ys, fs, t_out)
    else:
        t_out, y_out = ts, ys

    n = len(t_out)
    momenta = np.empty(n)
    speeds = np.empty(n)
    for i in range(n):
        u, v, du, dv = y_out[i]
        e0, f0, g0 = _induced_metric(params, profile, u, v)
        momenta[i] = 2.0 * g0 * dv + 2.0 * f0 * du
        speeds[i] = math.sqrt(max(e0 * du * du + 2.0 * f0 * du * dv + g0 * dv * dv, 0.0))
    return SurfaceTrajectory(
        params=params,
        profile=profile,
        ts=np.asarray(t_out, dtype=float),
        states=np.asarray(y_out, dtype=float),
        momenta=momenta,
        speeds=speeds,
        exit_reason=exit_reason,
    )


def parallel_is_geodesic(
    params: MetricParams, profile: RevolutionProfile, u0: float
) -> tuple[bool, float]:
    """Whether the parallel u = u0 is a surface geodesic.

    Residual: f'(u0) (2 + l^2 f^2 - 2 m f^2) / (1 + m f^2)^3, zero exactly
    when the rotational momentum is critical at u0.
    """
    l, m = params.l, params.m
    fv, fpv = profile.f(u0), profile.fp(u0)
    d = 1.0 + m * fv * fv
    residual = fpv * (2.0 + l * l * fv * fv - 2.0 * m * fv * fv) / d ** 3
    return abs(residual) < PARALLEL_TOL, residual


def meridian_is_geodesic(
    params: MetricParams, profile: RevolutionProfile, n: int = 256
) -> tuple[bool, float]:
    """Whether the meridians v = const are surface geodesics.

    The quantity l f^2 sqrt((1 + m f^2)^2 - f'^2) / (1 + m f^2)^2 (the
    rotational momentum of a unit-speed meridian) must be constant in u;
    returns (verdict, max - min over an n-point grid).  Requires the
    profile to satisfy the arc-length normalisation, i.e. a nonnegative
    radicand.
    """
    l, m = params.l, params.m
    vals = np.empty(n)
    for i, u in enumerate(profile.grid(n)):
        fv, fpv = profile.f(u), profile.fp(u)
        d = 1.0 + m * fv * fv
        rad = d * d - fpv * fpv
        scale = d * d + fpv * fpv
        if rad < -1e-12 * scale:
            raise ValueError(
                f"negative radicand at u = {u!r}: profile is not unit-compatible"
            )
        if rad < 1e-13 * scale:
            # vanishing radicand up to rounding (tan/tanh slices): the
            # square root would amplify cancellation noise to ~1e-8
            rad = 0.0
        vals[i] = l * fv * fv * math.sqrt(max(rad, 0.0)) / (d * d)
    deviation = float(np.max(vals) - np.min(vals))
    return deviation < MERIDIAN_TOL, deviation


def meridian_profile_ode_residual(params: MetricParams, profile: RevolutionProfile, u: float) -> float:
    """Residual of the radius equation characterising meridian-geodesic
    profiles (beyond cylinders and the tan/tanh/linear solutions):

    2 f' + 4 m f^2 f' + 2 m^2 f^4 f' - 2 f'^3 + 2 m f^2 f'^3
        - f f' f'' - m f^3 f' f''.
    """
    m = params.m
    fv, fpv, fppv = profile.f(u), profile.fp(u), profile.fpp(u)
    return (
        2.0 * fpv
        + 4.0 * m * fv * fv * fpv
        + 2.0 * m * m * fv ** 4 * fpv
        - 2.0 * fpv ** 3
        + 2.0 * m * fv * fv * fpv ** 3
        - fv * fpv * fppv
        - m * fv ** 3 * fpv * fppv
    )
