"""Adaptive embedded Runge-Kutta 4(5) stepper with Hermite dense output.

Classic six-stage Fehlberg 4(5) pair.  The fifth-order solution is
propagated (local extrapolation) and the pair difference drives the step
controller.  Dense output between accepted steps is cubic Hermite on
(y, f) at both ends.

The stepper is generic over the state dimension; the geodesic integrators
in `connection` and `surfaces` both run on it.
"""

from __future__ import annotations

import numpy as np

__all__ = ["StepSizeUnderflow", "IntegrationError", "rk45", "hermite_sample"]

# Fehlberg tableau
_C = (0.0, 0.25, 3.0 / 8.0, 12.0 / 13.0, 1.0, 0.5)
_A = (
    (),
    (0.25,),
    (3.0 / 32.0, 9.0 / 32.0),
    (1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0),
    (439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0),
    (-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0),
)
_B5 = (16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0, 2.0 / 55.0)
# b5 - b4, for the local error estimate of the fourth-order solution
_E = (
    16.0 / 135.0 - 25.0 / 216.0,
    0.0,
    6656.0 / 12825.0 - 1408.0 / 2565.0,
    28561.0 / 56430.0 - 2197.0 / 4104.0,
    -9.0 / 50.0 + 1.0 / 5.0,
    2.0 / 55.0,
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


class StepSizeUnderflow(RuntimeError):
    """The controller drove the step below the resolvable size."""


class IntegrationError(RuntimeError):
    """The step budget was exhausted before reaching t_max."""


def rk45(
    rhs,
    y0,
    t_max: float,
    tol: float,
    *,
    guard=None,
    guard_error=(),
    h0: float | None = None,
    h_max: float | None = None,
    max_steps: int = 500_000,
):
    """Integrate y' = rhs(y) from t=0 to t_max with local error <= tol.

    guard(y) -> bool marks states that are still acceptable; a step landing
    on a rejected state is retried with a smaller h, and if h underflows
    near the obstruction the partial solution is returned with exit reason
    "domain-exit".  `guard_error` is the exception type the rhs may raise
    for out-of-domain stage evaluations; it is handled the same way.

    Returns (ts, ys, fs, exit_reason) with the accepted knots and the rhs
    values there; exit_reason is "complete" or "domain-exit".
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if t_max <= 0.0:
        raise ValueError("t_max must be positive")
    y = np.asarray(y0, dtype=float).copy()
    if guard is not None and not guard(y):
        raise ValueError("initial state rejected by the domain guard")
    t = 0.0
    f = np.asarray(rhs(y), dtype=float)
    ts = [0.0]
    ys = [y.copy()]
    fs = [f.copy()]
    if h_max is None:
        h_max = max(t_max / 8.0, 1e-8)
    h = min(h_0_default(t_max) if h0 is None else h0, h_max, t_max)

    n_stages = 6
    k = [f] + [None] * (n_stages - 1)
    # While the guard keeps rejecting, h must not regrow, or the run creeps
    # forever toward an asymptotic obstruction; a clean acceptance (no
    # rejection since the previous accepted step) lifts the suppression so
    # paths that merely graze the boundary recover full step sizes.  A hard
    # budget of rejections ends runs whose state advances only at float
    # resolution against the obstruction (boundary-asymptotic geodesics).
    guard_hits = 0
    any_guard_hit = False
    guard_budget = 256
    for _ in range(max_steps):
        if t >= t_max - 1e-14 * max(1.0, t_max):
            return np.array(ts), np.array(ys), np.array(fs), "complete"
        h = min(h, t_max - t)
        if h < 1e-14 * max(1.0, abs(t)):
            if any_guard_hit:
                return np.array(ts), np.array(ys), np.array(fs), "domain-exit"
            raise StepSizeUnderflow(f"step size underflow at t = {t!r}")

        bad_stage = False
        try:
            for i in range(1, n_stages):
                yi = y.copy()
                ai = _A[i]
                for j in range(i):
                    yi += (h * ai[j]) * k[j]
                k[i] = np.asarray(rhs(yi), dtype=float)
        except guard_error:
            bad_stage = True

        if not bad_stage:
            y_new = y.copy()
            err = np.zeros_like(y)
            for i in range(n_stages):
                if _B5[i] != 0.0:
                    y_new += (h * _B5[i]) * k[i]
                if _E[i] != 0.0:
                    err += (h * _E[i]) * k[i]
            sc = tol + tol * np.maximum(np.abs(y), np.abs(y_new))
            err_norm = float(np.sqrt(np.mean((err / sc) ** 2)))
        else:
            err_norm = np.inf

        if err_norm <= 1.0:
            rejected = guard is not None and not guard(y_new)
            if not rejected:
                try:
                    f_new = np.asarray(rhs(y_new), dtype=float)
                except guard_error:
                    rejected = True
            if rejected:
                guard_hits += 1
                any_guard_hit = True
                guard_budget -= 1
                if guard_budget <= 0 or h < 1e-13 * max(1.0, abs(t)) or h <= 1e-15:
                    return np.array(ts), np.array(ys), np.array(fs), "domain-exit"
                h *= 0.5
                continue
            t += h
            y = y_new
            f = f_new
            k[0] = f
            ts.append(t)
            ys.append(y.copy())
            fs.append(f.copy())
            if guard_hits:
                # accepted while skirting the guard: hold h steady and
                # lift the suppression only after a clean acceptance
                guard_hits = 0
                h = min(h, h_max)
                continue
            if err_norm == 0.0:
                factor = _MAX_FACTOR
            else:
                factor = min(_MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * err_norm ** -0.2))
            h = min(h * factor, h_max)
        else:
            if bad_stage:
                guard_hits += 1
                any_guard_hit = True
                guard_budget -= 1
                if guard_budget <= 0:
                    return np.array(ts), np.array(ys), np.array(fs), "domain-exit"
            if not np.isfinite(err_norm):
                h *= 0.25
            else:
                h *= max(_MIN_FACTOR, _SAFETY * err_norm ** -0.2)
            if h < 1e-14 * max(1.0, abs(t)):
                if any_guard_hit:
                    return np.array(ts), np.array(ys), np.array(fs), "domain-exit"
                raise StepSizeUnderflow(f"step size underflow at t = {t!r}")
    raise IntegrationError(f"step budget exhausted at t = {t!r} < t_max = {t_max!r}")


def h_0_default(t_max: float) -> float:
    return min(1e-2, t_max / 100.0)


def hermite_sample(ts, ys, fs, t_query) -> np.ndarray:
    """Cubic Hermite interpolation of the accepted knots at times t_query.

    Query times must lie inside [ts[0], ts[-1]].
    """
    ts = np.asarray(ts)
    ys = np.asarray(ys)
    fs = np.asarray(fs)
    tq = np.atleast_1d(np.asarray(t_query, dtype=float))
    if tq.min() < ts[0] - 1e-12 or tq.max() > ts[-1] + 1e-12:
        raise ValueError("query time outside the integrated span")
    if len(ts) == 1:
        out = np.broadcast_to(ys[0], (len(tq),) + ys[0].shape).copy()
        return out if np.ndim(t_query) else out[0]
    idx = np.clip(np.searchsorted(ts, tq, side="right") - 1, 0, len(ts) - 2)
    t0 = ts[idx]
    h = ts[idx + 1] - t0
    s = np.clip((tq - t0) / h, 0.0, 1.0)[:, None]
    h_col = h[:, None]
    y0 = ys[idx]
    y1 = ys[idx + 1]
    f0 = fs[idx]
    f1 = fs[idx + 1]
    s2 = s * s
    s3 = s2 * s
    out = (
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0
        + (s3 - 2.0 * s2 + s) * h_col * f0
        + (-2.0 * s3 + 3.0 * s2) * y1
        + (s3 - s2) * h_col * f1
    )
    return out if np.ndim(t_query) else out[0]
