"""Random-ODE dynamics of a melt-blown fiber jet point.

The state is (position r, velocity v, elongation e).  The aerodynamic drag
closure acts on the relative velocity between the (mean + fluctuating) air
flow and the fiber, scaled by the elongation-dependent slenderness factors;
the elongation grows with the drag magnitude, which rectifies random slip
into monotone stretching.  Integration uses an embedded Dormand-Prince 5(4)
pair with proportional-integral step-size control, recording the turbulent
time scales alongside each accepted step so the step-resolution monitor can
be checked after the fact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import flowfield as _ff
from . import spectrum as _spec
from .errors import DomainError, DomainExitError, NumericalError
from .fieldsampler import ParameterSet
from .flowfield import FlowFieldGrid, FlowSample, SyntheticPlanarJet

__all__ = [
    "FiberParams",
    "JetState",
    "QuadraticDrag",
    "Tolerances",
    "TrajectoryRecord",
    "MonteCarloResult",
    "coefficient_a",
    "coefficient_b",
    "default_drag",
    "ode_rhs",
    "integrate_trajectory",
    "monte_carlo_elongation",
]


@dataclass(frozen=True)
class FiberParams:
    """Fiber-point initial data and material constants (paper defaults)."""

    v0: float = 1.0e-2                  # nozzle exit speed [m/s]
    d0: float = 4.0e-4                  # nozzle diameter [m]
    rho_fiber: float = 7.0e2            # fiber density [kg/m^3]
    r0: tuple = (0.0, 0.0, 0.0)         # initial position [m]
    tau0: tuple = (0.0, 0.0, -1.0)      # initial direction (spinning: -z)
    horizon: float = 1.0e-3             # simulated interval [0, T) [s]

    def __post_init__(self):
        if min(self.v0, self.d0, self.rho_fiber, self.horizon) <= 0.0:
            raise DomainError("v0, d0, rho_fiber and horizon must be positive")
        tau = np.asarray(self.tau0, dtype=float)
        if abs(np.linalg.norm(tau) - 1.0) > 1e-12:
            raise DomainError("tau0 must be a unit vector")


@dataclass(frozen=True)
class JetState:
    """Fiber point state: position [m], velocity [m/s], elongation [-]."""

    r: np.ndarray
    v: np.ndarray
    e: float

    def __post_init__(self):
        object.__setattr__(self, "r", np.asarray(self.r, dtype=float).reshape(3))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float).reshape(3))
        if self.e < 1.0:
            raise DomainError("elongation cannot fall below 1")


@dataclass(frozen=True)
class QuadraticDrag:
    """Independence-principle closure: quadratic in the normal/tangential slip.

    f(tau, w) = c_normal |w_n| w_n + c_tangent |w_t| w_t with w decomposed
    along the unit tangent.  Vanishes at zero slip and is covariant under
    joint rotation of tangent and slip.
    """

    c_normal: float = 1.0
    c_tangent: float = 0.1

    def __call__(self, tau_hat, w):
        w = np.asarray(w, dtype=float)
        tau_hat = np.asarray(tau_hat, dtype=float)
        w_t = (w @ tau_hat) * tau_hat
        w_n = w - w_t
        return (
            self.c_normal * np.linalg.norm(w_n) * w_n
            + self.c_tangent * np.linalg.norm(w_t) * w_t
        )


def default_drag(tau_hat, w, c_normal: float = 1.0, c_tangent: float = 0.1):
    """Evaluate the default quadratic closure once (see QuadraticDrag)."""
    return QuadraticDrag(c_normal, c_tangent)(tau_hat, w)


def coefficient_a(sample: FlowSample, fp: FiberParams) -> float:
    """Drag acceleration scale (4/pi) rho nu^2 / (rho_F d0^3) [m/s^2]."""
    return 4.0 / math.pi * sample.rho * sample.nu**2 / (fp.rho_fiber * fp.d0**3)


def coefficient_b(sample: FlowSample, fp: FiberParams) -> float:
    """Slip velocity scale nu / d0 [m/s]."""
    return sample.nu / fp.d0


def ode_rhs(t, state, flow_sampler, fluctuation, closure, fp: FiberParams):
    """Time derivative of the packed state (r, v, e).

    ``fluctuation`` is a callable (r, t) -> u' or None for the deterministic
    baseline; ``flow_sampler`` yields the FlowSample providing the mean flow
    and the coefficient inputs.
    """
    r = state[0:3]
    v = state[3:6]
    e = state[6]
    sample = flow_sampler(r, t)
    speed = math.sqrt(v[0] ** 2 + v[1] ** 2 + v[2] ** 2)
    if speed == 0.0:
        raise NumericalError("singular tangent: fiber velocity vanished", t=t)
    u = sample.u.copy()
    if fluctuation is not None:
        u += fluctuation(r, t)
    a = coefficient_a(sample, fp)
    b = coefficient_b(sample, fp)
    sqrt_e = math.sqrt(e)
    w = (u - v) / (sqrt_e * b)
    f = closure(v / speed, w)
    scale = e * sqrt_e * a
    out = np.empty(7)
    out[0:3] = v
    out[3:6] = scale * f
    out[6] = scale * math.sqrt(f[0] ** 2 + f[1] ** 2 + f[2] ** 2) / fp.v0
    return out


@dataclass(frozen=True)
class Tolerances:
    """Adaptive step control settings for the embedded 5(4) pair."""

    rtol: float = 1.0e-3
    atol: float = 1.0e-9
    h0: float = 1.0e-8
    h_min: float = 1.0e-12      # hard floor: below this the run is declared stiff
    max_steps: int = 20_000_000


@dataclass
class TrajectoryRecord:
    """Per-accepted-step time series of one replication plus diagnostics."""

    t: np.ndarray
    r: np.ndarray               # (n, 3)
    v: np.ndarray               # (n, 3)
    e: np.ndarray
    dt: np.ndarray
    t_turb: np.ndarray          # dimensional k/eps at the step's end point
    l_over_vrel: np.ndarray     # l_T / |ubar - v| (inf at zero relative speed)
    u: np.ndarray               # (n, 3) air velocity (incl. fluctuation) at r
    termination: str            # "horizon", "domain_exit"
    crossings: dict             # height [m] -> (t, e) at first downward crossing
    n_rhs: int

    @property
    def final_state(self) -> JetState:
        return JetState(self.r[-1], self.v[-1], float(self.e[-1]))


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])

_SAFETY = 0.9
_PI_ALPHA = 0.7 / 5.0
_PI_BETA = 0.4 / 5.0


def _fluctuation_closure(flow, ps, mode, t_large):
    if ps is None:
        return None

    def fluct(r, t):
        return _ff.eval_global_fluctuation(r, t, flow, ps, mode=mode, t_large=t_large)

    return fluct


def integrate_trajectory(
    fp: FiberParams,
    flow,
    ps: ParameterSet | None = None,
    closure=QuadraticDrag(),
    tol: Tolerances = Tolerances(),
    mode: str = "zero",
    t_large: float = _spec.T_LARGE_DEFAULT,
    heights: tuple = (),
    record: bool = True,
    use_fast_path: bool | None = None,
) -> TrajectoryRecord:
    """Integrate the fiber-point system on [0, horizon).

    With ``ps = None`` the fluctuations are off (deterministic baseline).
    ``heights`` are z levels whose first downward crossing is located by
    linear interpolation between the bracketing accepted steps.  The numba
    fast path is used automatically for the synthetic jet with the quadratic
    closure; pass ``use_fast_path=False`` to force the reference
    implementation (results agree to solver precision).
    """
    sampler = _ff.grid_sampler(flow) if isinstance(flow, FlowFieldGrid) else flow

    rhs = None
    if use_fast_path is not False:
        rhs = _try_fast_rhs(flow, ps, closure, fp, mode, t_large)
    if rhs is None:
        if use_fast_path is True:
            raise DomainError("fast path unavailable for this flow/closure combination")
        fluct = _fluctuation_closure(sampler, ps, mode, t_large)

        def rhs(t, y):
            return ode_rhs(t, y, sampler, fluct, closure, fp)

    y = np.empty(7)
    y[0:3] = fp.r0
    y[3:6] = fp.v0 * np.asarray(fp.tau0, dtype=float)
    y[6] = 1.0
    t = 0.0
    t_end = fp.horizon

    rows = []
    crossings: dict = {}
    pending = sorted(heights, reverse=True)  # crossed in this order moving down
    n_rhs = 0
    termination = "horizon"

    h = min(tol.h0, t_end)
    err_prev = 1.0
    k_stages = np.empty((7, 7))
    try:
        f_first = rhs(t, y)
        n_rhs += 1
    except DomainExitError:
        raise DomainError("initial position lies outside the flow domain") from None

    steps = 0
    while t < t_end:
        h = min(h, t_end - t)
        if h < tol.h_min:
            raise NumericalError(
                "step size underflow: system too stiff at current tolerances",
                t=t, h=h, state=y.copy(),
            )
        if steps >= tol.max_steps:
            raise NumericalError("step budget exhausted", t=t, h=h, steps=steps)

        exited = False
        k_stages[0] = f_first
        try:
            for i in range(1, 7):
                yi = y + h * (k_stages[:i].T @ _A[i])
                k_stages[i] = rhs(t + _C[i] * h, yi)
            n_rhs += 6
        except DomainExitError:
            exited = True

        if not exited:
            y_new = y + h * (k_stages.T @ _B)
            err_vec = h * (k_stages.T @ _E)
            scale = tol.atol + tol.rtol * np.maximum(np.abs(y), np.abs(y_new))
            err = math.sqrt(float(np.mean((err_vec / scale) ** 2)))
        steps += 1

        if exited or err > 1.0:
            if exited:
                # trial stage left the domain: shrink toward the boundary
                h *= 0.5
                if h < tol.h_min:
                    termination = "domain_exit"
                    break
            else:
                fac = max(0.1, _SAFETY * err ** (-0.2))
                h *= min(1.0, fac)
            continue

        t_new = t + h
        e_prev, e_new = y[6], y_new[6]
        r3_prev, r3_new = y[2], y_new[2]
        while pending and r3_prev > pending[0] >= r3_new:
            target = pending.pop(0)
            frac = (r3_prev - target) / (r3_prev - r3_new)
            crossings[target] = (t + frac * h, e_prev + frac * (e_new - e_prev))

        if record:
            rows.append(_diagnostics_row(t_new, y_new, h, sampler, ps, mode, t_large))

        f_first = k_stages[6]  # FSAL
        y = y_new
        t = t_new
        fac = _SAFETY * err ** (-_PI_ALPHA) * err_prev**_PI_BETA
        h *= min(5.0, max(0.2, fac))
        err_prev = max(err, 1e-10)

    if record and rows:
        cols = np.array(rows)
        rec = TrajectoryRecord(
            t=cols[:, 0], r=cols[:, 1:4], v=cols[:, 4:7], e=cols[:, 7],
            dt=cols[:, 8], t_turb=cols[:, 9], l_over_vrel=cols[:, 10],
            u=cols[:, 11:14], termination=termination, crossings=crossings,
            n_rhs=n_rhs,
        )
    else:
        rec = TrajectoryRecord(
            t=np.array([t]), r=y[None, 0:3].copy(), v=y[None, 3:6].copy(),
            e=np.array([y[6]]), dt=np.array([h]), t_turb=np.array([np.nan]),
            l_over_vrel=np.array([np.nan]), u=np.full((1, 3), np.nan),
            termination=termination, crossings=crossings, n_rhs=n_rhs,
        )
    return rec


def _diagnostics_row(t, y, h, sampler, ps, mode, t_large):
    sample = sampler(y[0:3], t)
    u = sample.u.copy()
    if ps is not None:
        u += _ff.eval_global_fluctuation(y[0:3], t, sampler, ps, mode=mode, t_large=t_large)
    vrel = float(np.linalg.norm(sample.u - y[3:6]))
    l_over = sample.l_turb / vrel if vrel > 0.0 else math.inf
    return [
        t, y[0], y[1], y[2], y[3], y[4], y[5], y[6],
        h, sample.t_turb, l_over, u[0], u[1], u[2],
    ]


def _try_fast_rhs(flow, ps, closure, fp, mode, t_large):
    """Compiled right-hand side for the default configuration, if applicable."""
    if not isinstance(flow, SyntheticPlanarJet) or not isinstance(closure, QuadraticDrag):
        return None
    if ps is not None and (ps.branch != "re" or mode != "zero"):
        return None
    try:
        from . import _fastpath
    except ImportError:
        return None
    return _fastpath.make_rhs(flow.params, fp, closure, ps, t_large)


@dataclass
class MonteCarloResult:
    """Raw per-replication elongation samples plus summary statistics."""

    heights: tuple
    samples: dict               # height -> (n,) array, NaN where not reached
    terminal: np.ndarray        # (n,) elongation at the horizon
    crossing_times: dict        # height -> (n,) array of first-crossing times
    failures: list              # (replication index, reason) pairs
    seed: int
    n_samples: int

    @property
    def failure_fraction(self) -> float:
        return len(self.failures) / max(self.n_samples, 1)

    def summary(self) -> dict:
        quantiles = (0.05, 0.25, 0.5, 0.75, 0.95)
        out = {
            "n_samples": self.n_samples,
            "seed": self.seed,
            "failure_fraction": self.failure_fraction,
            "heights": {},
        }
        for height in self.heights:
            vals = self.samples[height]
            ok = vals[np.isfinite(vals)]
            entry = {"n_reached": int(ok.size)}
            if ok.size:
                entry["mean"] = float(ok.mean())
                entry["quantiles"] = {str(q): float(np.quantile(ok, q)) for q in quantiles}
            out["heights"][repr(float(height))] = entry
        ok = self.terminal[np.isfinite(self.terminal)]
        out["terminal"] = {
            "n": int(ok.size),
            "mean": float(ok.mean()) if ok.size else math.nan,
            "median": float(np.median(ok)) if ok.size else math.nan,
            "quantiles": {str(q): float(np.quantile(ok, q)) for q in (0.05, 0.25, 0.5, 0.75, 0.95)}
            if ok.size else {},
        }
        return out


def _mc_single(args):
    (rep, seed, n_modes, fp, jet_params, drag, tol, heights, fluctuations, mode, t_large) = args
    from . import fieldsampler as fsamp

    flow = SyntheticPlanarJet(jet_params) if jet_params is not None else None
    ps = None
    if fluctuations:
        model = _spec.build_model(0.0) if mode == "zero" else None
        ps = fsamp.draw_parameter_set(n_modes, model, seed, (rep,))
    try:
        rec = integrate_trajectory(
            fp, flow, ps=ps, closure=drag, tol=tol, mode=mode, t_large=t_large,
            heights=heights, record=False,
        )
        cross = {h: rec.crossings.get(h, (math.nan, math.nan)) for h in heights}
        return rep, cross, float(rec.e[-1]), rec.termination, None
    except (NumericalError, DomainExitError) as exc:
        return rep, {h: (math.nan, math.nan) for h in heights}, math.nan, "failed", str(exc)


def monte_carlo_elongation(
    fp: FiberParams,
    jet_params,
    closure=QuadraticDrag(),
    n_samples: int = 5000,
    heights: tuple = (-0.033, -0.066, -0.1),
    seed: int = 0,
    n_modes: int = 50,
    tol: Tolerances = Tolerances(),
    fluctuations: bool = True,
    mode: str = "zero",
    t_large: float = _spec.T_LARGE_DEFAULT,
    workers: int = 1,
) -> MonteCarloResult:
    """Monte Carlo over independent fiber trajectories on the synthetic jet.

    Each replication draws a fresh parameter set from the stream
    (seed, replication index), so results are independent of the worker
    count; failed replications are recorded, not fatal.
    """
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    heights = tuple(float(h) for h in heights)
    args = [
        (rep, seed, n_modes, fp, jet_params, closure, tol, heights,
         fluctuations, mode, t_large)
        for rep in range(n_samples)
    ]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_mc_single, args, chunksize=8))
    else:
        results = [_mc_single(a) for a in args]

    results.sort(key=lambda r: r[0])
    samples = {h: np.full(n_samples, np.nan) for h in heights}
    times = {h: np.full(n_samples, np.nan) for h in heights}
    terminal = np.full(n_samples, np.nan)
    failures = []
    for rep, cross, e_end, status, error in results:
        if status == "failed":
            failures.append((rep, error))
            continue
        terminal[rep] = e_end
        for h in heights:
            t_c, e_c = cross[h]
            times[h][rep] = t_c
            samples[h][rep] = e_c
    return MonteCarloResult(
        heights=heights, samples=samples, terminal=terminal,
        crossing_times=times, failures=failures, seed=seed, n_samples=n_samples,
    )
