"""k-epsilon mean-flow data and the globalized dimensional fluctuation field.

Flow data come either from a rectilinear y-z grid (CSV + JSON sidecar,
bilinear interpolation) or from an analytic self-similar planar free jet
that stands in for CFD fields: supersonic slot inlet, Gaussian cross
profile, classical ``z^(-1/2)`` centerline decay, and turbulence scales
matching the ranges of a melt-blowing air stream.  The globalization wraps
the dimensionless local fluctuation field with the pointwise turbulence
scales, so the sampled global field carries the local kinetic energy
exactly.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import fieldsampler as _fsamp
from . import spectrum as _spec
from .errors import ConfigError, DomainError, DomainExitError
from .fieldsampler import LocalFrame, ParameterSet

__all__ = [
    "FlowSample",
    "FlowFieldGrid",
    "SyntheticJetParams",
    "SyntheticPlanarJet",
    "synthetic_planar_jet",
    "load_flow_csv",
    "write_flow_csv",
    "interpolate",
    "grid_sampler",
    "grid_from_sampler",
    "eval_global_fluctuation",
]

_LN2 = math.log(2.0)
_SQRT_PI_LN2 = 0.5 * math.sqrt(math.pi / _LN2)


@dataclass(frozen=True)
class FlowSample:
    """Mean flow and turbulence statistics at one point."""

    u: np.ndarray          # mean velocity [m/s], u_x = 0 by slot homogeneity
    k: float               # turbulent kinetic energy [m^2/s^2]
    eps: float             # dissipation rate [m^2/s^3]
    nu: float              # kinematic viscosity [m^2/s]
    rho: float             # density [kg/m^3]

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float).reshape(3).copy()
        u.setflags(write=False)
        object.__setattr__(self, "u", u)
        if self.k <= 0.0 or self.eps <= 0.0:
            raise DomainError("flow sample requires k > 0 and eps > 0")

    @property
    def zeta(self) -> float:
        """Fine-to-large scale ratio eps * nu / k^2."""
        return self.eps * self.nu / self.k**2

    @property
    def l_turb(self) -> float:
        """Turbulent large-scale length k^(3/2) / eps [m]."""
        return self.k**1.5 / self.eps

    @property
    def t_turb(self) -> float:
        """Turbulent large-scale time k / eps [s]."""
        return self.k / self.eps


@dataclass(frozen=True)
class FlowFieldGrid:
    """Gridded stationary mean flow over a rectilinear y-z domain.

    Field arrays are indexed ``[iz, iy]``; viscosity and density are uniform.
    """

    y: np.ndarray
    z: np.ndarray
    u_y: np.ndarray
    u_z: np.ndarray
    k: np.ndarray
    eps: np.ndarray
    nu: float
    rho: float

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        z = np.asarray(self.z, dtype=float)
        if y.size < 2 or z.size < 2:
            raise DomainError("grid needs at least 2 nodes per axis")
        if np.any(np.diff(y) <= 0.0) or np.any(np.diff(z) <= 0.0):
            raise DomainError("grid axes must be strictly increasing")
        shape = (z.size, y.size)
        for name in ("u_y", "u_z", "k", "eps"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise DomainError(f"field '{name}' shape {arr.shape} != grid shape {shape}")
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        for name in ("k", "eps"):
            arr = getattr(self, name)
            bad = np.argwhere(arr <= 0.0)
            if bad.size:
                iz, iy = bad[0]
                raise DomainError(
                    f"non-positive {name} at node (z index {iz}, y index {iy}): {arr[iz, iy]}"
                )
        if self.nu <= 0.0 or self.rho <= 0.0:
            raise DomainError("nu and rho must be positive")
        for name, arr in (("y", y), ("z", z)):
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class SyntheticJetParams:
    """Parameters of the analytic planar free jet (defaults: paper's nozzle)."""

    inlet_speed: float = 400.0        # [m/s]
    inlet_k: float = 1.0e3            # [m^2/s^2]
    inlet_eps: float = 1.0e8          # [m^2/s^3]
    half_width: float = 3.0e-4        # slot half-width b0 [m]
    virtual_origin: float = 1.0e-3    # z0 [m]
    spreading: float = 0.11           # jet spreading rate S [-]
    speed_exponent: float = 0.5       # centerline speed ~ s^(-p)
    k_exponent: float = 0.0           # centerline k ~ s^(-p); 0 = sustained
    eps_exponent: float = 0.1         # centerline eps ~ s^(-p)
    nu: float = 1.5e-5                # [m^2/s]
    rho: float = 1.0                  # [kg/m^3]

    def __post_init__(self):
        for name in (
            "inlet_speed", "inlet_k", "inlet_eps", "half_width",
            "virtual_origin", "spreading", "nu", "rho",
        ):
            if getattr(self, name) <= 0.0:
                raise DomainError(f"synthetic jet parameter '{name}' must be positive")
        for name in ("speed_exponent", "k_exponent", "eps_exponent"):
            if getattr(self, name) < 0.0:
                raise DomainError(f"synthetic jet parameter '{name}' must be nonnegative")


class SyntheticPlanarJet:
    """Analytic self-similar planar jet blowing in the -z direction.

    Centerline speed is clipped to the inlet value inside the potential core
    and decays like ``s^(-speed_exponent)`` beyond it (s = |z| + virtual
    origin); the cross profile is a Gaussian of half-width ``b(z)``; the
    transverse velocity follows from exact 2D continuity of that ansatz.
    Centerline k decays with its own exponent and eps is tied to
    ``k^(3/2) / b``, so l_T grows linearly with the jet width and the
    viscosity ratio zeta decays downstream of the nozzle.
    """

    def __init__(self, params: SyntheticJetParams = SyntheticJetParams()):
        self.params = params

    def _centerline(self, s):
        """Centerline speed, k, eps and their shared core clipping at offset s."""
        p = self.params
        ratio = p.half_width / (p.spreading * s)
        u_c = p.inlet_speed * min(1.0, ratio**p.speed_exponent)
        k_c = p.inlet_k * min(1.0, ratio**p.k_exponent)
        eps_c = p.inlet_eps * min(1.0, ratio**p.eps_exponent)
        b = p.half_width + p.spreading * s
        return u_c, k_c, eps_c, b

    def __call__(self, x, t=0.0) -> FlowSample:
        p = self.params
        y, z = float(x[1]), float(x[2])
        s = abs(z) + p.virtual_origin
        u_c, k_c, eps_c, b = self._centerline(s)
        eta = y / b
        prof = math.exp(-_LN2 * eta * eta)
        u_axial = u_c * prof

        # transverse component from continuity of u_z = -U_c(s) f(y/b(s))
        in_core = p.spreading * s <= p.half_width
        duc_ds = 0.0 if in_core else -p.speed_exponent * u_c / s
        db_ds = p.spreading
        big_f = _SQRT_PI_LN2 * math.erf(math.sqrt(_LN2) * eta)
        u_trans = -(duc_ds * b + u_c * db_ds) * big_f + u_c * db_ds * eta * prof

        return FlowSample(
            u=np.array([0.0, u_trans, -u_axial]),
            k=k_c,
            eps=eps_c,
            nu=p.nu,
            rho=p.rho,
        )


def synthetic_planar_jet(params: SyntheticJetParams = SyntheticJetParams()) -> SyntheticPlanarJet:
    """Build the analytic jet flow-sampling function."""
    return SyntheticPlanarJet(params)


_CSV_COLUMNS = ["y", "z", "u_y", "u_z", "k", "eps"]


def _sidecar_path(path: Path) -> Path:
    return path.with_suffix(".json")


def load_flow_csv(path) -> FlowFieldGrid:
    """Load a gridded flow field from CSV plus its JSON sidecar.

    Format: header ``y,z,u_y,u_z,k,eps``; one row per node in z-major order
    over a rectilinear grid; sidecar ``{"nu":..., "rho":..., "ny":..., "nz":...}``
    next to the CSV.
    """
    path = Path(path)
    side = _sidecar_path(path)
    if not path.exists():
        raise ConfigError(f"flow file not found: {path}")
    if not side.exists():
        raise ConfigError(f"flow sidecar not found: {side}")
    try:
        meta = json.loads(side.read_text())
        nu, rho = float(meta["nu"]), float(meta["rho"])
        ny, nz = int(meta["ny"]), int(meta["nz"])
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise ConfigError(f"invalid flow sidecar {side}: {exc}") from exc

    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != _CSV_COLUMNS:
            raise ConfigError(f"{path}:1: expected header {','.join(_CSV_COLUMNS)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 6:
                raise ConfigError(f"{path}:{lineno}: expected 6 columns, got {len(row)}")
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}") from exc
    if len(rows) != ny * nz:
        raise ConfigError(f"{path}: {len(rows)} data rows, sidecar promises ny*nz = {ny * nz}")

    data = np.asarray(rows)
    y_axis = data[:ny, 0]
    z_axis = data[::ny, 1]
    expect_y = np.tile(y_axis, nz)
    expect_z = np.repeat(z_axis, ny)
    if not (np.array_equal(data[:, 0], expect_y) and np.array_equal(data[:, 1], expect_z)):
        raise ConfigError(f"{path}: node coordinates are not in z-major rectilinear order")

    fields = {
        name: data[:, i].reshape(nz, ny)
        for i, name in enumerate(_CSV_COLUMNS[2:], start=2)
    }
    return FlowFieldGrid(y=y_axis, z=z_axis, nu=nu, rho=rho, **fields)


def write_flow_csv(grid: FlowFieldGrid, path) -> None:
    """Write a grid in the CSV + sidecar format of :func:`load_flow_csv`."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_COLUMNS)
        for iz, zv in enumerate(grid.z):
            for iy, yv in enumerate(grid.y):
                writer.writerow(
                    [
                        repr(float(v))
                        for v in (
                            yv, zv,
                            grid.u_y[iz, iy], grid.u_z[iz, iy],
                            grid.k[iz, iy], grid.eps[iz, iy],
                        )
                    ]
                )
    meta = {"nu": grid.nu, "rho": grid.rho, "ny": int(grid.y.size), "nz": int(grid.z.size)}
    _sidecar_path(path).write_text(json.dumps(meta) + "\n")


def interpolate(grid: FlowFieldGrid, x, t: float = 0.0) -> FlowSample:
    """Bilinear sample of all nodal fields at position x (x-coordinate ignored).

    Raises DomainExitError outside the grid bounding box; the jet simulator
    treats that as trajectory termination.
    """
    y, z = float(x[1]), float(x[2])
    ya, za = grid.y, grid.z
    if not (ya[0] <= y <= ya[-1] and za[0] <= z <= za[-1]):
        raise DomainExitError(x)
    iy = min(int(np.searchsorted(ya, y, side="right") - 1), ya.size - 2)
    iz = min(int(np.searchsorted(za, z, side="right") - 1), za.size - 2)
    fy = (y - ya[iy]) / (ya[iy + 1] - ya[iy])
    fz = (z - za[iz]) / (za[iz + 1] - za[iz])

    def bil(field):
        return (
            field[iz, iy] * (1 - fz) * (1 - fy)
            + field[iz, iy + 1] * (1 - fz) * fy
            + field[iz + 1, iy] * fz * (1 - fy)
            + field[iz + 1, iy + 1] * fz * fy
        )

    return FlowSample(
        u=np.array([0.0, bil(grid.u_y), bil(grid.u_z)]),
        k=float(bil(grid.k)),
        eps=float(bil(grid.eps)),
        nu=grid.nu,
        rho=grid.rho,
    )


def grid_sampler(grid: FlowFieldGrid):
    """Wrap a grid as a flow-sampling callable (x, t) -> FlowSample."""

    def sample(x, t=0.0):
        return interpolate(grid, x, t)

    return sample


def grid_from_sampler(sampler, y, z, nu=None, rho=None) -> FlowFieldGrid:
    """Tabulate a flow-sampling function onto a rectilinear grid."""
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    u_y = np.empty((z.size, y.size))
    u_z = np.empty_like(u_y)
    k = np.empty_like(u_y)
    eps = np.empty_like(u_y)
    probe = sampler(np.array([0.0, y[0], z[0]]), 0.0)
    for iz, zv in enumerate(z):
        for iy, yv in enumerate(y):
            s = sampler(np.array([0.0, yv, zv]), 0.0)
            u_y[iz, iy], u_z[iz, iy] = s.u[1], s.u[2]
            k[iz, iy], eps[iz, iy] = s.k, s.eps
    return FlowFieldGrid(
        y=y, z=z, u_y=u_y, u_z=u_z, k=k, eps=eps,
        nu=probe.nu if nu is None else nu,
        rho=probe.rho if rho is None else rho,
    )


def eval_global_fluctuation(
    x,
    t,
    flow,
    ps: ParameterSet,
    mode: str = "zero",
    t_large: float = _spec.T_LARGE_DEFAULT,
) -> np.ndarray:
    """Dimensional fluctuation velocity at (x, t) via pointwise rescaling.

    Evaluates ``sqrt(k) * u'_loc(eps/k^(3/2) x, eps/k t)`` with the turbulence
    scales sampled at (x, t).  In ``zero`` mode (the default) the parameter
    set must have been drawn from the parameter-free zeta = 0 spectrum; in
    ``full`` mode the caller is responsible for having drawn it at the local
    viscosity ratio (exact for constant-zeta flows).
    """
    if mode not in ("zero", "full"):
        raise DomainError(f"unknown globalization mode '{mode}'")
    if mode == "zero" and ps.zeta != 0.0:
        raise DomainError("zero-zeta globalization requires a parameter set drawn at zeta = 0")
    sampler = grid_sampler(flow) if isinstance(flow, FlowFieldGrid) else flow
    s = sampler(x, t)
    sqrt_k = math.sqrt(s.k)
    x_hat = (s.eps / s.k**1.5) * np.asarray(x, dtype=float)
    t_hat = (s.eps / s.k) * float(t)
    frame = LocalFrame(zeta=s.zeta if mode == "full" else 0.0,
                       mean_velocity=s.u / sqrt_k, t_large=t_large)
    return sqrt_k * _fsamp.eval_local_fluctuation(x_hat, t_hat, ps, frame)
