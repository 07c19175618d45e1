"""Compiled right-hand side for the default simulation configuration.

Fuses the synthetic-jet sample, the globalized fluctuation superposition and
the quadratic drag closure into one njit kernel; the reference
implementation in jetdynamics/flowfield stays authoritative and the two are
asserted to agree in the test suite.  Only the zero-zeta, real-branch
configuration is compiled; anything else uses the Python path.
"""

import math

import numpy as np
from numba import njit

from .errors import NumericalError

_LN2 = math.log(2.0)
_SQRT_LN2 = math.sqrt(_LN2)
_SQRT_PI_LN2 = 0.5 * math.sqrt(math.pi / _LN2)


@njit(cache=True)
def _rhs_kernel(t, y, out, jp, fb, c_n, c_t,
                z, rxi, xxi, yxi, rpsi, xpsi, ypsi, t_large, use_fluct):
    u0, k0, eps0, b0, z0, spread, p_u, p_k, p_e, nu, rho = (
        jp[0], jp[1], jp[2], jp[3], jp[4], jp[5], jp[6], jp[7], jp[8], jp[9], jp[10],
    )
    v0, d0, rho_f = fb[0], fb[1], fb[2]

    yy = y[1]
    zz = y[2]
    s = abs(zz) + z0
    ratio = b0 / (spread * s)
    r_u = ratio**p_u
    if r_u > 1.0:
        r_u = 1.0
    u_c = u0 * r_u
    r_k = ratio**p_k
    if r_k > 1.0:
        r_k = 1.0
    k_c = k0 * r_k
    r_e = ratio**p_e
    if r_e > 1.0:
        r_e = 1.0
    eps_c = eps0 * r_e
    b_w = b0 + spread * s
    eta = yy / b_w
    prof = math.exp(-_LN2 * eta * eta)
    u_ax = u_c * prof
    duc_ds = 0.0 if spread * s <= b0 else -p_u * u_c / s
    big_f = _SQRT_PI_LN2 * math.erf(_SQRT_LN2 * eta)
    u_tr = -(duc_ds * b_w + u_c * spread) * big_f + u_c * spread * eta * prof

    ux = 0.0
    uy = u_tr
    uz = -u_ax
    if use_fluct:
        sqrt_k = math.sqrt(k_c)
        cx = eps_c / k_c**1.5
        t_hat = eps_c / k_c * t
        sx = cx * y[0] - (ux / sqrt_k) * t_hat
        sy = cx * y[1] - (uy / sqrt_k) * t_hat
        sz = cx * y[2] - (uz / sqrt_k) * t_hat
        n = z.shape[0]
        accx = 0.0
        accy = 0.0
        accz = 0.0
        for l in range(n):
            proj = sx * z[l, 0] + sy * z[l, 1] + sz * z[l, 2]
            ph_t = rpsi[l] * t_hat / t_large
            psi = xpsi[l] * math.cos(ph_t) - ypsi[l] * math.sin(ph_t)
            ph0 = rxi[l, 0] * proj
            w0 = xxi[l, 0] * math.cos(ph0) - yxi[l, 0] * math.sin(ph0)
            ph1 = rxi[l, 1] * proj
            w1 = xxi[l, 1] * math.cos(ph1) - yxi[l, 1] * math.sin(ph1)
            ph2 = rxi[l, 2] * proj
            w2 = xxi[l, 2] * math.cos(ph2) - yxi[l, 2] * math.sin(ph2)
            w_dot_z = w0 * z[l, 0] + w1 * z[l, 1] + w2 * z[l, 2]
            accx += (w0 - w_dot_z * z[l, 0]) * psi
            accy += (w1 - w_dot_z * z[l, 1]) * psi
            accz += (w2 - w_dot_z * z[l, 2]) * psi
        amp = sqrt_k / math.sqrt(n)
        ux += accx * amp
        uy += accy * amp
        uz += accz * amp

    vx, vy, vz, e = y[3], y[4], y[5], y[6]
    speed = math.sqrt(vx * vx + vy * vy + vz * vz)
    if speed == 0.0:
        return 1
    a_c = 4.0 / math.pi * rho * nu * nu / (rho_f * d0 * d0 * d0)
    b_c = nu / d0
    sqrt_e = math.sqrt(e)
    wx = (ux - vx) / (sqrt_e * b_c)
    wy = (uy - vy) / (sqrt_e * b_c)
    wz = (uz - vz) / (sqrt_e * b_c)
    tx, ty, tz = vx / speed, vy / speed, vz / speed
    w_t = wx * tx + wy * ty + wz * tz
    wtx, wty, wtz = w_t * tx, w_t * ty, w_t * tz
    wnx, wny, wnz = wx - wtx, wy - wty, wz - wtz
    norm_n = math.sqrt(wnx * wnx + wny * wny + wnz * wnz)
    norm_t = abs(w_t)
    fx = c_n * norm_n * wnx + c_t * norm_t * wtx
    fy = c_n * norm_n * wny + c_t * norm_t * wty
    fz = c_n * norm_n * wnz + c_t * norm_t * wtz
    scale = e * sqrt_e * a_c
    out[0] = vx
    out[1] = vy
    out[2] = vz
    out[3] = scale * fx
    out[4] = scale * fy
    out[5] = scale * fz
    out[6] = scale * math.sqrt(fx * fx + fy * fy + fz * fz) / v0
    return 0


_EMPTY_VEC = np.empty(0)
_EMPTY_MAT = np.empty((0, 3))


def make_rhs(jet_params, fiber_params, closure, ps, t_large):
    """Bind parameters into a (t, y) -> derivative callable on the kernel."""
    jp = np.array([
        jet_params.inlet_speed, jet_params.inlet_k, jet_params.inlet_eps,
        jet_params.half_width, jet_params.virtual_origin, jet_params.spreading,
        jet_params.speed_exponent, jet_params.k_exponent, jet_params.eps_exponent,
        jet_params.nu, jet_params.rho,
    ])
    fb = np.array([fiber_params.v0, fiber_params.d0, fiber_params.rho_fiber])
    c_n, c_t = closure.c_normal, closure.c_tangent
    if ps is None:
        z, rxi, xxi, yxi = _EMPTY_MAT, _EMPTY_MAT, _EMPTY_MAT, _EMPTY_MAT
        rpsi = xpsi = ypsi = _EMPTY_VEC
        use_fluct = False
    else:
        z, rxi, xxi, yxi = ps.z, ps.r_xi, ps.x_xi, ps.y_xi
        rpsi, xpsi, ypsi = ps.r_psi, ps.x_psi, ps.y_psi
        use_fluct = True
    buf = np.empty(7)

    def rhs(t, y):
        code = _rhs_kernel(t, y, buf, jp, fb, c_n, c_t,
                           z, rxi, xxi, yxi, rpsi, xpsi, ypsi, t_large, use_fluct)
        if code:
            raise NumericalError("singular tangent: fiber velocity vanished", t=t)
        return buf

    return rhs
