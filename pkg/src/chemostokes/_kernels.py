"""Hot-loop stencil kernels (numba).

The scalar update is organized as face-flux passes (branch-free interiors,
SIMD friendly) followed by a cell pass applying the divergence, kinetics and
the implicit consumption factor. Every output entry depends only on
previous-step data, so the parallel variants are race-free and
bit-reproducible for a fixed thread count.

Total flux per face (for a density n): F = -grad(n) + chi * n_donor * grad(c)
+ u * n_upwind; donor/upwind selection is with respect to the sign of the
face drift. Boundary faces carry no flux.

Stats layout returned by the scalar-step kernels:
    [min n1, max n1, min n2, max n2, min c, max c, sum n1, sum n2, sum c,
     max |grad c| over faces]
"""

import numpy as np
from numba import njit, prange

_BIG = 1e300


# --------------------------------------------------------------------------
# coupled explicit update for n1, n2 and the signal c
# --------------------------------------------------------------------------

def _scalar_step_1d(n1, n2, c, ux, hx, dt, chi1, chi2, mu1, mu2, a1c, a2c, al, be):
    nx = n1.shape[0]
    rhx = 1.0 / hx
    F1 = np.zeros(nx + 1)
    F2 = np.zeros(nx + 1)
    Fc = np.zeros(nx + 1)
    gmax = 0.0
    for i in range(1, nx):
        g = (c[i] - c[i - 1]) * rhx
        gmax = max(gmax, abs(g))
        uf = ux[i]
        a = n1[i - 1]; b = n1[i]
        F1[i] = -(b - a) * rhx + chi1 * (a if g > 0.0 else b) * g + uf * (a if uf > 0.0 else b)
        a = n2[i - 1]; b = n2[i]
        F2[i] = -(b - a) * rhx + chi2 * (a if g > 0.0 else b) * g + uf * (a if uf > 0.0 else b)
        a = c[i - 1]; b = c[i]
        Fc[i] = -(b - a) * rhx + uf * (a if uf > 0.0 else b)
    o1 = np.empty_like(n1)
    o2 = np.empty_like(n1)
    oc = np.empty_like(n1)
    mn1 = _BIG; mx1 = -_BIG; mn2 = _BIG; mx2 = -_BIG
    mnc = _BIG; mxc = -_BIG
    s1 = 0.0; s2 = 0.0; sc = 0.0
    for i in range(nx):
        v1 = n1[i]; v2 = n2[i]; vc = c[i]
        t1 = (F1[i] - F1[i + 1]) * rhx
        t2 = (F2[i] - F2[i + 1]) * rhx
        tc = (Fc[i] - Fc[i + 1]) * rhx
        r1 = mu1 * v1 * (1.0 - v1 - a1c * v2)
        r2 = mu2 * v2 * (1.0 - a2c * v1 - v2)
        w1 = v1 + dt * (t1 + r1)
        w2 = v2 + dt * (t2 + r2)
        wc = (vc + dt * tc) / (1.0 + dt * (al * v1 + be * v2))
        o1[i] = w1; o2[i] = w2; oc[i] = wc
        mn1 = min(mn1, w1); mx1 = max(mx1, w1)
        mn2 = min(mn2, w2); mx2 = max(mx2, w2)
        mnc = min(mnc, wc); mxc = max(mxc, wc)
        s1 += w1; s2 += w2; sc += wc
    stats = np.empty(10)
    stats[0] = mn1; stats[1] = mx1; stats[2] = mn2; stats[3] = mx2
    stats[4] = mnc; stats[5] = mxc; stats[6] = s1; stats[7] = s2
    stats[8] = sc; stats[9] = gmax
    return o1, o2, oc, stats


def _scalar_step_2d(n1, n2, c, ux, uy, hx, hy, dt, chi1, chi2, mu1, mu2, a1c, a2c, al, be):
    nx, ny = n1.shape
    rhx = 1.0 / hx
    rhy = 1.0 / hy
    F1x = np.empty((nx + 1, ny)); F2x = np.empty((nx + 1, ny)); Fcx = np.empty((nx + 1, ny))
    F1y = np.empty((nx, ny + 1)); F2y = np.empty((nx, ny + 1)); Fcy = np.empty((nx, ny + 1))
    for j in range(ny):
        F1x[0, j] = 0.0; F1x[nx, j] = 0.0
        F2x[0, j] = 0.0; F2x[nx, j] = 0.0
        Fcx[0, j] = 0.0; Fcx[nx, j] = 0.0
    for i in range(nx):
        F1y[i, 0] = 0.0; F1y[i, ny] = 0.0
        F2y[i, 0] = 0.0; F2y[i, ny] = 0.0
        Fcy[i, 0] = 0.0; Fcy[i, ny] = 0.0
    gmax = 0.0
    for i in prange(1, nx):
        for j in range(ny):
            g = (c[i, j] - c[i - 1, j]) * rhx
            gmax = max(gmax, abs(g))
            uf = ux[i, j]
            a = n1[i - 1, j]; b = n1[i, j]
            F1x[i, j] = -(b - a) * rhx + chi1 * (a if g > 0.0 else b) * g \
                + uf * (a if uf > 0.0 else b)
            a = n2[i - 1, j]; b = n2[i, j]
            F2x[i, j] = -(b - a) * rhx + chi2 * (a if g > 0.0 else b) * g \
                + uf * (a if uf > 0.0 else b)
            a = c[i - 1, j]; b = c[i, j]
            Fcx[i, j] = -(b - a) * rhx + uf * (a if uf > 0.0 else b)
    for i in prange(nx):
        for j in range(1, ny):
            g = (c[i, j] - c[i, j - 1]) * rhy
            gmax = max(gmax, abs(g))
            uf = uy[i, j]
            a = n1[i, j - 1]; b = n1[i, j]
            F1y[i, j] = -(b - a) * rhy + chi1 * (a if g > 0.0 else b) * g \
                + uf * (a if uf > 0.0 else b)
            a = n2[i, j - 1]; b = n2[i, j]
            F2y[i, j] = -(b - a) * rhy + chi2 * (a if g > 0.0 else b) * g \
                + uf * (a if uf > 0.0 else b)
            a = c[i, j - 1]; b = c[i, j]
            Fcy[i, j] = -(b - a) * rhy + uf * (a if uf > 0.0 else b)
    o1 = np.empty_like(n1)
    o2 = np.empty_like(n1)
    oc = np.empty_like(n1)
    mn1 = _BIG; mx1 = -_BIG; mn2 = _BIG; mx2 = -_BIG
    mnc = _BIG; mxc = -_BIG
    s1 = 0.0; s2 = 0.0; sc = 0.0
    for i in prange(nx):
        for j in range(ny):
            v1 = n1[i, j]; v2 = n2[i, j]; vc = c[i, j]
            t1 = (F1x[i, j] - F1x[i + 1, j]) * rhx + (F1y[i, j] - F1y[i, j + 1]) * rhy
            t2 = (F2x[i, j] - F2x[i + 1, j]) * rhx + (F2y[i, j] - F2y[i, j + 1]) * rhy
            tc = (Fcx[i, j] - Fcx[i + 1, j]) * rhx + (Fcy[i, j] - Fcy[i, j + 1]) * rhy
            r1 = mu1 * v1 * (1.0 - v1 - a1c * v2)
            r2 = mu2 * v2 * (1.0 - a2c * v1 - v2)
            w1 = v1 + dt * (t1 + r1)
            w2 = v2 + dt * (t2 + r2)
            wc = (vc + dt * tc) / (1.0 + dt * (al * v1 + be * v2))
            o1[i, j] = w1; o2[i, j] = w2; oc[i, j] = wc
            mn1 = min(mn1, w1); mx1 = max(mx1, w1)
            mn2 = min(mn2, w2); mx2 = max(mx2, w2)
            mnc = min(mnc, wc); mxc = max(mxc, wc)
            s1 += w1; s2 += w2; sc += wc
    stats = np.empty(10)
    stats[0] = mn1; stats[1] = mx1; stats[2] = mn2; stats[3] = mx2
    stats[4] = mnc; stats[5] = mxc; stats[6] = s1; stats[7] = s2
    stats[8] = sc; stats[9] = gmax
    return o1, o2, oc, stats


# The 3D update is split into per-axis flux kernels plus a cell pass: one
# monolithic function compiles ~8x slower at runtime (LLVM stops optimizing
# the huge body). The 2D body stays fused; it measures near optimal.

def _flux_x_3d(n1, n2, c, ux, rhx, chi1, chi2):
    nx, ny, nz = n1.shape
    F1 = np.zeros((nx + 1, ny, nz))
    F2 = np.zeros((nx + 1, ny, nz))
    Fc = np.zeros((nx + 1, ny, nz))
    gmax = 0.0
    for i in prange(1, nx):
        for j in range(ny):
            for k in range(nz):
                g = (c[i, j, k] - c[i - 1, j, k]) * rhx
                gmax = max(gmax, abs(g))
                uf = ux[i, j, k]
                a = n1[i - 1, j, k]; b = n1[i, j, k]
                F1[i, j, k] = -(b - a) * rhx + chi1 * (a if g > 0.0 else b) * g \
                    + uf * (a if uf > 0.0 else b)
                a = n2[i - 1, j, k]; b = n2[i, j, k]
                F2[i, j, k] = -(b - a) * rhx + chi2 * (a if g > 0.0 else b) * g \
                    + uf * (a if uf > 0.0 else b)
                a = c[i - 1, j, k]; b = c[i, j, k]
                Fc[i, j, k] = -(b - a) * rhx + uf * (a if uf > 0.0 else b)
    return F1, F2, Fc, gmax


def _flux_y_3d(n1, n2, c, uy, rhy, chi1, chi2):
    nx, ny, nz = n1.shape
    F1 = np.zeros((nx, ny + 1, nz))
    F2 = np.zeros((nx, ny + 1, nz))
    Fc = np.zeros((nx, ny + 1, nz))
    gmax = 0.0
    for i in prange(nx):
        for j in range(1, ny):
            for k in range(nz):
                g = (c[i, j, k] - c[i, j - 1, k]) * rhy
                gmax = max(gmax, abs(g))
                uf = uy[i, j, k]
                a = n1[i, j - 1, k]; b = n1[i, j, k]
                F1[i, j, k] = -(b - a) * rhy + chi1 * (a if g > 0.0 else b) * g \
                    + uf * (a if uf > 0.0 else b)
                a = n2[i, j - 1, k]; b = n2[i, j, k]
                F2[i, j, k] = -(b - a) * rhy + chi2 * (a if g > 0.0 else b) * g \
                    + uf * (a if uf > 0.0 else b)
                a = c[i, j - 1, k]; b = c[i, j, k]
                Fc[i, j, k] = -(b - a) * rhy + uf * (a if uf > 0.0 else b)
    return F1, F2, Fc, gmax


def _flux_z_3d(n1, n2, c, uz, rhz, chi1, chi2):
    nx, ny, nz = n1.shape
    F1 = np.zeros((nx, ny, nz + 1))
    F2 = np.zeros((nx, ny, nz + 1))
    Fc = np.zeros((nx, ny, nz + 1))
    gmax = 0.0
    for i in prange(nx):
        for j in range(ny):
            for k in range(1, nz):
                g = (c[i, j, k] - c[i, j, k - 1]) * rhz
                gmax = max(gmax, abs(g))
                uf = uz[i, j, k]
                a = n1[i, j, k - 1]; b = n1[i, j, k]
                F1[i, j, k] = -(b - a) * rhz + chi1 * (a if g > 0.0 else b) * g \
                    + uf * (a if uf > 0.0 else b)
                a = n2[i, j, k - 1]; b = n2[i, j, k]
                F2[i, j, k] = -(b - a) * rhz + chi2 * (a if g > 0.0 else b) * g \
                    + uf * (a if uf > 0.0 else b)
                a = c[i, j, k - 1]; b = c[i, j, k]
                Fc[i, j, k] = -(b - a) * rhz + uf * (a if uf > 0.0 else b)
    return F1, F2, Fc, gmax


def _cells_3d(n1, n2, c, F1x, F2x, Fcx, F1y, F2y, Fcy, F1z, F2z, Fcz,
              rhx, rhy, rhz, dt, mu1, mu2, a1c, a2c, al, be):
    nx, ny, nz = n1.shape
    o1 = np.empty_like(n1)
    o2 = np.empty_like(n1)
    oc = np.empty_like(n1)
    mn1 = _BIG; mx1 = -_BIG; mn2 = _BIG; mx2 = -_BIG
    mnc = _BIG; mxc = -_BIG
    s1 = 0.0; s2 = 0.0; sc = 0.0
    for i in prange(nx):
        for j in range(ny):
            for k in range(nz):
                v1 = n1[i, j, k]; v2 = n2[i, j, k]; vc = c[i, j, k]
                t1 = (F1x[i, j, k] - F1x[i + 1, j, k]) * rhx \
                    + (F1y[i, j, k] - F1y[i, j + 1, k]) * rhy \
                    + (F1z[i, j, k] - F1z[i, j, k + 1]) * rhz
                t2 = (F2x[i, j, k] - F2x[i + 1, j, k]) * rhx \
                    + (F2y[i, j, k] - F2y[i, j + 1, k]) * rhy \
                    + (F2z[i, j, k] - F2z[i, j, k + 1]) * rhz
                tc = (Fcx[i, j, k] - Fcx[i + 1, j, k]) * rhx \
                    + (Fcy[i, j, k] - Fcy[i, j + 1, k]) * rhy \
                    + (Fcz[i, j, k] - Fcz[i, j, k + 1]) * rhz
                r1 = mu1 * v1 * (1.0 - v1 - a1c * v2)
                r2 = mu2 * v2 * (1.0 - a2c * v1 - v2)
                w1 = v1 + dt * (t1 + r1)
                w2 = v2 + dt * (t2 + r2)
                wc = (vc + dt * tc) / (1.0 + dt * (al * v1 + be * v2))
                o1[i, j, k] = w1; o2[i, j, k] = w2; oc[i, j, k] = wc
                mn1 = min(mn1, w1); mx1 = max(mx1, w1)
                mn2 = min(mn2, w2); mx2 = max(mx2, w2)
                mnc = min(mnc, wc); mxc = max(mxc, wc)
                s1 += w1; s2 += w2; sc += wc
    stats = np.empty(10)
    stats[0] = mn1; stats[1] = mx1; stats[2] = mn2; stats[3] = mx2
    stats[4] = mnc; stats[5] = mxc; stats[6] = s1; stats[7] = s2
    stats[8] = sc; stats[9] = 0.0
    return o1, o2, oc, stats


def _make_scalar_step_3d(flux_x, flux_y, flux_z, cells):
    def step3d(n1, n2, c, ux, uy, uz, hx, hy, hz, dt,
               chi1, chi2, mu1, mu2, a1c, a2c, al, be):
        rhx = 1.0 / hx
        rhy = 1.0 / hy
        rhz = 1.0 / hz
        F1x, F2x, Fcx, gx = flux_x(n1, n2, c, ux, rhx, chi1, chi2)
        F1y, F2y, Fcy, gy = flux_y(n1, n2, c, uy, rhy, chi1, chi2)
        F1z, F2z, Fcz, gz = flux_z(n1, n2, c, uz, rhz, chi1, chi2)
        o1, o2, oc, stats = cells(n1, n2, c, F1x, F2x, Fcx, F1y, F2y, Fcy,
                                  F1z, F2z, Fcz, rhx, rhy, rhz, dt,
                                  mu1, mu2, a1c, a2c, al, be)
        stats[9] = max(gx, max(gy, gz))
        return o1, o2, oc, stats
    return step3d


# --------------------------------------------------------------------------
# tentative velocity: explicit viscous update plus buoyancy force
# (gamma n1 + delta n2 averaged onto faces, times the face gradient of phi).
# Normal boundary faces are pinned to 0; tangential walls use the no-slip
# ghost value -u.
# --------------------------------------------------------------------------

def _tentative_1d(ux, n1, n2, gpx, gamma, delta, dt, hx):
    nx1 = ux.shape[0]
    sx = np.zeros_like(ux)
    rhx2 = 1.0 / (hx * hx)
    for i in prange(1, nx1 - 1):
        lap = (ux[i + 1] - 2.0 * ux[i] + ux[i - 1]) * rhx2
        rho = 0.5 * (gamma * (n1[i - 1] + n1[i]) + delta * (n2[i - 1] + n2[i]))
        sx[i] = ux[i] + dt * (lap + rho * gpx[i])
    return sx


def _tentative_2d(ux, uy, n1, n2, gpx, gpy, gamma, delta, dt, hx, hy):
    nx, ny = n1.shape
    sx = np.zeros_like(ux)
    sy = np.zeros_like(uy)
    rhx2 = 1.0 / (hx * hx)
    rhy2 = 1.0 / (hy * hy)
    for i in prange(1, nx):
        # wall-adjacent rows use the no-slip ghost value -u
        v = ux[i, 0]
        lap = (ux[i + 1, 0] - 2.0 * v + ux[i - 1, 0]) * rhx2 + (ux[i, 1] - 3.0 * v) * rhy2
        rho = 0.5 * (gamma * (n1[i - 1, 0] + n1[i, 0])
                     + delta * (n2[i - 1, 0] + n2[i, 0]))
        sx[i, 0] = v + dt * (lap + rho * gpx[i, 0])
        for j in range(1, ny - 1):
            v = ux[i, j]
            lap = (ux[i + 1, j] - 2.0 * v + ux[i - 1, j]) * rhx2 \
                + (ux[i, j + 1] - 2.0 * v + ux[i, j - 1]) * rhy2
            rho = 0.5 * (gamma * (n1[i - 1, j] + n1[i, j])
                         + delta * (n2[i - 1, j] + n2[i, j]))
            sx[i, j] = v + dt * (lap + rho * gpx[i, j])
        v = ux[i, ny - 1]
        lap = (ux[i + 1, ny - 1] - 2.0 * v + ux[i - 1, ny - 1]) * rhx2 \
            + (ux[i, ny - 2] - 3.0 * v) * rhy2
        rho = 0.5 * (gamma * (n1[i - 1, ny - 1] + n1[i, ny - 1])
                     + delta * (n2[i - 1, ny - 1] + n2[i, ny - 1]))
        sx[i, ny - 1] = v + dt * (lap + rho * gpx[i, ny - 1])
    for j in range(1, ny):
        v = uy[0, j]
        lap = (uy[0, j + 1] - 2.0 * v + uy[0, j - 1]) * rhy2 + (uy[1, j] - 3.0 * v) * rhx2
        rho = 0.5 * (gamma * (n1[0, j - 1] + n1[0, j])
                     + delta * (n2[0, j - 1] + n2[0, j]))
        sy[0, j] = v + dt * (lap + rho * gpy[0, j])
        v = uy[nx - 1, j]
        lap = (uy[nx - 1, j + 1] - 2.0 * v + uy[nx - 1, j - 1]) * rhy2 \
            + (uy[nx - 2, j] - 3.0 * v) * rhx2
        rho = 0.5 * (gamma * (n1[nx - 1, j - 1] + n1[nx - 1, j])
                     + delta * (n2[nx - 1, j - 1] + n2[nx - 1, j]))
        sy[nx - 1, j] = v + dt * (lap + rho * gpy[nx - 1, j])
    for i in prange(1, nx - 1):
        for j in range(1, ny):
            v = uy[i, j]
            lap = (uy[i, j + 1] - 2.0 * v + uy[i, j - 1]) * rhy2 \
                + (uy[i + 1, j] - 2.0 * v + uy[i - 1, j]) * rhx2
            rho = 0.5 * (gamma * (n1[i, j - 1] + n1[i, j])
                         + delta * (n2[i, j - 1] + n2[i, j]))
            sy[i, j] = v + dt * (lap + rho * gpy[i, j])
    return sx, sy


def _tentative_3d(ux, uy, uz, n1, n2, gpx, gpy, gpz, gamma, delta, dt, hx, hy, hz):
    nx, ny, nz = n1.shape
    sx = np.zeros_like(ux)
    sy = np.zeros_like(uy)
    sz = np.zeros_like(uz)
    rhx2 = 1.0 / (hx * hx)
    rhy2 = 1.0 / (hy * hy)
    rhz2 = 1.0 / (hz * hz)
    for i in prange(1, nx):
        for j in range(ny):
            for k in range(nz):
                v = ux[i, j, k]
                lap = (ux[i + 1, j, k] - 2.0 * v + ux[i - 1, j, k]) * rhx2
                un = ux[i, j - 1, k] if j > 0 else -v
                up = ux[i, j + 1, k] if j < ny - 1 else -v
                lap += (up - 2.0 * v + un) * rhy2
                un = ux[i, j, k - 1] if k > 0 else -v
                up = ux[i, j, k + 1] if k < nz - 1 else -v
                lap += (up - 2.0 * v + un) * rhz2
                rho = 0.5 * (gamma * (n1[i - 1, j, k] + n1[i, j, k])
                             + delta * (n2[i - 1, j, k] + n2[i, j, k]))
                sx[i, j, k] = v + dt * (lap + rho * gpx[i, j, k])
    for i in prange(nx):
        for j in range(1, ny):
            for k in range(nz):
                v = uy[i, j, k]
                lap = (uy[i, j + 1, k] - 2.0 * v + uy[i, j - 1, k]) * rhy2
                un = uy[i - 1, j, k] if i > 0 else -v
                up = uy[i + 1, j, k] if i < nx - 1 else -v
                lap += (up - 2.0 * v + un) * rhx2
                un = uy[i, j, k - 1] if k > 0 else -v
                up = uy[i, j, k + 1] if k < nz - 1 else -v
                lap += (up - 2.0 * v + un) * rhz2
                rho = 0.5 * (gamma * (n1[i, j - 1, k] + n1[i, j, k])
                             + delta * (n2[i, j - 1, k] + n2[i, j, k]))
                sy[i, j, k] = v + dt * (lap + rho * gpy[i, j, k])
    for i in prange(nx):
        for j in range(ny):
            for k in range(1, nz):
                v = uz[i, j, k]
                lap = (uz[i, j, k + 1] - 2.0 * v + uz[i, j, k - 1]) * rhz2
                un = uz[i - 1, j, k] if i > 0 else -v
                up = uz[i + 1, j, k] if i < nx - 1 else -v
                lap += (up - 2.0 * v + un) * rhx2
                un = uz[i, j - 1, k] if j > 0 else -v
                up = uz[i, j + 1, k] if j < ny - 1 else -v
                lap += (up - 2.0 * v + un) * rhy2
                rho = 0.5 * (gamma * (n1[i, j, k - 1] + n1[i, j, k])
                             + delta * (n2[i, j, k - 1] + n2[i, j, k]))
                sz[i, j, k] = v + dt * (lap + rho * gpz[i, j, k])
    return sx, sy, sz


# --------------------------------------------------------------------------
# MAC divergence and pressure correction
# --------------------------------------------------------------------------

def _div_1d(ux, hx):
    nx = ux.shape[0] - 1
    out = np.empty(nx)
    rhx = 1.0 / hx
    mx = 0.0
    for i in range(nx):
        d = (ux[i + 1] - ux[i]) * rhx
        out[i] = d
        mx = max(mx, abs(d))
    return out, mx


def _div_2d(ux, uy, hx, hy):
    nx, ny = ux.shape[0] - 1, ux.shape[1]
    out = np.empty((nx, ny))
    rhx = 1.0 / hx
    rhy = 1.0 / hy
    mx = 0.0
    for i in range(nx):
        for j in range(ny):
            d = (ux[i + 1, j] - ux[i, j]) * rhx + (uy[i, j + 1] - uy[i, j]) * rhy
            out[i, j] = d
            mx = max(mx, abs(d))
    return out, mx


def _div_3d(ux, uy, uz, hx, hy, hz):
    nx, ny, nz = ux.shape[0] - 1, ux.shape[1], ux.shape[2]
    out = np.empty((nx, ny, nz))
    rhx = 1.0 / hx
    rhy = 1.0 / hy
    rhz = 1.0 / hz
    mx = 0.0
    for i in prange(nx):
        for j in range(ny):
            for k in range(nz):
                d = ((ux[i + 1, j, k] - ux[i, j, k]) * rhx
                     + (uy[i, j + 1, k] - uy[i, j, k]) * rhy
                     + (uz[i, j, k + 1] - uz[i, j, k]) * rhz)
                out[i, j, k] = d
                mx = max(mx, abs(d))
    return out, mx


def _correct_1d(sx, P, dt, hx):
    nx = P.shape[0]
    ux = np.zeros_like(sx)
    rhx = 1.0 / hx
    mx = 0.0
    for i in range(1, nx):
        v = sx[i] - dt * (P[i] - P[i - 1]) * rhx
        ux[i] = v
        mx = max(mx, abs(v))
    return ux, mx


def _correct_2d(sx, sy, P, dt, hx, hy):
    nx, ny = P.shape
    ux = np.zeros_like(sx)
    uy = np.zeros_like(sy)
    rhx = 1.0 / hx
    rhy = 1.0 / hy
    mx = 0.0
    for i in range(1, nx):
        for j in range(ny):
            v = sx[i, j] - dt * (P[i, j] - P[i - 1, j]) * rhx
            ux[i, j] = v
            mx = max(mx, abs(v))
    for i in range(nx):
        for j in range(1, ny):
            v = sy[i, j] - dt * (P[i, j] - P[i, j - 1]) * rhy
            uy[i, j] = v
            mx = max(mx, abs(v))
    return ux, uy, mx


def _correct_3d(sx, sy, sz, P, dt, hx, hy, hz):
    nx, ny, nz = P.shape
    ux = np.zeros_like(sx)
    uy = np.zeros_like(sy)
    uz = np.zeros_like(sz)
    rhx = 1.0 / hx
    rhy = 1.0 / hy
    rhz = 1.0 / hz
    mx = 0.0
    for i in prange(1, nx):
        for j in range(ny):
            for k in range(nz):
                v = sx[i, j, k] - dt * (P[i, j, k] - P[i - 1, j, k]) * rhx
                ux[i, j, k] = v
                mx = max(mx, abs(v))
    for i in prange(nx):
        for j in range(1, ny):
            for k in range(nz):
                v = sy[i, j, k] - dt * (P[i, j, k] - P[i, j - 1, k]) * rhy
                uy[i, j, k] = v
                mx = max(mx, abs(v))
    for i in prange(nx):
        for j in range(ny):
            for k in range(1, nz):
                v = sz[i, j, k] - dt * (P[i, j, k] - P[i, j, k - 1]) * rhz
                uz[i, j, k] = v
                mx = max(mx, abs(v))
    return ux, uy, uz, mx


def _compile(fn, parallel=False):
    return njit(cache=True, fastmath=True, parallel=parallel)(fn)


scalar_step_1d = _compile(_scalar_step_1d)
scalar_step_2d = _compile(_scalar_step_2d)
scalar_step_2d_par = _compile(_scalar_step_2d, parallel=True)

scalar_step_3d = _make_scalar_step_3d(
    _compile(_flux_x_3d), _compile(_flux_y_3d), _compile(_flux_z_3d),
    _compile(_cells_3d))
scalar_step_3d_par = _make_scalar_step_3d(
    _compile(_flux_x_3d, parallel=True), _compile(_flux_y_3d, parallel=True),
    _compile(_flux_z_3d, parallel=True), _compile(_cells_3d, parallel=True))

tentative_1d = _compile(_tentative_1d)
tentative_2d = _compile(_tentative_2d)
tentative_3d = _compile(_tentative_3d)
tentative_2d_par = _compile(_tentative_2d, parallel=True)
tentative_3d_par = _compile(_tentative_3d, parallel=True)

div_1d = _compile(_div_1d)
div_2d = _compile(_div_2d)
div_3d = _compile(_div_3d)
div_3d_par = _compile(_div_3d, parallel=True)

correct_1d = _compile(_correct_1d)
correct_2d = _compile(_correct_2d)
correct_3d = _compile(_correct_3d)
correct_3d_par = _compile(_correct_3d, parallel=True)
