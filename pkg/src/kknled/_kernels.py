"""Fused stencil kernels for the time-domain evolver.

One kernel evaluates the full vacuum right-hand side in (D, B) variables:
a pointwise pass recovers E and H through the constitutive maps, then a
4th-order periodic curl pass produces dD/dt = curl H and dB/dt = -curl E.
Every output cell is written by exactly one thread, so results are bitwise
identical for any thread count.  fastmath stays off to keep IEEE semantics.

Falls back to a numpy implementation when numba is unavailable or when
KKNLED_FORCE_NUMPY is set (the two paths are tested to agree to round-off).
"""

from __future__ import annotations

import os

import numpy as np

_C1 = 8.0 / 12.0
_C2 = 1.0 / 12.0

NUMBA_AVAILABLE = False
if not os.environ.get("KKNLED_FORCE_NUMPY"):
    try:
        import numba
        from numba import njit, prange
        NUMBA_AVAILABLE = True
    except ImportError:  # pragma: no cover
        pass


def set_thread_count(n: int) -> None:
    if NUMBA_AVAILABLE and n > 0:
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


if NUMBA_AVAILABLE:

    @njit(parallel=True, fastmath=False, cache=True)
    def _rhs_fused(Dx, Dy, Dz, Bx, By, Bz, eps, e2, idx, idy, idz,
                   Ex, Ey, Ez, Hx, Hy, Hz,
                   dDx, dDy, dDz, dBx, dBy, dBz):
        nx, ny, nz = Dx.shape
        k = 3.0 * eps / e2
        for kk in prange(nz):
            for j in range(ny):
                for i in range(nx):
                    bx = Bx[i, j, kk]
                    by = By[i, j, kk]
                    bz = Bz[i, j, kk]
                    dx_ = Dx[i, j, kk]
                    dy_ = Dy[i, j, kk]
                    dz_ = Dz[i, j, kk]
                    b2 = bx * bx + by * by + bz * bz
                    db = dx_ * bx + dy_ * by + dz_ * bz
                    coef = 3.0 * eps * db / (e2 + 3.0 * eps * b2)
                    ex = dx_ - coef * bx
                    ey = dy_ - coef * by
                    ez = dz_ - coef * bz
                    s = ex * bx + ey * by + ez * bz
                    Ex[i, j, kk] = ex
                    Ey[i, j, kk] = ey
                    Ez[i, j, kk] = ez
                    Hx[i, j, kk] = bx - k * s * ex
                    Hy[i, j, kk] = by - k * s * ey
                    Hz[i, j, kk] = bz - k * s * ez
        for kk in prange(nz):
            km1 = kk - 1 if kk >= 1 else nz - 1
            km2 = kk - 2 if kk >= 2 else kk - 2 + nz
            kp1 = kk + 1 if kk + 1 < nz else kk + 1 - nz
            kp2 = kk + 2 if kk + 2 < nz else kk + 2 - nz
            for j in range(ny):
                jm1 = j - 1 if j >= 1 else ny - 1
                jm2 = j - 2 if j >= 2 else j - 2 + ny
                jp1 = j + 1 if j + 1 < ny else j + 1 - ny
                jp2 = j + 2 if j + 2 < ny else j + 2 - ny
                for i in range(nx):
                    im1 = i - 1 if i >= 1 else nx - 1
                    im2 = i - 2 if i >= 2 else i - 2 + nx
                    ip1 = i + 1 if i + 1 < nx else i + 1 - nx
                    ip2 = i + 2 if i + 2 < nx else i + 2 - nx

                    dyHz = (_C1 * (Hz[i, jp1, kk] - Hz[i, jm1, kk])
                            - _C2 * (Hz[i, jp2, kk] - Hz[i, jm2, kk])) * idy
                    dzHy = (_C1 * (Hy[i, j, kp1] - Hy[i, j, km1])
                            - _C2 * (Hy[i, j, kp2] - Hy[i, j, km2])) * idz
                    dzHx = (_C1 * (Hx[i, j, kp1] - Hx[i, j, km1])
                            - _C2 * (Hx[i, j, kp2] - Hx[i, j, km2])) * idz
                    dxHz = (_C1 * (Hz[ip1, j, kk] - Hz[im1, j, kk])
                            - _C2 * (Hz[ip2, j, kk] - Hz[im2, j, kk])) * idx
                    dxHy = (_C1 * (Hy[ip1, j, kk] - Hy[im1, j, kk])
                            - _C2 * (Hy[ip2, j, kk] - Hy[im2, j, kk])) * idx
                    dyHx = (_C1 * (Hx[i, jp1, kk] - Hx[i, jm1, kk])
                            - _C2 * (Hx[i, jp2, kk] - Hx[i, jm2, kk])) * idy
                    dDx[i, j, kk] = dyHz - dzHy
                    dDy[i, j, kk] = dzHx - dxHz
                    dDz[i, j, kk] = dxHy - dyHx

                    dyEz = (_C1 * (Ez[i, jp1, kk] - Ez[i, jm1, kk])
                            - _C2 * (Ez[i, jp2, kk] - Ez[i, jm2, kk])) * idy
                    dzEy = (_C1 * (Ey[i, j, kp1] - Ey[i, j, km1])
                            - _C2 * (Ey[i, j, kp2] - Ey[i, j, km2])) * idz
                    dzEx = (_C1 * (Ex[i, j, kp1] - Ex[i, j, km1])
                            - _C2 * (Ex[i, j, kp2] - Ex[i, j, km2])) * idz
                    dxEz = (_C1 * (Ez[ip1, j, kk] - Ez[im1, j, kk])
                            - _C2 * (Ez[ip2, j, kk] - Ez[im2, j, kk])) * idx
                    dxEy = (_C1 * (Ey[ip1, j, kk] - Ey[im1, j, kk])
                            - _C2 * (Ey[ip2, j, kk] - Ey[im2, j, kk])) * idx
                    dyEx = (_C1 * (Ex[i, jp1, kk] - Ex[i, jm1, kk])
                            - _C2 * (Ex[i, jp2, kk] - Ex[i, jm2, kk])) * idy
                    dBx[i, j, kk] = dzEy - dyEz
                    dBy[i, j, kk] = dxEz - dzEx
                    dBz[i, j, kk] = dyEx - dxEy


def _diff4_np(values, axis, inv_spacing):
    p1 = np.roll(values, -1, axis)
    m1 = np.roll(values, 1, axis)
    p2 = np.roll(values, -2, axis)
    m2 = np.roll(values, 2, axis)
    return (_C1 * (p1 - m1) - _C2 * (p2 - m2)) * inv_spacing


def _rhs_numpy(Dx, Dy, Dz, Bx, By, Bz, eps, e2, idx, idy, idz,
               Ex, Ey, Ez, Hx, Hy, Hz,
               dDx, dDy, dDz, dBx, dBy, dBz):
    k = 3.0 * eps / e2
    db = Dx * Bx + Dy * By + Dz * Bz
    b2 = Bx * Bx + By * By + Bz * Bz
    coef = 3.0 * eps * db / (e2 + 3.0 * eps * b2)
    Ex[...] = Dx - coef * Bx
    Ey[...] = Dy - coef * By
    Ez[...] = Dz - coef * Bz
    s = Ex * Bx + Ey * By + Ez * Bz
    Hx[...] = Bx - k * s * Ex
    Hy[...] = By - k * s * Ey
    Hz[...] = Bz - k * s * Ez
    dDx[...] = _diff4_np(Hz, 1, idy) - _diff4_np(Hy, 2, idz)
    dDy[...] = _diff4_np(Hx, 2, idz) - _diff4_np(Hz, 0, idx)
    dDz[...] = _diff4_np(Hy, 0, idx) - _diff4_np(Hx, 1, idy)
    dBx[...] = _diff4_np(Ey, 2, idz) - _diff4_np(Ez, 1, idy)
    dBy[...] = _diff4_np(Ez, 0, idx) - _diff4_np(Ex, 2, idz)
    dBz[...] = _diff4_np(Ex, 1, idy) - _diff4_np(Ey, 0, idx)


def rhs_arrays(state_arrays, eps, e2, inv_spacings, scratch, out, use_numba=True):
    """Evaluate the (D, B) right-hand side into preallocated arrays."""
    args = (*state_arrays, eps, e2, *inv_spacings, *scratch, *out)
    if use_numba and NUMBA_AVAILABLE:
        _rhs_fused(*args)
    else:
        _rhs_numpy(*args)
