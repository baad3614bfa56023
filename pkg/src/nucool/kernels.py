"""Integration kernels for stacks of 10x10 conditional density matrices.

Two interchangeable implementations of the same contract:

``evolve_stack(h2pi, w, rho, n_sub, dt_seg, diag_out)``
    h2pi:     (n, d, d) complex128, 2*pi*H with H in MHz (so rad/us)
    w:        (d, d) float64, elementwise decay rates in 1/us
    rho:      (n, d, d) complex128, evolved in place
    n_sub:    (m,) int64, RK4 sub-steps per recorded segment
    dt_seg:   (m,) float64, step size within each segment, us
    diag_out: (n, m, d) float64, receives Re diag(rho) after each segment

The right-hand side is d(rho)/dt = -i [h2pi, rho] - w o rho, the elementwise
form of the Lindblad dissipator for diagonal jump operators (nuclear level
projectors and S_z).  Each accepted step symmetrizes rho to pin Hermiticity.

The numba path is the default; set NUCOOL_DISABLE_JIT=1 to force the batched
numpy path.  Both must agree to near machine precision (covered by tests and
timed against each other in benchmarks/bench_kernels.py).
"""

import numpy as np

from ._accel import JIT_ENABLED, njit

__all__ = ["evolve_stack", "evolve_stack_numpy", "evolve_stack_jit", "JIT_ENABLED"]


def _rhs_numpy(h2pi, w, rho):
    comm = h2pi @ rho - rho @ h2pi
    return -1j * comm - w * rho


def _hermitize_numpy(rho):
    np.add(rho, rho.conj().transpose(0, 2, 1), out=rho)
    rho *= 0.5


def evolve_stack_numpy(h2pi, w, rho, n_sub, dt_seg, diag_out):
    """Pure-numpy fallback, vectorized over the trajectory axis."""
    for seg in range(n_sub.shape[0]):
        dt = dt_seg[seg]
        for _ in range(n_sub[seg]):
            k1 = _rhs_numpy(h2pi, w, rho)
            k2 = _rhs_numpy(h2pi, w, rho + (0.5 * dt) * k1)
            k3 = _rhs_numpy(h2pi, w, rho + (0.5 * dt) * k2)
            k4 = _rhs_numpy(h2pi, w, rho + dt * k3)
            rho += (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
            _hermitize_numpy(rho)
        diag_out[:, seg, :] = np.einsum("nii->ni", rho).real


@njit(cache=True)
def _rhs_jit(a, w, r, out):
    d = r.shape[0]
    for i in range(d):
        for j in range(d):
            acc = 0.0 + 0.0j
            for k in range(d):
                acc += a[i, k] * r[k, j] - r[i, k] * a[k, j]
            out[i, j] = -1j * acc - w[i, j] * r[i, j]


@njit(cache=True)
def _step_jit(a, w, r, dt, k1, k2, k3, k4, tmp):
    d = r.shape[0]
    _rhs_jit(a, w, r, k1)
    for i in range(d):
        for j in range(d):
            tmp[i, j] = r[i, j] + 0.5 * dt * k1[i, j]
    _rhs_jit(a, w, tmp, k2)
    for i in range(d):
        for j in range(d):
            tmp[i, j] = r[i, j] + 0.5 * dt * k2[i, j]
    _rhs_jit(a, w, tmp, k3)
    for i in range(d):
        for j in range(d):
            tmp[i, j] = r[i, j] + dt * k3[i, j]
    _rhs_jit(a, w, tmp, k4)
    sixth = dt / 6.0
    for i in range(d):
        for j in range(d):
            r[i, j] += sixth * (k1[i, j] + 2.0 * (k2[i, j] + k3[i, j]) + k4[i, j])
    # symmetrize: rho <- (rho + rho^dagger)/2
    for i in range(d):
        r[i, i] = complex(r[i, i].real, 0.0)
        for j in range(i + 1, d):
            v = 0.5 * (r[i, j] + np.conj(r[j, i]))
            r[i, j] = v
            r[j, i] = np.conj(v)


@njit(cache=True)
def evolve_stack_jit(h2pi, w, rho, n_sub, dt_seg, diag_out):
    n, d, _ = rho.shape
    k1 = np.empty((d, d), np.complex128)
    k2 = np.empty((d, d), np.complex128)
    k3 = np.empty((d, d), np.complex128)
    k4 = np.empty((d, d), np.complex128)
    tmp = np.empty((d, d), np.complex128)
    for t in range(n):
        a = h2pi[t]
        r = rho[t]
        for seg in range(n_sub.shape[0]):
            dt = dt_seg[seg]
            for _ in range(n_sub[seg]):
                _step_jit(a, w, r, dt, k1, k2, k3, k4, tmp)
            for i in range(d):
                diag_out[t, seg, i] = r[i, i].real


if JIT_ENABLED:
    evolve_stack = evolve_stack_jit
else:
    evolve_stack = evolve_stack_numpy
