# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled de-skew solver kernel.

Semantics are identical to _deskew_py.solve_deskew_grid: sequential
warm-started walk over the grid, damped alternating fixed point with a
Newton handoff, closed-form symmetric split for weakly coupled points.
The loop runs without the GIL so batch drivers can thread over files.
"""

import numpy as np

from libc.math cimport M_PI, cos, fabs, remainder, sin

cdef extern from "complex.h" nogil:
    double carg(double complex)
    double cabs(double complex)
    double complex conj(double complex)

cdef double TWO_PI = 2.0 * M_PI
cdef double complex I = 1j


cdef inline double _wrap(double x) nogil:
    cdef double y = remainder(x, TWO_PI)
    if y <= -M_PI:
        y += TWO_PI
    return y


def solve_deskew_grid(
    s21,
    s23,
    s43,
    s41,
    s12,
    s14,
    s34,
    s32,
    double damping=0.7,
    double tol=1e-12,
    int fp_iters=50,
    int max_iters=200,
    double weak_ratio=1e-6,
):
    """Solve the whole grid; returns (tau1, tau2, iterations, converged,
    degenerate, res21, res12) with the residuals in radians."""
    cdef double complex[::1] a21 = np.ascontiguousarray(s21, dtype=np.complex128)
    cdef double complex[::1] a23 = np.ascontiguousarray(s23, dtype=np.complex128)
    cdef double complex[::1] a43 = np.ascontiguousarray(s43, dtype=np.complex128)
    cdef double complex[::1] a41 = np.ascontiguousarray(s41, dtype=np.complex128)
    cdef double complex[::1] a12 = np.ascontiguousarray(s12, dtype=np.complex128)
    cdef double complex[::1] a14 = np.ascontiguousarray(s14, dtype=np.complex128)
    cdef double complex[::1] a34 = np.ascontiguousarray(s34, dtype=np.complex128)
    cdef double complex[::1] a32 = np.ascontiguousarray(s32, dtype=np.complex128)
    cdef Py_ssize_t n = a21.shape[0]

    tau1_arr = np.empty(n)
    tau2_arr = np.empty(n)
    iters_arr = np.zeros(n, dtype=np.intc)
    conv_arr = np.zeros(n, dtype=np.uint8)
    degen_arr = np.zeros(n, dtype=np.uint8)
    res21_arr = np.empty(n)
    res12_arr = np.empty(n)
    cdef double[::1] tau1 = tau1_arr
    cdef double[::1] tau2 = tau2_arr
    cdef int[::1] iters = iters_arr
    cdef unsigned char[::1] conv = conv_arr
    cdef unsigned char[::1] degen = degen_arr
    cdef double[::1] res21 = res21_arr
    cdef double[::1] res12 = res12_arr

    cdef double t1 = 0.0, t2 = 0.0
    cdef double complex b21, b23, b43, b41, b12, b14, b34, b32
    cdef double complex e1, e2, z1, z2, z3, z4
    cdef double fext, p21, p12, g1, g2, da, db, det, d1, d2
    cdef int it
    cdef bint newton_ok
    cdef Py_ssize_t k

    with nogil:
        for k in range(n):
            b21 = a21[k]
            b23 = a23[k]
            b43 = a43[k]
            b41 = a41[k]
            b12 = a12[k]
            b14 = a14[k]
            b34 = a34[k]
            b32 = a32[k]

            fext = cabs(b23)
            if cabs(b41) > fext:
                fext = cabs(b41)
            if cabs(b14) > fext:
                fext = cabs(b14)
            if cabs(b32) > fext:
                fext = cabs(b32)

            if fext < weak_ratio * cabs(b21):
                t1 = _wrap(0.5 * carg(b21 * conj(b43)))
                t2 = t1
                e1 = cos(t1) - I * sin(t1)
                z1 = b21 * e1 - b23
                z2 = b43 - b41 * e1
                z3 = b12 * e1 - b14
                z4 = b34 - b32 * e1
                g1 = _wrap(carg(z1 * conj(z2)) - t2)
                g2 = _wrap(carg(z3 * conj(z4)) - t1)
                tau1[k] = t1
                tau2[k] = t2
                degen[k] = 1
                conv[k] = 1 if (fabs(g1) < tol and fabs(g2) < tol) else 0
                res21[k] = g1
                res12[k] = g2
                continue

            it = 0
            while True:
                e1 = cos(t1) - I * sin(t1)
                z1 = b21 * e1 - b23
                z2 = b43 - b41 * e1
                p21 = carg(z1 * conj(z2))
                g1 = _wrap(p21 - t2)
                e2 = cos(t2) - I * sin(t2)
                z3 = b12 * e2 - b14
                z4 = b34 - b32 * e2
                p12 = carg(z3 * conj(z4))
                g2 = _wrap(p12 - t1)
                if fabs(g1) < tol and fabs(g2) < tol:
                    conv[k] = 1
                    break
                if it >= max_iters:
                    break
                it += 1
                newton_ok = False
                if it > fp_iters:
                    if (
                        cabs(z1) > 1e-300
                        and cabs(z2) > 1e-300
                        and cabs(z3) > 1e-300
                        and cabs(z4) > 1e-300
                    ):
                        da = (-I * b21 * e1 / z1).imag - (I * b41 * e1 / z2).imag
                        db = (-I * b12 * e2 / z3).imag - (I * b32 * e2 / z4).imag
                        det = da * db - 1.0
                        if fabs(det) > 1e-14:
                            d1 = -(g2 + db * g1) / det
                            d2 = da * d1 + g1
                            t1 = _wrap(t1 + d1)
                            t2 = _wrap(t2 + d2)
                            newton_ok = True
                if not newton_ok:
                    t2 = _wrap(t2 + damping * _wrap(p21 - t2))
                    e2 = cos(t2) - I * sin(t2)
                    z3 = b12 * e2 - b14
                    z4 = b34 - b32 * e2
                    p12 = carg(z3 * conj(z4))
                    t1 = _wrap(t1 + damping * _wrap(p12 - t1))

            tau1[k] = t1
            tau2[k] = t2
            iters[k] = it
            res21[k] = g1
            res12[k] = g2

    return (
        tau1_arr,
        tau2_arr,
        iters_arr.astype(np.int32),
        conv_arr.view(np.bool_),
        degen_arr.view(np.bool_),
        res21_arr,
        res12_arr,
    )
