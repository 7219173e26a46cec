"""Pure-Python de-skew solver kernel (reference semantics).

Per frequency this solves the two wrapped phase conditions

    g1 = wrap(arg(S21 e^{-i t1} - S23) - t2 - arg(S43 - S41 e^{-i t1})) = 0
    g2 = wrap(arg(S12 e^{-i t2} - S14) - t1 - arg(S34 - S32 e^{-i t2})) = 0

i.e. the residual intra-pair skew of the phase-corrected network must
vanish in both propagation directions. The iteration is a damped
alternating fixed point (t2 from the first condition, then t1 from the
refreshed second), switching to a 2x2 Newton step once the fixed point
has had its chance. Frequencies are processed in order; each point is
warm-started from the previous solution, the first from (0, 0).

When the four coupling terms are all below weak_ratio * |S21| only
t1 + t2 is determined; the point falls back to the closed-form symmetric
split and is flagged degenerate.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

TWO_PI = 2.0 * math.pi


def _wrap(x: float) -> float:
    y = math.remainder(x, TWO_PI)
    if y <= -math.pi:
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
    damping: float = 0.7,
    tol: float = 1e-12,
    fp_iters: int = 50,
    max_iters: int = 200,
    weak_ratio: float = 1e-6,
):
    """Solve the whole grid; returns (tau1, tau2, iterations, converged,
    degenerate, res21, res12) with the residuals in radians."""
    a21 = np.asarray(s21, dtype=complex).tolist()
    a23 = np.asarray(s23, dtype=complex).tolist()
    a43 = np.asarray(s43, dtype=complex).tolist()
    a41 = np.asarray(s41, dtype=complex).tolist()
    a12 = np.asarray(s12, dtype=complex).tolist()
    a14 = np.asarray(s14, dtype=complex).tolist()
    a34 = np.asarray(s34, dtype=complex).tolist()
    a32 = np.asarray(s32, dtype=complex).tolist()
    n = len(a21)
    tau1 = np.empty(n)
    tau2 = np.empty(n)
    iters = np.zeros(n, dtype=np.int32)
    conv = np.zeros(n, dtype=bool)
    degen = np.zeros(n, dtype=bool)
    res21 = np.empty(n)
    res12 = np.empty(n)

    t1 = 0.0
    t2 = 0.0
    for k in range(n):
        b21 = a21[k]
        b23 = a23[k]
        b43 = a43[k]
        b41 = a41[k]
        b12 = a12[k]
        b14 = a14[k]
        b34 = a34[k]
        b32 = a32[k]

        fext = max(abs(b23), abs(b41), abs(b14), abs(b32))
        if fext < weak_ratio * abs(b21):
            # rank-deficient: only t1 + t2 matters, split it evenly
            t1 = t2 = _wrap(0.5 * cmath.phase(b21 * b43.conjugate()))
            e1 = cmath.exp(-1j * t1)
            z1 = b21 * e1 - b23
            z2 = b43 - b41 * e1
            z3 = b12 * e1 - b14
            z4 = b34 - b32 * e1
            g1 = _wrap(cmath.phase(z1 * z2.conjugate()) - t2)
            g2 = _wrap(cmath.phase(z3 * z4.conjugate()) - t1)
            tau1[k] = t1
            tau2[k] = t2
            degen[k] = True
            conv[k] = abs(g1) < tol and abs(g2) < tol
            res21[k] = g1
            res12[k] = g2
            continue

        it = 0
        while True:
            e1 = cmath.exp(-1j * t1)
            z1 = b21 * e1 - b23
            z2 = b43 - b41 * e1
            p21 = cmath.phase(z1 * z2.conjugate())
            g1 = _wrap(p21 - t2)
            e2 = cmath.exp(-1j * t2)
            z3 = b12 * e2 - b14
            z4 = b34 - b32 * e2
            p12 = cmath.phase(z3 * z4.conjugate())
            g2 = _wrap(p12 - t1)
            if abs(g1) < tol and abs(g2) < tol:
                conv[k] = True
                break
            if it >= max_iters:
                break
            it += 1
            newton_ok = False
            if it > fp_iters:
                az1 = abs(z1)
                az2 = abs(z2)
                az3 = abs(z3)
                az4 = abs(z4)
                if az1 > 1e-300 and az2 > 1e-300 and az3 > 1e-300 and az4 > 1e-300:
                    da = (-1j * b21 * e1 / z1).imag - (1j * b41 * e1 / z2).imag
                    db = (-1j * b12 * e2 / z3).imag - (1j * b32 * e2 / z4).imag
                    det = da * db - 1.0
                    if abs(det) > 1e-14:
                        d1 = -(g2 + db * g1) / det
                        d2 = da * d1 + g1
                        t1 = _wrap(t1 + d1)
                        t2 = _wrap(t2 + d2)
                        newton_ok = True
            if not newton_ok:
                # damped alternating fixed point; refresh the 12-direction
                # terms after the t2 update before updating t1
                t2 = _wrap(t2 + damping * _wrap(p21 - t2))
                e2 = cmath.exp(-1j * t2)
                z3 = b12 * e2 - b14
                z4 = b34 - b32 * e2
                p12 = cmath.phase(z3 * z4.conjugate())
                t1 = _wrap(t1 + damping * _wrap(p12 - t1))

        tau1[k] = t1
        tau2[k] = t2
        iters[k] = it
        res21[k] = g1
        res12[k] = g2

    return tau1, tau2, iters, conv, degen, res21, res12
