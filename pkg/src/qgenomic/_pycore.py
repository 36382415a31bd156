"""Pure numpy implementations of the hot kernels.

Mirrors the signatures in ``_core.pyx`` exactly; ``_backend`` picks one of
the two at import time. Gate codes and angle semantics are shared through
the constants below.

Angles passed here are *effective* angles ``phi`` such that every rotation
is ``exp(-1j * phi * P)``; callers convert half-angle gates beforehand.
"""
import numpy as np

H, RX, RY, RZ, CNOT, CZ, RZZ, RZX = range(8)

_SQRT1_2 = 1.0 / np.sqrt(2.0)


def _split1(states, q):
    b, d = states.shape
    return states.reshape(b, d >> (q + 1), 2, 1 << q)


def _split2(states, lo, hi):
    b, d = states.shape
    return states.reshape(b, d >> (hi + 1), 2, 1 << (hi - lo - 1), 2, 1 << lo)


def apply_program(states, codes, q0, q1, phis):
    """Apply a gate program to a batch of statevectors in place.

    ``states`` is (B, 2**n) complex128, ``phis`` is (B, G) so every row may
    carry its own angles. Qubit ``q`` is bit ``q`` of the amplitude index.
    """
    for g in range(codes.shape[0]):
        code = codes[g]
        a = q0[g]
        if code == H:
            v = _split1(states, a)
            s0 = v[:, :, 0, :].copy()
            s1 = v[:, :, 1, :]
            v[:, :, 0, :] = (s0 + s1) * _SQRT1_2
            v[:, :, 1, :] = (s0 - s1) * _SQRT1_2
        elif code == RX or code == RY:
            phi = phis[:, g][:, None, None]
            c, s = np.cos(phi), np.sin(phi)
            v = _split1(states, a)
            s0 = v[:, :, 0, :].copy()
            s1 = v[:, :, 1, :].copy()
            if code == RX:
                v[:, :, 0, :] = c * s0 - 1j * s * s1
                v[:, :, 1, :] = c * s1 - 1j * s * s0
            else:
                v[:, :, 0, :] = c * s0 - s * s1
                v[:, :, 1, :] = s * s0 + c * s1
        elif code == RZ:
            phase = np.exp(-1j * phis[:, g])[:, None, None]
            v = _split1(states, a)
            v[:, :, 0, :] *= phase
            v[:, :, 1, :] *= np.conj(phase)
        else:
            b = q1[g]
            lo, hi = (a, b) if a < b else (b, a)
            v = _split2(states, lo, hi)
            # index helper: bit value of qubit a, bit value of qubit b
            def sl(va, vb):
                vhi, vlo = (va, vb) if a > b else (vb, va)
                return (slice(None), slice(None), vhi, slice(None), vlo, slice(None))

            if code == CNOT:
                t = v[sl(1, 0)].copy()
                v[sl(1, 0)] = v[sl(1, 1)]
                v[sl(1, 1)] = t
            elif code == CZ:
                v[sl(1, 1)] *= -1.0
            elif code == RZZ:
                phase = np.exp(-1j * phis[:, g])[:, None, None, None]
                v[sl(0, 0)] *= phase
                v[sl(1, 1)] *= phase
                v[sl(0, 1)] *= np.conj(phase)
                v[sl(1, 0)] *= np.conj(phase)
            elif code == RZX:
                phi = phis[:, g][:, None, None, None]
                c, s = np.cos(phi), np.sin(phi)
                for za, sign in ((0, 1.0), (1, -1.0)):
                    s0 = v[sl(za, 0)].copy()
                    s1 = v[sl(za, 1)].copy()
                    v[sl(za, 0)] = c * s0 - sign * 1j * s * s1
                    v[sl(za, 1)] = c * s1 - sign * 1j * s * s0
            else:
                raise ValueError(f"unknown gate code {code}")
    return states


def smo_solve(K, y, C, tol, max_iter, with_bias, rand_stream, trace):
    """Dual SVM solver by maximal-violating-pair SMO.

    With ``with_bias`` False the equality constraint is dropped and the
    solver degenerates to greedy single-coordinate ascent on the box.
    Returns ``(alpha, n_iter, converged, objective_trace)``.
    """
    m = y.shape[0]
    alpha = np.zeros(m)
    u = np.zeros(m)  # u_i = sum_j alpha_j y_j K_ij
    snap = 1e-12 * C
    diag = np.diag(K).copy()
    objs = []
    n_rand = rand_stream.shape[0]
    r_pos = 0
    converged = False
    it = 0
    while it < max_iter:
        g = y - u
        if not with_bias:
            # projected gradient of W along each coordinate is y_i * g_i
            grad = y * g
            pg = np.where(((alpha < C) & (grad > 0)) | ((alpha > 0) & (grad < 0)), np.abs(grad), 0.0)
            i = int(np.argmax(pg))
            if pg[i] <= tol:
                converged = True
                break
            new = min(max(alpha[i] + grad[i] / max(diag[i], 1e-12), 0.0), C)
            if new < snap:
                new = 0.0
            elif new > C - snap:
                new = C
            d = new - alpha[i]
            alpha[i] = new
            u += d * y[i] * K[:, i]
            it += 1
            if trace:
                objs.append(alpha.sum() - 0.5 * np.dot(alpha * y, u))
            continue
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        if not up.any() or not low.any():
            converged = True
            break
        gu = np.where(up, g, -np.inf)
        gl = np.where(low, g, np.inf)
        i = int(np.argmax(gu))
        j = int(np.argmin(gl))
        if gu[i] - gl[j] <= tol:
            converged = True
            break
        moved = _smo_pair(K, y, alpha, u, i, j, C, snap)
        if not moved:
            # stalled: try seeded random partners among the violators
            cands = np.flatnonzero(low & (g < g[i] - tol))
            for _ in range(cands.shape[0]):
                j = int(cands[rand_stream[r_pos % n_rand] % cands.shape[0]])
                r_pos += 1
                if _smo_pair(K, y, alpha, u, i, j, C, snap):
                    moved = True
                    break
            if not moved:
                break
        it += 1
        if trace:
            objs.append(alpha.sum() - 0.5 * np.dot(alpha * y, u))
    return alpha, it, converged, np.array(objs, dtype=np.float64)


def _smo_pair(K, y, alpha, u, i, j, C, snap):
    yi, yj = y[i], y[j]
    ai, aj = alpha[i], alpha[j]
    eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
    if eta < 1e-12:
        eta = 1e-12
    gi = yi - u[i]
    gj = yj - u[j]
    if yi != yj:
        lo = max(0.0, aj - ai)
        hi = min(C, C + aj - ai)
    else:
        lo = max(0.0, ai + aj - C)
        hi = min(C, ai + aj)
    aj_new = min(max(aj + yj * (gj - gi) / eta, lo), hi)
    if aj_new < snap:
        aj_new = 0.0
    elif aj_new > C - snap:
        aj_new = C
    ai_new = ai + yi * yj * (aj - aj_new)
    if ai_new < snap:
        ai_new = 0.0
    elif ai_new > C - snap:
        ai_new = C
    di, dj = ai_new - ai, aj_new - aj
    if abs(di) < 1e-15 and abs(dj) < 1e-15:
        return False
    alpha[i] = ai_new
    alpha[j] = aj_new
    u += di * yi * K[:, i] + dj * yj * K[:, j]
    return True


def pegasos_run(K, y, lam, idx, record):
    """Kernelized Pegasos with projection; ``idx`` holds the sampled indices.

    Returns ``(coef, objectives, norms)``; the last two are empty unless
    ``record`` is set, in which case entry ``t`` describes the iterate after
    step ``t + 1``.
    """
    m = y.shape[0]
    T = idx.shape[0]
    c = np.zeros(m)
    u = np.zeros(m)
    nrm2 = 0.0
    radius2 = 1.0 / lam
    objs = np.empty(T if record else 0)
    norms = np.empty(T if record else 0)
    for t in range(1, T + 1):
        i = idx[t - 1]
        eta = 1.0 / (lam * t)
        margin = y[i] * u[i]
        s = 1.0 - eta * lam
        c *= s
        u *= s
        nrm2 *= s * s
        if margin < 1.0:
            c[i] += eta
            nrm2 += 2.0 * eta * y[i] * u[i] + eta * eta * K[i, i]
            u += eta * y[i] * K[:, i]
        if nrm2 > radius2:
            f = np.sqrt(radius2 / nrm2)
            c *= f
            u *= f
            nrm2 = radius2
        if record:
            objs[t - 1] = 0.5 * lam * nrm2 + np.maximum(0.0, 1.0 - y * u).mean()
            norms[t - 1] = np.sqrt(max(nrm2, 0.0))
    return c, objs, norms
