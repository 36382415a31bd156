# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; see ``_pycore`` for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, sqrt, fabs

cnp.import_array()

cdef enum:
    H = 0
    RX = 1
    RY = 2
    RZ = 3
    CNOT = 4
    CZ = 5
    RZZ = 6
    RZX = 7

cdef double SQRT1_2 = 0.70710678118654752440


cdef void _apply_row(double complex* psi, Py_ssize_t d, int code, int a, int b,
                     double phi) noexcept nogil:
    cdef Py_ssize_t k, k1, k2
    cdef Py_ssize_t ma = (<Py_ssize_t>1) << a
    cdef Py_ssize_t mb
    cdef double complex s0, s1, e, ec, m00, m01, m10, m11
    cdef double c, s, sign
    if code == H:
        for k in range(d):
            if k & ma:
                continue
            k1 = k | ma
            s0 = psi[k]
            s1 = psi[k1]
            psi[k] = (s0 + s1) * SQRT1_2
            psi[k1] = (s0 - s1) * SQRT1_2
    elif code == RX or code == RY or code == RZ:
        c = cos(phi)
        s = sin(phi)
        if code == RX:
            m00 = c; m01 = -1j * s; m10 = -1j * s; m11 = c
        elif code == RY:
            m00 = c; m01 = -s; m10 = s; m11 = c
        else:
            m00 = c - 1j * s; m01 = 0; m10 = 0; m11 = c + 1j * s
        for k in range(d):
            if k & ma:
                continue
            k1 = k | ma
            s0 = psi[k]
            s1 = psi[k1]
            psi[k] = m00 * s0 + m01 * s1
            psi[k1] = m10 * s0 + m11 * s1
    else:
        mb = (<Py_ssize_t>1) << b
        if code == CNOT:
            for k in range(d):
                if (k & ma) and not (k & mb):
                    k1 = k | mb
                    s0 = psi[k]
                    psi[k] = psi[k1]
                    psi[k1] = s0
        elif code == CZ:
            for k in range(d):
                if (k & ma) and (k & mb):
                    psi[k] = -psi[k]
        elif code == RZZ:
            e = cos(phi) - 1j * sin(phi)
            ec = cos(phi) + 1j * sin(phi)
            for k in range(d):
                if ((k & ma) != 0) == ((k & mb) != 0):
                    psi[k] = psi[k] * e
                else:
                    psi[k] = psi[k] * ec
        elif code == RZX:
            c = cos(phi)
            s = sin(phi)
            for k in range(d):
                if k & mb:
                    continue
                k1 = k | mb
                sign = -1.0 if (k & ma) else 1.0
                s0 = psi[k]
                s1 = psi[k1]
                psi[k] = c * s0 - sign * 1j * s * s1
                psi[k1] = c * s1 - sign * 1j * s * s0


def apply_program(double complex[:, ::1] states, int[::1] codes, int[::1] q0,
                  int[::1] q1, double[:, ::1] phis):
    cdef Py_ssize_t B = states.shape[0]
    cdef Py_ssize_t d = states.shape[1]
    cdef Py_ssize_t G = codes.shape[0]
    cdef Py_ssize_t r, g
    for g in range(G):
        if codes[g] < 0 or codes[g] > RZX:
            raise ValueError(f"unknown gate code {codes[g]}")
    with nogil:
        for r in range(B):
            for g in range(G):
                _apply_row(&states[r, 0], d, codes[g], q0[g], q1[g], phis[r, g])
    return np.asarray(states)


cdef bint _smo_pair(double[:, ::1] K, double[::1] y, double[::1] alpha,
                    double[::1] u, Py_ssize_t i, Py_ssize_t j, double C,
                    double snap) noexcept nogil:
    cdef Py_ssize_t m = y.shape[0]
    cdef Py_ssize_t k
    cdef double yi = y[i], yj = y[j], ai = alpha[i], aj = alpha[j]
    cdef double eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
    cdef double gi, gj, lo, hi, aj_new, ai_new, di, dj
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
    di = ai_new - ai
    dj = aj_new - aj
    if fabs(di) < 1e-15 and fabs(dj) < 1e-15:
        return False
    alpha[i] = ai_new
    alpha[j] = aj_new
    for k in range(m):
        u[k] += di * yi * K[k, i] + dj * yj * K[k, j]
    return True


cdef double _dual_objective(double[::1] alpha, double[::1] y, double[::1] u) noexcept nogil:
    cdef Py_ssize_t k
    cdef double acc = 0.0
    for k in range(alpha.shape[0]):
        acc += alpha[k] - 0.5 * alpha[k] * y[k] * u[k]
    return acc


def smo_solve(double[:, ::1] K, double[::1] y, double C, double tol,
              long max_iter, bint with_bias, long[::1] rand_stream, bint trace):
    cdef Py_ssize_t m = y.shape[0]
    cdef Py_ssize_t k, i, j, n_cand, pick
    cdef double[::1] alpha = np.zeros(m)
    cdef double[::1] u = np.zeros(m)
    cdef long[::1] cands = np.zeros(m, dtype=np.int64)
    cdef double snap = 1e-12 * C
    cdef double g, best_up, best_low, grad, pg, best, new, d
    cdef Py_ssize_t n_rand = rand_stream.shape[0]
    cdef Py_ssize_t r_pos = 0
    cdef bint converged = False, moved, is_up, is_low
    cdef long it = 0
    objs = []
    while it < max_iter:
        if not with_bias:
            i = -1
            best = -1.0
            for k in range(m):
                grad = y[k] * (y[k] - u[k])
                pg = 0.0
                if (alpha[k] < C and grad > 0) or (alpha[k] > 0 and grad < 0):
                    pg = fabs(grad)
                if pg > best:
                    best = pg
                    i = k
            if best <= tol:
                converged = True
                break
            grad = y[i] * (y[i] - u[i])
            new = min(max(alpha[i] + grad / max(K[i, i], 1e-12), 0.0), C)
            if new < snap:
                new = 0.0
            elif new > C - snap:
                new = C
            d = new - alpha[i]
            alpha[i] = new
            for k in range(m):
                u[k] += d * y[i] * K[k, i]
            it += 1
            if trace:
                objs.append(_dual_objective(alpha, y, u))
            continue
        i = -1
        j = -1
        best_up = -1e300
        best_low = 1e300
        for k in range(m):
            g = y[k] - u[k]
            is_up = (y[k] > 0 and alpha[k] < C) or (y[k] < 0 and alpha[k] > 0)
            is_low = (y[k] > 0 and alpha[k] > 0) or (y[k] < 0 and alpha[k] < C)
            if is_up and g > best_up:
                best_up = g
                i = k
            if is_low and g < best_low:
                best_low = g
                j = k
        if i < 0 or j < 0:
            converged = True
            break
        if best_up - best_low <= tol:
            converged = True
            break
        moved = _smo_pair(K, y, alpha, u, i, j, C, snap)
        if not moved:
            n_cand = 0
            for k in range(m):
                is_low = (y[k] > 0 and alpha[k] > 0) or (y[k] < 0 and alpha[k] < C)
                if is_low and (y[k] - u[k]) < best_up - tol:
                    cands[n_cand] = k
                    n_cand += 1
            for pick in range(n_cand):
                j = cands[rand_stream[r_pos % n_rand] % n_cand]
                r_pos += 1
                if _smo_pair(K, y, alpha, u, i, j, C, snap):
                    moved = True
                    break
            if not moved:
                break
        it += 1
        if trace:
            objs.append(_dual_objective(alpha, y, u))
    return np.asarray(alpha), it, converged, np.array(objs, dtype=np.float64)


def pegasos_run(double[:, ::1] K, double[::1] y, double lam, long[::1] idx, bint record):
    cdef Py_ssize_t m = y.shape[0]
    cdef Py_ssize_t T = idx.shape[0]
    cdef Py_ssize_t t, k, i
    cdef double[::1] c = np.zeros(m)
    cdef double[::1] u = np.zeros(m)
    cdef double nrm2 = 0.0, radius2 = 1.0 / lam
    cdef double eta, margin, s, f, hinge, acc
    objs_arr = np.empty(T if record else 0)
    norms_arr = np.empty(T if record else 0)
    cdef double[::1] objs = objs_arr
    cdef double[::1] norms = norms_arr
    with nogil:
        for t in range(1, T + 1):
            i = idx[t - 1]
            eta = 1.0 / (lam * t)
            margin = y[i] * u[i]
            s = 1.0 - eta * lam
            for k in range(m):
                c[k] *= s
                u[k] *= s
            nrm2 *= s * s
            if margin < 1.0:
                c[i] += eta
                nrm2 += 2.0 * eta * y[i] * u[i] + eta * eta * K[i, i]
                for k in range(m):
                    u[k] += eta * y[i] * K[k, i]
            if nrm2 > radius2:
                f = sqrt(radius2 / nrm2)
                for k in range(m):
                    c[k] *= f
                    u[k] *= f
                nrm2 = radius2
            if record:
                acc = 0.0
                for k in range(m):
                    hinge = 1.0 - y[k] * u[k]
                    if hinge > 0:
                        acc += hinge
                objs[t - 1] = 0.5 * lam * nrm2 + acc / m
                norms[t - 1] = sqrt(nrm2 if nrm2 > 0 else 0.0)
    return np.asarray(c), objs_arr, norms_arr
