# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled batched kernels.

Each function mirrors its counterpart in ``_kernels_py`` operation for
operation; do not reorder arithmetic here without changing both.
"""
import numpy as np

from libc.math cimport sqrt

BACKEND = "cython"

cdef double _S = 1.0 / sqrt(2.0)

cdef double[4][4] _BELL
_BELL[0][:] = [_S, 0.0, 0.0, _S]
_BELL[1][:] = [_S, 0.0, 0.0, -_S]
_BELL[2][:] = [0.0, _S, _S, 0.0]
_BELL[3][:] = [0.0, _S, -_S, 0.0]


def bell_teleport(const double[::1] a_re, const double[::1] a_im,
                  const double[::1] b_re, const double[::1] b_im,
                  const double[::1] u):
    cdef Py_ssize_t n = a_re.shape[0]
    out = np.empty(n, dtype=np.int8)
    bob_re_arr = np.empty((n, 2))
    bob_im_arr = np.empty((n, 2))
    cdef signed char[::1] pick = out
    cdef double[:, ::1] bob_re = bob_re_arr
    cdef double[:, ::1] bob_im = bob_im_arr
    cdef double psi_re[8]
    cdef double psi_im[8]
    cdef double res_re[4][2]
    cdef double res_im[4][2]
    cdef double probs[4]
    cdef double rr, ri, w, total, thresh, acc, norm
    cdef Py_ssize_t i, a, b, c, k, ab
    cdef int chosen
    for i in range(n):
        for k in range(8):
            psi_re[k] = 0.0
            psi_im[k] = 0.0
        for b in range(2):
            psi_re[2 * b + b] = a_re[i] * _S
            psi_im[2 * b + b] = a_im[i] * _S
            psi_re[4 + 2 * b + b] = b_re[i] * _S
            psi_im[4 + 2 * b + b] = b_im[i] * _S
        for k in range(4):
            for c in range(2):
                rr = 0.0
                ri = 0.0
                for ab in range(4):
                    w = _BELL[k][ab]
                    rr = rr + w * psi_re[2 * ab + c]
                    ri = ri + w * psi_im[2 * ab + c]
                res_re[k][c] = rr
                res_im[k][c] = ri
            probs[k] = (res_re[k][0] * res_re[k][0] + res_im[k][0] * res_im[k][0]
                        + res_re[k][1] * res_re[k][1] + res_im[k][1] * res_im[k][1])
        total = probs[0] + probs[1] + probs[2] + probs[3]
        thresh = u[i] * total
        chosen = -1
        for k in range(3, -1, -1):
            if chosen < 0 and probs[k] > 0.0:
                chosen = k
        acc = 0.0
        for k in range(4):
            acc = acc + probs[k]
            if thresh < acc:
                chosen = k
                break
        pick[i] = chosen
        norm = sqrt(probs[chosen])
        for c in range(2):
            bob_re[i, c] = res_re[chosen][c] / norm
            bob_im[i, c] = res_im[chosen][c] / norm
    return out, bob_re_arr, bob_im_arr


cdef inline signed char _measure_second(double* psi, double c, double s, double u) noexcept nogil:
    cdef double x0 = c * psi[0] + s * psi[1]
    cdef double x1 = c * psi[2] + s * psi[3]
    cdef double y0 = -s * psi[0] + c * psi[1]
    cdef double y1 = -s * psi[2] + c * psi[3]
    cdef double p0 = x0 * x0 + x1 * x1
    cdef double p1 = y0 * y0 + y1 * y1
    cdef signed char bit = 1 if u * (p0 + p1) >= p0 else 0
    cdef double norm, r0, r1, e0, e1
    if bit == 0:
        norm = sqrt(p0)
        r0 = x0 / norm
        r1 = x1 / norm
        e0 = c
        e1 = s
    else:
        norm = sqrt(p1)
        r0 = y0 / norm
        r1 = y1 / norm
        e0 = -s
        e1 = c
    psi[0] = e0 * r0
    psi[1] = e1 * r0
    psi[2] = e0 * r1
    psi[3] = e1 * r1
    return bit


cdef inline signed char _measure_first(double* psi, double c, double s, double u) noexcept nogil:
    cdef double x0 = c * psi[0] + s * psi[2]
    cdef double x1 = c * psi[1] + s * psi[3]
    cdef double y0 = -s * psi[0] + c * psi[2]
    cdef double y1 = -s * psi[1] + c * psi[3]
    cdef double p0 = x0 * x0 + x1 * x1
    cdef double p1 = y0 * y0 + y1 * y1
    cdef signed char bit = 1 if u * (p0 + p1) >= p0 else 0
    cdef double norm, r0, r1, e0, e1
    if bit == 0:
        norm = sqrt(p0)
        r0 = x0 / norm
        r1 = x1 / norm
        e0 = c
        e1 = s
    else:
        norm = sqrt(p1)
        r0 = y0 / norm
        r1 = y1 / norm
        e0 = -s
        e1 = c
    psi[0] = e0 * r0
    psi[1] = e0 * r1
    psi[2] = e1 * r0
    psi[3] = e1 * r1
    return bit


def singlet_pairs(const double[::1] alice_c, const double[::1] alice_s,
                  const double[::1] agent_c, const double[::1] agent_s,
                  const signed char[::1] eve_mask,
                  const double[::1] eve_c, const double[::1] eve_s,
                  const double[:, ::1] u):
    cdef Py_ssize_t n = alice_c.shape[0]
    alice_arr = np.empty(n, dtype=np.int8)
    agent_arr = np.empty(n, dtype=np.int8)
    eve_arr = np.zeros(n, dtype=np.int8)
    cdef signed char[::1] alice_bits = alice_arr
    cdef signed char[::1] agent_bits = agent_arr
    cdef signed char[::1] eve_bits = eve_arr
    cdef double psi[4]
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            psi[0] = 0.0
            psi[1] = _S
            psi[2] = -_S
            psi[3] = 0.0
            if eve_mask[i]:
                eve_bits[i] = _measure_second(psi, eve_c[i], eve_s[i], u[i, 0])
            alice_bits[i] = _measure_first(psi, alice_c[i], alice_s[i], u[i, 1])
            agent_bits[i] = _measure_second(psi, agent_c[i], agent_s[i], u[i, 2])
    return alice_arr, agent_arr, eve_arr


cdef inline signed char _measure_single(double v0, double v1, double c, double s, double u) noexcept nogil:
    cdef double x = c * v0 + s * v1
    cdef double y = -s * v0 + c * v1
    cdef double p0 = x * x
    cdef double p1 = y * y
    return 1 if u * (p0 + p1) >= p0 else 0


def photon_trips(const double[::1] prep_c, const double[::1] prep_s,
                 const signed char[::1] prep_bit,
                 const signed char[::1] eve_mask,
                 const double[::1] eve_c, const double[::1] eve_s,
                 const signed char[::1] flip,
                 const double[::1] meas_c, const double[::1] meas_s,
                 const double[:, ::1] u):
    cdef Py_ssize_t n = prep_c.shape[0]
    eve_arr = np.zeros(n, dtype=np.int8)
    out_arr = np.empty(n, dtype=np.int8)
    cdef signed char[::1] eve_bits = eve_arr
    cdef signed char[::1] out_bits = out_arr
    cdef double v0, v1, t
    cdef signed char e
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            if prep_bit[i] == 1:
                v0 = -prep_s[i]
                v1 = prep_c[i]
            else:
                v0 = prep_c[i]
                v1 = prep_s[i]
            if eve_mask[i]:
                e = _measure_single(v0, v1, eve_c[i], eve_s[i], u[i, 0])
                eve_bits[i] = e
                if e == 1:
                    v0 = -eve_s[i]
                    v1 = eve_c[i]
                else:
                    v0 = eve_c[i]
                    v1 = eve_s[i]
            if flip[i]:
                t = v0
                v0 = v1
                v1 = -t
            out_bits[i] = _measure_single(v0, v1, meas_c[i], meas_s[i], u[i, 1])
    return eve_arr, out_arr
