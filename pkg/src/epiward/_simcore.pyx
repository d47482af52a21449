# cython: boundscheck=False, wraparound=False, cdivision=False
"""Compiled simulation kernel.

Same contract and arithmetic order as `_simcore_py.simulate_path`; both
backends produce bit-identical IEEE-754 results.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def simulate_path(object state0, object rates, double p_total):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] st = np.ascontiguousarray(state0, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] rm = np.ascontiguousarray(rates, dtype=np.float64)
    cdef Py_ssize_t n_days = rm.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n_days + 1, 10), dtype=np.float64)

    cdef double s = st[0], q = st[1], l = st[2], i = st[3], r = st[4]
    cdef double h = st[5], u = st[6], f = st[7], hu = st[8], a = st[9]
    cdef double beta, s_q, q_s, i_l, i_r, i_h, i_u, h_u, h_f, h_a, u_f, u_hu, hu_a
    cdef double new_inf, s1, q1, l1, i1, r1, h1, u1, f1, hu1, a1
    cdef Py_ssize_t day

    out[0, 0] = s; out[0, 1] = q; out[0, 2] = l; out[0, 3] = i; out[0, 4] = r
    out[0, 5] = h; out[0, 6] = u; out[0, 7] = f; out[0, 8] = hu; out[0, 9] = a

    for day in range(n_days):
        beta = rm[day, 0]; s_q = rm[day, 1]; q_s = rm[day, 2]; i_l = rm[day, 3]
        i_r = rm[day, 4]; i_h = rm[day, 5]; i_u = rm[day, 6]; h_u = rm[day, 7]
        h_f = rm[day, 8]; h_a = rm[day, 9]; u_f = rm[day, 10]; u_hu = rm[day, 11]
        hu_a = rm[day, 12]

        new_inf = beta * s * i / p_total
        s1 = s + q_s * q - s_q * s - new_inf
        q1 = q + s_q * s - q_s * q
        l1 = l + new_inf - i_l * l
        i1 = i + i_l * l - (i_r + i_h + i_u) * i
        r1 = r + i_r * i
        h1 = h + i_h * i - (h_u + h_f + h_a) * h
        u1 = u + i_u * i + h_u * h - (u_f + u_hu) * u
        f1 = f + h_f * h + u_f * u
        hu1 = hu + u_hu * u - hu_a * hu
        a1 = a + h_a * h + hu_a * hu

        s = s1; q = q1; l = l1; i = i1; r = r1
        h = h1; u = u1; f = f1; hu = hu1; a = a1
        out[day + 1, 0] = s; out[day + 1, 1] = q; out[day + 1, 2] = l
        out[day + 1, 3] = i; out[day + 1, 4] = r; out[day + 1, 5] = h
        out[day + 1, 6] = u; out[day + 1, 7] = f; out[day + 1, 8] = hu
        out[day + 1, 9] = a
    return out
