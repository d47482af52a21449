"""Pure-Python simulation kernel.

Fallback used when the compiled extension is unavailable. The arithmetic is
written in exactly the same order as the compiled kernel so both backends
produce bit-identical IEEE-754 results.
"""

import numpy as np


def simulate_path(state0, rates, p_total):
    """Run the daily update for rates.shape[0] days.

    state0: (10,) float array, compartment order s,q,l,i,r,h,u,f,hu,a.
    rates:  (T, 13) float array, column order beta,s_q,q_s,i_l,i_r,i_h,i_u,
            h_u,h_f,h_a,u_f,u_hu,hu_a.
    Returns a (T+1, 10) float array; row 0 is state0.
    """
    n_days = rates.shape[0]
    out = np.empty((n_days + 1, 10), dtype=np.float64)
    out[0] = state0
    s, q, l, i, r, h, u, f, hu, a = (float(v) for v in state0)
    rate_rows = np.ascontiguousarray(rates, dtype=np.float64).tolist()
    p = float(p_total)

    for day in range(n_days):
        beta, s_q, q_s, i_l, i_r, i_h, i_u, h_u, h_f, h_a, u_f, u_hu, hu_a = rate_rows[day]

        new_inf = beta * s * i / p
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

        s, q, l, i, r, h, u, f, hu, a = s1, q1, l1, i1, r1, h1, u1, f1, hu1, a1
        out[day + 1, 0] = s
        out[day + 1, 1] = q
        out[day + 1, 2] = l
        out[day + 1, 3] = i
        out[day + 1, 4] = r
        out[day + 1, 5] = h
        out[day + 1, 6] = u
        out[day + 1, 7] = f
        out[day + 1, 8] = hu
        out[day + 1, 9] = a
    return out
