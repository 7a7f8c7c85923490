"""Compiled inner loops.

Everything here works on int64 and mirrors the exact Python code in
``arith_core`` and ``dim_formulas``; the test-suite checks the two agree.
Space codes: 0 = full, 1 = new, 2 = min.
"""

import numpy as np
from numba import njit

BIG = np.int64(2**62)


@njit(cache=True, nogil=True)
def linear_sieve(limit, n_primes):
    spf = np.zeros(limit + 1, dtype=np.int32)
    primes = np.empty(n_primes, dtype=np.int32)
    count = 0
    for i in range(2, limit + 1):
        if spf[i] == 0:
            spf[i] = i
            primes[count] = i
            count += 1
        si = spf[i]
        for j in range(count):
            p = primes[j]
            if p > si or p * i > limit:
                break
            spf[p * i] = p
    return spf, primes[:count].copy()


@njit(cache=True, nogil=True)
def ipow(p, e):
    r = np.int64(1)
    for _ in range(e):
        r *= p
    return r


@njit(cache=True, nogil=True)
def local4(space, p, e):
    """(psi, nu_inf, nu2, nu3) on p**e for the given space code."""
    pe = ipow(p, e)
    if space == 0:
        psi = pe + pe // p
        if e % 2 == 1:
            nuinf = 2 * ipow(p, (e - 1) // 2)
        else:
            h = ipow(p, e // 2)
            nuinf = h + h // p
        if pe == 2:
            nu2 = 1
        elif p % 4 == 1:
            nu2 = 2
        else:
            nu2 = 0
        if pe == 3:
            nu3 = 1
        elif p % 3 == 1:
            nu3 = 2
        else:
            nu3 = 0
    elif space == 1:
        if e == 1:
            psi = p - 1
        elif e == 2:
            psi = p * p - p - 1
        else:
            psi = ipow(p, e - 3) * (p - 1) * (p - 1) * (p + 1)
        if e == 2:
            nuinf = p - 2
        elif e % 2 == 0:
            nuinf = ipow(p, e // 2 - 2) * (p - 1) * (p - 1)
        else:
            nuinf = 0
        if p % 4 == 3 and e == 1:
            nu2 = -2
        elif (p % 4 == 3 and e == 2) or pe == 8:
            nu2 = 1
        elif (p % 4 == 1 and e == 2) or pe == 2 or pe == 4:
            nu2 = -1
        else:
            nu2 = 0
        if p % 3 == 2 and e == 1:
            nu3 = -2
        elif (p % 3 == 2 and e == 2) or pe == 27:
            nu3 = 1
        elif (p % 3 == 1 and e == 2) or pe == 3 or pe == 9:
            nu3 = -1
        else:
            nu3 = 0
    else:
        g = 2 if (p % 2 == 1 and e % 2 == 0) else 1
        if e == 1:
            case = 1
        elif e == 2:
            case = p - 1
        else:
            case = ipow(p, e - 3) * (p * p - 1)
        psi = (p - 1) // g * case
        if p == 2 and e % 2 == 0 and e > 2:
            nuinf = ipow(2, e // 2 - 2)
        else:
            nuinf = 0
        if e == 1:
            mu_prev = 1
        elif e == 2:
            mu_prev = -1
        else:
            mu_prev = 0
        if p % 4 == 3:
            nu2 = -2 * mu_prev
        elif pe == 2 or pe == 4:
            nu2 = -1
        elif pe == 8:
            nu2 = 1
        else:
            nu2 = 0
        if p % 3 == 2 and pe != 4:
            nu3 = -2 * mu_prev
        elif pe == 3 or pe == 9:
            nu3 = -1
        elif pe == 4 or pe == 27:
            nu3 = 1
        else:
            nu3 = 0
    return np.int64(psi), np.int64(nuinf), np.int64(nu2), np.int64(nu3)


@njit(cache=True, nogil=True)
def components_range(spf, lo, hi, space, psi, nuinf, nu2, nu3, mu, omega, hpart):
    """Fill component arrays for levels lo <= n < hi (index n - lo)."""
    for n in range(lo, hi):
        a = np.int64(1)
        b = np.int64(1)
        c = np.int64(1)
        d = np.int64(1)
        m = 1
        w = 0
        h = np.int64(1)
        x = n
        while x > 1:
            p = np.int64(spf[x])
            e = 0
            while x % p == 0:
                x //= p
                e += 1
            lp, li, l2, l3 = local4(space, p, e)
            a *= lp
            b *= li
            c *= l2
            d *= l3
            w += 1
            if e >= 2:
                m = 0
                h *= ipow(p, e)
            else:
                m = -m
        i = n - lo
        psi[i] = a
        nuinf[i] = b
        nu2[i] = c
        nu3[i] = d
        mu[i] = m
        omega[i] = w
        hpart[i] = h


@njit(cache=True, nogil=True)
def dims_range(spf, lo, hi, space, K, C2, C3, D, out):
    """12*d = K*psi - 6*nu_inf + C2*nu2 + C3*nu3 + D*mu_slot; returns first bad n or 0."""
    for n in range(lo, hi):
        a = np.int64(1)
        b = np.int64(1)
        c = np.int64(1)
        d = np.int64(1)
        m = 1
        x = n
        while x > 1:
            p = np.int64(spf[x])
            e = 0
            while x % p == 0:
                x //= p
                e += 1
            lp, li, l2, l3 = local4(space, p, e)
            a *= lp
            b *= li
            c *= l2
            d *= l3
            m = 0 if e >= 2 else -m
        if space == 0:
            m = 1
        num = K * a - 6 * b + C2 * c + C3 * d + D * m
        if num % 12 != 0 or num < 0:
            return n
        out[n - lo] = num // 12
    return 0


@njit(cache=True, nogil=True)
def dfs_levels(space, primes, psi_cap, n_cap, min_exp, K, C2, C3, D, d_cap,
               counts, witness, psi_seen, out_n, out_psi,
               census_psi, census_d, census_omega):
    """Visit every N (exponents >= min_exp) with psi(N) <= psi_cap and N <= n_cap.

    Soundness of the pruning needs psi(p**e) non-decreasing in e and
    psi(p**min_exp) increasing in p; both hold for all three spaces.
    Returns (visited, stored, census, error) where error is 0, or the
    first level whose twelfths combination fails integrality (negated
    when the out buffers overflow).
    """
    if psi_cap < 0:
        psi_cap = BIG
    if n_cap < 0:
        n_cap = BIG
    depth_max = 64
    fi = np.zeros(depth_max, dtype=np.int64)
    fe = np.zeros(depth_max, dtype=np.int64)
    vpsi = np.ones(depth_max, dtype=np.int64)
    vinf = np.ones(depth_max, dtype=np.int64)
    v2 = np.ones(depth_max, dtype=np.int64)
    v3 = np.ones(depth_max, dtype=np.int64)
    vmu = np.ones(depth_max, dtype=np.int64)
    vn = np.ones(depth_max, dtype=np.int64)
    vom = np.zeros(depth_max, dtype=np.int64)
    vodd = np.zeros(depth_max, dtype=np.int64)
    np_ = primes.shape[0]
    visited = 0
    stored = 0
    census = 0
    err = 0
    top = 0
    # root N = 1 handled by the same record block below via a flag
    record_top = True
    fi[1] = 0
    fe[1] = min_exp
    while True:
        if record_top:
            record_top = False
            visited += 1
            ps = vpsi[top]
            n = vn[top]
            mslot = 1 if space == 0 else vmu[top]
            num = K * ps - 6 * vinf[top] + C2 * v2[top] + C3 * v3[top] + D * mslot
            dd = np.int64(-1)
            if num % 12 != 0 or num < 0:
                if err == 0:
                    err = n
            else:
                dd = num // 12
                if dd <= d_cap:
                    counts[dd] += 1
                    if witness[dd] == 0 or n < witness[dd]:
                        witness[dd] = n
            if ps < psi_seen.shape[0]:
                psi_seen[ps] = 1
            if out_n.shape[0] > 0:
                if stored < out_n.shape[0]:
                    out_n[stored] = n
                    out_psi[stored] = ps
                    stored += 1
                elif err == 0:
                    err = -n
            if census_omega >= 0:
                hit = ps <= census_psi or (dd >= 0 and dd <= census_d)
                if hit and (vom[top] >= census_omega or vodd[top] == 0):
                    census += 1
            top += 1
            if top >= depth_max:
                return visited, stored, census, -1
            fi[top] = fi[top - 1] + 1 if top > 1 else 0
            fe[top] = min_exp
        if top == 0:
            break
        i = fi[top]
        par = top - 1
        if i >= np_:
            top -= 1
            if top == 0:
                break
            fe[top] += 1
            continue
        p = np.int64(primes[i])
        e = fe[top]
        lp, li, l2, l3 = local4(space, p, e)
        pe = ipow(p, e)
        too_big = lp > psi_cap // vpsi[par] or pe > n_cap // vn[par]
        if too_big:
            if e == min_exp:
                # psi(p**min_exp) and p**min_exp grow with p: no later prime fits
                top -= 1
                if top == 0:
                    break
                fe[top] += 1
            else:
                fi[top] = i + 1
                fe[top] = min_exp
            continue
        vpsi[top] = vpsi[par] * lp
        vinf[top] = vinf[par] * li
        v2[top] = v2[par] * l2
        v3[top] = v3[par] * l3
        vn[top] = vn[par] * pe
        vom[top] = vom[par] + 1
        vodd[top] = vodd[par] + (e % 2)
        if e >= 2:
            vmu[top] = 0
        else:
            vmu[top] = -vmu[par]
        fi[top] = i
        record_top = True
    return visited, stored, census, err
