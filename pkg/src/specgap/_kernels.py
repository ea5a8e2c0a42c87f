"""Compiled inner loops: the symmetric eigensolver and the per-graph sweep evaluation.

Everything here works on fixed-size float64 scratch arrays and integer bitrows,
so the functions can run under ``nogil`` from several threads at once.
"""

import math

import numpy as np
from numba import njit

MACHEP = 2.220446049250313e-16
MAX_QL_ITER = 60

# counters returned by the sweep kernels (int64 vector)
C_CONNECTED = 0
C_PRUNED = 1
C_LEMMA1_FAIL = 2
C_PROP_VIOL = 3
C_PROP_LOW_EQ = 4
C_PROP_HIGH_EQ = 5
C_DEGREE_VIOL = 6
C_NEIGHBOR_VIOL = 7
C_GAP_VIOL = 8
C_FILTER_VIOL = 9
C_QL_FAIL = 10
C_COMPLETE = 11
C_BIPARTITE = 12
N_COUNTERS = 13

# float statistics (float64 vector); all combine by max
F_MAX_EPS = 0
F_LEMMA1_DEV = 1
F_MAXDIST_MAX = 2
F_TRACE_DEV = 3
N_FLOATS = 4

# violation flags, OR-ed per graph
V_GAP = 1
V_DEGREE = 2
V_PROP = 4
V_LEMMA1 = 8
V_NEIGHBOR = 16
V_FILTER = 32
V_NUMERIC = 64

MAX_ELL = 12


@njit(cache=True, nogil=True)
def tridiagonalize(a, n, d, e):
    """Householder reduction of the lower triangle of ``a`` to tridiagonal form.

    On exit ``d`` holds the diagonal and ``e[1:n]`` the subdiagonal. ``a`` is
    destroyed.
    """
    for i in range(n - 1, 0, -1):
        l = i - 1
        h = 0.0
        if l > 0:
            scale = 0.0
            for k in range(l + 1):
                scale += abs(a[i, k])
            if scale == 0.0:
                e[i] = a[i, l]
            else:
                for k in range(l + 1):
                    a[i, k] /= scale
                    h += a[i, k] * a[i, k]
                f = a[i, l]
                g = -math.sqrt(h) if f >= 0.0 else math.sqrt(h)
                e[i] = scale * g
                h -= f * g
                a[i, l] = f - g
                f = 0.0
                for j in range(l + 1):
                    g = 0.0
                    for k in range(j + 1):
                        g += a[j, k] * a[i, k]
                    for k in range(j + 1, l + 1):
                        g += a[k, j] * a[i, k]
                    e[j] = g / h
                    f += e[j] * a[i, j]
                hh = f / (h + h)
                for j in range(l + 1):
                    f = a[i, j]
                    g = e[j] - hh * f
                    e[j] = g
                    for k in range(j + 1):
                        a[j, k] -= f * e[k] + g * a[i, k]
        else:
            e[i] = a[i, l]
    e[0] = 0.0
    for i in range(n):
        d[i] = a[i, i]


@njit(cache=True, nogil=True)
def ql_implicit(d, e, n):
    """Eigenvalues of the symmetric tridiagonal (d, e[1:n]) by implicit-shift QL.

    Results overwrite ``d`` in ascending order. Returns False if some
    eigenvalue failed to converge in MAX_QL_ITER sweeps.
    """
    for i in range(1, n):
        e[i - 1] = e[i]
    if n > 0:
        e[n - 1] = 0.0
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= MACHEP * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > MAX_QL_ITER:
                return False
            # Wilkinson-type shift from the leading 2x2 block
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    # insertion sort; n is small
    for i in range(1, n):
        x = d[i]
        j = i - 1
        while j >= 0 and d[j] > x:
            d[j + 1] = d[j]
            j -= 1
        d[j + 1] = x
    return True


@njit(cache=True, nogil=True)
def eigvalsh_inplace(a, n, d, e):
    tridiagonalize(a, n, d, e)
    return ql_implicit(d, e, n)


@njit(cache=True)
def eigvalsh(m):
    n = m.shape[0]
    a = m.copy()
    d = np.zeros(n)
    e = np.zeros(n)
    ok = eigvalsh_inplace(a, n, d, e)
    return d, ok


# ---------------------------------------------------------------------------
# bitrow graph helpers


@njit(cache=True, nogil=True)
def popcount(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


@njit(cache=True, nogil=True)
def lowbit_index(x):
    i = 0
    while not (x >> i) & 1:
        i += 1
    return i


@njit(cache=True, nogil=True)
def rows_from_mask(mask, n, pu, pv, rows):
    for v in range(n):
        rows[v] = 0
    k = 0
    while mask:
        if mask & 1:
            rows[pu[k]] |= 1 << pv[k]
            rows[pv[k]] |= 1 << pu[k]
        mask >>= 1
        k += 1


@njit(cache=True, nogil=True)
def connected_rows(rows, n):
    full = (1 << n) - 1
    seen = 1
    frontier = 1
    while frontier:
        reach = 0
        w = frontier
        while w:
            i = lowbit_index(w)
            reach |= rows[i]
            w &= w - 1
        frontier = reach & ~seen
        seen |= frontier
    return seen == full


@njit(cache=True, nogil=True)
def bipartite_rows(rows, n):
    # BFS layers of a connected graph; an edge inside a layer closes an odd cycle
    seen = 1
    frontier = 1
    while frontier:
        reach = 0
        w = frontier
        while w:
            i = lowbit_index(w)
            if rows[i] & frontier:
                return False
            reach |= rows[i]
            w &= w - 1
        frontier = reach & ~seen
        seen |= frontier
    return True


@njit(cache=True, nogil=True)
def fill_lsym(rows, n, deg, a):
    for u in range(n):
        for v in range(n):
            if u == v:
                a[u, v] = 1.0
            elif (rows[u] >> v) & 1:
                a[u, v] = -1.0 / math.sqrt(deg[u] * deg[v])
            else:
                a[u, v] = 0.0


@njit(cache=True, nogil=True)
def fill_m(rows, n, deg, a):
    """Common-neighbour formula for (I - L_sym)^2."""
    for u in range(n):
        for v in range(u + 1):
            common = rows[u] & rows[v]
            s = 0.0
            while common:
                w = lowbit_index(common)
                s += 1.0 / deg[w]
                common &= common - 1
            val = s / math.sqrt(deg[u] * deg[v])
            a[u, v] = val
            a[v, u] = val


@njit(cache=True, nogil=True)
def refine_m_min(m, n, mu, rows, deg, chol, x, y):
    """Sharpen the smallest eigenvalue ``mu`` of M near zero.

    Three steps of inverse iteration (Cholesky of M - sigma I, sigma just below
    ``mu``) give a minimizing vector x; its quotient is then evaluated as
    sum_w (1/deg w) (sum_{v~w} x_v / sqrt(deg v))^2 / sum_v x_v^2, a sum of
    squares that keeps relative accuracy when the minimum is ~0. A square
    root of the raw ``mu`` would turn 1e-16 of roundoff into 1e-8.
    """
    sigma = mu - 1e-13
    for i in range(n):
        for j in range(i + 1):
            s = m[i, j] - (sigma if i == j else 0.0)
            for k in range(j):
                s -= chol[i, k] * chol[j, k]
            if i == j:
                if s <= 0.0:
                    return mu if mu > 0.0 else 0.0
                chol[i, i] = math.sqrt(s)
            else:
                chol[i, j] = s / chol[j, j]
    for i in range(n):
        x[i] = 1.0 + 0.001 * i
    for _ in range(3):
        # forward then backward substitution
        for i in range(n):
            s = x[i]
            for k in range(i):
                s -= chol[i, k] * y[k]
            y[i] = s / chol[i, i]
        for i in range(n - 1, -1, -1):
            s = y[i]
            for k in range(i + 1, n):
                s -= chol[k, i] * x[k]
            x[i] = s / chol[i, i]
        norm = 0.0
        for i in range(n):
            norm += x[i] * x[i]
        norm = math.sqrt(norm)
        for i in range(n):
            x[i] /= norm
    num = 0.0
    for w in range(n):
        s = 0.0
        nb = rows[w]
        while nb:
            v = lowbit_index(nb)
            s += x[v] / math.sqrt(deg[v])
            nb &= nb - 1
        num += s * s / deg[w]
    den = 0.0
    for i in range(n):
        den += x[i] * x[i]
    q = num / den
    if mu < q:
        return mu if mu > 0.0 else 0.0
    return q


@njit(cache=True, nogil=True)
def deg3_filter(rows, n, deg):
    for v in range(n):
        ok = False
        w = rows[v]
        while w:
            i = lowbit_index(w)
            if deg[i] <= 3:
                ok = True
                break
            w &= w - 1
        if not ok:
            return False
    return True


# ---------------------------------------------------------------------------
# sweep evaluation


@njit(cache=True, nogil=True)
def _evaluate(rows, n, deg, work, a, p, q, d, e, opts, tols, counters, floats,
              dmax, dcount, nb_excess, nb_eq, nb_top_lo, nb_top_hi):
    """Evaluate one connected graph. Returns (epsilon, violation flags)."""
    do_prune = opts[0]
    do_lemma1 = opts[1]
    ell_max = opts[2]
    tol_half = tols[0]
    tol_deg = tols[1]
    tol_m = tols[2]
    tol_nb = tols[3]
    viol = 0

    counters[C_CONNECTED] += 1
    fill_lsym(rows, n, deg, work)
    for i in range(n):
        for j in range(n):
            a[i, j] = work[i, j]
    if not eigvalsh_inplace(a, n, d, e):
        counters[C_QL_FAIL] += 1
        return -1.0, V_NUMERIC

    eps = 1e300
    maxdist = 0.0
    trace = 0.0
    for i in range(n):
        x = abs(1.0 - d[i])
        if x < eps:
            eps = x
        if i > 0 and x > maxdist:
            maxdist = x
        trace += d[i]
    if abs(trace - n) > floats[F_TRACE_DEV]:
        floats[F_TRACE_DEV] = abs(trace - n)
    if eps > floats[F_MAX_EPS]:
        floats[F_MAX_EPS] = eps
    if n >= 3 and eps > 0.5 + tol_half:
        counters[C_GAP_VIOL] += 1
        viol |= V_GAP

    mindeg = n
    nedges = 0
    for v in range(n):
        if deg[v] < mindeg:
            mindeg = deg[v]
        nedges += deg[v]
    nedges //= 2
    if eps > dmax[mindeg]:
        dmax[mindeg] = eps
    dcount[mindeg] += 1
    if n >= 3 and mindeg >= 2:
        bound = math.sqrt(mindeg - 1.0) / mindeg
        if eps > bound + tol_deg:
            counters[C_DEGREE_VIOL] += 1
            viol |= V_DEGREE

    # two-sided bound on max_{i>1} |lambda_i - 1| and its equality cases
    is_complete = nedges == n * (n - 1) // 2
    is_bip = bipartite_rows(rows, n)
    if is_complete:
        counters[C_COMPLETE] += 1
    if is_bip:
        counters[C_BIPARTITE] += 1
    if maxdist > floats[F_MAXDIST_MAX]:
        floats[F_MAXDIST_MAX] = maxdist
    low = 1.0 / (n - 1)
    low_eq = abs(maxdist - low) <= tol_deg
    high_eq = abs(maxdist - 1.0) <= tol_deg
    if low_eq:
        counters[C_PROP_LOW_EQ] += 1
    if high_eq:
        counters[C_PROP_HIGH_EQ] += 1
    if maxdist < low - tol_deg or maxdist > 1.0 + tol_deg or low_eq != is_complete or high_eq != is_bip:
        counters[C_PROP_VIOL] += 1
        viol |= V_PROP

    if do_prune:
        if not deg3_filter(rows, n, deg):
            counters[C_PRUNED] += 1
            if eps > 0.5 + tol_half:
                counters[C_FILTER_VIOL] += 1
                viol |= V_FILTER

    if do_lemma1:
        fill_m(rows, n, deg, a)
        for i in range(n):
            for j in range(n):
                q[i, j] = a[i, j]
        if not eigvalsh_inplace(a, n, d, e):
            counters[C_QL_FAIL] += 1
            return eps, viol | V_NUMERIC
        mu = d[0]
        if mu < -1e-12:
            counters[C_QL_FAIL] += 1
            return eps, viol | V_NUMERIC
        mu = refine_m_min(q, n, mu, rows, deg, p, d, e)
        eps_m = math.sqrt(mu)
        dev = abs(eps - eps_m)
        if dev > floats[F_LEMMA1_DEV]:
            floats[F_LEMMA1_DEV] = dev
        if dev > tol_m:
            counters[C_LEMMA1_FAIL] += 1
            viol |= V_LEMMA1

    if ell_max > 0:
        # p = I - L_sym, q = p^ell by repeated multiplication
        for i in range(n):
            for j in range(n):
                p[i, j] = (1.0 if i == j else 0.0) - work[i, j]
                q[i, j] = p[i, j]
        for ell in range(1, ell_max + 1):
            if ell > 1:
                for i in range(n):
                    for j in range(n):
                        s = 0.0
                        for k in range(n):
                            s += q[i, k] * p[k, j]
                        a[i, j] = s
                for i in range(n):
                    for j in range(n):
                        q[i, j] = a[i, j]
            for i in range(n):
                for j in range(n):
                    a[i, j] = (1.0 if i == j else 0.0) - q[i, j]
            if not eigvalsh_inplace(a, n, d, e):
                counters[C_QL_FAIL] += 1
                return eps, viol | V_NUMERIC
            md = 1e300
            for i in range(n):
                x = abs(1.0 - d[i])
                if x < md:
                    md = x
            bound = 0.5 ** ell
            if md - bound > nb_excess[ell]:
                nb_excess[ell] = md - bound
            if abs(md - bound) <= tol_nb:
                nb_eq[ell] += 1
            bad = md > bound + tol_nb
            if ell % 2 == 0:
                top = d[n - 1]
                if top - (1.0 - bound) < nb_top_lo[ell]:
                    nb_top_lo[ell] = top - (1.0 - bound)
                if top > nb_top_hi[ell]:
                    nb_top_hi[ell] = top
                if top < 1.0 - bound - tol_nb or top > 1.0 + tol_nb:
                    bad = True
            if bad:
                counters[C_NEIGHBOR_VIOL] += 1
                viol |= V_NEIGHBOR
    return eps, viol


@njit(cache=True, nogil=True)
def _new_state(n):
    work = np.zeros((n, n))
    a = np.zeros((n, n))
    p = np.zeros((n, n))
    q = np.zeros((n, n))
    d = np.zeros(n)
    e = np.zeros(n)
    return work, a, p, q, d, e


@njit(cache=True, nogil=True)
def _push(buf, count, mask, code):
    if count >= buf.shape[0]:
        grown = np.zeros((buf.shape[0] * 2, 2), dtype=np.int64)
        grown[: buf.shape[0]] = buf
        buf = grown
    buf[count, 0] = mask
    buf[count, 1] = code
    return buf


@njit(cache=True, nogil=True)
def scan_masks(n, lo, hi, pu, pv, opts, tols, near):
    """Evaluate every connected labelled graph whose edge mask lies in [lo, hi).

    Graphs with epsilon >= near are returned as candidates for classification.
    """
    counters = np.zeros(N_COUNTERS, dtype=np.int64)
    floats = np.zeros(N_FLOATS)
    dmax = np.full(n + 1, -1.0)
    dcount = np.zeros(n + 1, dtype=np.int64)
    nb_excess = np.full(MAX_ELL + 1, -1e300)
    nb_eq = np.zeros(MAX_ELL + 1, dtype=np.int64)
    nb_top_lo = np.full(MAX_ELL + 1, 1e300)
    nb_top_hi = np.full(MAX_ELL + 1, -1e300)
    cand = np.zeros((64, 2), dtype=np.int64)
    ncand = 0
    viol = np.zeros((16, 2), dtype=np.int64)
    nviol = 0
    rows = np.zeros(n, dtype=np.int64)
    deg = np.zeros(n, dtype=np.int64)
    work, a, p, q, d, e = _new_state(n)
    for mask in range(lo, hi):
        rows_from_mask(mask, n, pu, pv, rows)
        isolated = False
        for v in range(n):
            deg[v] = popcount(rows[v])
            if deg[v] == 0:
                isolated = True
        if isolated or not connected_rows(rows, n):
            continue
        eps, code = _evaluate(rows, n, deg, work, a, p, q, d, e, opts, tols, counters, floats,
                              dmax, dcount, nb_excess, nb_eq, nb_top_lo, nb_top_hi)
        if eps >= near:
            cand = _push(cand, ncand, mask, 0)
            ncand += 1
        if code != 0:
            viol = _push(viol, nviol, mask, code)
            nviol += 1
    return (counters, floats, dmax, dcount, nb_excess, nb_eq, nb_top_lo, nb_top_hi,
            cand[:ncand].copy(), viol[:nviol].copy())


@njit(cache=True, nogil=True)
def scan_rows(all_rows, n, opts, tols, near):
    """Same as :func:`scan_masks` over an explicit (count, n) array of bitrows.

    Candidate and violation entries carry the row index instead of a mask.
    """
    counters = np.zeros(N_COUNTERS, dtype=np.int64)
    floats = np.zeros(N_FLOATS)
    dmax = np.full(n + 1, -1.0)
    dcount = np.zeros(n + 1, dtype=np.int64)
    nb_excess = np.full(MAX_ELL + 1, -1e300)
    nb_eq = np.zeros(MAX_ELL + 1, dtype=np.int64)
    nb_top_lo = np.full(MAX_ELL + 1, 1e300)
    nb_top_hi = np.full(MAX_ELL + 1, -1e300)
    cand = np.zeros((64, 2), dtype=np.int64)
    ncand = 0
    viol = np.zeros((16, 2), dtype=np.int64)
    nviol = 0
    rows = np.zeros(n, dtype=np.int64)
    deg = np.zeros(n, dtype=np.int64)
    work, a, p, q, d, e = _new_state(n)
    for idx in range(all_rows.shape[0]):
        for v in range(n):
            rows[v] = all_rows[idx, v]
            deg[v] = popcount(rows[v])
        eps, code = _evaluate(rows, n, deg, work, a, p, q, d, e, opts, tols, counters, floats,
                              dmax, dcount, nb_excess, nb_eq, nb_top_lo, nb_top_hi)
        if eps >= near:
            cand = _push(cand, ncand, idx, 0)
            ncand += 1
        if code != 0:
            viol = _push(viol, nviol, idx, code)
            nviol += 1
    return (counters, floats, dmax, dcount, nb_excess, nb_eq, nb_top_lo, nb_top_hi,
            cand[:ncand].copy(), viol[:nviol].copy())


@njit(cache=True, nogil=True)
def connected_masks(n, lo, hi, pu, pv):
    """Ascending edge masks in [lo, hi) whose labelled graph is connected."""
    out = np.zeros(1024, dtype=np.int64)
    k = 0
    rows = np.zeros(n, dtype=np.int64)
    for mask in range(lo, hi):
        rows_from_mask(mask, n, pu, pv, rows)
        if connected_rows(rows, n):
            if k >= out.shape[0]:
                grown = np.zeros(out.shape[0] * 2, dtype=np.int64)
                grown[:k] = out
                out = grown
            out[k] = mask
            k += 1
    return out[:k].copy()
