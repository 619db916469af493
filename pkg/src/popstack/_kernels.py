"""Compiled inner loops.

Conventions shared by every kernel: ``vals`` holds the one-line notation with
values 1..n stored in a zero-indexed int64 array; ``inv[v - 1]`` is the
zero-indexed position of value ``v``.  Public modules convert to one-indexed
positions at their boundary.
"""

import numpy as np
from numba import njit

WHITE = 3
RED = 2
BLACK = 1
UNCOLORED = 0


@njit(cache=True)
def inverse_of(vals):
    inv = np.empty_like(vals)
    for i in range(vals.shape[0]):
        inv[vals[i] - 1] = i
    return inv


@njit(cache=True)
def pop_inplace(vals, inv):
    """Reverse every maximal decreasing block of ``vals`` in place.

    ``inv`` is kept in sync.  Only entries inside blocks of length >= 2 are
    written.  Returns False iff ``vals`` was already the identity.
    """
    n = vals.shape[0]
    changed = False
    i = 0
    while i < n - 1:
        if vals[i] > vals[i + 1]:
            j = i + 1
            while j + 1 < n and vals[j] > vals[j + 1]:
                j += 1
            changed = True
            lo = i
            hi = j
            while lo < hi:
                x = vals[lo]
                y = vals[hi]
                vals[lo] = y
                vals[hi] = x
                inv[y - 1] = lo
                inv[x - 1] = hi
                lo += 1
                hi -= 1
            i = j + 1
        else:
            i += 1
    return changed


@njit(cache=True)
def max_run_length(vals):
    best = 1
    cur = 1
    for i in range(1, vals.shape[0]):
        if vals[i - 1] > vals[i]:
            cur += 1
            if cur > best:
                best = cur
        else:
            cur = 1
    return best


@njit(cache=True)
def is_identity(vals):
    for i in range(vals.shape[0]):
        if vals[i] != i + 1:
            return False
    return True


@njit(cache=True)
def steps_to_sort(vals, cap):
    """Number of Pop steps to reach the identity, or -1 past ``cap``."""
    a = vals.copy()
    inv = inverse_of(a)
    t = 0
    while pop_inplace(a, inv):
        t += 1
        if t > cap:
            return -1
    return t


@njit(cache=True)
def pop_power(vals, t):
    """Pop applied ``t`` times (stops early at the identity)."""
    a = vals.copy()
    inv = inverse_of(a)
    for _ in range(t):
        if not pop_inplace(a, inv):
            break
    return a


@njit(cache=True)
def rtl_minima_mask(vals):
    """mask[v] is True iff value v is a right-to-left minimum (index 0 unused)."""
    n = vals.shape[0]
    mask = np.zeros(n + 1, dtype=np.bool_)
    cur = n + 1
    for q in range(n - 1, -1, -1):
        v = vals[q]
        if v < cur:
            mask[v] = True
            cur = v
    return mask


@njit(cache=True)
def larger_to_the_right(vals):
    """ell[i] = #{k > i : vals[k] > vals[i]} via a Fenwick tree over values."""
    n = vals.shape[0]
    tree = np.zeros(n + 1, dtype=np.int64)
    ell = np.empty(n, dtype=np.int64)
    inserted = 0
    for i in range(n - 1, -1, -1):
        v = vals[i]
        # count of inserted values <= v
        s = 0
        j = v
        while j > 0:
            s += tree[j]
            j -= j & (-j)
        ell[i] = inserted - s
        j = v
        while j <= n:
            tree[j] += 1
            j += j & (-j)
        inserted += 1
    return ell


@njit(cache=True)
def fisher_yates(draws):
    """Identity shuffled by swapping slot i with slot draws[n - i], i = n..2.

    ``draws`` holds the n-1 one-indexed targets in consumption order.
    """
    n = draws.shape[0] + 1
    out = np.arange(1, n + 1)
    for idx in range(n - 1):
        i = n - idx
        j = draws[idx]
        tmp = out[i - 1]
        out[i - 1] = out[j - 1]
        out[j - 1] = tmp
    return out


@njit(cache=True)
def color_codes(vals, inv, m):
    """Per-value colour codes relative to pivot ``m``; returns (codes, p_t).

    p_t is one-indexed.
    """
    n = vals.shape[0]
    codes = np.zeros(n + 1, dtype=np.int8)
    pos_m = inv[m - 1]
    cur = n + 1
    red_right = False
    p = -1
    for q in range(n - 1, -1, -1):
        v = vals[q]
        is_min = v < cur
        if is_min:
            cur = v
        if v >= m:
            if is_min:
                codes[v] = WHITE
                red_right = False
            elif q >= pos_m:
                codes[v] = RED
                if red_right and p < 0:
                    p = q + 2
                red_right = True
            else:
                codes[v] = BLACK
                red_right = False
        else:
            red_right = False
    if p < 0:
        p = pos_m + 1
    return codes, p


@njit(cache=True)
def p_value(vals, inv, m):
    """p_t alone; scans from the right and stops at the first red-red pair."""
    n = vals.shape[0]
    pos_m = inv[m - 1]
    cur = n + 1
    red_right = False
    for q in range(n - 1, pos_m - 1, -1):
        v = vals[q]
        if v < cur:
            cur = v
            red_right = False
        else:
            # right of pos_m every value exceeds m when m is a minimum; the
            # explicit test keeps the predicate exact otherwise
            if v >= m:
                if red_right:
                    return q + 2
                red_right = True
            else:
                red_right = False
    return pos_m + 1


@njit(cache=True)
def run_with_p(vals, m, t0, tracked):
    """Full trajectory with p_t for t >= t0 and the position of ``tracked``.

    Returns (steps, p_series, tracked_positions).  p_series[i] is p at time
    t0 + i for t0 + i in [t0, max(steps, t0)]; tracked_positions[t] is the
    one-indexed position of ``tracked`` at time t in [0, steps] (empty when
    tracked == 0).
    """
    n = vals.shape[0]
    a = vals.copy()
    inv = inverse_of(a)
    p_arr = np.empty(n + 2, dtype=np.int64)
    k_arr = np.empty(n + 2, dtype=np.int64)
    n_p = 0
    t = 0
    while True:
        if tracked > 0:
            k_arr[t] = inv[tracked - 1] + 1
        if t >= t0:
            p_arr[n_p] = p_value(a, inv, m)
            n_p += 1
        if not pop_inplace(a, inv):
            break
        t += 1
        if t > n:
            return -1, p_arr[:n_p], k_arr[:0]
    steps = t
    if n_p == 0:
        # identity reached before t0; it is a fixed point
        p_arr[0] = inv[m - 1] + 1
        n_p = 1
    k_len = steps + 1 if tracked > 0 else 0
    return steps, p_arr[:n_p].copy(), k_arr[:k_len].copy()


@njit(cache=True)
def weak_order_leq(inv_p, inv_q):
    """Inv(p) subset of Inv(q), streamed over pairs without materialising."""
    n = inv_p.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            if inv_p[j] < inv_p[i] and not inv_q[j] < inv_q[i]:
                return False
    return True


@njit(cache=True)
def _next_permutation(a, lo):
    """Lexicographic successor of a[lo:], in place; False when exhausted."""
    n = a.shape[0]
    i = n - 2
    while i >= lo and a[i] >= a[i + 1]:
        i -= 1
    if i < lo:
        return False
    j = n - 1
    while a[j] <= a[i]:
        j -= 1
    tmp = a[i]
    a[i] = a[j]
    a[j] = tmp
    lo2 = i + 1
    hi = n - 1
    while lo2 < hi:
        tmp = a[lo2]
        a[lo2] = a[hi]
        a[hi] = tmp
        lo2 += 1
        hi -= 1
    return True


@njit(cache=True)
def step_histogram_with_first(n, first):
    """Histogram of steps_to_sort over all permutations starting with ``first``."""
    hist = np.zeros(n, dtype=np.int64)
    a = np.empty(n, dtype=np.int64)
    a[0] = first
    idx = 1
    for v in range(1, n + 1):
        if v != first:
            a[idx] = v
            idx += 1
    while True:
        s = steps_to_sort(a, n)
        if s < 0 or s > n - 1:
            # Ungar breach; caller sees it as an out-of-range bucket
            hist[n - 1] += 1 << 40
        else:
            hist[s] += 1
        if not _next_permutation(a, 1):
            break
    return hist
