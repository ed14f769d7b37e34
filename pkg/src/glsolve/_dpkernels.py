"""Numba kernels for the sink-selection DP.

Cell values are int64 with reserved codes for the infinities; finite
values are guaranteed by the caller to stay below the codes, so plain
integer comparison orders NEG < finite < POS correctly. Edge capacities
use -1 for INF (no clamping).
"""

import numpy as np
from numba import njit

NEG_CODE = -(1 << 62)
POS_CODE = 1 << 62


@njit(cache=True, inline="always")
def _bound(w, x):
    if x == NEG_CODE:
        return NEG_CODE
    if w < 0:  # INF capacity: identity
        return x
    if x == POS_CODE:
        return w
    if x < -w:
        return NEG_CODE
    if x > w:
        return w
    return x


@njit(cache=True, inline="always")
def _add(x, y):
    if x == NEG_CODE or y == NEG_CODE:
        return NEG_CODE
    if x == POS_CODE or y == POS_CODE:
        return POS_CODE
    return x + y


@njit(cache=True)
def dp_fill(left, right, wl, wr, base, caps, offs, cells):
    size = left.shape[0]
    max_cap = 0
    for i in range(size):
        if caps[i] > max_cap:
            max_cap = caps[i]
    bl = np.empty(max_cap, dtype=np.int64)
    br = np.empty(max_cap, dtype=np.int64)
    for v in range(size):
        off = offs[v]
        cap = caps[v]
        if left[v] < 0:
            cells[off] = base[v]
            for k in range(1, cap):
                cells[off + k] = POS_CODE
            continue
        li = left[v]
        ri = right[v]
        lc = caps[li]
        rc = caps[ri]
        lo = offs[li]
        ro = offs[ri]
        for a in range(lc):
            bl[a] = _bound(wl[v], cells[lo + a])
        for b in range(rc):
            br[b] = _bound(wr[v], cells[ro + b])
        for k in range(cap):
            best = NEG_CODE
            a_min = k - (rc - 1)
            if a_min < 0:
                a_min = 0
            a_max = k
            if a_max > lc - 1:
                a_max = lc - 1
            for a in range(a_min, a_max + 1):
                s = _add(bl[a], br[k - a])
                if s > best:
                    best = s
            cells[off + k] = best


@njit(cache=True)
def dp_backtrack(left, right, wl, wr, caps, offs, cells, root_pos, k, chosen):
    """Mark leaf positions of one optimal selection; returns 0 on success."""
    size = left.shape[0]
    stack_pos = np.empty(size, dtype=np.int64)
    stack_bud = np.empty(size, dtype=np.int64)
    sp = 0
    stack_pos[sp] = root_pos
    stack_bud[sp] = k
    sp += 1
    while sp > 0:
        sp -= 1
        v = stack_pos[sp]
        budget = stack_bud[sp]
        if left[v] < 0:
            if budget >= 1:
                chosen[v] = 1
            continue
        li = left[v]
        ri = right[v]
        target = cells[offs[v] + budget]
        a_min = budget - (caps[ri] - 1)
        if a_min < 0:
            a_min = 0
        a_max = budget
        if a_max > caps[li] - 1:
            a_max = caps[li] - 1
        found = False
        for a in range(a_min, a_max + 1):
            s = _add(_bound(wl[v], cells[offs[li] + a]), _bound(wr[v], cells[offs[ri] + budget - a]))
            if s == target:
                stack_pos[sp] = li
                stack_bud[sp] = a
                sp += 1
                stack_pos[sp] = ri
                stack_bud[sp] = budget - a
                sp += 1
                found = True
                break
        if not found:
            return -1
    return 0
