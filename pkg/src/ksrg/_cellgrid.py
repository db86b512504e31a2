"""Numba kernels for the accelerated edge sampler.

Vertices are split into mark layers [2^i, 2^(i+1)) and placed on a dyadic
hierarchy of cubic cells indexed by Morton codes, so that every cell at every
level is a contiguous run of the (layer, code)-sorted vertex array.

For a layer pair (i, j) the finest level is the one whose cells have volume
close to beta * kernel(wmax_i, wmax_j).  All vertex pairs are then covered
exactly once by

* far pairs: cells (A, B) at some level whose parents are adjacent but which
  are not adjacent themselves; sampled by skipping through the |A|*|B| pair
  index space with a dominating probability and thinning each candidate;
* near pairs: adjacent cells (Chebyshev distance <= 1) at the finest level;
  every pair gets its own Bernoulli draw.
"""
import math

import numpy as np
from numba import njit

# status codes returned by the kernel
OK = 0
DOMINATION_VIOLATED = 1


@njit(cache=True, nogil=True)
def _interleave(coords, d, levels):
    code = 0
    for bit in range(levels):
        for k in range(d):
            code |= ((coords[k] >> bit) & 1) << (bit * d + k)
    return code


@njit(cache=True, nogil=True)
def _deinterleave(code, d, levels, out):
    for k in range(d):
        out[k] = 0
    for bit in range(levels):
        for k in range(d):
            out[k] |= ((code >> (bit * d + k)) & 1) << bit


@njit(cache=True, nogil=True)
def _kappa(w1, w2, sigma, sum_kernel, d):
    if sum_kernel:
        return (w1 ** (1.0 / d) + w2 ** (1.0 / d)) ** d
    if w1 >= w2:
        return w1 * w2**sigma
    return w2 * w1**sigma


@njit(cache=True, nogil=True)
def _prob(pos, marks, u, v, d, alpha, threshold, sigma, sum_kernel, beta, p):
    dist2 = 0.0
    for k in range(d):
        t = pos[u, k] - pos[v, k]
        dist2 += t * t
    if dist2 == 0.0:
        return p
    distd = dist2 ** (0.5 * d)
    bk = beta * _kappa(marks[u], marks[v], sigma, sum_kernel, d)
    if threshold:
        return p if bk >= distd else 0.0
    r = bk / distd
    if r >= 1.0:
        return p
    return p * r**alpha


@njit(cache=True, nogil=True)
def _push(eu, ev, ne, a, b):
    if ne == len(eu):
        nu = np.empty(2 * len(eu), np.int64)
        nv = np.empty(2 * len(ev), np.int64)
        nu[:ne] = eu[:ne]
        nv[:ne] = ev[:ne]
        eu, ev = nu, nv
    if a < b:
        eu[ne] = a
        ev[ne] = b
    else:
        eu[ne] = b
        ev[ne] = a
    return eu, ev


@njit(cache=True, nogil=True)
def _cell_range(codes, lo, hi, prefix, shift, table, toff):
    if toff >= 0:
        return table[toff + prefix], table[toff + prefix + 1]
    first = lo + np.searchsorted(codes[lo:hi], prefix << shift)
    last = lo + np.searchsorted(codes[lo:hi], (prefix + 1) << shift)
    return first, last


@njit(cache=True, nogil=True)
def _build_tables(s_codes, lstart, nlayers, d, levels):
    """Dense prefix -> start-index tables for (layer, level) pairs that are small enough.

    ``toff[l, lev]`` is the offset of the table in the flat array, or -1 when
    the level is too fine for a dense table and binary search is used instead.
    """
    toff = np.full((nlayers, levels + 1), -1, np.int64)
    size = 0
    for l in range(nlayers):
        cnt = lstart[l + 1] - lstart[l]
        for lev in range(levels + 1):
            ncells = 1 << (d * lev)
            if ncells > 8 * cnt + 64:
                break
            toff[l, lev] = size
            size += ncells + 1
    table = np.empty(size, np.int64)
    for l in range(nlayers):
        lo, hi = lstart[l], lstart[l + 1]
        for lev in range(levels + 1):
            off = toff[l, lev]
            if off < 0:
                break
            shift = d * (levels - lev)
            ncells = 1 << (d * lev)
            idx = lo
            for pfx in range(ncells + 1):
                while idx < hi and (s_codes[idx] >> shift) < pfx:
                    idx += 1
                table[off + pfx] = idx
    return table, toff


@njit(cache=True, nogil=True)
def sample_edges(pos, marks, ids, lo, side, levels, alpha, threshold, sigma,
                 sum_kernel, beta, p, seed):
    """Return (u, v, status) with u < v original ids of sampled edges."""
    np.random.seed(seed)
    n, d = pos.shape
    eu = np.empty(max(16, 2 * n), np.int64)
    ev = np.empty(max(16, 2 * n), np.int64)
    ne = 0
    status = OK
    if n < 2:
        return eu[:0], ev[:0], status

    # mark layers
    layer = np.zeros(n, np.int64)
    for u in range(n):
        if marks[u] >= 2.0:
            layer[u] = int(math.floor(math.log2(marks[u])))
    nlayers = int(layer.max()) + 1

    # Morton codes at the finest level
    top = (1 << levels) - 1
    scale = (1 << levels) / side
    codes = np.empty(n, np.int64)
    c = np.empty(d, np.int64)
    for u in range(n):
        for k in range(d):
            ck = int(math.floor((pos[u, k] - lo) * scale))
            if ck < 0:
                ck = 0
            elif ck > top:
                ck = top
            c[k] = ck
        codes[u] = _interleave(c, d, levels)

    order = np.argsort(codes, kind="mergesort")
    order = order[np.argsort(layer[order], kind="mergesort")]
    s_codes = codes[order]
    s_pos = pos[order]
    s_marks = marks[order]
    s_ids = ids[order]
    s_layer = layer[order]

    lstart = np.zeros(nlayers + 1, np.int64)
    for t in range(n):
        lstart[s_layer[t] + 1] += 1
    for l in range(nlayers):
        lstart[l + 1] += lstart[l]
    wmax = np.ones(nlayers)
    for t in range(n):
        if s_marks[t] > wmax[s_layer[t]]:
            wmax[s_layer[t]] = s_marks[t]

    table, toff = _build_tables(s_codes, lstart, nlayers, d, levels)

    ca = np.empty(d, np.int64)
    cb = np.empty(d, np.int64)
    par = np.empty(d, np.int64)

    for li in range(nlayers):
        if lstart[li + 1] == lstart[li]:
            continue
        for lj in range(li, nlayers):
            if lstart[lj + 1] == lstart[lj]:
                continue
            same = li == lj
            # the smaller layer drives the cell iteration
            if same or (lstart[li + 1] - lstart[li]) <= (lstart[lj + 1] - lstart[lj]):
                dl, ol = li, lj
            else:
                dl, ol = lj, li
            d0, d1 = lstart[dl], lstart[dl + 1]
            o0, o1 = lstart[ol], lstart[ol + 1]
            bk = beta * _kappa(wmax[li], wmax[lj], sigma, sum_kernel, d)
            reach = bk ** (1.0 / d)
            ratio = math.log2(side / reach) if reach > 0.0 else math.inf
            if ratio < 1.0:
                finest = 0
            elif ratio >= levels:
                finest = levels
            else:
                finest = int(ratio)

            for lev in range(1, finest + 1):
                shift = d * (levels - lev)
                cell = side / (1 << lev)
                ncell = 1 << lev
                t = d0
                while t < d1:
                    prefix = s_codes[t] >> shift
                    a0 = t
                    while t < d1 and (s_codes[t] >> shift) == prefix:
                        t += 1
                    a1 = t
                    na = a1 - a0
                    _deinterleave(prefix, d, lev, ca)
                    for k in range(d):
                        par[k] = ca[k] >> 1
                    # enumerate children of the 3^d parents around par
                    total = 1
                    for k in range(d):
                        total *= 6
                    for combo in range(total):
                        rem = combo
                        valid = True
                        cheb = 0
                        gap2 = 0.0
                        for k in range(d):
                            digit = rem % 6
                            rem //= 6
                            cb[k] = 2 * (par[k] + digit // 2 - 1) + (digit % 2)
                            if cb[k] < 0 or cb[k] >= ncell:
                                valid = False
                                break
                            diff = abs(cb[k] - ca[k])
                            if diff > cheb:
                                cheb = diff
                            if diff > 1:
                                g = (diff - 1) * cell
                                gap2 += g * g
                        if not valid or cheb <= 1:
                            continue
                        bcode = _interleave(cb, d, lev)
                        if same and bcode <= prefix:
                            continue
                        dmind = gap2 ** (0.5 * d)
                        if threshold:
                            if bk < dmind:
                                continue
                            pbar = p
                        else:
                            r = bk / dmind
                            pbar = p if r >= 1.0 else p * r**alpha
                            if pbar <= 0.0:
                                continue
                        b0, b1 = _cell_range(s_codes, o0, o1, bcode, shift, table, toff[ol, lev])
                        nb = b1 - b0
                        if nb == 0:
                            continue
                        npairs = na * nb
                        if pbar >= 1.0:
                            logq = 0.0
                        else:
                            logq = math.log1p(-pbar)
                        idx = -1
                        while True:
                            if pbar >= 1.0:
                                idx += 1
                            else:
                                uu = 1.0 - np.random.random()
                                # compare as float: the skip can exceed the int64 range
                                step = math.log(uu) / logq
                                if step >= npairs - idx - 1:
                                    break
                                idx += 1 + int(step)
                            if idx >= npairs:
                                break
                            x = a0 + idx // nb
                            y = b0 + idx % nb
                            pe = _prob(s_pos, s_marks, x, y, d, alpha, threshold,
                                       sigma, sum_kernel, beta, p)
                            if pe > pbar * (1.0 + 1e-12):
                                status = DOMINATION_VIOLATED
                            if np.random.random() * pbar < pe:
                                eu, ev = _push(eu, ev, ne, s_ids[x], s_ids[y])
                                ne += 1

            # near pairs at the finest level
            shift = d * (levels - finest)
            ncell = 1 << finest
            t = d0
            while t < d1:
                prefix = s_codes[t] >> shift
                a0 = t
                while t < d1 and (s_codes[t] >> shift) == prefix:
                    t += 1
                a1 = t
                _deinterleave(prefix, d, finest, ca)
                total = 1
                for k in range(d):
                    total *= 3
                for combo in range(total):
                    rem = combo
                    valid = True
                    for k in range(d):
                        cb[k] = ca[k] + rem % 3 - 1
                        rem //= 3
                        if cb[k] < 0 or cb[k] >= ncell:
                            valid = False
                            break
                    if not valid:
                        continue
                    bcode = _interleave(cb, d, finest)
                    if same and bcode < prefix:
                        continue
                    b0, b1 = _cell_range(s_codes, o0, o1, bcode, shift, table, toff[ol, finest])
                    if b1 == b0:
                        continue
                    for x in range(a0, a1):
                        ystart = b0
                        if same and bcode == prefix:
                            ystart = x + 1
                        for y in range(ystart, b1):
                            pe = _prob(s_pos, s_marks, x, y, d, alpha, threshold,
                                       sigma, sum_kernel, beta, p)
                            if pe > 0.0 and np.random.random() < pe:
                                eu, ev = _push(eu, ev, ne, s_ids[x], s_ids[y])
                                ne += 1
    return eu[:ne], ev[:ne], status
