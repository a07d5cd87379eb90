"""Independent brute-force reference implementations.

Everything here is written with plain Python loops and the math module,
deliberately sharing no code with the library: these are the oracles the
fast paths are checked against.
"""

import math


def o_lip_add(f, g, m=256.0):
    return f + g - f * g / m


def o_lip_neg(f, m=256.0):
    return -f / (1.0 - f / m)


def o_lip_sub(f, g, m=256.0):
    return (f - g) / (1.0 - g / m)


def o_lip_mul(a, f, m=256.0):
    return m - m * (1.0 - f / m) ** a


def o_gamma_mult(fv, gv, m=256.0):
    return math.log(1.0 - fv / m) / math.log(1.0 - gv / m)


def o_drop_count(p, n):
    return int((1.0 - p) / 2.0 * n)


def o_dist_mult(fs, gs, p=1.0, m=256.0):
    """Direct evaluation: contrast ratios, order statistics, log ratio."""
    gam = sorted(o_gamma_mult(fv, gv, m) for fv, gv in zip(fs, gs))
    k = o_drop_count(p, len(gam))
    lam = gam[len(gam) - 1 - k]
    mu = gam[k]
    return math.log(lam / mu)


def o_dist_add(fs, gs, p=1.0, m=256.0):
    """Direct evaluation: additive contrasts, order statistics, LIP difference."""
    gam = sorted(o_lip_sub(fv, gv, m) for fv, gv in zip(fs, gs))
    k = o_drop_count(p, len(gam))
    c1 = gam[len(gam) - 1 - k]
    c2 = gam[k]
    return o_lip_sub(c1, c2, m)


def o_window(shape, offsets, y, x):
    """Window offsets restricted to the domain."""
    h, w = shape
    return [
        (j, y + dy, x + dx)
        for j, (dy, dx) in enumerate(offsets)
        if 0 <= y + dy < h and 0 <= x + dx < w
    ]


def o_map_mult(f, offsets, bvals, p=1.0, m=256.0):
    """Per-pixel multiplicative probing distance by definition."""
    h, w = len(f), len(f[0])
    out = [[0.0] * w for _ in range(h)]
    for y in range(h):
        for x in range(w):
            win = o_window((h, w), offsets, y, x)
            if not win:
                continue
            fs = [f[yy][xx] for _, yy, xx in win]
            gs = [bvals[j] for j, _, _ in win]
            out[y][x] = o_dist_mult(fs, gs, p, m)
    return out


def o_map_add(f, offsets, bvals, p=1.0, m=256.0):
    h, w = len(f), len(f[0])
    out = [[0.0] * w for _ in range(h)]
    for y in range(h):
        for x in range(w):
            win = o_window((h, w), offsets, y, x)
            if not win:
                continue
            fs = [f[yy][xx] for _, yy, xx in win]
            gs = [bvals[j] for j, _, _ in win]
            out[y][x] = o_dist_add(fs, gs, p, m)
    return out


def o_dilate_add(f, offsets, bvals):
    """max over h of f(x - h) + b(h); empty -> -inf."""
    h, w = len(f), len(f[0])
    out = [[-math.inf] * w for _ in range(h)]
    for y in range(h):
        for x in range(w):
            best = -math.inf
            for j, (dy, dx) in enumerate(offsets):
                yy, xx = y - dy, x - dx
                if 0 <= yy < h and 0 <= xx < w:
                    best = max(best, f[yy][xx] + bvals[j])
            out[y][x] = best
    return out


def o_erode_add(f, offsets, bvals):
    """min over h of f(x + h) - b(h); empty -> +inf."""
    h, w = len(f), len(f[0])
    out = [[math.inf] * w for _ in range(h)]
    for y in range(h):
        for x in range(w):
            best = math.inf
            for j, (dy, dx) in enumerate(offsets):
                yy, xx = y + dy, x + dx
                if 0 <= yy < h and 0 <= xx < w:
                    best = min(best, f[yy][xx] - bvals[j])
            out[y][x] = best
    return out


def o_rank(f, offsets, weights, k, top):
    """(k+1)-th largest/smallest of {f(x+h) - w(h)} per pixel."""
    h, w = len(f), len(f[0])
    out = [[None] * w for _ in range(h)]
    for y in range(h):
        for x in range(w):
            vals = sorted(
                f[yy][xx] - weights[j]
                for j, yy, xx in o_window((h, w), offsets, y, x)
            )
            out[y][x] = vals[len(vals) - 1 - k] if top else vals[k]
    return out


def o_regional_minima(f):
    """Regional minima by plateau flooding; returns a boolean grid."""
    h, w = len(f), len(f[0])
    seen = [[False] * w for _ in range(h)]
    is_min = [[False] * w for _ in range(h)]
    nbrs = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]
    for y0 in range(h):
        for x0 in range(w):
            if seen[y0][x0]:
                continue
            level = f[y0][x0]
            plateau = [(y0, x0)]
            seen[y0][x0] = True
            minimal = True
            i = 0
            while i < len(plateau):
                y, x = plateau[i]
                i += 1
                for dy, dx in nbrs:
                    yy, xx = y + dy, x + dx
                    if not (0 <= yy < h and 0 <= xx < w):
                        continue
                    if f[yy][xx] < level:
                        minimal = False
                    elif f[yy][xx] == level and not seen[yy][xx]:
                        seen[yy][xx] = True
                        plateau.append((yy, xx))
            if minimal:
                for y, x in plateau:
                    is_min[y][x] = True
    return is_min


def o_reconstruct_erosion(marker, mask):
    """Fixpoint of r <- max(mask, erode3x3(r)) computed by plain iteration."""
    h, w = len(marker), len(marker[0])
    r = [row[:] for row in marker]
    while True:
        nxt = [row[:] for row in r]
        for y in range(h):
            for x in range(w):
                e = r[y][x]
                for dy in (-1, 0, 1):
                    for dx in (-1, 0, 1):
                        yy, xx = y + dy, x + dx
                        if 0 <= yy < h and 0 <= xx < w:
                            e = min(e, r[yy][xx])
                nxt[y][x] = max(mask[y][x], e)
        if nxt == r:
            return r
        r = nxt
