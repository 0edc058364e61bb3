"""Independent reference computations used by the tests.

Nothing here calls into the package's numerical paths.
"""

import math

import numpy as np


def bisect_scalar_fixed_point(c_in, h=0.2, lo=None, hi=None, steps=200):
    """Solve ``c = c_in - h + 2/(1+exp(-c)) - 1`` by bisection."""
    f = lambda c: c - (c_in - h + 2.0 / (1.0 + math.exp(-c)) - 1.0)
    lo = c_in - h - 1.0 if lo is None else lo
    hi = c_in - h + 1.0 if hi is None else hi
    assert f(lo) < 0 < f(hi)
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def brute_neighbour_sum(field, kernel):
    """out[x, y] = sum_ij k[i, j] * field[x+i, y+j] with zero padding, by loops."""
    field = np.asarray(field, dtype=float)
    kernel = np.asarray(kernel, dtype=float)
    r = kernel.shape[0] // 2
    m, n = field.shape
    out = np.zeros_like(field)
    for x in range(m):
        for y in range(n):
            acc = 0.0
            for i in range(-r, r + 1):
                for j in range(-r, r + 1):
                    xx, yy = x + i, y + j
                    if 0 <= xx < m and 0 <= yy < n:
                        acc += kernel[i + r, j + r] * field[xx, yy]
            out[x, y] = acc
    return out


def gaussian_entry(i, j, sigma):
    return math.exp(-(i * i + j * j) / (2 * sigma * sigma))


def dog_entry(dx, dy, sigma1):
    sigma2 = 3 * sigma1
    d2 = dx * dx + dy * dy
    return 1.5 * math.exp(-d2 / (2 * sigma1**2)) - 0.5 * math.exp(-d2 / (2 * sigma2**2))


def changed_pixel_counts(frames):
    frames = np.asarray(frames)
    return [int(np.count_nonzero(frames[k] != frames[k - 1])) for k in range(1, len(frames))]
