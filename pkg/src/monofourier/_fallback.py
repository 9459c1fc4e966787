"""Numpy implementations of the hot loops, used when the extension is absent."""
import numpy as np

# rows x columns of the parity matrix materialized per chunk
_CHUNK = 1 << 22


def wht_inplace(a):
    n = a.shape[0]
    h = 1
    while h < n:
        v = a.reshape(-1, 2, h)
        lo = v[:, 0, :].copy()
        v[:, 0, :] += v[:, 1, :]
        v[:, 1, :] = lo - v[:, 1, :]
        h *= 2


def _signs(masks, points):
    parity = np.bitwise_count(masks[:, None] & ~points[None, :]) & np.uint8(1)
    return 1.0 - 2.0 * parity


def char_means(points, y, masks):
    n = points.shape[0]
    out = np.empty(masks.shape[0], dtype=np.float64)
    step = max(1, _CHUNK // max(n, 1))
    for a in range(0, masks.shape[0], step):
        out[a:a + step] = _signs(masks[a:a + step], points) @ y
    return out / n


def eval_spectrum(points, masks, coeffs):
    out = np.empty(points.shape[0], dtype=np.float64)
    step = max(1, _CHUNK // max(masks.shape[0], 1))
    for j in range(0, points.shape[0], step):
        out[j:j + step] = coeffs @ _signs(masks, points[j:j + step])
    return out


def coord_bin_stats(points, y, d):
    shifts = np.arange(d, dtype=np.uint64)
    bits = ((points[:, None] >> shifts[None, :]) & np.uint64(1)).astype(bool)
    sums = np.where(bits, y[:, None], 0.0).sum(axis=0)
    counts = bits.sum(axis=0).astype(np.int64)
    return sums, counts


def far_from_all(kept, count, cand, min_dist):
    if count == 0:
        return True
    dist = np.bitwise_count(kept[:count] ^ cand[None, :]).sum(axis=1)
    return bool(dist.min() >= min_dist)
