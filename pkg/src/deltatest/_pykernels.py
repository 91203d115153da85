"""Pure numpy versions of the compiled kernels (same arithmetic, same order)."""
import numpy as np

_ROW_BLOCK = 512


def subsample_sums(values, uniforms):
    values = np.ascontiguousarray(values, dtype=np.float64)
    uniforms = np.ascontiguousarray(uniforms, dtype=np.float64)
    n = values.shape[0]
    reps, k = uniforms.shape
    if k > n:
        raise ValueError("cannot draw more values than the window holds")
    out = np.empty(reps, dtype=np.float64)
    for start in range(0, reps, _ROW_BLOCK):
        u = uniforms[start:start + _ROW_BLOCK]
        m = u.shape[0]
        rows = np.arange(m)
        perm = np.tile(np.arange(n, dtype=np.intp), (m, 1))
        acc = np.zeros(m, dtype=np.float64)
        for i in range(k):
            j = i + (u[:, i] * (n - i)).astype(np.intp)
            picked = perm[rows, j]
            perm[rows, j] = perm[rows, i]
            perm[rows, i] = picked
            acc += values[picked]
        out[start:start + m] = acc
    return out


def ks_two_sample(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / float(a.shape[0])
    fb = np.searchsorted(b, grid, side="right") / float(b.shape[0])
    return float(np.max(np.abs(fa - fb)))
