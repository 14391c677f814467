"""NumPy implementations of the sampling loops (used when the extension is absent)."""
import numpy as np

_ROWS = 1 << 16  # uniforms per sub-chunk, bounds peak memory


def quantile_many(kind, levels, values, a, b, u):
    u = np.asarray(u, dtype=float)
    if kind == 1:
        return -np.log(u) / a
    if kind == 2:
        return a * u ** (-b)
    levels = np.asarray(levels, dtype=float)
    values = np.asarray(values, dtype=float)
    m = len(levels)
    idx = np.clip(np.searchsorted(levels, u, side="right") - 1, 0, m - 1)
    nxt = np.minimum(idx + 1, m - 1)
    span = levels[nxt] - levels[idx]
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(span > 0, (u - levels[idx]) / span, 0.0)
    frac = np.where(levels[idx] == u, 0.0, frac)
    return values[idx] + (values[nxt] - values[idx]) * frac


def _family_means(s, kind, levels, values, a, b, base, width, lo, hi):
    level = np.minimum(base + width * s, 1.0)
    x = quantile_many(kind, levels, values, a, b, level.ravel()).reshape(level.shape)
    x = np.clip(x, lo, hi)
    # sequential accumulation, matching the compiled loop
    return np.cumsum(x, axis=1)[:, -1] / x.shape[1]


def slot_averages(rng, kind, levels, values, a, b, base0, width0, lo0, hi0, base1, width1, lo1, hi1, split, mode, reps):
    n = len(base0) if mode != 1 else len(base1)
    cols = n + 1 if mode == 2 else n
    rows = max(1, _ROWS // cols)
    out = np.empty(reps)
    done = 0
    while done < reps:
        k = min(rows, reps - done)
        u = rng.random((k, cols))
        if mode == 2:
            pick = u[:, 0] < split
            s = 1.0 - u[:, 1:]
            res = np.empty(k)
            if pick.any():
                res[pick] = _family_means(s[pick], kind, levels, values, a, b, base0, width0, lo0, hi0)
            if (~pick).any():
                res[~pick] = _family_means(s[~pick], kind, levels, values, a, b, base1, width1, lo1, hi1)
        elif mode == 0:
            res = _family_means(1.0 - u, kind, levels, values, a, b, base0, width0, lo0, hi0)
        else:
            res = _family_means(1.0 - u, kind, levels, values, a, b, base1, width1, lo1, hi1)
        out[done : done + k] = res
        done += k
    return out
