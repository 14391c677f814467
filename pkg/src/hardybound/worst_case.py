"""Dependent couplings whose averages approach the sum bound.

For a law ``mu``, a level ``p`` and a size ``n`` the quantile range of ``mu``
is cut into ``2n`` consecutive slots: ``n`` slots covering the top
``p``-fraction of mass and ``n`` covering the rest.  Independent slot variables
are mixed by a single categorical draw and cyclic shifts, which yields ``n``
variables that each have law ``mu`` while their average concentrates on the
two slot-family means.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from . import kernels
from .distributions import Discrete, Distribution
from .errors import ArgumentError, DomainError
from .hardy import delta, hardy_of, jump_points, limiting_survival
from .monotone import INF, Interval, MonotoneCurve


@dataclass(frozen=True)
class SlotSystem:
    mu: Distribution
    p: object
    n: int
    p_levels: tuple  # p_i = (n - i) / n * p, i = 0..n
    p_prime_levels: tuple  # p'_i = i / n + (n - i) / n * p
    u: tuple
    u_prime: tuple

    def slot_bounds(self, i, primed=False):
        """Closed slot ``[lo, hi]`` that slot variable ``i`` (1-based) lives in."""
        self._check_index(i)
        if primed:
            return self.u_prime[i], self.u_prime[i - 1]
        return self.u[i - 1], self.u[i]

    def slot_level(self, i, s, primed=False):
        """Level of ``mu``'s quantile that slot ``i`` reads at slot level ``s``."""
        self._check_index(i)
        if primed:
            return self.p_prime_levels[i - 1] + (1 - self.p) / self.n * s
        return self.p_levels[i] + self.p / self.n * s

    def _check_index(self, i):
        if not (isinstance(i, (int, np.integer)) and 1 <= i <= self.n):
            raise ArgumentError(f"slot index must be in 1..{self.n}, got {i}")

    def families(self):
        """Kernel parameters ``(base, width, lo, hi)`` for both slot families."""
        n, p = self.n, self.p
        base0 = [float(self.p_levels[i]) for i in range(1, n + 1)]
        lo0 = [float(self.u[i - 1]) for i in range(1, n + 1)]
        hi0 = [float(self.u[i]) for i in range(1, n + 1)]
        base1 = [float(self.p_prime_levels[i - 1]) for i in range(1, n + 1)]
        lo1 = [float(self.u_prime[i]) for i in range(1, n + 1)]
        hi1 = [float(self.u_prime[i - 1]) for i in range(1, n + 1)]
        return (base0, float(p) / n, lo0, hi0), (base1, (1 - float(p)) / n, lo1, hi1)

    def check_chain(self):
        """Both u-chains are ordered and meet at ``u_0``."""
        chain = list(reversed(self.u_prime)) + list(self.u[1:])
        return self.u[0] == self.u_prime[0] and all(a <= b for a, b in zip(chain, chain[1:]))

    def check_partition(self):
        """Half-open slots are pairwise disjoint and tile ``[u'_n, u_n)``."""
        slots = [(self.u_prime[i], self.u_prime[i - 1]) for i in range(self.n, 0, -1)]
        slots += [(self.u[i - 1], self.u[i]) for i in range(1, self.n + 1)]
        nonempty = [(a, b) for a, b in slots if a < b]
        if any(a > b for a, b in slots):
            return False
        if not nonempty:
            return self.u_prime[-1] == self.u[-1]
        tiles = all(x[1] == y[0] for x, y in zip(nonempty, nonempty[1:]))
        return tiles and nonempty[0][0] == self.u_prime[-1] and nonempty[-1][1] == self.u[-1]


def build_slot_system(mu: Distribution, p, n: int) -> SlotSystem:
    if not 0 < p < 1:
        raise ArgumentError(f"p must lie in (0, 1), got {p}")
    if int(n) != n or n < 1:
        raise ArgumentError(f"n must be a positive integer, got {n}")
    n = int(n)
    T = mu.tail_quantile
    p_levels = tuple(Fraction(n - i, n) * p for i in range(n + 1))
    p_prime = tuple(Fraction(i, n) + Fraction(n - i, n) * p for i in range(n + 1))
    u0 = T.eval(p).lo
    u, up = [u0], [u0]
    for i in range(1, n + 1):
        try:
            u.append(T.eval(p_levels[i]).lo)
        except DomainError:
            u.append(INF)
        try:
            up.append(T.eval(p_prime[i]).hi)
        except DomainError:
            up.append(-INF)
    sys = SlotSystem(mu, p, n, p_levels, p_prime, tuple(u), tuple(up))
    if not (sys.check_chain() and sys.check_partition()):
        raise ArgumentError("slot chain is not ordered; the quantile curve is malformed")
    return sys


def slot_quantile(sys: SlotSystem, i: int, s, primed=False) -> Interval:
    """Quantile of slot law ``i`` at level ``s`` via the rescaled quantile of ``mu``."""
    if not 0 < s < 1:
        raise ArgumentError(f"slot level must lie in (0, 1), got {s}")
    return sys.mu.tail_quantile.eval(sys.slot_level(i, s, primed))


def slot_survival_curve(sys: SlotSystem, i: int, primed=False) -> MonotoneCurve:
    """Survival curve of slot law ``i``, built from the survival curve of ``mu``."""
    sys._check_index(i)
    if primed:
        lo, hi = sys.p_prime_levels[i - 1], sys.p_prime_levels[i]
    else:
        lo, hi = sys.p_levels[i], sys.p_levels[i - 1]
    width = hi - lo
    return sys.mu.survival.affine_y(1 / width, -lo / width).clip_y(0, 1)


def slot_quantile_from_survival(sys: SlotSystem, i: int, s, primed=False) -> Interval:
    """Independent route to :func:`slot_quantile`: invert the slot survival curve."""
    return slot_survival_curve(sys, i, primed).inverse().eval(s)


def cyclic_permutation(n: int, k: int, i: int) -> int:
    """``i + k - 1`` wrapped into ``1..n``."""
    j = i + k - 1
    return j if j <= n else j - n


def slot_of(cell: int, k: int, n: int) -> int:
    """Slot index (1-based) read by ``X_k`` when 0-based cell ``cell`` is active."""
    return (cell - (k - 1)) % n + 1


def _category(u0, p, n):
    """Map a uniform to one of ``2n`` cells: unprimed ``0..n-1``, primed ``n..2n-1``."""
    if u0 < p:
        return min(int(u0 / p * n), n - 1)
    return n + min(int((u0 - p) / (1 - p) * n), n - 1)


@dataclass(frozen=True)
class CouplingSample:
    W: np.ndarray
    W_prime: np.ndarray
    slot_choice: int
    X: np.ndarray
    Y: float

    @property
    def epsilon(self):
        return 1 if self.slot_choice < len(self.W) else 0


def sample_coupling(sys: SlotSystem, rng) -> CouplingSample:
    """One draw of the slot variables, the active cell and the mixed vector."""
    n, p = sys.n, float(sys.p)
    spec = sys.mu.kernel_spec()
    fam0, fam1 = sys.families()
    u0 = rng.random()
    draws = []
    for base, width, lo, hi in (fam0, fam1):
        level = np.minimum(np.asarray(base) + width * (1.0 - rng.random(n)), 1.0)
        draws.append(np.clip(kernels.quantile_many(spec, level), lo, hi))
    W, Wp = draws
    cell = _category(u0, p, n)
    eps = 1 if cell < n else 0
    src = W if eps else Wp
    X = np.array([src[slot_of(cell % n, k, n) - 1] for k in range(1, n + 1)])
    Y = eps * W.mean() + (1 - eps) * Wp.mean()
    if abs(Y - X.mean()) > 1e-12 * max(1.0, abs(Y)):
        raise AssertionError("mixed average disagrees with the slot-family mean")
    return CouplingSample(W, Wp, cell, X, float(Y))


def sample_marginal(sys: SlotSystem, k: int, reps: int, seed=0, workers=1) -> np.ndarray:
    """``reps`` draws of ``X_k`` (two uniforms per draw: cell, then slot value)."""
    if not 1 <= k <= sys.n:
        raise ArgumentError(f"k must be in 1..{sys.n}")
    n, p = sys.n, float(sys.p)
    spec = sys.mu.kernel_spec()
    (b0, w0, lo0, hi0), (b1, w1, lo1, hi1) = sys.families()
    tables = [np.asarray(a, dtype=float) for a in (b0, lo0, hi0, b1, lo1, hi1)]
    b0, lo0, hi0, b1, lo1, hi1 = tables

    def block(rng, rows):
        u = rng.random((rows, 2))
        unprimed = u[:, 0] < p
        cell = np.where(
            unprimed,
            np.minimum((u[:, 0] / p * n).astype(np.int64), n - 1),
            np.minimum(((u[:, 0] - p) / (1 - p) * n).astype(np.int64), n - 1),
        )
        slot = (cell - (k - 1)) % n
        s = 1.0 - u[:, 1]
        level = np.where(unprimed, b0[slot] + w0 * s, b1[slot] + w1 * s)
        x = kernels.quantile_many(spec, np.minimum(level, 1.0))
        lo = np.where(unprimed, lo0[slot], lo1[slot])
        hi = np.where(unprimed, hi0[slot], hi1[slot])
        return np.clip(x, lo, hi)

    tag = kernels.stream_tag(f"marginal/n={n}/k={k}")
    return kernels.run_blocks(block, reps, seed, tag, workers)


def marginal_check(sys: SlotSystem, k: int, reps: int, seed=0, workers=1) -> float:
    """Distance between the law of ``X_k`` and ``mu``.

    Total variation over atom frequencies for discrete laws, the
    Kolmogorov-Smirnov statistic otherwise.
    """
    if reps < 1000:
        raise ArgumentError("marginal_check needs at least 1000 replications")
    x = sample_marginal(sys, k, reps, seed, workers)
    mu = sys.mu
    if isinstance(mu, Discrete):
        values = np.array([float(v) for v, _ in mu.atoms])
        masses = np.array([float(m) for _, m in mu.atoms])
        idx = np.searchsorted(values, x)
        hit = (idx < len(values)) & (values[np.minimum(idx, len(values) - 1)] == x)
        freq = np.bincount(idx[hit], minlength=len(values)) / len(x)
        off_atom = 1.0 - hit.mean()
        return 0.5 * (np.abs(freq - masses).sum() + off_atom)
    return float(stats.kstest(x, mu.cdf_array).statistic)


@dataclass(frozen=True)
class SlotMeans:
    mean_W: object
    mean_W_prime: object
    mc_W: Optional[float] = None
    se_W: Optional[float] = None
    mc_W_prime: Optional[float] = None
    se_W_prime: Optional[float] = None


def slot_means(sys: SlotSystem, reps: int = 0, seed=0, workers=1) -> SlotMeans:
    """Exact family means, plus Monte Carlo estimates when ``reps > 0``."""
    h = hardy_of(sys.mu).value(sys.p)
    exact_w, exact_wp = h, h - delta(sys.mu, sys.p)
    if reps <= 0:
        return SlotMeans(exact_w, exact_wp)
    est = []
    for mode in (0, 1):
        avg = family_averages(sys, mode, reps, seed, workers)
        est.append((float(avg.mean()), float(avg.std(ddof=1) / math.sqrt(reps))))
    return SlotMeans(exact_w, exact_wp, est[0][0], est[0][1], est[1][0], est[1][1])


def family_averages(sys: SlotSystem, mode: int, reps: int, seed=0, workers=1) -> np.ndarray:
    """Per-replication averages of one family (0 unprimed, 1 primed, 2 mixed)."""
    spec = sys.mu.kernel_spec()
    fam0, fam1 = sys.families()
    split = float(sys.p)

    def block(rng, rows):
        return kernels.slot_averages(rng, spec, fam0, fam1, split, mode, rows)

    tag = kernels.stream_tag(f"family/mode={mode}/n={sys.n}")
    return kernels.run_blocks(block, reps, seed, tag, workers)


def iid_averages(mu: Distribution, n: int, reps: int, seed=0, workers=1) -> np.ndarray:
    """Averages of ``n`` independent draws from ``mu``."""
    spec = mu.kernel_spec()
    fam = (np.zeros(n), 1.0, np.full(n, -np.inf), np.full(n, np.inf))

    def block(rng, rows):
        return kernels.slot_averages(rng, spec, fam, fam, 1.0, 0, rows)

    tag = kernels.stream_tag(f"iid/n={n}")
    return kernels.run_blocks(block, reps, seed, tag, workers)


def mean_variance_ladder(mu: Distribution, p, ns: Sequence[int], reps: int, seed=0, workers=1):
    """Sample variance of the unprimed family average for each ``n``."""
    return [float(family_averages(build_slot_system(mu, p, n), 0, reps, seed, workers).var(ddof=1)) for n in ns]


@dataclass(frozen=True)
class SimulationRow:
    n: int
    t: float
    empirical_survival: float
    half_width: float
    limit_value: float
    flag: str


@dataclass(frozen=True)
class SimulationResult:
    mu: Distribution
    p: object
    reps: int
    seed: int
    rows: tuple
    jumps: tuple
    backend: str = field(default_factory=lambda: kernels.BACKEND)

    def summary(self):
        return {
            "distribution": self.mu.to_json(),
            "p": float(self.p),
            "reps": self.reps,
            "seed": self.seed,
            "jumps": [float(v) for v in self.jumps],
            "backend": self.backend,
        }


def simulate_profile(
    mu: Distribution,
    p,
    n,
    reps: int,
    thresholds: Sequence[float],
    seed: int = 0,
    workers: int = 1,
    margin: float = 0.05,
    z: float = 3.0,
) -> SimulationResult:
    """Empirical ``P(Y_n >= t)`` for the mixed construction, per ``n`` and ``t``.

    ``n`` may be an int or a ladder of ints.  ``p == 1`` uses plain
    independent averages.  Rows within ``margin`` of a jump of the limiting
    profile are flagged ``near_jump``.
    """
    if not 0 < p <= 1:
        raise ArgumentError(f"p must lie in (0, 1], got {p}")
    if reps < 1:
        raise ArgumentError("reps must be positive")
    ns = [int(n)] if np.isscalar(n) else [int(v) for v in n]
    ts = [float(t) for t in thresholds]
    if any(not math.isfinite(t) for t in ts):
        raise ArgumentError("thresholds must be finite")
    a, b = (float(v) for v in jump_points(mu, p))
    limit = limiting_survival(mu, p)
    rows = []
    for m in ns:
        if p == 1:
            y = iid_averages(mu, m, reps, seed, workers)
        else:
            y = family_averages(build_slot_system(mu, p, m), 2, reps, seed, workers)
        ys = np.sort(y)
        for t in ts:
            hits = len(ys) - int(np.searchsorted(ys, t, side="left"))
            est = hits / reps
            hw = z * math.sqrt(est * (1 - est) / reps)
            flag = "near_jump" if min(abs(t - a), abs(t - b)) < margin else "ok"
            rows.append(SimulationRow(m, t, est, hw, float(limit.eval(t).hi), flag))
    return SimulationResult(mu, p, int(reps), int(seed), tuple(rows), (a, b))
