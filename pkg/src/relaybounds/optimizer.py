"""Derivative-free maximization over a simplex or a product of simplexes.

Search is a coarse grid (single simplex) or seeded multi-start (product)
followed by a pattern search whose moves transfer mass between two
coordinates of one block, with occasional random tangent directions when
the pairwise moves stall, and step halving.

Objectives may be scalar (one list of blocks in, one float out) or
vectorized (a list of ``(B, d_k)`` arrays in, ``(B,)`` values out); the
engine evaluates polls as batches so vectorized objectives are much faster.

A constraint ``g(point) <= threshold`` is enforced by projecting each
infeasible candidate onto the boundary along the segment towards an anchor
point where ``g`` vanishes; ``g`` must be convex along that segment.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

FEASIBILITY_TOL = 1e-12
_PROJECTION_STEPS = 60
_PROJECTION_SLACK = 1e-11
_PROJECTION_WIDTH = 1e-12
_IMPROVE_EPS = 1e-13
_FORCING = 1e-3  # sufficient increase required per move: _FORCING * step**2
_RANDOM_DIRECTIONS = 4
_COARSE_MIN_STEP = 1e-2
_COARSE_TOLERANCE = 1e-4   # stall threshold while only ranking the starts
_REFINE_TOP = 3
_PATTERN_FACTORS = 2.0 ** np.arange(6)   # extrapolation lengths tried after a successful move
_STALL_WINDOW = 100
_STALL_FRACTION = 1.0


class NumericalError(ArithmeticError):
    """The objective produced a non-finite value."""


class InfeasibleError(ValueError):
    """No point satisfying the constraint could be found."""


@dataclass(frozen=True)
class SearchConfig:
    grid_step: float = 0.005
    restarts: int = 32
    refine_tolerance: float = 1e-6
    seed: int = 0
    max_iterations: int = 10_000
    max_grid_points: int = 5000

    def __post_init__(self):
        if not 0.0 < self.grid_step <= 0.5:
            raise ValueError(f"grid_step must lie in (0, 0.5], got {self.grid_step}")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.refine_tolerance <= 0:
            raise ValueError("refine_tolerance must be positive")
        if self.max_iterations < 1 or self.max_grid_points < 1:
            raise ValueError("iteration and grid caps must be positive")

    @property
    def min_step(self) -> float:
        # mass-transfer resolution at which refinement stops
        return self.refine_tolerance * 1e-3


@dataclass(frozen=True)
class Optimum:
    value: float
    argument: tuple[np.ndarray, ...]
    constraint_slack: float = math.inf
    converged: bool = True


@dataclass(frozen=True)
class Constraint:
    """Feasible set ``function(point) <= threshold``.

    ``anchor`` maps a batch of points to points where ``function`` is zero;
    both callables follow the problem's ``vectorized`` convention.
    """

    function: Callable
    threshold: float
    anchor: Callable


@dataclass
class _Problem:
    objective: Callable
    dims: tuple[int, ...]
    constraint: Constraint | None = None
    vectorized: bool = False
    offsets: np.ndarray = field(init=False)
    pairs: np.ndarray = field(init=False)

    def __post_init__(self):
        self.offsets = np.concatenate([[0], np.cumsum(self.dims)]).astype(int)
        pairs = []
        for o, d in zip(self.offsets[:-1], self.dims):
            pairs.extend((o + i, o + j) for i in range(d) for j in range(d) if i != j)
        self.pairs = np.array(pairs, dtype=int).reshape(-1, 2)

    @property
    def size(self) -> int:
        return int(self.offsets[-1])

    def split(self, batch: np.ndarray) -> list[np.ndarray]:
        return [batch[:, a:b] for a, b in zip(self.offsets[:-1], self.offsets[1:])]

    def _call(self, fn, batch: np.ndarray) -> np.ndarray:
        if self.vectorized:
            return np.asarray(fn(self.split(batch)), dtype=float).reshape(len(batch))
        return np.array([fn([row[a:b] for a, b in zip(self.offsets[:-1], self.offsets[1:])])
                         for row in batch], dtype=float)

    def value(self, batch: np.ndarray) -> np.ndarray:
        vals = self._call(self.objective, batch)
        bad = ~np.isfinite(vals)
        if bad.any():
            point = batch[int(np.flatnonzero(bad)[0])]
            raise NumericalError(f"objective is not finite at {point.tolist()}")
        return vals

    def slack(self, batch: np.ndarray) -> np.ndarray:
        if self.constraint is None:
            return np.full(len(batch), math.inf)
        return self.constraint.threshold - self._call(self.constraint.function, batch)

    def anchor(self, batch: np.ndarray) -> np.ndarray:
        c = self.constraint
        if self.vectorized:
            return np.concatenate(c.anchor(self.split(batch)), axis=1)
        return np.array([np.concatenate(c.anchor(
            [row[a:b] for a, b in zip(self.offsets[:-1], self.offsets[1:])]))
            for row in batch])

    def project(self, batch: np.ndarray) -> np.ndarray:
        """Move infeasible rows onto the constraint boundary towards the anchor."""
        if self.constraint is None:
            return batch
        slack = self.slack(batch)
        bad = np.flatnonzero(slack < -FEASIBILITY_TOL)
        if bad.size == 0:
            return batch
        out = batch.copy()
        cand = batch[bad]
        anchor = self.anchor(cand)
        if np.any(self.slack(anchor) < -FEASIBILITY_TOL):
            raise InfeasibleError("constraint is violated at the zero-information point")
        # Illinois false position on g(s) = constraint - threshold along
        # anchor + s (cand - anchor); g is convex with g(0) <= 0 < g(1)
        direction = cand - anchor
        lo, hi = np.zeros(len(bad)), np.ones(len(bad))
        g_lo = -self.slack(anchor)
        g_hi = -slack[bad]
        true_lo = g_lo.copy()
        side = np.zeros(len(bad), dtype=int)
        active = np.ones(len(bad), dtype=bool)
        for _ in range(_PROJECTION_STEPS):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            denom = g_hi[idx] - g_lo[idx]
            s = lo[idx] - g_lo[idx] * (hi[idx] - lo[idx]) / np.where(denom > 0, denom, 1.0)
            s = np.where((denom > 0) & (s > lo[idx]) & (s < hi[idx]), s, 0.5 * (lo[idx] + hi[idx]))
            g = -self.slack(anchor[idx] + s[:, None] * direction[idx])
            ok = g <= FEASIBILITY_TOL
            i_ok, i_bad = idx[ok], idx[~ok]
            lo[i_ok], g_lo[i_ok], true_lo[i_ok] = s[ok], g[ok], g[ok]
            g_hi[i_ok[side[i_ok] == 1]] *= 0.5
            side[i_ok] = 1
            hi[i_bad], g_hi[i_bad] = s[~ok], g[~ok]
            g_lo[i_bad[side[i_bad] == -1]] *= 0.5
            side[i_bad] = -1
            active[idx] = (true_lo[idx] < -_PROJECTION_SLACK) & (hi[idx] - lo[idx] > _PROJECTION_WIDTH)
        out[bad] = anchor + lo[:, None] * (cand - anchor)
        return out


def _best(vals: np.ndarray, batch: np.ndarray) -> int:
    """Index of the largest value; exact ties go to the lexicographically smallest point."""
    top = np.flatnonzero(vals == vals.max())
    if top.size == 1:
        return int(top[0])
    order = np.lexsort(batch[top].T[::-1])
    return int(top[order[0]])


def _pairwise_moves(problem: _Problem, xs: np.ndarray, steps: np.ndarray) -> np.ndarray:
    """For each row of ``xs``, every single-block transfer of mass ``step`` from j to i.

    Returns shape (S, P, n); transfers are capped by the available mass.
    """
    i, j = problem.pairs[:, 0], problem.pairs[:, 1]
    amount = np.minimum(steps[:, None], xs[:, j])                  # (S, P)
    cands = np.repeat(xs[:, None, :], len(i), axis=1)
    p = np.arange(len(i))
    cands[:, p, i] += amount
    cands[:, p, j] = np.maximum(cands[:, p, j] - amount, 0.0)
    return cands


def _random_moves(problem: _Problem, xs: np.ndarray, steps: np.ndarray,
                  rng: np.random.Generator, count: int) -> np.ndarray:
    """``count`` random tangent moves per row, shrunk to stay in the simplexes; (S, count, n)."""
    d = rng.standard_normal((len(xs), count, problem.size))
    for a, b in zip(problem.offsets[:-1], problem.offsets[1:]):
        d[..., a:b] -= d[..., a:b].mean(axis=-1, keepdims=True)
    d /= np.abs(d).max(axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        limits = np.where(d < 0, xs[:, None, :] / -d, np.inf)
    scale = np.minimum(steps[:, None], limits.min(axis=-1))
    return np.maximum(xs[:, None, :] + scale[..., None] * d, 0.0)


def _pattern_moves(old: np.ndarray, new: np.ndarray) -> np.ndarray:
    """Extrapolations ``new + f * (new - old)`` for doubling ``f``, kept nonnegative; (S, F, n)."""
    d = new - old
    with np.errstate(divide="ignore", invalid="ignore"):
        limit = np.where(d < 0, new / -d, np.inf).min(axis=1)           # (S,)
    f = np.minimum(_PATTERN_FACTORS[None, :], limit[:, None])           # (S, F)
    return np.maximum(new[:, None, :] + f[..., None] * d[:, None, :], 0.0)


def _poll(problem: _Problem, cands: np.ndarray):
    """Project and evaluate a (S, M, n) candidate stack; best value and point per row."""
    s, m, n = cands.shape
    flat = problem.project(cands.reshape(s * m, n))
    vals = problem.value(flat).reshape(s, m)
    k = np.argmax(vals, axis=1)
    rows = np.arange(s)
    return vals[rows, k], flat.reshape(s, m, n)[rows, k]


def _local_search(problem: _Problem, xs: np.ndarray, fs: np.ndarray, step: float,
                  min_step: float, max_iterations: int, rng: np.random.Generator,
                  tolerance: float = 1e-6):
    """Pattern search with step halving, run for all rows of ``xs`` at once.

    A move is accepted when it raises the objective by more than
    ``max(_IMPROVE_EPS, _FORCING * step**2)``; otherwise random tangent
    directions are tried before the step is halved. A row also stops once
    it gains less than ``tolerance * _STALL_FRACTION`` over ``_STALL_WINDOW``
    iterations. Returns the final points, values and per-row convergence flags.
    """
    xs = np.array(xs, dtype=float, copy=True)
    fs = np.array(fs, dtype=float, copy=True)
    steps = np.full(len(xs), float(step))
    mark = fs.copy()
    for it in range(1, max_iterations + 1):
        live = np.flatnonzero(steps >= min_step)
        if live.size == 0:
            break
        if it % _STALL_WINDOW == 0:
            stalled = live[fs[live] - mark[live] < tolerance * _STALL_FRACTION]
            steps[stalled] = 0.0
            mark = fs.copy()
            live = np.flatnonzero(steps >= min_step)
            if live.size == 0:
                break
        gain = np.maximum(_IMPROVE_EPS, _FORCING * steps[live] ** 2)
        better = np.zeros(live.size, dtype=bool)
        if len(problem.pairs):
            val, pt = _poll(problem, _pairwise_moves(problem, xs[live], steps[live]))
            better = val > fs[live] + gain
            _accept(problem, xs, fs, live[better], pt[better], val[better], gain[better])
        stuck = live[~better]
        if stuck.size:
            val, pt = _poll(problem, _random_moves(problem, xs[stuck], steps[stuck], rng,
                                                   _RANDOM_DIRECTIONS))
            ok = val > fs[stuck] + gain[~better]
            _accept(problem, xs, fs, stuck[ok], pt[ok], val[ok], gain[~better][ok])
            steps[stuck[~ok]] *= 0.5
    return xs, fs, steps < min_step


def _accept(problem: _Problem, xs, fs, rows, pts, vals, gain) -> None:
    """Move ``rows`` to ``pts``, then try extending each move along its own direction."""
    if rows.size == 0:
        return
    old = xs[rows].copy()
    xs[rows], fs[rows] = pts, vals
    val, pt = _poll(problem, _pattern_moves(old, pts))
    ok = val > vals + gain
    xs[rows[ok]], fs[rows[ok]] = pt[ok], val[ok]


def _as_blocks(problem: _Problem, x: np.ndarray) -> tuple[np.ndarray, ...]:
    blocks = []
    for a, b in zip(problem.offsets[:-1], problem.offsets[1:]):
        blk = np.clip(x[a:b], 0.0, None)
        blk = blk / blk.sum()
        blk.setflags(write=False)
        blocks.append(blk)
    return tuple(blocks)


def _finish(problem: _Problem, x: np.ndarray, converged: bool) -> Optimum:
    blocks = _as_blocks(problem, x)
    flat = np.concatenate(blocks)[None, :]
    flat = problem.project(flat)
    blocks = _as_blocks(problem, flat[0])
    flat = np.concatenate(blocks)[None, :]
    value = float(problem.value(flat)[0])
    slack = float(problem.slack(flat)[0])
    return Optimum(value=value, argument=blocks, constraint_slack=slack, converged=converged)


def simplex_grid(dim: int, step: float, max_points: int | None = None) -> np.ndarray:
    """All points of the simplex whose coordinates are multiples of ``1/n``.

    ``n = round(1/step)``, lowered until at most ``max_points`` points remain.
    """
    n = max(1, int(round(1.0 / step)))
    if max_points is not None:
        while n > 1 and math.comb(n + dim - 1, dim - 1) > max_points:
            n -= 1
    if dim == 1:
        return np.ones((1, 1))
    bars = np.array(list(itertools.combinations(range(n + dim - 1), dim - 1)))
    edges = np.hstack([np.full((len(bars), 1), -1), bars, np.full((len(bars), 1), n + dim - 1)])
    return (np.diff(edges, axis=1) - 1).astype(float) / n


def maximize_over_simplex(objective: Callable, dim: int, config: SearchConfig | None = None, *,
                          vectorized: bool = False) -> Optimum:
    """Maximize ``objective`` over the probability simplex of dimension ``dim``.

    The objective receives a single probability vector (or, when
    ``vectorized``, a ``(B, dim)`` array).
    """
    if dim < 1:
        raise ValueError("dim must be at least 1")
    config = config or SearchConfig()
    problem = _Problem(lambda blocks: objective(blocks[0]), (dim,), vectorized=vectorized)
    grid = simplex_grid(dim, config.grid_step, config.max_grid_points)
    vals = problem.value(grid)
    k = _best(vals, grid)
    if dim == 1:
        return _finish(problem, grid[k], True)
    n_step = float(grid[grid > 0].min()) if np.any(grid > 0) else 1.0
    rng = np.random.default_rng(config.seed)
    xs, _, converged = _local_search(problem, grid[k][None, :], vals[k:k + 1], n_step,
                                     config.min_step, config.max_iterations, rng,
                                     config.refine_tolerance)
    return _finish(problem, xs[0], bool(converged[0]))


def _random_start(problem: _Problem, rng: np.random.Generator) -> np.ndarray:
    return np.concatenate([rng.dirichlet(np.ones(d)) for d in problem.dims])


def maximize_over_product(objective: Callable, shapes: Sequence[int],
                          constraint: Constraint | None = None,
                          config: SearchConfig | None = None, *,
                          starts: Sequence[Sequence] = (), vectorized: bool = False) -> Optimum:
    """Maximize ``objective`` over a product of simplexes of sizes ``shapes``.

    ``starts`` are structured starting points (each a list of blocks) tried
    in addition to ``config.restarts`` seeded Dirichlet draws. Every start is
    refined coarsely; the best few are then refined to full resolution.
    The result is deterministic for a given configuration.
    """
    shapes = tuple(int(s) for s in shapes)
    if not shapes or min(shapes) < 1:
        raise ValueError("shapes must be a nonempty list of positive dimensions")
    config = config or SearchConfig()
    problem = _Problem(objective, shapes, constraint, vectorized)
    rng = np.random.default_rng(config.seed)

    points = [np.concatenate([np.asarray(b, dtype=float) for b in s]) for s in starts]
    points += [_random_start(problem, rng) for _ in range(config.restarts)]
    batch = problem.project(np.array(points))
    vals = problem.value(batch)

    cx, cv, _ = _local_search(problem, batch, vals, 0.25, _COARSE_MIN_STEP,
                              config.max_iterations, rng,
                              max(config.refine_tolerance, _COARSE_TOLERANCE))
    top = []
    remaining = np.ones(len(cv), dtype=bool)
    while remaining.any() and len(top) < _REFINE_TOP:
        k = _best(np.where(remaining, cv, -np.inf), cx)
        top.append(k)
        remaining[k] = False
    fx, fv, conv = _local_search(problem, cx[top], cv[top], _COARSE_MIN_STEP, config.min_step,
                                 config.max_iterations, rng, config.refine_tolerance)
    k = _best(fv, fx)
    return _finish(problem, fx[k], bool(conv[k]))


def witsenhausen_G(p_t, p_u_given_t, gamma: float, config: SearchConfig | None = None, *,
                   v_card: int | None = None) -> float:
    """``inf H(U|V)`` over ``p(v|t)`` with ``H(T|V) >= gamma`` and ``V -> T -> U``.

    ``v_card`` defaults to ``|T| + 2``.
    """
    from .kernels import aux_terms
    from .probability import entropy, prob_vector, stochastic_matrix

    p_t = prob_vector(p_t, name="p_t")
    w = stochastic_matrix(p_u_given_t, name="p_u_given_t")
    if w.shape[0] != p_t.size:
        raise ValueError("p_u_given_t needs one row per state")
    h_t = entropy(p_t)
    if gamma < 0 or gamma > h_t + FEASIBILITY_TOL:
        raise ValueError(f"gamma={gamma!r} outside [0, H(T)={h_t!r}]")
    t = p_t.size
    v_card = t + 2 if v_card is None else int(v_card)

    def objective(blocks):
        return -aux_terms(p_t, w, np.stack(blocks, axis=1))[:, 0]

    def info(blocks):
        return aux_terms(p_t, w, np.stack(blocks, axis=1))[:, 2]

    def anchor(blocks):
        p_v = np.einsum("t,btv->bv", p_t, np.stack(blocks, axis=1))
        return [p_v] * len(blocks)

    copy = np.zeros((t, v_card))
    copy[np.arange(t), np.arange(t) % v_card] = 1.0
    budget = max(h_t - gamma, 0.0)
    opt = maximize_over_product(objective, [v_card] * t, Constraint(info, budget, anchor), config,
                                starts=[list(copy)], vectorized=True)
    return -opt.value
