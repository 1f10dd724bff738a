"""Cut-set bound, the auxiliary-variable upper bound, and the compress-and-forward
rate for a primitive relay channel with relay link rate ``r0`` (bits/use).
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .optimizer import Constraint, SearchConfig, maximize_over_product, maximize_over_simplex
from .probability import ChannelSpec

TIE_TOL = 1e-9
IDENTITY_TOL = 1e-9

MAC = "multiple-access"
BROADCAST = "broadcast"
BOTH = "both"


class IdentityCheckError(RuntimeError):
    """The two forms of the compress-and-forward constraint disagree."""


class ResolutionError(ValueError):
    """A rate grid is too coarse or too short to bracket the requested quantity."""


@dataclass(frozen=True)
class BoundResult:
    value: float
    p_x: np.ndarray
    p_v_given_t: np.ndarray | None
    active_branch: str | None
    constraint_slack: float
    converged: bool = True


@dataclass(frozen=True)
class RateGrid:
    r0_values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(r) for r in self.r0_values)
        if not vals:
            raise ValueError("rate grid is empty")
        if any(r < 0 for r in vals):
            raise ValueError("rates must be nonnegative")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("rates must be strictly ascending")
        object.__setattr__(self, "r0_values", vals)

    @classmethod
    def linspace(cls, start: float, stop: float, steps: int) -> "RateGrid":
        if steps == 1:
            return cls((float(start),))
        return cls(tuple(np.round(np.linspace(start, stop, steps), 12)))

    @property
    def step(self) -> float:
        v = self.r0_values
        return max((b - a for a, b in zip(v, v[1:])), default=0.0)

    def __iter__(self):
        return iter(self.r0_values)

    def __len__(self):
        return len(self.r0_values)


@dataclass(frozen=True)
class CriticalRate:
    rate: float
    grid_step: float


@dataclass(frozen=True)
class SweepRow:
    r0: float
    cutset: float
    upper_bound: float
    caf: float
    closed_capacity: float | None = None
    closed_cutset: float | None = None


def _branch(first: float, second: float) -> str:
    if abs(first - second) <= TIE_TOL:
        return BOTH
    return MAC if first < second else BROADCAST


def _check_rate(r0: float) -> float:
    r0 = float(r0)
    if not r0 >= 0:
        raise ValueError(f"link rate must be nonnegative, got {r0}")
    return r0


def _default_v_card(channel: ChannelSpec) -> int:
    return channel.t_size + 2


def _aux_starts(channel: ChannelSpec, v_card: int) -> list[list[np.ndarray]]:
    """Uniform input paired with a copy of the state and with a constant auxiliary."""
    t = channel.t_size
    copy = np.zeros((t, v_card))
    copy[np.arange(t), np.arange(t) % v_card] = 1.0
    const = np.full((t, v_card), 1.0 / v_card)
    px = np.full(channel.x_size, 1.0 / channel.x_size)
    return [[px, *copy], [px, *const]]


def _stack_q(blocks: list[np.ndarray], t_size: int) -> np.ndarray:
    return np.stack(blocks[1:1 + t_size], axis=1)


def _independent_anchor(p_t: np.ndarray) -> Callable:
    """Replace every row of p(v|t) by the marginal p(v), keeping p(x)."""
    def anchor(blocks):
        q = np.stack(blocks[1:], axis=1)
        p_v = np.einsum("t,btv->bv", p_t, q)
        return [blocks[0]] + [p_v] * len(blocks[1:])
    return anchor


def cut_set_bound(channel: ChannelSpec, r0: float, config: SearchConfig | None = None) -> BoundResult:
    """``max_p(x) min{I(X;Y) + r0, I(X;Y|T)}``."""
    r0 = _check_rate(r0)
    pt, k = channel.p_t, channel.kernel

    def objective(px):
        terms = kernels.cutset_terms(px, pt, k)
        return np.minimum(terms[:, 0] + r0, terms[:, 1])

    opt = maximize_over_simplex(objective, channel.x_size, config, vectorized=True)
    px = opt.argument[0]
    i_xy, i_xy_t = kernels.cutset_terms(px[None, :], pt, k)[0]
    return BoundResult(value=max(opt.value, 0.0), p_x=px, p_v_given_t=None,
                       active_branch=_branch(i_xy + r0, i_xy_t),
                       constraint_slack=float("inf"), converged=opt.converged)


def _relay_search(channel, r0, v_card, config, value_col, constraint_col, min_with_broadcast):
    t = channel.t_size
    pt, k = channel.p_t, channel.kernel

    def terms(blocks):
        return kernels.relay_terms(blocks[0], pt, k, _stack_q(blocks, t))

    def objective(blocks):
        tr = terms(blocks)
        if min_with_broadcast:
            return np.minimum(tr[:, value_col], tr[:, kernels.I_X_Y_GIVEN_T])
        return tr[:, value_col]

    if constraint_col == kernels.I_T_V:
        eye = np.eye(t)

        def constraint_fn(blocks):
            # I(T;V) does not depend on p(x): use the cheaper state-only kernel
            return kernels.aux_terms(pt, eye, _stack_q(blocks, t))[:, 2]
    else:
        def constraint_fn(blocks):
            return terms(blocks)[:, constraint_col]

    constraint = Constraint(constraint_fn, r0, _independent_anchor(pt))
    opt = maximize_over_product(objective, [channel.x_size] + [v_card] * t, constraint, config,
                                starts=_aux_starts(channel, v_card), vectorized=True)
    px = opt.argument[0]
    q = np.stack(opt.argument[1:])
    q.setflags(write=False)
    final = kernels.relay_terms(px[None, :], pt, k, q[None, :, :])[0]
    return opt, px, q, final


def new_upper_bound(channel: ChannelSpec, r0: float, v_card: int | None = None,
                    config: SearchConfig | None = None) -> BoundResult:
    """``sup min{I(X,V;Y), I(X;Y|T)}`` over ``p(x)p(t)p(v|t)`` with ``I(T;V) <= r0``.

    ``v_card`` defaults to ``|T| + 2``.
    """
    r0 = _check_rate(r0)
    v_card = _default_v_card(channel) if v_card is None else int(v_card)
    if v_card < 1:
        raise ValueError("v_card must be at least 1")
    opt, px, q, final = _relay_search(channel, r0, v_card, config, kernels.I_XV_Y,
                                      kernels.I_T_V, True)
    return BoundResult(value=max(opt.value, 0.0), p_x=px, p_v_given_t=q,
                       active_branch=_branch(final[kernels.I_XV_Y], final[kernels.I_X_Y_GIVEN_T]),
                       constraint_slack=opt.constraint_slack, converged=opt.converged)


def caf_rate(channel: ChannelSpec, r0: float, v_card: int = 2,
             config: SearchConfig | None = None) -> BoundResult:
    """Compress-and-forward rate ``sup I(X;Y|V)`` subject to ``I(T;V|Y) <= r0``.

    The constraint is also evaluated as ``I(T;V) - I(V;Y)`` at the optimum;
    disagreement beyond ``IDENTITY_TOL`` raises IdentityCheckError.
    """
    r0 = _check_rate(r0)
    if v_card < 1:
        raise ValueError("v_card must be at least 1")
    opt, px, q, final = _relay_search(channel, r0, int(v_card), config, kernels.I_X_Y_GIVEN_V,
                                      kernels.I_T_V_GIVEN_Y, False)
    rewritten = final[kernels.I_T_V] - final[kernels.I_V_Y]
    if abs(rewritten - final[kernels.I_T_V_GIVEN_Y]) > IDENTITY_TOL:
        raise IdentityCheckError(
            f"I(T;V|Y)={final[kernels.I_T_V_GIVEN_Y]!r} but I(T;V)-I(V;Y)={rewritten!r}")
    return BoundResult(value=max(opt.value, 0.0), p_x=px, p_v_given_t=q, active_branch=None,
                       constraint_slack=opt.constraint_slack, converged=opt.converged)


def capacity_endpoints(channel: ChannelSpec, config: SearchConfig | None = None) -> tuple[float, float]:
    """``(C(0), C(inf)) = (max I(X;Y), max I(X;Y|T))``."""
    pt, k = channel.p_t, channel.kernel
    c0 = maximize_over_simplex(lambda px: kernels.cutset_terms(px, pt, k)[:, 0],
                               channel.x_size, config, vectorized=True)
    cinf = maximize_over_simplex(lambda px: kernels.cutset_terms(px, pt, k)[:, 1],
                                 channel.x_size, config, vectorized=True)
    return max(c0.value, 0.0), max(cinf.value, 0.0)


def critical_r0_lower_bound(channel: ChannelSpec, grid: RateGrid, tol: float = 1e-3,
                            config: SearchConfig | None = None, *, v_card: int | None = None,
                            bound: str = "upper") -> CriticalRate:
    """Smallest grid rate at which the chosen bound reaches ``C(inf) - tol``.

    Every grid rate below the returned one has bound value below
    ``C(inf) - tol``, so the capacity there is short of ``C(inf)``.
    ``bound`` is ``"upper"`` (the auxiliary bound) or ``"cutset"``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if bound not in ("upper", "cutset"):
        raise ValueError(f"unknown bound {bound!r}")
    _, c_inf = capacity_endpoints(channel, config)
    target = c_inf - tol
    for i, r0 in enumerate(grid):
        if bound == "upper":
            value = new_upper_bound(channel, r0, v_card, config).value
        else:
            value = cut_set_bound(channel, r0, config).value
        if value >= target:
            if i == 0 and r0 > 0:
                raise ResolutionError(
                    f"bound already reaches C(inf) at the first grid rate {r0}; start the grid at 0")
            return CriticalRate(rate=r0, grid_step=grid.step)
    raise ResolutionError(f"bound stays below C(inf) - tol up to rate {grid.r0_values[-1]}")


def _sweep_row(args) -> SweepRow:
    channel, r0, v_card_ub, v_card_caf, config, reference = args
    closed_cap, closed_cs = reference(r0) if reference is not None else (None, None)
    return SweepRow(
        r0=r0,
        cutset=cut_set_bound(channel, r0, config).value,
        upper_bound=new_upper_bound(channel, r0, v_card_ub, config).value,
        caf=caf_rate(channel, r0, v_card_caf, config).value,
        closed_capacity=closed_cap,
        closed_cutset=closed_cs,
    )


def sweep(channel: ChannelSpec, grid: RateGrid, v_card_ub: int | None = None, v_card_caf: int = 2,
          config: SearchConfig | None = None, *, reference: Callable | None = None,
          workers: int = 1) -> list[SweepRow]:
    """All three bounds at every grid rate, in grid order.

    ``reference(r0)`` may return ``(closed_capacity, closed_cutset)`` (either
    may be None). Rows are independent, so ``workers > 1`` evaluates them in
    separate processes with identical results.
    """
    jobs = [(channel, r0, v_card_ub, v_card_caf, config, reference) for r0 in grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_row, jobs))
    return [_sweep_row(j) for j in jobs]
