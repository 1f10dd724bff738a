"""Finite probability primitives: validated distributions, channel models,
joint tables with named axes, and entropy / mutual-information functionals.

All information quantities are in bits. The convention ``0 log 0 = 0`` is
used throughout; masses below ``ZERO_MASS`` are treated as exact zeros.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MASS_TOL = 1e-9
ZERO_MASS = 1e-15
MAX_TABLE_SIZE = 10**7


class ValidationError(ValueError):
    """A distribution or channel violates a probability invariant."""


class ShapeError(ValueError):
    """Array dimensions are inconsistent."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def prob_vector(weights, *, normalize: bool = False, name: str = "distribution") -> np.ndarray:
    """Return ``weights`` as a read-only probability vector.

    Raises ValidationError on negative entries or mass away from 1 by more
    than ``MASS_TOL``. With ``normalize=True`` the mass is rescaled first.
    """
    p = np.asarray(weights, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ShapeError(f"{name}: expected a non-empty 1-d vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValidationError(f"{name}: non-finite entry")
    if np.any(p < 0):
        raise ValidationError(f"{name}: negative entry {p.min()!r}")
    if normalize:
        total = p.sum()
        if total <= 0:
            raise ValidationError(f"{name}: zero total mass")
        p = p / total
    elif abs(p.sum() - 1.0) > MASS_TOL:
        raise ValidationError(f"{name}: mass {float(p.sum()):.12g} differs from 1")
    return _frozen(p)


def stochastic_matrix(rows, *, normalize: bool = False, name: str = "matrix") -> np.ndarray:
    """Return ``rows`` as a read-only row-stochastic matrix."""
    m = np.asarray(rows, dtype=float)
    if m.ndim != 2 or m.size == 0:
        raise ShapeError(f"{name}: expected a non-empty 2-d array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError(f"{name}: non-finite entry")
    if np.any(m < 0):
        r = int(np.argwhere(m < 0)[0][0])
        raise ValidationError(f"{name}: negative entry in row {r}")
    sums = m.sum(axis=1)
    if normalize:
        if np.any(sums <= 0):
            raise ValidationError(f"{name}: row with zero mass")
        m = m / sums[:, None]
    else:
        bad = np.flatnonzero(np.abs(sums - 1.0) > MASS_TOL)
        if bad.size:
            r = int(bad[0])
            raise ValidationError(f"{name}: row {r} sums to {float(sums[r]):.12g}")
    return _frozen(m)


@dataclass(frozen=True, eq=False)
class ChannelSpec:
    """State-dependent channel ``p(y|x,t)`` with i.i.d. state prior ``p(t)``.

    ``kernel`` is indexed ``[x][t][y]``.
    """

    p_t: np.ndarray
    kernel: np.ndarray

    def __post_init__(self):
        p_t = prob_vector(self.p_t, name="p_t")
        k = np.asarray(self.kernel, dtype=float)
        if k.ndim != 3:
            raise ShapeError(f"kernel: expected 3 axes [x][t][y], got shape {k.shape}")
        if k.shape[1] != p_t.size:
            raise ShapeError(f"kernel has {k.shape[1]} states but p_t has {p_t.size}")
        if not np.all(np.isfinite(k)) or np.any(k < 0):
            raise ValidationError("kernel: negative or non-finite entry")
        sums = k.sum(axis=2)
        bad = np.argwhere(np.abs(sums - 1.0) > MASS_TOL)
        if bad.size:
            x, t = (int(i) for i in bad[0])
            raise ValidationError(f"kernel row [x={x}][t={t}] sums to {float(sums[x, t]):.12g}")
        object.__setattr__(self, "p_t", p_t)
        object.__setattr__(self, "kernel", _frozen(k))

    @property
    def x_size(self) -> int:
        return self.kernel.shape[0]

    @property
    def t_size(self) -> int:
        return self.kernel.shape[1]

    @property
    def y_size(self) -> int:
        return self.kernel.shape[2]

    def __eq__(self, other):
        if not isinstance(other, ChannelSpec):
            return NotImplemented
        return (self.kernel.shape == other.kernel.shape
                and np.array_equal(self.p_t, other.p_t)
                and np.array_equal(self.kernel, other.kernel))

    def __hash__(self):
        return hash((self.kernel.shape, self.p_t.tobytes(), self.kernel.tobytes()))


def _plogp_sum(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > ZERO_MASS]
    return float(-np.sum(p * np.log2(p)))


def entropy(dist) -> float:
    """Shannon entropy in bits of a probability vector."""
    return _plogp_sum(prob_vector(dist))


def binary_entropy(s: float) -> float:
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"binary entropy argument {s!r} outside [0, 1]")
    return _plogp_sum(np.array([s, 1.0 - s]))


def star(a: float, b: float) -> float:
    """Binary convolution ``a(1-b) + b(1-a)``."""
    for v in (a, b):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"star argument {v!r} outside [0, 1]")
    return a * (1.0 - b) + b * (1.0 - a)


class JointDistribution:
    """Dense probability table over a product of labelled finite alphabets."""

    __slots__ = ("labels", "table")

    def __init__(self, labels: Sequence[str], table):
        labels = tuple(labels)
        table = np.asarray(table, dtype=float)
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate axis labels {labels}")
        if table.ndim != len(labels):
            raise ShapeError(f"{len(labels)} labels for a {table.ndim}-d table")
        if table.size > MAX_TABLE_SIZE:
            raise ShapeError(f"table of {table.size} entries exceeds {MAX_TABLE_SIZE}")
        if np.any(table < 0) or abs(table.sum() - 1.0) > MASS_TOL:
            raise ValidationError("joint table must be nonnegative with unit mass")
        self.labels = labels
        self.table = _frozen(table)

    @property
    def shape(self) -> dict[str, int]:
        return dict(zip(self.labels, self.table.shape))

    def _axes(self, labels: Iterable[str]) -> list[int]:
        out = []
        for lab in labels:
            try:
                out.append(self.labels.index(lab))
            except ValueError:
                raise KeyError(f"unknown variable {lab!r}; axes are {self.labels}") from None
        return out

    def entropy(self, labels: Iterable[str]) -> float:
        """Joint entropy of the listed variables (0 for an empty list)."""
        labels = tuple(labels)
        if not labels:
            return 0.0
        return _plogp_sum(marginalize(self, labels).table)

    def state_posterior(self, state: str = "T", aux: str = "V", symbol: int = 1) -> np.ndarray:
        """``Pr(state=symbol | aux=v)`` for every ``v`` (NaN where ``p(v)=0``)."""
        tv = marginalize(self, (state, aux)).table
        pv = tv.sum(axis=0)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(pv > 0, tv[symbol] / pv, np.nan)


def marginalize(joint: JointDistribution, keep: Iterable[str]) -> JointDistribution:
    keep = tuple(keep)
    axes = joint._axes(keep)
    drop = tuple(i for i in range(len(joint.labels)) if i not in axes)
    summed = joint.table.sum(axis=drop) if drop else joint.table
    remaining = [i for i in range(len(joint.labels)) if i in axes]
    # put the kept axes in the order requested
    order = [remaining.index(i) for i in axes]
    return JointDistribution(keep, np.transpose(summed, order))


def _check_groups(joint: JointDistribution, *groups: Iterable[str]) -> list[tuple[str, ...]]:
    out = [tuple(g) for g in groups]
    seen: set[str] = set()
    for g in out:
        joint._axes(g)
        if seen & set(g):
            raise ValueError(f"variable groups overlap: {out}")
        seen |= set(g)
    return out


def mutual_information(joint: JointDistribution, group_a, group_b) -> float:
    a, b = _check_groups(joint, group_a, group_b)
    return joint.entropy(a) + joint.entropy(b) - joint.entropy(a + b)


def conditional_mutual_information(joint: JointDistribution, group_a, group_b, group_c) -> float:
    a, b, c = _check_groups(joint, group_a, group_b, group_c)
    return (joint.entropy(a + c) + joint.entropy(b + c)
            - joint.entropy(a + b + c) - joint.entropy(c))


def build_joint(p_x, channel: ChannelSpec, p_v_given_t) -> JointDistribution:
    """Joint ``p(x,t,v,y) = p(x) p(t) p(v|t) p(y|x,t)`` with axes X, T, V, Y."""
    p_x = prob_vector(p_x, name="p_x")
    q = stochastic_matrix(p_v_given_t, name="p_v_given_t")
    if p_x.size != channel.x_size:
        raise ShapeError(f"p_x has {p_x.size} entries, channel has |X|={channel.x_size}")
    if q.shape[0] != channel.t_size:
        raise ShapeError(f"p_v_given_t has {q.shape[0]} rows, channel has |T|={channel.t_size}")
    size = channel.x_size * channel.t_size * q.shape[1] * channel.y_size
    if size > MAX_TABLE_SIZE:
        raise ShapeError(f"joint table of {size} entries exceeds {MAX_TABLE_SIZE}")
    table = np.einsum("x,t,tv,xty->xtvy", p_x, channel.p_t, q, channel.kernel)
    return JointDistribution(("X", "T", "V", "Y"), table)
