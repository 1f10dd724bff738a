"""Channel families with known closed-form behaviour, used as analytic oracles.

Families and their name syntax (for :func:`from_name`):

* ``erasure:alpha=A,eps=E``            two-state symmetric binary erasure channel
* ``kim:delta=D``                      ``Y = X xor T``, ``T ~ Ber(D)``
* ``modadd:delta=D,delta_tilde=DT``    ``Y = X xor Z``, relay sees ``T = Z xor Z~``
* ``multiplicative:alpha=A,delta=D``   ``Y = T*X + N``, ``T ~ Ber(A)``, ``N ~ Ber(D)``
"""
from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np
from scipy.optimize import minimize_scalar

from .kernels import aux_terms
from .optimizer import Constraint, SearchConfig, maximize_over_product
from .probability import ChannelSpec, binary_entropy, star, stochastic_matrix

SCAN_STEP = 1e-4


def _check_probs(obj):
    for f in fields(obj):
        v = getattr(obj, f.name)
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{f.name}={v!r} is not a probability")


@dataclass(frozen=True)
class ErasureParams:
    alpha: float    # Pr(T=0)
    eps: float

    def __post_init__(self):
        _check_probs(self)


@dataclass(frozen=True)
class MultiplicativeParams:
    alpha: float    # Pr(T=1)
    delta: float    # Pr(N=1)

    def __post_init__(self):
        _check_probs(self)


@dataclass(frozen=True)
class ModAddParams:
    delta: float        # Z ~ Ber(delta)
    delta_tilde: float  # Z~ ~ Ber(delta_tilde)

    def __post_init__(self):
        _check_probs(self)


# ---------------------------------------------------------------- erasure

def erasure_two_state(params: ErasureParams) -> ChannelSpec:
    e = params.eps
    w0 = [[0.0, 1 - e, e], [e, 1 - e, 0.0]]
    w1 = [[e, 1 - e, 0.0], [0.0, 1 - e, e]]
    kernel = np.stack([np.array(w0), np.array(w1)], axis=1)   # [x][t][y]
    return ChannelSpec(p_t=np.array([params.alpha, 1 - params.alpha]), kernel=kernel)


def erasure_capacity_closed(params: ErasureParams, r0: float) -> float:
    a, e = params.alpha, params.eps
    return min(e * (1 - binary_entropy(a)) + e * r0, e)


def erasure_cutset_closed(params: ErasureParams, r0: float) -> float:
    a, e = params.alpha, params.eps
    return min(e * (1 - binary_entropy(a)) + r0, e)


# ---------------------------------------------------------------- xor state

def kim_xor(delta: float) -> ChannelSpec:
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta={delta!r} is not a probability")
    kernel = np.zeros((2, 2, 2))
    for x in range(2):
        for t in range(2):
            kernel[x, t, x ^ t] = 1.0
    return ChannelSpec(p_t=np.array([1 - delta, delta]), kernel=kernel)


def kim_capacity_closed(delta: float, r0: float) -> float:
    """Cut-set value of ``Y = X xor T``, attained by a uniform input."""
    return min(1 - binary_entropy(delta) + r0, 1.0)


# ---------------------------------------------------------------- modulo-additive

def _mod_add_joint(params: ModAddParams) -> np.ndarray:
    """``p(z, t)`` with ``T = Z xor Z~``."""
    pz = np.array([1 - params.delta, params.delta])
    pzt = np.array([1 - params.delta_tilde, params.delta_tilde])
    joint = np.zeros((2, 2))
    for z in range(2):
        for t in range(2):
            joint[z, t] = pz[z] * pzt[z ^ t]
    return joint


def _noise_given_state(params: ModAddParams) -> tuple[np.ndarray, np.ndarray]:
    joint = _mod_add_joint(params)
    p_t = joint.sum(axis=0)
    rows = []
    for t in range(2):
        # an impossible state keeps the prior noise law
        rows.append(joint[:, t] / p_t[t] if p_t[t] > 0 else joint.sum(axis=1))
    return p_t, stochastic_matrix(rows, normalize=True, name="p(z|t)")


def mod_add(params: ModAddParams) -> ChannelSpec:
    p_t, z_given_t = _noise_given_state(params)
    assert abs(p_t[1] - star(params.delta, params.delta_tilde)) < 1e-12
    kernel = np.zeros((2, 2, 2))
    for x in range(2):
        for t in range(2):
            for z in range(2):
                kernel[x, t, x ^ z] += z_given_t[t, z]
    return ChannelSpec(p_t=p_t, kernel=kernel)


def yu_capacity(params: ModAddParams, r0: float, v_card: int | None = None,
                config: SearchConfig | None = None) -> float:
    """``max 1 - H(Z|V)`` over ``p(v|t)`` with ``I(T;V) <= r0``.

    Searches ``p(v|t)`` directly on ``p(z,t,v)``; no channel input is involved.
    """
    if r0 < 0:
        raise ValueError("link rate must be nonnegative")
    p_t, z_given_t = _noise_given_state(params)
    t = len(p_t)
    v_card = t + 2 if v_card is None else int(v_card)

    def objective(blocks):
        return 1.0 - aux_terms(p_t, z_given_t, np.stack(blocks, axis=1))[:, 0]

    def info(blocks):
        return aux_terms(p_t, z_given_t, np.stack(blocks, axis=1))[:, 2]

    def anchor(blocks):
        p_v = np.einsum("t,btv->bv", p_t, np.stack(blocks, axis=1))
        return [p_v] * len(blocks)

    copy = np.zeros((t, v_card))
    copy[np.arange(t), np.arange(t) % v_card] = 1.0
    opt = maximize_over_product(objective, [v_card] * t, Constraint(info, r0, anchor), config,
                                starts=[list(copy)], vectorized=True)
    return opt.value


# ---------------------------------------------------------------- multiplicative

def multiplicative(params: MultiplicativeParams) -> ChannelSpec:
    n = np.array([1 - params.delta, params.delta])
    kernel = np.zeros((2, 2, 3))
    for x in range(2):
        for t in range(2):
            for y in range(3):
                m = y - t * x
                if m in (0, 1):
                    kernel[x, t, y] = n[m]
    return ChannelSpec(p_t=np.array([1 - params.alpha, params.alpha]), kernel=kernel)


def _h3(a, b, c):
    out = np.zeros_like(np.asarray(a, dtype=float))
    for s in (a, b, c):
        s = np.asarray(s, dtype=float)
        safe = np.where(s > 0, s, 1.0)
        out = out - np.where(s > 0, s * np.log2(safe), 0.0)
    return out


def _multiplicative_terms(p, alpha, delta):
    """``H(Y)`` and ``I(X;Y|T)`` as functions of ``p = Pr(X=1)``."""
    p = np.asarray(p, dtype=float)
    py0 = p * (1 - alpha) * (1 - delta) + (1 - p) * (1 - delta)
    py1 = (1 - p) * delta + p * ((1 - alpha) * delta + alpha * (1 - delta))
    py2 = p * alpha * delta
    h_y = _h3(py0, py1, py2)
    hd = binary_entropy(delta)
    p_star_d = p * (1 - delta) + delta * (1 - p)
    i_bc = (1 - alpha) * hd + alpha * _h3((1 - p) * (1 - delta), p_star_d, p * delta) - hd
    return h_y, i_bc


def _scan_max(fn) -> float:
    """Maximum of ``fn`` on [0, 1]: grid scan, then a bounded polish around the best cell."""
    grid = np.linspace(0.0, 1.0, int(round(1 / SCAN_STEP)) + 1)
    vals = fn(grid)
    k = int(np.argmax(vals))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    res = minimize_scalar(lambda p: -float(fn(np.array([p]))[0]), bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-12})
    return max(float(vals[k]), -float(res.fun))


def _require_half_noise(params: MultiplicativeParams):
    if params.delta != 0.5:
        raise ValueError("closed form valid only for Ber(1/2) noise (delta = 0.5)")


def multiplicative_ub_closed(params: MultiplicativeParams, r0: float) -> float:
    """Upper bound for Ber(1/2) noise.

    The multiple-access term is ``H(Y) - 1 - (p/2) * max(h(alpha) - r0, 0)``:
    with ``X = 1`` the output reveals ``T`` through ``Y in {0, 2}`` only half
    the time, so only half of the residual state uncertainty costs rate.
    """
    _require_half_noise(params)
    a, d = params.alpha, params.delta
    ha = binary_entropy(a)

    def fn(p):
        h_y, i_bc = _multiplicative_terms(p, a, d)
        return np.minimum(h_y - 1 - p / 2 * max(ha - r0, 0.0), i_bc)
    return _scan_max(fn)


def multiplicative_cutset_closed(params: MultiplicativeParams, r0: float) -> float:
    _require_half_noise(params)
    a, d = params.alpha, params.delta
    ha = binary_entropy(a)

    def fn(p):
        h_y, i_bc = _multiplicative_terms(p, a, d)
        return np.minimum(h_y - 1 - p / 2 * ha + r0, i_bc)
    return _scan_max(fn)


def multiplicative_broadcast_capacity(params: MultiplicativeParams) -> float:
    """``max_p I(X;Y|T)`` by 1-D scan."""
    return _scan_max(lambda p: _multiplicative_terms(p, params.alpha, params.delta)[1])


# ---------------------------------------------------------------- names

_FAMILIES = {
    "erasure": (ErasureParams, ("alpha", "eps")),
    "kim": (None, ("delta",)),
    "modadd": (ModAddParams, ("delta", "delta_tilde")),
    "multiplicative": (MultiplicativeParams, ("alpha", "delta")),
}
FAMILIES = tuple(_FAMILIES)


@dataclass(frozen=True)
class Reference:
    """Closed-form ``(capacity, cutset)`` values for a zoo member; None where unknown."""

    family: str
    params: object

    def __call__(self, r0: float) -> tuple[float | None, float | None]:
        if self.family == "erasure":
            return erasure_capacity_closed(self.params, r0), erasure_cutset_closed(self.params, r0)
        if self.family == "kim":
            value = kim_capacity_closed(self.params, r0)
            return value, value
        if self.family == "multiplicative" and self.params.delta == 0.5:
            return None, multiplicative_cutset_closed(self.params, r0)
        return None, None


@dataclass(frozen=True)
class ZooChannel:
    name: str
    family: str
    params: object
    channel: ChannelSpec

    @property
    def reference(self) -> Reference:
        return Reference(self.family, self.params)


def parse_name(name: str) -> tuple[str, dict[str, float]]:
    """Split ``family:key=value,...`` into the family and its parameters."""
    family, _, rest = name.strip().partition(":")
    if family not in _FAMILIES:
        raise ValueError(f"unknown channel family {family!r}; known: {', '.join(_FAMILIES)}")
    keys = _FAMILIES[family][1]
    values: dict[str, float] = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        key = key.strip()
        if not eq or key not in keys:
            raise ValueError(f"{family}: bad parameter {item!r}; expected {', '.join(keys)}")
        try:
            values[key] = float(val)
        except ValueError:
            raise ValueError(f"{family}: parameter {key} is not a number: {val!r}") from None
    missing = [k for k in keys if k not in values]
    if missing:
        raise ValueError(f"{family}: missing parameter(s) {', '.join(missing)}")
    return family, values


def from_name(name: str) -> ZooChannel:
    family, values = parse_name(name)
    cls, _ = _FAMILIES[family]
    if family == "kim":
        params = values["delta"]
        channel = kim_xor(params)
    else:
        params = cls(**values)
        channel = {"erasure": erasure_two_state, "modadd": mod_add,
                   "multiplicative": multiplicative}[family](params)
    return ZooChannel(name=name.strip(), family=family, params=params, channel=channel)
