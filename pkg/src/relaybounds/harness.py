"""Randomized checks of the inequalities and identities the bounds must satisfy.

Each ``check_*`` function returns a :class:`Report`; violations are collected,
never raised, and each carries what is needed to reproduce it.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import probability
from .bounds import RateGrid, SweepRow, capacity_endpoints, new_upper_bound, sweep
from .optimizer import SearchConfig, witsenhausen_G
from .probability import (
    ChannelSpec,
    JointDistribution,
    build_joint,
    conditional_mutual_information,
    entropy,
    marginalize,
    mutual_information,
)

ORDER_TOL = 2e-3         # searched bounds
CUTSET_TOL = 1e-6        # concave cut-set problem
IDENTITY_TOL = 1e-12
WITSENHAUSEN_TOL = 1e-3
PROPERTY_RATES = (0.0, 0.25, 0.5, 1.0, 1.6)
SUITES = ("ordering", "identities", "entropy", "witsenhausen", "monotonicity")


@dataclass(frozen=True)
class RandomChannelConfig:
    seed: int = 0
    x_sizes: tuple[int, int] = (1, 4)
    t_sizes: tuple[int, int] = (1, 4)
    y_sizes: tuple[int, int] = (1, 5)
    dirichlet_concentration: float = 1.0

    def __post_init__(self):
        for name, (lo, hi), cap in (("x_sizes", self.x_sizes, 4), ("t_sizes", self.t_sizes, 4),
                                    ("y_sizes", self.y_sizes, 5)):
            if not 1 <= lo <= hi <= cap:
                raise ValueError(f"{name} must satisfy 1 <= lo <= hi <= {cap}")
        if self.dirichlet_concentration <= 0:
            raise ValueError("dirichlet_concentration must be positive")


def random_channel(config: RandomChannelConfig) -> ChannelSpec:
    rng = np.random.default_rng(config.seed)
    nx = int(rng.integers(config.x_sizes[0], config.x_sizes[1] + 1))
    nt = int(rng.integers(config.t_sizes[0], config.t_sizes[1] + 1))
    ny = int(rng.integers(config.y_sizes[0], config.y_sizes[1] + 1))
    c = config.dirichlet_concentration
    p_t = rng.dirichlet(np.full(nt, c))
    kernel = rng.dirichlet(np.full(ny, c), size=(nx, nt))
    return ChannelSpec(p_t=p_t / p_t.sum(), kernel=kernel / kernel.sum(axis=2, keepdims=True))


@dataclass(frozen=True)
class Violation:
    check: str
    detail: str
    seed: int | None = None
    rate: float | None = None
    bundle: dict = field(default_factory=dict, compare=False)


@dataclass
class Report:
    name: str
    checked: int = 0
    max_residual: float = 0.0
    violations: list[Violation] = field(default_factory=list)
    flags: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def merge(self, other: "Report") -> "Report":
        self.checked += other.checked
        self.max_residual = max(self.max_residual, other.max_residual)
        self.violations += other.violations
        self.flags += other.flags
        return self

    def summary(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return (f"{status} {self.name}: {self.checked} checks, {len(self.violations)} violations, "
                f"{len(self.flags)} flags, max residual {self.max_residual:.3e}")


def _bundle(channel: ChannelSpec, config: SearchConfig | None, **extra) -> dict:
    from .fileformat import channel_to_text  # local: fileformat is a leaf module

    out = {"channel": channel_to_text(channel)}
    if config is not None:
        out["config"] = repr(config)
    out.update(extra)
    return out


def bound_table(channel: ChannelSpec, grid: RateGrid, config: SearchConfig | None = None,
                v_card: int | None = None) -> list[SweepRow]:
    """All three bounds on ``grid`` with the same auxiliary cardinality."""
    v_card = channel.t_size + 2 if v_card is None else v_card
    return sweep(channel, grid, v_card, v_card, config)


def check_ordering(channel: ChannelSpec, grid: RateGrid, config: SearchConfig | None = None, *,
                   table: list[SweepRow] | None = None, seed: int | None = None,
                   matched: bool = True) -> Report:
    """``caf <= ub + 2e-3`` and ``ub <= cs + 1e-6`` at every grid rate.

    With ``matched=False`` (auxiliary cardinalities differ between the CAF and
    upper-bound searches) CAF excesses are recorded as flags, not violations.
    """
    table = bound_table(channel, grid, config) if table is None else table
    rep = Report("ordering")
    for row in table:
        rep.checked += 2
        excess_caf = row.caf - row.upper_bound
        excess_ub = row.upper_bound - row.cutset
        rep.max_residual = max(rep.max_residual, excess_caf, excess_ub)
        if excess_caf > ORDER_TOL:
            v = Violation("caf<=ub", f"caf {row.caf:.6f} > ub {row.upper_bound:.6f}", seed, row.r0,
                          _bundle(channel, config))
            (rep.violations if matched else rep.flags).append(v)
        if excess_ub > CUTSET_TOL:
            rep.violations.append(Violation(
                "ub<=cs", f"ub {row.upper_bound:.9f} > cs {row.cutset:.9f}", seed, row.r0,
                _bundle(channel, config)))
    return rep


def check_monotonicity(channel: ChannelSpec, grid: RateGrid, config: SearchConfig | None = None, *,
                       table: list[SweepRow] | None = None, seed: int | None = None) -> Report:
    """Each bound is nondecreasing in the link rate."""
    table = bound_table(channel, grid, config) if table is None else table
    rep = Report("monotonicity")
    for prev, row in zip(table, table[1:]):
        for name, tol in (("cutset", CUTSET_TOL), ("upper_bound", ORDER_TOL), ("caf", ORDER_TOL)):
            drop = getattr(prev, name) - getattr(row, name)
            rep.checked += 1
            rep.max_residual = max(rep.max_residual, drop)
            if drop > tol:
                rep.violations.append(Violation(
                    f"{name} nondecreasing", f"{name} drops by {drop:.3e} from r0={prev.r0}",
                    seed, row.r0, _bundle(channel, config)))
    return rep


def check_endpoints(channel: ChannelSpec, config: SearchConfig | None = None, *,
                    seed: int | None = None) -> Report:
    """Upper bound at zero rate and above ``H(T)`` against the capacity endpoints."""
    rep = Report("endpoints")
    c0, cinf = capacity_endpoints(channel, config)
    high = entropy(channel.p_t) + 0.1
    for r0, target in ((0.0, c0), (high, cinf)):
        err = abs(new_upper_bound(channel, r0, config=config).value - target)
        rep.checked += 1
        rep.max_residual = max(rep.max_residual, err)
        if err > ORDER_TOL:
            rep.violations.append(Violation("endpoint", f"|ub - C| = {err:.3e}", seed, r0,
                                            _bundle(channel, config)))
    return rep


def random_joint(seed: int, max_sizes: tuple[int, int, int, int] = (3, 3, 4, 4)) -> JointDistribution:
    """``build_joint`` of a random input, channel and auxiliary channel."""
    rng = np.random.default_rng(seed)
    nx, nt, ny, nv = (int(rng.integers(1, m + 1)) for m in max_sizes)
    channel = ChannelSpec(p_t=rng.dirichlet(np.ones(nt)),
                          kernel=rng.dirichlet(np.ones(ny), size=(nx, nt)))
    return build_joint(rng.dirichlet(np.ones(nx)), channel, rng.dirichlet(np.ones(nv), size=nt))


def brute_force_mi(joint: JointDistribution, group_a, group_b) -> float:
    """``I(A;B)`` as a direct double sum over the flattened groups."""
    a, b = tuple(group_a), tuple(group_b)
    pab = marginalize(joint, a + b).table
    na = int(np.prod(pab.shape[:len(a)]))
    pab = pab.reshape(na, -1)
    pa, pb = pab.sum(axis=1), pab.sum(axis=0)
    total = 0.0
    for i in range(pab.shape[0]):
        for j in range(pab.shape[1]):
            if pab[i, j] > 0:
                total += pab[i, j] * np.log2(pab[i, j] / (pa[i] * pb[j]))
    return total


def check_identities(samples) -> Report:
    """Chain rule, the CAF constraint rewrite, Markov structure and brute-force MI."""
    rep = Report("identities")
    for n, joint in enumerate(samples):
        i_tv_y = conditional_mutual_information(joint, "T", "V", "Y")
        residuals = {
            "I(T;V|Y) = I(T;V) - I(V;Y)":
                i_tv_y - (mutual_information(joint, "T", "V") - mutual_information(joint, "V", "Y")),
            "I(X,V;Y) = I(V;Y) + I(X;Y|V)":
                mutual_information(joint, "XV", "Y")
                - mutual_information(joint, "V", "Y")
                - conditional_mutual_information(joint, "X", "Y", "V"),
            "I(X;T) = 0": mutual_information(joint, "X", "T"),
            "I(X;V) = 0": mutual_information(joint, "X", "V"),
            "I(X,Y;V|T) = 0": conditional_mutual_information(joint, "XY", "V", "T"),
        }
        if joint.table.size <= 64 * 64:
            for a, b in (("X", "Y"), ("T", "V"), ("XV", "Y"), ("V", "Y")):
                residuals[f"brute I({a};{b})"] = (mutual_information(joint, a, b)
                                                  - brute_force_mi(joint, a, b))
        for name, r in residuals.items():
            rep.checked += 1
            rep.max_residual = max(rep.max_residual, abs(r))
            if abs(r) > IDENTITY_TOL:
                rep.violations.append(Violation(name, f"residual {r:.3e}", n))
    return rep


def ternary_samples(count: int, seed: int = 0) -> np.ndarray:
    """Random points of the 3-simplex, with every tenth point symmetric (a = c)."""
    rng = np.random.default_rng(seed)
    pts = rng.dirichlet(np.ones(3), size=count)
    sym = pts[::10]
    sym[:, 0] = sym[:, 2] = (1.0 - sym[:, 1]) / 2
    pts[::10] = sym
    return pts


def check_entropy_inequality(samples) -> Report:
    """``H(a,b,c) <= h(b) + 1 - b`` with equality when ``a = c``."""
    rep = Report("entropy")
    for n, (a, b, c) in enumerate(np.asarray(samples, dtype=float)):
        lhs = entropy((a, b, c))
        rhs = probability.binary_entropy(b) + 1 - b
        rep.checked += 1
        rep.max_residual = max(rep.max_residual, lhs - rhs)
        if lhs > rhs + IDENTITY_TOL:
            rep.violations.append(Violation("h3<=h(b)+1-b", f"({a}, {b}, {c}): {lhs} > {rhs}", n))
        if a == c and abs(lhs - rhs) > 1e-9:
            rep.violations.append(Violation("equality at a=c", f"({a}, {b}, {c}): {lhs} != {rhs}", n))
    return rep


def erasure_test_channel(eps: float) -> np.ndarray:
    """The ``p(u|t)`` matrix of the two-state erasure channel: rows (eps, 1-eps, 0), (0, 1-eps, eps)."""
    return np.array([[eps, 1 - eps, 0.0], [0.0, 1 - eps, eps]])


def check_witsenhausen(eps_grid, gamma_points: int = 10, config: SearchConfig | None = None,
                       p_t=(0.7, 0.3)) -> Report:
    """Numeric ``G(gamma)`` against ``h(eps) + eps * gamma`` on a grid spanning ``[0, H(T)]``."""
    rep = Report("witsenhausen")
    h_t = entropy(p_t)
    for eps in eps_grid:
        w = erasure_test_channel(eps)
        for gamma in np.linspace(0.0, h_t, gamma_points):
            numeric = witsenhausen_G(p_t, w, gamma, config)
            closed = probability.binary_entropy(eps) + eps * gamma
            err = abs(numeric - closed)
            rep.checked += 1
            rep.max_residual = max(rep.max_residual, err)
            if err > WITSENHAUSEN_TOL:
                rep.violations.append(Violation(
                    "G(gamma)", f"eps={eps} gamma={gamma:.6f}: numeric {numeric:.6f}, "
                    f"closed {closed:.6f}", rate=float(gamma)))
    return rep


def run_suites(suites=SUITES, n_channels: int = 100, seed: int = 42,
               config: SearchConfig | None = None, progress=None) -> list[Report]:
    """Run the named suites; reports come back in suite order."""
    unknown = set(suites) - set(SUITES)
    if unknown:
        raise ValueError(f"unknown suite(s): {', '.join(sorted(unknown))}")
    config = config or SearchConfig(seed=seed)
    reports = {}
    if "ordering" in suites or "monotonicity" in suites:
        from . import zoo
        grid = RateGrid(PROPERTY_RATES)
        order, mono = Report("ordering"), Report("monotonicity")
        channels = [(None, z.channel) for z in map(zoo.from_name, (
            "erasure:alpha=0.3,eps=0.4", "kim:delta=0.3", "modadd:delta=0.1,delta_tilde=0.2",
            "multiplicative:alpha=0.5,delta=0.5"))]
        channels += [(seed + i, random_channel(RandomChannelConfig(
            seed=seed + i, x_sizes=(1, 3), t_sizes=(1, 3), y_sizes=(1, 4))))
            for i in range(n_channels)]
        for ch_seed, channel in channels:
            table = bound_table(channel, grid, config)
            order.merge(check_ordering(channel, grid, config, table=table, seed=ch_seed))
            mono.merge(check_monotonicity(channel, grid, config, table=table, seed=ch_seed))
            if progress:
                progress(ch_seed)
        reports["ordering"], reports["monotonicity"] = order, mono
    if "identities" in suites:
        reports["identities"] = check_identities(random_joint(seed + i) for i in range(1000))
    if "entropy" in suites:
        reports["entropy"] = check_entropy_inequality(ternary_samples(10_000, seed))
    if "witsenhausen" in suites:
        eps_grid = [round(0.1 * k, 1) for k in range(1, 10)]
        reports["witsenhausen"] = check_witsenhausen(eps_grid, 10, config)
    return [reports[s] for s in SUITES if s in suites]

