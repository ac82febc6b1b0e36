"""Multi-transmitter Pareto machinery.

Assembles per-transmitter boundary strategies into network strategy
profiles, evaluates log-SINR utilities, sweeps the joint parameter grid
into a utility cloud, filters it to the nondominated set, and carries the
two-user MRT/ZF-combination results with their verification oracles.

Sweeps are pure maps over a deterministic parameter enumeration: rows are
lexicographic over the axes (per-transmitter simplex grids, then power
group splits, then power levels for transmitters that need power
control), with the last axis varying fastest.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    as_cvec,
    dominant_eigpair,
    outer_product,
    projector_complement,
    projector_onto,
    unit,
)
from .network import Scenario, direction_vector
from .region import (
    BoundaryStrategy,
    PowerClass,
    boundary_strategy,
    needs_power_control,
    simplex_grid,
)

__all__ = [
    "DEFAULT_POINT_BUDGET",
    "ReceiverRule",
    "UtilitySpec",
    "rate",
    "utilities",
    "ParameterPoint",
    "TransmitStrategy",
    "pareto_strategies",
    "strategy_gain_matrix",
    "utilities_at",
    "SweepAxis",
    "sweep_axes",
    "UtilitySweep",
    "sweep_utility_region",
    "pareto_filter",
    "pareto_filter_bruteforce",
    "mrt_beamformer",
    "zf_beamformer",
    "two_user_combination",
    "two_user_boundary_vector",
    "verify_two_user_identity",
    "alignment_search",
]

DEFAULT_POINT_BUDGET = 10_000_000


@dataclass(frozen=True)
class ReceiverRule:
    """Which transmitters add to a receiver's signal vs its interference."""

    signal: tuple[str, ...]
    interference: tuple[str, ...]

    def __post_init__(self):
        clash = set(self.signal) & set(self.interference)
        if clash:
            raise ValueError(f"signal and interference sets overlap: {sorted(clash)}")


@dataclass(frozen=True)
class UtilitySpec:
    """Log-SINR utility family: one signal/interference rule per receiver.

    Utilities are monotonically increasing in signal-set gains and
    decreasing in interference-set gains by construction.
    """

    rules: tuple[ReceiverRule, ...]
    noise_power: float

    def __post_init__(self):
        if not self.rules:
            raise ValueError("at least one receiver rule is required")
        if not (math.isfinite(self.noise_power) and self.noise_power > 0):
            raise ValueError(f"noise power must be positive, got {self.noise_power}")

    @property
    def n_receivers(self) -> int:
        return len(self.rules)

    @classmethod
    def from_scenario(cls, s: Scenario, noise_power: float | None = None) -> "UtilitySpec":
        """Derive the rules from the scenario's receiver sets."""
        rules = []
        for r in s.receivers:
            signal = tuple(t.tid for t in s.transmitters if r in t.intended)
            interference = tuple(t.tid for t in s.transmitters if r not in t.intended)
            rules.append(ReceiverRule(signal=signal, interference=interference))
        return cls(rules=tuple(rules), noise_power=s.noise_power if noise_power is None else noise_power)


def rate(spec: UtilitySpec, receiver: int, gains_by_tid: dict) -> float:
    """Achievable rate log2(1 + S / (sigma^2 + I)) at one receiver (1..K)."""
    if not 1 <= receiver <= spec.n_receivers:
        raise ValueError(f"receiver must be in 1..{spec.n_receivers}, got {receiver}")
    rule = spec.rules[receiver - 1]
    signal = sum(float(gains_by_tid[t]) for t in rule.signal)
    interference = sum(float(gains_by_tid[t]) for t in rule.interference)
    if signal < 0 or interference < 0:
        raise ValueError("gains must be nonnegative")
    return math.log2(1.0 + signal / (spec.noise_power + interference))


def utilities(spec: UtilitySpec, tids, gain_matrix) -> np.ndarray:
    """Utility tuple for a (transmitters x receivers) gain matrix."""
    g = np.asarray(gain_matrix, dtype=float)
    tids = list(tids)
    if g.shape != (len(tids), spec.n_receivers):
        raise ValueError(
            f"gain matrix shape {g.shape} does not match "
            f"({len(tids)}, {spec.n_receivers})"
        )
    out = np.empty(spec.n_receivers)
    for r in range(1, spec.n_receivers + 1):
        out[r - 1] = rate(spec, r, {t: g[i, r - 1] for i, t in enumerate(tids)})
    return out


@dataclass(frozen=True)
class ParameterPoint:
    """One point of the joint strategy parametrization.

    ``lambdas`` maps transmitter id to its simplex weights; ``splits`` maps
    a power group (tuple of ids) to the members' budget fractions;
    ``free_powers`` carries the power level used when a transmitter's
    weights land in the free class.
    """

    lambdas: dict
    splits: dict
    free_powers: dict

    def __post_init__(self):
        object.__setattr__(
            self, "lambdas", {k: np.asarray(v, dtype=float) for k, v in self.lambdas.items()}
        )
        object.__setattr__(
            self, "splits", {k: np.asarray(v, dtype=float) for k, v in self.splits.items()}
        )
        object.__setattr__(
            self, "free_powers", {k: float(v) for k, v in self.free_powers.items()}
        )


@dataclass(frozen=True)
class TransmitStrategy:
    """A boundary strategy scaled by the transmitter's power group share."""

    tid: str
    boundary: BoundaryStrategy
    split: float

    @property
    def direction(self) -> np.ndarray:
        return self.boundary.direction

    @property
    def power(self) -> float:
        """Realized covariance trace: group share times boundary power."""
        return self.split * self.boundary.power

    def covariance(self) -> np.ndarray:
        return self.power * outer_product(self.direction)


def _split_fraction(s: Scenario, point: ParameterPoint, tid: str) -> float:
    group = s.group_of(tid)
    if len(group) == 1:
        return 1.0
    try:
        fractions = point.splits[group]
    except KeyError:
        raise ValueError(f"parameter point lacks split fractions for group {group}") from None
    fractions = np.asarray(fractions, dtype=float)
    if fractions.size != len(group):
        raise ValueError(f"group {group} needs {len(group)} fractions, got {fractions.size}")
    if np.any(fractions < -1e-12) or abs(fractions.sum() - 1.0) > 1e-9:
        raise ValueError(f"group fractions must be nonnegative and sum to 1, got {fractions}")
    return float(fractions[group.index(tid)])


def pareto_strategies(s: Scenario, point: ParameterPoint) -> dict:
    """Per-transmitter boundary strategies for one parameter point.

    Each transmitter beamforms along the dominant eigenvector of its
    weighted channel combination in its own direction vector, with the
    full/free/zero power rule; members of a shared power group are scaled
    so the group's covariance traces equal the split fractions.
    """
    out = {}
    for t in s.transmitters:
        try:
            lam = point.lambdas[t.tid]
        except KeyError:
            raise ValueError(f"parameter point lacks weights for transmitter {t.tid!r}") from None
        e = direction_vector(s, t.tid)
        bs = boundary_strategy(
            s.channels_for(t.tid), lam, e, p_free=point.free_powers.get(t.tid)
        )
        out[t.tid] = TransmitStrategy(tid=t.tid, boundary=bs, split=_split_fraction(s, point, t.tid))
    return out


def strategy_gain_matrix(s: Scenario, strategies: dict) -> np.ndarray:
    """Gains x[k, l] = power_k |w_k^H h_{k,l}|^2 for all transmitter/receiver pairs."""
    g = np.zeros((len(s.transmitters), s.n_receivers))
    for i, t in enumerate(s.transmitters):
        strat = strategies[t.tid]
        w = strat.direction
        for j, r in enumerate(s.receivers):
            g[i, j] = strat.power * abs(np.vdot(w, s.channel(t.tid, r))) ** 2
    return g


def utilities_at(s: Scenario, spec: UtilitySpec, point: ParameterPoint) -> np.ndarray:
    """Utility tuple achieved at one parameter point."""
    gains = strategy_gain_matrix(s, pareto_strategies(s, point))
    return utilities(spec, s.tids, gains)


@dataclass(frozen=True)
class SweepAxis:
    """One axis of the joint parameter grid."""

    kind: str  # "lambda" | "split" | "power"
    label: object  # transmitter id (lambda/power) or group tuple (split)
    columns: tuple[str, ...]
    values: np.ndarray  # (n, width)

    def __len__(self) -> int:
        return self.values.shape[0]


def sweep_axes(s: Scenario, step: float) -> list[SweepAxis]:
    """Axes of the joint grid: lambdas, then group splits, then powers.

    A power axis is added only for transmitters whose antenna count does
    not exceed their number of unintended receivers, the regime where
    boundary points below full power exist.
    """
    k = s.n_receivers
    axes = []
    for t in s.transmitters:
        cols = tuple(f"lam_{t.tid}_{r}" for r in s.receivers)
        axes.append(SweepAxis("lambda", t.tid, cols, simplex_grid(k, step)))
    for g in s.power_groups:
        if len(g) > 1:
            cols = tuple(f"split_{tid}" for tid in g)
            axes.append(SweepAxis("split", g, cols, simplex_grid(len(g), step)))
    m = round(1.0 / step)
    p_grid = np.linspace(0.0, 1.0, m + 1).reshape(-1, 1)
    for t in s.transmitters:
        e = direction_vector(s, t.tid)
        if needs_power_control(t.n_antennas, e):
            axes.append(SweepAxis("power", t.tid, (f"p_{t.tid}",), p_grid))
    return axes


@dataclass
class _TxEval:
    """Per-transmitter gain tables over its own axes."""

    tid: str
    lam_axis: int
    split_axis: int | None
    split_col: int
    power_axis: int | None
    unit_gains: np.ndarray  # (n_lam, K): |w^H h_l|^2 at unit power
    power_table: np.ndarray  # (n_lam,) or (n_lam, n_p): boundary power


def _tx_tables(s: Scenario, axes: list[SweepAxis]) -> list[_TxEval]:
    axis_by = {(ax.kind, ax.label): i for i, ax in enumerate(axes)}
    tables = []
    for t in s.transmitters:
        lam_axis = axis_by[("lambda", t.tid)]
        group = s.group_of(t.tid)
        split_axis = axis_by.get(("split", group))
        power_axis = axis_by.get(("power", t.tid))
        channels = s.channels_for(t.tid)
        e = direction_vector(s, t.tid)
        grid = axes[lam_axis].values
        n_lam = grid.shape[0]
        unit_gains = np.zeros((n_lam, s.n_receivers))
        rule_power = np.zeros(n_lam)
        free = np.zeros(n_lam, dtype=bool)
        for i in range(n_lam):
            bs = boundary_strategy(channels, grid[i], e)
            w = bs.direction
            unit_gains[i] = [abs(np.vdot(w, h)) ** 2 for h in channels]
            rule_power[i] = bs.power
            free[i] = bs.power_class is PowerClass.FREE
        if power_axis is None:
            power_table = rule_power
        else:
            p_levels = axes[power_axis].values[:, 0]
            power_table = np.where(free[:, None], p_levels[None, :], rule_power[:, None])
        tables.append(
            _TxEval(
                tid=t.tid,
                lam_axis=lam_axis,
                split_axis=split_axis,
                split_col=group.index(t.tid) if split_axis is not None else 0,
                power_axis=power_axis,
                unit_gains=unit_gains,
                power_table=power_table,
            )
        )
    return tables


def _bcast(values: np.ndarray, axis: int, ndim: int) -> np.ndarray:
    """Reshape a 1-D per-axis array for broadcasting over the slab."""
    shape = [1] * ndim
    shape[axis] = values.size
    return values.reshape(shape)


class UtilitySweep:
    """Result of a utility-region sweep: utilities plus the axis grids.

    Rows are in C order over the axis shape, i.e. lexicographic over the
    parameter axes.  Use items() to iterate (ParameterPoint, utilities)
    pairs, or parameter_row()/parameter_point() for a single row.
    """

    def __init__(self, scenario: Scenario, spec: UtilitySpec, axes: list[SweepAxis], utilities: np.ndarray):
        self.scenario = scenario
        self.spec = spec
        self.axes = axes
        self.shape = tuple(len(ax) for ax in axes)
        self.utilities = utilities

    def __len__(self) -> int:
        return self.utilities.shape[0]

    @property
    def parameter_columns(self) -> tuple[str, ...]:
        return tuple(c for ax in self.axes for c in ax.columns)

    @property
    def utility_columns(self) -> tuple[str, ...]:
        return tuple(f"u_{r}" for r in self.scenario.receivers)

    def axis_indices(self, i: int) -> tuple[int, ...]:
        return tuple(int(j) for j in np.unravel_index(i, self.shape))

    def parameter_row(self, i: int) -> np.ndarray:
        idx = self.axis_indices(i)
        return np.concatenate([ax.values[j] for ax, j in zip(self.axes, idx)])

    def parameter_point(self, i: int) -> ParameterPoint:
        idx = self.axis_indices(i)
        lambdas, splits, free_powers = {}, {}, {}
        for ax, j in zip(self.axes, idx):
            if ax.kind == "lambda":
                lambdas[ax.label] = ax.values[j]
            elif ax.kind == "split":
                splits[ax.label] = ax.values[j]
            else:
                free_powers[ax.label] = float(ax.values[j, 0])
        return ParameterPoint(lambdas=lambdas, splits=splits, free_powers=free_powers)

    def flat_index(self, indices) -> int:
        return int(np.ravel_multi_index(tuple(indices), self.shape))

    def items(self):
        for i in range(len(self)):
            yield self.parameter_point(i), self.utilities[i]


def sweep_utility_region(
    s: Scenario,
    spec: UtilitySpec | None = None,
    step: float = 0.1,
    point_budget: int = DEFAULT_POINT_BUDGET,
) -> UtilitySweep:
    """Evaluate utilities over the joint parameter grid.

    The enumeration is the Cartesian product of every transmitter's
    simplex grid, every multi-member group's split grid and, where power
    control applies, a power grid with the same spacing; rows come out in
    lexicographic order.  Refuses grids larger than ``point_budget``.
    """
    if spec is None:
        spec = UtilitySpec.from_scenario(s)
    if spec.n_receivers != s.n_receivers:
        raise ValueError("utility spec receiver count does not match the scenario")
    axes = sweep_axes(s, step)
    shape = tuple(len(ax) for ax in axes)
    n_points = int(np.prod([np.int64(d) for d in shape]))
    if n_points > point_budget:
        raise ValueError(
            f"sweep would produce {n_points} points, above the budget of {point_budget}"
        )
    tables = _tx_tables(s, axes)
    idx_by_tid = {t.tid: i for i, t in enumerate(s.transmitters)}
    slab_shape = shape[1:]
    slab_ndim = len(slab_shape)
    slab_n = int(np.prod(slab_shape)) if slab_shape else 1
    out = np.empty((n_points, s.n_receivers))
    sigma2 = spec.noise_power

    def tx_gain_field(table: _TxEval, i0: int, recv_col: int):
        """Gain of one transmitter at one receiver over the slab (broadcastable)."""
        if table.lam_axis == 0:
            g = table.unit_gains[i0, recv_col]
            if table.power_axis is None:
                p = table.power_table[i0]
            else:
                p = _bcast(table.power_table[i0], table.power_axis - 1, slab_ndim)
        else:
            g = _bcast(table.unit_gains[:, recv_col], table.lam_axis - 1, slab_ndim)
            if table.power_axis is None:
                p = _bcast(table.power_table, table.lam_axis - 1, slab_ndim)
            else:
                shape2 = [1] * slab_ndim
                shape2[table.lam_axis - 1] = table.power_table.shape[0]
                shape2[table.power_axis - 1] = table.power_table.shape[1]
                p = table.power_table.reshape(shape2)
        field = g * p
        if table.split_axis is not None:
            field = field * _bcast(
                axes[table.split_axis].values[:, table.split_col],
                table.split_axis - 1,
                slab_ndim,
            )
        return field

    for i0 in range(shape[0]):
        base = i0 * slab_n
        for r in range(1, s.n_receivers + 1):
            rule = spec.rules[r - 1]
            signal = np.zeros(slab_shape)
            for tid in rule.signal:
                signal = signal + tx_gain_field(tables[idx_by_tid[tid]], i0, r - 1)
            interference = np.zeros(slab_shape)
            for tid in rule.interference:
                interference = interference + tx_gain_field(tables[idx_by_tid[tid]], i0, r - 1)
            u = np.log2(1.0 + signal / (sigma2 + interference))
            out[base : base + slab_n, r - 1] = np.broadcast_to(u, slab_shape).ravel()
    return UtilitySweep(scenario=s, spec=spec, axes=axes, utilities=out)


def pareto_filter(points) -> list[int]:
    """Indices of the nondominated utility points (larger is better).

    A point is dropped when some other point is componentwise >= and
    strictly greater in at least one coordinate; exact duplicates are all
    retained.  The result is deterministic and sorted ascending.

    Points are processed in descending lexicographic order, so earlier
    points can never be dominated by later ones; up to three dimensions a
    staircase structure answers the domination query in O(log n), with an
    exact pairwise fallback on ties.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError(f"expected a nonempty 2-D point list, got shape {pts.shape}")
    n, d = pts.shape
    order = np.lexsort(tuple(-pts[:, j] for j in range(d - 1, -1, -1)))
    if d <= 3:
        padded = pts if d == 3 else np.hstack([pts, np.zeros((n, 3 - d))])
        kept_idx = _filter_staircase3(padded, order)
    else:
        kept_idx = _filter_scan(pts, order)
    return sorted(kept_idx)


def _filter_scan(pts: np.ndarray, order: np.ndarray) -> list[int]:
    """One pass against the kept set, exact in any dimension."""
    n, d = pts.shape
    kept = np.empty((n, d))
    kept_n = 0
    kept_idx = []
    for i in order:
        y = pts[i]
        if kept_n:
            front = kept[:kept_n]
            mask = (front >= y).all(axis=1)
            if mask.any() and (front[mask] > y).any():
                continue
        kept[kept_n] = y
        kept_n += 1
        kept_idx.append(int(i))
    return kept_idx


def _filter_staircase3(pts: np.ndarray, order: np.ndarray) -> list[int]:
    """Sorted sweep for 3-D points with a (y, z) suffix-max staircase.

    After sorting, every processed point has coordinate 0 >= the
    candidate's, so the candidate is dominated iff some kept point also
    beats it on coordinates 1 and 2; the staircase (ys nondecreasing, zs
    nonincreasing) answers max{z : y >= q} by bisection.  Exact-tie cases
    fall back to a full comparison against the kept rows.
    """
    n = pts.shape[0]
    ys: list[float] = []
    zs: list[float] = []
    kept = np.empty((n, 3))
    kept_n = 0
    kept_idx = []
    for i in order:
        y1 = pts[i, 1]
        y2 = pts[i, 2]
        pos = bisect.bisect_left(ys, y1)
        best = zs[pos] if pos < len(ys) else -np.inf
        if best > y2:
            continue
        if best == y2 and kept_n:
            front = kept[:kept_n]
            mask = (front >= pts[i]).all(axis=1)
            if mask.any() and (front[mask] > pts[i]).any():
                continue
        kept[kept_n] = pts[i]
        kept_n += 1
        kept_idx.append(int(i))
        if best < y2:
            # Drop prefix entries the new pair dominates in 2-D.
            j = pos
            while j > 0 and zs[j - 1] <= y2:
                j -= 1
            ys[j:pos] = [y1]
            zs[j:pos] = [y2]
    return kept_idx


def pareto_filter_bruteforce(points) -> list[int]:
    """O(n^2) pairwise reference filter; the correctness oracle."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError(f"expected a nonempty 2-D point list, got shape {pts.shape}")
    n = pts.shape[0]
    keep = []
    for i in range(n):
        dominated = False
        for j in range(n):
            if j == i:
                continue
            if np.all(pts[j] >= pts[i]) and np.any(pts[j] > pts[i]):
                dominated = True
                break
        if not dominated:
            keep.append(i)
    return keep


def mrt_beamformer(h_own) -> np.ndarray:
    """Maximum ratio transmission: beamform along the intended channel."""
    return unit(h_own)


def zf_beamformer(h_own, h_cross) -> np.ndarray:
    """Zero forcing: project the intended channel off the cross channel."""
    own = as_cvec(h_own)
    proj = projector_complement([as_cvec(h_cross)])
    d = proj @ own
    if np.linalg.norm(d) <= 1e-12 * np.linalg.norm(own):
        raise ValueError("channels are collinear; the zero-forcing direction vanishes")
    return d / np.linalg.norm(d)


def two_user_combination(lam_hat: float, h_own, h_cross) -> np.ndarray:
    """Unit combination of MRT and ZF for the two-user interference channel.

    lam_hat = 1 gives MRT, lam_hat = 0 gives ZF; intermediate values trace
    the efficient boundary.
    """
    if not 0.0 <= lam_hat <= 1.0:
        raise ValueError(f"lam_hat must be in [0, 1], got {lam_hat}")
    w = lam_hat * mrt_beamformer(h_own) + (1.0 - lam_hat) * zf_beamformer(h_own, h_cross)
    return w / np.linalg.norm(w)


def two_user_boundary_vector(lam1: float, h_own, h_cross) -> np.ndarray:
    """Dominant eigenvector strategy for two receivers in direction (+1, -1)."""
    own, cross = as_cvec(h_own), as_cvec(h_cross)
    z = lam1 * outer_product(own) - (1.0 - lam1) * outer_product(cross)
    return dominant_eigpair(z, [own, cross])[1]


def verify_two_user_identity(lam1: float, h_own, h_cross) -> float:
    """Residual of the projector identity behind the MRT/ZF combination.

    The dominant eigenvector w of lam1 h1 h1^H - (1 - lam1) h2 h2^H must
    satisfy (lam1 |h1|^2 P_{h1} + (1 - lam1) |h2|^2 P^perp_{h2}) w =
    (mu + (1 - lam1) |h2|^2) w; returns the Euclidean residual.
    """
    own, cross = as_cvec(h_own), as_cvec(h_cross)
    z = lam1 * outer_product(own) - (1.0 - lam1) * outer_product(cross)
    mu, w = dominant_eigpair(z, [own, cross])
    n_own = float(np.real(np.vdot(own, own)))
    n_cross = float(np.real(np.vdot(cross, cross)))
    lhs = lam1 * n_own * projector_onto([own]) + (1.0 - lam1) * n_cross * projector_complement([cross])
    rhs = (mu + (1.0 - lam1) * n_cross) * w
    return float(np.linalg.norm(lhs @ w - rhs))


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def alignment_search(
    w, h_own, h_cross, coarse: int = 129, width_tol: float = 1e-12
) -> tuple[float, float]:
    """Find the boundary parameter whose eigenvector best matches w.

    Runs a coarse scan over lam1 in [0, 1] followed by a golden-section
    refinement of the squared inner product |<w, v_max(lam1)>|^2.  Returns
    (lam1, alignment).
    """
    wv = unit(w)

    def score(lam1: float) -> float:
        v = two_user_boundary_vector(lam1, h_own, h_cross)
        return abs(np.vdot(wv, v)) ** 2

    grid = np.linspace(0.0, 1.0, coarse)
    vals = [score(x) for x in grid]
    b = int(np.argmax(vals))
    lo = grid[max(b - 1, 0)]
    hi = grid[min(b + 1, coarse - 1)]
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = score(x1), score(x2)
    while hi - lo > width_tol:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = score(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = score(x1)
    best = (lo + hi) / 2.0
    return best, score(best)
