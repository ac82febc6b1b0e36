"""Self-check suites mirroring the library's core guarantees.

Each suite builds seeded random instances, measures the worst residual of
one invariant and compares it against the library tolerance.  The CLI
`verify` command runs them and reports per-check pass/fail lines.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import nullshape, pareto, region
from .linalg import eig_hermitian, weighted_combination
from .network import Scenario

__all__ = ["Check", "SUITES", "run_suite", "suite_names"]


@dataclass(frozen=True)
class Check:
    """Outcome of one verification check."""

    name: str
    value: float
    tol: float
    ok: bool
    detail: str = ""


def _random_channels(rng: np.random.Generator, n: int, k: int) -> list[np.ndarray]:
    return [
        (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
        for _ in range(k)
    ]


def _scenario_channels(scenario: Scenario, n: int, k: int) -> list[np.ndarray] | None:
    """First transmitter channel set matching the requested dimensions."""
    if scenario is None or scenario.n_receivers != k:
        return None
    for t in scenario.transmitters:
        if t.n_antennas == n and scenario.has_channels():
            return scenario.channels_for(t.tid)
    return None


def suite_convexity(seed: int = 0, trials: int = 1000, scenario: Scenario | None = None) -> list[Check]:
    """Segment covariances reproduce convex combinations of gains exactly."""
    rng = np.random.default_rng(seed)
    channels = _scenario_channels(scenario, 3, 3) or _random_channels(rng, 3, 3)
    worst = 0.0
    worst_trace = 0.0
    for i in range(trials):
        qx = region.random_feasible_covariance(seed * 1_000_003 + 2 * i, 3)
        qy = region.random_feasible_covariance(seed * 1_000_003 + 2 * i + 1, 3)
        qz = region.segment_covariance(qx, qy, 0.5)
        for h in channels:
            mix = 0.5 * region.power_gain(qx, h) + 0.5 * region.power_gain(qy, h)
            worst = max(worst, abs(region.power_gain(qz, h) - mix))
        worst_trace = max(worst_trace, float(np.trace(qz).real) - 1.0)
    return [
        Check("segment gains equal convex combination", worst, 1e-12, worst <= 1e-12),
        Check("segment trace stays feasible", worst_trace, 1e-12, worst_trace <= 1e-12),
    ]


def suite_hyperplane(
    seed: int = 0,
    trials: int = 100_000,
    scenario: Scenario | None = None,
    step: float = 0.02,
) -> list[Check]:
    """No feasible covariance beats the top-eigenvalue bound on any grid
    weighting; full-class boundary strategies attain it."""
    rng = np.random.default_rng(seed)
    channels = _scenario_channels(scenario, 3, 3) or _random_channels(rng, 3, 3)
    e = np.array([1, -1, -1])
    grid = region.simplex_grid(3, step)
    weights = grid * e  # (G, 3)
    bounds = np.array([region.hyperplane_bound(channels, lam, e) for lam in grid])
    gains = np.empty((trials, 3))
    block = 20_000
    worst_violation = -np.inf
    done = 0
    hvecs = np.column_stack(channels)  # (3, 3), column l = channel l
    for start in range(0, trials, block):
        stop = min(start + block, trials)
        qs = np.empty((stop - start, 3, 3), dtype=np.complex128)
        for i in range(start, stop):
            qs[i - start] = region.random_feasible_covariance(
                seed * 7_000_003 + i, 3, rank=(i % 3) + 1
            )
        # x[q, l] = h_l^H Q h_l
        x = np.real(np.einsum("il,qij,jl->ql", hvecs.conj(), qs, hvecs))
        gains[start:stop] = x
        objective = x @ weights.T  # (block, G)
        worst_violation = max(worst_violation, float((objective.max(axis=0) - bounds).max()))
        done = stop
    assert done == trials
    worst_attain = 0.0
    for lam, bound in zip(grid, bounds):
        strat = region.boundary_strategy(channels, lam, e)
        if strat.power_class is region.PowerClass.FULL:
            value = region.weighted_objective(region.strategy_gains(channels, strat), lam, e)
            worst_attain = max(worst_attain, abs(value - bound))
    box = np.array([float(np.real(np.vdot(h, h))) for h in channels])
    box_excess = float((gains - box[None, :]).max())
    return [
        Check("hyperplane bound violations", worst_violation, 1e-9, worst_violation <= 1e-9),
        Check("full-class strategies attain the bound", worst_attain, 1e-9, worst_attain <= 1e-9),
        Check("gains stay in the MRT box", box_excess, 1e-9, box_excess <= 1e-9),
    ]


def suite_full_power(seed: int = 0, trials: int = 500, scenario: Scenario | None = None) -> list[Check]:
    """Full-power completion: trace 1, off-target gains fixed, target gain up."""
    rng = np.random.default_rng(seed)
    worst_trace = 0.0
    worst_off = 0.0
    min_gain_up = np.inf
    for size in (2, 3):
        channels = _scenario_channels(scenario, size, size) or _random_channels(rng, size, size)
        for i in range(trials):
            q = region.random_feasible_covariance(seed * 11_000_003 + size * trials + i, size)
            target = i % size
            qq = region.full_power_completion(q, channels, target)
            worst_trace = max(worst_trace, abs(float(np.trace(qq).real) - 1.0))
            for j, h in enumerate(channels):
                delta = region.power_gain(qq, h) - region.power_gain(q, h)
                if j == target:
                    min_gain_up = min(min_gain_up, delta)
                else:
                    worst_off = max(worst_off, abs(delta))
    return [
        Check("completed trace equals 1", worst_trace, 1e-12, worst_trace <= 1e-12),
        Check("off-target gains unchanged", worst_off, 1e-10, worst_off <= 1e-10),
        Check(
            "target gain strictly larger",
            min_gain_up,
            1e-6,
            min_gain_up >= 1e-6,
            detail="minimum observed increase",
        ),
    ]


def suite_power_rule(seed: int = 0, trials: int = 500, scenario: Scenario | None = None) -> list[Check]:
    """Power rule matches the top eigenvalue sign and maximizes the objective."""
    rng = np.random.default_rng(seed)
    channels = _scenario_channels(scenario, 2, 3) or _random_channels(rng, 2, 3)
    e = np.array([1, -1, -1])
    lams = list(rng.dirichlet(np.ones(3), size=trials))
    # Deterministic free/zero probes: weight only the unintended receivers.
    lams += [np.array([0.0, 1.0, 0.0]), np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.5, 0.5])]
    mismatches = 0
    worst_suboptimality = -np.inf
    worst_free_spread = 0.0
    for lam in lams:
        z = weighted_combination(channels, lam, e)
        mu_max = float(eig_hermitian(z).values[-1])
        tau = region.ZERO_EIG_RTOL * (1.0 + float(np.abs(z).max()))
        cls = region.power_rule(z)
        expected = (
            region.PowerClass.FULL
            if mu_max > tau
            else region.PowerClass.ZERO
            if mu_max < -tau
            else region.PowerClass.FREE
        )
        if cls is not expected:
            mismatches += 1
        strat = region.boundary_strategy(channels, lam, e)
        chosen = region.weighted_objective(region.strategy_gains(channels, strat), lam, e)
        # Objective at power p is p * mu_max for the dominant direction.
        endpoint = max(0.0, mu_max)
        worst_suboptimality = max(worst_suboptimality, endpoint - chosen)
        if cls is region.PowerClass.FREE:
            worst_free_spread = max(worst_free_spread, abs(mu_max))
    return [
        Check("classification matches eigenvalue sign", mismatches, 0, mismatches == 0),
        Check(
            "chosen power maximizes the objective",
            worst_suboptimality,
            1e-9,
            worst_suboptimality <= 1e-9,
        ),
        Check(
            "free-class endpoints agree",
            worst_free_spread,
            1e-8,
            worst_free_spread <= 1e-8,
        ),
    ]


def suite_two_user(seed: int = 0, trials: int = 100, scenario: Scenario | None = None, alignments: int = 6) -> list[Check]:
    """Projector identity residuals and MRT/ZF-combination alignment."""
    rng = np.random.default_rng(seed)
    worst_resid = 0.0
    for n in (2, 3, 4):
        for _ in range(trials):
            own, cross = _random_channels(rng, n, 2)
            lam1 = float(rng.uniform(0.0, 1.0))
            worst_resid = max(worst_resid, pareto.verify_two_user_identity(lam1, own, cross))
    worst_alignment = 1.0
    for n in (2, 3, 4):
        own, cross = _random_channels(rng, n, 2)
        for lam_hat in np.linspace(0.0, 1.0, alignments):
            w = pareto.two_user_combination(float(lam_hat), own, cross)
            _, alignment = pareto.alignment_search(w, own, cross)
            worst_alignment = min(worst_alignment, alignment)
    return [
        Check("projector identity residual", worst_resid, 1e-9, worst_resid <= 1e-9),
        Check(
            "combination aligns with a boundary eigenvector",
            1.0 - worst_alignment,
            1e-6,
            worst_alignment >= 1.0 - 1e-6,
        ),
    ]


def suite_null_shaping(
    seed: int = 0, trials: int = 200, scenario: Scenario | None = None, probes: int = 50
) -> list[Check]:
    """Projected MRT reproduces the dominant-eigenvector gains exactly."""
    rng = np.random.default_rng(seed)
    channels = _scenario_channels(scenario, 4, 3) or _random_channels(rng, 4, 3)
    e = np.array([1, -1, -1])
    worst_gain = 0.0
    worst_structure = 0.0
    worst_annihilation = 0.0
    for i in range(trials):
        lam = rng.dirichlet(np.ones(3))
        worst_gain = max(
            worst_gain,
            nullshape.verify_gain_equivalence(channels, lam, e, probes=probes, seed=seed + i),
        )
        diag = nullshape.eigenvalue_structure(channels, lam, e)
        worst_structure = max(
            worst_structure, diag["low_max"] / diag["tau"], diag["middle_absmax"] / diag["tau"]
        )
        worst_annihilation = max(worst_annihilation, diag["annihilation"])
    return [
        Check("projected MRT gain mismatch", worst_gain, 1e-8, worst_gain <= 1e-8),
        Check(
            "eigenvalue sign structure (relative to tau)",
            worst_structure,
            1.0,
            worst_structure <= 1.0,
        ),
        Check(
            "middle eigenvectors annihilate weighted channels",
            worst_annihilation,
            1e-9,
            worst_annihilation <= 1e-9,
        ),
    ]


def suite_pareto_oracle(seed: int = 0, trials: int = 1000, scenario: Scenario | None = None) -> list[Check]:
    """Fast nondominated filter agrees with the pairwise reference scan."""
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.0, 1.0, size=(trials, 3))
    # Plant duplicates and weakly dominated points.
    n_special = max(trials // 20, 1)
    for i in range(n_special):
        j = int(rng.integers(0, trials))
        pts[i] = pts[j]
    for i in range(n_special, 2 * n_special):
        j = int(rng.integers(0, trials))
        pts[i] = pts[j]
        pts[i, int(rng.integers(0, 3))] -= 0.1
    fast = pareto.pareto_filter(pts)
    slow = pareto.pareto_filter_bruteforce(pts)
    agree = fast == slow
    return [
        Check(
            "filter matches pairwise oracle",
            float(len(set(fast) ^ set(slow))),
            0,
            agree,
            detail=f"{len(fast)} nondominated of {trials}",
        )
    ]


SUITES = {
    "convexity": suite_convexity,
    "hyperplane": suite_hyperplane,
    "full-power": suite_full_power,
    "power-rule": suite_power_rule,
    "two-user": suite_two_user,
    "null-shaping": suite_null_shaping,
    "pareto-oracle": suite_pareto_oracle,
}


def suite_names() -> list[str]:
    return sorted(SUITES) + ["all"]


def run_suite(name: str, seed: int = 0, trials: int | None = None, scenario: Scenario | None = None) -> list[Check]:
    """Run one suite (or 'all'); unknown names raise KeyError."""
    if name == "all":
        out = []
        for key in sorted(SUITES):
            out.extend(run_suite(key, seed=seed, trials=trials, scenario=scenario))
        return out
    if name not in SUITES:
        raise KeyError(name)
    kwargs = {"seed": seed, "scenario": scenario}
    if trials is not None:
        kwargs["trials"] = trials
    return SUITES[name](**kwargs)
