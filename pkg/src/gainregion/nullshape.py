"""Null-shaping characterization of efficient beamformers.

Builds the null-constraint matrix from selected eigenvectors of the
weighted channel combination, forms the projected-MRT beamformer that
satisfies those constraints, and verifies that it achieves exactly the
same power gains as the dominant-eigenvector strategy.

Requires at least as many transmit antennas as receivers; below that the
constraints cannot all be met and the construction errors out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import as_cvec, dominant_eigvec, eig_hermitian, unit, weighted_combination
from .region import check_direction, check_simplex_weight

__all__ = [
    "ZERO_EIG_RTOL",
    "NullConstraintSet",
    "null_constraints",
    "projected_mrt",
    "gain_profile",
    "verify_gain_equivalence",
    "eigenvalue_structure",
]

# Relative tolerance for treating eigenvalues of the combination as zero.
ZERO_EIG_RTOL = 1e-9


@dataclass(frozen=True)
class NullConstraintSet:
    """Null-shaping constraints: orthonormal directions to radiate zero power.

    ``columns`` holds the selected eigenvectors of the weighted channel
    combination (the smallest-eigenvalue block plus the below-top block of
    the largest ones); there are K - 1 of them when the receiver sets are
    exhaustive.
    """

    columns: np.ndarray
    lam: np.ndarray
    e: np.ndarray
    low_range: tuple[int, int]  # half-open 0-based index ranges into the
    high_range: tuple[int, int]  # nondecreasing eigenvalue ordering

    def __post_init__(self):
        for name in ("columns", "lam", "e"):
            arr = np.asarray(getattr(self, name))
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def n_constraints(self) -> int:
        return self.columns.shape[1]


def null_constraints(channels, lam, e) -> NullConstraintSet:
    """Select the eigenvectors that act as null-shaping constraints.

    With eigenvalues in nondecreasing order, takes the first
    |unintended| eigenvectors and the ones at positions
    N - |intended| + 1 .. N - 1 (1-based), leaving out the zero-eigenvalue
    middle block and the top eigenvector.
    """
    vecs = [as_cvec(h) for h in channels]
    lam = check_simplex_weight(lam)
    e = check_direction(e)
    if not (len(vecs) == lam.size == e.size):
        raise ValueError(
            f"length mismatch: {len(vecs)} channels, {lam.size} weights, {e.size} directions"
        )
    n = vecs[0].size
    k = len(vecs)
    if n < k:
        raise ValueError(f"null shaping needs n_antennas >= receivers, got {n} < {k}")
    n_in = int(np.sum(e == 1))
    n_un = k - n_in
    low = (0, n_un)
    high = (n - n_in, n - 1)
    if high[0] < low[1] and high[1] > high[0]:
        raise ValueError(
            f"constraint index ranges overlap: {low} and {high} at n={n}, k={k}"
        )
    es = eig_hermitian(weighted_combination(vecs, lam, e))
    cols = np.hstack([es.vectors[:, low[0] : low[1]], es.vectors[:, high[0] : high[1]]])
    return NullConstraintSet(columns=cols, lam=lam, e=e, low_range=low, high_range=high)


def projected_mrt(constraints: NullConstraintSet, h_intended) -> np.ndarray:
    """MRT projected onto the orthogonal complement of the constraints.

    The result radiates zero power along every constraint column.  An
    empty constraint set reduces to plain MRT.
    """
    h = as_cvec(h_intended)
    cols = constraints.columns
    if cols.shape[1] == 0:
        return unit(h)
    if cols.shape[0] != h.size:
        raise ValueError(
            f"constraints have dimension {cols.shape[0]}, channel has {h.size}"
        )
    # Eigenvector columns are orthonormal, so the projector is I - C C^H.
    d = h - cols @ (cols.conj().T @ h)
    norm = np.linalg.norm(d)
    if norm <= 1e-12 * np.linalg.norm(h):
        raise ValueError("projected intended channel is numerically zero")
    return d / norm


def gain_profile(w, probes) -> np.ndarray:
    """Squared inner products |g^H w|^2 against a list of probe vectors."""
    wv = as_cvec(w)
    return np.array([abs(np.vdot(g, wv)) ** 2 for g in probes])


def verify_gain_equivalence(
    channels,
    lam,
    e,
    probes: int = 50,
    seed: int = 0,
    intended_index: int | None = None,
) -> float:
    """Largest relative gain mismatch between projected MRT and the
    dominant-eigenvector strategy.

    Gains are compared on ``probes`` random unit vectors plus every channel
    vector.  The relative difference uses an absolute floor of 1e-9 times
    the probe's maximum achievable gain, so vanishing gains do not inflate
    the ratio.
    """
    vecs = [as_cvec(h) for h in channels]
    e = check_direction(e)
    if intended_index is None:
        intended_index = int(np.argmax(e == 1))
    constraints = null_constraints(vecs, lam, e)
    w_proj = projected_mrt(constraints, vecs[intended_index])
    z = weighted_combination(vecs, check_simplex_weight(lam), e)
    v_top = dominant_eigvec(z, vecs)
    rng = np.random.default_rng(seed)
    n = vecs[0].size
    probe_list = []
    for _ in range(probes):
        g = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        probe_list.append(g / np.linalg.norm(g))
    probe_list.extend(vecs)
    worst = 0.0
    for g in probe_list:
        bound = float(np.real(np.vdot(g, g)))
        a = abs(np.vdot(g, w_proj)) ** 2
        b = abs(np.vdot(g, v_top)) ** 2
        denom = max(a, b, 1e-9 * bound)
        worst = max(worst, abs(a - b) / denom)
    return worst


def eigenvalue_structure(channels, lam, e) -> dict:
    """Diagnostics of the eigenvalue sign pattern of the combination.

    Returns the eigenvalues, the tolerance tau, the largest of the
    low block (must be <= tau), the largest magnitude in the middle block
    (must be <= tau), and the worst channel annihilation residual of the
    middle-block eigenvectors over channels with positive weight.
    """
    vecs = [as_cvec(h) for h in channels]
    lam = check_simplex_weight(lam)
    e = check_direction(e)
    n = vecs[0].size
    k = len(vecs)
    n_in = int(np.sum(e == 1))
    n_un = k - n_in
    m = weighted_combination(vecs, lam, e)
    es = eig_hermitian(m)
    tau = ZERO_EIG_RTOL * (1.0 + float(np.abs(m).max()))
    low = es.values[:n_un]
    middle = es.values[n_un : n - n_in]
    annihilation = 0.0
    for i in range(n_un, n - n_in):
        v = es.vectors[:, i]
        for weight, h in zip(lam, vecs):
            if weight > 0.0:
                annihilation = max(
                    annihilation, abs(np.vdot(h, v)) / np.linalg.norm(h)
                )
    return {
        "values": es.values,
        "tau": tau,
        "low_max": float(low.max()) if low.size else float("-inf"),
        "middle_absmax": float(np.abs(middle).max()) if middle.size else 0.0,
        "n_zero_expected": max(n - k, 0),
        "annihilation": annihilation,
        "eigensystem": es,
    }
