"""Scalar and operator arithmetic-geometric gap machinery.

Gaps are smallest eigenvalues of differences, reported with a scale so that
tolerances stay dimension- and magnitude-independent.  The two scalar curve
extremizers are the closed forms behind the certificate products; the
certificate itself evaluates vector-state products that must stay at or
above one whenever the candidate scales correctly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidR
from .means import MeanCandidate, eval_candidate, r_mean
from .pdcore import (
    DEFAULT_ORDER_TOL,
    EnsembleSpec,
    PDMatrix,
    UnitVector,
    check_dims,
    derive_seed,
    mat_power,
    random_pair,
)


@dataclass
class GapReport:
    """Smallest eigenvalue of an inequality's difference, plus its scale.

    direction records which way the inequality was oriented ("geq" for
    LHS - RHS, "leq" for RHS - LHS).  A witness eigenvector is attached
    exactly when the gap is negative beyond order_tol * scale.
    """

    gap: float
    direction: str
    scale: float
    order_tol: float
    witness_vector: UnitVector | None

    @property
    def holds(self) -> bool:
        return self.gap >= -self.order_tol * self.scale


def _gap_report(diff: np.ndarray, direction: str, scale: float, order_tol: float) -> GapReport:
    vals, vecs = np.linalg.eigh((diff + diff.T) / 2.0)
    gap = float(vals[0])
    witness = UnitVector(vecs[:, 0]) if gap < -order_tol * scale else None
    return GapReport(gap, direction, scale, order_tol, witness)


def scalar_ag_gap(a: float, b: float, r: float) -> float:
    """Slack in the scalar arithmetic-geometric bound.

    For r > 1 returns a^r b^{1-r} + (r-1) b - r a; for 0 < r < 1 the
    orientation flips and the gap is r a + (1-r) b - a^r b^{1-r}.  Both are
    nonnegative for all positive a, b.
    """
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if r == 1.0 or r <= 0.0:
        raise InvalidR(f"r must be positive and != 1, got {r}")
    if r > 1.0:
        return a**r * b ** (1.0 - r) + (r - 1.0) * b - r * a
    return r * a + (1.0 - r) * b - a**r * b ** (1.0 - r)


def young_gap(x: PDMatrix, r: float, order_tol: float = DEFAULT_ORDER_TOL) -> GapReport:
    """Gap of the operator power bound X^r + (r-1) >= r X (flipped for r < 1)."""
    if r == 1.0 or r <= 0.0:
        raise InvalidR(f"r must be positive and != 1, got {r}")
    eye = np.eye(x.dim)
    xr = mat_power(x, r).entries
    if r > 1.0:
        diff = xr + (r - 1.0) * eye - r * x.entries
        direction = "geq"
    else:
        diff = r * x.entries + (1.0 - r) * eye - xr
        direction = "leq"
    scale = max(np.linalg.norm(xr, 2), np.linalg.norm(r * x.entries, 2), 1.0)
    return _gap_report(diff, direction, scale, order_tol)


def ag_gap(
    c: MeanCandidate, a: PDMatrix, b: PDMatrix, order_tol: float = DEFAULT_ORDER_TOL
) -> GapReport:
    """Gap of M(A,B) against rA + (1-r)B, oriented by the branch of r.

    For r > 1 the candidate must dominate the affine combination; for
    0 < r < 1 the affine combination must dominate the candidate.
    """
    check_dims(a, b)
    m = eval_candidate(c, a, b).entries
    affine = c.r * a.entries + (1.0 - c.r) * b.entries
    if c.r > 1.0:
        diff = m - affine
        direction = "geq"
    else:
        diff = affine - m
        direction = "leq"
    scale = max(np.linalg.norm(m, 2), np.linalg.norm(affine, 2))
    return _gap_report(diff, direction, scale, order_tol)


def power_curve_max(c: float, r: float) -> tuple[float, float]:
    """Maximum of f(t) = r t^{1-r} + (1-r) t^{-r} c over t > 0, for r > 1.

    The maximizer is t = c and the maximum value is c^{1-r}.
    """
    if c <= 0:
        raise ValueError("c must be positive")
    if r <= 1.0:
        raise InvalidR(f"r must exceed 1, got {r}")
    return c, c ** (1.0 - r)


def scale_curve_min(x: float, y: float) -> tuple[float, float]:
    """Minimum of f(t) = t x + y / t over t > 0: attained at sqrt(y/x), value 2 sqrt(xy)."""
    if x <= 0 or y <= 0:
        raise ValueError("x and y must be positive")
    return float(np.sqrt(y / x)), float(2.0 * np.sqrt(x * y))


def certificate_vectors(
    x: PDMatrix, y: PDMatrix, n_random: int = 64, seed: int = 0
) -> np.ndarray:
    """Default probe set: standard basis, eigenvectors of both operators,
    and n_random uniform directions; rows are unit vectors."""
    dim = x.dim
    rng = np.random.default_rng(seed)
    rand = rng.standard_normal((n_random, dim))
    rows = np.vstack([np.eye(dim), x.eig.eigenvectors.T, y.eig.eigenvectors.T, rand])
    return rows / np.linalg.norm(rows, axis=1, keepdims=True)


def dominance_certificate(
    c: MeanCandidate,
    a: PDMatrix,
    b: PDMatrix,
    vectors: np.ndarray | None = None,
    n_random: int = 64,
    seed: int = 0,
) -> float:
    """Minimum vector-state product certifying that M sits above the r-mean.

    With X = A^{-1/2} M(A,B) A^{-1/2} and Y = A^{-1/2} M_r(A,B) A^{-1/2},
    evaluates <X^e v, v> <Y^{-e} v, v> over the probe set, where e = 1 for
    r >= 2 and e = 1/(r-1) for 1 < r < 2.  Stays >= 1 whenever the candidate
    satisfies the scaling and domination hypotheses.
    """
    if c.r <= 1.0:
        raise InvalidR(f"certificate requires r > 1, got {c.r}")
    check_dims(a, b)
    ai_half = mat_power(a, -0.5)
    x = PDMatrix(ai_half.entries @ eval_candidate(c, a, b).entries @ ai_half.entries)
    y = PDMatrix(ai_half.entries @ r_mean(a, b, c.r).entries @ ai_half.entries)
    e = 1.0 if c.r >= 2.0 else 1.0 / (c.r - 1.0)
    xe = mat_power(x, e).entries
    yie = mat_power(y, -e).entries
    if vectors is None:
        vectors = certificate_vectors(x, y, n_random=n_random, seed=seed)
    qx = np.einsum("ni,ij,nj->n", vectors, xe, vectors)
    qy = np.einsum("ni,ij,nj->n", vectors, yie, vectors)
    return float(np.min(qx * qy))


def check_ag_bound(
    c: MeanCandidate,
    trials: int,
    dims: list[int],
    seed: int,
    ensemble: str = "wishart",
    condition_cap: float = 100.0,
    eps: float = 0.1,
    order_tol: float = DEFAULT_ORDER_TOL,
) -> tuple[float, GapReport | None]:
    """Most negative normalized gap over a sampled campaign.

    Returns (worst gap / scale, report at the worst sample); the report is
    None when no sample produced a finite scale (cannot happen for PD input).
    """
    worst = np.inf
    worst_report = None
    for i in range(trials):
        dim = dims[i % len(dims)]
        a, b = random_pair(
            EnsembleSpec(ensemble, dim, condition_cap, derive_seed(seed, "ag", i), eps)
        )
        rep = ag_gap(c, a, b, order_tol=order_tol)
        normalized = rep.gap / rep.scale
        if normalized < worst:
            worst = normalized
            worst_report = rep
    return float(worst), worst_report
