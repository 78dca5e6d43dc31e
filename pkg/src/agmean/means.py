"""Two-variable mean candidates on positive-definite matrices.

The central object is the r-mean B^{1/2}(B^{-1/2} A B^{-1/2})^r B^{1/2} and
its equivalent A-sided dual form.  Three rival candidates are evaluated
verbatim so the axiom checkers can separate maps that scale correctly and
respect inversion from maps that do not.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidR
from .pdcore import (
    EnsembleSpec,
    PDMatrix,
    check_dims,
    congruence,
    derive_seed,
    mat_power,
    random_commuting_pair,
    random_pair,
)

CANDIDATE_TAGS = ("r_mean", "r_mean_dual", "naive_power", "exotic", "conjugated")

AXIOM_PASS_TOL = 1e-9
WITNESS_REPORT_TOL = 1e-6


@dataclass(frozen=True)
class MeanCandidate:
    """One of the five candidate maps, with its exponent r > 0, r != 1.

    r = 1 is rejected because every candidate degenerates to A there.
    """

    tag: str
    r: float

    def __post_init__(self):
        if self.tag not in CANDIDATE_TAGS:
            raise ValueError(f"unknown candidate tag {self.tag!r}")
        if not (self.r > 0.0) or self.r == 1.0:
            raise InvalidR(f"r must be positive and != 1, got {self.r}")


@dataclass
class AxiomReport:
    """Worst violation of one axiom over a sampled campaign.

    witness is an (A, B, t) triple (t is None for axioms without a scale
    parameter) and is present exactly when max_violation exceeds tolerance.
    """

    axiom: str
    max_violation: float
    tolerance: float
    witness: tuple[PDMatrix, PDMatrix, float | None] | None

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tolerance


def r_mean(a: PDMatrix, b: PDMatrix, r: float) -> PDMatrix:
    """B^{1/2} (B^{-1/2} A B^{-1/2})^r B^{1/2}."""
    check_dims(a, b)
    inner = congruence(mat_power(b, -0.5), a)
    return congruence(mat_power(b, 0.5), mat_power(inner, r))


def r_mean_dual(a: PDMatrix, b: PDMatrix, r: float) -> PDMatrix:
    """A^{1/2} (A^{-1/2} B A^{-1/2})^{1-r} A^{1/2}; equals r_mean(a, b, r)."""
    check_dims(a, b)
    inner = congruence(mat_power(a, -0.5), b)
    return congruence(mat_power(a, 0.5), mat_power(inner, 1.0 - r))


def _naive_power(a: PDMatrix, b: PDMatrix, r: float) -> PDMatrix:
    return congruence(mat_power(a, r / 2.0), mat_power(b, 1.0 - r))


def _exotic(a: PDMatrix, b: PDMatrix, r: float) -> PDMatrix:
    b6 = mat_power(b, 6.0)
    inner = congruence(b6, mat_power(a, -2.0))
    return congruence(mat_power(b, (1.0 + 2.0 * r) / 2.0), mat_power(inner, -r / 2.0))


def _conjugated(a: PDMatrix, b: PDMatrix, r: float) -> PDMatrix:
    c = PDMatrix(mat_power(a, 3.0).entries + 2.0 * b.entries, pd_tol=a.pd_tol)
    c2 = mat_power(c, 2.0).entries
    c2i = mat_power(c, -2.0).entries
    g = c2 @ mat_power(a, r / 2.0).entries @ c2i
    return PDMatrix(g @ mat_power(b, 1.0 - r).entries @ g.T, pd_tol=a.pd_tol)


def eval_candidate(c: MeanCandidate, a: PDMatrix, b: PDMatrix) -> PDMatrix:
    """Evaluate the tagged formula verbatim; output is symmetric PD."""
    check_dims(a, b)
    if c.tag == "r_mean":
        return r_mean(a, b, c.r)
    if c.tag == "r_mean_dual":
        return r_mean_dual(a, b, c.r)
    if c.tag == "naive_power":
        return _naive_power(a, b, c.r)
    if c.tag == "exotic":
        return _exotic(a, b, c.r)
    return _conjugated(a, b, c.r)


def commuting_reference(a: PDMatrix, b: PDMatrix, r: float) -> PDMatrix:
    """A^r B^{1-r} for a commuting pair (symmetric because the factors commute)."""
    prod = mat_power(a, r).entries @ mat_power(b, 1.0 - r).entries
    return PDMatrix(prod, pd_tol=a.pd_tol)


def _rel_fro(x: np.ndarray, ref: np.ndarray) -> float:
    return float(np.linalg.norm(x - ref) / np.linalg.norm(ref))


def _campaign_report(axiom, violations, samples, tolerance):
    """Assemble an AxiomReport; the witness is the first sample whose
    violation exceeds WITNESS_REPORT_TOL, else the argmax if above tolerance."""
    max_violation = max(violations)
    witness = None
    for v, s in zip(violations, samples):
        if v > WITNESS_REPORT_TOL:
            witness = s
            break
    if witness is None and max_violation > tolerance:
        witness = samples[int(np.argmax(violations))]
    return AxiomReport(axiom, max_violation, tolerance, witness)


def check_homogeneity(
    c: MeanCandidate,
    trials: int,
    dims: list[int],
    t_grid: list[float],
    seed: int,
    ensemble: str = "wishart",
    condition_cap: float = 100.0,
    eps: float = 0.1,
    tolerance: float = AXIOM_PASS_TOL,
) -> AxiomReport:
    """Worst relative error of M(tA, B) against t^r M(A, B) over samples."""
    if any(t <= 0 for t in t_grid):
        raise ValueError("t_grid must be positive")
    violations, samples = [], []
    for i in range(trials):
        dim = dims[i % len(dims)]
        a, b = random_pair(
            EnsembleSpec(ensemble, dim, condition_cap, derive_seed(seed, "homog", i), eps)
        )
        base = eval_candidate(c, a, b).entries
        for t in t_grid:
            scaled = eval_candidate(c, a.scaled(t), b).entries
            ref = t**c.r * base
            violations.append(_rel_fro(scaled, ref))
            samples.append((a, b, t))
    return _campaign_report("homogeneity", violations, samples, tolerance)


def check_inversion(
    c: MeanCandidate,
    trials: int,
    dims: list[int],
    seed: int,
    ensemble: str = "wishart",
    condition_cap: float = 100.0,
    eps: float = 0.1,
    tolerance: float = AXIOM_PASS_TOL,
) -> AxiomReport:
    """Worst relative error of M(A, B)^{-1} against M(A^{-1}, B^{-1})."""
    violations, samples = [], []
    for i in range(trials):
        dim = dims[i % len(dims)]
        a, b = random_pair(
            EnsembleSpec(ensemble, dim, condition_cap, derive_seed(seed, "inv", i), eps)
        )
        lhs = mat_power(eval_candidate(c, a, b), -1.0).entries
        rhs = eval_candidate(c, mat_power(a, -1.0), mat_power(b, -1.0)).entries
        violations.append(_rel_fro(lhs, rhs))
        samples.append((a, b, None))
    return _campaign_report("inversion", violations, samples, tolerance)


def check_commuting_value(
    c: MeanCandidate,
    trials: int,
    dims: list[int],
    seed: int,
    condition_cap: float = 100.0,
    tolerance: float = AXIOM_PASS_TOL,
) -> AxiomReport:
    """Worst relative error of M(A, B) against A^r B^{1-r} on commuting pairs."""
    violations, samples = [], []
    for i in range(trials):
        dim = dims[i % len(dims)]
        a, b = random_commuting_pair(
            EnsembleSpec("commuting_pair", dim, condition_cap, derive_seed(seed, "comm", i))
        )
        got = eval_candidate(c, a, b).entries
        ref = commuting_reference(a, b, c.r).entries
        violations.append(_rel_fro(got, ref))
        samples.append((a, b, None))
    return _campaign_report("commuting_value", violations, samples, tolerance)
