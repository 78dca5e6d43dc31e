"""Seeded verification campaigns, counterexample searches, and reporting.

Every suite is deterministic given its configuration: per-trial seeds are
derived from the campaign seed and the trial index, records are sorted
before writing, and floats are serialized round-trip exactly.  Worker-pool
size cannot affect output because each trial is a pure function of the
configuration and its index.

A trial that violates its tolerance is re-verified at tightened settings
(denser scans where a scan is involved) before being reported as a fail;
every fail record points at a witness JSON file that embeds the offending
matrices and enough configuration to recompute the quantity exactly.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import inequalities, means, proofcheck, quasiorder
from .errors import ConfigError
from .pdcore import (
    EnsembleSpec,
    PDMatrix,
    derive_seed,
    mat_power,
    random_commuting_pair,
    random_orthogonal,
    random_pair,
    random_pd,
    random_projection,
)

SUITES = (
    "dual",
    "axioms",
    "ag",
    "certificates",
    "quasiorder",
    "rigidity",
    "squaring",
    "loewner",
    "block",
    "proofcheck",
    "search_ag",
    "search_transitivity",
)

DUAL_TOL = 1e-9
AXIOM_TOL = 1e-9
AG_TOL = 1e-8
CERT_TOL = 1e-8
METHOD_TOL = 1e-6
SELF_Q_TOL = 1e-10
RESID_TOL = 1e-10
RIGIDITY_SEPARATION = 0.05

SEARCH_DETECT_TOL = 1e-6
SEARCH_VERIFY_FACTOR = 10.0

_HOMOG_T_CYCLE = (0.25, 0.5, 2.0, 4.0)
_PARTITION_SIZES = (2, 4, 8, 16)
_POW_R_GRID = (0.25, 0.5, 0.75)

# quantity -> (rule, tolerance); rules: "err" value <= tol, "gap" value >= -tol,
# "one" value >= 1 - tol, "below_one" value < 1, "flag" informational (always passes)
_QUANTITY_RULES = {
    "dual_rel_err": ("err", DUAL_TOL),
    "homogeneity_rel_err": ("err", AXIOM_TOL),
    "inversion_rel_err": ("err", AXIOM_TOL),
    "commuting_rel_err": ("err", AXIOM_TOL),
    "ag_gap_normalized": ("gap", AG_TOL),
    "certificate_min": ("one", CERT_TOL),
    "method_agreement": ("err", METHOD_TOL),
    "rigidity_min_q": ("below_one", 0.0),
    "self_q_dev": ("err", SELF_Q_TOL),
    "squaring_q2": ("one", quasiorder.DEFAULT_QO_TOL),
    "loewner_quasi_q": ("one", quasiorder.DEFAULT_QO_TOL),
    "block_schur_agree": ("one", 0.5),
    "diff_resid": ("err", RESID_TOL),
    "schur_resid": ("err", RESID_TOL),
    "fineness_ratio": ("err", 1.0 + 1e-12),
    "sqrt_sandwich_violation": ("err", RESID_TOL),
    "pow_sandwich_violation": ("err", RESID_TOL),
    "partition_lhs_max": ("err", RESID_TOL),
    "final_bound_ratio_max": ("err", 1.0 - 1e-12),
    "search_found": ("flag", 0.0),
    "search_best_gap": ("flag", 0.0),
    "search_trials": ("flag", 0.0),
    "transitivity_found": ("flag", 0.0),
    "third_q_min": ("flag", 0.0),
}


def _passes(quantity: str, value: float) -> bool:
    rule, tol = _QUANTITY_RULES[quantity]
    if rule == "err":
        return value <= tol
    if rule == "gap":
        return value >= -tol
    if rule == "one":
        return value >= 1.0 - tol
    if rule == "below_one":
        return value < 1.0
    return True


@dataclass
class Tolerances:
    pd_tol: float = 1e-12
    order_tol: float = 1e-10
    qo_tol: float = 1e-8


@dataclass
class ExperimentConfig:
    """Campaign description; see SUITES for valid suite names."""

    suite: str
    dims: list[int] = field(default_factory=lambda: [2, 3, 4])
    r_values: list[float] = field(default_factory=list)
    trials: int = 100
    seed: int = 0
    tolerances: Tolerances = field(default_factory=Tolerances)
    ensemble: str = "wishart"
    condition_cap: float = 100.0
    eps: float = 0.1
    candidate: str = "r_mean"
    margin: float = 1e-4
    out_path: str = "report.jsonl"

    def validate(self):
        if self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}; valid: {SUITES}")
        if any(d < 2 for d in self.dims) or not self.dims:
            raise ConfigError("dims must be a non-empty list of integers >= 2")
        if self.trials < 0:
            raise ConfigError("trials must be nonnegative")
        if self.suite in ("dual", "axioms", "ag", "certificates", "search_ag"):
            if not self.r_values:
                raise ConfigError(f"suite {self.suite!r} needs r_values")
            if any(r <= 0 or r == 1.0 for r in self.r_values):
                raise ConfigError("r values must be positive and != 1")
        if self.suite == "certificates" and any(r <= 1.0 for r in self.r_values):
            raise ConfigError("certificates suite needs r > 1")
        if self.suite == "proofcheck" and self.r_values:
            if any(not 0.0 < r < 1.0 for r in self.r_values):
                raise ConfigError("proofcheck r values must lie in (0, 1)")
        if self.suite == "search_ag":
            if self.candidate not in ("naive_power", "exotic"):
                raise ConfigError("search_ag candidate must be naive_power or exotic")
        if self.candidate not in means.CANDIDATE_TAGS:
            raise ConfigError(f"unknown candidate {self.candidate!r}")


@dataclass
class TrialRecord:
    suite: str
    trial_index: int
    seed: int
    dim: int
    r: float | None
    quantity_name: str
    value: float
    passed: bool
    witness_ref: str | None = None

    def to_json_dict(self) -> dict:
        return {
            "suite": self.suite,
            "trial_index": self.trial_index,
            "seed": self.seed,
            "dim": self.dim,
            "r": self.r,
            "quantity_name": self.quantity_name,
            "value": float(self.value),
            "pass": self.passed,
            "witness_ref": self.witness_ref,
        }


CSV_COLUMNS = (
    "suite",
    "trial_index",
    "seed",
    "dim",
    "r",
    "quantity_name",
    "value",
    "pass",
    "witness_ref",
)


@dataclass
class Summary:
    suite: str
    total: int
    passed: int
    failed: int
    quantity_ranges: dict
    witness_paths: list[str]
    out_path: str
    extra: dict = field(default_factory=dict)

    def format(self) -> str:
        lines = [f"suite={self.suite} records={self.total} out={self.out_path}"]
        for name in sorted(self.quantity_ranges):
            lo, hi = self.quantity_ranges[name]
            lines.append(f"  {name}: min={lo:.17g} max={hi:.17g}")
        for key in sorted(self.extra):
            lines.append(f"  {key}: {self.extra[key]}")
        for path in self.witness_paths:
            lines.append(f"  witness: {path}")
        if self.failed:
            lines.append(f"failed {self.failed}/{self.total}")
        else:
            lines.append(f"all {self.total} passed")
        return "\n".join(lines)


def _spec_for(cfg: ExperimentConfig, dim: int, seed: int) -> EnsembleSpec:
    return EnsembleSpec(cfg.ensemble, dim, cfg.condition_cap, seed, cfg.eps)


def _trial_dim(cfg: ExperimentConfig, i: int) -> int:
    return cfg.dims[i % len(cfg.dims)]


def _trial_r(cfg: ExperimentConfig, i: int) -> float | None:
    return cfg.r_values[i % len(cfg.r_values)] if cfg.r_values else None


def _rel_fro(x: np.ndarray, ref: np.ndarray) -> float:
    return float(np.linalg.norm(x - ref) / np.linalg.norm(ref))


def _record(cfg, i, seed, dim, r, quantity, value, witness_ref=None) -> TrialRecord:
    return TrialRecord(
        cfg.suite, i, seed, dim, r, quantity, float(value), _passes(quantity, float(value)),
        witness_ref,
    )


# ---------------------------------------------------------------------------
# suite runners: each maps (cfg, trial_index) -> list[TrialRecord]


def _run_dual(cfg: ExperimentConfig, i: int) -> list[TrialRecord]:
    dim = _trial_dim(cfg, i)
    seed = derive_seed(cfg.seed, cfg.suite, i)
    a, b = random_pair(_spec_for(cfg, dim, seed))
    out = []
    for r in cfg.r_values:
        lhs = means.r_mean(a, b, r).entries
        rhs = means.r_mean_dual(a, b, r).entries
        out.append(_record(cfg, i, seed, dim, r, "dual_rel_err", _rel_fro(lhs, rhs)))
    return out


def _run_axioms(cfg: ExperimentConfig, i: int) -> list[TrialRecord]:
    dim = _trial_dim(cfg, i)
    r = _trial_r(cfg, i)
    seed = derive_seed(cfg.seed, cfg.suite, i)
    cand = means.MeanCandidate(cfg.candidate, r)
    a, b = random_pair(_spec_for(cfg, dim, seed))
    out = []

    t = _HOMOG_T_CYCLE[i % len(_HOMOG_T_CYCLE)]
    base = means.eval_candidate(cand, a, b).entries
    scaled = means.eval_candidate(cand, a.scaled(t), b).entries
    out.append(
        _record(cfg, i, seed, dim, r, "homogeneity_rel_err", _rel_fro(scaled, t**r * base))
    )

    lhs = mat_power(means.eval_candidate(cand, a, b), -1.0).entries
    rhs = means.eval_candidate(cand, mat_power(a, -1.0), mat_power(b, -1.0)).entries
    out.append(_record(cfg, i, seed, dim, r, "inversion_rel_err", _rel_fro(lhs, rhs)))

    ca, cb = random_commuting_pair(
        EnsembleSpec("commuting_pair", dim, cfg.condition_cap, derive_seed(seed, "comm"))
    )
    got = means.eval_candidate(cand, ca, cb).entries
    ref = means.commuting_reference(ca, cb, r).entries
    out.append(_record(cfg, i, seed, dim, r, "commuting_rel_err", _rel_fro(got, ref)))

    rep = inequalities.ag_gap(cand, a, b, order_tol=cfg.tolerances.order_tol)
    out.append(_record(cfg, i, seed, dim, r, "ag_gap_normalized", rep.gap / rep.scale))
    return out


def _run_ag(cfg: ExperimentConfig, i: int) -> list[TrialRecord]:
    dim = _trial_dim(cfg, i)
    r = _trial_r(cfg, i)
    seed = derive_seed(cfg.seed, cfg.suite, i)
    cand = means.MeanCandidate(cfg.candidate, r)
    a, b = random_pair(_spec_for(cfg, dim, seed))
    rep = inequalities.ag_gap(cand, a, b, order_tol=cfg.tolerances.order_tol)
    rec = _record(cfg, i, seed, dim, r, "ag_gap_normalized", rep.gap / rep.scale)
    if not rec.passed:
        rec.witness_ref = _write_witness(cfg, rec, {"A": a, "B": b})
    return [rec]


def _run_certificates(cfg: ExperimentConfig, i: int) -> list[TrialRecord]:
    dim = _trial_dim(cfg, i)
    r = _trial_r(cfg, i)
    seed = derive_seed(cfg.seed, cfg.suite, i)
    cand = means.MeanCandidate(cfg.candidate, r)
    a, b = random_pair(_spec_for(cfg, dim, seed))
    value = inequalities.dominance_certificate(cand, a, b, seed=derive_seed(seed, "vec"))
    rec = _record(cfg, i, seed, dim, r, "certificate_min", value)
    if not rec.passed:
        rec.witness_ref = _write_witness(cfg, rec, {"A": a, "B": b})
    return [rec]


def _run_quasiorder(cfg: ExperimentConfig, i: int) -> list[TrialRecord]:
    dim = _trial_dim(cfg, i)
    seed = derive_seed(cfg.seed, cfg.suite, i)
    x, y = random_pair(_spec_for(cfg, dim, seed))
    rep = quasiorder.q_value(
        x, y, qo_tol=cfg.tolerances.qo_tol, method="both", seed=derive_seed(seed, "starts")
    )
    rec = _record(cfg, i, seed, dim, None, "method_agreement", rep.method_agreement)
    if not rec.passed:
        rec.witness_ref = _write_witness(cfg, rec, {"X": x, "Y": y})
    return [rec]


def _separation(x: PDMatrix, y: PDMatrix) -> float:
    return float(
        np.linalg.norm(x.entries - y.entries, 2) / max(x.spectral_norm, y.spectral_norm)
    )


def _rigidity_pair(cfg: ExperimentConfig, seed: int, dim: int, i: int):
    """A pair with relative spectral separation at least RIGIDITY_SEPARATION.

    Most trials draw independently (resampling the rare too-close pair);
    every fourth trial stresses the boundary: a well-conditioned base plus
    a perturbation of 6-11% of its norm (small enough to keep the sum PD,
    large enough that the separation stays above threshold), alternating
    PSD and indefinite directions.
    """
    if i % 4 != 3:
        x = random_pd(_spec_for(cfg, dim, derive_seed(seed, "X")))
        for k in range(64):
            y = random_pd(_spec_for(cfg, dim, derive_seed(seed, "Y", k)))
            if _separation(x, y) >= RIGIDITY_SEPARATION:
                return x, y
        return x, y  # vanishingly unlikely; separation asserted by caller
    x = random_pd(EnsembleSpec(cfg.ensemble, dim, 8.0, derive_seed(seed, "X"), cfg.eps))
    rng = np.random.default_rng(derive_seed(seed, "pert"))
    g = rng.standard_normal((dim, dim))
    s = (g + g.T) / 2.0
    if i % 8 == 3:
        s = s @ s.T  # PSD direction
    s /= np.linalg.norm(s, 2)
    target = rng.uniform(0.06, 0.11)
    y = PDMatrix(x.entries + target * x.spectral_norm * s)
    if _separation(x, y) < RIGIDITY_SEPARATION:
        y = random_pd(_spec_for(cfg, dim, derive_seed(seed, "Yfb")))
    return x, y


def _run_rigidity(cfg: ExperimentConfig, i: int) -> list[TrialRecord]:
    dim = _trial_dim(cfg, i)
    seed = derive_seed(cfg.seed, cfg.suite, i)
    x, y = _rigidity_pair(cfg, seed, dim, i)
    md = quasiorder.mutual_dominance(x, y, qo_tol=cfg.tolerances.qo_tol, method="scan")
    min_q = min(md.q_xy, md.q_yx)
    rec = _record(cfg, i, seed, dim, None, "rigidity_min_q", min_q)
    if not rec.passed:
        # tightened re-check: a genuine mutual dominance would falsify rigidity
        md = quasiorder.mutual_dominance(
            x, y, qo_tol=cfg.tolerances.qo_tol, method="both", grid_points=640
        )
        rec.value = float(min(md.q_xy, md.q_yx))
        rec.passed = _passes("rigidity_min_q", rec.value)
        if not rec.passed:
            rec.witness_ref = _write_witness(cfg, rec, {"X": x, "Y": y})
    self_dev = abs(quasiorder.q_value(x, x, method="scan").q - 1.0)
    out = [rec, _record(cfg, i, seed, dim, None, "self_q_dev", self_dev)]
    return out


def _run_squaring(cfg: ExperimentConfig, i: int) -> list[TrialRecord]:
    dim = _trial_dim(cfg, i)
    seed = derive_seed(cfg.seed, cfg.suite, i)
    x, y = random_pair(_spec_for(cfg, dim, seed))
    # scale X so the first relation holds by construction (q is homogeneous)
    q0 = quasiorder.q_value(x, y, method="scan").q
    u = np.random.default_rng(derive_seed(seed, "u")).uniform(0.0, 1.0)
    x = x.scaled((1.0 + u) / q0)
    chk = quasiorder.squaring_check(x, y, qo_tol=cfg.tolerances.qo_tol, method="scan")
    rec = _record(cfg, i, seed, dim, None, "squaring_q2", chk.q2)
    if not rec.passed:
        rec.witness_ref = _write_witness(cfg, rec, {"X": x, "Y": y})
    return [rec]


def _run_loewner(cfg: ExperimentConfig, i: int) -> list[TrialRecord]:
    dim = _trial_dim(cfg, i)
    seed = derive_seed(cfg.seed, cfg.suite, i)
    y = random_pd(_spec_for(cfg, dim, derive_seed(seed, "Y")))
    rng = np.random.default_rng(derive_seed(seed, "psd"))
    g = rng.standard_normal((dim, dim + 1))
    psd = g @ g.T / (dim + 1)
    x = PDMatrix(y.entries + rng.uniform(0.0, 1.0) * psd)
    q = quasiorder.q_value(x, y, qo_tol=cfg.tolerances.qo_tol, method="scan").q
    rec = _record(cfg, i, seed, dim, None, "loewner_quasi_q", q)
    if not rec.passed:
        rec.witness_ref = _write_witness(cfg, rec, {"X": x, "Y": y})
    return [rec]


def _run_block(cfg: ExperimentConfig, i: int) -> list[TrialRecord]:
    """Block-vs-Schur agreement on triples at controlled scale.

    B gets singular values in [0.5, 1] and C stays near the identity so a
    1e-8 boundary perturbation of A cannot be washed out by the congruence
    factor relating the two routes (nor drive A itself indefinite).
    """
    dim = _trial_dim(cfg, i)
    seed = derive_seed(cfg.seed, cfg.suite, i)
    rng = np.random.default_rng(derive_seed(seed, "blk"))
    c = random_pd(EnsembleSpec("near_identity", dim, 16.0, derive_seed(seed, "C"), 0.2))
    qmat = random_orthogonal(dim, derive_seed(seed, "Q"))
    dvals = rng.uniform(0.5, 1.0, size=dim) * rng.choice([-1.0, 1.0], size=dim)
    b = (qmat * dvals) @ qmat.T
    b = (b + b.T) / 2.0
    core = b @ np.linalg.solve(c.entries, b)
    if i % 2 == 0:
        a = random_pd(_spec_for(cfg, dim, derive_seed(seed, "A")))
    else:
        # boundary: A sits a hair above or below B C^{-1} B
        eps = 1e-8 if i % 4 == 1 else -1e-8
        a = PDMatrix((core + core.T) / 2.0 + eps * np.eye(dim))
    chk = quasiorder.block_pd_check(a, b, c, order_tol=cfg.tolerances.order_tol)
    agree = 1.0 if chk.block_psd == chk.schur_psd else 0.0
    rec = _record(cfg, i, seed, dim, None, "block_schur_agree", agree)
    if not rec.passed:
        rec.witness_ref = _write_witness(cfg, rec, {"A": a, "B_raw": b, "C": c})
    return [rec]


def _run_proofcheck(cfg: ExperimentConfig, i: int) -> list[TrialRecord]:
    dim = _trial_dim(cfg, i)
    seed = derive_seed(cfg.seed, cfg.suite, i)
    z = random_pd(_spec_for(cfg, dim, derive_seed(seed, "Z")))
    t_grid = np.geomspace(0.1, 10.0, 8)
    r_grid = cfg.r_values if cfg.r_values else list(_POW_R_GRID)
    out = []
    scale = max(1.0, z.fro_norm())

    resid = 0.0
    sqrt_viol = 0.0
    pow_viol = 0.0
    for t in t_grid:
        ru, rl = proofcheck.difference_identity(z, float(t))
        resid = max(resid, ru / scale, rl / scale)
        sqrt_viol = max(sqrt_viol, *(e.lhs for e in proofcheck.sqrt_sandwich(z, float(t))))
        for r in r_grid:
            pow_viol = max(
                pow_viol, *(e.lhs for e in proofcheck.power_sandwich(z, float(r), float(t)))
            )
    out.append(_record(cfg, i, seed, dim, None, "diff_resid", resid))
    out.append(_record(cfg, i, seed, dim, None, "sqrt_sandwich_violation", sqrt_viol))
    out.append(_record(cfg, i, seed, dim, None, "pow_sandwich_violation", pow_viol))

    rank = 1 + i % (dim - 1)
    p = random_projection(dim, rank, derive_seed(seed, "P"))
    _, _, schur_resid = proofcheck.schur_complement(z, p)
    out.append(_record(cfg, i, seed, dim, None, "schur_resid", schur_resid))

    y = mat_power(z, 0.5)
    w_norm = 1.0 / np.sqrt(z.lambda_min)
    lhs_max = 0.0
    fine_ratio = 0.0
    final_rhs = []
    for n in _PARTITION_SIZES:
        part = proofcheck.build_partition(z, n)
        fine_ratio = max(fine_ratio, part.fineness * n / w_norm)
        ledger = proofcheck.partition_bounds(y, z, part)
        for bid in ("3", "5", "6", "7"):
            lhs_max = max(lhs_max, *(e.lhs for e in ledger.by_id(bid)))
        final_rhs.append(ledger.by_id("final")[0].rhs)
    out.append(_record(cfg, i, seed, dim, None, "fineness_ratio", fine_ratio))
    out.append(_record(cfg, i, seed, dim, None, "partition_lhs_max", lhs_max))
    if dim >= 8:
        ratios = [b / a for a, b in zip(final_rhs, final_rhs[1:])]
        out.append(_record(cfg, i, seed, dim, None, "final_bound_ratio_max", max(ratios)))
    return out


# ---------------------------------------------------------------------------
# searches


@dataclass
class AgSearchOutcome:
    """Result of a hunt for a violation of the affine bound by a candidate."""

    witness_path: str | None
    trials_run: int
    best_gap: float
    found: bool
    exhausted: bool


def search_ag_violation(cfg: ExperimentConfig) -> AgSearchOutcome:
    """First sampled pair where the candidate's gap is robustly negative.

    Detection threshold is SEARCH_DETECT_TOL * scale; a hit only counts if
    it also survives the 10x tightened threshold after a JSON round-trip of
    the matrices (guarding against serialization softening the violation).
    """
    cfg.validate()
    r = cfg.r_values[0]
    cand = means.MeanCandidate(cfg.candidate, r)
    best_gap = np.inf
    for i in range(cfg.trials):
        seed = derive_seed(cfg.seed, "search_ag", i)
        dim = _trial_dim(cfg, i)
        a, b = random_pair(_spec_for(cfg, dim, seed))
        rep = inequalities.ag_gap(cand, a, b, order_tol=cfg.tolerances.order_tol)
        normalized = rep.gap / rep.scale
        best_gap = min(best_gap, normalized)
        if normalized < -SEARCH_DETECT_TOL:
            a2 = PDMatrix.from_json_dict(a.to_json_dict())
            b2 = PDMatrix.from_json_dict(b.to_json_dict())
            rep2 = inequalities.ag_gap(cand, a2, b2, order_tol=cfg.tolerances.order_tol)
            if rep2.gap / rep2.scale < -SEARCH_VERIFY_FACTOR * SEARCH_DETECT_TOL:
                rec = _record(cfg, i, seed, dim, r, "ag_gap_normalized", normalized)
                path = _write_witness(cfg, rec, {"A": a, "B": b})
                return AgSearchOutcome(path, i + 1, float(normalized), True, False)
    return AgSearchOutcome(None, cfg.trials, float(best_gap), False, True)


def _run_search_ag(cfg: ExperimentConfig) -> tuple[list[TrialRecord], dict]:
    outcome = search_ag_violation(cfg)
    seed = derive_seed(cfg.seed, "search_ag", "summary")
    r = cfg.r_values[0]
    dim = cfg.dims[0]
    records = [
        TrialRecord(
            cfg.suite, 0, seed, dim, r, "search_found", float(outcome.found), True,
            outcome.witness_path,
        ),
        TrialRecord(cfg.suite, 0, seed, dim, r, "search_best_gap", outcome.best_gap, True),
        TrialRecord(cfg.suite, 0, seed, dim, r, "search_trials", float(outcome.trials_run), True),
    ]
    extra = {
        "found": outcome.found,
        "exhausted": outcome.exhausted,
        "trials_run": outcome.trials_run,
        "witness_path": outcome.witness_path,
    }
    return records, extra


def _run_search_transitivity(cfg: ExperimentConfig) -> tuple[list[TrialRecord], dict]:
    result = quasiorder.transitivity_search(
        cfg.dims,
        cfg.trials,
        cfg.seed,
        margin=cfg.margin,
        ensemble=cfg.ensemble,
        condition_cap=cfg.condition_cap,
        eps=cfg.eps,
        qo_tol=cfg.tolerances.qo_tol,
    )
    seed = derive_seed(cfg.seed, "search_transitivity")
    dim = cfg.dims[0]
    found = result.witness is not None
    records = [
        TrialRecord(cfg.suite, 0, seed, dim, None, "transitivity_found", float(found), True),
        TrialRecord(cfg.suite, 0, seed, dim, None, "third_q_min", result.third_q_min, True),
        TrialRecord(
            cfg.suite, 0, seed, dim, None, "search_trials", float(result.trials_run), True
        ),
    ]
    report = {
        "found": found,
        "trials_run": result.trials_run,
        "candidates": result.candidates,
        "margin": result.margin,
        "qo_tol": cfg.tolerances.qo_tol,
        "verification": {"method": "both", "grid_points": 10 * quasiorder.DEFAULT_GRID_POINTS},
        "third_q_min": result.third_q_min,
        "hist_edges": result.hist_edges,
        "hist_counts": result.hist_counts,
    }
    if result.witness is not None:
        w = result.witness
        report["witness"] = {
            "X": w.x.to_json_dict(),
            "Y": w.y.to_json_dict(),
            "W": w.w.to_json_dict(),
            "q_xy": w.q_xy,
            "q_yw": w.q_yw,
            "q_xw": w.q_xw,
        }
    path = Path(cfg.out_path).with_suffix(".search.json")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    records[0].witness_ref = str(path)
    return records, {"found": found, "report_path": str(path), **report}


# ---------------------------------------------------------------------------
# witnesses


def _witness_path(cfg: ExperimentConfig, rec: TrialRecord) -> Path:
    stem = Path(cfg.out_path)
    return stem.parent / f"{stem.stem}_witness_{rec.quantity_name}_{rec.trial_index}.json"


def _write_witness(cfg: ExperimentConfig, rec: TrialRecord, matrices: dict) -> str:
    payload = {
        "suite": cfg.suite,
        "trial_index": rec.trial_index,
        "seed": rec.seed,
        "dim": rec.dim,
        "r": rec.r,
        "quantity_name": rec.quantity_name,
        "value": float(rec.value),
        "config": {
            "suite": cfg.suite,
            "dims": list(cfg.dims),
            "r_values": list(cfg.r_values),
            "trials": cfg.trials,
            "seed": cfg.seed,
            "ensemble": cfg.ensemble,
            "condition_cap": cfg.condition_cap,
            "eps": cfg.eps,
            "candidate": cfg.candidate,
            "margin": cfg.margin,
            "tolerances": asdict(cfg.tolerances),
        },
        "matrices": {
            k: (m.to_json_dict() if isinstance(m, PDMatrix) else {"rows": m.tolist()})
            for k, m in matrices.items()
        },
    }
    path = _witness_path(cfg, rec)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, sort_keys=True) + "\n")
    return str(path)


def reverify_witness(path: str) -> tuple[float, float]:
    """Re-run the witnessed trial from its stored configuration.

    Returns (stored value, recomputed value); determinism makes the two
    match to well below 1e-12.
    """
    payload = json.loads(Path(path).read_text())
    cfgd = payload["config"]
    cfg = ExperimentConfig(
        suite=cfgd["suite"],
        dims=list(cfgd["dims"]),
        r_values=list(cfgd["r_values"]),
        trials=cfgd["trials"],
        seed=cfgd["seed"],
        tolerances=Tolerances(**cfgd["tolerances"]),
        ensemble=cfgd["ensemble"],
        condition_cap=cfgd["condition_cap"],
        eps=cfgd["eps"],
        candidate=cfgd["candidate"],
        margin=cfgd["margin"],
        out_path="/dev/null",
    )
    if cfg.suite == "search_ag":
        r = payload["r"]
        cand = means.MeanCandidate(cfg.candidate, r)
        a = PDMatrix.from_json_dict(payload["matrices"]["A"])
        b = PDMatrix.from_json_dict(payload["matrices"]["B"])
        rep = inequalities.ag_gap(cand, a, b, order_tol=cfg.tolerances.order_tol)
        return payload["value"], rep.gap / rep.scale
    runner = _TRIAL_RUNNERS[cfg.suite]
    records = runner(cfg, payload["trial_index"])
    for rec in records:
        if rec.quantity_name == payload["quantity_name"]:
            return payload["value"], rec.value
    raise ConfigError(f"quantity {payload['quantity_name']!r} not produced by re-run")


_TRIAL_RUNNERS = {
    "dual": _run_dual,
    "axioms": _run_axioms,
    "ag": _run_ag,
    "certificates": _run_certificates,
    "quasiorder": _run_quasiorder,
    "rigidity": _run_rigidity,
    "squaring": _run_squaring,
    "loewner": _run_loewner,
    "block": _run_block,
    "proofcheck": _run_proofcheck,
}


# ---------------------------------------------------------------------------
# top-level entry points


def run_suite(cfg: ExperimentConfig, workers: int = 1) -> Summary:
    """Execute a campaign, write its JSONL report, and summarize.

    Deterministic given cfg; workers only changes wall-clock time because
    trials are pure functions of (cfg, index) and records are sorted.
    """
    cfg.validate()
    if cfg.suite == "search_ag":
        records, extra = _run_search_ag(cfg)
    elif cfg.suite == "search_transitivity":
        records, extra = _run_search_transitivity(cfg)
    else:
        runner = _TRIAL_RUNNERS[cfg.suite]
        extra = {}
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                chunks = list(pool.map(lambda i: runner(cfg, i), range(cfg.trials)))
        else:
            chunks = [runner(cfg, i) for i in range(cfg.trials)]
        records = [rec for chunk in chunks for rec in chunk]
    records.sort(key=lambda rec: (rec.trial_index, rec.quantity_name))
    emit_report(records, jsonl_path=cfg.out_path)
    return summarize(cfg.suite, records, cfg.out_path, extra)


def summarize(suite: str, records: list[TrialRecord], out_path, extra=None) -> Summary:
    ranges: dict = {}
    witnesses = []
    failed = 0
    for rec in records:
        lo, hi = ranges.get(rec.quantity_name, (np.inf, -np.inf))
        ranges[rec.quantity_name] = (min(lo, rec.value), max(hi, rec.value))
        if not rec.passed:
            failed += 1
        if rec.witness_ref:
            witnesses.append(rec.witness_ref)
    return Summary(
        suite=suite,
        total=len(records),
        passed=len(records) - failed,
        failed=failed,
        quantity_ranges=ranges,
        witness_paths=witnesses,
        out_path=str(out_path),
        extra=extra or {},
    )


def load_records(jsonl_path) -> list[TrialRecord]:
    """Read a JSONL report back into records (inverse of emit_report)."""
    records = []
    with Path(jsonl_path).open() as fh:
        for line in fh:
            d = json.loads(line)
            records.append(
                TrialRecord(
                    d["suite"], d["trial_index"], d["seed"], d["dim"], d["r"],
                    d["quantity_name"], d["value"], d["pass"], d["witness_ref"],
                )
            )
    return records


def emit_report(records: list[TrialRecord], jsonl_path=None, csv_path=None) -> str:
    """Write records as JSONL and/or CSV; floats round-trip exactly.

    Returns the one-line status: "all n passed" or "failed k/n".
    """
    ordered = sorted(records, key=lambda rec: (rec.suite, rec.trial_index, rec.quantity_name))
    if jsonl_path is not None:
        path = Path(jsonl_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w") as fh:
            for rec in ordered:
                fh.write(json.dumps(rec.to_json_dict()) + "\n")
    if csv_path is not None:
        path = Path(csv_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for rec in ordered:
                d = rec.to_json_dict()
                row = []
                for col in CSV_COLUMNS:
                    v = d[col]
                    row.append(f"{v:.17g}" if isinstance(v, float) else v)
                writer.writerow(row)
    failed = sum(1 for rec in ordered if not rec.passed)
    return f"failed {failed}/{len(ordered)}" if failed else f"all {len(ordered)} passed"
