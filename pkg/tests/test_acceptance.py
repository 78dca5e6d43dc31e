"""Acceptance suite: one test per acceptance criterion, each printing a
pass/fail line (run with -s to see them live).  Tolerances are pinned here
and match the verification campaigns' contracts; seeds are frozen so every
margin below is reproducible."""

import json
import time
from pathlib import Path

import numpy as np
import pytest

from agmean.harness import (
    ExperimentConfig,
    reverify_witness,
    run_suite,
)
from agmean.pdcore import PDMatrix
from agmean.quasiorder import q_value

SEED = 20260810


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


def _report(num, name, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {num} ({name}): {status} -- {detail}", flush=True)
    assert ok, f"criterion {num} ({name}): {detail}"


def _records(cfg):
    return [json.loads(line) for line in Path(cfg.out_path).read_text().splitlines()]


def _values(records, quantity):
    return [d["value"] for d in records if d["quantity_name"] == quantity]


def test_criterion_1_dual_form_identity(workdir):
    t0 = time.time()
    cfg = ExperimentConfig(
        suite="dual",
        dims=list(range(2, 11)),
        r_values=[0.3, 0.5, 0.9, 1.5, 2.0, 2.7, 3.0],
        trials=1000,
        seed=SEED,
        out_path=str(workdir / "c1.jsonl"),
    )
    run_suite(cfg)
    vals = _values(_records(cfg), "dual_rel_err")
    ok = len(vals) == 7000 and max(vals) <= 1e-9
    _report(
        1, "dual-form identity",
        ok, f"{len(vals)} trials, max rel err {max(vals):.3e} <= 1e-9 [{time.time()-t0:.0f}s]",
    )


def test_criterion_2_axiom_suite(workdir):
    t0 = time.time()
    cfg = ExperimentConfig(
        suite="axioms",
        dims=[2, 3, 4, 5, 6],
        r_values=[0.3, 0.5, 0.9, 1.5, 2.0, 2.7, 3.0],
        trials=10000,
        seed=SEED,
        condition_cap=40.0,
        out_path=str(workdir / "c2.jsonl"),
    )
    run_suite(cfg)
    recs = _records(cfg)
    homog = max(_values(recs, "homogeneity_rel_err"))
    inv = max(_values(recs, "inversion_rel_err"))
    comm = max(_values(recs, "commuting_rel_err"))
    ag = min(_values(recs, "ag_gap_normalized"))
    ok = homog <= 1e-9 and inv <= 1e-9 and comm <= 1e-9 and ag >= -1e-8
    _report(
        2, "r-mean axiom suite",
        ok,
        f"10^4 trials: homog {homog:.2e}, inv {inv:.2e}, comm {comm:.2e} (<=1e-9); "
        f"worst gap {ag:.2e} >= -1e-8 [{time.time()-t0:.0f}s]",
    )


def test_criterion_3_certificates(workdir):
    t0 = time.time()
    cfg = ExperimentConfig(
        suite="certificates",
        dims=[2, 3, 4, 5],
        r_values=[2.5, 1.5, 3.0, 1.2, 2.0],  # both branches: r >= 2 and 1 < r <= 2
        trials=1000,
        seed=SEED,
        condition_cap=50.0,
        out_path=str(workdir / "c3.jsonl"),
    )
    run_suite(cfg)
    vals = _values(_records(cfg), "certificate_min")
    ok = len(vals) == 1000 and min(vals) >= 1.0 - 1e-8
    _report(
        3, "vector-state certificates",
        ok, f"min product {min(vals):.12f} >= 1-1e-8 on 10^3 pairs [{time.time()-t0:.0f}s]",
    )


def test_criterion_4_method_agreement(workdir):
    t0 = time.time()
    cfg = ExperimentConfig(
        suite="quasiorder",
        dims=[2, 3, 4, 5, 6],
        trials=500,
        seed=SEED,
        condition_cap=50.0,
        out_path=str(workdir / "c4.jsonl"),
    )
    run_suite(cfg)
    vals = _values(_records(cfg), "method_agreement")
    ok = len(vals) == 500 and max(vals) <= 1e-6
    _report(
        4, "scan vs sphere agreement",
        ok, f"max |dq| {max(vals):.3e} <= 1e-6 on 500 pairs [{time.time()-t0:.0f}s]",
    )


def test_criterion_5_rigidity(workdir):
    t0 = time.time()
    cfg = ExperimentConfig(
        suite="rigidity",
        dims=[2, 3, 4, 5, 6],
        trials=10000,
        seed=SEED,
        out_path=str(workdir / "c5.jsonl"),
    )
    run_suite(cfg)
    recs = _records(cfg)
    min_qs = _values(recs, "rigidity_min_q")
    self_dev = max(_values(recs, "self_q_dev"))

    # spot-check that the sampled pairs really are separated
    from agmean.harness import _rigidity_pair, derive_seed

    seps = []
    for i in range(0, 200):
        x, y = _rigidity_pair(cfg, derive_seed(cfg.seed, cfg.suite, i), cfg.dims[i % 5], i)
        seps.append(
            np.linalg.norm(x.entries - y.entries, 2) / max(x.spectral_norm, y.spectral_norm)
        )
    ok = (
        len(min_qs) == 10000
        and max(min_qs) < 1.0
        and self_dev <= 1e-10
        and min(seps) >= 0.05
    )
    _report(
        5, "mutual-dominance rigidity",
        ok,
        f"10^4 separated pairs: max min-q {max(min_qs):.6f} < 1; "
        f"|q(X,X)-1| <= {self_dev:.2e} (<=1e-10); min separation {min(seps):.3f} "
        f"[{time.time()-t0:.0f}s]",
    )


def test_criterion_6_order_properties(workdir):
    t0 = time.time()
    lw = ExperimentConfig(
        suite="loewner", dims=[2, 3, 4, 5, 6, 7, 8], trials=10000, seed=SEED,
        out_path=str(workdir / "c6a.jsonl"),
    )
    run_suite(lw)
    lw_min = min(_values(_records(lw), "loewner_quasi_q"))

    sq = ExperimentConfig(
        suite="squaring", dims=[2, 3, 4, 5, 6], trials=10000, seed=SEED,
        out_path=str(workdir / "c6b.jsonl"),
    )
    run_suite(sq)
    sq_min = min(_values(_records(sq), "squaring_q2"))

    bl = ExperimentConfig(
        suite="block", dims=[2, 3, 4, 5, 6], trials=10000, seed=SEED,
        out_path=str(workdir / "c6c.jsonl"),
    )
    run_suite(bl)
    bl_vals = _values(_records(bl), "block_schur_agree")

    ok = lw_min >= 1.0 - 1e-8 and sq_min >= 1.0 - 1e-8 and min(bl_vals) == 1.0
    _report(
        6, "order-implication properties",
        ok,
        f"PSD-shift q min {lw_min:.10f}; squared-q min {sq_min:.10f}; "
        f"block/Schur agreement {int(sum(bl_vals))}/10000 (boundary cases included) "
        f"[{time.time()-t0:.0f}s]",
    )


def test_criterion_7_proof_machinery(workdir):
    t0 = time.time()
    cfg = ExperimentConfig(
        suite="proofcheck",
        dims=[6, 8],
        trials=1000,
        seed=SEED,
        condition_cap=16.0,
        out_path=str(workdir / "c7.jsonl"),
    )
    run_suite(cfg)
    recs = _records(cfg)
    diff = max(_values(recs, "diff_resid"))
    schur = max(_values(recs, "schur_resid"))
    fine = max(_values(recs, "fineness_ratio"))
    lhs = max(_values(recs, "partition_lhs_max"))
    mono = _values(recs, "final_bound_ratio_max")
    sandwiches = max(
        max(_values(recs, "sqrt_sandwich_violation")),
        max(_values(recs, "pow_sandwich_violation")),
    )
    ok = (
        diff <= 1e-10
        and schur <= 1e-10
        and fine <= 1.0 + 1e-12
        and lhs <= 1e-10
        and len(mono) == 500
        and max(mono) < 1.0
        and sandwiches <= 1e-10
    )
    _report(
        7, "proof-machinery bounds",
        ok,
        f"residuals {max(diff, schur):.2e} <= 1e-10 (10^3 samples); fineness ratio {fine:.6f}; "
        f"localized lhs {lhs:.2e}; final bound shrink ratio {max(mono):.3f} < 1; "
        f"sandwich violation {sandwiches:.2e} [{time.time()-t0:.0f}s]",
    )


def test_criterion_8_forced_falsification(workdir):
    t0 = time.time()
    hit = ExperimentConfig(
        suite="search_ag", dims=[2, 3], r_values=[3.0], trials=100000, seed=SEED,
        candidate="naive_power", out_path=str(workdir / "c8a.jsonl"),
    )
    s_hit = run_suite(hit)
    found = s_hit.extra["found"]
    stored, recomputed = (np.nan, np.nan)
    robust = False
    if found:
        stored, recomputed = reverify_witness(s_hit.extra["witness_path"])
        robust = stored < -1e-5 and abs(stored - recomputed) <= 1e-12

    miss = ExperimentConfig(
        suite="search_ag", dims=[2, 3], r_values=[2.0], trials=100000, seed=SEED,
        candidate="naive_power", out_path=str(workdir / "c8b.jsonl"),
    )
    s_miss = run_suite(miss)
    exhausted = s_miss.extra["exhausted"] and not s_miss.extra["found"]

    ok = found and robust and exhausted
    _report(
        8, "uniqueness-forced falsification",
        ok,
        f"r=3 witness at trial {s_hit.extra['trials_run']} (gap {stored:.3e}, reverify "
        f"delta {abs(stored - recomputed):.1e}); r=2 exhausted {s_miss.extra['trials_run']} "
        f"trials [{time.time()-t0:.0f}s]",
    )


def test_criterion_9_determinism(workdir):
    t0 = time.time()
    out = workdir / "c9.jsonl"
    cfg = ExperimentConfig(
        suite="dual", dims=[2, 5], r_values=[0.5, 2.7], trials=200, seed=SEED,
        out_path=str(out),
    )
    run_suite(cfg)
    first = out.read_bytes()
    run_suite(cfg)
    rerun_same = out.read_bytes() == first

    out2 = workdir / "c9w.jsonl"
    cfg2 = ExperimentConfig(
        suite="axioms", dims=[2, 3], r_values=[0.5, 2.0], trials=60, seed=SEED,
        out_path=str(out2),
    )
    run_suite(cfg2, workers=1)
    seq = out2.read_bytes()
    run_suite(cfg2, workers=4)
    pool_same = out2.read_bytes() == seq

    ok = rerun_same and pool_same
    _report(
        9, "byte-identical determinism",
        ok, f"rerun identical: {rerun_same}; pool(4) == pool(1): {pool_same} "
        f"[{time.time()-t0:.0f}s]",
    )


def test_criterion_10_transitivity_campaign(workdir):
    t0 = time.time()
    cfg = ExperimentConfig(
        suite="search_transitivity", dims=[2, 3], trials=2000, seed=SEED,
        condition_cap=50.0, margin=1e-4, out_path=str(workdir / "c10.jsonl"),
    )
    summary = run_suite(cfg)
    report_path = Path(summary.extra["report_path"])
    report = json.loads(report_path.read_text())
    completed = report_path.exists() and summary.failed == 0

    margin_ok = True
    detail = f"campaign completed ({report['candidates']} candidate triples)"
    if report["found"]:
        w = report["witness"]
        x = PDMatrix.from_json_dict(w["X"])
        y = PDMatrix.from_json_dict(w["Y"])
        ww = PDMatrix.from_json_dict(w["W"])
        kwargs = dict(method="both", grid_points=640)
        q_xy = q_value(x, y, **kwargs).q
        q_yw = q_value(y, ww, **kwargs).q
        q_xw = q_value(x, ww, **kwargs).q
        margin_ok = q_xy >= 1.0 + 1e-4 and q_yw >= 1.0 + 1e-4 and q_xw < 1.0 - 1e-4
        detail = (
            f"witness found and re-verified at margin 1e-4: "
            f"q(X,Y)={q_xy:.6f}, q(Y,W)={q_yw:.6f}, q(X,W)={q_xw:.6f}"
        )
    ok = completed and margin_ok
    _report(10, "transitivity campaign", ok, f"{detail} [{time.time()-t0:.0f}s]")
