"""Vector-state quasi-order on positive-definite matrices.

q(X, Y) is the minimum over unit vectors of <X v, v> <Y^{-1} v, v>; the
relation "X above Y" means q >= 1.  It is weaker than the semidefinite
order, and mutual dominance is rigid: it forces X = Y.

q is computed two ways.  The primary route exchanges the minimization over
vectors with a one-dimensional minimization over a scale parameter t
(legitimate because min-min commutes and t x + y/t has the closed minimum
2 sqrt(xy)), leaving q = (min_t lambda_min(t X + t^{-1} Y^{-1}) / 2)^2.
The scan over t is a log grid refined by golden section.  The independent
oracle is multi-start projected-gradient minimization on the unit sphere.
Both routes approach q from above.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimMismatch, ScanBracketFailure
from .pdcore import (
    DEFAULT_ORDER_TOL,
    EnsembleSpec,
    PDMatrix,
    UnitVector,
    check_dims,
    derive_seed,
    mat_power,
    random_pd,
)

DEFAULT_QO_TOL = 1e-8
DEFAULT_GRID_POINTS = 64
_BRACKET_WIDEN = 4.0
_RESCAN_BAND = 1e-3
_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass
class QuasiOrderReport:
    """Result of one q(X, Y) evaluation.

    q_scan and q_sphere are the two routes; q is the scan value (the
    primary route).  xi_star is the best minimizing unit vector found and
    t_star the minimizing scale.  method_agreement is |q_scan - q_sphere|
    (NaN when the sphere route was skipped).
    """

    q: float
    xi_star: UnitVector
    t_star: float
    method_agreement: float
    holds: bool
    q_scan: float
    q_sphere: float


def _golden_min(f, a: float, b: float, tol: float = 1e-12, max_iter: int = 96):
    """Golden-section minimum of a unimodal f on [a, b]; returns (x, f(x))."""
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol * max(abs(a), abs(b), 1.0):
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def _scan_bracket(x: PDMatrix, y: PDMatrix) -> tuple[float, float]:
    lo = 1.0 / np.sqrt(x.spectral_norm * y.spectral_norm)
    hi = np.sqrt((1.0 / x.lambda_min) * (1.0 / y.lambda_min))
    return lo / _BRACKET_WIDEN, hi * _BRACKET_WIDEN


def _pencil_min(
    x_entries: np.ndarray, yinv: np.ndarray, lo: float, hi: float, grid_points: int
) -> tuple[float, float]:
    """Minimize g(t) = lambda_min(t X + t^{-1} Y^{-1}) over [lo, hi].

    Coarse log grid first (g can have several local minima), then golden
    section between the grid neighbours of the best point.  Returns
    (t_star, g(t_star)).  Raises ScanBracketFailure if the minimum sits on
    the widened bracket edge, which a valid input cannot produce.
    """
    ts = np.geomspace(lo, hi, grid_points)
    stack = ts[:, None, None] * x_entries + (1.0 / ts)[:, None, None] * yinv
    gvals = np.linalg.eigvalsh(stack)[:, 0]
    k = int(np.argmin(gvals))
    if k == 0 or k == grid_points - 1:
        raise ScanBracketFailure(
            f"scan minimum at bracket edge t={ts[k]:.3e}; input too ill-conditioned"
        )

    def g(t: float) -> float:
        return float(np.linalg.eigvalsh(t * x_entries + yinv / t)[0])

    t_star, g_star = _golden_min(g, ts[k - 1], ts[k + 1])
    if gvals[k] < g_star:
        t_star, g_star = float(ts[k]), float(gvals[k])
    return t_star, g_star


def _sphere_product(x_entries: np.ndarray, yinv: np.ndarray, v: np.ndarray) -> float:
    return float((v @ x_entries @ v) * (v @ yinv @ v))


def _rows_product(x_entries: np.ndarray, yinv: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.einsum("ni,ni->n", v @ x_entries, v) * np.einsum("ni,ni->n", v @ yinv, v)


def _sphere_descend_batch(
    x_entries: np.ndarray,
    yinv: np.ndarray,
    starts: np.ndarray,
    max_iter: int = 500,
    grad_tol: float = 1e-10,
) -> tuple[np.ndarray, np.ndarray]:
    """Projected-gradient descent of <Xv,v><Y^{-1}v,v> on the unit sphere,
    run on all start rows at once with per-row backtracking line search."""
    v = starts / np.linalg.norm(starts, axis=1, keepdims=True)
    fv = _rows_product(x_entries, yinv, v)
    step = np.full(v.shape[0], 1.0 / (np.linalg.norm(x_entries, 2) + np.linalg.norm(yinv, 2)))
    active = np.ones(v.shape[0], dtype=bool)
    for _ in range(max_iter):
        if not active.any():
            break
        va = v[active]
        xv = va @ x_entries
        yv = va @ yinv
        qx = np.einsum("ni,ni->n", va, xv)
        qy = np.einsum("ni,ni->n", va, yv)
        grad = 2.0 * qy[:, None] * xv + 2.0 * qx[:, None] * yv
        rgrad = grad - np.einsum("ni,ni->n", grad, va)[:, None] * va
        gnorm = np.linalg.norm(rgrad, axis=1)
        converged = gnorm <= grad_tol * np.maximum(1.0, np.abs(fv[active]))
        idx = np.nonzero(active)[0]
        active[idx[converged]] = False
        live = idx[~converged]
        if live.size == 0:
            continue
        rgrad = rgrad[~converged]
        gnorm2 = gnorm[~converged] ** 2
        alpha = step[live].copy()
        need = np.ones(live.size, dtype=bool)
        for _ in range(40):
            if not need.any():
                break
            w = v[live[need]] - alpha[need, None] * rgrad[need]
            w /= np.linalg.norm(w, axis=1, keepdims=True)
            fw = _rows_product(x_entries, yinv, w)
            ok = fw <= fv[live[need]] - 1e-4 * alpha[need] * gnorm2[need]
            take = live[need][ok]
            v[take] = w[ok]
            fv[take] = fw[ok]
            step[take] = alpha[need][ok] * 1.5
            stalled = need.copy()
            stalled[need] = ~ok
            alpha[stalled] *= 0.5
            need = stalled
        # rows whose line search stalled entirely are done improving
        active[live[need]] = False
    return v, fv


def _sphere_min(
    x: PDMatrix, y: PDMatrix, yinv: np.ndarray, n_random: int, seed: int
) -> tuple[np.ndarray, float]:
    dim = x.dim
    rng = np.random.default_rng(seed)
    starts = np.vstack(
        [x.eig.eigenvectors.T, y.eig.eigenvectors.T, rng.standard_normal((n_random, dim))]
    )
    v, fv = _sphere_descend_batch(x.entries, yinv, starts)
    k = int(np.argmin(fv))
    return v[k], float(fv[k])


def q_value(
    x: PDMatrix,
    y: PDMatrix,
    qo_tol: float = DEFAULT_QO_TOL,
    grid_points: int = DEFAULT_GRID_POINTS,
    n_random_starts: int = 8,
    method: str = "both",
    seed: int = 0,
) -> QuasiOrderReport:
    """q(X, Y) with the scan as primary value and the sphere as oracle.

    method is "both", "scan", or "sphere"; "scan" skips the sphere oracle
    (method_agreement becomes NaN), which the large verification campaigns
    rely on after the agreement suite has validated the scan.
    Near-boundary results (|q - 1| small) are re-scanned at 10x density.
    """
    check_dims(x, y)
    if method not in ("both", "scan", "sphere"):
        raise ValueError(f"unknown method {method!r}")
    yinv = mat_power(y, -1.0).entries
    lo, hi = _scan_bracket(x, y)

    t_star, g_star = _pencil_min(x.entries, yinv, lo, hi, grid_points)
    q_scan = (g_star / 2.0) ** 2
    if abs(q_scan - 1.0) < _RESCAN_BAND:
        t_star, g_star = _pencil_min(x.entries, yinv, lo, hi, 10 * grid_points)
        q_scan = (g_star / 2.0) ** 2

    pencil = t_star * x.entries + yinv / t_star
    vals, vecs = np.linalg.eigh((pencil + pencil.T) / 2.0)
    v_scan = vecs[:, 0]
    f_scan = _sphere_product(x.entries, yinv, v_scan)

    q_sphere = np.nan
    best_v, best_f = v_scan, f_scan
    if method in ("both", "sphere"):
        v_sph, q_sphere = _sphere_min(x, y, yinv, n_random_starts, seed)
        if q_sphere < best_f:
            best_v, best_f = v_sph, q_sphere

    q = q_sphere if method == "sphere" else q_scan
    agreement = abs(q_scan - q_sphere) if method == "both" else np.nan
    return QuasiOrderReport(
        q=float(q),
        xi_star=UnitVector(best_v),
        t_star=float(t_star),
        method_agreement=float(agreement),
        holds=bool(q >= 1.0 - qo_tol),
        q_scan=float(q_scan),
        q_sphere=float(q_sphere),
    )


def scale_scan(
    x: PDMatrix,
    y: PDMatrix,
    t_grid: np.ndarray | None = None,
    grid_points: int = DEFAULT_GRID_POINTS,
) -> tuple[float, float]:
    """Minimum over t of lambda_min(t X + (t Y)^{-1} - 2) and its witness t.

    Nonnegative exactly when q(X, Y) >= 1: the scaled family criterion and
    the vector-state product criterion are equivalent.
    """
    check_dims(x, y)
    yinv = mat_power(y, -1.0).entries
    if t_grid is not None:
        ts = np.asarray(t_grid, dtype=np.float64)
        if ts.ndim != 1 or ts.size < 2 or np.any(ts <= 0):
            raise ValueError("t_grid must be a positive 1-D grid")
        stack = ts[:, None, None] * x.entries + (1.0 / ts)[:, None, None] * yinv
        gvals = np.linalg.eigvalsh(stack)[:, 0]
        k = int(np.argmin(gvals))
        a = ts[max(k - 1, 0)]
        b = ts[min(k + 1, ts.size - 1)]

        def g(t: float) -> float:
            return float(np.linalg.eigvalsh(t * x.entries + yinv / t)[0])

        t_star, g_star = _golden_min(g, a, b)
        if gvals[k] < g_star:
            t_star, g_star = float(ts[k]), float(gvals[k])
    else:
        lo, hi = _scan_bracket(x, y)
        t_star, g_star = _pencil_min(x.entries, yinv, lo, hi, grid_points)
    return float(g_star - 2.0), float(t_star)


class MutualDominance(NamedTuple):
    q_xy: float
    q_yx: float
    forced_equal: bool


def mutual_dominance(
    x: PDMatrix,
    y: PDMatrix,
    qo_tol: float = DEFAULT_QO_TOL,
    method: str = "scan",
    grid_points: int = DEFAULT_GRID_POINTS,
) -> MutualDominance:
    """q in both directions; forced_equal means both sides are at least one.

    Mutual dominance is only possible for equal matrices, so forced_equal
    together with a genuinely separated pair would falsify the rigidity
    property (the test suite asserts the implication).
    """
    q_xy = q_value(x, y, qo_tol=qo_tol, method=method, grid_points=grid_points).q
    q_yx = q_value(y, x, qo_tol=qo_tol, method=method, grid_points=grid_points).q
    forced = (q_xy >= 1.0 - qo_tol) and (q_yx >= 1.0 - qo_tol)
    return MutualDominance(q_xy, q_yx, forced)


class SquaringCheck(NamedTuple):
    q1: float
    q2: float
    consistent: bool


def squaring_check(
    x: PDMatrix, y: PDMatrix, qo_tol: float = DEFAULT_QO_TOL, method: str = "scan"
) -> SquaringCheck:
    """Dominance must survive squaring: q(X,Y) >= 1 implies q(X^2,Y^2) >= 1."""
    q1 = q_value(x, y, qo_tol=qo_tol, method=method).q
    q2 = q_value(mat_power(x, 2.0), mat_power(y, 2.0), qo_tol=qo_tol, method=method).q
    consistent = (q1 < 1.0 - qo_tol) or (q2 >= 1.0 - qo_tol)
    return SquaringCheck(q1, q2, consistent)


def loewner_implies_quasi(
    x: PDMatrix, y: PDMatrix, qo_tol: float = DEFAULT_QO_TOL, method: str = "scan"
) -> bool:
    """True when q(X, Y) >= 1 up to slack; must hold whenever X - Y is PSD."""
    return q_value(x, y, qo_tol=qo_tol, method=method).holds


class BlockPdCheck(NamedTuple):
    block_psd: bool
    schur_psd: bool


def block_pd_check(
    a: PDMatrix, b: np.ndarray, c: PDMatrix, order_tol: float = DEFAULT_ORDER_TOL
) -> BlockPdCheck:
    """Positivity of [[A, B], [B, C]] against positivity of A - B C^{-1} B.

    The two answers agree for symmetric B: the block matrix is PSD exactly
    when the compressed difference is.
    """
    check_dims(a, c)
    bm = np.asarray(b, dtype=np.float64)
    if bm.shape != (a.dim, a.dim):
        raise DimMismatch(f"B has shape {bm.shape}, expected {(a.dim, a.dim)}")
    bm = (bm + bm.T) / 2.0
    block = np.block([[a.entries, bm], [bm, c.entries]])
    block_min = float(np.linalg.eigvalsh((block + block.T) / 2.0)[0])
    block_scale = float(np.linalg.norm(block, 2))

    cinv_b = np.linalg.solve(c.entries, bm)
    schur = a.entries - bm @ cinv_b
    schur_min = float(np.linalg.eigvalsh((schur + schur.T) / 2.0)[0])
    schur_scale = max(a.spectral_norm, float(np.linalg.norm(bm @ cinv_b, 2)))

    return BlockPdCheck(
        block_min >= -order_tol * block_scale,
        schur_min >= -order_tol * schur_scale,
    )


@dataclass
class TransitivityWitness:
    x: PDMatrix
    y: PDMatrix
    w: PDMatrix
    q_xy: float
    q_yw: float
    q_xw: float


@dataclass
class TransitivitySearchResult:
    """Outcome of a transitivity search campaign.

    witness is None when the budget ran out; third_q_min/histogram summarize
    the distribution of q(X, W) over candidate triples whose first two
    relations were pinned just above one.
    """

    witness: TransitivityWitness | None
    trials_run: int
    candidates: int
    third_q_min: float
    hist_edges: list[float]
    hist_counts: list[int]
    margin: float


def transitivity_search(
    dims: list[int],
    trials: int,
    seed: int,
    margin: float = 1e-4,
    ensemble: str = "wishart",
    condition_cap: float = 50.0,
    eps: float = 0.1,
    qo_tol: float = DEFAULT_QO_TOL,
) -> TransitivitySearchResult:
    """Search for a failure of transitivity of the quasi-order.

    Triples are sampled and then rescaled using q's homogeneity in its
    first argument (q(sX, Y) = s q(X, Y)) so that q(X, Y) and q(Y, W) sit
    exactly at 1 + 2*margin; the third relation q(X, W) is then measured.
    A triple with q(X, W) < 1 - margin is re-verified at 10x scan density
    with the sphere oracle before being reported.
    """
    third_qs = []
    witness = None
    trials_run = 0
    for i in range(trials):
        trials_run = i + 1
        dim = dims[i % len(dims)]
        base = derive_seed(seed, "trans", i)
        x = random_pd(EnsembleSpec(ensemble, dim, condition_cap, derive_seed(base, "X"), eps))
        y = random_pd(EnsembleSpec(ensemble, dim, condition_cap, derive_seed(base, "Y"), eps))
        w = random_pd(EnsembleSpec(ensemble, dim, condition_cap, derive_seed(base, "W"), eps))
        q_xy = q_value(x, y, method="scan").q
        q_yw = q_value(y, w, method="scan").q
        x2 = x.scaled((1.0 + 2.0 * margin) / q_xy)
        w2 = w.scaled(q_yw / (1.0 + 2.0 * margin))
        q_xw = q_value(x2, w2, method="scan").q
        third_qs.append(q_xw)
        if q_xw < 1.0 - margin:
            verified = _verify_triple(x2, y, w2, margin, qo_tol)
            if verified is not None:
                witness = verified
                break
    qs = np.asarray(third_qs)
    counts, edges = np.histogram(qs, bins=24) if qs.size else (np.array([]), np.array([]))
    return TransitivitySearchResult(
        witness=witness,
        trials_run=trials_run,
        candidates=len(third_qs),
        third_q_min=float(qs.min()) if qs.size else np.nan,
        hist_edges=[float(e) for e in edges],
        hist_counts=[int(c) for c in counts],
        margin=margin,
    )


def _verify_triple(
    x: PDMatrix, y: PDMatrix, w: PDMatrix, margin: float, qo_tol: float
) -> TransitivityWitness | None:
    """Re-check a candidate triple at tightened settings before reporting."""
    kwargs = dict(method="both", grid_points=10 * DEFAULT_GRID_POINTS, qo_tol=qo_tol)
    q_xy = q_value(x, y, **kwargs).q
    q_yw = q_value(y, w, **kwargs).q
    q_xw = q_value(x, w, **kwargs).q
    if q_xy >= 1.0 + margin and q_yw >= 1.0 + margin and q_xw < 1.0 - margin:
        return TransitivityWitness(x, y, w, q_xy, q_yw, q_xw)
    return None
