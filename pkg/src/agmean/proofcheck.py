"""Numerical checks for the quantitative chain behind the rigidity result.

The chain starts from two-sided rational sandwiches of Z^{1/2} (and of Z^r
for the 0 < r < 1 branch), factors their widths explicitly, localizes them
on spectral blocks of Z, and assembles an explicit bound on ||Y - Z^{1/2}||
that shrinks as the spectral partition refines.  Steps are numbered 3..7
in the order they chain together; "final" is the assembled bound.

The chain's unspecified constants are realized here as computable spectral
suprema of the explicitly factored widths, so every recorded bound is
checkable rather than existential.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidR, PartitionMismatch, RankError
from .pdcore import PDMatrix, Projection, check_dims, mat_power

BOUND_SLACK = 1e-10


@dataclass(frozen=True)
class BoundEntry:
    """One recorded inequality: lhs <= rhs at parameter t_or_n."""

    bound_id: str
    param: float
    lhs: float
    rhs: float
    satisfied: bool

    def to_json_dict(self) -> dict:
        return {
            "bound_id": self.bound_id,
            "param": float(self.param),
            "lhs": float(self.lhs),
            "rhs": float(self.rhs),
            "satisfied": bool(self.satisfied),
        }


@dataclass
class BoundLedger:
    entries: list[BoundEntry] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add(self, bound_id: str, param: float, lhs: float, rhs: float, scale: float):
        self.entries.append(
            BoundEntry(bound_id, param, lhs, rhs, lhs <= rhs + BOUND_SLACK * scale)
        )

    @property
    def all_satisfied(self) -> bool:
        return all(e.satisfied for e in self.entries)

    def by_id(self, bound_id: str) -> list[BoundEntry]:
        return [e for e in self.entries if e.bound_id == bound_id]


@dataclass(frozen=True)
class SpectralPartition:
    """Spectral projections of Z binned by the spectrum of Z^{-1/2}.

    n is the requested bin count (empty bins are dropped, so there may be
    fewer projections); lambdas holds one actual eigenvalue of Z^{-1/2}
    per kept block; fineness = max_i ||(lambda_i - Z^{-1/2}) P_i|| and is
    at most ||Z^{-1/2}|| / n by construction.
    """

    projections: list[Projection]
    lambdas: list[float]
    n: int
    fineness: float


def _op_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, 2))


def _sym_gap(lower: np.ndarray, upper: np.ndarray) -> float:
    """lambda_min(upper - lower); nonnegative means lower <= upper."""
    d = upper - lower
    return float(np.linalg.eigvalsh((d + d.T) / 2.0)[0])


def sqrt_sandwich(z: PDMatrix, t: float) -> list[BoundEntry]:
    """Check 2tZ(t^2 Z + 1)^{-1} <= Z^{1/2} <= (t^2 Z + 1) / (2t).

    All three operators commute (functions of Z), and both gaps close at
    t = lambda^{-1/2} on the corresponding eigenvector.
    """
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    vals = z.eig.eigenvalues
    lower = z.apply_values(2.0 * t * vals / (t * t * vals + 1.0))
    mid = z.apply_values(np.sqrt(vals))
    upper = z.apply_values((t * t * vals + 1.0) / (2.0 * t))
    scale = _op_norm(upper)
    ledger = BoundLedger()
    ledger.add("sqrt.lower", t, -_sym_gap(lower, mid), 0.0, scale)
    ledger.add("sqrt.upper", t, -_sym_gap(mid, upper), 0.0, scale)
    return ledger.entries


def difference_identity(z: PDMatrix, t: float) -> tuple[float, float]:
    """Residuals of the two factored sandwich widths.

    upper: (t^2 Z + 1)/(2t) - 2tZ(t^2 Z + 1)^{-1}
           = (t - Z^{-1/2})^2 Z^2 (t + Z^{-1/2})^2 / (2t (t^2 Z + 1))
    lower: same with Z in place of Z^2 (the width of the inverse sandwich).
    Returns Frobenius norms of LHS - RHS for both, which vanish identically.
    """
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    vals = z.eig.eigenvalues
    w = 1.0 / np.sqrt(vals)
    denom = 2.0 * t * (t * t * vals + 1.0)

    lhs_upper = (t * t * vals + 1.0) / (2.0 * t) - 2.0 * t * vals / (t * t * vals + 1.0)
    rhs_upper = (t - w) ** 2 * vals**2 * (t + w) ** 2 / denom
    lhs_lower = (t * t * vals + 1.0) / (2.0 * t * vals) - 2.0 * t / (t * t * vals + 1.0)
    rhs_lower = (t - w) ** 2 * vals * (t + w) ** 2 / denom

    res_upper = np.linalg.norm(z.apply_values(lhs_upper) - z.apply_values(rhs_upper))
    res_lower = np.linalg.norm(z.apply_values(lhs_lower) - z.apply_values(rhs_lower))
    return float(res_upper), float(res_lower)


def schur_complement(y: PDMatrix, p: Projection) -> tuple[np.ndarray, np.ndarray, float]:
    """Compressed-inverse identity on range(P).

    lhs = (P Y^{-1} P)^{-1} and rhs = P Y P - P Y P'(P' Y P')^{-1} P' Y P,
    both expressed in the orthonormal basis carried by P (P' is the
    complement).  Returns (lhs, rhs, relative Frobenius residual).
    """
    if p.dim != y.dim:
        raise PartitionMismatch(f"projection dim {p.dim} != matrix dim {y.dim}")
    if p.rank == 0 or p.rank >= y.dim:
        raise RankError(f"need 0 < rank < {y.dim}, got {p.rank}")
    u = p.basis
    v = p.complement_basis()
    yinv = mat_power(y, -1.0).entries
    lhs = np.linalg.inv(u.T @ yinv @ u)
    y_uu = u.T @ y.entries @ u
    y_uv = u.T @ y.entries @ v
    y_vv = v.T @ y.entries @ v
    rhs = y_uu - y_uv @ np.linalg.solve(y_vv, y_uv.T)
    residual = float(np.linalg.norm(lhs - rhs) / np.linalg.norm(lhs))
    return lhs, rhs, residual


def build_partition(z: PDMatrix, n: int) -> SpectralPartition:
    """Bin the spectrum of Z^{-1/2} into n half-open intervals of equal width.

    Eigenvectors of Z whose Z^{-1/2} eigenvalue lands in the same interval
    form one projection; the representative lambda is an actual eigenvalue
    inside the bin, so the fineness bound ||Z^{-1/2}||/n holds by
    construction.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    vals = z.eig.eigenvalues
    vecs = z.eig.eigenvectors
    mus = 1.0 / np.sqrt(vals)
    h = float(np.max(mus)) / n
    bins = np.clip(np.ceil(mus / h).astype(int) - 1, 0, n - 1)
    projections, lambdas = [], []
    fineness = 0.0
    for k in sorted(set(bins.tolist())):
        idx = np.nonzero(bins == k)[0]
        block_mus = mus[idx]
        rep = float(block_mus[np.argmin(np.abs(block_mus - (k + 0.5) * h))])
        projections.append(Projection(vecs[:, idx]))
        lambdas.append(rep)
        fineness = max(fineness, float(np.max(np.abs(block_mus - rep))))
    return SpectralPartition(projections, lambdas, n, fineness)


def _width_factors(z_vals: np.ndarray, ts: np.ndarray) -> tuple[float, float]:
    """Suprema of the two factored sandwich-width coefficients over the
    spectrum of Z and the representative t values."""
    lam = z_vals[:, None]
    t = ts[None, :]
    w = 1.0 / np.sqrt(lam)
    core = (t + w) ** 2 / (2.0 * t * (t * t * lam + 1.0))
    gamma_sq = float(np.max(lam**2 * core))
    gamma_lin = float(np.max(lam * core))
    return gamma_sq, gamma_lin


def partition_bounds(y: PDMatrix, z: PDMatrix, part: SpectralPartition) -> BoundLedger:
    """Record the localized bounds 3..7 and the assembled final bound.

    Constants: gamma is the supremum of the squared-width factor (and of
    its linear variant) over spec(Z) x representative values; gamma'' adds
    the compressed-inverse correction gamma_lin * max_i ||(P_i Y^{-1} P_i)^{-1}||
    * ||Z^{1/2}||.  Both normalizations of the aggregated step-6 and final
    bounds are recorded ("6"/"final" use ||Z^{-1/2}||^2/n^2 inside step 6 and
    ||Z^{-1/2}||/n^2 in the final display; the "_alt" ids swap them).
    """
    check_dims(y, z)
    zm = part
    dim = z.dim
    eye = np.eye(dim)
    if sum(p.rank for p in zm.projections) != dim:
        raise PartitionMismatch("projection ranks do not sum to the dimension")
    for p in zm.projections:
        pm = p.matrix()
        if _op_norm(z.entries @ pm - pm @ z.entries) > 1e-8 * z.spectral_norm:
            raise PartitionMismatch("partition does not commute with Z")

    s = mat_power(z, 0.5).entries
    w = mat_power(z, -0.5).entries
    yinv = mat_power(y, -1.0).entries
    w_norm = _op_norm(w)
    y_norm = y.spectral_norm
    scale = max(y_norm, _op_norm(s), 1.0)
    n = zm.n

    gamma_sq, gamma_lin = _width_factors(z.eig.eigenvalues, np.asarray(zm.lambdas))
    gamma = max(gamma_sq, gamma_lin)

    ledger = BoundLedger()
    sum_diag = np.zeros_like(y.entries)
    sum_off = np.zeros_like(y.entries)
    max_inv_norm = 0.0
    blocks = []
    for p, lam in zip(zm.projections, zm.lambdas):
        pm = p.matrix()
        u = p.basis
        fine_i = _op_norm(lam * pm - w @ pm)
        pyp = pm @ y.entries @ pm
        lhs3 = _op_norm(pyp - s @ pm)
        lhs4 = _op_norm(pm @ yinv @ pm - w @ pm)
        k_inv = np.linalg.inv(u.T @ yinv @ u)
        max_inv_norm = max(max_inv_norm, _op_norm(k_inv))
        blocks.append((pm, u, lam, fine_i, lhs3, lhs4, k_inv))
        sum_diag += pyp - s @ pm
        sum_off += (eye - pm) @ y.entries @ pm

    gamma_prime = gamma_lin * max_inv_norm * _op_norm(s)
    gamma_dprime = gamma_sq + gamma_prime

    for pm, u, lam, fine_i, lhs3, lhs4, k_inv in blocks:
        ledger.add("3", lam, lhs3, gamma * fine_i**2, scale)
        ledger.add("4", lam, lhs4, gamma * fine_i**2, scale)
        lhs5 = _op_norm(u.T @ y.entries @ u - k_inv)
        ledger.add("5", lam, lhs5, gamma_dprime * fine_i**2, scale)

    lhs6 = _op_norm(sum_diag)
    ledger.add("6", n, lhs6, gamma * w_norm**2 / n**2, scale)
    ledger.add("6_alt", n, lhs6, gamma * w_norm / n**2, scale)

    lhs7 = _op_norm(sum_off)
    rhs7 = float(np.sqrt(gamma_dprime * y_norm * w_norm**2 / n))
    ledger.add("7", n, lhs7, rhs7, scale)

    lhs_final = _op_norm(y.entries - s)
    ledger.add("final", n, lhs_final, gamma * w_norm / n**2 + rhs7, scale)
    ledger.add("final_alt", n, lhs_final, gamma * w_norm**2 / n**2 + rhs7, scale)

    ledger.metadata = {
        "gamma": gamma,
        "gamma_sq": gamma_sq,
        "gamma_lin": gamma_lin,
        "gamma_prime": gamma_prime,
        "gamma_dprime": gamma_dprime,
        "n": n,
        "kept_blocks": len(zm.projections),
        "fineness": zm.fineness,
        "w_norm": w_norm,
    }
    return ledger


def power_sandwich(z: PDMatrix, r: float, t: float) -> list[BoundEntry]:
    """Check t^r Z (rt + (1-r) Z)^{-1} <= Z^r <= (r Z + (1-r) t) / t^{1-r}
    for 0 < r < 1; the branch the reversed-inequality theorem pins down."""
    if not 0.0 < r < 1.0:
        raise InvalidR(f"r must be in (0, 1), got {r}")
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    vals = z.eig.eigenvalues
    lower = z.apply_values(t**r * vals / (r * t + (1.0 - r) * vals))
    mid = z.apply_values(vals**r)
    upper = z.apply_values((r * vals + (1.0 - r) * t) / t ** (1.0 - r))
    scale = _op_norm(upper)
    ledger = BoundLedger()
    ledger.add("pow.lower", t, -_sym_gap(lower, mid), 0.0, scale)
    ledger.add("pow.upper", t, -_sym_gap(mid, upper), 0.0, scale)
    return ledger.entries
