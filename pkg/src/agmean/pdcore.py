"""Positive-definite matrix calculus.

Spectral decomposition, matrix functions through the eigenbasis, congruence,
ordering gaps, and seeded random generation of test matrices.  Everything here
is a pure function of its inputs; matrices are immutable after construction.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceFailure,
    DimMismatch,
    GenerationFailure,
    NonPositiveSpectrum,
)

DEFAULT_PD_TOL = 1e-12
DEFAULT_ORDER_TOL = 1e-10

_MAX_RESAMPLE = 512


def derive_seed(seed: int, *parts) -> int:
    """Derive a stream-independent 64-bit seed from a base seed and labels.

    Uses SHA-256 so the derivation is stable across runs and platforms
    (Python's builtin hash() is salted per process).
    """
    tag = "|".join(str(p) for p in parts).encode()
    h = int.from_bytes(hashlib.sha256(tag).digest()[:8], "big")
    return (int(seed) ^ h) & 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class EigenDecomp:
    """Eigendecomposition of a symmetric matrix, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip eigenvector signs so the first nonzero component is positive."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        nz = np.nonzero(np.abs(col) > 1e-12 * np.max(np.abs(col)))[0]
        if nz.size and col[nz[0]] < 0:
            out[:, j] = -col
    return out


class PDMatrix:
    """Real symmetric positive-definite matrix with cached spectral data.

    Inputs are symmetrized as (M + M^T)/2 on construction to absorb
    round-off.  Positive definiteness is enforced relative to the largest
    eigenvalue: the smallest must exceed ``pd_tol`` times the largest.
    """

    __slots__ = ("entries", "dim", "pd_tol", "_decomp")

    def __init__(self, entries, pd_tol: float = DEFAULT_PD_TOL):
        m = np.asarray(entries, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimMismatch(f"expected a square matrix, got shape {m.shape}")
        sym = (m + m.T) / 2.0
        sym.setflags(write=False)
        self.entries = sym
        self.dim = sym.shape[0]
        self.pd_tol = pd_tol
        try:
            vals, vecs = np.linalg.eigh(sym)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceFailure(str(exc)) from exc
        if not (vals[0] > pd_tol * max(vals[-1], 0.0)) or vals[-1] <= 0.0:
            raise NonPositiveSpectrum(
                f"spectrum [{vals[0]:.3e}, {vals[-1]:.3e}] fails the "
                f"positive-definite check at pd_tol={pd_tol:g}"
            )
        self._decomp = EigenDecomp(vals, _fix_signs(vecs))

    @property
    def eig(self) -> EigenDecomp:
        return self._decomp

    @property
    def spectral_norm(self) -> float:
        return float(self._decomp.eigenvalues[-1])

    @property
    def lambda_min(self) -> float:
        return float(self._decomp.eigenvalues[0])

    @property
    def cond(self) -> float:
        return float(self._decomp.eigenvalues[-1] / self._decomp.eigenvalues[0])

    def fro_norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    def scaled(self, t: float) -> "PDMatrix":
        """Return t * A for t > 0."""
        if t <= 0:
            raise ValueError(f"scale factor must be positive, got {t}")
        return PDMatrix(t * self.entries, pd_tol=self.pd_tol)

    def apply_values(self, values: np.ndarray) -> np.ndarray:
        """Raw Q diag(values) Q^T in this matrix's eigenbasis."""
        q = self._decomp.eigenvectors
        out = (q * values) @ q.T
        return (out + out.T) / 2.0

    def to_json_dict(self) -> dict:
        return {"dim": self.dim, "rows": self.entries.tolist()}

    @classmethod
    def from_json_dict(cls, obj: dict, pd_tol: float = DEFAULT_PD_TOL) -> "PDMatrix":
        rows = np.asarray(obj["rows"], dtype=np.float64)
        if rows.shape != (obj["dim"], obj["dim"]):
            raise DimMismatch(f"rows shape {rows.shape} does not match dim {obj['dim']}")
        return cls(rows, pd_tol=pd_tol)

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json(cls, text: str, pd_tol: float = DEFAULT_PD_TOL) -> "PDMatrix":
        return cls.from_json_dict(json.loads(text), pd_tol=pd_tol)

    def __repr__(self):
        return f"PDMatrix(dim={self.dim}, cond={self.cond:.3g})"


@dataclass(frozen=True)
class UnitVector:
    """A vector of unit Euclidean norm."""

    components: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.components, dtype=np.float64)
        n = np.linalg.norm(v)
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        object.__setattr__(self, "components", v / n)

    @property
    def dim(self) -> int:
        return self.components.shape[0]


@dataclass(frozen=True)
class Projection:
    """Orthogonal projection stored as an orthonormal basis of its range."""

    basis: np.ndarray  # dim x rank, orthonormal columns

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def matrix(self) -> np.ndarray:
        p = self.basis @ self.basis.T
        return (p + p.T) / 2.0

    def complement_basis(self) -> np.ndarray:
        """Orthonormal basis of the orthogonal complement of the range."""
        q, _ = np.linalg.qr(self.basis, mode="complete")
        return q[:, self.rank :]


def check_dims(*mats) -> int:
    dims = {m.dim for m in mats}
    if len(dims) != 1:
        raise DimMismatch(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def sym_eig(a: PDMatrix) -> EigenDecomp:
    """Cached symmetric eigendecomposition, eigenvalues ascending."""
    return a.eig


def spectral_fn(a: PDMatrix, tag: str, exponent: float | None = None) -> PDMatrix:
    """Apply a scalar function to a PD matrix through its eigenbasis.

    tag is one of "power" (requires exponent), "inverse", "sqrt".
    """
    vals = a.eig.eigenvalues
    if vals[0] <= 0.0:
        raise NonPositiveSpectrum("matrix lost positivity before applying function")
    if tag == "power":
        if exponent is None:
            raise ValueError("power requires an exponent")
        fvals = vals**exponent
    elif tag == "inverse":
        fvals = 1.0 / vals
    elif tag == "sqrt":
        fvals = np.sqrt(vals)
    else:
        raise ValueError(f"unknown spectral function tag {tag!r}")
    return PDMatrix(a.apply_values(fvals), pd_tol=a.pd_tol)


def mat_power(a: PDMatrix, s: float) -> PDMatrix:
    return spectral_fn(a, "power", s)


def congruence(c: PDMatrix, a: PDMatrix) -> PDMatrix:
    """C A C for symmetric positive-definite C; preserves positive definiteness."""
    check_dims(c, a)
    return PDMatrix(c.entries @ a.entries @ c.entries, pd_tol=a.pd_tol)


def loewner_gap(a: PDMatrix, b: PDMatrix) -> float:
    """Smallest eigenvalue of A - B; nonnegative means A dominates B."""
    check_dims(a, b)
    diff = a.entries - b.entries
    return float(np.linalg.eigvalsh((diff + diff.T) / 2.0)[0])


def loewner_geq(a: PDMatrix, b: PDMatrix, order_tol: float = DEFAULT_ORDER_TOL) -> bool:
    """A dominates B in the positive-semidefinite order, up to relative slack."""
    scale = max(a.spectral_norm, b.spectral_norm)
    return loewner_gap(a, b) >= -order_tol * scale


ENSEMBLE_KINDS = (
    "wishart",
    "exp_gaussian",
    "diagonal_dominant",
    "commuting_pair",
    "near_identity",
)


@dataclass(frozen=True)
class EnsembleSpec:
    """Description of a seeded random matrix ensemble.

    condition_cap bounds the condition number of generated matrices; draws
    that exceed it are resampled (bounded retries).  eps is the perturbation
    radius used by the near_identity kind.
    """

    kind: str
    dim: int
    condition_cap: float = 100.0
    seed: int = 0
    eps: float = 0.1

    def __post_init__(self):
        if self.kind not in ENSEMBLE_KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dim must be at least 1")
        if self.condition_cap < 1.0:
            raise ValueError("condition_cap must be >= 1")


def _draw_wishart(rng: np.random.Generator, dim: int) -> np.ndarray:
    dof = 2 * dim + 2
    g = rng.standard_normal((dim, dof))
    return g @ g.T / dof


def _draw_exp_gaussian(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.standard_normal((dim, dim))
    s = (g + g.T) / (2.0 * np.sqrt(dim))
    vals, vecs = np.linalg.eigh(s)
    return (vecs * np.exp(vals)) @ vecs.T


def _draw_diagonal_dominant(rng: np.random.Generator, dim: int) -> np.ndarray:
    off = rng.uniform(-1.0, 1.0, size=(dim, dim)) / (2.0 * max(dim, 2))
    m = (off + off.T) / 2.0
    np.fill_diagonal(m, 1.0 + rng.uniform(0.0, 1.0, size=dim))
    return m


def _draw_near_identity(rng: np.random.Generator, dim: int, eps: float) -> np.ndarray:
    if eps == 0.0:
        return np.eye(dim)
    g = rng.standard_normal((dim, dim))
    s = (g + g.T) / 2.0
    norm = np.linalg.norm(np.linalg.eigvalsh(s), ord=np.inf)
    return np.eye(dim) + (eps / norm) * s


def random_pd(spec: EnsembleSpec) -> PDMatrix:
    """Draw one PD matrix from the ensemble; deterministic given the seed."""
    if spec.kind == "commuting_pair":
        raise ValueError("use random_commuting_pair for the commuting_pair kind")
    rng = np.random.default_rng(spec.seed)
    for _ in range(_MAX_RESAMPLE):
        if spec.kind == "wishart":
            m = _draw_wishart(rng, spec.dim)
        elif spec.kind == "exp_gaussian":
            m = _draw_exp_gaussian(rng, spec.dim)
        elif spec.kind == "diagonal_dominant":
            m = _draw_diagonal_dominant(rng, spec.dim)
        else:
            m = _draw_near_identity(rng, spec.dim, spec.eps)
        try:
            out = PDMatrix(m)
        except NonPositiveSpectrum:
            continue
        if out.cond <= spec.condition_cap:
            return out
    raise GenerationFailure(
        f"no draw met condition_cap={spec.condition_cap} in {_MAX_RESAMPLE} tries"
    )


def random_pair(spec: EnsembleSpec) -> tuple[PDMatrix, PDMatrix]:
    """Two independent draws with seeds derived from the spec seed."""
    a = random_pd(
        EnsembleSpec(spec.kind, spec.dim, spec.condition_cap, derive_seed(spec.seed, "A"), spec.eps)
    )
    b = random_pd(
        EnsembleSpec(spec.kind, spec.dim, spec.condition_cap, derive_seed(spec.seed, "B"), spec.eps)
    )
    return a, b


def random_commuting_pair(spec: EnsembleSpec) -> tuple[PDMatrix, PDMatrix]:
    """Two PD matrices sharing an eigenbasis (commutator zero by construction)."""
    rng = np.random.default_rng(spec.seed)
    q = _random_orthogonal(rng, spec.dim)
    half = np.sqrt(spec.condition_cap)
    d1 = np.exp(rng.uniform(-np.log(half), np.log(half), size=spec.dim))
    d2 = np.exp(rng.uniform(-np.log(half), np.log(half), size=spec.dim))
    return PDMatrix((q * d1) @ q.T), PDMatrix((q * d2) @ q.T)


def _random_orthogonal(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    return q * np.sign(np.diag(r))


def random_orthogonal(dim: int, seed: int) -> np.ndarray:
    """Haar-ish random orthogonal matrix (QR of a Gaussian, sign-fixed)."""
    return _random_orthogonal(np.random.default_rng(seed), dim)


def random_unit_vector(dim: int, seed: int) -> UnitVector:
    rng = np.random.default_rng(seed)
    return UnitVector(rng.standard_normal(dim))


def random_projection(dim: int, rank: int, seed: int) -> Projection:
    if not 0 < rank <= dim:
        raise ValueError(f"rank must be in 1..{dim}, got {rank}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, rank))
    q, r = np.linalg.qr(g)
    return Projection(q * np.sign(np.diag(r)))
