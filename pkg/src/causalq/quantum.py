"""Finite-dimensional Hilbert-space layer.

States, Kraus measurement families, POVMs, selective and non-selective
updates, anyonic commutators, phase extraction and commutation
classification.  Everything is a plain complex numpy array under the hood;
the wrapper types validate the defining identities at construction time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    LayoutMismatch,
    NotPSD,
    UnknownOutcome,
    ZeroProbabilityBranch,
    ZeroProduct,
)
from .reports import VerificationReport

# Tolerance ladder (absolute):
NORM_ATOL = 1e-12          # state normalisation, hermiticity, trace
COMPLETENESS_ATOL = 1e-10  # sum_k M_k^dag M_k = 1, unitarity, effect sums
PSD_EIG_ATOL = 1e-8        # an effect counts as PSD down to this eigenvalue
PSD_CLAMP_ATOL = 1e-10     # eigenvalues clamped to 0 inside this band
PHASE_FIT_ATOL = 1e-9      # proportionality residual for phase extraction
UNIMODULAR_ATOL = 1e-8     # | |lambda| - 1 | for an extracted phase
ZERO_PRODUCT_ATOL = 1e-12  # Frobenius norm below which a product is "zero"
ZERO_PROB_ATOL = 1e-14     # Born probability below which a branch is forbidden


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def frobenius(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def _as_operator(a) -> np.ndarray:
    m = np.array(a, dtype=complex)  # copy: wrappers freeze their own buffer
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch("operators must be square matrices")
    if not np.all(np.isfinite(m)):
        raise ValueError("operator entries must be finite")
    return m


def is_hermitian(a: np.ndarray, atol: float = NORM_ATOL) -> bool:
    return bool(np.max(np.abs(a - dagger(a))) <= atol)


def is_psd(a: np.ndarray, eig_atol: float = PSD_EIG_ATOL) -> bool:
    if not is_hermitian(a, atol=1e-10):
        return False
    return bool(np.linalg.eigvalsh(a).min() >= -eig_atol)


# ----------------------------------------------------------------------
# States


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.array(self.amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"state norm {norm} deviates from 1 beyond {NORM_ATOL}")
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def density(self) -> "DensityOperator":
        v = self.amplitudes
        return DensityOperator(np.outer(v, v.conj()))


@dataclass(frozen=True)
class DensityOperator:
    matrix: np.ndarray

    def __post_init__(self):
        m = _as_operator(self.matrix)
        if not is_hermitian(m):
            raise ValueError("density operator must be Hermitian")
        if np.linalg.eigvalsh(m).min() < -1e-10:
            raise ValueError("density operator must be positive semidefinite")
        if abs(np.trace(m).real - 1.0) > NORM_ATOL:
            raise ValueError("density operator must have unit trace")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


# ----------------------------------------------------------------------
# Measurement families, POVMs, unitaries


@dataclass(frozen=True)
class MeasurementFamily:
    """A finite Kraus family {M_k} with sum_k M_k^dag M_k = 1."""

    kraus: tuple[np.ndarray, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        ops = tuple(_as_operator(m) for m in self.kraus)
        if not ops:
            raise DimensionMismatch("a measurement family needs at least one operator")
        d = ops[0].shape[0]
        if any(m.shape[0] != d for m in ops):
            raise DimensionMismatch("all Kraus operators must share one dimension")
        total = sum(dagger(m) @ m for m in ops)
        resid = frobenius(total - np.eye(d))
        if resid > COMPLETENESS_ATOL:
            raise ValueError(f"completeness residual {resid:.3e} exceeds tolerance")
        labels = self.labels or tuple(str(k) for k in range(len(ops)))
        if len(labels) != len(ops):
            raise DimensionMismatch("one label per outcome required")
        for m in ops:
            m.setflags(write=False)
        object.__setattr__(self, "kraus", ops)
        object.__setattr__(self, "labels", tuple(labels))

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    @property
    def num_outcomes(self) -> int:
        return len(self.kraus)


@dataclass(frozen=True)
class Povm:
    """Effects {E_k}: Hermitian, PSD, below the identity, summing to it."""

    effects: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(_as_operator(e) for e in self.effects)
        if not ops:
            raise DimensionMismatch("a POVM needs at least one effect")
        d = ops[0].shape[0]
        for e in ops:
            if e.shape[0] != d:
                raise DimensionMismatch("all effects must share one dimension")
            if not is_hermitian(e, atol=1e-10):
                raise ValueError("effects must be Hermitian")
            ev = np.linalg.eigvalsh(e)
            if ev.min() < -PSD_EIG_ATOL:
                raise NotPSD(f"effect eigenvalue {ev.min():.3e} below -{PSD_EIG_ATOL}")
            if ev.max() > 1 + COMPLETENESS_ATOL:
                raise ValueError("effect exceeds the identity")
        resid = frobenius(sum(ops) - np.eye(d))
        if resid > COMPLETENESS_ATOL:
            raise ValueError(f"effects sum residual {resid:.3e} exceeds tolerance")
        for e in ops:
            e.setflags(write=False)
        object.__setattr__(self, "effects", ops)

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]


@dataclass(frozen=True)
class Unitary:
    matrix: np.ndarray

    def __post_init__(self):
        m = _as_operator(self.matrix)
        resid = frobenius(dagger(m) @ m - np.eye(m.shape[0]))
        if resid > COMPLETENESS_ATOL:
            raise ValueError(f"unitarity residual {resid:.3e} exceeds tolerance")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


# ----------------------------------------------------------------------
# Family-level operations


def validate_measurement(family: MeasurementFamily) -> VerificationReport:
    """Report the completeness residual and coarse-graining consistency.

    For every two-block partition (A, A') of the outcomes the summed
    effects must still add to the identity: E(A) + E(A') = 1.  Beyond 12
    outcomes only the singleton-complement splits are enumerated (the
    count of partitions is exponential); the report records which.
    """
    d = family.dim
    effects = [dagger(m) @ m for m in family.kraus]
    total_resid = frobenius(sum(effects) - np.eye(d))
    worst_split = 0.0
    k = len(effects)
    if k <= 12:
        splits = range(1, 2 ** (k - 1))
        exhaustive = True
    else:
        splits = (1 << i for i in range(k))
        exhaustive = False
    for bits in splits:
        block = sum(effects[i] for i in range(k) if bits & (1 << i))
        rest = sum(effects[i] for i in range(k) if not bits & (1 << i))
        worst_split = max(worst_split, frobenius(block + rest - np.eye(d)))
    passed = total_resid <= COMPLETENESS_ATOL and worst_split <= COMPLETENESS_ATOL
    return VerificationReport(
        check="measurement_valid",
        passed=passed,
        evidence={
            "completeness_residual": total_resid,
            "worst_two_block_residual": worst_split,
            "num_outcomes": k,
            "all_partitions_checked": exhaustive,
        },
        tolerances={"completeness": COMPLETENESS_ATOL},
    )


def povm_from_measurement(family: MeasurementFamily) -> Povm:
    """E_k = M_k^dag M_k."""
    return Povm(tuple(dagger(m) @ m for m in family.kraus))


def measurement_from_povm(povm: Povm) -> MeasurementFamily:
    """M_k = principal square root of E_k (Hermitian, PSD)."""
    return MeasurementFamily(tuple(hermitian_sqrt(e) for e in povm.effects))


def hermitian_sqrt(effect: np.ndarray) -> np.ndarray:
    """Principal square root via eigendecomposition, clamping tiny negatives."""
    e = _as_operator(effect)
    if not is_hermitian(e, atol=1e-10):
        raise ValueError("square root requires a Hermitian operator")
    vals, vecs = np.linalg.eigh(e)
    if vals.min() < -PSD_EIG_ATOL:
        raise NotPSD(f"eigenvalue {vals.min():.3e} is negative beyond tolerance")
    vals = np.where(vals < PSD_CLAMP_ATOL, np.maximum(vals, 0.0), vals)
    return (vecs * np.sqrt(vals)) @ dagger(vecs)


def conjugate_measurement(
    u1: Unitary, family: MeasurementFamily, u2: Unitary
) -> MeasurementFamily:
    """{U1 M_k U2} -- again a measurement, validated on construction."""
    if u1.dim != family.dim or u2.dim != family.dim:
        raise DimensionMismatch("unitaries must match the family dimension")
    return MeasurementFamily(
        tuple(u1.matrix @ m @ u2.matrix for m in family.kraus), family.labels
    )


def born_probability(family: MeasurementFamily, k: int, state: PureState) -> float:
    if not (0 <= k < family.num_outcomes):
        raise UnknownOutcome(f"outcome {k} not in family of {family.num_outcomes}")
    if family.dim != state.dim:
        raise DimensionMismatch("family and state dimensions differ")
    return float(np.linalg.norm(family.kraus[k] @ state.amplitudes) ** 2)


def selective_update(family: MeasurementFamily, k: int, state: PureState) -> PureState:
    """M_k psi / ||M_k psi||.  Surrounding dynamics are composed by the caller."""
    p = born_probability(family, k, state)
    if p <= ZERO_PROB_ATOL:
        raise ZeroProbabilityBranch(f"outcome {k} has probability {p:.3e}")
    v = family.kraus[k] @ state.amplitudes
    return PureState(v / np.linalg.norm(v))


def nonselective_update(
    family: MeasurementFamily, rho: DensityOperator
) -> DensityOperator:
    """sum_k M_k rho M_k^dag; trace and positivity preserved."""
    if family.dim != rho.dim:
        raise DimensionMismatch("family and state dimensions differ")
    out = sum(m @ rho.matrix @ dagger(m) for m in family.kraus)
    return DensityOperator(out)


# ----------------------------------------------------------------------
# Commutation phases


def anyonic_commutator(a: np.ndarray, b: np.ndarray, phi: float) -> np.ndarray:
    """AB - e^{i phi} BA."""
    a = _as_operator(a)
    b = _as_operator(b)
    if a.shape != b.shape:
        raise DimensionMismatch("operators must share a dimension")
    return a @ b - np.exp(1j * phi) * (b @ a)


@dataclass(frozen=True)
class PhaseFit:
    """Result of fitting AB = lambda BA in the Frobenius inner product."""

    proportional: bool
    phi: Optional[float]       # arg(lambda) in [0, 2pi), when proportional
    lam: complex
    residual: float            # max |AB - lambda BA| entry
    unimodular_dev: float      # | |lambda| - 1 |

    @property
    def unimodular(self) -> bool:
        return self.unimodular_dev <= UNIMODULAR_ATOL


def proportionality_fit(p: np.ndarray, q: np.ndarray) -> PhaseFit:
    """Least-squares fit P = lambda Q in the Frobenius inner product.

    Raises ZeroProduct when either matrix is numerically zero.
    """
    p = _as_operator(p)
    q = _as_operator(q)
    if p.shape != q.shape:
        raise DimensionMismatch("matrices must share a dimension")
    if frobenius(p) <= ZERO_PRODUCT_ATOL or frobenius(q) <= ZERO_PRODUCT_ATOL:
        raise ZeroProduct("matrix vanishes; no proportionality constant defined")
    lam = complex(np.vdot(q, p) / np.vdot(q, q))
    residual = float(np.max(np.abs(p - lam * q)))
    tol = PHASE_FIT_ATOL * max(1.0, float(np.max(np.abs(p))))
    proportional = residual <= tol
    unimodular_dev = abs(abs(lam) - 1.0)
    phi = float(np.angle(lam)) % (2 * np.pi) if proportional else None
    return PhaseFit(proportional, phi, lam, residual, unimodular_dev)


def extract_phase(a: np.ndarray, b: np.ndarray) -> PhaseFit:
    """Fit AB = lambda BA and return the phase, or a non-proportional verdict.

    The fit lambda = <BA, AB> / <BA, BA> is a Frobenius least-squares
    estimate, robust to zero entries.  Raises ZeroProduct when either
    product vanishes (no phase is defined on the kernel).
    """
    a = _as_operator(a)
    b = _as_operator(b)
    if a.shape != b.shape:
        raise DimensionMismatch("operators must share a dimension")
    return proportionality_fit(a @ b, b @ a)


@dataclass(frozen=True)
class CommutationClass:
    """bosonic (phi=0), fermionic (phi=pi), anyonic(phi), or none."""

    kind: str
    phi: Optional[float]
    fit: PhaseFit
    self_adjoint: tuple[bool, bool]
    psd: tuple[bool, bool]
    brooke_violation: bool = False


def classify_commutation(
    a: np.ndarray, b: np.ndarray, phase_atol: float = 1e-8
) -> CommutationClass:
    """Classify the commutation of A and B and check the self-adjoint
    constraints: one self-adjoint factor forces phi in {0, pi}; two
    self-adjoint factors with one PSD force phi = 0.  A violation is
    flagged, never silently dropped -- the constraint is unconditional.
    """
    a = _as_operator(a)
    b = _as_operator(b)
    fit = extract_phase(a, b)
    sa = (is_hermitian(a, atol=1e-10), is_hermitian(b, atol=1e-10))
    psd = (sa[0] and is_psd(a), sa[1] and is_psd(b))
    if not fit.proportional or not fit.unimodular:
        return CommutationClass("none", None, fit, sa, psd)

    phi = fit.phi
    dist0 = min(phi, 2 * np.pi - phi)
    if dist0 <= phase_atol:
        kind = "bosonic"
    elif abs(phi - np.pi) <= phase_atol:
        kind = "fermionic"
    else:
        kind = "anyonic"

    violation = False
    if sa[0] or sa[1]:
        violation = kind == "anyonic"
    if sa[0] and sa[1] and (psd[0] or psd[1]):
        violation = violation or kind != "bosonic"
    return CommutationClass(kind, phi, fit, sa, psd, violation)


# ----------------------------------------------------------------------
# Tensor embedding


@dataclass(frozen=True)
class LocalOperatorSpec:
    """An operator on one tensor factor of a product layout."""

    base: np.ndarray
    factor: int
    dims: tuple[int, ...]

    def __post_init__(self):
        base = _as_operator(self.base)
        dims = tuple(int(d) for d in self.dims)
        if any(d < 1 for d in dims):
            raise LayoutMismatch("factor dimensions must be positive")
        if not (0 <= self.factor < len(dims)):
            raise LayoutMismatch(f"factor index {self.factor} outside layout {dims}")
        if base.shape[0] != dims[self.factor]:
            raise LayoutMismatch(
                f"operator dimension {base.shape[0]} != factor dimension "
                f"{dims[self.factor]}"
            )
        base.setflags(write=False)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "dims", dims)

    @property
    def full_dim(self) -> int:
        return int(np.prod(self.dims))


def embed_local(spec: LocalOperatorSpec) -> np.ndarray:
    """identity x ... x op x ... x identity at the given factor position."""
    out = np.eye(1, dtype=complex)
    for i, d in enumerate(spec.dims):
        out = np.kron(out, spec.base if i == spec.factor else np.eye(d))
    return out


def embed(op: np.ndarray, factor: int, dims: Sequence[int]) -> np.ndarray:
    return embed_local(LocalOperatorSpec(op, factor, tuple(dims)))


# ----------------------------------------------------------------------
# Random generators (seeded; used by property checks and scenario drivers)


def haar_unitary(rng: np.random.Generator, d: int) -> Unitary:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
    return Unitary(q)


def random_family(
    rng: np.random.Generator, d: int, num_outcomes: int
) -> MeasurementFamily:
    """A random complete Kraus family: raw Gaussians whitened by S^{-1/2}."""
    raw = [
        rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        for _ in range(num_outcomes)
    ]
    total = sum(dagger(g) @ g for g in raw)
    vals, vecs = np.linalg.eigh(total)
    inv_sqrt = (vecs / np.sqrt(vals)) @ dagger(vecs)
    return MeasurementFamily(tuple(g @ inv_sqrt for g in raw))
