"""Truncated two-mode Fock-space operator algebra.

A finite-dimensional oracle for the operator identities behind the
engineered amplitude: ladder operators on the truncated number basis, a
scaling-and-squaring matrix exponential, the pair-creation squeeze
exp[nu (a+ b+ - a b)] both directly and in the normally-ordered factored
form

    exp(f1 a+ b+) exp(f2 (a a+ + b+ b)) exp(f3 a b),
    f1 = tanh nu, f2 = -ln cosh nu, f3 = -tanh nu,

plus a Runge-Kutta oracle for the function system defining (f1, f2, f3).

Truncation note: the squeeze generator pumps occupation upward, so rows
and columns near the truncation edge of the *direct* exponential are
unreliable; comparisons should restrict to an interior block chosen well
below n_max (the factored product, by contrast, is exact on interior
blocks because its raising/lowering paths never touch the edge).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MAX_TWO_MODE_DIM",
    "ConvergenceError",
    "FockSpaceSpec",
    "FockOperator",
    "DisentangleFunctions",
    "build_ladder",
    "dagger",
    "matrix_exponential",
    "two_mode_squeeze_direct",
    "two_mode_squeeze_factored",
    "interior_block",
    "vacuum_column",
    "disentangle_ode_oracle",
    "disentangle_closed_form",
]

# Dense-matrix tractability bound on (n_max + 1)^2.
MAX_TWO_MODE_DIM = 4096


class ConvergenceError(RuntimeError):
    """Matrix exponential could not be brought into the convergent range."""


@dataclass(frozen=True)
class FockSpaceSpec:
    """Single-mode truncation n_max; two-mode dimension (n_max + 1)^2."""

    n_max: int

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1")
        if self.dim > MAX_TWO_MODE_DIM:
            raise ValueError(
                f"two-mode dimension {self.dim} exceeds the dense-matrix bound {MAX_TWO_MODE_DIM}"
            )

    @property
    def dim(self) -> int:
        return (self.n_max + 1) ** 2

    def index(self, n_a: int, n_b: int) -> int:
        """Flat index of |n_a, n_b> (n_a major)."""
        return n_a * (self.n_max + 1) + n_b


@dataclass(frozen=True)
class FockOperator:
    """Dense operator on the truncated two-mode space, |n_a, n_b> basis."""

    spec: FockSpaceSpec
    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries)
        if e.shape != (self.spec.dim, self.spec.dim):
            raise ValueError(f"operator shape {e.shape} does not match dimension {self.spec.dim}")
        object.__setattr__(self, "entries", e)

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.spec, self.entries @ other.entries)


def build_ladder(spec: FockSpaceSpec) -> tuple[FockOperator, FockOperator]:
    """Annihilation operators (a, b) = (A1 x I, I x A1), <n-1|A1|n> = sqrt(n)."""
    one = np.diag(np.sqrt(np.arange(1.0, spec.n_max + 1)), k=1)
    eye = np.eye(spec.n_max + 1)
    return (
        FockOperator(spec, np.kron(one, eye)),
        FockOperator(spec, np.kron(eye, one)),
    )


def dagger(op: FockOperator) -> FockOperator:
    return FockOperator(op.spec, op.entries.conj().T)


def _expm_array(m: np.ndarray) -> np.ndarray:
    """Scaling-and-squaring Taylor exponential.

    Scales by 2^-s until the 1-norm is below 0.5, applies a degree-16
    Taylor polynomial by Horner (remainder below 1e-16 at that radius) and
    squares back.  Complex input with exactly-zero imaginary part drops to
    real arithmetic, which roughly quarters the matmul cost.
    """
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix exponential of a non-finite matrix")
    if np.iscomplexobj(m) and not np.any(m.imag):
        return _expm_array(m.real.copy()).astype(complex)
    norm = float(np.max(np.sum(np.abs(m), axis=0))) if m.size else 0.0
    squarings = 0 if norm <= 0.5 else int(math.ceil(math.log2(norm / 0.5)))
    if squarings > 64:
        raise ConvergenceError(f"matrix 1-norm {norm:.3e} too large after maximal scaling")
    scaled = m / (2.0**squarings)
    eye = np.eye(m.shape[0], dtype=m.dtype)
    acc = eye + scaled / 16.0
    for k in range(15, 0, -1):
        acc = eye + (scaled @ acc) / k
    for _ in range(squarings):
        acc = acc @ acc
    return acc


def matrix_exponential(op: FockOperator) -> FockOperator:
    """exp of a truncated-space operator."""
    return FockOperator(op.spec, _expm_array(op.entries))


def two_mode_squeeze_direct(nu: float, spec: FockSpaceSpec) -> FockOperator:
    """exp[nu (a+ b+ - a b)] on the truncated space.

    The generator is real antisymmetric, so the result is real orthogonal;
    interior matrix elements converge to the untruncated values as n_max
    grows, while elements near the truncation edge carry reflection error.
    """
    a, b = build_ladder(spec)
    ad, bd = dagger(a), dagger(b)
    gen = nu * (ad.entries @ bd.entries - a.entries @ b.entries)
    return FockOperator(spec, _expm_array(gen))


def two_mode_squeeze_factored(nu: float, spec: FockSpaceSpec) -> FockOperator:
    """Factored form exp(f1 a+ b+) exp(f2 (a a+ + b+ b)) exp(f3 a b).

    The middle generator is the literal product a a+ (not a+ a + 1): on the
    truncated space the two differ only in the top-level diagonal entry,
    and the discrepancy never reaches interior blocks because the middle
    factor is diagonal.
    """
    f = disentangle_closed_form(nu)
    a, b = build_ladder(spec)
    ad, bd = dagger(a), dagger(b)
    raising = _expm_array(f.f1 * (ad.entries @ bd.entries))
    middle = _expm_array(f.f2 * (a.entries @ ad.entries + bd.entries @ b.entries))
    lowering = _expm_array(f.f3 * (a.entries @ b.entries))
    return FockOperator(spec, raising @ middle @ lowering)


def interior_block(op: FockOperator, level: int) -> np.ndarray:
    """Sub-matrix over basis states with n_a <= level and n_b <= level."""
    if level > op.spec.n_max:
        raise ValueError(f"interior level {level} exceeds n_max {op.spec.n_max}")
    idx = [op.spec.index(na, nb) for na in range(level + 1) for nb in range(level + 1)]
    return op.entries[np.ix_(idx, idx)]


def vacuum_column(op: FockOperator) -> np.ndarray:
    """<n_a, n_b| op |0, 0> reshaped to (n_max+1, n_max+1)."""
    d = op.spec.n_max + 1
    return op.entries[:, 0].reshape(d, d)


@dataclass(frozen=True)
class DisentangleFunctions:
    """Values of the three factorization functions at one nu."""

    f1: float
    f2: float
    f3: float


def disentangle_closed_form(nu: float) -> DisentangleFunctions:
    return DisentangleFunctions(math.tanh(nu), -math.log(math.cosh(nu)), -math.tanh(nu))


def disentangle_ode_oracle(nu_end: float, steps: int, *, local_tol: float = 1e-9) -> DisentangleFunctions:
    """Integrate the factorization system from (0, 0, 0) to nu_end.

    The defining relations
        1 = f1' - 2 f1 f2' + f1^2 f3' e^{-2 f2}
        0 = f2' - f1 f3' e^{-2 f2}
       -1 = f3' e^{-2 f2}
    are triangular in the derivatives; solving them once gives the explicit
    system f3' = -e^{2 f2}, f2' = -f1, f1' = 1 - f1^2 integrated here with
    classical RK4.  Each step is checked against two half steps; the step
    count must keep that estimate below ``local_tol``.
    """
    if steps < 100:
        raise ValueError("need at least 100 integration steps")

    def rhs(f1: float, f2: float, f3: float) -> tuple[float, float, float]:
        return 1.0 - f1 * f1, -f1, -math.exp(2.0 * f2)

    def rk4_step(f1: float, f2: float, f3: float, h: float) -> tuple[float, float, float]:
        a1, a2, a3 = rhs(f1, f2, f3)
        b1, b2, b3 = rhs(f1 + 0.5 * h * a1, f2 + 0.5 * h * a2, f3 + 0.5 * h * a3)
        c1, c2, c3 = rhs(f1 + 0.5 * h * b1, f2 + 0.5 * h * b2, f3 + 0.5 * h * b3)
        d1, d2, d3 = rhs(f1 + h * c1, f2 + h * c2, f3 + h * c3)
        return (
            f1 + (h / 6.0) * (a1 + 2.0 * b1 + 2.0 * c1 + d1),
            f2 + (h / 6.0) * (a2 + 2.0 * b2 + 2.0 * c2 + d2),
            f3 + (h / 6.0) * (a3 + 2.0 * b3 + 2.0 * c3 + d3),
        )

    h = nu_end / steps
    f = (0.0, 0.0, 0.0)
    for _ in range(steps):
        full = rk4_step(*f, h)
        half = rk4_step(*rk4_step(*f, h / 2.0), h / 2.0)
        err = max(abs(full[0] - half[0]), abs(full[1] - half[1]), abs(full[2] - half[2]))
        if err > local_tol:
            raise ConvergenceError(
                f"local error estimate {err:.3e} exceeds {local_tol:.0e}; increase steps"
            )
        # Keep the two-half-step value: one extra order of local accuracy.
        f = half
    return DisentangleFunctions(*f)
