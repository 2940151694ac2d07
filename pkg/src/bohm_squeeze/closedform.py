"""Closed-form wavefunction, Bohm potential and external potential.

All analytic objects here are quadratic forms in (x, y) with time-dependent
coefficients, because the engineered state is Gaussian with a quadratic
phase:

    S(x, y, t)  = m*nud*[r*(x^2+y^2)/2 + x*y] + mu(t)
    ln A(x,y,t) = -ln(pi)/2 - r*nu - P*(x^2+y^2)/2 + Q*x*y,
                  P = exp(-2*r*nu)*cosh(2*nu),  Q = exp(-2*r*nu)*sinh(2*nu)

The ``QuadForm`` container carries such forms (value = quad*(x^2+y^2) +
cross*x*y + const); working with coefficients keeps the Hamilton-Jacobi
closure exact and makes level-curve classification a two-liner.

The amplitude above is the stable rewrite of the product form
(1/sqrt(pi)) e^{-r nu} exp[-(x^2+y^2)/2 e^{-2 r nu}
 - ((x^2+y^2) tanh^2 nu - 2 x y tanh nu) cosh^2 nu e^{-2 r nu}]:
multiplying by cosh^2 rather than dividing by sech^2 avoids blow-up at
large nu, and collapsing the two exponents into (P, Q) avoids the
cosh^2 - sinh^2 cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Union

import numpy as np

from .timefns import TimePolynomial

__all__ = [
    "NU_LIMIT",
    "Scenario",
    "GridSpec2D",
    "ScalarField2D",
    "ComplexField2D",
    "QuadForm",
    "ConicClass",
    "phase_coeffs",
    "phase_rate_coeffs",
    "log_amplitude_coeffs",
    "bohm_coeffs",
    "external_coeffs",
    "external_variant_coeffs",
    "phase_S",
    "amplitude_A",
    "wavefunction_psi",
    "bohm_potential",
    "external_potential",
    "external_potential_variant",
    "classify_level_curves_bohm",
    "classify_level_curves_external",
    "spread_sigmas",
    "auto_grid",
    "sample_amplitude",
    "sample_density",
    "sample_psi",
    "sample_bohm",
    "sample_external",
]

SQRT_PI = math.sqrt(math.pi)

# cosh(4*nu) overflows float64 near |nu| ~ 177; refuse far before that so
# failures are explicit instead of silent infinities.
NU_LIMIT = 50.0

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class Scenario:
    """Full parameter set: mass m > 0, mix parameter r, schedules nu and mu.

    ``nu`` must vanish at t = 0 (the amplitude evolution starts from the
    ground-state product, which forces a zero squeeze at the initial time).
    """

    m: float
    r: float
    nu: TimePolynomial
    mu: TimePolynomial

    def __post_init__(self):
        if not (self.m > 0.0) or not math.isfinite(self.m):
            raise ValueError(f"mass must be positive and finite, got {self.m}")
        if not math.isfinite(self.r):
            raise ValueError(f"mix parameter r must be finite, got {self.r}")
        if not self.nu.starts_at_zero:
            raise ValueError(
                "squeeze schedule nu must satisfy nu(0) = 0; "
                f"got constant coefficient {self.nu.coeffs[0]}"
            )

    def nu_at(self, t: float) -> float:
        """nu(t), range-checked against the hyperbolic overflow limit.

        Both |nu| and |r nu| are bounded: the potentials carry factors up
        to exp(4|nu| + 4|r nu|) (and exp(10|r nu|) in the level-curve
        discriminant), all finite in float64 under this limit.
        """
        nu = self.nu.value(t)
        if abs(nu) > NU_LIMIT or abs(self.r * nu) > NU_LIMIT:
            raise ValueError(
                f"|nu(t)| = {abs(nu):g} (|r nu| = {abs(self.r * nu):g}) exceeds the "
                f"supported range {NU_LIMIT:g} at t = {t:g}"
            )
        return nu

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "r": self.r,
            "nu": self.nu.to_json(),
            "mu": self.mu.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Scenario":
        if not isinstance(obj, dict):
            raise ValueError("scenario must be a JSON object")
        try:
            m = float(obj["m"])
            r = float(obj["r"])
            nu = TimePolynomial.from_json(obj["nu"])
            mu = TimePolynomial.from_json(obj.get("mu", {"coeffs": [0.0]}))
        except KeyError as exc:
            raise ValueError(f"scenario is missing required key {exc}") from exc
        return cls(m=m, r=r, nu=nu, mu=mu)


@dataclass(frozen=True)
class GridSpec2D:
    """Uniform rectangular sampling grid."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int

    def __post_init__(self):
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ValueError("grid extents must satisfy x_max > x_min and y_max > y_min")
        if self.nx < 3 or self.ny < 3:
            raise ValueError("grids need at least 3 samples per axis for interior stencils")

    @property
    def hx(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def hy(self) -> float:
        return (self.y_max - self.y_min) / (self.ny - 1)

    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    def ys(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.ny)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Meshgrid with shape (nx, ny); index [ix, iy]."""
        return np.meshgrid(self.xs(), self.ys(), indexing="ij")

    def to_json(self) -> dict:
        return {
            "x_min": self.x_min,
            "x_max": self.x_max,
            "y_min": self.y_min,
            "y_max": self.y_max,
            "nx": self.nx,
            "ny": self.ny,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GridSpec2D":
        try:
            return cls(
                x_min=float(obj["x_min"]),
                x_max=float(obj["x_max"]),
                y_min=float(obj["y_min"]),
                y_max=float(obj["y_max"]),
                nx=int(obj["nx"]),
                ny=int(obj["ny"]),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"invalid grid definition: {exc}") from exc

    @classmethod
    def square(cls, half_extent: float, n: int) -> "GridSpec2D":
        return cls(-half_extent, half_extent, -half_extent, half_extent, n, n)


@dataclass(frozen=True)
class ScalarField2D:
    """Real field sampled on a grid at a fixed time."""

    grid: GridSpec2D
    t: float
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.nx, self.grid.ny):
            raise ValueError(f"field shape {v.shape} does not match grid ({self.grid.nx}, {self.grid.ny})")
        if not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite values")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class ComplexField2D:
    """Complex field sampled on a grid at a fixed time."""

    grid: GridSpec2D
    t: float
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.nx, self.grid.ny):
            raise ValueError(f"field shape {v.shape} does not match grid ({self.grid.nx}, {self.grid.ny})")
        if not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite values")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class QuadForm:
    """Centered quadratic form quad*(x^2 + y^2) + cross*x*y + const."""

    quad: float
    cross: float
    const: float

    def __call__(self, x: ArrayLike, y: ArrayLike) -> ArrayLike:
        return self.quad * (x * x + y * y) + self.cross * x * y + self.const

    def grad(self, x: ArrayLike, y: ArrayLike) -> tuple[ArrayLike, ArrayLike]:
        return 2.0 * self.quad * x + self.cross * y, 2.0 * self.quad * y + self.cross * x

    def __add__(self, other: "QuadForm") -> "QuadForm":
        return QuadForm(self.quad + other.quad, self.cross + other.cross, self.const + other.const)

    def __sub__(self, other: "QuadForm") -> "QuadForm":
        return QuadForm(self.quad - other.quad, self.cross - other.cross, self.const - other.const)

    def scaled(self, f: float) -> "QuadForm":
        return QuadForm(f * self.quad, f * self.cross, f * self.const)


Classification = Literal["ellipse", "parabola-degenerate", "hyperbola", "degenerate-lines"]


@dataclass(frozen=True)
class ConicClass:
    """Quadratic-form invariants of one level curve, plus its conic type.

    ``discriminant`` is the determinant of the full 3x3 matrix of the conic
    written as  level - potential = 0  (no linear terms arise here), and
    ``minor33`` is the determinant of its leading 2x2 block.  For the
    centered forms of this module: minor33 = quad^2 - cross^2/4 and
    discriminant = (level - const) * minor33.
    """

    discriminant: float
    minor33: float
    classification: Classification


def _classify(minor33: float, discriminant: float) -> Classification:
    # Exact sign tests: coefficients at degenerate instants (for example
    # t = 0) come out as exact floating-point zeros.
    if minor33 > 0.0:
        return "ellipse" if discriminant != 0.0 else "degenerate-lines"
    if minor33 < 0.0:
        return "hyperbola" if discriminant != 0.0 else "degenerate-lines"
    return "parabola-degenerate"


def conic_of_level_curve(form: QuadForm, level: float) -> ConicClass:
    minor33 = form.quad * form.quad - form.cross * form.cross / 4.0
    discriminant = (level - form.const) * minor33
    return ConicClass(discriminant=discriminant, minor33=minor33, classification=_classify(minor33, discriminant))


# ---------------------------------------------------------------------------
# coefficient layer


def phase_coeffs(s: Scenario, t: float) -> QuadForm:
    """Quadratic form of the phase S at time t."""
    nud = s.nu.d1(t)
    return QuadForm(quad=s.m * nud * s.r / 2.0, cross=s.m * nud, const=s.mu.value(t))


def phase_rate_coeffs(s: Scenario, t: float) -> QuadForm:
    """Quadratic form of dS/dt at time t."""
    nudd = s.nu.d2(t)
    return QuadForm(quad=s.m * nudd * s.r / 2.0, cross=s.m * nudd, const=s.mu.d1(t))


def log_amplitude_coeffs(s: Scenario, t: float) -> QuadForm:
    """Quadratic form of ln A at time t (see module docstring)."""
    nu = s.nu_at(t)
    scale = math.exp(-2.0 * s.r * nu)
    p = scale * math.cosh(2.0 * nu)
    q = scale * math.sinh(2.0 * nu)
    return QuadForm(quad=-p / 2.0, cross=q, const=-s.r * nu - math.log(SQRT_PI))


def bohm_coeffs(s: Scenario, t: float) -> QuadForm:
    """Quadratic form of the Bohm potential -(lap A)/(2 m A)."""
    nu = s.nu_at(t)
    e4 = math.exp(-4.0 * s.r * nu)
    e2 = math.exp(-2.0 * s.r * nu)
    return QuadForm(
        quad=-e4 * math.cosh(4.0 * nu) / (2.0 * s.m),
        cross=e4 * math.sinh(4.0 * nu) / s.m,
        const=e2 * math.cosh(2.0 * nu) / s.m,
    )


def kinetic_coeffs(s: Scenario, t: float) -> QuadForm:
    """Quadratic form of |grad S|^2 / (2m)."""
    nud = s.nu.d1(t)
    r = s.r
    k = s.m * nud * nud / 2.0
    return QuadForm(quad=k * (r * r + 1.0), cross=4.0 * k * r, const=0.0)


def external_coeffs(s: Scenario, t: float) -> QuadForm:
    """External potential making the engineered state an exact solution.

    Obtained by clearing V from the Hamilton-Jacobi identity
    V = -S_t - |grad S|^2/(2m) - V_B; all three parts are quadratic forms,
    so the closure residual vanishes identically (see tests).
    """
    nu = s.nu_at(t)
    nud = s.nu.d1(t)
    nudd = s.nu.d2(t)
    e4 = math.exp(-4.0 * s.r * nu)
    e2 = math.exp(-2.0 * s.r * nu)
    r, m = s.r, s.m
    return QuadForm(
        quad=-m * (r * r + 1.0) * nud * nud / 2.0 - m * r * nudd / 2.0 + e4 * math.cosh(4.0 * nu) / (2.0 * m),
        cross=-2.0 * m * r * nud * nud - m * nudd - e4 * math.sinh(4.0 * nu) / m,
        const=-e2 * math.cosh(2.0 * nu) / m - s.mu.d1(t),
    )


def external_variant_coeffs(s: Scenario, t: float) -> QuadForm:
    """Sign-variant transcription of the external potential.

    Identical to :func:`external_coeffs` except that every hyperbolic
    (curvature) term enters with opposite sign and weight 2 instead of
    1/(2m).  The difference from the consistent form is exactly
    (2m + 1) * V_B, so this variant violates the Hamilton-Jacobi identity;
    it is kept as a deliberately wrong source for the residual diagnostics
    (see ``verify`` and the ``v_source`` config option).
    """
    nu = s.nu_at(t)
    nud = s.nu.d1(t)
    nudd = s.nu.d2(t)
    e4 = math.exp(-4.0 * s.r * nu)
    e2 = math.exp(-2.0 * s.r * nu)
    r, m = s.r, s.m
    return QuadForm(
        quad=-m * (r * r + 1.0) * nud * nud / 2.0 - m * r * nudd / 2.0 - e4 * math.cosh(4.0 * nu),
        cross=-2.0 * m * r * nud * nud - m * nudd + 2.0 * e4 * math.sinh(4.0 * nu),
        const=2.0 * e2 * math.cosh(2.0 * nu) - s.mu.d1(t),
    )


# ---------------------------------------------------------------------------
# pointwise evaluation


def phase_S(s: Scenario, x: ArrayLike, y: ArrayLike, t: float) -> ArrayLike:
    """Phase S(x, y, t) of the engineered wavefunction."""
    return phase_coeffs(s, t)(x, y)


def amplitude_A(s: Scenario, x: ArrayLike, y: ArrayLike, t: float) -> ArrayLike:
    """Amplitude A(x, y, t); strictly positive Gaussian."""
    return np.exp(log_amplitude_coeffs(s, t)(x, y))


def wavefunction_psi(s: Scenario, x: ArrayLike, y: ArrayLike, t: float) -> ArrayLike:
    """psi = A * exp(i S)."""
    return amplitude_A(s, x, y, t) * np.exp(1j * phase_S(s, x, y, t))


def bohm_potential(s: Scenario, x: ArrayLike, y: ArrayLike, t: float) -> ArrayLike:
    """Bohm potential V_B(x, y, t)."""
    return bohm_coeffs(s, t)(x, y)


def external_potential(s: Scenario, x: ArrayLike, y: ArrayLike, t: float) -> ArrayLike:
    """External potential V(x, y, t) from the Hamilton-Jacobi closure."""
    return external_coeffs(s, t)(x, y)


def external_potential_variant(s: Scenario, x: ArrayLike, y: ArrayLike, t: float) -> ArrayLike:
    """Sign-variant external potential (fails the Hamilton-Jacobi identity)."""
    return external_variant_coeffs(s, t)(x, y)


def classify_level_curves_bohm(s: Scenario, t: float) -> ConicClass:
    """Conic type of the Bohm-potential level curve through V_B = 0.

    minor33 = exp(-8 r nu)/(4 m^2) > 0 and the discriminant
    -exp(-10 r nu) cosh(2 nu)/(4 m^3) < 0 for every scenario and time, so
    the classification is always "ellipse".
    """
    return conic_of_level_curve(bohm_coeffs(s, t), level=0.0)


def classify_level_curves_external(s: Scenario, t: float, level: float = 0.0) -> ConicClass:
    """Conic type of the external-potential level curve V = level.

    Unlike the Bohm potential, any type can occur here, including
    degenerate ones.
    """
    return conic_of_level_curve(external_coeffs(s, t), level=level)


# ---------------------------------------------------------------------------
# grid helpers


def spread_sigmas(s: Scenario, t: float) -> tuple[float, float]:
    """Standard deviations of the diagonal modes u=(x+y)/sqrt2, v=(x-y)/sqrt2.

    |psi|^2 factorizes exactly into Gaussians in u and v with
    var(u) = exp(2(r+1) nu)/2 and var(v) = exp(2(r-1) nu)/2.
    """
    nu = s.nu_at(t)
    return math.exp((s.r + 1.0) * nu) / math.sqrt(2.0), math.exp((s.r - 1.0) * nu) / math.sqrt(2.0)


def auto_grid(
    s: Scenario,
    t: float,
    *,
    coverage: float = 7.5,
    points_per_sigma: float = 2.0,
    n_min: int = 61,
    n_cap: int = 1401,
) -> GridSpec2D:
    """Square grid adapted to the state at time t.

    The density along any grid edge x = L peaks at exp(-L^2 / (2 sigma_x^2))
    with sigma_x^2 = (sigma_u^2 + sigma_v^2)/2 (the marginal variance), so
    the half width is ``coverage * sigma_x``; the spacing resolves the
    narrowest diagonal mode with ``points_per_sigma`` samples per sigma.
    Sample counts are odd so composite Simpson applies directly.

    Raises when the required resolution exceeds ``n_cap``: a severely
    squeezed state on a huge domain cannot be represented on a desk-scale
    cartesian grid, and an explicit grid (or the rotated-frame moments in
    ``verify``) must be used instead.
    """
    sigma_u, sigma_v = spread_sigmas(s, t)
    half = coverage * math.sqrt((sigma_u**2 + sigma_v**2) / 2.0)
    h = min(sigma_u, sigma_v, 1.0 / math.sqrt(2.0)) / points_per_sigma
    n = int(math.ceil(2.0 * half / h)) + 1
    n = max(n, n_min)
    if n % 2 == 0:
        n += 1
    if n > n_cap:
        raise ValueError(
            f"auto grid at t = {t:g} needs {n} points per axis (cap {n_cap}); "
            "supply an explicit grid for this time"
        )
    return GridSpec2D.square(half, n)


def sample_amplitude(s: Scenario, grid: GridSpec2D, t: float) -> ScalarField2D:
    x, y = grid.mesh()
    return ScalarField2D(grid=grid, t=t, values=amplitude_A(s, x, y, t))


def sample_density(s: Scenario, grid: GridSpec2D, t: float) -> ScalarField2D:
    """|psi|^2 = A^2 on the grid."""
    x, y = grid.mesh()
    a = amplitude_A(s, x, y, t)
    return ScalarField2D(grid=grid, t=t, values=a * a)


def sample_psi(s: Scenario, grid: GridSpec2D, t: float) -> ComplexField2D:
    x, y = grid.mesh()
    return ComplexField2D(grid=grid, t=t, values=wavefunction_psi(s, x, y, t))


def sample_bohm(s: Scenario, grid: GridSpec2D, t: float) -> ScalarField2D:
    x, y = grid.mesh()
    return ScalarField2D(grid=grid, t=t, values=bohm_potential(s, x, y, t))


def sample_external(s: Scenario, grid: GridSpec2D, t: float) -> ScalarField2D:
    x, y = grid.mesh()
    return ScalarField2D(grid=grid, t=t, values=external_potential(s, x, y, t))
