"""Deciding and testing rotational invariance of sets and functions.

A set is objective when every proper rotation maps it into itself; a
function is objective when rotations never change its value. For
radially described sets and for quadratic forms x^T H x the decision is
exact; for black-box functions it is a seeded Monte-Carlo test that can
refute invariance (with a concrete witness) but never certify it, so
the clean outcome there is "inconclusive" rather than "objective".
The exceptions are cases settled by theory: dimension one, where the
only proper rotation is the identity, and exact constructions.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .expr import EvalContext, Expression, evaluate, references_point
from .linalg import (
    DimensionMismatchError,
    SquareMatrix,
    Vector,
    gram_schmidt_complete,
    symmetric_eigen_extremes,
)
from .rotation import NonUnitVectorError, RotationMatrix, haar_sample, rotation_mapping

__all__ = [
    "Verdict",
    "Method",
    "Witness",
    "ObjectivityReport",
    "RadialSet",
    "RadialProfile",
    "QuadraticForm",
    "NonFiniteValueError",
    "ProfileEvaluationError",
    "DomainSampler",
    "radial_membership",
    "sample_radius",
    "radial_sampler",
    "radial_set_closure_check",
    "finite_set_objectivity",
    "extract_profile",
    "test_function_objectivity",
    "symmetric_part",
    "quadratic_objectivity",
    "quadratic_vs_montecarlo_oracle",
]

# Absolute tolerance for radius membership at interval endpoints and
# isolated points.
MEMBERSHIP_TOL = 1e-12

# Default relative tolerance for Monte-Carlo value comparisons; absorbs
# rotation-application roundoff.
DEFAULT_FUNCTION_TOL = 1e-9

# Default tolerance for the exact quadratic decision, scaled by the
# magnitude of the symmetric part.
DEFAULT_QUADRATIC_TOL = 1e-10


class Verdict(str, Enum):
    OBJECTIVE = "objective"
    NOT_OBJECTIVE = "not_objective"
    INCONCLUSIVE = "inconclusive"


class Method(str, Enum):
    EXACT_QUADRATIC = "exact_quadratic"
    RADIAL_REPRESENTATION = "radial_representation"
    MONTE_CARLO = "monte_carlo"


class NonFiniteValueError(ValueError):
    """A function under test returned NaN or infinity."""


class ProfileEvaluationError(ValueError):
    """Profile extraction failed at a specific radius."""

    def __init__(self, radius: float, reason: str):
        super().__init__(f"profile evaluation failed at radius {radius!r}: {reason}")
        self.radius = radius


@dataclass(frozen=True)
class Witness:
    """A concrete refutation: a point x and rotation q with f(qx) != f(x).

    For set (rather than function) checks, f_x and f_qx are membership
    indicators: 1.0 for "x in the set", 0.0 for "qx escaped".
    """

    x: Vector
    q: RotationMatrix
    f_x: float
    f_qx: float


@dataclass(frozen=True)
class ObjectivityReport:
    verdict: Verdict
    method: Method
    trials: int
    tolerance: float
    alpha: float | None = None
    witness: Witness | None = None

    def __post_init__(self):
        if self.verdict is Verdict.NOT_OBJECTIVE:
            if self.witness is None:
                raise ValueError("a not_objective verdict requires a witness")
            if not abs(self.witness.f_x - self.witness.f_qx) > self.tolerance:
                raise ValueError("witness values do not separate beyond the tolerance")
        elif self.witness is not None:
            raise ValueError("only not_objective verdicts carry a witness")
        if self.verdict is Verdict.INCONCLUSIVE and self.method is not Method.MONTE_CARLO:
            raise ValueError("only Monte-Carlo testing can end inconclusive")


@dataclass(frozen=True)
class RadialSet:
    """A rotation-closed set described by its radii: all points of R^m whose
    norm lies in a radius set made of closed intervals and isolated points.

    The radius data is normalized at construction: intervals sorted and
    merged where they overlap or touch, degenerate intervals demoted to
    points, points deduplicated and dropped when an interval already
    covers them. The radius set must be nonempty.
    """

    dimension: int
    intervals: tuple[tuple[float, float], ...] = ()
    points: tuple[float, ...] = ()

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        ivs: list[tuple[float, float]] = []
        pts: list[float] = []
        for lo, hi in self.intervals:
            lo, hi = float(lo), float(hi)
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError("interval endpoints must be finite")
            if lo < 0.0 or hi < lo:
                raise ValueError(f"invalid radius interval [{lo}, {hi}]")
            if lo == hi:
                pts.append(lo)
            else:
                ivs.append((lo, hi))
        for p in self.points:
            p = float(p)
            if not math.isfinite(p) or p < 0.0:
                raise ValueError(f"invalid radius point {p!r}")
            pts.append(p)
        ivs.sort()
        merged: list[tuple[float, float]] = []
        for lo, hi in ivs:
            if merged and lo <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
            else:
                merged.append((lo, hi))
        keep = sorted(
            {p for p in pts if not any(lo <= p <= hi for lo, hi in merged)}
        )
        if not merged and not keep:
            raise ValueError("the radius set must be nonempty")
        object.__setattr__(self, "intervals", tuple(merged))
        object.__setattr__(self, "points", tuple(keep))

    def contains_radius(self, t: float, tol: float = MEMBERSHIP_TOL) -> bool:
        if not math.isfinite(t):
            return False
        for lo, hi in self.intervals:
            if lo - tol <= t <= hi + tol:
                return True
        return any(abs(t - p) <= tol for p in self.points)

    def total_interval_length(self) -> float:
        return sum(hi - lo for lo, hi in self.intervals)


@dataclass(frozen=True)
class RadialProfile:
    """The one-dimensional trace of a function along a fixed unit direction:
    either a sampled (radius, value) table with exact lookup and no
    interpolation, or a closed-form unary expression in t."""

    samples: tuple[tuple[float, float], ...] | None = None
    expression: Expression | None = None
    gamma: RadialSet | None = None

    def __post_init__(self):
        if (self.samples is None) == (self.expression is None):
            raise ValueError("provide exactly one of samples or expression")
        if self.expression is not None and references_point(self.expression):
            raise ValueError("a profile expression may reference only t")
        if self.samples is not None:
            object.__setattr__(
                self, "samples", tuple((float(t), float(v)) for t, v in self.samples)
            )
            if self.gamma is not None:
                for t, _ in self.samples:
                    if not self.gamma.contains_radius(t):
                        raise ValueError(f"sampled radius {t!r} lies outside the radius set")

    def value(self, t: float) -> float:
        if self.expression is not None:
            return evaluate(self.expression, EvalContext.at_radius(t))
        assert self.samples is not None
        for radius, val in self.samples:
            if radius == t:
                return val
        raise KeyError(f"radius {t!r} was not sampled (lookup is exact, no interpolation)")


@dataclass(frozen=True)
class QuadraticForm:
    """The scalar function f(x) = x^T h x; h need not be symmetric."""

    h: SquareMatrix

    @property
    def order(self) -> int:
        return self.h.order

    def value(self, x: Vector) -> float:
        if x.dim != self.order:
            raise DimensionMismatchError(f"point has dimension {x.dim}, form has order {self.order}")
        return float(x.data @ self.h.data @ x.data)


DomainSampler = Callable[[np.random.Generator], Vector]


def radial_membership(a: RadialSet, x: Vector) -> bool:
    """Whether x belongs to the set, i.e. its norm lies in the radius set."""
    if x.dim != a.dimension:
        raise DimensionMismatchError(f"point has dimension {x.dim}, set lives in dimension {a.dimension}")
    return a.contains_radius(x.norm())


def sample_radius(a: RadialSet, rng: np.random.Generator) -> float:
    """Draw a radius from the set, uniform over total interval length;
    isolated points are atoms weighted like the mean interval length
    (or 1 when there are no intervals)."""
    lengths = [hi - lo for lo, hi in a.intervals]
    atom = (sum(lengths) / len(lengths)) if lengths else 1.0
    weights = lengths + [atom] * len(a.points)
    total = sum(weights)
    pick = rng.uniform(0.0, total)
    acc = 0.0
    index = len(weights) - 1
    for k, w in enumerate(weights):
        acc += w
        if pick <= acc:
            index = k
            break
    if index < len(a.intervals):
        lo, hi = a.intervals[index]
        return float(rng.uniform(lo, hi))
    return a.points[index - len(a.intervals)]


def _random_unit(m: int, rng: np.random.Generator) -> np.ndarray:
    # Normalized Gaussian: uniform on the sphere.
    while True:
        u = rng.standard_normal(m)
        n = np.linalg.norm(u)
        if n > 1e-12:
            return u / n


def radial_sampler(a: RadialSet) -> DomainSampler:
    """Default domain sampler for a radial set: radius from sample_radius,
    direction uniform on the sphere."""

    def sample(rng: np.random.Generator) -> Vector:
        t = sample_radius(a, rng)
        return Vector._trusted(t * _random_unit(a.dimension, rng))

    return sample


def radial_set_closure_check(
    a: RadialSet, trials: int, rng: np.random.Generator
) -> ObjectivityReport:
    """Monte-Carlo sanity check that the radial set really is closed under
    rotation: sample points of the set and rotations, and confirm each
    rotated point still belongs.

    By the radial characterization this cannot fail; a reported escape
    means an implementation bug (or a membership-tolerance effect for
    isolated radii around 1e+4 and beyond, where rotation roundoff
    outgrows the absolute membership tolerance).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    escapes = 0
    witness = None
    for _ in range(trials):
        t = sample_radius(a, rng)
        direction = haar_sample(a.dimension, rng)
        x = Vector._trusted(t * direction.data[:, 0])  # rotation applied to e1
        q = haar_sample(a.dimension, rng)
        qx = q.apply(x)
        if not radial_membership(a, qx):
            escapes += 1
            witness = Witness(x=x, q=q, f_x=1.0, f_qx=0.0)
            break
    if witness is not None:
        return ObjectivityReport(
            verdict=Verdict.NOT_OBJECTIVE,
            method=Method.RADIAL_REPRESENTATION,
            trials=trials,
            tolerance=MEMBERSHIP_TOL,
            witness=witness,
        )
    return ObjectivityReport(
        verdict=Verdict.OBJECTIVE,
        method=Method.RADIAL_REPRESENTATION,
        trials=trials,
        tolerance=MEMBERSHIP_TOL,
    )


def finite_set_objectivity(points: Sequence[Vector], m: int) -> ObjectivityReport:
    """Exact decision for a finite point set.

    In dimension one every set is objective. For m >= 2 a rotation orbit
    of any nonzero point is a whole sphere, so a finite set is objective
    only when every point is the origin; otherwise some rotation moves a
    point off the set, and one is constructed as a witness.
    """
    if not points:
        raise ValueError("the point set must be nonempty")
    for k, p in enumerate(points):
        if p.dim != m:
            raise DimensionMismatchError(f"point {k} has dimension {p.dim}, expected {m}")
    if m == 1:
        return ObjectivityReport(
            verdict=Verdict.OBJECTIVE,
            method=Method.RADIAL_REPRESENTATION,
            trials=0,
            tolerance=MEMBERSHIP_TOL,
        )
    nonzero = [p for p in points if p.norm() > MEMBERSHIP_TOL]
    if not nonzero:
        return ObjectivityReport(
            verdict=Verdict.OBJECTIVE,
            method=Method.RADIAL_REPRESENTATION,
            trials=0,
            tolerance=MEMBERSHIP_TOL,
        )
    p = max(nonzero, key=lambda v: v.norm())
    r = p.norm()
    u = p.data / r
    basis = gram_schmidt_complete([Vector(u)], m)
    g2 = basis[1].data
    # Distinct directions in the (u, g2) plane; the set is finite, so by
    # pigeonhole one of len(points) + 1 candidates misses it.
    separation = 1e-9 * max(1.0, r)
    for k in range(1, len(points) + 2):
        theta = k * math.pi / (len(points) + 2)
        v = math.cos(theta) * u + math.sin(theta) * g2
        v = v / np.linalg.norm(v)
        target = r * v
        if all(np.linalg.norm(target - q.data) > separation for q in points):
            rot = rotation_mapping(Vector(u), Vector(v))
            witness = Witness(x=p, q=rot, f_x=1.0, f_qx=0.0)
            return ObjectivityReport(
                verdict=Verdict.NOT_OBJECTIVE,
                method=Method.RADIAL_REPRESENTATION,
                trials=0,
                tolerance=MEMBERSHIP_TOL,
                witness=witness,
            )
    raise RuntimeError("no free direction found; the candidate sweep should make this unreachable")


def extract_profile(
    f: Callable[[Vector], float],
    gamma: RadialSet,
    u0: Vector,
    grid: Sequence[float],
) -> RadialProfile:
    """Sample the radial profile phi(t) = f(t * u0) over a grid of radii
    drawn from the radius set. u0 must be a unit vector."""
    if abs(u0.norm() - 1.0) > 1e-10:
        raise NonUnitVectorError(f"u0 must be a unit vector (norm {u0.norm()!r})")
    samples: list[tuple[float, float]] = []
    for t in grid:
        t = float(t)
        if not gamma.contains_radius(t):
            raise ValueError(f"grid radius {t!r} lies outside the radius set")
        try:
            val = float(f(Vector(t * u0.data)))
        except ProfileEvaluationError:
            raise
        except Exception as exc:
            raise ProfileEvaluationError(t, str(exc)) from exc
        if not math.isfinite(val):
            raise ProfileEvaluationError(t, f"non-finite value {val!r}")
        samples.append((t, val))
    return RadialProfile(samples=tuple(samples), gamma=gamma)


def _checked_value(f: Callable[[Vector], float], x: Vector) -> float:
    val = float(f(x))
    if not math.isfinite(val):
        raise NonFiniteValueError(f"function returned non-finite value {val!r} at {x!r}")
    return val


def test_function_objectivity(
    f: Callable[[Vector], float],
    m: int,
    sampler: DomainSampler,
    trials: int,
    tol: float = DEFAULT_FUNCTION_TOL,
    rng: np.random.Generator | None = None,
    *,
    pinned: Sequence[tuple[Vector, RotationMatrix]] = (),
) -> ObjectivityReport:
    """Monte-Carlo invariance test for a black-box scalar function.

    Two checks per sampled point x: a direct one against f(Qx) for a
    Haar-random rotation Q, and a profile one against f(|x| * e1), which
    an invariant function must match since some rotation carries x onto
    the e1 ray. Violations are judged relative to max(1, |f(x)|). The
    first violation ends the test with a not_objective verdict and a
    witness; surviving the whole budget is merely "inconclusive", since
    sampling cannot certify invariance. Dimension one is the exception:
    there the identity is the only proper rotation, so the verdict is
    objective outright.

    `pinned` trials, pairs (x, q) checked before any random sampling,
    let a caller guarantee that a known suspect direction is covered.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if tol <= 0.0:
        raise ValueError("tol must be > 0")
    if rng is None:
        raise ValueError("an explicitly seeded random generator is required")
    if m == 1:
        return ObjectivityReport(
            verdict=Verdict.OBJECTIVE,
            method=Method.MONTE_CARLO,
            trials=0,
            tolerance=tol,
        )
    e1 = np.zeros(m)
    e1[0] = 1.0
    performed = 0

    def check_pair(x: Vector, q: RotationMatrix) -> Witness | None:
        fx = _checked_value(f, x)
        threshold = tol * max(1.0, abs(fx))
        qx = q.apply(x)
        fqx = _checked_value(f, qx)
        if abs(fx - fqx) > threshold:
            return Witness(x=x, q=q, f_x=fx, f_qx=fqx)
        r = x.norm()
        if r > MEMBERSHIP_TOL:
            fr = _checked_value(f, Vector._trusted(r * e1))
            if abs(fx - fr) > threshold:
                onto_axis = rotation_mapping(Vector(x.data / r), Vector(e1))
                return Witness(x=x, q=onto_axis, f_x=fx, f_qx=fr)
        return None

    for x, q in pinned:
        performed += 1
        witness = check_pair(x, q)
        if witness is not None:
            return ObjectivityReport(
                verdict=Verdict.NOT_OBJECTIVE,
                method=Method.MONTE_CARLO,
                trials=performed,
                tolerance=tol,
                witness=witness,
            )
    for _ in range(trials):
        performed += 1
        x = sampler(rng)
        witness = check_pair(x, haar_sample(m, rng))
        if witness is not None:
            return ObjectivityReport(
                verdict=Verdict.NOT_OBJECTIVE,
                method=Method.MONTE_CARLO,
                trials=performed,
                tolerance=tol,
                witness=witness,
            )
    return ObjectivityReport(
        verdict=Verdict.INCONCLUSIVE,
        method=Method.MONTE_CARLO,
        trials=performed,
        tolerance=tol,
    )


# The name matches pytest's collection pattern; this is library code.
test_function_objectivity.__test__ = False  # type: ignore[attr-defined]


def symmetric_part(h: SquareMatrix) -> SquareMatrix:
    """(h + h^T) / 2, exactly symmetric since mirror entries are averaged."""
    d = h.data
    return SquareMatrix(0.5 * (d + d.T))


def quadratic_objectivity(
    qf: QuadraticForm, tol: float = DEFAULT_QUADRATIC_TOL
) -> ObjectivityReport:
    """Exact objectivity decision for f(x) = x^T H x.

    The form is invariant under every proper rotation precisely when the
    symmetric part of H is a scalar multiple alpha of the identity (the
    antisymmetric part never contributes to x^T H x). alpha is estimated
    as trace/m, the least-squares optimum, so the decision reduces to
    one residual check. A failing form ships a maximally separated
    witness built from the extreme eigenpairs of the symmetric part: the
    rotation carrying the minimizing direction onto the maximizing one
    changes the value by the whole spectral gap.

    In dimension one every function is objective, so m = 1 always passes.
    """
    if tol <= 0.0:
        raise ValueError("tol must be > 0")
    hs = symmetric_part(qf.h)
    m = qf.order
    alpha = float(np.trace(hs.data)) / m
    eff_tol = tol * max(1.0, float(np.max(np.abs(hs.data))))
    if m == 1:
        return ObjectivityReport(
            verdict=Verdict.OBJECTIVE,
            method=Method.EXACT_QUADRATIC,
            trials=0,
            tolerance=eff_tol,
            alpha=alpha,
        )
    residual = float(np.max(np.abs(hs.data - alpha * np.eye(m))))
    if residual <= eff_tol:
        return ObjectivityReport(
            verdict=Verdict.OBJECTIVE,
            method=Method.EXACT_QUADRATIC,
            trials=0,
            tolerance=eff_tol,
            alpha=alpha,
        )
    lam_min, u_min, lam_max, u_max = symmetric_eigen_extremes(hs)
    q = rotation_mapping(u_min, u_max)
    f_x = qf.value(u_min)
    f_qx = qf.value(q.apply(u_min))
    return ObjectivityReport(
        verdict=Verdict.NOT_OBJECTIVE,
        method=Method.EXACT_QUADRATIC,
        trials=0,
        tolerance=eff_tol,
        witness=Witness(x=u_min, q=q, f_x=f_x, f_qx=f_qx),
    )


def quadratic_vs_montecarlo_oracle(
    qf: QuadraticForm,
    trials: int,
    rng: np.random.Generator,
    tol: float = DEFAULT_FUNCTION_TOL,
) -> bool:
    """Cross-validate the exact quadratic decision against the Monte-Carlo
    tester on the same form.

    Agreement means: exact "objective" and no violation sampled, or
    exact "not_objective" and a violation found within the budget. The
    Monte-Carlo run is seeded with the exact test's witness pair, so a
    genuine non-objective form cannot slip through on sampling luck.
    The exact test is the sharper instrument; forms whose anisotropy
    sits between the two tolerances can disagree by construction.
    """
    if trials < 100:
        raise ValueError("trials must be >= 100")
    exact = quadratic_objectivity(qf)
    m = qf.order
    if m == 1:
        return True  # both sides are objective by the dimension-one degeneracy
    sampler = radial_sampler(RadialSet(m, intervals=((0.5, 2.0),)))
    pinned = ((exact.witness.x, exact.witness.q),) if exact.witness is not None else ()
    mc = test_function_objectivity(
        qf.value, m, sampler, trials, tol, rng, pinned=pinned
    )
    exact_invariant = exact.verdict is Verdict.OBJECTIVE
    mc_clean = mc.verdict is not Verdict.NOT_OBJECTIVE
    return exact_invariant == mc_clean
