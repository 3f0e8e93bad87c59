"""Limiting free-energy problems: scalar and profile maximizers.

The limiting free energy of the finite-n model is the value of

    Z(theta) = sup_f { theta * G_W(f) + B * int f - int gamma(beta(f)) }

over step profiles f with values in the closed mean range of the base
measure.  This module solves the scalar restriction (constant profiles,
the set A_theta), the full step-profile problem via damped fixed-point
iteration on the first-order condition

    f = alpha'(theta * vartheta_W,f + B),

and classifies replica symmetry (are all optimizers constant?).  It also
locates the phase-transition temperature theta_c by bisection and the
uniqueness field B_0 by scanning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .kernels import (
    MotifGraph,
    StepKernel,
    degree_profile,
    hom_functional,
    is_regular,
    refine_kernel_profile,
    sym_tensor,
    _vartheta_from_tensor,
)
from .measures import BaseMeasure, is_stochastically_nonnegative

__all__ = [
    "FieldProfile",
    "SolveReport",
    "MultistartSpec",
    "QuadraticCaseReport",
    "SymmetryVerdict",
    "scalar_objective",
    "scalar_maximizers",
    "scalar_fixed_points",
    "quadratic_case",
    "profile_objective",
    "profile_gradient",
    "profile_fixed_point",
    "solve_free_energy",
    "replica_symmetry_verdict",
    "critical_theta",
    "uniqueness_field",
]

OPTIMIZER_CAP = 16  # diagnostic guard on the reported optimizer set size


@dataclass(frozen=True)
class FieldProfile:
    """Step function [0,1] -> closed mean range, on a block partition."""

    masses: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "masses", np.asarray(self.masses, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.masses.shape != self.values.shape:
            raise ValueError("masses and values must have matching shape")

    @property
    def k(self) -> int:
        return len(self.masses)

    def value_at(self, u):
        bounds = np.cumsum(self.masses)
        bounds[-1] = 1.0
        idx = np.minimum(
            np.searchsorted(bounds, np.asarray(u, dtype=float), side="left"),
            self.k - 1,
        )
        return self.values[idx]

    def mean(self) -> float:
        return float(self.masses @ self.values)

    def spread(self) -> float:
        """Distance to the nearest constant profile in sup norm."""
        return float(self.values.max() - self.values.min()) / 2.0

    def sup_distance(self, other: "FieldProfile") -> float:
        grid = np.unique(
            np.concatenate(
                [np.cumsum(self.masses), np.cumsum(other.masses), [1.0]]
            )
        )
        mids = grid - 0.5 * np.diff(np.concatenate([[0.0], grid]))
        return float(np.max(np.abs(self.value_at(mids) - other.value_at(mids))))


@dataclass
class SolveReport:
    """Optimizer set with objectives, residuals, and bookkeeping.

    ``optimizers`` holds floats for scalar problems and
    :class:`FieldProfile` objects for profile problems, sorted by
    objective, best first.
    """

    optimizers: list
    objectives: list
    residuals: list
    iterations: list
    verdict: str = "ok"
    extras: dict = field(default_factory=dict)

    @property
    def best_value(self) -> float:
        return self.objectives[0]


@dataclass
class MultistartSpec:
    """Start-set and iteration budget for the profile solver."""

    n_random: int = 64
    constant_grid: int = 17
    damping: float = 0.5
    max_iter: int = 100_000
    tol: float = 1e-11
    seed: int = 0
    value_tol: float = 1e-8
    dedup_sup: float = 1e-6
    residual_tol: float = 1e-8


# -- scalar problem ---------------------------------------------------------


def scalar_objective(mu: BaseMeasure, theta: float, B: float, v: int, x):
    """H_{theta,B}(x) = theta x^v + B x - gamma(beta(x)) on the support hull."""
    xs = np.asarray(x, dtype=float)
    out = theta * xs**v + B * xs - mu.rate_at_mean(xs)
    return float(out) if out.ndim == 0 else out


def _foc_residual(mu, theta, B, v, x):
    return x - mu.tilt_mean(theta * v * x ** (v - 1) + B)


def scalar_maximizers(
    mu: BaseMeasure,
    theta: float,
    B: float = 0.0,
    v: int = 2,
    grid: int = 4096,
    value_tol: float = 1e-9,
    x_tol: float = 1e-7,
) -> SolveReport:
    """All global maximizers of the scalar objective (the set A_theta).

    Dense grid over the support hull, local golden-section refinement around
    every grid-local maximum, then a first-order-condition polish.  Returns
    every candidate within ``value_tol`` of the global maximum, deduplicated
    at ``x_tol``; interior maximizers carry the fixed-point residual
    ``|x - alpha'(theta v x^{v-1} + B)|``.
    """
    lo, hi = mu.support_min, mu.support_max
    xs = np.linspace(lo, hi, grid)
    hvals = scalar_objective(mu, theta, B, v, xs)

    def negobj(x):
        return -scalar_objective(mu, theta, B, v, float(x))

    cands: list[float] = [lo, hi]
    interior = np.where(
        (hvals[1:-1] >= hvals[:-2]) & (hvals[1:-1] >= hvals[2:])
    )[0] + 1
    for i in interior:
        res = minimize_scalar(
            negobj, bounds=(xs[i - 1], xs[i + 1]), method="bounded",
            options={"xatol": 1e-12},
        )
        cands.append(float(res.x))
    polished = []
    span = hi - lo
    for x in cands:
        best_x = x
        if lo + 1e-12 < x < hi - 1e-12:
            # polish on the stationarity equation when a sign change brackets x
            delta = max(1e-9, 1e-6 * span)
            while delta < span:
                a, b = max(x - delta, lo + 1e-13), min(x + delta, hi - 1e-13)
                fa, fb = _foc_residual(mu, theta, B, v, a), _foc_residual(mu, theta, B, v, b)
                if fa == 0.0:
                    best_x = a
                    break
                if fa * fb < 0:
                    root = brentq(
                        lambda t: _foc_residual(mu, theta, B, v, t), a, b,
                        xtol=1e-14, rtol=8.9e-16,
                    )
                    if scalar_objective(mu, theta, B, v, root) >= scalar_objective(
                        mu, theta, B, v, best_x
                    ) - 1e-12:
                        best_x = float(root)
                    break
                delta *= 4.0
        polished.append(best_x)
    vals = [scalar_objective(mu, theta, B, v, x) for x in polished]
    top = max(vals)
    keep = sorted(
        (x for x, val in zip(polished, vals) if val >= top - value_tol),
    )
    dedup: list[float] = []
    for x in keep:
        if not dedup or abs(x - dedup[-1]) > x_tol:
            dedup.append(x)
    if len(dedup) > OPTIMIZER_CAP:
        raise ValueError(
            f"optimizer set size {len(dedup)} exceeds cap {OPTIMIZER_CAP}; "
            "objective is numerically flat"
        )
    dedup.sort(key=lambda x: -scalar_objective(mu, theta, B, v, x))
    resid = [
        abs(_foc_residual(mu, theta, B, v, x))
        if lo + 1e-12 < x < hi - 1e-12
        else 0.0
        for x in dedup
    ]
    return SolveReport(
        optimizers=dedup,
        objectives=[scalar_objective(mu, theta, B, v, x) for x in dedup],
        residuals=resid,
        iterations=[grid] * len(dedup),
    )


def scalar_fixed_points(
    mu: BaseMeasure, theta: float, B: float = 0.0, v: int = 2, grid: int = 4096
):
    """All roots of x = alpha'(theta v x^{v-1} + B) with a stability tag.

    Roots come from sign changes on the grid, refined by bisection to 1e-12;
    a root is stable when the iteration map has derivative magnitude < 1.
    """
    lo, hi = mu.support_min, mu.support_max
    xs = np.linspace(lo, hi, grid)
    g = xs - mu.tilt_mean(theta * v * xs ** (v - 1) + B)
    roots = []
    for i in range(grid - 1):
        if g[i] == 0.0:
            roots.append(float(xs[i]))
        elif g[i] * g[i + 1] < 0:
            roots.append(
                float(
                    brentq(
                        lambda t: _foc_residual(mu, theta, B, v, t),
                        xs[i],
                        xs[i + 1],
                        xtol=1e-12,
                    )
                )
            )
    if g[-1] == 0.0:
        roots.append(float(xs[-1]))
    out = []
    for r in roots:
        lam = theta * v * r ** (v - 1) + B
        slope = theta * v * (v - 1) * r ** (v - 2) * mu.tilt_var(lam) if v >= 2 else 0.0
        out.append((r, abs(slope) < 1.0))
    return out


@dataclass
class QuadraticCaseReport:
    case: int  # 1: unique zero, 2: unique with sign of B, 3: symmetric pair
    t: float
    threshold_theta: float
    secasn_grid_ok: bool
    maximizers: SolveReport


def quadratic_case(mu: BaseMeasure, theta: float, B: float = 0.0) -> QuadraticCaseReport:
    """Trichotomy of the quadratic (v=2) problem for symmetric base measures.

    Requires mu symmetric about 0.  The variance monotonicity hypothesis
    (alpha'' non-increasing in |theta|) is checked on a grid only; a
    violation flags the report and the answer falls back to
    ``scalar_maximizers``.
    """
    pts, wts = mu.points, mu.weights
    if not (
        np.allclose(pts, -pts[::-1], atol=1e-12, rtol=0.0)
        and np.allclose(wts, wts[::-1], atol=1e-12, rtol=0.0)
    ):
        raise ValueError("quadratic_case requires a base measure symmetric about 0")
    thetas = np.linspace(0.0, 10.0, 256)
    variances = mu.tilt_var(thetas)
    secasn_ok = bool(np.all(np.diff(variances) <= 1e-12))
    threshold = 1.0 / (2.0 * mu.tilt_var(0.0))
    report = scalar_maximizers(mu, theta, B, v=2)
    if B == 0.0 and theta <= threshold:
        case, t = 1, 0.0
    elif B != 0.0:
        case, t = 2, report.optimizers[0]
    else:
        case, t = 3, max(report.optimizers)
    return QuadraticCaseReport(case, float(t), threshold, secasn_ok, report)


# -- profile problem --------------------------------------------------------


def _as_profile(kernel: StepKernel, f) -> tuple[StepKernel, np.ndarray]:
    if isinstance(f, FieldProfile):
        if f.k == kernel.k and np.allclose(f.masses, kernel.masses, atol=1e-12):
            return kernel, f.values.copy()
        return refine_kernel_profile(kernel, f.masses, f.values)
    values = np.asarray(f, dtype=float)
    if values.ndim == 0:
        return kernel, np.full(kernel.k, float(values))
    if values.shape != (kernel.k,):
        raise ValueError("profile values must match the kernel partition")
    return kernel, values.copy()


def profile_objective(
    motif: MotifGraph,
    kernel: StepKernel,
    mu: BaseMeasure,
    theta: float,
    B: float,
    f,
) -> float:
    """theta G_W(f) + B int f - int gamma(beta(f)), exact for step data."""
    kernel, values = _as_profile(kernel, f)
    if np.any(values < mu.support_min - 1e-12) or np.any(values > mu.support_max + 1e-12):
        raise ValueError("profile values outside the support hull")
    rates = mu.rate_at_mean(values)
    if np.any(np.isinf(rates)):
        return -math.inf
    return (
        theta * hom_functional(motif, kernel, values)
        + B * float(kernel.masses @ values)
        - float(kernel.masses @ rates)
    )


def profile_gradient(motif, kernel, mu, theta, B, f) -> np.ndarray:
    """Per-block gradient d obj / d f_b = m_b (theta vartheta_b + B - beta(f_b))."""
    kernel, values = _as_profile(kernel, f)
    vt = _vartheta_from_tensor(sym_tensor(motif, kernel), motif.v, kernel.masses, values)
    return kernel.masses * (theta * vt + B - mu.inverse_mean(values))


@dataclass
class FixedPointResult:
    profile: FieldProfile
    objective: float
    residual: float
    iterations: int
    converged: bool


def profile_fixed_point(
    motif: MotifGraph,
    kernel: StepKernel,
    mu: BaseMeasure,
    theta: float,
    B: float,
    f0,
    damping: float = 0.5,
    max_iter: int = 100_000,
    tol: float = 1e-11,
) -> FixedPointResult:
    """Damped iteration of f <- alpha'(theta vartheta_W,f + B), blockwise.

    Stops when the sup-norm iterate change drops below ``tol`` or after
    ``max_iter`` sweeps; non-convergence is reported, not raised.  The
    damping handles the oscillation of the undamped map at negative theta.
    """
    if not 0.0 < damping <= 1.0:
        raise ValueError("damping must be in (0, 1]")
    kernel, f = _as_profile(kernel, f0)
    f = np.clip(f, mu.support_min, mu.support_max)
    sym_t = sym_tensor(motif, kernel)
    v = motif.v
    converged = False
    iterations = 0
    eta = damping
    best_delta = math.inf
    stalled = 0
    for iterations in range(1, max_iter + 1):
        vt = _vartheta_from_tensor(sym_t, v, kernel.masses, f)
        target = mu.tilt_mean(theta * vt + B)
        new = (1.0 - eta) * f + eta * target
        delta = float(np.max(np.abs(new - f)))
        f = new
        if delta <= tol:
            converged = True
            break
        # a 2-cycle of the damped map shows up as a non-decreasing delta;
        # halving the damping restores contraction near the cycle's center
        if delta <= 0.999 * best_delta:
            best_delta = delta
            stalled = 0
        else:
            stalled += 1
            if stalled >= 64 and eta > 1.0 / 1024.0:
                eta *= 0.5
                best_delta = math.inf
                stalled = 0
    vt = _vartheta_from_tensor(sym_t, v, kernel.masses, f)
    residual = float(np.max(np.abs(f - mu.tilt_mean(theta * vt + B))))
    profile = FieldProfile(kernel.masses.copy(), f)
    objective = profile_objective(motif, kernel, mu, theta, B, f)
    return FixedPointResult(profile, objective, residual, iterations, converged)


def solve_free_energy(
    motif: MotifGraph,
    kernel: StepKernel,
    mu: BaseMeasure,
    theta: float,
    B: float = 0.0,
    spec: MultistartSpec | None = None,
) -> SolveReport:
    """Multistart estimate of Z(theta) and the optimizer set F_theta.

    Starts the fixed-point iteration from constant profiles at every scalar
    fixed point, a grid of interior constants, and seeded random block
    profiles; Z is the best objective over starts whose first-order residual
    meets ``spec.residual_tol``, and F_theta collects every such candidate
    within ``spec.value_tol`` of Z, deduplicated in sup norm.
    """
    spec = spec or MultistartSpec()
    c_mean = float(kernel.masses @ degree_profile(motif, kernel))
    lo, hi = mu.support_min, mu.support_max
    starts: list[np.ndarray] = []
    for root, _stable in scalar_fixed_points(mu, theta * c_mean, B, motif.v):
        starts.append(np.full(kernel.k, root))
    for t in np.linspace(lo, hi, spec.constant_grid + 2)[1:-1]:
        starts.append(np.full(kernel.k, t))
    rng = np.random.default_rng(spec.seed)
    for _ in range(spec.n_random):
        starts.append(rng.uniform(lo, hi, size=kernel.k))
    results = [
        profile_fixed_point(
            motif, kernel, mu, theta, B, f0,
            damping=spec.damping, max_iter=spec.max_iter, tol=spec.tol,
        )
        for f0 in starts
    ]
    good = [r for r in results if r.residual <= spec.residual_tol]
    if not good:
        best = max(results, key=lambda r: r.objective)
        return SolveReport(
            [best.profile], [best.objective], [best.residual], [best.iterations],
            verdict="unconverged",
        )
    z = max(r.objective for r in good)
    near = sorted(
        (r for r in good if r.objective >= z - spec.value_tol),
        key=lambda r: -r.objective,
    )
    kept: list[FixedPointResult] = []
    for r in near:
        if all(r.profile.sup_distance(k.profile) > spec.dedup_sup for k in kept):
            kept.append(r)
    if len(kept) > OPTIMIZER_CAP:
        raise ValueError(
            f"optimizer set size {len(kept)} exceeds cap {OPTIMIZER_CAP}"
        )
    stray = max(
        (r.objective for r in results if r.residual > spec.residual_tol),
        default=-math.inf,
    )
    verdict = "ok" if stray <= z + spec.value_tol else "unconverged-candidates"
    return SolveReport(
        optimizers=[r.profile for r in kept],
        objectives=[r.objective for r in kept],
        residuals=[r.residual for r in kept],
        iterations=[r.iterations for r in kept],
        verdict=verdict,
        extras={
            "Z": z,
            "n_starts": len(starts),
            "n_converged": len(good),
            "all_candidates": results,
        },
    )


@dataclass
class SymmetryVerdict:
    verdict: str  # "symmetric" | "broken" | "inconclusive"
    best_constant: float
    best_nonconstant: float
    gap: float
    sufficient_conditions: dict
    report: SolveReport


def replica_symmetry_verdict(
    motif: MotifGraph,
    kernel: StepKernel,
    mu: BaseMeasure,
    theta: float,
    B: float = 0.0,
    spec: MultistartSpec | None = None,
    const_tol: float = 1e-6,
) -> SymmetryVerdict:
    """Classify the optimizer set: all constant, provably beaten, or unclear.

    ``broken`` needs a non-constant candidate beating the best constant
    objective by more than 1e-6; ``symmetric`` needs every near-optimal
    candidate to be constant-like and no non-constant within 1e-8.  The
    sufficient conditions of the constancy theorem (regular kernel, strict
    positivity matched to the sign of theta, v even or stochastically
    non-negative mu) are reported alongside, not used for the verdict.
    """
    g1 = hom_functional(motif, kernel, np.ones(kernel.k))
    const_report = scalar_maximizers(mu, theta * g1, B, motif.v)
    best_constant = const_report.best_value
    report = solve_free_energy(motif, kernel, mu, theta, B, spec)
    results = report.extras.get("all_candidates", [])
    spec = spec or MultistartSpec()
    noncon = [
        r.objective
        for r in results
        if r.residual <= spec.residual_tol and r.profile.spread() > const_tol
    ]
    best_nonconstant = max(noncon, default=-math.inf)
    regular, const = is_regular(motif, kernel)
    suff = {
        "regular": regular,
        "degree_constant": const,
        "theta_w_positive": bool(theta != 0.0 and theta * kernel.min_value() > 0),
        "v_even": motif.v % 2 == 0,
        "stochastically_nonnegative": is_stochastically_nonnegative(mu),
    }
    if best_nonconstant > best_constant + const_tol:
        verdict = "broken"
    elif (
        all(p.spread() <= const_tol for p in report.optimizers)
        and best_nonconstant <= best_constant + spec.value_tol
    ):
        verdict = "symmetric"
    else:
        verdict = "inconclusive"
    return SymmetryVerdict(
        verdict=verdict,
        best_constant=best_constant,
        best_nonconstant=best_nonconstant,
        gap=best_nonconstant - best_constant,
        sufficient_conditions=suff,
        report=report,
    )


# -- phase transitions ------------------------------------------------------


def critical_theta(
    mu: BaseMeasure,
    v: int,
    B: float = 0.0,
    bracket: tuple[float, float] = (1e-3, 8.0),
    tol: float = 1e-8,
    validate_points: int = 32,
) -> float:
    """Bisection for the temperature where x=0 stops being a global maximizer.

    Requires ``alpha'(0) = 0`` (so the objective vanishes at x=0) and a
    bracket with the predicate true at the left end and false at the right.
    The predicate "the global maximum of H_{theta,0} is <= 1e-13" is trusted
    to be monotone in theta; a 32-point post-hoc scan verifies this and
    raises otherwise.
    """
    if B != 0.0:
        raise ValueError("critical_theta is defined for B = 0")
    if abs(mu.tilt_mean(0.0)) > 1e-12:
        raise ValueError("critical_theta requires alpha'(0) = 0")

    def zero_is_global(theta: float) -> bool:
        return scalar_maximizers(mu, theta, 0.0, v).best_value <= 1e-14

    lo, hi = bracket
    if not zero_is_global(lo):
        raise ValueError(f"predicate already false at bracket low {lo}")
    if zero_is_global(hi):
        raise ValueError(f"predicate still true at bracket high {hi}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if zero_is_global(mid):
            lo = mid
        else:
            hi = mid
    theta_c = 0.5 * (lo + hi)
    scan = [zero_is_global(t) for t in np.linspace(bracket[0], bracket[1], validate_points)]
    flipped = False
    for val in scan:
        if not val:
            flipped = True
        elif flipped:
            raise ValueError("predicate is not monotone on the bracket")
    return theta_c


def uniqueness_field(mu: BaseMeasure, theta: float, v: int, B_grid):
    """Smallest grid field B from which the scalar maximizer stays unique.

    Scans ``B_grid`` ascending and returns ``(B0, table)`` where table rows
    are (B, maximizer count, best maximizer).  Requires support within
    [-1, 1].
    """
    if mu.support_min < -1.0 - 1e-12 or mu.support_max > 1.0 + 1e-12:
        raise ValueError("uniqueness_field requires support within [-1, 1]")
    bs = sorted(float(b) for b in B_grid)
    table = []
    for b in bs:
        rep = scalar_maximizers(mu, theta, b, v)
        table.append((b, len(rep.optimizers), rep.optimizers[0]))
    b0 = None
    for i in range(len(table)):
        if all(row[1] == 1 for row in table[i:]):
            b0 = table[i][0]
            break
    return b0, table
