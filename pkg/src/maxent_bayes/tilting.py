"""Constrained entropy maximization over finite alphabets.

The core primitive is the exponential tilt p_lam = q * exp(-lam * V) / Z(lam),
the unique distribution matching a mean constraint V . p = c while staying as
close as possible (in relative entropy) to the reference q.  The multiplier
lam is found by bracketing bisection followed by a Newton polish; the map
lam -> E_{p_lam}[V] is strictly decreasing whenever V is non-constant on the
support, so bisection is globally convergent.

All partition-function arithmetic is done in the log domain with
max-subtraction, so large multipliers neither overflow nor underflow.

A second solver minimizes other convex divergences under the same constraint
(multiplicative-update steps with constraint re-projection), which lets tests
measure how far non-KL projections land from the exponential tilt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    DegeneratePotential,
    InfeasibleConstraint,
    NonConvergence,
    UnsupportedGenerator,
)
from .measures import (
    FiniteDistribution,
    as_potential,
    kl_divergence,
    total_variation,
)

# Bracket expansion stops at |lam| <= 700 / max|V| to keep exp arguments sane.
LAMBDA_CAP_SCALE = 700.0
DEFAULT_TILT_TOL = 1e-10
DEFAULT_PROJECTION_TOL = 1e-8
PROJECTION_ITERATION_CAP = 100_000


@dataclass(frozen=True, eq=False)
class TiltedDistribution:
    """Reference q tilted by exp(-lam * V), realizing the mean constraint.

    ``lam`` may be +/-inf for the degenerate boundary limit where the tilt
    concentrates on the extreme set of V; ``log_partition`` is None there.
    """

    reference: FiniteDistribution
    potential: np.ndarray
    lam: float
    realized: FiniteDistribution
    log_partition: float | None = None

    def constraint_value(self) -> float:
        return float(np.dot(self.potential, self.realized.weights))


@dataclass(frozen=True)
class ConstraintSpec:
    """A potential V together with a point target c or a window [lo, hi]."""

    potential: object
    target: float | tuple[float, float]

    def __post_init__(self):
        if self.is_interval:
            lo, hi = self.target
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
                raise ValueError(f"invalid target interval {self.target!r}")
        elif not math.isfinite(float(self.target)):
            raise ValueError(f"invalid point target {self.target!r}")

    @property
    def is_interval(self) -> bool:
        return isinstance(self.target, (tuple, list))

    @classmethod
    def point(cls, potential, c: float) -> "ConstraintSpec":
        return cls(potential, float(c))

    @classmethod
    def interval(cls, potential, lo: float, hi: float) -> "ConstraintSpec":
        return cls(potential, (float(lo), float(hi)))


SUPPORTED_GENERATORS = ("kl", "reverse_kl", "squared_euclidean", "chi_squared")


@dataclass(frozen=True)
class DivergenceSpec:
    """Named convex divergence generator; each is convex in p on the simplex."""

    generator: str
    parameters: tuple = ()

    def __post_init__(self):
        if self.generator not in SUPPORTED_GENERATORS:
            raise UnsupportedGenerator(
                f"generator {self.generator!r} not in {SUPPORTED_GENERATORS}"
            )


# ---------------------------------------------------------------------------
# Multiplier root-finding on log-weights
# ---------------------------------------------------------------------------
def _tilt_state(log_w: np.ndarray, v: np.ndarray, lam: float):
    """Normalized weights and log-partition of log_w - lam * v."""
    a = log_w - lam * v
    m = a.max()
    w = np.exp(a - m)
    z = w.sum()
    return w / z, m + math.log(z)


def _solve_multiplier(
    log_w: np.ndarray, v: np.ndarray, c: float, tol: float
) -> tuple[float, np.ndarray, float, dict]:
    """Find lam with sum_i softmax(log_w - lam v)_i v_i = c.

    Assumes v is non-constant and min(v) < c < max(v) (caller checks).
    Returns (lam, weights, log_partition, report).
    """
    cap = LAMBDA_CAP_SCALE / max(np.abs(v).max(), 1e-300)

    def mean_at(lam: float):
        w, log_z = _tilt_state(log_w, v, lam)
        return float(np.dot(w, v)), w, log_z

    m0, w0, z0 = mean_at(0.0)
    if m0 == c:
        return 0.0, w0, z0, {"bracket": (0.0, 0.0), "expansions": 0, "bisections": 0, "newton": 0, "residual": 0.0}

    lo, hi = -1.0, 1.0
    g_lo = mean_at(lo)[0] - c
    g_hi = mean_at(hi)[0] - c
    expansions = 0
    # mean is decreasing in lam: widen until g(lo) >= 0 >= g(hi)
    while g_lo < 0.0:
        hi, g_hi = lo, g_lo
        lo *= 2.0
        expansions += 1
        if -lo > cap:
            raise InfeasibleConstraint(
                f"target {c!r} is numerically unattainable (multiplier below -{cap:.3g})"
            )
        g_lo = mean_at(lo)[0] - c
    while g_hi > 0.0:
        lo, g_lo = hi, g_hi
        hi *= 2.0
        expansions += 1
        if hi > cap:
            raise InfeasibleConstraint(
                f"target {c!r} is numerically unattainable (multiplier above {cap:.3g})"
            )
        g_hi = mean_at(hi)[0] - c
    bracket = (lo, hi)

    bisections = 0
    while hi - lo > 1e-2 * (1.0 + abs(lo) + abs(hi)) and bisections < 200:
        mid = 0.5 * (lo + hi)
        if mean_at(mid)[0] - c > 0.0:
            lo = mid
        else:
            hi = mid
        bisections += 1

    lam = 0.5 * (lo + hi)
    newton = 0
    for _ in range(100):
        m, w, log_z = mean_at(lam)
        g = m - c
        if abs(g) <= tol:
            return lam, w, log_z, {
                "bracket": bracket,
                "expansions": expansions,
                "bisections": bisections,
                "newton": newton,
                "residual": abs(g),
            }
        if g > 0.0:
            lo = lam
        else:
            hi = lam
        var = float(np.dot(w, (v - m) ** 2))
        step_to = lam + g / var if var > 0.0 else 0.5 * (lo + hi)
        if not (lo < step_to < hi):
            step_to = 0.5 * (lo + hi)
        lam = step_to
        newton += 1
    raise NonConvergence(
        f"multiplier search stalled at residual {abs(g):.3g}", residual=abs(g)
    )


def _support_log_weights(q: FiniteDistribution) -> tuple[np.ndarray, np.ndarray]:
    sup = q.support
    return sup, np.log(q.weights[sup])


def solve_tilt_with_report(
    q: FiniteDistribution, potential, c: float, tol: float = DEFAULT_TILT_TOL
) -> tuple[TiltedDistribution, dict]:
    """solve_tilt, also returning solver diagnostics for verbose output."""
    v = as_potential(potential, q.alphabet)
    sup, log_w = _support_log_weights(q)
    v_sup = v[sup]
    v_lo, v_hi = float(v_sup.min()), float(v_sup.max())

    trivial_report = {"bracket": (0.0, 0.0), "expansions": 0, "bisections": 0, "newton": 0, "residual": 0.0}
    if v_lo == v_hi:
        if abs(c - v_lo) <= tol:
            return _identity_tilt(q, v), trivial_report
        raise DegeneratePotential(
            f"potential is constant ({v_lo!r}) on the support but target is {c!r}"
        )
    if not (v_lo < c < v_hi):
        raise InfeasibleConstraint(
            f"target {c!r} outside the attainable open interval ({v_lo!r}, {v_hi!r})"
        )
    # already satisfied in the caller's arithmetic: keep lam = 0 exactly
    if float(np.dot(q.weights[sup], v_sup)) == c:
        return _identity_tilt(q, v), trivial_report

    lam, w_sup, log_z, report = _solve_multiplier(log_w, v_sup, c, tol)
    weights = np.zeros(q.size)
    weights[sup] = w_sup
    realized = FiniteDistribution(q.alphabet, weights)
    tilt = TiltedDistribution(
        reference=q, potential=v, lam=lam, realized=realized, log_partition=log_z
    )
    return tilt, report


def solve_tilt(
    q: FiniteDistribution, potential, c: float, tol: float = DEFAULT_TILT_TOL
) -> TiltedDistribution:
    """Tilt q onto the constraint set {p : V . p = c}.

    The returned multiplier is the unique one matching the constraint to
    within ``tol``; the realized measure is the relative-entropy projection
    of q onto the constraint set.
    """
    return solve_tilt_with_report(q, potential, c, tol)[0]


def _identity_tilt(q: FiniteDistribution, v: np.ndarray) -> TiltedDistribution:
    return TiltedDistribution(
        reference=q,
        potential=v,
        lam=0.0,
        realized=FiniteDistribution(q.alphabet, q.weights),
        log_partition=0.0,
    )


def _boundary_projection(
    q: FiniteDistribution, v: np.ndarray, end: str
) -> TiltedDistribution:
    """Conditioning of q on the extreme set of V: the lam -> +/-inf limit."""
    sup = q.support
    v_sup = v[sup]
    extreme = v_sup.max() if end == "max" else v_sup.min()
    mask = np.zeros(q.size, dtype=bool)
    mask[sup[v_sup == extreme]] = True
    weights = np.where(mask, q.weights, 0.0)
    realized = FiniteDistribution(q.alphabet, weights / weights.sum())
    lam = -math.inf if end == "max" else math.inf
    return TiltedDistribution(
        reference=q, potential=v, lam=lam, realized=realized, log_partition=None
    )


def i_projection(
    P: FiniteDistribution, constraint: ConstraintSpec, tol: float = DEFAULT_TILT_TOL
) -> tuple[TiltedDistribution, float]:
    """Minimize KL(mu || P) over the constraint set; returns (tilt, rate).

    Point targets on the boundary of the attainable range resolve to P
    conditioned on the extreme set of V (the infinite-multiplier limit);
    interval targets resolve by convexity to P itself when its mean is
    inside the window, otherwise to the window endpoint nearer that mean.
    """
    v = as_potential(constraint.potential, P.alphabet)
    sup = P.support
    v_lo, v_hi = float(v[sup].min()), float(v[sup].max())

    if constraint.is_interval:
        lo, hi = constraint.target
        if lo > v_hi or hi < v_lo:
            raise InfeasibleConstraint(
                f"window [{lo!r}, {hi!r}] misses the attainable range [{v_lo!r}, {v_hi!r}]"
            )
        mean = float(np.dot(v, P.weights))
        if lo <= mean <= hi:
            return _identity_tilt(P, v), 0.0
        c = lo if mean < lo else hi
        c = min(max(c, v_lo), v_hi)
    else:
        c = float(constraint.target)
        if not (v_lo <= c <= v_hi):
            raise InfeasibleConstraint(
                f"target {c!r} outside the attainable range [{v_lo!r}, {v_hi!r}]"
            )

    if v_lo == v_hi:
        return _identity_tilt(P, v), 0.0
    if c == v_lo or c == v_hi:
        tilt = _boundary_projection(P, v, "max" if c == v_hi else "min")
        return tilt, kl_divergence(tilt.realized, P)

    tilt = solve_tilt(P, v, c, tol)
    return tilt, kl_divergence(tilt.realized, P)


# ---------------------------------------------------------------------------
# General-divergence projections
# ---------------------------------------------------------------------------
def _generator_functions(
    spec: DivergenceSpec, q: np.ndarray
) -> tuple[
    Callable[[np.ndarray], float],
    Callable[[np.ndarray], np.ndarray],
    Callable[[np.ndarray], np.ndarray],
]:
    """Objective G(p, q), gradient, and diagonal Hessian in p, closed over q.

    Derivatives assume strictly positive p on the support of q, which the
    multiplicative-update iterates guarantee.
    """
    if spec.generator == "kl":
        return (
            lambda p: float(np.sum(p * np.log(p / q))),
            lambda p: np.log(p / q) + 1.0,
            lambda p: 1.0 / p,
        )
    if spec.generator == "reverse_kl":
        return (
            lambda p: float(np.sum(q * np.log(q / p))),
            lambda p: -q / p,
            lambda p: q / (p * p),
        )
    if spec.generator == "squared_euclidean":
        return (
            lambda p: 0.5 * float(np.sum((p - q) ** 2)),
            lambda p: p - q,
            lambda p: np.ones_like(p),
        )
    if spec.generator == "chi_squared":
        return (
            lambda p: float(np.sum((p - q) ** 2 / q)),
            lambda p: 2.0 * (p - q) / q,
            lambda p: 2.0 / q,
        )
    raise UnsupportedGenerator(f"generator {spec.generator!r} has no closed-form derivative")


def _kkt_residual(grad: np.ndarray, v: np.ndarray) -> float:
    """Max-norm of the gradient after projecting out the 1 and V directions."""
    basis = np.column_stack([np.ones_like(v), v])
    coef, *_ = np.linalg.lstsq(basis, grad, rcond=None)
    return float(np.abs(grad - basis @ coef).max())


def _newton_kkt_polish(
    objective: Callable,
    gradient: Callable,
    hess_diag: Callable,
    v: np.ndarray,
    p: np.ndarray,
    tol: float,
    max_iter: int = 60,
) -> np.ndarray:
    """Equality-constrained Newton on {sum p = 1, V . p = c} from a feasible p.

    Every step solves the KKT system with the (diagonal) Hessian, stays in
    the affine constraint set exactly, and is damped to keep the iterate
    strictly positive.  Converges quadratically for interior optima.
    """
    a = np.column_stack([np.ones_like(v), v])
    for _ in range(max_iter):
        grad = gradient(p)
        if _kkt_residual(grad, v) <= tol:
            break
        h_inv = 1.0 / hess_diag(p)
        ah = a * h_inv[:, None]
        m = a.T @ ah  # 2x2
        try:
            nu = np.linalg.solve(m, -(ah.T @ grad))
        except np.linalg.LinAlgError:
            break
        dp = -h_inv * (grad + a @ nu)
        if not np.all(np.isfinite(dp)) or np.abs(dp).max() == 0.0:
            break
        # fraction-to-boundary damping keeps the iterate strictly positive
        neg = dp < 0
        t = 1.0
        if np.any(neg):
            t = min(1.0, float(0.99 * np.min(-p[neg] / dp[neg])))
        obj = objective(p)
        while t > 1e-18:
            cand = p + t * dp
            if np.all(cand > 0) and objective(cand) <= obj + 1e-15:
                p = cand
                break
            t *= 0.5
        else:
            break
    return p


def _resolve_point_target(
    q: FiniteDistribution, v: np.ndarray, constraint: ConstraintSpec
) -> float | None:
    """Interval case split; None means q itself is already feasible."""
    sup = q.support
    v_lo, v_hi = float(v[sup].min()), float(v[sup].max())
    if constraint.is_interval:
        lo, hi = constraint.target
        if lo > v_hi or hi < v_lo:
            raise InfeasibleConstraint(
                f"window [{lo!r}, {hi!r}] misses the attainable range [{v_lo!r}, {v_hi!r}]"
            )
        mean = float(np.dot(v, q.weights))
        if lo <= mean <= hi:
            return None
        return lo if mean < lo else hi
    return float(constraint.target)


def divergence_projection(
    spec: DivergenceSpec,
    q: FiniteDistribution,
    constraint: ConstraintSpec,
    tol: float = DEFAULT_PROJECTION_TOL,
) -> FiniteDistribution:
    """Minimize the named divergence G(p, q) over {p : V . p = c}.

    Entropic mirror steps p <- p * exp(-a grad) with the mean constraint
    re-enforced after every step (a tilt of the iterate), halving the step
    whenever the objective fails to decrease.  Iterates remain strictly
    positive on support(q), so point targets must lie strictly inside the
    attainable range.  Stops when the KKT residual (gradient minus its
    projection onto span{1, V}) drops below ``tol``.
    """
    v_full = as_potential(constraint.potential, q.alphabet)
    c = _resolve_point_target(q, v_full, constraint)
    if c is None:
        return FiniteDistribution(q.alphabet, q.weights)

    sup = q.support
    v = v_full[sup]
    qw = q.weights[sup]
    if float(v.min()) == float(v.max()):
        if abs(c - float(v.min())) <= tol:
            return FiniteDistribution(q.alphabet, q.weights)
        raise DegeneratePotential(
            f"potential is constant ({float(v.min())!r}) on the support but target is {c!r}"
        )
    if not (float(v.min()) < c < float(v.max())):
        raise InfeasibleConstraint(
            f"target {c!r} not strictly inside ({float(v.min())!r}, {float(v.max())!r})"
        )

    objective, gradient, hess_diag = _generator_functions(spec, qw)

    # Feasible interior start: the exponential tilt of q onto the constraint.
    _, p, _, _ = _solve_multiplier(np.log(qw), v, c, DEFAULT_TILT_TOL)

    step = 0.5
    obj = objective(p)
    residual = math.inf
    coarse_tol = max(tol, 1e-6)
    for _ in range(PROJECTION_ITERATION_CAP):
        grad = gradient(p)
        residual = _kkt_residual(grad, v)
        if residual <= coarse_tol:
            break
        improved = False
        while step >= 1e-18:
            log_p_new = np.log(p) - step * (grad - grad.max())
            _, p_new, _, _ = _solve_multiplier(log_p_new, v, c, DEFAULT_TILT_TOL)
            obj_new = objective(p_new)
            if obj_new <= obj:
                p, obj = p_new, obj_new
                improved = True
                step = min(step * 1.5, 10.0)
                break
            step *= 0.5
        if not improved:
            # Step underflow: gradient lies in span{1, V} up to round-off.
            break
    if residual > tol:
        # Push from mirror-descent accuracy to the requested tolerance.
        p = _newton_kkt_polish(objective, gradient, hess_diag, v, p, tol)
        residual = _kkt_residual(gradient(p), v)
    if residual > tol:
        raise NonConvergence(
            f"projection stalled with KKT residual {residual:.3g} > {tol:.3g}",
            residual=residual,
        )

    weights = np.zeros(q.size)
    weights[sup] = p
    return FiniteDistribution(q.alphabet, weights)


def necessity_gap(
    spec: DivergenceSpec,
    q: FiniteDistribution,
    constraint: ConstraintSpec,
    tol: float = DEFAULT_PROJECTION_TOL,
) -> float:
    """Total-variation distance between the G-projection and the KL tilt.

    Zero exactly when the generator is relative entropy (self-agreement) or
    when the constraint pins p uniquely (binary alphabet, point target).
    """
    projected = divergence_projection(spec, q, constraint, tol)
    tilt, _ = i_projection(q, constraint)
    return total_variation(projected, tilt.realized)


def stationarity_residual(spec: DivergenceSpec, candidate: TiltedDistribution) -> float:
    """Euler-Lagrange residual of the generator at the candidate tilt.

    Evaluates the gradient of G(., reference) at the realized measure and
    removes the multiplier ambiguity by projecting out the constant and V
    directions; the max-norm of what is left is the residual.  It vanishes
    (to round-off) exactly for the relative-entropy generator.
    """
    p_full = candidate.realized.weights
    sup = np.flatnonzero(p_full > 0.0)
    p = p_full[sup]
    q = candidate.reference.weights[sup]
    v = candidate.potential[sup]
    _, gradient, _ = _generator_functions(spec, q)
    return _kkt_residual(gradient(p), v)
