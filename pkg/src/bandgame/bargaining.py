"""Nash bargaining over the relay band: product objective, CG solver, region tools.

The bargaining objective is the Nash product

    pi(w1, w2) = (u1(w) - u1_ne) * (u2(w) - u2_ne)

whose maximizer over the utilities weakly dominating the equilibrium pair is
the Nash bargaining solution. This module provides the analytic gradient and
Hessian of pi, its eigenvalue-based concavity certificate, a projected
Polak-Ribiere conjugate-gradient solver with Newton step lengths, a brute-force
grid oracle, and the sampled utility region with its convex hull, Pareto
boundary and time-sharing mixtures.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .game import (BandAllocation, EquilibriumReport, MarginalTerms,
                   UtilityPair, marginal_terms, nash_equilibrium, utility_pair,
                   utility_value)
from .system_model import LinkBudget, Point, Scenario, link_budget


@dataclass(frozen=True)
class NashProductContext:
    """Frozen inputs of one bargaining problem: scenario, links, threat point.

    The threat point must be exactly the utilities at ``ne_alloc``; contexts
    built by :func:`make_context` satisfy this by construction.
    """

    scenario: Scenario
    budget: LinkBudget
    terms: MarginalTerms
    threat: UtilityPair
    ne_alloc: BandAllocation

    def __post_init__(self):
        check = utility_pair(self.ne_alloc, self.terms, self.scenario)
        if (check.u1, check.u2) != (self.threat.u1, self.threat.u2):
            raise ValueError("threat point does not equal the utilities at ne_alloc")


def make_context(scenario: Scenario, relay: Point) -> NashProductContext:
    """Build the bargaining context for one relay position (computes the NE)."""
    budget = link_budget(scenario, relay)
    terms = marginal_terms(budget, scenario)
    ne = nash_equilibrium(terms, scenario)
    return NashProductContext(
        scenario=scenario,
        budget=budget,
        terms=terms,
        threat=ne.utilities,
        ne_alloc=ne.allocation,
    )


def nash_product(alloc: BandAllocation, ctx: NashProductContext) -> float:
    """(u1 - u1_ne)*(u2 - u2_ne); negative outside the dominance quadrant."""
    u = utility_pair(alloc, ctx.terms, ctx.scenario)
    return (u.u1 - ctx.threat.u1) * (u.u2 - ctx.threat.u2)


def nash_product_gradient(alloc: BandAllocation, ctx: NashProductContext):
    """Analytic gradient (dpi/dw1, dpi/dw2).

    Uses d u_j / d w_i = -b * w_j for j != i: the opponent's utility sees w_i
    only through the price on its own rented band.
    """
    s, t = ctx.scenario, ctx.terms
    u = utility_pair(alloc, t, s)
    d1 = u.u1 - ctx.threat.u1
    d2 = u.u2 - ctx.threat.u2
    du1 = t.relay_advantage(1) - s.b * (2.0 * alloc.w1 + alloc.w2)
    du2 = t.relay_advantage(2) - s.b * (2.0 * alloc.w2 + alloc.w1)
    g1 = du1 * d2 + d1 * (-s.b * alloc.w2)
    g2 = d1 * du2 + d2 * (-s.b * alloc.w1)
    return g1, g2


@dataclass(frozen=True)
class Hessian2x2:
    """Second partials of the Nash product; symmetric by construction."""

    a11: float
    a22: float
    a12: float
    a21: float

    def trace(self) -> float:
        return self.a11 + self.a22


def hessian(alloc: BandAllocation, ctx: NashProductContext) -> Hessian2x2:
    """Analytic Hessian of the Nash product at ``alloc``."""
    s, t = ctx.scenario, ctx.terms
    b = s.b
    u = utility_pair(alloc, t, s)
    d1 = u.u1 - ctx.threat.u1
    d2 = u.u2 - ctx.threat.u2
    w1, w2 = alloc.w1, alloc.w2
    du1 = -t.phi1 + t.psi1 - b * (2.0 * w1 + w2)
    du2 = -t.phi2 + t.psi2 - b * (2.0 * w2 + w1)
    a11 = -2.0 * b * d2 - 2.0 * b * w2 * du1
    a22 = -2.0 * b * d1 - 2.0 * b * w1 * du2
    a12 = (-b * d2 - b * d1 + b * b * w1 * w2
           + (t.phi1 - t.psi1 + b * (2.0 * w1 + w2))
           * (t.phi2 - t.psi2 + b * (2.0 * w2 + w1)))
    return Hessian2x2(a11=a11, a22=a22, a12=a12, a21=a12)


@dataclass(frozen=True)
class EigenPair:
    """Real eigenvalues of a symmetric 2x2 Hessian, lambda1 <= lambda2."""

    lambda1: float
    lambda2: float
    delta: float

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("discriminant of a symmetric 2x2 matrix cannot be negative")


def eigenvalues(h: Hessian2x2) -> EigenPair:
    """Closed-form eigenvalues via trace and discriminant.

    delta = (a11 - a22)**2 + 4*a12**2 is a sum of squares, hence the
    eigenvalues are always real.
    """
    delta = (h.a11 - h.a22) ** 2 + 4.0 * h.a12 * h.a21
    root = math.sqrt(delta)
    tr = h.trace()
    return EigenPair(lambda1=(tr - root) / 2.0, lambda2=(tr + root) / 2.0, delta=delta)


def is_strictly_concave_at(alloc: BandAllocation, ctx: NashProductContext) -> bool:
    """True iff the Nash product Hessian at ``alloc`` is negative definite."""
    return eigenvalues(hessian(alloc, ctx)).lambda2 < 0.0


@dataclass(frozen=True)
class CgState:
    """Snapshot of one conjugate-gradient iteration (for traces/diagnostics)."""

    k: int
    iterate: BandAllocation
    gradient: tuple
    direction: tuple
    step: float
    beta: float
    direction_norm: float
    epsilon: float
    mode: str


def _projected_gradient(w, g, lo, hi):
    """First-order stationarity measure on the box: gradient components that
    point outward at an active bound do not count."""
    pg = np.array(g, dtype=float)
    pg[(w <= lo) & (pg > 0.0)] = 0.0
    pg[(w >= hi) & (pg < 0.0)] = 0.0
    return pg


def cg_minimize(fun, grad, hess, w0, lo, hi, epsilon, max_iter,
                mode: str = "joint", trace: list | None = None):
    """Projected nonlinear CG with Newton step lengths and PR+ updates.

    Minimizes ``fun`` over the box [lo, hi]^2. Per iteration: a Newton-optimal
    step ``t = -g.v / v.A.v`` along the current direction (falling back to
    steepest descent with Armijo backtracking when the curvature along v is
    not positive), projection onto the box, then the Polak-Ribiere direction
    update with negative beta clipped to zero. In ``alternating`` mode only
    one coordinate (1, 2, 1, 2, ...) keeps its new value each iteration.

    Stops when the direction norm falls to ``epsilon`` or, because projection
    can pin a coordinate against the box while the raw direction stays large,
    when the projected gradient does.

    Returns ``(w, residual, iterations, converged, notes)``.
    """
    if mode not in ("joint", "alternating"):
        raise ValueError(f"unknown mode {mode!r}")
    w = np.clip(np.asarray(w0, dtype=float), lo, hi)
    g = np.asarray(grad(w), dtype=float)
    v = -g
    k = 0
    notes = []
    fallbacks = 0
    pinned_stop = False
    span = hi - lo

    def residual_now():
        return min(float(np.linalg.norm(v)),
                   float(np.linalg.norm(_projected_gradient(w, g, lo, hi))))

    while k < max_iter:
        if float(np.linalg.norm(v)) <= epsilon:
            break
        if float(np.linalg.norm(_projected_gradient(w, g, lo, hi))) <= epsilon:
            pinned_stop = True
            break
        A = np.asarray(hess(w), dtype=float)
        curvature = float(v @ A @ v)
        if curvature > 0.0:
            t = -float(g @ v) / curvature
            w_next = np.clip(w + t * v, lo, hi)
        else:
            # Non-convex stretch: Newton length is undefined or an ascent;
            # take a safeguarded steepest-descent step instead. The first
            # trial moves at most 5% of the box: an objective like the Nash
            # product scores high again far beyond its local maximum, and a
            # long clipped step could hop the valley in between.
            fallbacks += 1
            v = -g
            slope = float(g @ v)
            f0 = fun(w)
            t = 0.05 * span / max(float(np.linalg.norm(v)), 1e-300)
            for _ in range(60):
                cand = np.clip(w + t * v, lo, hi)
                if fun(cand) <= f0 + 1e-4 * t * slope:
                    break
                t *= 0.5
            w_next = np.clip(w + t * v, lo, hi)
        if mode == "alternating":
            keep = w.copy()
            keep[k % 2] = w_next[k % 2]
            w_next = keep
        g_next = np.asarray(grad(w_next), dtype=float)
        gg = float(g @ g)
        beta = float(g_next @ (g_next - g)) / gg if gg > 0.0 else 0.0
        if beta < 0.0:
            beta = 0.0
        v = -g_next + beta * v
        w, g = w_next, g_next
        k += 1
        if trace is not None:
            trace.append(CgState(
                k=k, iterate=BandAllocation(float(w[0]), float(w[1])),
                gradient=(float(g[0]), float(g[1])),
                direction=(float(v[0]), float(v[1])),
                step=float(t), beta=float(beta),
                direction_norm=float(np.linalg.norm(v)),
                epsilon=float(epsilon), mode=mode))
    if fallbacks:
        notes.append(f"steepest-descent fallback used on {fallbacks} iteration(s)")
    if pinned_stop:
        notes.append("stopped at a box-stationary point (projected gradient below epsilon)")
    res = residual_now()
    return w, res, k, res <= epsilon, notes


# Deterministic offsets (fractions of omega) tried when the start point sits
# on the zero-gradient saddle at the threat point.
_RESTART_OFFSETS = ((0.01, 0.0162), (-0.01, -0.0162), (0.031, -0.017), (-0.031, 0.017))


def cg_nbs(ctx: NashProductContext, w0: BandAllocation | None = None,
           epsilon: float | None = None, max_iter: int = 200,
           mode: str = "joint", oracle_resolution: int = 401,
           trace: list | None = None) -> EquilibriumReport:
    """Nash bargaining solution by conjugate-gradient descent on -pi.

    The default start is the equilibrium allocation shrunk by 10 percent:
    renting slightly less band than at the equilibrium raises both utilities,
    so that point lies inside the dominance region the bargaining optimum
    belongs to. (A start such as (omega/2, omega/2) usually sits where both
    players lose relative to the threat point; the product of two losses is
    positive and grows away from the solution, so the iteration would chase
    the wrong quadrant and be rejected at the end.) Default epsilon is
    1e-8 * max(1, |grad pi|) at the start. A start where pi and its gradient
    both vanish sits on the saddle at the threat point and is nudged to a
    fixed nearby point first. Iterates are projected onto [0, omega]^2. The
    dominance constraint u_i >= u_i_ne is not enforced during the iteration;
    if the final point violates it the run is rejected and the grid-oracle
    argmax is returned instead (flagged in the diagnostics).
    """
    omega = ctx.scenario.omega
    if w0 is None:
        w0 = BandAllocation(0.9 * ctx.ne_alloc.w1, 0.9 * ctx.ne_alloc.w2)
    start = np.clip(np.array([w0.w1, w0.w2], dtype=float), 0.0, omega)

    def grad_m(w):
        g1, g2 = nash_product_gradient(BandAllocation(w[0], w[1]), ctx)
        return (-g1, -g2)

    def hess_m(w):
        h = hessian(BandAllocation(w[0], w[1]), ctx)
        return ((-h.a11, -h.a12), (-h.a21, -h.a22))

    def fun_m(w):
        return -nash_product(BandAllocation(w[0], w[1]), ctx)

    notes = []
    g0 = np.asarray(grad_m(start))
    eps_probe = epsilon if epsilon is not None else 1e-8 * max(1.0, float(np.linalg.norm(g0)))
    if float(np.linalg.norm(g0)) <= eps_probe and fun_m(start) == 0.0:
        for dx, dy in _RESTART_OFFSETS:
            cand = np.clip(start + np.array([dx * omega, dy * omega]), 0.0, omega)
            if (float(np.linalg.norm(grad_m(cand))) > eps_probe
                    or fun_m(cand) != 0.0):
                start = cand
                notes.append("start repositioned off the threat-point saddle")
                break
    if epsilon is None:
        epsilon = 1e-8 * max(1.0, float(np.linalg.norm(grad_m(start))))

    w, residual, iters, converged, core_notes = cg_minimize(
        fun_m, grad_m, hess_m, start, 0.0, omega, epsilon, max_iter,
        mode=mode, trace=trace)
    notes.extend(core_notes)

    alloc = BandAllocation(float(w[0]), float(w[1]))
    u = utility_pair(alloc, ctx.terms, ctx.scenario)
    dominates = all(
        u.u(i) >= ctx.threat.u(i) - 1e-12 * abs(ctx.threat.u(i)) for i in (1, 2))
    if not dominates:
        oracle = grid_oracle_nbs(ctx, oracle_resolution)
        return replace(
            oracle,
            diagnostics=oracle.diagnostics + tuple(notes) + (
                "cg endpoint fell below the threat point; grid-oracle result returned",))

    return EquilibriumReport(
        allocation=alloc,
        utilities=u,
        kind="NBS",
        iterations=iters,
        residual=residual,
        converged=converged,
        diagnostics=tuple(notes),
    )


def utility_grids(W1, W2, terms: MarginalTerms, scenario: Scenario):
    """Vectorized utilities of both players on allocation grids W1, W2."""
    u1 = utility_value(terms.phi1, terms.psi1, W1, W2, scenario.omega, scenario.b)
    u2 = utility_value(terms.phi2, terms.psi2, W2, W1, scenario.omega, scenario.b)
    return u1, u2


def grid_oracle_nbs(ctx: NashProductContext, resolution: int = 401,
                    utility_scale=(1.0, 1.0)) -> EquilibriumReport:
    """Brute-force Nash product argmax on a uniform allocation grid.

    Grid points whose utilities fail to weakly dominate the threat point are
    discarded; if none qualifies the threat allocation itself is returned and
    flagged. ``utility_scale`` applies positive per-player rescalings
    (kappa1*u1, kappa2*u2, with the threat rescaled identically) before the
    argmax; the bargaining solution is invariant to such rescalings, which
    makes the hook useful for validation. Reported utilities are unscaled.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2 per axis")
    k1, k2 = utility_scale
    if not (k1 > 0 and k2 > 0):
        raise ValueError("utility_scale entries must be positive")
    omega = ctx.scenario.omega
    axis = np.linspace(0.0, omega, resolution)
    W1, W2 = np.meshgrid(axis, axis, indexing="ij")
    U1, U2 = utility_grids(W1, W2, ctx.terms, ctx.scenario)
    F1 = k1 * U1 - k1 * ctx.threat.u1
    F2 = k2 * U2 - k2 * ctx.threat.u2
    qualifying = (F1 >= 0.0) & (F2 >= 0.0)
    n_points = resolution * resolution
    if not bool(qualifying.any()):
        return EquilibriumReport(
            allocation=ctx.ne_alloc,
            utilities=ctx.threat,
            kind="NBS",
            iterations=n_points,
            residual=0.0,
            converged=True,
            diagnostics=("no grid point weakly dominates the threat point; "
                         "returning the threat allocation",),
        )
    product = np.where(qualifying, F1 * F2, -np.inf)
    best = product.max()
    ties = np.flatnonzero(product.reshape(-1) == best)
    if len(ties) > 1:
        # Exact product ties happen when one utility gain is pinned at zero
        # (a whole edge of the region scores zero); bargaining then requires
        # the Pareto-efficient representative, so prefer the larger utility
        # sum, then the lowest index for determinism.
        sums = U1.reshape(-1)[ties] + U2.reshape(-1)[ties]
        idx = int(ties[int(np.argmax(sums))])
    else:
        idx = int(ties[0])
    alloc = BandAllocation(float(W1.flat[idx]), float(W2.flat[idx]))
    return EquilibriumReport(
        allocation=alloc,
        utilities=UtilityPair(float(U1.flat[idx]), float(U2.flat[idx])),
        kind="NBS",
        iterations=n_points,
        residual=0.0,
        converged=True,
        diagnostics=(),
    )


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull_indices(points: np.ndarray) -> list:
    """Monotone-chain convex hull; returns CCW indices into ``points``.

    Collinear boundary points are left off the hull. Duplicate points are
    collapsed to their first occurrence; degenerate clouds yield hulls of one
    or two vertices.
    """
    pts = np.asarray(points, dtype=float)
    uniq, first = np.unique(pts, axis=0, return_index=True)
    if len(uniq) == 1:
        return [int(first[0])]
    order = sorted(range(len(uniq)), key=lambda i: (uniq[i, 0], uniq[i, 1]))
    if len(uniq) == 2:
        return [int(first[order[0]]), int(first[order[1]])]

    def chain(indices):
        out = []
        for i in indices:
            while len(out) >= 2 and _cross(uniq[out[-2]], uniq[out[-1]], uniq[i]) <= 0:
                out.pop()
            out.append(i)
        return out

    lower = chain(order)
    upper = chain(order[::-1])
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 2:  # every point collinear: keep the two extremes
        hull = [order[0], order[-1]]
    return [int(first[i]) for i in hull]


@dataclass(frozen=True)
class ParetoPoint:
    """A Pareto utility point as a time-sharing mix of two pure allocations.

    Hull vertices are pure: mu = 1 and both allocations coincide. A point on
    a Pareto edge mixes alloc_a (weight mu) with alloc_b (weight 1 - mu).
    """

    u1: float
    u2: float
    mu: float
    alloc_a: BandAllocation
    alloc_b: BandAllocation


@dataclass(frozen=True)
class RegionSample:
    """Sampled utility region with its convex hull and Pareto boundary.

    ``allocations`` and ``utilities`` are (N, 2) arrays over the sampling
    grid; ``hull_indices`` index the CCW hull vertices within them, and
    ``pareto_indices`` the undominated hull vertices ordered by increasing u1.
    ``pareto`` materializes the same vertices as :class:`ParetoPoint` pure
    points.
    """

    allocations: np.ndarray
    utilities: np.ndarray
    hull_indices: np.ndarray
    pareto_indices: np.ndarray
    pareto: tuple
    resolution: int

    def hull_utilities(self) -> np.ndarray:
        return self.utilities[self.hull_indices]

    def hull_allocations(self) -> np.ndarray:
        return self.allocations[self.hull_indices]


def _pareto_chain(utilities: np.ndarray, hull: list) -> list:
    """Undominated hull vertices, walked CCW from max-u1 to max-u2."""
    if len(hull) == 1:
        return list(hull)
    pts = utilities[hull]
    start = max(range(len(hull)), key=lambda i: (pts[i, 0], pts[i, 1]))
    end = max(range(len(hull)), key=lambda i: (pts[i, 1], pts[i, 0]))
    if len(hull) == 2:
        chain = [start] if start == end else [start, end]
    else:
        chain = [start]
        i = start
        while i != end:
            i = (i + 1) % len(hull)
            chain.append(i)
    ordered = [hull[i] for i in reversed(chain)]  # increasing u1
    return ordered


def sample_utility_region(ctx: NashProductContext, resolution: int = 201) -> RegionSample:
    """Grid-sample the utility region and extract hull and Pareto boundary."""
    if resolution < 2:
        raise ValueError("resolution must be at least 2 per axis")
    omega = ctx.scenario.omega
    axis = np.linspace(0.0, omega, resolution)
    W1, W2 = np.meshgrid(axis, axis, indexing="ij")
    U1, U2 = utility_grids(W1, W2, ctx.terms, ctx.scenario)
    allocations = np.column_stack([W1.ravel(), W2.ravel()])
    utilities = np.column_stack([U1.ravel(), U2.ravel()])
    hull = convex_hull_indices(utilities)
    pareto_idx = _pareto_chain(utilities, hull)
    pareto = tuple(
        ParetoPoint(
            u1=float(utilities[i, 0]), u2=float(utilities[i, 1]), mu=1.0,
            alloc_a=BandAllocation(float(allocations[i, 0]), float(allocations[i, 1])),
            alloc_b=BandAllocation(float(allocations[i, 0]), float(allocations[i, 1])),
        )
        for i in pareto_idx)
    return RegionSample(
        allocations=allocations,
        utilities=utilities,
        hull_indices=np.asarray(hull, dtype=int),
        pareto_indices=np.asarray(pareto_idx, dtype=int),
        pareto=pareto,
        resolution=resolution,
    )


def max_nash_product_on_pareto(sample: RegionSample,
                               threat: UtilityPair) -> ParetoPoint | None:
    """Best Nash product over the Pareto boundary including time-sharing mixes.

    Along an edge between Pareto vertices P and Q the product is quadratic in
    the mixing weight mu, so each segment is maximized in closed form over the
    sub-interval where both utility gains stay non-negative. Returns None when
    no Pareto mixture weakly dominates the threat point.
    """
    best: ParetoPoint | None = None
    best_val = -math.inf

    def consider(u1, u2, mu, pa, pb):
        nonlocal best, best_val
        f1 = u1 - threat.u1
        f2 = u2 - threat.u2
        if f1 < 0.0 or f2 < 0.0:
            return
        val = f1 * f2
        if val > best_val:
            best_val = val
            best = ParetoPoint(u1=u1, u2=u2, mu=mu, alloc_a=pa, alloc_b=pb)

    verts = sample.pareto
    for p in verts:
        consider(p.u1, p.u2, 1.0, p.alloc_a, p.alloc_b)
    for p, q in zip(verts, verts[1:]):
        # point(mu) = mu*P + (1-mu)*Q; factors are linear in mu
        a0 = q.u1 - threat.u1
        a1 = p.u1 - q.u1
        b0 = q.u2 - threat.u2
        b1 = p.u2 - q.u2
        # feasible mu interval where both factors >= 0, intersected with [0,1]
        lo_mu, hi_mu = 0.0, 1.0
        for c0, c1 in ((a0, a1), (b0, b1)):
            if c1 > 0:
                lo_mu = max(lo_mu, -c0 / c1)
            elif c1 < 0:
                hi_mu = min(hi_mu, -c0 / c1)
            elif c0 < 0:
                lo_mu, hi_mu = 1.0, 0.0
        if lo_mu > hi_mu:
            continue
        candidates = {lo_mu, hi_mu}
        quad = a1 * b1
        if quad < 0:  # interior vertex of the concave quadratic
            mu_star = -(a0 * b1 + a1 * b0) / (2.0 * quad)
            if lo_mu < mu_star < hi_mu:
                candidates.add(mu_star)
        for mu in candidates:
            u1 = q.u1 + mu * a1
            u2 = q.u2 + mu * b1
            consider(u1, u2, mu, p.alloc_a, q.alloc_a)
    return best
