"""Relay-position sweeps: NE-vs-NBS gain maps, welfare comparison, concavity maps."""

import math
from dataclasses import dataclass

from .bargaining import (NashProductContext, cg_nbs, eigenvalues,
                         grid_oracle_nbs, hessian)
from .game import (BandAllocation, ConvergenceError, EquilibriumReport,
                   UtilityPair, marginal_terms, nash_equilibrium)
from .system_model import DegenerateGeometryError, Point, Scenario, link_budget


@dataclass(frozen=True)
class SweepGrid:
    """Rectangular grid of relay positions, default area [0, 700] m squared."""

    step: float
    x_min: float = 0.0
    x_max: float = 700.0
    y_min: float = 0.0
    y_max: float = 700.0

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("step must be positive")
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ValueError("grid bounds must satisfy max > min on both axes")

    def axis(self, lo: float, hi: float) -> list:
        vals = []
        k = 0
        while True:
            v = lo + k * self.step
            if v > hi + 1e-9 * self.step:
                break
            vals.append(min(v, hi))
            k += 1
        return vals

    def positions(self) -> list:
        """Grid points sorted by (x, y)."""
        return [Point(x, y)
                for x in self.axis(self.x_min, self.x_max)
                for y in self.axis(self.y_min, self.y_max)]


@dataclass(frozen=True)
class SweepConfig:
    """Solver settings shared by every position of a sweep."""

    epsilon: float | None = None
    max_iter: int = 200
    mode: str = "joint"
    w0: BandAllocation | None = None
    oracle_resolution: int = 401
    # None: check every position on grids up to 1000 points, every 10th beyond.
    oracle_every: int | None = None


@dataclass(frozen=True)
class SweepRecord:
    """Everything computed at one relay position.

    Failed positions (degenerate geometry, solver breakdown) carry the
    failure message, NaN allocations/utilities/eigenvalues and, by
    convention, zero gains. ``cg_matched_oracle`` is None where the oracle
    cross-check was skipped by the cadence setting.
    """

    relay: Point
    ne: EquilibriumReport | None
    nbs: EquilibriumReport | None
    gain_bw_u1_pct: float
    gain_bw_u2_pct: float
    gain_bw_total_pct: float
    gain_sw_pct: float
    lambda1: float
    lambda2: float
    strictly_concave: bool
    cg_matched_oracle: bool | None
    failure: str | None = None

    @property
    def converged(self) -> bool:
        return (self.failure is None and self.ne is not None
                and self.nbs is not None
                and self.ne.converged and self.nbs.converged)


def bandwidth_gain(ne_w: float, nbs_w: float) -> float:
    """Relative band saving of bargaining over the equilibrium, in percent.

    Zero by convention when the equilibrium already rents no band (both
    solutions skip the relay there).
    """
    if ne_w == 0.0:
        return 0.0
    return 100.0 * (ne_w - nbs_w) / ne_w


def social_welfare_gain(ne_u: UtilityPair, nbs_u: UtilityPair) -> float:
    """Relative change of the utility sum, in percent.

    Returns NaN (undefined-gain marker) when the equilibrium welfare is not
    positive, where a ratio would be meaningless.
    """
    ne_sum = ne_u.total()
    if ne_sum <= 0.0:
        return math.nan
    return 100.0 * (nbs_u.total() - ne_sum) / ne_sum


def _failure_record(relay: Point, message: str) -> SweepRecord:
    return SweepRecord(
        relay=relay, ne=None, nbs=None,
        gain_bw_u1_pct=0.0, gain_bw_u2_pct=0.0, gain_bw_total_pct=0.0,
        gain_sw_pct=0.0, lambda1=math.nan, lambda2=math.nan,
        strictly_concave=False, cg_matched_oracle=None, failure=message)


def _solve_position(scenario: Scenario, relay: Point):
    budget = link_budget(scenario, relay)
    terms = marginal_terms(budget, scenario)
    ne = nash_equilibrium(terms, scenario)
    ctx = NashProductContext(scenario=scenario, budget=budget, terms=terms,
                             threat=ne.utilities, ne_alloc=ne.allocation)
    return ne, ctx


def sweep(scenario: Scenario, grid: SweepGrid,
          config: SweepConfig | None = None) -> list:
    """Solve NE and NBS at every relay position of the grid.

    Per position: link budget, marginal terms, closed-form NE, CG bargaining
    solution (grid-oracle cross-check at the configured cadence), bandwidth
    and welfare gains, and the Nash product eigenvalues at the reported NBS
    allocation. Individual position failures are recorded, never raised.
    """
    if config is None:
        config = SweepConfig()
    positions = grid.positions()
    every = config.oracle_every
    if every is None:
        every = 1 if len(positions) <= 1000 else 10
    records = []
    for idx, relay in enumerate(positions):
        try:
            ne, ctx = _solve_position(scenario, relay)
            nbs = cg_nbs(ctx, w0=config.w0, epsilon=config.epsilon,
                         max_iter=config.max_iter, mode=config.mode,
                         oracle_resolution=config.oracle_resolution)
        except (DegenerateGeometryError, ConvergenceError) as exc:
            records.append(_failure_record(relay, str(exc)))
            continue
        matched = None
        if every > 0 and idx % every == 0:
            oracle = grid_oracle_nbs(ctx, config.oracle_resolution)
            cell = scenario.omega / (config.oracle_resolution - 1)
            matched = (abs(nbs.allocation.w1 - oracle.allocation.w1) <= cell * (1 + 1e-9)
                       and abs(nbs.allocation.w2 - oracle.allocation.w2) <= cell * (1 + 1e-9))
        eig = eigenvalues(hessian(nbs.allocation, ctx))
        records.append(SweepRecord(
            relay=relay,
            ne=ne,
            nbs=nbs,
            gain_bw_u1_pct=bandwidth_gain(ne.allocation.w1, nbs.allocation.w1),
            gain_bw_u2_pct=bandwidth_gain(ne.allocation.w2, nbs.allocation.w2),
            gain_bw_total_pct=bandwidth_gain(
                ne.allocation.w1 + ne.allocation.w2,
                nbs.allocation.w1 + nbs.allocation.w2),
            gain_sw_pct=social_welfare_gain(ne.utilities, nbs.utilities),
            lambda1=eig.lambda1,
            lambda2=eig.lambda2,
            strictly_concave=eig.lambda2 < 0.0,
            cg_matched_oracle=matched,
        ))
    return records


@dataclass(frozen=True)
class ConcavityRecord:
    """Nash product eigenvalues at the grid-oracle NBS of one relay position."""

    relay: Point
    lambda1: float
    lambda2: float
    strictly_concave: bool
    failure: str | None = None


def concavity_map(scenario: Scenario, grid: SweepGrid,
                  oracle_resolution: int = 401) -> list:
    """Concavity certificate of the Nash product across relay positions.

    The Hessian is evaluated at the grid-oracle NBS point of each position,
    i.e. where a solver would actually operate. Failures are recorded with
    NaN eigenvalues and a False flag.
    """
    records = []
    for relay in grid.positions():
        try:
            _, ctx = _solve_position(scenario, relay)
            oracle = grid_oracle_nbs(ctx, oracle_resolution)
            eig = eigenvalues(hessian(oracle.allocation, ctx))
        except (DegenerateGeometryError, ConvergenceError) as exc:
            records.append(ConcavityRecord(
                relay=relay, lambda1=math.nan, lambda2=math.nan,
                strictly_concave=False, failure=str(exc)))
            continue
        records.append(ConcavityRecord(
            relay=relay, lambda1=eig.lambda1, lambda2=eig.lambda2,
            strictly_concave=eig.lambda2 < 0.0))
    return records
