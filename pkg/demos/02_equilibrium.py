"""The selfish outcome: best responses and the unique Nash equilibrium.

Each player rents relay band to maximize its own priced energy efficiency.
The equilibrium comes out of a closed-form KKT case analysis and is
cross-checked here against damped best-response iteration.
"""

from bandgame import (Point, best_response, best_response_iteration,
                      link_budget, marginal_terms, nash_equilibrium)
from bandgame.cli import load_paper_scenario

scenario = load_paper_scenario()
relay = Point(450.0, 450.0)
terms = marginal_terms(link_budget(scenario, relay), scenario)

print(f"relay at ({relay.x:.0f}, {relay.y:.0f})")
print(f"phi (direct slope):  {terms.phi1:.6e}  {terms.phi2:.6e}")
print(f"psi (relayed slope): {terms.psi1:.6e}  {terms.psi2:.6e}")
print()

print("best response of player 1 to a few opponent bands:")
for w2 in (0.0, 1e5, 3e5, 6e5, 1e6):
    print(f"  w2 = {w2:9.0f} Hz -> BR1 = {best_response(1, w2, terms, scenario):12.1f} Hz")
print()

report = nash_equilibrium(terms, scenario)
print(f"closed-form equilibrium: w = ({report.allocation.w1:.2f}, {report.allocation.w2:.2f}) Hz")
print(f"utilities at equilibrium: ({report.utilities.u1:.2f}, {report.utilities.u2:.2f})")

alloc, iters, resid, ok = best_response_iteration(terms, scenario)
print(f"damped iteration from (0,0): w = ({alloc.w1:.2f}, {alloc.w2:.2f}) "
      f"after {iters} steps (residual {resid:.2e}, converged={ok})")
gap = max(abs(report.allocation.w1 - alloc.w1), abs(report.allocation.w2 - alloc.w2))
print(f"agreement: {gap:.3e} Hz")
