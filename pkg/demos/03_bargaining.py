"""Bargaining on top of the equilibrium threat point.

Maximizes the product of utility gains with the projected Polak-Ribiere
conjugate-gradient solver, shows the iteration trace, certifies local strict
concavity through the Hessian eigenvalues, and cross-checks the result
against the brute-force grid oracle.
"""

from bandgame import (Point, cg_nbs, eigenvalues, grid_oracle_nbs, hessian,
                      make_context, nash_product)
from bandgame.cli import load_paper_scenario

scenario = load_paper_scenario()
ctx = make_context(scenario, Point(450.0, 450.0))
print(f"threat point (equilibrium utilities): ({ctx.threat.u1:.2f}, {ctx.threat.u2:.2f})")
print(f"equilibrium bands: ({ctx.ne_alloc.w1:.1f}, {ctx.ne_alloc.w2:.1f}) Hz")
print()

trace = []
report = cg_nbs(ctx, trace=trace)
print("conjugate-gradient iterations:")
for s in trace:
    print(f"  k={s.k:2d} w=({s.iterate.w1:10.2f}, {s.iterate.w2:10.2f}) "
          f"|v|={s.direction_norm:9.3e} beta={s.beta:7.3f} t={s.step:+9.3e}")
print(f"solution: w = ({report.allocation.w1:.2f}, {report.allocation.w2:.2f}) Hz, "
      f"converged={report.converged}")
print(f"utility gains over the threat point: "
      f"({report.utilities.u1 - ctx.threat.u1:.2f}, {report.utilities.u2 - ctx.threat.u2:.2f})")
print()

eig = eigenvalues(hessian(report.allocation, ctx))
print(f"hessian eigenvalues at the solution: ({eig.lambda1:.4f}, {eig.lambda2:.4f})"
      f" -> strictly concave: {eig.lambda2 < 0}")

oracle = grid_oracle_nbs(ctx, resolution=401)
cell = scenario.omega / 400.0
print(f"grid oracle (401x401): w = ({oracle.allocation.w1:.1f}, {oracle.allocation.w2:.1f}) Hz")
print(f"offset: ({abs(report.allocation.w1 - oracle.allocation.w1):.1f}, "
      f"{abs(report.allocation.w2 - oracle.allocation.w2):.1f}) Hz vs cell {cell:.1f} Hz")
print(f"product value cg vs oracle: {nash_product(report.allocation, ctx):.6e} "
      f">= {nash_product(oracle.allocation, ctx):.6e}")
