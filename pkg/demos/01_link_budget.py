"""Walk through the channel model: geometry -> gains -> SNRs -> efficiency.

Moves the relay along the diagonal of the bundled scenario and shows how the
relayed path opens and closes as the relay approaches the two hops.
"""

from bandgame import Point, distance, efficiency, link_budget
from bandgame.cli import load_paper_scenario

scenario = load_paper_scenario()
print("nodes:")
for name in ("source_1", "dest_1", "source_2", "dest_2"):
    p = getattr(scenario, name)
    print(f"  {name:9s} at ({p.x:5.0f}, {p.y:5.0f}) m")
print(f"direct link 1: {distance(scenario.source_1, scenario.dest_1):7.2f} m")
print(f"direct link 2: {distance(scenario.source_2, scenario.dest_2):7.2f} m")
print()

print("relay on the diagonal, user 1 SNRs and efficiencies:")
print(f"{'relay':>12s} {'gamma_direct':>13s} {'gamma_relayed':>14s} "
      f"{'gamma_af':>10s} {'f(direct)':>10s} {'f(af)':>8s}")
for c in (100.0, 250.0, 350.0, 450.0, 550.0, 650.0):
    budget = link_budget(scenario, Point(c, c))
    u = budget.user1
    print(f"({c:5.0f},{c:4.0f}) {u.gamma_direct:13.4f} {u.gamma_relayed:14.4f} "
          f"{u.gamma_af:10.4f} {efficiency(u.gamma_direct, scenario.M):10.3e} "
          f"{efficiency(u.gamma_af, scenario.M):8.6f}")

print()
print("the direct hop alone decodes almost nothing (f ~ 3e-6 at SNR ~ 3.8);")
print("with the relay well placed the combined link is essentially lossless.")
