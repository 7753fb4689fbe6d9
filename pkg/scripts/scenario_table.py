"""Proper times and clock phases for the four built-in scenarios."""
import math

from proptime.worldline import (
    PrescribedRate,
    acceleration_to,
    build_gravity_lift_scenario,
    build_gw_disk_scenario,
    build_twin_scenario,
    proper_time,
    proper_time_difference,
)


def main():
    transport = PrescribedRate(lambda t: -1e-7 * math.sin(math.pi * t / 10.0) ** 2, 10.0)
    cases = {
        "twin, instant turnaround": build_twin_scenario(0.6, 5.0),
        "twin, matched a = 0.5": build_twin_scenario(0.6, 5.0, acceleration_to(0.6, 0.5)),
        "twin, unmatched a = 0.5": build_twin_scenario(0.6, 5.0, acceleration_to(0.6, 0.5),
                                                       matched=False),
        "gravity lift gh = 1e-6": build_gravity_lift_scenario(1e-3, 1e-3, 1e6, transport),
        "gw disk, half cycle": build_gw_disk_scenario(1e-6, 2 * math.pi, 0.5),
        "gw disk, 3 cycles": build_gw_disk_scenario(1e-6, 2 * math.pi, 3.0),
    }
    print(f"{'scenario':28s} {'tau_A':>22s} {'tau_B':>22s} {'tau_A - tau_B':>24s}")
    for name, (wa, wb) in cases.items():
        print(f"{name:28s} {proper_time(wa):22.15g} {proper_time(wb):22.15g} "
              f"{proper_time_difference(wa, wb):24.17g}")


if __name__ == "__main__":
    main()
