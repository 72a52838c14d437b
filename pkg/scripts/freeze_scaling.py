"""Penalty freezing versus hard decoupling over a range of Omega.

Prints the worst-case active-amplitude deviation, its per-decade ratio and
the product deviation * Omega, which levels off at a graph constant.
"""

import argparse

from qwmvc.ctqw import FreezeParams, freeze_evolution_check, t_opt
from qwmvc.graph import complete_graph, cycle_graph, generate_er

GRAPHS = {"K3": complete_graph(3), "C6": cycle_graph(6), "ER(12,0.4)": generate_er(12, 0.4, 4)}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--omegas", type=float, nargs="+", default=[1e2, 1e3, 1e4, 1e5, 1e6])
    args = ap.parse_args()
    for name, g in GRAPHS.items():
        t = t_opt(g.n)
        prev = None
        print(f"{name} t={t:.5f}")
        for om in args.omegas:
            rep = freeze_evolution_check(g, FreezeParams(om, {0}), t)
            d = rep.max_amplitude_deviation
            ratio = f"{prev / d:.4f}" if prev else "-"
            print(f"  omega={om:.0e} dev={d:.4e} dev*omega={d * om:.4f} ratio={ratio} "
                  f"leak={rep.leakage:.3e} final_dev={rep.final_amplitude_deviation:.3e}")
            prev = d


if __name__ == "__main__":
    main()
