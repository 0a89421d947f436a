"""Growth ratio e(100)/e(5) of the FD-SBP cos(x) run against dissipation strength.

Checks the default strength (1.0) of the ``fd_cos`` preset: every positive
strength on the default grid removes the growing mode, zero does not.

    python scripts/calibrate_dissipation.py 0 0.01 0.1 1 10
"""

import argparse

import numpy as np

from vcadvect.experiment import DESK_STEPS, execute, stable_steps
from vcadvect.config import RunConfig


def ratio(strength):
    cfg = RunConfig(case="a_cos", basis="fd", fd_order=4, fd_nodes=100, K=1, flux="split_central",
                    form="split", t_final=100.0, diagnostics=False,
                    dissipation=None if strength == 0 else strength)
    cfg = cfg.replace(steps=max(DESK_STEPS, stable_steps(cfg)))
    res = execute(cfg, write=False)
    t, e = res.column("time"), res.column("total_error")
    return e[np.argmin(np.abs(t - 5))], e[-1], cfg.steps


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("strengths", nargs="*", type=float, default=[0.0, 0.01, 0.1, 1.0, 10.0])
    args = p.parse_args()
    print("strength,e5,e100,ratio,steps")
    for s in args.strengths:
        e5, e100, steps = ratio(s)
        print(f"{s:g},{e5:.4e},{e100:.4e},{e100 / e5:.4e},{steps}")


if __name__ == "__main__":
    main()
