"""Run figure presets into a results directory.

    python scripts/run_presets.py                 # every preset, desk scale
    python scripts/run_presets.py fig1 fd_cos --paper-scale --jobs 4
"""

import argparse
import time

from vcadvect.experiment import PRESETS, run_preset


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("names", nargs="*", default=list(PRESETS))
    p.add_argument("--out", default="results")
    p.add_argument("--paper-scale", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    args = p.parse_args()
    for name in args.names:
        t0 = time.perf_counter()
        manifest, results = run_preset(name, args.out, args.paper_scale, args.jobs)
        aborted = sum(r.aborted for _, r in results)
        print(f"{name}: {len(results)} curves ({aborted} aborted) in "
              f"{time.perf_counter() - t0:.0f}s -> {manifest}")


if __name__ == "__main__":
    main()
