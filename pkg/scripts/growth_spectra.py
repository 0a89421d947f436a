"""Largest real part of the semidiscrete spectrum for every scheme on a test case.

A positive value means an exponentially growing error mode; this is the quick
way to predict which curves of a long-time run grow and which stay bounded.

    python scripts/growth_spectra.py a_cos --K 30
    python scripts/growth_spectra.py a_cos --basis fd --fd-nodes 100 --K 1
"""

import argparse
import itertools

import numpy as np

from vcadvect.cases import X2_VARIANTS, make_case
from vcadvect.semidisc import Discretisation, FluxKind, Mesh1D, SchemeConfig, VolumeForm


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("case")
    p.add_argument("--variant", default="default", choices=X2_VARIANTS)
    p.add_argument("--K", type=int, default=30)
    p.add_argument("--N", type=int, default=3)
    p.add_argument("--basis", nargs="*", default=["gl", "gll"])
    p.add_argument("--fd-order", type=int, default=4)
    p.add_argument("--fd-nodes", type=int, default=100)
    p.add_argument("--dissipation", type=float, default=None)
    args = p.parse_args()

    case = make_case(args.case, args.variant)
    mesh = Mesh1D.uniform(case.x_L, case.x_R, args.K)
    print(f"{'basis':6s} {'flux':16s} {'form':8s} {'max Re(lambda)':>15s}")
    for basis, flux, form in itertools.product(args.basis, FluxKind, VolumeForm):
        scheme = SchemeConfig(basis=basis, N=args.N, flux=flux, volume_form=form,
                              fd_order=args.fd_order, fd_nodes=args.fd_nodes,
                              dissipation=args.dissipation if basis == "fd" else None)
        disc = Discretisation.build(mesh, scheme, case.a, case.a_prime, lambda t: 0.0)
        A, _ = disc.linear_operator()
        top = np.linalg.eigvals(A).real.max()
        print(f"{basis:6s} {flux.value:16s} {form.value:8s} {top:15.4e}")


if __name__ == "__main__":
    main()
