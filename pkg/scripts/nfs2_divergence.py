"""Logarithmic divergence of S for the six-dimensional product potential.

Prints partial integrals over [delta, t - delta] for shrinking delta, the
per-decade increments and the predicted rate ln(10)/(2 pi). The analytic
lower growth curve uses a spatial cutoff instead, so it grows at a comparable
rate but is not a bound on the time-truncated partials.
"""
import argparse
import math

import numpy as np

from bridgegauss import bridge_quad as bq
from bridgegauss import newtonian as nt
from bridgegauss import potentials as P
from bridgegauss.kernel import BridgeSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t", type=float, default=1.0)
    ap.add_argument("--eps", type=float, nargs="*", default=[0.0, 0.1])
    args = ap.parse_args()
    cfg = bq.QuadConfig(partial_cutoffs=tuple(10.0**-k for k in range(2, 9)))
    for eps in args.eps:
        V = P.nfs2(eps)
        r = bq.s_value(V, BridgeSpec(args.t, np.zeros(6), np.zeros(6)), cfg, partial=True)
        print(f"epsilon = {eps:g}: divergent = {r.divergent}, endpoint exponents = {r.endpoint_exponents}")
        cuts = sorted(r.partial, reverse=True)
        prev = None
        for c in cuts:
            inc = "" if prev is None else f"  increment {r.partial[c] - prev:.6f}"
            print(f"  delta = {c:.0e}: partial = {r.partial[c]:.8f}{inc}")
            prev = r.partial[c]
        if eps == 0.0:
            print(f"  predicted decade increment ln(10)/(2 pi) = {math.log(10) / (2 * math.pi):.6f}")
        for delta in (1e-2, 1e-4, 1e-6):
            print(f"  analytic lower growth, spatial cutoff |x2| > {delta:.0e}: {nt.nfs2_lower_growth(args.t, delta, eps):.6f}")


if __name__ == "__main__":
    main()
