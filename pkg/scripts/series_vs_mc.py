"""Compare the perturbation series with Monte Carlo for the square well in d = 1 and d = 3.

The Laplace-inversion oracle from the test suite is printed alongside when mpmath is available.
"""
import argparse
import pathlib
import sys

import numpy as np

from bridgegauss import feynman_kac as fk
from bridgegauss import potentials as P
from bridgegauss import schrodinger as sch
from bridgegauss.kernel import BridgeSpec, heat_kernel

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "tests"))
try:
    from oracles import well_ratio_1d, well_ratio_3d
except ImportError:
    well_ratio_1d = well_ratio_3d = None


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depth", type=float, default=0.5)
    ap.add_argument("--t", type=float, nargs="*", default=[0.5, 1.0, 2.0])
    ap.add_argument("--paths", type=int, default=100_000)
    ap.add_argument("--steps", type=int, default=256)
    args = ap.parse_args()
    for d, oracle in ((1, well_ratio_1d), (3, well_ratio_3d)):
        V = P.single(P.IndicatorBall(1.0), d, -args.depth)
        for t in args.t:
            spec = BridgeSpec(t, np.zeros(d), np.zeros(d))
            ser = sch.g_series(V, spec)
            g = heat_kernel(t, spec.x, spec.y)
            mc = fk.g_ratio_mc(V, spec, fk.McConfig(paths=args.paths, steps=args.steps))
            line = (f"d={d} t={t:g}: series {ser.ratio:.10f} (+-{ser.truncation_bound / g:.1e}, n={ser.n_max}, "
                    f"eta={ser.eta:.3f})  mc {mc.mean:.6f} +- {mc.std_error:.1e}  "
                    f"({abs(ser.ratio - mc.mean) / mc.std_error:.2f} se)")
            if oracle is not None:
                line += f"  oracle {oracle(args.depth, t):.10f}"
            print(line)


if __name__ == "__main__":
    main()
