"""Run the acceptance checks outside pytest and write one JSON report per criterion."""
import argparse
import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "tests"))

from bridgegauss import cli  # noqa: E402
from test_acceptance import CRITERIA  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="acceptance_reports", help="output directory")
    ap.add_argument("criteria", nargs="*", type=int, help="subset of criterion numbers")
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(exist_ok=True)
    failed = 0
    for n in args.criteria or sorted(CRITERIA):
        name, fn, limit = CRITERIA[n]
        start = time.perf_counter()
        rep = fn()
        dt = time.perf_counter() - start
        ok = rep["pass"] and dt < limit
        failed += not ok
        (out / f"criterion_{n:02d}.json").write_text(cli.dumps(cli._clean(rep)) + "\n")
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {name} ({dt:.2f} s, limit {limit:g} s)")
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()
