"""Run the check list of every named example through the CLI and summarise the outcome."""
import argparse
import io
import json
import time

from bridgegauss import cli


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", default=sorted(cli.EXAMPLES))
    ap.add_argument("--verbose", action="store_true", help="print every check")
    args = ap.parse_args()
    for name in args.names:
        buf = io.StringIO()
        start = time.perf_counter()
        code = cli.run(["verify-example", name], stdout=buf)
        rep = json.loads(buf.getvalue())
        checks = rep.get("results", {}).get("checks", [])
        n_ok = sum(c["pass"] for c in checks)
        print(f"{name}: {n_ok}/{len(checks)} checks pass, exit {code}, {time.perf_counter() - start:.1f} s")
        if args.verbose:
            for c in checks:
                print("   ", json.dumps(c))


if __name__ == "__main__":
    main()
