"""Run Monte-Carlo scenario files and tabulate SE ratio and coverage."""

import argparse
import json
from pathlib import Path

from distprop.mc_validate import SimScenario, run_scenario

HERE = Path(__file__).parent / "scenarios"


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("files", nargs="*", type=Path, default=sorted(HERE.glob("*.json")))
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args(argv)
    print(f"{'scenario':<28}{'effect':>7}{'se/sd':>9}{'coverage':>10}{'failures':>10}")
    for path in args.files:
        s = SimScenario.from_dict(json.loads(path.read_text()))
        r = run_scenario(s, jobs=args.jobs)
        for name in ("diff", "rr", "or"):
            ratio = r.mean_formula_se[name] / r.empirical_sd[name]
            print(f"{path.stem:<28}{name:>7}{ratio:9.4f}{r.coverage[name]:10.4f}{r.failures:10d}")


if __name__ == "__main__":
    main()
