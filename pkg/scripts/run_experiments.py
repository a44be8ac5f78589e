"""Run every experiment spec in experiments/ and store the JSON reports.

The negative control is expected to fail; everything else must pass.
"""

import argparse
import contextlib
import io
import json
import sys
from pathlib import Path

from crncert.cli import main as cli_main

ROOT = Path(__file__).resolve().parent.parent
EXPECT_FAIL = {"negative_control"}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=ROOT / "results")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    ok = True
    for spec in sorted((ROOT / "experiments").glob("*.json")):
        dest = args.out / f"{spec.stem}.report.json"
        err = io.StringIO()
        with contextlib.redirect_stderr(err):
            code = cli_main(["verify", str(spec), "--out", str(dest)])
        expected = 1 if spec.stem in EXPECT_FAIL else 0
        ok &= code == expected
        summary = []
        if code in (0, 1):
            for exp in json.loads(dest.read_text())["experiments"]:
                rep = exp.get("report", {})
                if "violations" in rep:
                    summary.append(f"violations={rep['violations']} min_margin={rep['min_margin']:.3g}")
                elif "max_pairwise_distance" in rep:
                    summary.append(f"pairwise={rep['max_pairwise_distance']:.2e}")
        status = "as expected" if code == expected else f"UNEXPECTED (wanted {expected})"
        print(f"{spec.stem:<20} exit {code} {status}  {'; '.join(summary) or err.getvalue().strip()}")
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
