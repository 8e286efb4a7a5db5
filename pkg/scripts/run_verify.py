#!/usr/bin/env python3
"""Run the full acceptance battery and write results/verify.json."""
import pathlib
import sys
import time

from onofri import acceptance, report

OUT = pathlib.Path(__file__).resolve().parent.parent / "results"


def main() -> int:
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else acceptance.DEFAULT_SEED
    OUT.mkdir(exist_ok=True)
    t0 = time.time()
    rows = acceptance.run_verify(seed)
    summary = acceptance.summarize(rows)
    ok = all(summary.values())
    rep = report.build_report("verify", {"seed": seed}, seed, rows,
                              "pass" if ok else "fail", time.time() - t0)
    report.write_json(str(OUT / "verify.json"), rep)
    for cid, passed in sorted(summary.items()):
        print(f"criterion {cid:2d}: {'PASS' if passed else 'FAIL'}")
    print(f"wrote {OUT / 'verify.json'} ({rep['elapsed_s']:.1f}s)")
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
