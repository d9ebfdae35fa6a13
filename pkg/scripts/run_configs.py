"""Run every config in configs/ and check worker counts agree.

    python scripts/run_configs.py --workers 4 --out out
"""

import argparse
from pathlib import Path

from chaoslab import experiment

ROOT = Path(__file__).resolve().parent.parent


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--workers", type=int, default=4)
    p.add_argument("--out", default=str(ROOT / "out"))
    args = p.parse_args()
    status = 0
    for path in sorted((ROOT / "configs").glob("*.json")):
        cfg = experiment.load_config(path)
        serial = experiment.run_experiment(cfg, workers=1, write=False)
        parallel = experiment.run_experiment(cfg, workers=args.workers, output_dir=str(Path(args.out) / path.stem))
        same = serial.body_json() == parallel.body_json()
        status |= not same
        print(f"{path.name:24} {cfg.kind:14} identical={same}  -> {parallel.meta['output_dir']}")
    raise SystemExit(status)


if __name__ == "__main__":
    main()
