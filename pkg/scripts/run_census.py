"""Sweep every seed, compare with the shipped catalog and write a JSON report."""

from __future__ import annotations

import argparse
import json
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from gravinst import census


@dataclass
class SweepConfig:
    max_blowups: int = 8
    pruning: str = "lattice-only"
    max_alpha: int = 6
    jobs: int = 4
    out: str = "results/census.json"


def run(cfg: SweepConfig) -> dict:
    start = time.perf_counter()
    results = census.sweep(census.standard_configs(cfg.max_blowups, cfg.pruning, cfg.max_alpha), cfg.jobs)
    report = census.verify_table4(results)
    out = report.to_json()
    out["config"] = asdict(cfg)
    out["states"] = sum(r.states for r in results)
    out["seconds"] = round(time.perf_counter() - start, 2)
    return out


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    for name, default in asdict(SweepConfig()).items():
        p.add_argument("--" + name.replace("_", "-"), type=type(default), default=default)
    cfg = SweepConfig(**vars(p.parse_args()))
    out = run(cfg)
    path = Path(cfg.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(out, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")
    print(f"{out['summary']} ({out['states']} states, {out['seconds']} s) -> {path}")


if __name__ == "__main__":
    main()
