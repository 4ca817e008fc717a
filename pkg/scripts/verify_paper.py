"""Evaluate every catalogued case and worked example; write JSON and markdown tables."""

from __future__ import annotations

import argparse
from dataclasses import asdict, dataclass
from pathlib import Path

from gravinst.cli import main as cli_main


@dataclass
class VerifyConfig:
    out_dir: str = "results"
    jobs: int = 4


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__)
    for name, default in asdict(VerifyConfig()).items():
        p.add_argument("--" + name.replace("_", "-"), type=type(default), default=default)
    cfg = VerifyConfig(**vars(p.parse_args()))
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    codes = [cli_main(["verify-paper", "--format", fmt, "--jobs", str(cfg.jobs), "--out", str(out / f"min_scalar.{fmt}")])
             for fmt in ("json", "md")]
    print((out / "min_scalar.md").read_text(encoding="utf-8"))
    return max(codes)


if __name__ == "__main__":
    raise SystemExit(main())
