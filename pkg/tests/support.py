"""Shared helpers for the test suite."""

from __future__ import annotations

from functools import lru_cache
from typing import List, Tuple

from gravinst import afunc
from gravinst.census import catalog_entries
from gravinst.surface import classify

# (number, title, passed, detail) for the acceptance summary
ACCEPTANCE: List[Tuple[int, str, bool, str]] = []


def report(number: int, title: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE.append((number, title, passed, detail))
    line = f"ACCEPTANCE {number} {'PASS' if passed else 'FAIL'}: {title}"
    print(line + (f" ({detail})" if detail else ""))


@lru_cache(maxsize=None)
def candidate(label: str):
    entry = next(e for e in catalog_entries() if e.label == label)
    v = classify(entry.build())
    assert v.ok, v.reason
    return v.candidate


@lru_cache(maxsize=None)
def moment(label: str) -> afunc.MomentData:
    cand = candidate(label)
    kahler = afunc.assign_kahler(cand, afunc.case_entry(label)["pins"])
    return afunc.moment_data(cand, kahler)


@lru_cache(maxsize=None)
def scalar(label: str) -> afunc.ScalarResult:
    return afunc.min_scalar_full(moment(label))
