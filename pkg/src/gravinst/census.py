"""Breadth-first enumeration of admissible blow-up sequences and Table matching."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .exactmath import rational_str
from .fixtures import load_catalog
from .surface import (
    ALLOWED,
    ClassificationCandidate,
    SurfaceConfig,
    blow_up,
    blow_up_sequence,
    canonical_form,
    candidate_to_json,
    classify,
    h2_config,
    prune_filter,
    seed_h2,
    seed_p2,
    targets,
)


@dataclass(frozen=True)
class CensusConfig:
    seed: str = "type-iii"
    alpha: int = 2
    beta: int = 1
    max_blowups: int = 8
    pruning: str = "lattice-only"

    def seed_config(self) -> SurfaceConfig:
        return seed_p2(self.seed, self.alpha, self.beta)


@dataclass
class CandidateRecord:
    canonical: bytes
    candidate: ClassificationCandidate
    history: Tuple[str, ...]
    seed_tag: str
    label: Optional[str] = None
    aliases: Tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "aliases": list(self.aliases),
            "seed": self.seed_tag,
            "history": list(self.history),
            "canonical_form": self.canonical.decode(),
            **{k: v for k, v in candidate_to_json(self.candidate).items() if k != "config"},
        }


@dataclass
class CensusResult:
    config: CensusConfig
    candidates: Dict[bytes, CandidateRecord] = field(default_factory=dict)
    states: int = 0
    pruned: int = 0
    per_level: List[int] = field(default_factory=list)

    def sorted_records(self) -> List[CandidateRecord]:
        return sorted(self.candidates.values(), key=lambda r: (r.label or "~", r.canonical))


def enumerate_candidates(cfg: CensusConfig) -> CensusResult:
    """All valid final states reachable within ``max_blowups`` legal blow-ups."""
    res = CensusResult(cfg)
    start = cfg.seed_config()
    seen = {canonical_form(start)}
    frontier = [start]
    _record(res, start, next(iter(seen)))
    for _ in range(cfg.max_blowups):
        nxt: List[SurfaceConfig] = []
        for state in frontier:
            if state.n_blowups >= cfg.max_blowups:
                continue
            for t in targets(state):
                if prune_filter(state, t, cfg.pruning) != ALLOWED:
                    res.pruned += 1
                    continue
                new = blow_up(state, t)
                key = canonical_form(new)
                if key in seen:
                    continue
                seen.add(key)
                nxt.append(new)
                _record(res, new, key)
        res.per_level.append(len(nxt))
        res.states += len(nxt)
        frontier = nxt
        if not frontier:
            break
    return res


def _record(res: CensusResult, state: SurfaceConfig, key: bytes) -> None:
    v = classify(state)
    if v.ok and key not in res.candidates:
        res.candidates[key] = CandidateRecord(key, v.candidate, state.history, state.seed_tag)


def type_iii_pairs(max_alpha: int) -> List[Tuple[int, int]]:
    return [(a, b) for a in range(2, max_alpha + 1) for b in range(1, a) if math.gcd(a, b) == 1]


def _run(cfg: CensusConfig) -> CensusResult:
    return enumerate_candidates(cfg)


def sweep(configs: Sequence[CensusConfig], jobs: int = 1) -> List[CensusResult]:
    if jobs <= 1:
        return [enumerate_candidates(c) for c in configs]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(_run, configs))


def standard_configs(max_blowups: int = 8, pruning: str = "lattice-only", max_alpha: int = 6) -> List[CensusConfig]:
    out = [
        CensusConfig("type-i", max_blowups=max_blowups, pruning=pruning),
        CensusConfig("type-ii", max_blowups=max_blowups, pruning=pruning),
    ]
    out += [CensusConfig("type-iii", a, b, max_blowups, pruning) for a, b in type_iii_pairs(max_alpha)]
    return out


# catalog ------------------------------------------------------------------------

@dataclass(frozen=True)
class CatalogEntry:
    label: str
    seed: str
    alpha: int
    beta: int
    sequence: Tuple[str, ...]
    row: bool
    same_as: Optional[str]
    group: str
    picard_rank: int
    degree: int
    verdict: str

    @property
    def seed_tag(self) -> str:
        if self.seed == "type-iii":
            return f"type-iii({self.alpha},{self.beta})"
        return self.seed

    def build(self) -> SurfaceConfig:
        if self.seed == "H2":
            return h2_config()
        return blow_up_sequence(seed_p2(self.seed, self.alpha, self.beta), self.sequence)


def catalog_entries() -> List[CatalogEntry]:
    out = []
    for d in load_catalog()["cases"]:
        out.append(CatalogEntry(
            label=d["label"],
            seed=d["seed"],
            alpha=d.get("alpha", 0),
            beta=d.get("beta", 0),
            sequence=tuple(d.get("sequence", ())),
            row=d.get("row", False),
            same_as=d.get("same_as"),
            group=d.get("group", ""),
            picard_rank=d.get("picard_rank", 0),
            degree=d.get("degree", 0),
            verdict=d.get("verdict", ""),
        ))
    return out


def catalog_forms() -> Dict[bytes, List[CatalogEntry]]:
    forms: Dict[bytes, List[CatalogEntry]] = {}
    for e in catalog_entries():
        if e.verdict == "candidate":
            forms.setdefault(canonical_form(e.build()), []).append(e)
    return forms


def label_records(results: Sequence[CensusResult]) -> Dict[bytes, CandidateRecord]:
    """Union over seeds, deduplicated, labelled by the catalog."""
    forms = catalog_forms()
    merged: Dict[bytes, CandidateRecord] = {}
    for r in results:
        for key, rec in r.candidates.items():
            if key not in merged:
                merged[key] = rec
    for key, rec in merged.items():
        entries = forms.get(key, [])
        primary = [e for e in entries if e.row]
        rec.label = (primary or entries)[0].label if entries else None
        rec.aliases = tuple(sorted(e.label for e in entries if e.label != rec.label))
    return merged


@dataclass
class Table4Report:
    rows_matched: List[str]
    rows_expected: List[str]
    merges: Dict[str, str]
    merge_failures: List[str]
    row_failures: List[str]
    unexpected: List[CandidateRecord]
    eguchi_hanson: bool
    rejection: Dict[str, object]
    iii_survivors: List[Tuple[int, int]]

    @property
    def ok(self) -> bool:
        return (
            len(self.rows_matched) == len(self.rows_expected)
            and not self.merge_failures
            and not self.row_failures
            and not self.unexpected
            and self.eguchi_hanson
            and self.rejection.get("ok", False)
            and sorted(self.iii_survivors) == [(2, 1), (3, 1)]
        )

    def summary(self) -> str:
        extra = ", +1 Eguchi-Hanson entry" if self.eguchi_hanson else ""
        return f"{len(self.rows_matched)}/{len(self.rows_expected)} rows matched{extra}"

    def to_json(self) -> dict:
        return {
            "summary": self.summary(),
            "ok": self.ok,
            "rows_matched": self.rows_matched,
            "row_failures": self.row_failures,
            "merges": self.merges,
            "merge_failures": self.merge_failures,
            "unexpected": [r.to_json() for r in self.unexpected],
            "eguchi_hanson": self.eguchi_hanson,
            "rejection": self.rejection,
            "type_iii_survivors": [list(p) for p in self.iii_survivors],
        }


def verify_table4(results: Optional[Sequence[CensusResult]] = None, jobs: int = 1) -> Table4Report:
    if results is None:
        results = sweep(standard_configs(), jobs)
    merged = label_records(results)
    entries = catalog_entries()
    rows = [e for e in entries if e.row]
    by_label = {e.label: e for e in entries}
    found: Dict[str, CandidateRecord] = {r.label: r for r in merged.values() if r.label}
    seeds_of: Dict[bytes, set] = {}
    for r in results:
        for key in r.candidates:
            seeds_of.setdefault(key, set()).add(r.candidates[key].seed_tag)

    matched, failures = [], []
    for e in rows:
        rec = found.get(e.label)
        if rec is None:
            failures.append(f"{e.label}: not found")
            continue
        c = rec.candidate
        problems = []
        if c.group_label != e.group:
            problems.append(f"group {c.group_label} != {e.group}")
        if c.picard_rank != e.picard_rank:
            problems.append(f"rank {c.picard_rank} != {e.picard_rank}")
        if c.degree != e.degree:
            problems.append(f"degree {c.degree} != {e.degree}")
        if e.seed_tag not in seeds_of.get(rec.canonical, set()):
            problems.append(f"not reached from {e.seed_tag}")
        if problems:
            failures.append(f"{e.label}: " + "; ".join(problems))
        else:
            matched.append(e.label)

    merges, merge_failures = {}, []
    for e in entries:
        if e.same_as:
            a, b = canonical_form(e.build()), canonical_form(by_label[e.same_as].build())
            merges[e.label] = e.same_as
            if a != b:
                merge_failures.append(f"{e.label} != {e.same_as}")

    unexpected = [r for r in merged.values() if r.label is None]

    eh = seed_h2()
    eh_ok = eh.ade_type == "A1" and eh.degree == 8 and eh.picard_rank == 1

    rej_entry = next(e for e in entries if e.verdict == "rejected")
    v = classify(rej_entry.build())
    weights = [rational_str(w) for w in (v.orbifold_weights or ())]
    rejection = {
        "label": rej_entry.label,
        "reason": v.reason,
        "weights": weights,
        "ok": (not v.ok) and weights == ["2/3", "1/3"],
    }

    survivors = sorted({
        (r.config.alpha, r.config.beta)
        for r in results
        if r.config.seed == "type-iii" and r.candidates
    })
    return Table4Report(matched, [e.label for e in rows], merges, merge_failures, failures,
                        unexpected, eh_ok, rejection, survivors)
