"""Top-level reducibility pipeline and its report format.

The decision procedure for an outer automorphism runs in stages:
parse, magnitude bounds, a bounded screen for periodic primitive
conjugacy classes, then enumeration of proper free factor classes up
to the volume budget with a periodicity check on each orbit of
canonical codes.  A periodic witness at either stage certifies
reducibility; exhausting the budget yields an explicitly caveated
"irreducible up to budget" verdict, never a certificate.

Candidate checking is batch-parallel: candidates are processed in
fixed-size batches in enumeration order and a batch is always finished
once started, so counts, witnesses, and reports are byte-identical
across worker counts.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Decimal

from .bounds import BoundReport, bound_report, power_q
from .errors import InputError, RankMismatch, UnknownLetter
from .graphs import CoreGraph, apply_aut, cycle_graph
from .enumeration import EnumerationSpec, enumerate_core_graphs
from .whitehead import is_primitive, is_proper_free_factor
from .words import (
    Alphabet,
    Automorphism,
    Word,
    _split_exponent,
    cyclic_canonical,
    parse_phi,
    word_key,
)

_BATCH_SIZE = 16
_QUICKCHECK_WORD_CAP = 10_000


@dataclass(frozen=True)
class ProblemSpec:
    """One reducibility question: which automorphism, over which
    generating set, with what resource knobs."""

    rank: int
    generators: dict[str, Automorphism]
    phi_word: tuple[str, ...]
    budget: int = 4
    period_max: int | None = None
    quickcheck_len: int = 6
    orbit_volume_cap: int = 10**6
    letter_names: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.rank < 2:
            raise InputError("rank must be at least 2")
        if self.budget < 1:
            raise InputError("budget must be at least 1")
        if self.period_max is not None and self.period_max < 1:
            raise InputError("period_max must be at least 1")
        if self.quickcheck_len < 1:
            raise InputError("quickcheck_len must be at least 1")
        for name, g in self.generators.items():
            if g.rank != self.rank:
                raise RankMismatch(f"generator {name} has rank {g.rank}")

    @property
    def effective_period_max(self) -> int:
        if self.period_max is not None:
            return self.period_max
        return min(power_q(self.rank), 64)

    @property
    def alphabet(self) -> Alphabet:
        if self.letter_names is not None:
            return Alphabet(self.letter_names)
        return Alphabet.of_rank(self.rank)


def parse_problem(text: str) -> ProblemSpec:
    """Parse the line-oriented input format.

    rank 2
    basis a b
    gen L: a -> a b, b -> b
    phi: L L^-1 L
    """
    rank: int | None = None
    names: tuple[str, ...] | None = None
    generators: dict[str, Automorphism] = {}
    phi_word: tuple[str, ...] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("rank "):
            rank = _parse_rank(line, lineno)
        elif line.startswith("basis "):
            names = tuple(line.split()[1:])
            if len(names) != len(set(names)):
                raise InputError(f"line {lineno}: repeated basis letter")
        elif line.startswith("gen "):
            if rank is None:
                raise InputError(f"line {lineno}: gen before rank")
            name, aut = _parse_gen(line, rank, _alphabet(rank, names), lineno)
            if name in generators:
                raise InputError(f"line {lineno}: generator {name} redefined")
            generators[name] = aut
        elif line.startswith("phi:"):
            phi_word = tuple(line[len("phi:"):].split())
            phi_lineno = lineno
        else:
            raise InputError(f"line {lineno}: unrecognized directive: {line!r}")
    if rank is None:
        raise InputError("missing 'rank' line")
    if phi_word is None:
        raise InputError("missing 'phi:' line")
    if names is not None and len(names) != rank:
        raise InputError(f"basis names {names} do not match rank {rank}")
    # generators may be declared after the phi line, so check tokens last
    for tok in phi_word:
        try:
            name, _ = _split_exponent(tok)
        except InputError as exc:
            raise InputError(f"line {phi_lineno}: {exc}") from exc
        if name not in generators:
            raise InputError(
                f"line {phi_lineno}: unknown generator {name!r} in phi")
    return ProblemSpec(rank=rank, generators=generators, phi_word=phi_word,
                       letter_names=names)


def _alphabet(rank: int, names: tuple[str, ...] | None) -> Alphabet:
    if names is None:
        return Alphabet.of_rank(rank)
    if len(names) != rank:
        raise InputError(f"basis names {names} do not match rank {rank}")
    return Alphabet(names)


def _parse_rank(line: str, lineno: int) -> int:
    parts = line.split()
    if len(parts) != 2 or not parts[1].isdigit():
        raise InputError(f"line {lineno}: expected 'rank N'")
    return int(parts[1])


def _parse_gen(line: str, rank: int, alphabet: Alphabet, lineno: int):
    head, _, body = line[len("gen "):].partition(":")
    name = head.strip()
    if not name or " " in name:
        raise InputError(f"line {lineno}: bad generator name {head!r}")
    images: dict[int, Word] = {}
    for clause in body.split(","):
        lhs, arrow, rhs = clause.partition("->")
        if not arrow:
            raise InputError(f"line {lineno}: expected 'letter -> word' in {clause!r}")
        try:
            src = alphabet.parse_word(lhs)
            img = alphabet.parse_word(rhs)
        except UnknownLetter as exc:
            raise InputError(f"line {lineno}: {exc}") from exc
        if len(src) != 1 or src[0] < 0:
            raise InputError(f"line {lineno}: left side must be a single basis letter")
        if src[0] in images:
            raise InputError(f"line {lineno}: letter mapped twice")
        images[src[0]] = img
    if sorted(images) != list(range(1, rank + 1)):
        raise InputError(f"line {lineno}: generator {name} must map every basis letter")
    try:
        aut = Automorphism.from_images(
            rank, tuple(images[i] for i in range(1, rank + 1)))
    except InputError as exc:
        raise InputError(f"line {lineno}: {exc}") from exc
    return name, aut


def quick_cyclic_check(phi: Automorphism, quickcheck_len: int,
                       period_max: int) -> tuple[Word, int, tuple[Word, ...]] | None:
    """Search short primitive conjugacy classes for a periodic orbit.

    Returns (canonical word, period, orbit) for the first periodic
    primitive class in (length, word) order, or None.  A None result is
    a screen outcome, not a certificate: longer classes are untested
    and orbits are abandoned once words outgrow a fixed cap.
    """
    rank = phi.rank
    seen: set[Word] = set()
    candidates: list[Word] = []
    for length in range(1, quickcheck_len + 1):
        for w in _reduced_words(rank, length):
            canon = cyclic_canonical(w)
            if len(canon) != length or canon in seen:
                continue
            seen.add(canon)
            if is_primitive(canon, rank):
                candidates.append(canon)
    candidates.sort(key=lambda w: (len(w), word_key(w)))
    for w in candidates:
        orbit = [w]
        cur = w
        for p in range(1, period_max + 1):
            cur = cyclic_canonical(phi.apply(cur))
            if cur == w:
                return w, p, tuple(orbit)
            if len(cur) > _QUICKCHECK_WORD_CAP:
                break
            orbit.append(cur)
    return None


def _reduced_words(rank: int, length: int):
    letters = [c for i in range(1, rank + 1) for c in (i, -i)]
    stack: list[Word] = [()]
    while stack:
        w = stack.pop()
        if len(w) == length:
            yield w
            continue
        for c in letters:
            if w and w[-1] == -c:
                continue
            stack.append(w + (c,))


@dataclass(frozen=True)
class OrbitResult:
    """Outcome of driving one free factor class around its code orbit.

    codes is populated only for periodic outcomes; computing canonical
    codes is quadratic in volume, which non-periodic orbits can push
    past a million.
    """

    kind: str  # "periodic" | "not_periodic" | "inconclusive"
    period: int | None
    codes: tuple[str, ...]
    volumes: tuple[int, ...]


def orbit_periodic(graph: CoreGraph, phi: Automorphism, period_max: int,
                   orbit_volume_cap: int = 10**6) -> OrbitResult:
    """Test whether the conjugacy class of a subgroup is periodic by
    comparing canonical codes of iterated images.

    Since the induced map on classes is a bijection, the first repeat
    can only be the starting code, and a repeat forces equal volume, so
    code comparison is skipped whenever the volumes differ.
    """
    start = graph.code
    orbit = [graph]
    volumes = [graph.volume]
    cur = graph
    for p in range(1, period_max + 1):
        cur = apply_aut(cur, phi)
        volumes.append(cur.volume)
        if cur.volume == graph.volume and cur.code == start:
            codes = tuple(g.code.decode() for g in orbit)
            return OrbitResult("periodic", p, codes, tuple(volumes))
        if cur.volume > orbit_volume_cap:
            return OrbitResult("inconclusive", None, (), tuple(volumes))
        orbit.append(cur)
    return OrbitResult("not_periodic", None, (), tuple(volumes))


@dataclass(frozen=True)
class Verdict:
    """What the pipeline concluded, with its certificate when one exists.

    kind is one of "reducible", "cyclically_reducible",
    "irreducible_up_to_budget", or "fully_irreducible_certified"; the
    last requires exhausting the theoretical volume bound plus an
    external certificate for the cyclic screen and is never produced
    by this pipeline.
    """

    kind: str
    witness: CoreGraph | None = None
    witness_word: str | None = None
    period: int | None = None
    orbit_codes: tuple[str, ...] = ()

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "witness": self.witness.dump().splitlines() if self.witness else None,
            "witness_word": self.witness_word,
            "period": self.period,
            "orbit_codes": list(self.orbit_codes),
        }


@dataclass(frozen=True)
class DecisionReport:
    spec_params: dict
    phi_length: int
    bounds: BoundReport
    verdict: Verdict
    counts: dict
    caveats: tuple[str, ...]
    timings: dict | None = None

    def to_json_dict(self, include_timings: bool = False) -> dict:
        return {
            "params": self.spec_params,
            "phi_length": self.phi_length,
            "bound_report": self.bounds.to_json_dict(),
            "verdict": self.verdict.to_json_dict(),
            "counts": self.counts,
            "caveats": list(self.caveats),
            "timings": self.timings if include_timings else None,
        }

    def canonical_json(self, include_timings: bool = False) -> str:
        return json.dumps(self.to_json_dict(include_timings), indent=2,
                          sort_keys=True) + "\n"

    def format_text(self) -> str:
        v = self.verdict
        lines = [f"verdict: {v.kind}"]
        if v.witness_word is not None:
            lines.append(f"  witness word: {v.witness_word}")
        if v.witness is not None:
            lines.append("  witness graph: " + "; ".join(v.witness.dump().splitlines()))
        if v.period is not None:
            lines.append(f"  period: {v.period}")
        lines.append(f"phi length: {self.phi_length}")
        c = self.counts
        lines.append("counts: enumerated {enumerated}, filtered {filtered}, "
                     "checked {checked}, inconclusive {inconclusive}".format(**c))
        lines.append(f"log10 of theoretical volume bound: {self.bounds.v_log10}")
        for caveat in self.caveats:
            lines.append(f"caveat: {caveat}")
        return "\n".join(lines) + "\n"


def decide(spec: ProblemSpec, threads: int = 1) -> DecisionReport:
    """Run the full pipeline on one problem spec."""
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    phi, phi_length = parse_phi(spec.phi_word, spec.generators, spec.rank)
    period_max = spec.effective_period_max
    gens_for_bounds = (list(spec.generators.values())
                       or [Automorphism.identity(spec.rank)])
    bounds = bound_report(spec.rank, gens_for_bounds, phi_length)
    timings["parse_and_bounds"] = time.perf_counter() - t0

    params = {
        "rank": spec.rank,
        "generators": sorted(spec.generators),
        "phi": list(spec.phi_word),
        "budget": spec.budget,
        "period_max": period_max,
        "quickcheck_len": spec.quickcheck_len,
        "orbit_volume_cap": spec.orbit_volume_cap,
    }
    alphabet = spec.alphabet

    t0 = time.perf_counter()
    hit = quick_cyclic_check(phi, spec.quickcheck_len, period_max)
    timings["quick_cyclic_check"] = time.perf_counter() - t0
    if hit is not None:
        w, p, orbit = hit
        verdict = Verdict(
            kind="cyclically_reducible",
            witness=cycle_graph(w, spec.rank),
            witness_word=alphabet.format_word(w),
            period=p,
            orbit_codes=tuple(alphabet.format_word(o) for o in orbit),
        )
        counts = {"enumerated": 0, "filtered": 0, "checked": 0, "inconclusive": 0}
        caveats = (_cyclic_witness_caveat(),)
        return DecisionReport(params, phi_length, bounds, verdict, counts,
                              caveats, timings)

    t0 = time.perf_counter()
    enumerated = 0
    factors: list[CoreGraph] = []
    enum_spec = EnumerationSpec(rank=spec.rank, max_volume=spec.budget,
                                min_rank=1, max_rank=spec.rank - 1)
    for g in enumerate_core_graphs(enum_spec, threads=threads):
        enumerated += 1
        if is_proper_free_factor(g, spec.rank):
            factors.append(g)
    timings["enumeration"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    checked = 0
    inconclusive = 0
    winner: tuple[CoreGraph, OrbitResult] | None = None

    def check(g: CoreGraph) -> OrbitResult:
        return orbit_periodic(g, phi, period_max, spec.orbit_volume_cap)

    for lo in range(0, len(factors), _BATCH_SIZE):
        batch = factors[lo:lo + _BATCH_SIZE]
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(check, batch))
        else:
            results = [check(g) for g in batch]
        checked += len(batch)
        inconclusive += sum(1 for r in results if r.kind == "inconclusive")
        hits = [(g, r) for g, r in zip(batch, results) if r.kind == "periodic"]
        if hits:
            winner = min(hits, key=lambda gr: (gr[0].volume, gr[0].code))
            break
    timings["orbit_checks"] = time.perf_counter() - t0

    counts = {"enumerated": enumerated, "filtered": len(factors),
              "checked": checked, "inconclusive": inconclusive}
    if winner is not None:
        g, r = winner
        verdict = Verdict(kind="reducible", witness=g, period=r.period,
                          orbit_codes=r.codes)
        return DecisionReport(params, phi_length, bounds, verdict, counts,
                              (), timings)

    caveats = [_screen_caveat(spec.quickcheck_len, period_max)]
    if Decimal(spec.budget).log10() < bounds.v_log10:
        caveats.append(
            f"enumeration budget {spec.budget} is below the theoretical "
            f"volume bound (log10 V = {bounds.v_log10})")
    if inconclusive:
        caveats.append(
            f"{inconclusive} orbit check(s) hit the volume cap and were abandoned")
    verdict = Verdict(kind="irreducible_up_to_budget")
    return DecisionReport(params, phi_length, bounds, verdict, counts,
                          tuple(caveats), timings)


def _screen_caveat(quickcheck_len: int, period_max: int) -> str:
    return (f"periodic primitive classes screened only up to cyclic length "
            f"{quickcheck_len} and period {period_max}; the screen is not a "
            f"certificate")


def _cyclic_witness_caveat() -> str:
    return ("witness is a periodic primitive conjugacy class; it generates a "
            "periodic rank-1 free factor")
