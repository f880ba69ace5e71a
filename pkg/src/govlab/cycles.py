"""Orbit outcome classification, cycle canonicalization, and range scanning.

detect_outcome walks the accelerated odd-to-odd map but reproduces the
step-for-step termination behaviour of dynamics.orbit exactly, including
terminations that fall inside an even run.  scan_range partitions a seed
range into fixed-size chunks, classifies every odd seed, and folds chunk
results in index order so the report is independent of worker count and of
checkpoint interruptions.
"""

from __future__ import annotations

import enum
import json
import os
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass

from .dynamics import OrbitLimits, Rule, TerminationKind, rule_for
from .numerics import governor_index

SCHEMA_VERSION = 1

DEFAULT_CHUNK_SIZE = 1 << 16  # seeds per chunk


class Classification(enum.Enum):
    TRIVIAL = "trivial"
    AUXILIARY = "auxiliary"


@dataclass(frozen=True)
class CycleRecord:
    """A cycle in canonical form: all_members starts at the smallest odd member."""

    odd_members: tuple[int, ...]
    all_members: tuple[int, ...]
    classification: Classification
    smallest_odd: int
    governor_indices: tuple[tuple[int, int], ...]

    def to_doc(self) -> dict:
        return {
            "smallest_odd": str(self.smallest_odd),
            "classification": self.classification.value,
            "odd_members": [str(v) for v in self.odd_members],
            "all_members": [str(v) for v in self.all_members],
            "governor_indices": [
                {"member": str(v), "index": m} for v, m in self.governor_indices
            ],
        }

    @staticmethod
    def from_doc(doc: dict, rule: Rule) -> "CycleRecord":
        return canonical_cycle([int(v) for v in doc["all_members"]], rule)


def _is_cyclic_rotation(seq: tuple[int, ...], ref: tuple[int, ...]) -> bool:
    if len(seq) != len(ref):
        return False
    doubled = ref + ref
    n = len(ref)
    return any(doubled[i : i + n] == seq for i in range(n))


def classify_cycle(record: "CycleRecord", rule: Rule) -> Classification:
    """Trivial iff the member sequence is a rotation of the rule's trivial cycle."""
    return _classify_members(record.all_members, rule)


def _classify_members(members: tuple[int, ...], rule: Rule) -> Classification:
    if _is_cyclic_rotation(members, rule.trivial_cycle):
        return Classification.TRIVIAL
    return Classification.AUXILIARY


def canonical_cycle(members, rule: Rule) -> CycleRecord:
    """Validate a closed member list and rotate it to start at the smallest odd.

    Raises ValueError unless every member steps to the next one under the
    rule (the last wrapping to the first) and no member repeats.
    """
    members = tuple(members)
    if not members:
        raise ValueError("a cycle must have at least one member")
    if len(set(members)) != len(members):
        raise ValueError("cycle members must be distinct")
    n = len(members)
    for i, v in enumerate(members):
        succ = members[(i + 1) % n]
        expected = rule.multiplier * v + 1 if v % 2 else v // 2
        if succ != expected:
            raise ValueError(
                f"not a closed cycle: {v} steps to {expected}, list has {succ}"
            )
    odds = tuple(sorted(v for v in members if v % 2))
    # a closed cycle of only even values is impossible (halving decreases)
    assert odds
    smallest = odds[0]
    at = members.index(smallest)
    rotated = members[at:] + members[:at]
    return CycleRecord(
        odd_members=odds,
        all_members=rotated,
        classification=_classify_members(rotated, rule),
        smallest_odd=smallest,
        governor_indices=tuple((v, governor_index(v)) for v in rotated if v % 2),
    )


def trivial_cycle_record(rule: Rule) -> CycleRecord:
    return canonical_cycle(rule.trivial_cycle, rule)


class OutcomeTag(enum.Enum):
    CONVERGED_TRIVIAL = "converged_trivial"
    CYCLE = "cycle"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class Outcome:
    """Classification of one seed's orbit, with the stats the scanner folds."""

    tag: OutcomeTag
    cycle: CycleRecord | None = None
    undecided_reason: TerminationKind | None = None
    steps_taken: int = 0
    peak_bits: int = 0


def _expand_cycle(odds: list[int], q: int) -> list[int]:
    """Full member list of a cycle given its odd members in orbit order."""
    members: list[int] = []
    for o in odds:
        members.append(o)
        t = q * o + 1
        k = (t & -t).bit_length() - 1
        for j in range(k):
            members.append(t >> j)
    return members


def detect_outcome(x: int, rule: Rule, limits: OrbitLimits) -> Outcome:
    """Classify the orbit of odd seed x without materializing it.

    Mirrors dynamics.orbit exactly: at each value the checks run in the
    order trivial-membership, step budget, value production (bit cap,
    repetition).  Within an even run only three things can happen, each
    resolved arithmetically instead of value-by-value:

    * the run passes a trivial-cycle member, which forces the landing odd
      to be a trivial odd member (every even trivial member is odd-member
      times a power of two);
    * the orbit closes a cycle, which forces the landing odd to be a
      previously seen odd (the first repeated value is the cycle's entry
      point, `u << min(entry valuations)`);
    * the step budget runs out.
    """
    if x % 2 == 0 or x < 1:
        raise ValueError(f"detect_outcome requires a positive odd seed, got {x}")
    q = rule.multiplier
    trivial = rule.trivial_members
    trivial_odds = rule.trivial_odd_members
    max_steps = limits.max_steps
    cap = limits.max_value_bits

    peak = x.bit_length()
    # odd value -> (step position, valuation of the entering run, order index)
    seen: dict[int, tuple[int, int, int]] = {x: (0, 0, 0)}
    order: list[int] = [x]
    cur = x
    s = 0
    while True:
        if cur in trivial:
            return Outcome(OutcomeTag.CONVERGED_TRIVIAL, steps_taken=s, peak_bits=peak)
        if s == max_steps:
            return Outcome(
                OutcomeTag.UNDECIDED,
                undecided_reason=TerminationKind.STEP_LIMIT,
                steps_taken=s,
                peak_bits=peak,
            )
        t = q * cur + 1
        s1 = s + 1
        bits = t.bit_length()
        if bits > peak:
            peak = bits
        if bits > cap:
            return Outcome(
                OutcomeTag.UNDECIDED,
                undecided_reason=TerminationKind.VALUE_LIMIT,
                steps_taken=s1,
                peak_bits=peak,
            )
        k = (t & -t).bit_length() - 1
        u = t >> k
        hit = seen.get(u)
        if hit is not None:
            _, k_first, idx = hit
            kmin = k_first if k_first < k else k
            # second occurrence of the first repeated value u << kmin
            done_pos = s1 + k - kmin
            if done_pos > max_steps:
                return Outcome(
                    OutcomeTag.UNDECIDED,
                    undecided_reason=TerminationKind.STEP_LIMIT,
                    steps_taken=max_steps,
                    peak_bits=peak,
                )
            record = canonical_cycle(_expand_cycle(order[idx:], q), rule)
            return Outcome(
                OutcomeTag.CYCLE, cycle=record, steps_taken=done_pos, peak_bits=peak
            )
        if u in trivial_odds:
            # first trivial member along t>>1 .. t>>k; u itself guarantees one
            j_hit = k
            for j in range(1, k):
                if (t >> j) in trivial:
                    j_hit = j
                    break
            if s1 + j_hit > max_steps:
                return Outcome(
                    OutcomeTag.UNDECIDED,
                    undecided_reason=TerminationKind.STEP_LIMIT,
                    steps_taken=max_steps,
                    peak_bits=peak,
                )
            return Outcome(
                OutcomeTag.CONVERGED_TRIVIAL, steps_taken=s1 + j_hit, peak_bits=peak
            )
        if s1 + k > max_steps:
            return Outcome(
                OutcomeTag.UNDECIDED,
                undecided_reason=TerminationKind.STEP_LIMIT,
                steps_taken=max_steps,
                peak_bits=peak,
            )
        s = s1 + k
        seen[u] = (s, k, len(order))
        order.append(u)
        cur = u


# ---------------------------------------------------------------------------
# Range scanning
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChunkResult:
    """Fold state for one chunk of seeds, fully determined by the chunk bounds."""

    index: int
    counts: tuple[int, int, int, int]  # trivial, cycle, step-limited, value-limited
    cycles: tuple[CycleRecord, ...]  # deduplicated by smallest_odd, ascending
    candidates: tuple[int, ...]  # undecided seeds, ascending
    max_excursion_bits: int
    max_steps_observed: int

    def to_doc(self) -> dict:
        ct, ec, sl, vl = self.counts
        return {
            "index": self.index,
            "counts": {
                "converged_trivial": ct,
                "entered_cycle": ec,
                "undecided_step_limit": sl,
                "undecided_value_limit": vl,
            },
            "cycles": [c.to_doc() for c in self.cycles],
            "candidates": [str(v) for v in self.candidates],
            "max_excursion_bits": self.max_excursion_bits,
            "max_steps_observed": self.max_steps_observed,
        }

    @staticmethod
    def from_doc(doc: dict, rule: Rule) -> "ChunkResult":
        c = doc["counts"]
        return ChunkResult(
            index=int(doc["index"]),
            counts=(
                int(c["converged_trivial"]),
                int(c["entered_cycle"]),
                int(c["undecided_step_limit"]),
                int(c["undecided_value_limit"]),
            ),
            cycles=tuple(CycleRecord.from_doc(d, rule) for d in doc["cycles"]),
            candidates=tuple(int(v) for v in doc["candidates"]),
            max_excursion_bits=int(doc["max_excursion_bits"]),
            max_steps_observed=int(doc["max_steps_observed"]),
        )


def _scan_chunk(
    index: int, multiplier: int, lo: int, hi: int, max_steps: int, max_value_bits: int
) -> ChunkResult:
    rule = rule_for(multiplier)
    limits = OrbitLimits(max_steps=max_steps, max_value_bits=max_value_bits)
    counts = [0, 0, 0, 0]
    cycles: dict[int, CycleRecord] = {}
    candidates: list[int] = []
    max_bits = 0
    max_steps_obs = 0
    for seed in range(lo, hi + 1, 2):
        out = detect_outcome(seed, rule, limits)
        if out.tag is OutcomeTag.CONVERGED_TRIVIAL:
            counts[0] += 1
        elif out.tag is OutcomeTag.CYCLE:
            counts[1] += 1
            rec = out.cycle
            assert rec is not None
            cycles.setdefault(rec.smallest_odd, rec)
        elif out.undecided_reason is TerminationKind.STEP_LIMIT:
            counts[2] += 1
            candidates.append(seed)
        else:
            counts[3] += 1
            candidates.append(seed)
        if out.peak_bits > max_bits:
            max_bits = out.peak_bits
        if out.steps_taken > max_steps_obs:
            max_steps_obs = out.steps_taken
    return ChunkResult(
        index=index,
        counts=tuple(counts),
        cycles=tuple(cycles[k] for k in sorted(cycles)),
        candidates=tuple(candidates),
        max_excursion_bits=max_bits,
        max_steps_observed=max_steps_obs,
    )


@dataclass(frozen=True)
class ScanReport:
    rule_multiplier: int
    lo: int
    hi: int
    limits: OrbitLimits
    counts: dict[str, int]
    cycles: tuple[CycleRecord, ...]
    divergence_candidates: tuple[int, ...]
    max_excursion_bits: int
    max_steps_observed: int
    schema_version: int = SCHEMA_VERSION

    def to_doc(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "kind": "govlab-scan-report",
            "rule": f"{self.rule_multiplier}Z+1",
            "range": {"lo": str(self.lo), "hi": str(self.hi)},
            "limits": {
                "max_steps": self.limits.max_steps,
                "max_value_bits": self.limits.max_value_bits,
            },
            "counts": dict(self.counts),
            "cycles": [c.to_doc() for c in self.cycles],
            "divergence_candidates": [str(v) for v in self.divergence_candidates],
            "stats": {
                "max_excursion_bits": self.max_excursion_bits,
                "max_steps_observed": self.max_steps_observed,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_doc(), sort_keys=True, indent=2) + "\n"


class CheckpointError(Exception):
    """Raised when a checkpoint file is unreadable or does not match the scan."""


@dataclass
class ScanState:
    """Scan identity plus the chunk results accumulated so far."""

    rule_multiplier: int
    lo: int
    hi: int
    limits: OrbitLimits
    chunk_size: int
    completed: dict[int, ChunkResult]

    def to_doc(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "govlab-scan-checkpoint",
            "rule": f"{self.rule_multiplier}Z+1",
            "multiplier": self.rule_multiplier,
            "range": {"lo": str(self.lo), "hi": str(self.hi)},
            "limits": {
                "max_steps": self.limits.max_steps,
                "max_value_bits": self.limits.max_value_bits,
            },
            "chunk_size": self.chunk_size,
            "chunks": [self.completed[i].to_doc() for i in sorted(self.completed)],
        }


def checkpoint_save(state: ScanState, path: str) -> None:
    """Atomically write the scan state as a self-describing JSON document."""
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(state.to_doc(), fh, sort_keys=True, indent=2)
        fh.write("\n")
    os.replace(tmp, path)


def checkpoint_load(path: str) -> ScanState:
    """Load a checkpoint, raising CheckpointError on any structural problem."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"corrupt checkpoint {path}: {exc}") from exc
    try:
        if doc["schema_version"] != SCHEMA_VERSION:
            raise CheckpointError(
                f"checkpoint schema_version {doc['schema_version']} is not "
                f"{SCHEMA_VERSION}"
            )
        if doc.get("kind") != "govlab-scan-checkpoint":
            raise CheckpointError(f"{path} is not a scan checkpoint")
        rule = rule_for(int(doc["multiplier"]))
        limits = OrbitLimits(
            max_steps=int(doc["limits"]["max_steps"]),
            max_value_bits=int(doc["limits"]["max_value_bits"]),
        )
        state = ScanState(
            rule_multiplier=rule.multiplier,
            lo=int(doc["range"]["lo"]),
            hi=int(doc["range"]["hi"]),
            limits=limits,
            chunk_size=int(doc["chunk_size"]),
            completed={},
        )
        for chunk_doc in doc["chunks"]:
            chunk = ChunkResult.from_doc(chunk_doc, rule)
            state.completed[chunk.index] = chunk
    except CheckpointError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise CheckpointError(f"corrupt checkpoint {path}: {exc}") from exc
    return state


def _chunk_bounds(lo: int, n_seeds: int, chunk_size: int, index: int) -> tuple[int, int]:
    first = index * chunk_size
    last = min(first + chunk_size, n_seeds) - 1
    return lo + 2 * first, lo + 2 * last


def _merge(state: ScanState, rule: Rule, n_chunks: int) -> ScanReport:
    counts = [0, 0, 0, 0]
    cycles: dict[int, CycleRecord] = {}
    candidates: list[int] = []
    max_bits = 0
    max_steps_obs = 0
    for i in range(n_chunks):
        chunk = state.completed[i]
        for j in range(4):
            counts[j] += chunk.counts[j]
        for rec in chunk.cycles:
            cycles.setdefault(rec.smallest_odd, rec)
        candidates.extend(chunk.candidates)
        max_bits = max(max_bits, chunk.max_excursion_bits)
        max_steps_obs = max(max_steps_obs, chunk.max_steps_observed)
    if counts[0] > 0:
        # seeds reached the trivial cycle, so it was observed even though no
        # seed's outcome carries it as a CycleRecord
        triv = trivial_cycle_record(rule)
        cycles.setdefault(triv.smallest_odd, triv)
    ct, ec, sl, vl = counts
    return ScanReport(
        rule_multiplier=rule.multiplier,
        lo=state.lo,
        hi=state.hi,
        limits=state.limits,
        counts={
            "converged_trivial": ct,
            "entered_cycle": ec,
            "undecided_step_limit": sl,
            "undecided_value_limit": vl,
            "total": ct + ec + sl + vl,
        },
        cycles=tuple(cycles[k] for k in sorted(cycles)),
        divergence_candidates=tuple(candidates),
        max_excursion_bits=max_bits,
        max_steps_observed=max_steps_obs,
    )


def scan_range(
    lo: int,
    hi: int,
    rule: Rule,
    limits: OrbitLimits,
    workers: int = 1,
    *,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    checkpoint_path: str | None = None,
) -> ScanReport:
    """Classify every odd seed in [lo, hi] and fold the results into a report.

    Chunks are computed independently (in worker processes when workers > 1)
    and merged in index order, so the report bytes do not depend on the
    worker count.  With checkpoint_path set, the state is rewritten after
    every completed chunk and a matching existing checkpoint is resumed.
    """
    if lo % 2 == 0 or hi % 2 == 0 or lo < 1:
        raise ValueError(f"scan bounds must be positive odd integers, got {lo}:{hi}")
    if lo > hi:
        raise ValueError(f"empty scan range {lo}:{hi}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if chunk_size < 1:
        raise ValueError(f"chunk_size must be >= 1, got {chunk_size}")

    n_seeds = (hi - lo) // 2 + 1
    n_chunks = (n_seeds + chunk_size - 1) // chunk_size

    state = ScanState(
        rule_multiplier=rule.multiplier,
        lo=lo,
        hi=hi,
        limits=limits,
        chunk_size=chunk_size,
        completed={},
    )
    if checkpoint_path is not None and os.path.exists(checkpoint_path):
        loaded = checkpoint_load(checkpoint_path)
        if (
            loaded.rule_multiplier != rule.multiplier
            or loaded.lo != lo
            or loaded.hi != hi
            or loaded.limits != limits
            or loaded.chunk_size != chunk_size
        ):
            raise CheckpointError(
                f"checkpoint {checkpoint_path} was written by a different scan "
                f"(rule/range/limits/chunk_size mismatch)"
            )
        state = loaded

    pending = [i for i in range(n_chunks) if i not in state.completed]
    if pending:
        if workers == 1:
            for i in pending:
                c_lo, c_hi = _chunk_bounds(lo, n_seeds, chunk_size, i)
                state.completed[i] = _scan_chunk(
                    i, rule.multiplier, c_lo, c_hi, limits.max_steps, limits.max_value_bits
                )
                if checkpoint_path is not None:
                    checkpoint_save(state, checkpoint_path)
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = {}
                for i in pending:
                    c_lo, c_hi = _chunk_bounds(lo, n_seeds, chunk_size, i)
                    fut = pool.submit(
                        _scan_chunk,
                        i,
                        rule.multiplier,
                        c_lo,
                        c_hi,
                        limits.max_steps,
                        limits.max_value_bits,
                    )
                    futures[fut] = i
                outstanding = set(futures)
                while outstanding:
                    done, outstanding = wait(outstanding, return_when=FIRST_COMPLETED)
                    for fut in done:
                        chunk = fut.result()
                        state.completed[chunk.index] = chunk
                    if checkpoint_path is not None:
                        checkpoint_save(state, checkpoint_path)
    return _merge(state, rule, n_chunks)
