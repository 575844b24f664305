"""Emulated multi-rank execution with communication accounting.

A ``p``-bit rank space splits the ``n`` global qubits into ``n - p`` offset
bits and ``p`` rank bits: every amplitude lives on the rank spelled by its
qubit values at the rank-bit positions, at the local offset spelled by the
rest. Which qubits play which role is a layout, and each part runs under a
layout that keeps the part's whole working set in the offset bits, so its
gates never cross ranks. Between parts the layout changes and amplitudes
move; the move is planned as coalesced runs and every remote amplitude is
charged 16 bytes (one complex128).

All ranks are emulated in one process as rows of a single array, which
makes the accounting exact and the final state directly comparable with
the flat reference.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import LayoutMismatchError, PartTooWideForLayoutError
from .hier import QubitSlotMap, part_block_indices, remap_part, run_part
from .partition import MultiLevelPartition, Part, PartitionResult
from .qasm import Circuit
from .statevec import StateVector, zero_state

__all__ = [
    "RankLayout",
    "default_layout",
    "choose_layout",
    "layout_positions",
    "TransferRun",
    "RedistributionPlan",
    "plan_redistribution",
    "SwitchStats",
    "CommStats",
    "DistributedRun",
    "distribute_state",
    "assemble_state",
    "simulate_distributed",
    "BYTES_PER_AMPLITUDE",
]

BYTES_PER_AMPLITUDE = 16


# --- layouts ----------------------------------------------------------------

@dataclass(frozen=True)
class RankLayout:
    """Assignment of global qubits to offset bits and rank bits.

    ``local[j]`` is the qubit stored in offset bit ``j`` and ``process[k]``
    the qubit spelled by rank bit ``k``; both tuples are ascending, so the
    lowest-numbered local qubit is the fastest-varying offset bit.
    """

    num_qubits: int
    local: tuple[int, ...]
    process: tuple[int, ...]

    def __post_init__(self) -> None:
        seen = sorted(self.local + self.process)
        if seen != list(range(self.num_qubits)):
            raise ValueError("local and process must partition the qubits")
        if list(self.local) != sorted(self.local):
            raise ValueError("local qubits must be ascending")
        if list(self.process) != sorted(self.process):
            raise ValueError("process qubits must be ascending")

    @property
    def num_rank_bits(self) -> int:
        return len(self.process)

    @property
    def num_ranks(self) -> int:
        return 1 << len(self.process)

    @property
    def num_local_qubits(self) -> int:
        return len(self.local)

    def is_local(self, q: int) -> bool:
        i = bisect_left(self.local, q)
        return i < len(self.local) and self.local[i] == q

    def offset_bit_of(self, q: int) -> int:
        i = bisect_left(self.local, q)
        if i == len(self.local) or self.local[i] != q:
            raise KeyError(f"qubit {q} is not local in this layout")
        return i

    def rank_bit_of(self, q: int) -> int:
        i = bisect_left(self.process, q)
        if i == len(self.process) or self.process[i] != q:
            raise KeyError(f"qubit {q} is not a rank bit in this layout")
        return i

    def address_of(self, global_index: int) -> tuple[int, int]:
        """(rank, offset) of one global amplitude index."""
        off = 0
        for j, q in enumerate(self.local):
            off |= ((global_index >> q) & 1) << j
        rank = 0
        for k, q in enumerate(self.process):
            rank |= ((global_index >> q) & 1) << k
        return rank, off


def default_layout(num_qubits: int, num_rank_bits: int) -> RankLayout:
    """Lowest qubits local, highest qubits as rank bits."""
    if not 0 <= num_rank_bits <= num_qubits:
        raise ValueError(
            f"rank bits {num_rank_bits} outside 0..{num_qubits}"
        )
    cut = num_qubits - num_rank_bits
    return RankLayout(
        num_qubits, tuple(range(cut)), tuple(range(cut, num_qubits))
    )


def choose_layout(
    num_qubits: int, num_rank_bits: int, part: Part
) -> RankLayout:
    """Layout that keeps the part's working set local.

    The part's qubits are padded with the lowest-numbered remaining qubits
    up to ``num_qubits - num_rank_bits`` locals; everything else becomes a
    rank bit.
    """
    l = num_qubits - num_rank_bits
    if part.working_set > l:
        raise PartTooWideForLayoutError(
            f"part {part.id} needs {part.working_set} local qubits, only "
            f"{l} available with {num_rank_bits} rank bits on "
            f"{num_qubits} qubits"
        )
    local = set(part.qubits)
    for q in range(num_qubits):
        if len(local) == l:
            break
        local.add(q)
    process = tuple(q for q in range(num_qubits) if q not in local)
    return RankLayout(num_qubits, tuple(sorted(local)), process)


def layout_positions(layout: RankLayout) -> np.ndarray:
    """Flat storage position of every global index under a layout.

    Entry ``g`` is ``rank * 2**l + offset`` for the amplitude with global
    index ``g``; as a permutation of ``arange(2**n)`` it maps natural
    order to storage order.
    """
    n = layout.num_qubits
    g = np.arange(1 << n, dtype=np.int64)
    off = np.zeros_like(g)
    for j, q in enumerate(layout.local):
        off |= ((g >> np.int64(q)) & 1) << np.int64(j)
    rank = np.zeros_like(g)
    for k, q in enumerate(layout.process):
        rank |= ((g >> np.int64(q)) & 1) << np.int64(k)
    return (rank << np.int64(layout.num_local_qubits)) | off


# --- redistribution ---------------------------------------------------------

@dataclass(frozen=True)
class TransferRun:
    """One maximal run of amplitudes moving together between two ranks."""

    src_rank: int
    dst_rank: int
    src_offset: int
    dst_offset: int
    length: int

    @property
    def num_bytes(self) -> int:
        return BYTES_PER_AMPLITUDE * self.length

    @property
    def resident(self) -> bool:
        return self.src_rank == self.dst_rank


@dataclass(frozen=True)
class RedistributionPlan:
    """How every amplitude moves when the layout changes.

    Runs are stored as parallel arrays ordered by source position; a run
    never crosses a source-rank boundary, never changes destination rank,
    and its destination offsets are consecutive. Amplitudes that stay on
    their rank are resident and cost nothing; every other amplitude is
    charged ``BYTES_PER_AMPLITUDE``.
    """

    old: RankLayout
    new: RankLayout
    src_rank: np.ndarray
    dst_rank: np.ndarray
    src_offset: np.ndarray
    dst_offset: np.ndarray
    length: np.ndarray

    @property
    def num_runs(self) -> int:
        return len(self.length)

    @property
    def remote_amplitudes(self) -> int:
        return int(self.length[self.src_rank != self.dst_rank].sum())

    @property
    def resident_amplitudes(self) -> int:
        return int(self.length[self.src_rank == self.dst_rank].sum())

    @property
    def total_bytes(self) -> int:
        return BYTES_PER_AMPLITUDE * self.remote_amplitudes

    @property
    def messages(self) -> int:
        """Distinct remote (src, dst) rank pairs; one message carries all
        the runs of a pair."""
        remote = self.src_rank != self.dst_rank
        pairs = self.src_rank[remote] * np.int64(self.old.num_ranks) + \
            self.dst_rank[remote]
        return len(np.unique(pairs))

    def sent_bytes_by_rank(self) -> dict[int, int]:
        return self._bytes_by_rank(self.src_rank)

    def received_bytes_by_rank(self) -> dict[int, int]:
        return self._bytes_by_rank(self.dst_rank)

    def _bytes_by_rank(self, ranks: np.ndarray) -> dict[int, int]:
        remote = self.src_rank != self.dst_rank
        counts = np.bincount(
            ranks[remote], weights=self.length[remote],
            minlength=self.old.num_ranks,
        )
        return {
            r: BYTES_PER_AMPLITUDE * int(c)
            for r, c in enumerate(counts) if c
        }

    def iter_runs(self) -> Iterator[TransferRun]:
        for i in range(self.num_runs):
            yield TransferRun(
                int(self.src_rank[i]),
                int(self.dst_rank[i]),
                int(self.src_offset[i]),
                int(self.dst_offset[i]),
                int(self.length[i]),
            )

    def apply(self, buffers: np.ndarray) -> np.ndarray:
        """Rearrange ``(num_ranks, 2**l)`` buffers into the new layout."""
        flat = buffers.reshape(-1)
        out = np.empty_like(flat)
        src = layout_positions(self.old)
        dst = layout_positions(self.new)
        out[dst] = flat[src]
        return out.reshape(buffers.shape)


def plan_redistribution(
    old: RankLayout, new: RankLayout
) -> RedistributionPlan:
    """Plan the amplitude movement from one layout to another."""
    if (old.num_qubits, old.num_rank_bits) != (new.num_qubits, new.num_rank_bits):
        raise LayoutMismatchError(
            f"layouts disagree: {old.num_qubits} qubits/{old.num_rank_bits} "
            f"rank bits vs {new.num_qubits}/{new.num_rank_bits}"
        )
    n = old.num_qubits
    l = old.num_local_qubits
    src = layout_positions(old)
    dst = layout_positions(new)
    # destination position of each source position, in source order
    inv = np.empty_like(src)
    inv[src] = np.arange(1 << n, dtype=np.int64)
    dst_pos = dst[inv]

    s = np.arange(1 << n, dtype=np.int64)
    src_rank = s >> np.int64(l)
    dst_rank = dst_pos >> np.int64(l)
    mask = np.int64((1 << l) - 1)
    # a run breaks where the source rank changes, the destination rank
    # changes, or the destination offset stops being consecutive
    if len(s) > 1:
        brk = (
            (np.diff(src_rank) != 0)
            | (np.diff(dst_rank) != 0)
            | (np.diff(dst_pos) != 1)
        )
        starts = np.concatenate(([0], np.flatnonzero(brk) + 1))
    else:
        starts = np.array([0], dtype=np.int64)
    ends = np.concatenate((starts[1:], [len(s)]))
    return RedistributionPlan(
        old,
        new,
        src_rank=src_rank[starts],
        dst_rank=dst_rank[starts],
        src_offset=s[starts] & mask,
        dst_offset=dst_pos[starts] & mask,
        length=(ends - starts).astype(np.int64),
    )


# --- accounting -------------------------------------------------------------

@dataclass(frozen=True)
class SwitchStats:
    """Communication cost of one layout switch.

    The switch happens between executing parts ``from_part`` and
    ``to_part``. Bytes sent and received are equal in total because every
    remote amplitude leaves one rank and lands on another; resident bytes
    stay on their rank (at most a local move).
    """

    from_part: int
    to_part: int
    num_runs: int
    messages: int
    bytes_remote: int
    bytes_resident: int
    sent_bytes: dict[int, int]
    received_bytes: dict[int, int]

    @staticmethod
    def from_plan(to_part: int, plan: RedistributionPlan) -> "SwitchStats":
        return SwitchStats(
            from_part=to_part - 1,
            to_part=to_part,
            num_runs=plan.num_runs,
            messages=plan.messages,
            bytes_remote=plan.total_bytes,
            bytes_resident=BYTES_PER_AMPLITUDE * plan.resident_amplitudes,
            sent_bytes=plan.sent_bytes_by_rank(),
            received_bytes=plan.received_bytes_by_rank(),
        )


@dataclass
class CommStats:
    """Accumulated communication over a distributed run."""

    num_qubits: int
    num_rank_bits: int
    num_parts: int
    switches: list[SwitchStats] = field(default_factory=list)

    @property
    def num_switches(self) -> int:
        return len(self.switches)

    @property
    def total_bytes(self) -> int:
        return sum(s.bytes_remote for s in self.switches)

    @property
    def total_resident_bytes(self) -> int:
        return sum(s.bytes_resident for s in self.switches)

    @property
    def total_messages(self) -> int:
        return sum(s.messages for s in self.switches)

    def to_json(self) -> dict:
        return {
            "parts": self.num_parts,
            "num_qubits": self.num_qubits,
            "num_rank_bits": self.num_rank_bits,
            "num_ranks": 1 << self.num_rank_bits,
            "switches": [
                {
                    "from": s.from_part,
                    "to": s.to_part,
                    "bytes_remote": s.bytes_remote,
                    "bytes_resident": s.bytes_resident,
                    "messages": s.messages,
                    "runs": s.num_runs,
                    "sent_bytes": {str(r): b for r, b in s.sent_bytes.items()},
                    "received_bytes": {
                        str(r): b for r, b in s.received_bytes.items()
                    },
                }
                for s in self.switches
            ],
            "totals": {
                "bytes_remote": self.total_bytes,
                "bytes_resident": self.total_resident_bytes,
                "messages": self.total_messages,
                "switches": self.num_switches,
            },
        }


# --- state movement ---------------------------------------------------------

def distribute_state(state: StateVector, layout: RankLayout) -> np.ndarray:
    """Spread a full state over rank buffers, shape (num_ranks, 2**l)."""
    if state.num_qubits != layout.num_qubits:
        raise ValueError(
            f"state has {state.num_qubits} qubits, layout {layout.num_qubits}"
        )
    flat = np.empty_like(state.data)
    flat[layout_positions(layout)] = state.data
    return flat.reshape(layout.num_ranks, -1)


def assemble_state(buffers: np.ndarray, layout: RankLayout) -> StateVector:
    """Reassemble rank buffers into a full state vector in natural order."""
    expect = (layout.num_ranks, 1 << layout.num_local_qubits)
    if buffers.shape != expect:
        raise ValueError(f"buffers have shape {buffers.shape}, need {expect}")
    data = buffers.reshape(-1)[layout_positions(layout)]
    return StateVector(layout.num_qubits, np.ascontiguousarray(data))


# --- driver -----------------------------------------------------------------

@dataclass
class DistributedRun:
    """Result of an emulated distributed execution.

    Unpacks like ``(state, stats)``; ``layouts`` records the layout each
    part ran under.
    """

    state: StateVector
    stats: CommStats
    layouts: list[RankLayout]

    def __iter__(self):
        return iter((self.state, self.stats))


def _level1_parts(
    partition: PartitionResult | MultiLevelPartition,
) -> Sequence[Part]:
    if isinstance(partition, MultiLevelPartition):
        return partition.level1.parts
    return partition.parts


def _run_on_buffers(
    buffers: np.ndarray,
    circuit: Circuit,
    partition: PartitionResult | MultiLevelPartition,
    index: int,
    layout: RankLayout,
) -> None:
    """Execute level-1 part ``index`` on every rank buffer in place."""
    parts = _level1_parts(partition)
    part = parts[index]
    positions = {q: layout.offset_bit_of(q) for q in part.qubits}
    if not isinstance(partition, MultiLevelPartition):
        run_part(buffers, remap_part(circuit, part, position_of=positions))
        return
    sub = partition.sublevels[index]
    padded = partition.padded_qubits[index]
    if len(sub.parts) == 1 and padded[0] == part.qubits:
        run_part(buffers, remap_part(circuit, part, position_of=positions))
        return
    pmap = QubitSlotMap(tuple(sorted(positions[q] for q in part.qubits)))
    inner_pos = {q: pmap.slot_of(positions[q]) for q in part.qubits}
    gidx = part_block_indices(layout.num_local_qubits, pmap.qubits)
    block = np.ascontiguousarray(buffers[..., gidx])
    for j, sp in enumerate(sub.parts):
        exe = remap_part(
            circuit, sp, position_of=inner_pos, stage_qubits=padded[j]
        )
        run_part(block, exe)
    buffers[..., gidx] = block


def simulate_distributed(
    circuit: Circuit,
    partition: PartitionResult | MultiLevelPartition,
    num_rank_bits: int,
    *,
    initial: StateVector | None = None,
    max_qubits: int | None = None,
) -> DistributedRun:
    """Run a partitioned circuit on ``2**num_rank_bits`` emulated ranks.

    Each part executes under a layout that keeps its qubits local, chosen
    with ``choose_layout``; a part whose qubits are already local reuses
    the current layout and costs nothing. Layout switches are planned,
    applied, and charged to ``CommStats``. A two-level partition nests its
    level-2 parts inside each rank with no extra communication.
    """
    n = circuit.num_qubits
    if not 0 <= num_rank_bits <= n:
        raise ValueError(f"rank bits {num_rank_bits} outside 0..{n}")
    parts = _level1_parts(partition)
    if not parts:
        raise ValueError("partition has no parts")

    full = (
        initial.copy() if initial is not None else zero_state(n, max_qubits)
    )
    if full.num_qubits != n:
        raise ValueError(
            f"initial state has {full.num_qubits} qubits, circuit has {n}"
        )

    layout = choose_layout(n, num_rank_bits, parts[0])
    buffers = distribute_state(full, layout)
    stats = CommStats(n, num_rank_bits, len(parts))
    layouts: list[RankLayout] = []
    for i, part in enumerate(parts):
        if not all(layout.is_local(q) for q in part.qubits):
            new_layout = choose_layout(n, num_rank_bits, part)
            plan = plan_redistribution(layout, new_layout)
            buffers = plan.apply(buffers)
            stats.switches.append(SwitchStats.from_plan(i, plan))
            layout = new_layout
        layouts.append(layout)
        _run_on_buffers(buffers, circuit, partition, i, layout)
    return DistributedRun(assemble_state(buffers, layout), stats, layouts)
