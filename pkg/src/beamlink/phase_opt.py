"""Quantized phase-alignment solvers for the blockwise beamformer.

Two problems are solved over finite phase grids. The per-element problem
assigns every channel element its own angle from the fine grid
``{2 pi b / 2**q}`` and is solved to global optimality; it serves as the
reference any heuristic must stay below. The blockwise problem restricts
the angles to the two coarser grids tied to the rotation blocks and is
solved with a greedy pass that fills the two slot sets one antenna at a
time. Both maximize the aligned-sum magnitude

    | sum_v conj(h_v) * exp(j phi(v)) |
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

METHOD_EXHAUSTIVE = "exhaustive"
METHOD_GREEDY = "greedy"
METHOD_FIXED_ZERO = "fixed-zero"
METHOD_RANDOM = "random"

MAX_ORACLE_ELEMENTS = 16
_BRUTE_FORCE_MAX_Q = 2


@dataclass(frozen=True, eq=False)
class PhaseGrid:
    """Angles ``2 pi b / denominator`` for the stored integer indices ``b``."""

    denominator: int
    indices: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "indices", np.asarray(self.indices, dtype=np.int64))

    @property
    def angles(self) -> np.ndarray:
        """Grid angles reduced modulo 2 pi."""
        return (2.0 * np.pi * self.indices / self.denominator) % (2.0 * np.pi)

    @property
    def size(self) -> int:
        return self.indices.size


def element_grid(q: int) -> PhaseGrid:
    """Per-element grid: denominator ``2**q``, indices ``0 .. 2**q - 1``."""
    if q < 1:
        raise ValueError("q must be at least 1")
    n = 2**q
    return PhaseGrid(denominator=n, indices=np.arange(n))


def block_grids(q: int) -> tuple[PhaseGrid, PhaseGrid]:
    """Blockwise grids with denominator ``2**(q-1)``.

    The first block uses indices ``0 .. 2**(q-1) - 1``, the second
    ``2**(q-1) .. 2**q - 1``; the second set's angles exceed 2 pi and are
    stored reduced (for q = 2 both reduce to {0, pi}).
    """
    if q < 1:
        raise ValueError("q must be at least 1")
    half = 2 ** (q - 1)
    return (
        PhaseGrid(denominator=half, indices=np.arange(half)),
        PhaseGrid(denominator=half, indices=np.arange(half, 2 * half)),
    )


@dataclass(frozen=True, eq=False)
class PhaseSelection:
    """A solved phase assignment.

    ``slots1``/``slots2`` hold the channel-element index assigned to each
    slot of the two blocks, and ``phi1``/``phi2`` the angle chosen for
    that slot, so slot k of the beamformer columns rotates by
    ``phi1[k]`` (top block) and ``phi2[k]`` (bottom block). ``gain`` is
    the achieved aligned-sum magnitude; it is always recomputable from
    the stored assignment via :func:`alignment_gain`.
    """

    phi1: np.ndarray
    phi2: np.ndarray
    slots1: np.ndarray
    slots2: np.ndarray
    gain: float
    method: str

    def per_element_phases(self) -> np.ndarray:
        """Total phase applied to each channel element."""
        n = self.slots1.size + self.slots2.size
        out = np.zeros(n, dtype=np.float64)
        out[self.slots1] = self.phi1
        out[self.slots2] = self.phi2
        return out

    def to_dict(self, seed: int | None = None) -> dict:
        data = {
            "method": self.method,
            "gain": self.gain,
            "phi1": self.phi1.tolist(),
            "phi2": self.phi2.tolist(),
            "slots1": self.slots1.tolist(),
            "slots2": self.slots2.tolist(),
        }
        if seed is not None:
            data["seed"] = int(seed)
        return data

    def to_json(self, path: str | Path, seed: int | None = None) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(seed=seed), indent=2, sort_keys=True) + "\n"
        )


def selection_from_dict(data: dict) -> PhaseSelection:
    return PhaseSelection(
        phi1=np.asarray(data["phi1"], dtype=np.float64),
        phi2=np.asarray(data["phi2"], dtype=np.float64),
        slots1=np.asarray(data["slots1"], dtype=np.int64),
        slots2=np.asarray(data["slots2"], dtype=np.int64),
        gain=float(data["gain"]),
        method=str(data["method"]),
    )


def alignment_gain(h: np.ndarray, selection: PhaseSelection) -> float:
    """Re-evaluate ``|sum conj(h_v) exp(j phi(v))|`` for a stored selection."""
    phases = selection.per_element_phases()
    return float(np.abs(np.sum(np.conj(h) * np.exp(1j * phases))))


def _selection_from_element_phases(
    h: np.ndarray, phases: np.ndarray, method: str
) -> PhaseSelection:
    # Identity slotting: element k sits in slot k of its half.
    n = phases.size
    half = n // 2
    slots1 = np.arange(half)
    slots2 = np.arange(half, n)
    gain = float(np.abs(np.sum(np.conj(h) * np.exp(1j * phases))))
    return PhaseSelection(
        phi1=phases[:half].copy(),
        phi2=phases[half:].copy(),
        slots1=slots1,
        slots2=slots2,
        gain=gain,
        method=method,
    )


def _brute_force_phases(h: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Joint enumeration over every grid assignment (small n only)."""
    n = h.size
    combos = np.array(
        list(itertools.product(range(angles.size), repeat=n)), dtype=np.int64
    )
    gains = np.abs(np.exp(1j * angles[combos]) @ np.conj(h))
    return angles[combos[int(np.argmax(gains))]]


def _rotation_sweep_phases(h: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Exact grid optimum via a sweep over the common rotation angle.

    For any reference direction psi each element's best grid angle is the
    one closest to ``psi - arg(conj(h_v))``; the best assignment changes
    only at finitely many psi values, so scanning one candidate psi per
    breakpoint interval and keeping the best aligned-sum magnitude yields
    the global optimum without joint enumeration.
    """
    hc = np.conj(h)
    base = np.angle(hc)
    step = 2.0 * np.pi / angles.size
    breakpoints = np.sort(
        ((base[:, None] + angles[None, :] + step / 2.0) % (2.0 * np.pi)).ravel()
    )
    gaps = np.diff(np.concatenate([breakpoints, [breakpoints[0] + 2.0 * np.pi]]))
    candidates = (breakpoints + gaps / 2.0) % (2.0 * np.pi)
    best_gain = -1.0
    best_phases: np.ndarray | None = None
    for psi in candidates:
        idx = np.round(((psi - base) % (2.0 * np.pi)) / step).astype(np.int64) % angles.size
        phases = angles[idx]
        gain = float(np.abs(np.sum(hc * np.exp(1j * phases))))
        if gain > best_gain + 1e-15:
            best_gain = gain
            best_phases = phases
    assert best_phases is not None
    return best_phases


def exhaustive_phase_oracle(h: np.ndarray, q: int) -> PhaseSelection:
    """Globally optimal per-element assignment over the fine grid.

    For q <= 2 every one of the ``(2**q)**(2**q)`` assignments is
    enumerated; for larger arrays (up to 16 elements) the rotation sweep
    computes the same optimum. The result upper-bounds any blockwise
    selection because the blockwise grids are subsets of this one.
    """
    h = np.asarray(h, dtype=np.complex128)
    n = 2**q
    if h.shape != (n,):
        raise ValueError(f"h must have length 2**q = {n}")
    if n > MAX_ORACLE_ELEMENTS:
        raise ValueError(f"oracle limited to {MAX_ORACLE_ELEMENTS} elements")
    angles = element_grid(q).angles
    if q <= _BRUTE_FORCE_MAX_Q:
        phases = _brute_force_phases(h, angles)
    else:
        phases = _rotation_sweep_phases(h, angles)
    return _selection_from_element_phases(h, phases, METHOD_EXHAUSTIVE)


def _greedy(h: np.ndarray, q: int) -> tuple[PhaseSelection, int]:
    """Greedy blockwise selection; returns the selection and the number
    of candidate objective evaluations performed."""
    n = 2**q
    half = n // 2
    grid1, grid2 = block_grids(q)
    hc = np.conj(h)
    remaining = list(range(n))
    acc = 0.0 + 0.0j
    evals = 0
    slots: list[list[int]] = [[], []]
    phis: list[list[float]] = [[], []]
    for block, grid in enumerate((grid1, grid2)):
        angles = grid.angles
        rotations = np.exp(1j * angles)
        for _ in range(half):
            best_score = -1.0
            best_pos = 0
            best_angle_idx = 0
            # candidate order (ascending element, then ascending grid
            # index) fixes tie-breaking
            for pos, elem in enumerate(remaining):
                scores = np.abs(acc + hc[elem] * rotations)
                evals += angles.size
                for bi in range(angles.size):
                    if scores[bi] > best_score:
                        best_score = float(scores[bi])
                        best_pos = pos
                        best_angle_idx = bi
            elem = remaining.pop(best_pos)
            slots[block].append(elem)
            phis[block].append(float(angles[best_angle_idx]))
            acc = acc + hc[elem] * rotations[best_angle_idx]
    selection = PhaseSelection(
        phi1=np.array(phis[0]),
        phi2=np.array(phis[1]),
        slots1=np.array(slots[0], dtype=np.int64),
        slots2=np.array(slots[1], dtype=np.int64),
        gain=float(np.abs(acc)),
        method=METHOD_GREEDY,
    )
    return selection, evals


def greedy_bpr_phases(h: np.ndarray, q: int) -> PhaseSelection:
    """Greedy blockwise phase selection.

    Starting from the full candidate set, each slot of the first block
    picks the (element, grid-1 angle) pair that most increases the
    aligned-sum magnitude; the second loop fills the remaining elements
    into the second block with grid-2 angles. During the first loop the
    companion block-2 rotation of a candidate is held at zero and is
    re-optimized when the element is not yet placed by loop two. Ties
    break toward the lowest element index, then the lowest grid index.
    """
    h = np.asarray(h, dtype=np.complex128)
    n = 2**q
    if h.shape != (n,):
        raise ValueError(f"h must have length 2**q = {n}")
    selection, _ = _greedy(h, q)
    return selection


def fixed_zero_selection(h: np.ndarray, q: int) -> PhaseSelection:
    """All-zero rotation baseline (identity blocks)."""
    h = np.asarray(h, dtype=np.complex128)
    return _selection_from_element_phases(
        h, np.zeros(2**q, dtype=np.float64), METHOD_FIXED_ZERO
    )


def random_selection(
    h: np.ndarray, q: int, rng: np.random.Generator
) -> PhaseSelection:
    """Uniformly random feasible blockwise assignment (baseline)."""
    h = np.asarray(h, dtype=np.complex128)
    n = 2**q
    half = n // 2
    grid1, grid2 = block_grids(q)
    perm = rng.permutation(n)
    slots1, slots2 = perm[:half], perm[half:]
    phi1 = grid1.angles[rng.integers(0, grid1.size, half)]
    phi2 = grid2.angles[rng.integers(0, grid2.size, half)]
    phases = np.zeros(n, dtype=np.float64)
    phases[slots1] = phi1
    phases[slots2] = phi2
    gain = float(np.abs(np.sum(np.conj(h) * np.exp(1j * phases))))
    return PhaseSelection(
        phi1=phi1,
        phi2=phi2,
        slots1=np.asarray(slots1, dtype=np.int64),
        slots2=np.asarray(slots2, dtype=np.int64),
        gain=gain,
        method=METHOD_RANDOM,
    )


def complexity_probe(q_values: list[int] | tuple[int, ...]) -> list[tuple[int, int]]:
    """Count greedy candidate evaluations for each q.

    The count is input independent: each of the ``2**q`` slot decisions
    scans the remaining candidates against the full slot grid, giving
    ``2**(q-1) * 2**q * (2**q + 1) / 2`` evaluations in total.
    """
    out: list[tuple[int, int]] = []
    for q in q_values:
        if q > 8:
            raise ValueError("complexity probe limited to q <= 8")
        h = np.exp(1j * np.linspace(0.0, 1.0, 2**q))
        _, evals = _greedy(h, q)
        out.append((int(q), int(evals)))
    return out
