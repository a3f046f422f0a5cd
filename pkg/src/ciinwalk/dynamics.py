"""Exact propagators and schedule execution.

States are plain complex ndarrays: length 4 in the walk basis (the marked
vertex is always coordinate 0) or length N = 2n over vertices.  Walk
propagators are evaluated in closed form through the known spectrum
(n, n-2, -2, 0), never by generic matrix exponentiation: the reduced walk is
a diagonal phase in the dual basis, and the full-space walk combines the four
spectral projectors with O(N) work.  Times are dimensionless (adjacency
spectral units); the integer spectrum makes every walk 2*pi-periodic.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionMismatchError
from .graphs import REDUCED_DIM, FullAdjacency, GraphSize, dual_basis


class StepKind(Enum):
    WALK = "WALK"
    ORACLE = "ORACLE"


@dataclass(frozen=True)
class ScheduleStep:
    """One schedule step: a walk for time t or an oracle phase shift theta.

    Walk times reduced mod 2*pi are dynamically equivalent; they are stored
    un-reduced so that total walk time accounts for what was actually spent.
    """

    kind: StepKind
    parameter: float


def walk_step(t: float) -> ScheduleStep:
    return ScheduleStep(StepKind.WALK, float(t))


def oracle_step(theta: float) -> ScheduleStep:
    return ScheduleStep(StepKind.ORACLE, float(theta))


class FinishingRule(Enum):
    """How a schedule claims the marked vertex after its unitary steps.

    NONE: stop coherently, no claim.
    MEASURE_AND_CHECK: measure, spend one extra oracle query to confirm the
        outcome x, and claim x or its opposite (x + n) mod N.
    COHERENT: the unitary steps already end on the marked vertex; the final
        measurement needs no confirmation query.
    """

    NONE = "none"
    MEASURE_AND_CHECK = "measure-and-check"
    COHERENT = "coherent"


@dataclass(frozen=True)
class Schedule:
    """Ordered phase-walk program plus a classical finishing rule.

    Steps are chronological: steps[0] is applied first.  `n`, `variant` and
    `p` are metadata used by the text serialization and the circuit compiler.
    """

    steps: tuple[ScheduleStep, ...]
    finishing_rule: FinishingRule = FinishingRule.NONE
    n: int | None = None
    variant: str | None = None
    p: int | None = None

    @property
    def oracle_queries(self) -> int:
        """Oracle steps, plus one confirmation query for measure-and-check."""
        count = sum(1 for s in self.steps if s.kind is StepKind.ORACLE)
        if self.finishing_rule is FinishingRule.MEASURE_AND_CHECK:
            count += 1
        return count

    @property
    def total_walk_time(self) -> float:
        return float(sum(abs(s.parameter) for s in self.steps if s.kind is StepKind.WALK))


@dataclass(frozen=True)
class TrajectorySample:
    step: int
    probabilities: tuple[float, float, float, float]
    queries_so_far: int
    walk_time_so_far: float


@dataclass(frozen=True)
class RunReport:
    """Trajectory samples and final accounting for one schedule run."""

    trajectory: tuple[TrajectorySample, ...]
    final_success_probability: float
    oracle_queries: int
    total_walk_time: float

    CSV_HEADER = ("step", "p1", "p2", "p3", "p4", "queries_so_far", "walk_time_so_far")

    def to_csv(self) -> str:
        """Render the trajectory as CSV.

        Columns: step, p1..p4, queries_so_far, walk_time_so_far.  p1..p4 are
        the probabilities of the four vertex groups (marked, opposite,
        same-side rest, far-side rest) or dual-basis populations when the run
        sampled in the dual basis.
        """
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.CSV_HEADER)
        for s in self.trajectory:
            writer.writerow(
                [s.step]
                + [format(p, ".17g") for p in s.probabilities]
                + [s.queries_so_far, format(s.walk_time_so_far, ".17g")]
            )
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {
            "trajectory": [
                {
                    "step": s.step,
                    "probabilities": list(s.probabilities),
                    "queries_so_far": s.queries_so_far,
                    "walk_time_so_far": s.walk_time_so_far,
                }
                for s in self.trajectory
            ],
            "final_success_probability": self.final_success_probability,
            "oracle_queries": self.oracle_queries,
            "total_walk_time": self.total_walk_time,
        }
        return json.dumps(payload, sort_keys=True, indent=2)


def _is_reduced(state: np.ndarray) -> bool:
    return state.shape == (REDUCED_DIM,)


def walk_reduced(state: np.ndarray, t: float, size: GraphSize) -> np.ndarray:
    """Apply exp(-i t A) to a reduced state via the dual basis."""
    state = np.asarray(state, dtype=complex)
    if not _is_reduced(state):
        raise DimensionMismatchError(f"expected a 4-vector, got shape {state.shape}")
    dual = dual_basis(size)
    coeffs = dual.to_dual(state) * np.exp(-1j * t * dual.eigenvalues)
    return dual.from_dual(coeffs)


def walk_full(state: np.ndarray, t: float, graph: FullAdjacency | GraphSize) -> np.ndarray:
    """Apply exp(-i t A_full) matrix-free through the four spectral projectors.

    The eigenspaces of the CIIN adjacency are: the all-ones vector (n), the
    side-antisymmetric uniform vector (n-2), side-antisymmetric zero-mean
    vectors (-2), and side-symmetric zero-mean vectors (0).  Splitting the
    state into symmetric/antisymmetric halves and their means applies all
    four projectors in O(N).
    """
    size = graph.size if isinstance(graph, FullAdjacency) else graph
    n = size.n
    state = np.asarray(state, dtype=complex)
    if state.shape != (size.N,):
        raise DimensionMismatchError(
            f"expected state of length {size.N}, got shape {state.shape}"
        )
    sym = (state[:n] + state[n:]) / 2.0
    asym = (state[:n] - state[n:]) / 2.0
    mean_sym = sym.mean()
    mean_asym = asym.mean()
    out_sym = np.exp(-1j * t * n) * mean_sym + (sym - mean_sym)
    out_asym = np.exp(-1j * t * (n - 2)) * mean_asym + np.exp(2j * t) * (asym - mean_asym)
    return np.concatenate([out_sym + out_asym, out_sym - out_asym])


def oracle_phase(state: np.ndarray, theta: float, marked: int = 0) -> np.ndarray:
    """Multiply the marked-vertex amplitude by exp(-i theta).

    For reduced states the marked vertex is coordinate 0 by construction and
    `marked` is ignored.
    """
    state = np.asarray(state, dtype=complex)
    out = state.copy()
    index = 0 if _is_reduced(state) else marked
    if not 0 <= index < state.shape[0]:
        raise IndexError(f"marked vertex {marked} out of range for N={state.shape[0]}")
    out[index] *= np.exp(-1j * theta)
    return out


def uniform_state(size: GraphSize, reduced: bool = True) -> np.ndarray:
    """The equal superposition, in reduced or full coordinates."""
    if reduced:
        return dual_basis(size).matrix[:, 0].astype(complex)
    return np.full(size.N, 1.0 / np.sqrt(size.N), dtype=complex)


def marked_state(size: GraphSize, reduced: bool = True, marked: int = 0) -> np.ndarray:
    if reduced:
        state = np.zeros(REDUCED_DIM, dtype=complex)
        state[0] = 1.0
    else:
        state = np.zeros(size.N, dtype=complex)
        state[marked] = 1.0
    return state


def success_probability(state: np.ndarray, marked: int = 0) -> float:
    """Probability of measuring the marked vertex."""
    state = np.asarray(state)
    index = 0 if _is_reduced(state) else marked
    return float(abs(state[index]) ** 2)


def entangled_fidelity(state: np.ndarray, marked: int = 0) -> float:
    """Squared overlap with (|marked> + |opposite>) / sqrt(2)."""
    state = np.asarray(state)
    if _is_reduced(state):
        a, b = state[0], state[1]
    else:
        n = state.shape[0] // 2
        a, b = state[marked], state[(marked + n) % state.shape[0]]
    return float(abs((a + b) / np.sqrt(2.0)) ** 2)


def group_probabilities(state: np.ndarray, size: GraphSize, marked: int = 0) -> np.ndarray:
    """Probability mass of the four vertex groups relative to the marked vertex."""
    state = np.asarray(state)
    if _is_reduced(state):
        return np.abs(state) ** 2
    n = size.n
    opposite = size.opposite(marked)
    prob = np.abs(state) ** 2
    side = marked // n
    same = prob[side * n:(side + 1) * n].sum() - prob[marked]
    far = prob[(1 - side) * n:(2 - side) * n].sum() - prob[opposite]
    return np.array([prob[marked], prob[opposite], same, far])


def _sample_probs(state, size, marked, sample_basis):
    if sample_basis == "walk":
        return group_probabilities(state, size, marked)
    if sample_basis == "dual":
        if not _is_reduced(state):
            raise ValueError("dual-basis sampling is only defined for reduced states")
        return np.abs(dual_basis(size).to_dual(state)) ** 2
    raise ValueError(f"unknown sample basis {sample_basis!r}")


def apply_schedule(
    state: np.ndarray,
    schedule: Schedule,
    size: GraphSize,
    sample_every: int = 1,
    marked: int = 0,
    sample_basis: str = "walk",
) -> RunReport:
    """Run a schedule chronologically and record a trajectory.

    The trajectory is sampled before the first step, after every
    `sample_every` steps, and after the last step.  For measure-and-check
    schedules the final success probability is the chance the classical
    procedure outputs the marked vertex (mass on the marked vertex plus its
    opposite); otherwise it is the marked-vertex probability itself.
    """
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")
    state = np.asarray(state, dtype=complex)
    if not _is_reduced(state) and state.shape != (size.N,):
        raise DimensionMismatchError(
            f"state length {state.shape} matches neither 4 nor N={size.N}"
        )
    samples = []
    queries = 0
    walk_time = 0.0

    def record(step_index):
        probs = _sample_probs(state, size, marked, sample_basis)
        samples.append(
            TrajectorySample(step_index, tuple(float(p) for p in probs), queries, walk_time)
        )

    record(0)
    for index, step in enumerate(schedule.steps, start=1):
        if step.kind is StepKind.WALK:
            if _is_reduced(state):
                state = walk_reduced(state, step.parameter, size)
            else:
                state = walk_full(state, step.parameter, size)
            walk_time += abs(step.parameter)
        else:
            state = oracle_phase(state, step.parameter, marked)
            queries += 1
        if index % sample_every == 0 or index == len(schedule.steps):
            record(index)

    p_marked = success_probability(state, marked)
    if schedule.finishing_rule is FinishingRule.MEASURE_AND_CHECK:
        queries += 1
        opposite_mass = float(group_probabilities(state, size, marked)[1])
        final = p_marked + opposite_mass
    else:
        final = p_marked
    return RunReport(
        trajectory=tuple(samples),
        final_success_probability=final,
        oracle_queries=queries,
        total_walk_time=walk_time,
    )


def measure_and_check(
    state: np.ndarray,
    size: GraphSize,
    marked: int,
    rng: np.random.Generator,
) -> tuple[int, bool]:
    """Classical finish: measure, confirm with one oracle query, claim a vertex.

    Measures the final distribution, queries the oracle on the outcome x, and
    returns x if marked, else (x + n) mod N.  The boolean reports whether the
    claimed vertex is in fact the marked one.
    """
    state = np.asarray(state)
    if _is_reduced(state):
        groups = np.abs(state) ** 2
        groups = groups / groups.sum()
        group = rng.choice(4, p=groups)
        n, big_n = size.n, size.N
        opposite = size.opposite(marked)
        side = marked // n
        if group == 0:
            outcome = marked
        elif group == 1:
            outcome = opposite
        elif group == 2:
            candidates = [v for v in range(side * n, (side + 1) * n) if v != marked]
            outcome = int(rng.choice(candidates))
        else:
            candidates = [v for v in range((1 - side) * n, (2 - side) * n) if v != opposite]
            outcome = int(rng.choice(candidates))
    else:
        prob = np.abs(state) ** 2
        outcome = int(rng.choice(state.shape[0], p=prob / prob.sum()))
    if outcome == marked:
        claimed = outcome
    else:
        claimed = size.opposite(outcome)
    return claimed, claimed == marked
