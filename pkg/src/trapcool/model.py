"""Core problem types for harmonic-trap expansion control.

Everything is expressed in rescaled units: ħ = m = 1, the initial trap
frequency ω₀ = 1, and time measured in units of 1/ω₀.  The state of the
scaling dynamics is

    x₁ = b        (dimensionless wavefunction width, x₁ > 0)
    x₂ = ḃ/ω₀    (dimensionless expansion velocity)

driven by the squared-frequency control u(t) = ω²(t)/ω₀² through

    ẋ₁ = x₂,     ẋ₂ = −u·x₁ + 1/x₁³.

The transfer of interest moves (1, 0) to (γ, 0) with γ = √(ω₀/ω_T) > 1,
accumulating the running cost J = ½∫(x₂² + 1/x₁²) dt.  The time-averaged
transient energy in units of (n + ½)ħω₀ is Ē = 2J/T.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

X1_MIN = 1e-6  # below this the repulsive 1/x₁³ core is considered escaped


class DomainError(ValueError):
    """State left the region where the model is valid (x₁ must stay > 0)."""


class BoundMode(enum.Enum):
    UNBOUNDED = "unbounded"
    SYMMETRIC_UNIT = "symmetric_unit"  # |u| <= 1


@dataclass(frozen=True)
class CoolingProblem:
    """Expansion task: ratio γ, optional fixed horizon, control-bound mode."""

    gamma: float
    horizon: float | None = None
    bound_mode: BoundMode = BoundMode.UNBOUNDED

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if self.horizon is not None and not self.horizon > 0.0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")


@dataclass(frozen=True)
class State:
    """Phase-plane point (x₁, x₂) of the scaling dynamics."""

    x1: float
    x2: float

    def __post_init__(self):
        if not self.x1 > 0.0:
            raise DomainError(f"x1 must be positive, got {self.x1}")


@dataclass(frozen=True)
class AdjointState:
    """Multiplier triple (λ₀, λ₁, λ₂); λ₀ ≤ 0 constant, nontrivial overall."""

    lambda0: float
    lambda1: float
    lambda2: float

    def __post_init__(self):
        if self.lambda0 > 0.0:
            raise ValueError("lambda0 must be nonpositive")
        if self.lambda0 == 0.0 and self.lambda1 == 0.0 and self.lambda2 == 0.0:
            raise ValueError("multipliers must not vanish simultaneously")


@dataclass(frozen=True)
class Impulse:
    """Dirac impulse in u with signed weight w = ∫u dt across the spike.

    Integrating ẋ₂ = −u·x₁ + 1/x₁³ across the spike jumps x₂ by −w·x₁
    while x₁ is unchanged.
    """

    weight: float

    @property
    def duration(self) -> float:
        return 0.0


@dataclass(frozen=True)
class Bang:
    """Constant control pinned at a bound, u ∈ {−1, +1}."""

    u: float
    duration: float

    def __post_init__(self):
        if self.u not in (-1.0, 1.0):
            raise ValueError(f"bang control must be -1 or +1, got {self.u}")
        if self.duration < 0.0:
            raise ValueError("duration must be nonnegative")


@dataclass(frozen=True)
class Singular:
    """Singular segment: state feedback u = 2/x₁⁴ for the given duration."""

    duration: float

    def __post_init__(self):
        if self.duration < 0.0:
            raise ValueError("duration must be nonnegative")


ControlSegment = Union[Impulse, Bang, Singular]


def singular_control(x1: float) -> float:
    """Feedback control u_s = 2/x₁⁴ that keeps the state on a singular arc."""
    if x1 <= 0.0:
        raise DomainError(f"x1 must be positive, got {x1}")
    return 2.0 / x1**4


@dataclass(frozen=True)
class Protocol:
    """Ordered control segments applied to the initial state (1, 0)."""

    segments: tuple[ControlSegment, ...]

    def __init__(self, segments: Iterable[ControlSegment]):
        object.__setattr__(self, "segments", tuple(segments))

    def total_duration(self) -> float:
        return sum(seg.duration for seg in self.segments)

    def matches_horizon(self, horizon: float, tol: float = 1e-12) -> bool:
        return abs(self.total_duration() - horizon) <= tol * max(1.0, abs(horizon))


@dataclass(eq=False)
class Trajectory:
    """Time-stamped simulation output with running cost and phase integral.

    Sample times are strictly increasing; at an impulse time the recorded
    state is the post-jump value.  ``phase`` is the accumulated
    ∫ dt/x₁² needed by the expanding-mode wavefunction.
    """

    t: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    u: np.ndarray
    running_j: np.ndarray
    phase: np.ndarray
    cost_j: float

    def __post_init__(self):
        if self.cost_j < -0.0:
            raise ValueError("cost must be nonnegative")
        if np.any(np.diff(self.t) <= 0.0):
            raise ValueError("sample times must be strictly increasing")

    @property
    def duration(self) -> float:
        return float(self.t[-1] - self.t[0]) if len(self.t) else 0.0

    @property
    def average_energy(self) -> float:
        """Ē = 2J/T in units of (n + ½)ħω₀; nan for a zero-length run."""
        T = self.duration
        return 2.0 * self.cost_j / T if T > 0.0 else math.nan

    @property
    def samples(self) -> list[tuple[float, State]]:
        return [
            (float(ti), State(float(a), float(b)))
            for ti, a, b in zip(self.t, self.x1, self.x2)
        ]

    def final_state(self) -> State:
        return State(float(self.x1[-1]), float(self.x2[-1]))

    def write_csv(self, fileobj) -> None:
        """Columns t, x1, x2, u, running_J; shortest round-trip float format."""
        fileobj.write("t,x1,x2,u,running_J\n")
        for ti, a, b, ui, ji in zip(self.t, self.x1, self.x2, self.u, self.running_j):
            fileobj.write(
                f"{float(ti)!r},{float(a)!r},{float(b)!r},{float(ui)!r},{float(ji)!r}\n"
            )


def state_derivative(s: State, u: float) -> tuple[float, float]:
    """Right-hand side (ẋ₁, ẋ₂) = (x₂, −u·x₁ + 1/x₁³)."""
    if s.x1 <= 0.0:
        raise DomainError(f"x1 must be positive, got {s.x1}")
    return s.x2, -u * s.x1 + 1.0 / s.x1**3


def apply_impulse(s: State, weight: float) -> State:
    """Jump x₂ → x₂ − w·x₁ across a Dirac impulse of weight w; x₁ unchanged."""
    return State(s.x1, s.x2 - weight * s.x1)


def mode_energy(ebar: float, n: int, omega0: float = 1.0) -> float:
    """Convert Ē (units of (n+½)ħω₀) to the level-n energy (ħ = 1)."""
    return ebar * (n + 0.5) * omega0


def to_physical_time(t_rescaled: float, omega0: float) -> float:
    """Undo the time rescaling t_new = ω₀ t_old."""
    return t_rescaled / omega0


# ---------------------------------------------------------------------------
# JSON document: {gamma, horizon, bound_mode, segments[]}
# ---------------------------------------------------------------------------

_BOUND_NAMES = {m.value: m for m in BoundMode}


def _segment_to_dict(seg: ControlSegment) -> dict:
    if isinstance(seg, Impulse):
        return {"type": "impulse", "weight": seg.weight}
    if isinstance(seg, Bang):
        return {"type": "bang", "u": seg.u, "duration": seg.duration}
    if isinstance(seg, Singular):
        return {"type": "singular", "duration": seg.duration}
    raise TypeError(f"unknown segment {seg!r}")


def _segment_from_dict(d: dict) -> ControlSegment:
    kind = d.get("type")
    if kind == "impulse":
        return Impulse(weight=float(d["weight"]))
    if kind == "bang":
        return Bang(u=float(d["u"]), duration=float(d["duration"]))
    if kind == "singular":
        return Singular(duration=float(d["duration"]))
    raise ValueError(f"unknown segment type {kind!r}")


def to_document(problem: CoolingProblem, protocol: Protocol) -> dict:
    return {
        "gamma": problem.gamma,
        "horizon": problem.horizon,
        "bound_mode": problem.bound_mode.value,
        "segments": [_segment_to_dict(seg) for seg in protocol.segments],
    }


def from_document(doc: dict) -> tuple[CoolingProblem, Protocol]:
    try:
        problem = CoolingProblem(
            gamma=float(doc["gamma"]),
            horizon=None if doc.get("horizon") is None else float(doc["horizon"]),
            bound_mode=_BOUND_NAMES[doc.get("bound_mode", "unbounded")],
        )
        protocol = Protocol(_segment_from_dict(d) for d in doc["segments"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed problem document: {exc}") from exc
    return problem, protocol


def dumps(problem: CoolingProblem, protocol: Protocol) -> str:
    return json.dumps(to_document(problem, protocol), indent=2, sort_keys=True) + "\n"


def loads(text: str) -> tuple[CoolingProblem, Protocol]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValueError("problem document must be a JSON object")
    return from_document(doc)
