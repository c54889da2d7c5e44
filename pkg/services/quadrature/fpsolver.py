"""
Fixed-point sweep over the zeros of an oscillating ODE solution

For Y'' + Ω(z) Y = 0 with Ω > 0 the map

    T_j(z) = z - arctan_j(√Ω(z) Y(z)/Y'(z)) / √Ω(z)

converges with order four to the zero next to z in the direction of decreasing
Ω. Between iterates the solution is carried by Taylor series of the ODE in
its natural (polynomial-coefficient) variable.
"""
from abc import ABC, abstractmethod
from typing import Any, Callable, List, Optional, Tuple
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math
import logging

import numpy as np

from .errors import NaNInput, NonOscillatory, StalledIteration, StepTooLarge

logger = logging.getLogger(__name__)

EPS = np.finfo(float).eps
MAX_ITERATIONS = 50
TAYLOR_DEGREE = 30
# last two Taylor terms relative to the largest one
_TAYLOR_TOLERANCE = 1e-16
_MAX_HALVINGS = 40
_RESCALE = 1e150
# √Ω|Y/Y'| at an accepted zero, relative to max(1, √Ω|z|)
_RESIDUAL_TOLERANCE = 4.0 * EPS
_CROSSING_TOLERANCE = 1e-6
_SPACING_TOLERANCE = 1e-8

StopPredicate = Callable[[int, float, Any], bool]


class TaylorOde(ABC):
    """Linear second-order ODE with polynomial coefficients, expanded about any point"""

    @abstractmethod
    def coefficients(self, point: float, value: float, derivative: float, degree: int) -> np.ndarray:
        """Taylor coefficients c_0..c_degree of the solution, in the natural variable, at point"""
        raise NotImplementedError("Subclasses must implement coefficients method")

    def step(self, point: float, target: float) -> float:
        """Natural-variable increment between two points of the sweep coordinate"""
        return target - point

    def max_step(self, point: float) -> float:
        """Largest admissible |target - point| from point"""
        return math.inf


class OscillatorProblem(ABC):
    """
    Normal-form ODE Y'' + Ω(z) Y = 0 together with a way to carry a solution

    Subclasses set sweep_start, sweep_direction, turning_points (lower, upper
    ends of the oscillatory region) and start_state, the natural state at
    sweep_start. start_at_zero marks a sweep_start that is itself a zero.
    """
    sweep_start: float = 0.0
    start_at_zero: bool = False
    sweep_direction: int = 1
    turning_points: Tuple[float, float] = (-math.inf, math.inf)
    start_state: Any = None

    @abstractmethod
    def omega(self, z: float) -> float:
        raise NotImplementedError("Subclasses must implement omega method")

    def omega_monotonic_direction(self, z: float) -> int:
        """Sign of Ω' at z; the sweep runs against it"""
        return -self.sweep_direction

    @abstractmethod
    def evaluate(self, z_from: float, state: Any, z_to: float) -> Any:
        """Carry the natural state from z_from to z_to"""
        raise NotImplementedError("Subclasses must implement evaluate method")

    @abstractmethod
    def normal_form(self, z: float, state: Any) -> Tuple[float, float]:
        """(Y, Y') at z up to a common positive factor"""
        raise NotImplementedError("Subclasses must implement normal_form method")


class TaylorProblem(OscillatorProblem):
    """
    Problem whose natural state (value, derivative, log scale) is carried by a TaylorOde

    Value and derivative are renormalized whenever they drift far from 1; the
    removed factor accumulates in the log scale.
    """
    ode: TaylorOde

    def evaluate(self, z_from: float, state: Any, z_to: float) -> Any:
        value, derivative, log_scale = state
        value, derivative = continue_solution(self.ode, z_from, value, derivative, z_to)
        size = max(abs(value), abs(derivative))
        if size > _RESCALE or 0.0 < size < 1.0 / _RESCALE:
            value, derivative, log_scale = value / size, derivative / size, log_scale + math.log(size)
        return value, derivative, log_scale


@dataclass
class SweepResult:
    """Zeros in sweep order with the normal-form derivative and natural state at each"""
    zeros: List[float] = field(default_factory=list)
    derivatives: List[float] = field(default_factory=list)
    iterations_per_zero: List[int] = field(default_factory=list)
    states: List[Any] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.zeros)


def arctan_branch(zeta: float, j: int) -> float:
    """
    arctan with the branch fixed by j

    Returns arctan ζ when jζ > 0, arctan ζ + jπ when jζ <= 0 and jπ/2 for
    infinite ζ; the range is (0, π] for j = +1 and [-π, 0) for j = -1.
    """
    if math.isnan(zeta):
        raise NaNInput("arctan_branch received NaN")
    if math.isinf(zeta):
        return j * math.pi / 2.0
    base = math.atan(zeta)
    if j * zeta > 0:
        return base
    return base + j * math.pi


def fixed_point_step(problem: OscillatorProblem, z: float, j: int, Y: float, Ydot: float) -> float:
    """
    One application of T_j

    Args:
        problem: Normal-form problem providing Ω
        z: Current iterate
        j: Direction of travel (+1 toward larger z)
        Y, Ydot: Solution and derivative at z (any common factor)

    Returns:
        The next iterate
    """
    omega = problem.omega(z)
    if not omega > 0:
        raise NonOscillatory(f"Omega({z}) = {omega} is not positive")
    root = math.sqrt(omega)
    if Ydot == 0.0:
        zeta = math.copysign(math.inf, Y) if Y != 0.0 else 0.0
    else:
        zeta = root * Y / Ydot
    return z - arctan_branch(zeta, -j) / root


def _converged(z_old: float, z_new: float, root: float) -> bool:
    if z_new == z_old:
        return True
    scale = max(abs(z_new), 1e-3 * math.pi / root)
    return abs(z_new - z_old) <= 4.0 * EPS * scale


def _beyond(z: float, boundary: float, j: int) -> bool:
    return (z - boundary) * j >= 0


def _zeta(Y: float, Ydot: float, root: float) -> float:
    """√Ω Y/Y', which is √Ω times the signed distance to a nearby zero"""
    if Ydot == 0.0:
        if Y == 0.0:
            raise NonOscillatory("solution and derivative vanish together")
        return math.copysign(math.inf, Y)
    return root * Y / Ydot


def _zeta_scale(z: float, root: float) -> float:
    return max(1.0, root * abs(z))


def _check_spacing(problem: OscillatorProblem, result: SweepResult, origin: float,
                   from_zero: bool, zero: float):
    """
    Sturm bounds for the distance from origin to the zero found next

    With Ω decreasing along the sweep that distance is at most π/√Ω(zero),
    and at least π/√Ω(origin) when origin is itself a zero.
    """
    gap = abs(zero - origin)
    if gap * math.sqrt(problem.omega(zero)) > math.pi * (1.0 + _SPACING_TOLERANCE):
        raise StalledIteration(
            f"zero {len(result) + 1} at z={zero} lies more than half a period past z={origin}"
        )
    if from_zero and gap * math.sqrt(problem.omega(origin)) < math.pi * (1.0 - _SPACING_TOLERANCE):
        raise StalledIteration(f"zero {len(result) + 1} at z={zero} is closer to z={origin} than half a period")


def sweep_zeros(problem: OscillatorProblem, max_zeros: int,
                stop_predicate: Optional[StopPredicate] = None) -> SweepResult:
    """
    Consecutive zeros from problem.sweep_start in problem.sweep_direction

    Stops after max_zeros zeros, when an iterate leaves the oscillatory region,
    or when stop_predicate(index, zero, state) returns True for the zero just
    found (that zero is kept).

    A zero is accepted once √Ω|Y/Y'| is at rounding level, once two iterates
    agree, or once an iterate lands past it; in the last case whichever of the
    two bracketing iterates has the smaller residual is kept. Each zero must
    satisfy the Sturm spacing bounds against its predecessor.

    Raises:
        StalledIteration when an iteration does not settle or a zero was stepped over
    """
    result = SweepResult()
    j = problem.sweep_direction
    boundary = problem.turning_points[1] if j > 0 else problem.turning_points[0]
    z, state = problem.sweep_start, problem.start_state
    from_zero = problem.start_at_zero

    while len(result) < max_zeros:
        origin = z
        Y, Ydot = problem.normal_form(z, state)
        if from_zero:
            # from a zero T_j advances by π/√Ω, short of the next zero
            Y = 0.0
        previous = None
        iterations = 0
        while True:
            iterations += 1
            if iterations > MAX_ITERATIONS:
                raise StalledIteration(
                    f"no convergence after {MAX_ITERATIONS} iterations near z={z} (zero {len(result) + 1})"
                )
            z_new = fixed_point_step(problem, z, j, Y, Ydot)
            if _beyond(z_new, boundary, j) or not problem.omega(z_new) > 0:
                logger.debug(f"Sweep left the oscillatory region after {len(result)} zeros")
                return result
            state_new = problem.evaluate(z, state, z_new)
            Y_new, Ydot_new = problem.normal_form(z_new, state_new)
            root = math.sqrt(problem.omega(z_new))
            zeta = _zeta(Y_new, Ydot_new, root)

            if j * zeta > 0:
                # z_new is past the zero, the previous iterate short of it
                best = (z_new, state_new, Ydot_new, zeta)
                if previous is not None and abs(previous[3]) < abs(zeta):
                    best = previous
                if not abs(best[3]) <= _CROSSING_TOLERANCE * _zeta_scale(best[0], root):
                    raise StalledIteration(f"iteration stepped over a zero between z={z} and z={z_new}")
                z, state, Ydot = best[0], best[1], best[2]
                break

            done = _converged(z, z_new, root) or abs(zeta) <= _RESIDUAL_TOLERANCE * _zeta_scale(z_new, root)
            z, state, Y, Ydot = z_new, state_new, Y_new, Ydot_new
            if done:
                break
            previous = (z, state, Ydot, zeta)

        _check_spacing(problem, result, origin, from_zero, z)
        index = len(result)
        result.zeros.append(z)
        result.derivatives.append(Ydot)
        result.iterations_per_zero.append(iterations)
        result.states.append(state)
        from_zero = True
        if stop_predicate is not None and stop_predicate(index, z, state):
            break
    return result


def taylor_advance(ode: TaylorOde, point: float, value: float, derivative: float,
                   target: float, degree: int = TAYLOR_DEGREE) -> Tuple[float, float]:
    """
    Solution and derivative at target from a single Taylor series about point

    Raises:
        StepTooLarge when the series has not settled within degree terms
    """
    if target == point:
        return value, derivative
    h = ode.step(point, target)
    c = ode.coefficients(point, value, derivative, degree)
    k = np.arange(len(c))
    powers = h ** k
    terms = c * powers
    biggest = float(np.max(np.abs(terms)))
    if biggest > 0 and abs(terms[-1]) + abs(terms[-2]) > _TAYLOR_TOLERANCE * biggest:
        raise StepTooLarge(f"Taylor series of degree {degree} does not converge over h={h}")
    new_value = float(np.sum(terms[::-1]))
    new_derivative = float(np.sum((k[1:] * c[1:] * powers[:-1])[::-1]))
    return new_value, new_derivative


def continue_solution(ode: TaylorOde, point: float, value: float, derivative: float,
                      target: float, degree: int = TAYLOR_DEGREE) -> Tuple[float, float]:
    """taylor_advance over a path split to the ODE's step limit, halving on StepTooLarge"""
    direction = 1.0 if target >= point else -1.0
    halvings = 0
    while point != target:
        limit = ode.max_step(point)
        if halvings:
            limit = min(limit, abs(target - point)) / 2.0 ** halvings
        nxt = target if abs(target - point) <= limit else point + direction * limit
        try:
            value, derivative = taylor_advance(ode, point, value, derivative, nxt, degree)
        except StepTooLarge:
            halvings += 1
            if halvings > _MAX_HALVINGS:
                raise
            continue
        point = nxt
        halvings = 0
    return value, derivative


SweepJob = Tuple[OscillatorProblem, int, Optional[StopPredicate]]


def run_sweeps(jobs: List[SweepJob], workers: int = 1) -> List[SweepResult]:
    """sweep_zeros for each (problem, max_zeros, stop_predicate), concurrently when workers > 1"""
    workers = max(1, min(len(jobs), workers))
    if workers == 1:
        return [sweep_zeros(*job) for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = [executor.submit(sweep_zeros, *job) for job in jobs]
        return [f.result() for f in futures]
