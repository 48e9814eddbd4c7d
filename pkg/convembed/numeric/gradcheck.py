from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from convembed.numeric.tape import Node, Tape

LossFn = Callable[[Tape, List[Node]], Node]


class GradCheckReport(BaseModel):
    max_rel_err: float = Field(..., description="Worst relative error over reliable coordinates.")
    passed: bool = Field(..., description="True when every reliable coordinate is within tolerance.")
    n_checked: int = Field(..., description="Coordinates compared.")
    n_unreliable: int = Field(0, description="Coordinates excluded as non-smooth.")
    worst: Optional[Tuple[int, int]] = Field(
        None, description="(parameter index, flat index) of the worst coordinate."
    )


def analytic_gradients(loss_fn: LossFn, params: Sequence[np.ndarray]) -> Tuple[float, List[np.ndarray]]:
    tape = Tape()
    nodes = [tape.variable(p) for p in params]
    loss = loss_fn(tape, nodes)
    return float(loss.value), tape.gradient_of(loss, nodes)


def _evaluate(loss_fn: LossFn, params: Sequence[np.ndarray]) -> float:
    tape = Tape()
    return float(loss_fn(tape, [tape.variable(p) for p in params]).value)


def finite_diff_check(
    loss_fn: LossFn,
    params: Sequence[np.ndarray],
    h: float = 1e-5,
    tol: float = 1e-4,
    n_coords: Optional[int] = None,
    seed: int = 0,
    kink_tol: float = 1e-2,
    abs_floor: float = 1e-7,
) -> GradCheckReport:
    """Compare tape gradients with central differences (f(p+h) − f(p−h)) / 2h.

    With n_coords set, that many coordinates are drawn at random over all
    parameters; otherwise every coordinate is checked. A coordinate whose
    one-sided differences disagree is a non-smooth point and is excluded.
    """
    if h <= 0:
        raise ValueError(f"step h must be positive, got {h}")
    params = [np.array(p, dtype=np.float64, copy=True) for p in params]
    f0, grads = analytic_gradients(loss_fn, params)

    coords = [(i, j) for i, p in enumerate(params) for j in range(p.size)]
    if n_coords is not None and n_coords < len(coords):
        rng = np.random.default_rng(seed)
        picked = rng.choice(len(coords), size=n_coords, replace=False)
        coords = [coords[k] for k in sorted(picked)]

    max_rel_err = 0.0
    worst = None
    passed = True
    n_unreliable = 0
    for i, j in coords:
        flat = params[i].reshape(-1)
        original = flat[j]
        flat[j] = original + h
        f_plus = _evaluate(loss_fn, params)
        flat[j] = original - h
        f_minus = _evaluate(loss_fn, params)
        flat[j] = original

        forward = (f_plus - f0) / h
        backward = (f0 - f_minus) / h
        numeric = (f_plus - f_minus) / (2.0 * h)
        if abs(forward - backward) > kink_tol * max(1.0, abs(numeric)):
            n_unreliable += 1
            continue

        analytic = float(grads[i].reshape(-1)[j])
        if max(abs(analytic), abs(numeric)) < abs_floor:
            passed = passed and abs(analytic - numeric) <= abs_floor
            continue
        rel = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-8)
        if rel > max_rel_err:
            max_rel_err, worst = rel, (i, j)
        if rel > tol:
            passed = False

    return GradCheckReport(
        max_rel_err=max_rel_err,
        passed=passed,
        n_checked=len(coords) - n_unreliable,
        n_unreliable=n_unreliable,
        worst=worst,
    )
