"""Product-formula scheduling and gate-count / norm bounds.

A plan is a flat schedule of (term index, angle) slices; each slice stands
for exp(-i * angle * P).  Identity strings never become slices, they
accumulate a tracked global phase.  Within each step, weight >= 2 strings
come first in canonical order followed by the weight-1 strings, so the
compiler can merge the latter into a single local-rotation layer.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .pauli import DEFAULT_DENSE_LIMIT, PauliSum, string_action, to_matrix

REAL_COEFF_TOL = 1e-12


@dataclass(frozen=True)
class TrotterPlan:
    order: int
    n_steps: int
    t_total: float
    n_qubits: int
    n_terms: int
    slices: tuple[tuple[int, float], ...]
    identity_angle_per_step: float = 0.0

    @property
    def slices_per_step(self) -> int:
        return len(self.slices) // self.n_steps if self.n_steps else 0

    def step_slices(self, step: int) -> tuple[tuple[int, float], ...]:
        k = self.slices_per_step
        return self.slices[step * k : (step + 1) * k]

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "n_steps": self.n_steps,
            "t_total": self.t_total,
            "n_qubits": self.n_qubits,
            "n_terms": self.n_terms,
            "identity_angle_per_step": self.identity_angle_per_step,
            "slices": [[i, a] for i, a in self.slices],
        }


def _term_order(h: PauliSum) -> list[int]:
    """Slice order within a step: weight >= 2 first, then weight 1, both in
    canonical index order; identity excluded."""
    heavy = [i for i, t in enumerate(h.terms) if t.string.weight >= 2]
    light = [i for i, t in enumerate(h.terms) if t.string.weight == 1]
    return heavy + light


def make_plan(h: PauliSum, t: float, n_steps: int, order: int = 1) -> TrotterPlan:
    """First- or second-order product-formula schedule for exp(-iHt)."""
    if n_steps < 1:
        raise PreconditionError("n_steps must be at least 1")
    if order not in (1, 2):
        raise PreconditionError("only orders 1 and 2 are executable plans")
    imag = h.max_imag()
    if imag > REAL_COEFF_TOL:
        raise PreconditionError(
            f"plans require real coefficients; imaginary residue {imag:.3e}"
        )
    dt = t / n_steps
    identity_angle = complex(h.identity_coefficient()).real * dt
    indices = _term_order(h)
    angles = {i: complex(h.terms[i].coefficient).real * dt for i in indices}
    step: list[tuple[int, float]] = []
    if indices:
        if order == 1:
            step = [(i, angles[i]) for i in indices]
        else:
            step = [(i, angles[i] / 2.0) for i in indices[:-1]]
            step.append((indices[-1], angles[indices[-1]]))
            step.extend((i, angles[i] / 2.0) for i in reversed(indices[:-1]))
    return TrotterPlan(
        order=order,
        n_steps=n_steps,
        t_total=t,
        n_qubits=h.n_qubits,
        n_terms=len(h.terms),
        slices=tuple(step) * n_steps,
        identity_angle_per_step=identity_angle,
    )


def check_plan_matches(plan: TrotterPlan, h: PauliSum) -> None:
    if plan.n_qubits != h.n_qubits or plan.n_terms != len(h.terms):
        raise PreconditionError("plan does not refer to this Pauli sum")


def plan_unitary(plan: TrotterPlan, h: PauliSum, dense_limit: int = DEFAULT_DENSE_LIMIT) -> np.ndarray:
    """Dense unitary realized by the plan (verification tool)."""
    check_plan_matches(plan, h)
    if h.n_qubits > dense_limit:
        raise PreconditionError(
            f"register of {h.n_qubits} qubits exceeds the dense limit {dense_limit}"
        )
    dim = 1 << h.n_qubits
    u = np.eye(dim, dtype=complex)
    idx = np.arange(dim)
    for term_idx, angle in plan.slices:
        perm, phase = string_action(h.terms[term_idx].string)
        p_mat = np.zeros((dim, dim), dtype=complex)
        p_mat[perm, idx] = phase
        slice_u = math.cos(angle) * np.eye(dim) - 1j * math.sin(angle) * p_mat
        u = slice_u @ u
    return np.exp(-1j * plan.identity_angle_per_step * plan.n_steps) * u


def exact_unitary(h: PauliSum, t: float, dense_limit: int = DEFAULT_DENSE_LIMIT) -> np.ndarray:
    """exp(-iHt) via Hermitian eigendecomposition."""
    mat = to_matrix(h, dense_limit)
    evals, evecs = np.linalg.eigh((mat + mat.conj().T) / 2.0)
    return (evecs * np.exp(-1j * evals * t)) @ evecs.conj().T


@dataclass(frozen=True, slots=True)
class BoundQuery:
    """Inputs of the exponential-count bound for a k-th order integrator."""

    m: int
    h_norm: float
    t: float
    epsilon: float
    k: int


def gate_count_bound(q: BoundQuery) -> float:
    """Upper bound m 5^{2k} (m ||H|| t)^{1+1/2k} / eps^{1/2k}.

    Valid only when eps <= 1 <= 2 m 5^{k-1} ||H|| t; violations raise with
    the failing inequality named.
    """
    if q.m < 1 or q.k < 1:
        raise PreconditionError("m and k must be positive integers")
    if q.epsilon <= 0:
        raise PreconditionError("epsilon must be positive")
    if q.epsilon > 1:
        raise PreconditionError(f"validity condition epsilon <= 1 violated (epsilon={q.epsilon})")
    lhs = 2.0 * q.m * 5.0 ** (q.k - 1) * q.h_norm * q.t
    if lhs < 1.0:
        raise PreconditionError(
            f"validity condition 1 <= 2 m 5^(k-1) ||H|| t violated (value={lhs})"
        )
    exponent = 1.0 + 1.0 / (2.0 * q.k)
    return q.m * 5.0 ** (2 * q.k) * (q.m * q.h_norm * q.t) ** exponent / q.epsilon ** (1.0 / (2.0 * q.k))


def norm_bound(h: PauliSum) -> float:
    """Triangle-inequality bound sum_j |h_j| on the 2-norm of the sum."""
    return float(sum(abs(complex(t.coefficient)) for t in h.terms))


def spectral_norm(h: PauliSum, dense_limit: int = 12) -> float:
    """Exact 2-norm via dense eigensolve; never exceeds norm_bound."""
    mat = to_matrix(h, dense_limit)
    evals = np.linalg.eigvalsh((mat + mat.conj().T) / 2.0)
    return float(np.max(np.abs(evals))) if evals.size else 0.0


def ordering_spread(
    h: PauliSum,
    t: float,
    n_steps: int,
    n_shuffles: int = 5,
    seed: int = 0,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> list[float]:
    """Operator-norm errors of shuffled-order first-order plans (diagnostic).

    The first entry is the canonical ordering; the rest use seeded shuffles
    of the per-step term order.
    """
    rng = random.Random(seed)
    u_exact = exact_unitary(h, t, dense_limit)
    base = make_plan(h, t, n_steps, order=1)
    errors = [float(np.linalg.norm(u_exact - plan_unitary(base, h, dense_limit), 2))]
    indices = _term_order(h)
    dt = t / n_steps
    for _ in range(n_shuffles):
        shuffled = indices[:]
        rng.shuffle(shuffled)
        step = tuple((i, complex(h.terms[i].coefficient).real * dt) for i in shuffled)
        plan = TrotterPlan(
            order=1,
            n_steps=n_steps,
            t_total=t,
            n_qubits=h.n_qubits,
            n_terms=len(h.terms),
            slices=step * n_steps,
            identity_angle_per_step=complex(h.identity_coefficient()).real * dt,
        )
        errors.append(float(np.linalg.norm(u_exact - plan_unitary(plan, h, dense_limit), 2)))
    return errors
