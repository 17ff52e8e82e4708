"""Dense statevector evolution, observables, and fidelity.

Basis convention matches the Jordan-Wigner module: an occupied fermionic
mode is the +1 eigenstate of Z, i.e. computational |0>, so the Fock vacuum
is the all-ones basis state and the occupation of mode k is the
probability that index bit (k-1) is clear.

Pauli-string exponentials act through the permutation/phase identity
exp(-i a P) psi = cos(a) psi - i sin(a) (P psi), which is exact and
allocation-light; no dense matrix exponentials are taken during evolution.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .compiler import Circuit, CollectiveRotation, Gate, LocalRotation, MSGate, _ms_eigenbasis
from .errors import PreconditionError, ToleranceError
from .pauli import DEFAULT_DENSE_LIMIT, PauliString, PauliSum, string_action, to_matrix
from .trotter import TrotterPlan, check_plan_matches

NORM_TOL = 1e-10
HERMITICITY_TOL = 1e-10


@dataclass(frozen=True)
class StateVector:
    """2^n complex amplitudes, little-endian basis ordering, unit norm."""

    n_qubits: int
    amplitudes: np.ndarray

    @classmethod
    def basis_state(cls, n_qubits: int, index: int) -> "StateVector":
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(n_qubits, amps)

    def check_norm(self, tol: float = NORM_TOL) -> "StateVector":
        norm = float(np.linalg.norm(self.amplitudes))
        if abs(norm - 1.0) > tol:
            raise ToleranceError(f"state norm drifted to {norm!r}")
        return self

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())


@dataclass(frozen=True)
class EvolutionResult:
    """Observable series sampled on ``times`` (step boundaries for Trotter)."""

    times: np.ndarray
    modes: tuple[int, ...]
    occupations: np.ndarray  # shape (len(times), len(modes))
    method: str
    final_state: StateVector
    states: np.ndarray | None = None  # shape (len(times), 2^n) when recorded
    fidelity_vs_exact: np.ndarray | None = None


def prepare_occupation_state(occupied_modes: set[int] | tuple[int, ...], n_qubits: int) -> StateVector:
    """Computational basis state with the given modes occupied.

    Occupied modes clear their index bit (vacuum is all ones); the fermionic
    sign of the ordered creation product is a global phase on a basis state
    and is dropped.
    """
    index = (1 << n_qubits) - 1
    for mode in occupied_modes:
        if not 1 <= mode <= n_qubits:
            raise PreconditionError(f"mode {mode} outside register of {n_qubits} qubits")
        index &= ~(1 << (mode - 1))
    return StateVector.basis_state(n_qubits, index)


def occupation(psi: StateVector, mode: int) -> float:
    """Expectation of the number operator (I + Z_mode)/2 = P(bit clear)."""
    if not 1 <= mode <= psi.n_qubits:
        raise PreconditionError(f"mode {mode} outside register of {psi.n_qubits} qubits")
    idx = np.arange(psi.amplitudes.size, dtype=np.int64)
    empty = (idx >> (mode - 1)) & 1
    probs = np.abs(psi.amplitudes) ** 2
    return float(np.sum(probs[empty == 0]))


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2, global-phase insensitive."""
    if a.n_qubits != b.n_qubits:
        raise PreconditionError("register-size mismatch between states")
    val = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2
    return float(min(max(val, 0.0), 1.0))


def expectation(h: PauliSum, psi: StateVector) -> float:
    """<psi|H|psi> for a Hermitian Pauli sum, via string actions."""
    if h.n_qubits != psi.n_qubits:
        raise PreconditionError("register-size mismatch between sum and state")
    total = 0.0 + 0.0j
    amps = psi.amplitudes
    for term in h.terms:
        perm, phase = string_action(term.string)
        total += term.coefficient * np.vdot(amps, phase[perm] * amps[perm])
    return float(total.real)


def apply_pauli_exponential(amps: np.ndarray, string: PauliString, angle: float) -> np.ndarray:
    """exp(-i angle P) applied to raw amplitudes."""
    perm, phase = string_action(string)
    p_psi = phase[perm] * amps[perm]
    return math.cos(angle) * amps - 1j * math.sin(angle) * p_psi


def _occupation_row(amps: np.ndarray, modes: tuple[int, ...]) -> np.ndarray:
    probs = np.abs(amps) ** 2
    idx = np.arange(amps.size, dtype=np.int64)
    return np.array([float(np.sum(probs[((idx >> (m - 1)) & 1) == 0])) for m in modes])


def _hermitian_matrix(h: PauliSum, dense_limit: int) -> np.ndarray:
    mat = to_matrix(h, dense_limit)
    residue = float(np.max(np.abs(mat - mat.conj().T))) if mat.size else 0.0
    if residue > HERMITICITY_TOL:
        raise ToleranceError(
            f"Hamiltonian matrix has Hermiticity residue {residue:.3e}; upstream bug"
        )
    return mat


def evolve_exact(
    h: PauliSum,
    psi0: StateVector,
    times: np.ndarray | list[float],
    modes: tuple[int, ...] | None = None,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
    record_states: bool = False,
) -> EvolutionResult:
    """Eigendecomposition evolution |psi(t)> = V exp(-i L t) V+ |psi0>."""
    if h.n_qubits != psi0.n_qubits:
        raise PreconditionError("register-size mismatch between sum and state")
    mat = _hermitian_matrix(h, dense_limit)
    evals, evecs = np.linalg.eigh((mat + mat.conj().T) / 2.0)
    coeffs = evecs.conj().T @ psi0.amplitudes
    times = np.asarray(times, dtype=float)
    modes = modes if modes is not None else tuple(range(1, h.n_qubits + 1))
    occ = np.empty((times.size, len(modes)))
    states = np.empty((times.size, psi0.amplitudes.size), dtype=complex) if record_states else None
    amps = psi0.amplitudes
    for i, t in enumerate(times):
        amps = evecs @ (np.exp(-1j * evals * t) * coeffs)
        occ[i] = _occupation_row(amps, modes)
        if states is not None:
            states[i] = amps
    final = StateVector(psi0.n_qubits, amps if times.size else psi0.amplitudes.copy()).check_norm()
    return EvolutionResult(times, modes, occ, "exact", final, states)


def evolve_trotter(
    plan: TrotterPlan,
    h: PauliSum,
    psi0: StateVector,
    record_each_step: bool = False,
    modes: tuple[int, ...] | None = None,
    record_states: bool = False,
) -> EvolutionResult:
    """Slice-by-slice product-formula evolution, sampled at step boundaries."""
    check_plan_matches(plan, h)
    if h.n_qubits != psi0.n_qubits:
        raise PreconditionError("register-size mismatch between sum and state")
    modes = modes if modes is not None else tuple(range(1, h.n_qubits + 1))
    amps = psi0.amplitudes.copy()
    step_phase = cmath.exp(-1j * plan.identity_angle_per_step)
    rows: list[np.ndarray] = []
    kept: list[np.ndarray] = []
    times: list[float] = []
    for step in range(plan.n_steps):
        for term_idx, angle in plan.step_slices(step):
            amps = apply_pauli_exponential(amps, h.terms[term_idx].string, angle)
        amps = step_phase * amps
        if record_each_step or step == plan.n_steps - 1:
            times.append(plan.t_total * (step + 1) / plan.n_steps)
            rows.append(_occupation_row(amps, modes))
            if record_states:
                kept.append(amps.copy())
    final = StateVector(psi0.n_qubits, amps).check_norm()
    return EvolutionResult(
        np.asarray(times),
        modes,
        np.vstack(rows) if rows else np.empty((0, len(modes))),
        "trotter-matrix",
        final,
        np.vstack(kept) if kept else None,
    )


# ---------------------------------------------------------------------------
# Gate-level state application.
# ---------------------------------------------------------------------------

def _apply_single_qubit(amps: np.ndarray, n: int, qubit: int, u2: np.ndarray) -> np.ndarray:
    low = 1 << (qubit - 1)
    reshaped = amps.reshape(-1, 2, low)
    return np.einsum("ab,ibj->iaj", u2, reshaped).reshape(amps.size)


def _rot2(axis: str, angle: float) -> np.ndarray:
    sigma = {
        "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
        "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
        "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
    }[axis]
    return math.cos(angle) * np.eye(2, dtype=complex) + 1j * math.sin(angle) * sigma


def apply_gate(amps: np.ndarray, n: int, gate: Gate) -> np.ndarray:
    if isinstance(gate, LocalRotation):
        return _apply_single_qubit(amps, n, gate.qubit, _rot2(gate.axis, gate.angle))
    if isinstance(gate, CollectiveRotation):
        r = _rot2(gate.axis, gate.angle)
        for q in gate.targets:
            amps = _apply_single_qubit(amps, n, q, r)
        return amps
    # MS gate: rotate targets into the collective eigenbasis, apply the
    # diagonal exp(-i theta (k-2w)^2/4), rotate back.
    k = len(gate.targets)
    v = _ms_eigenbasis(gate.phi)
    vdag = v.conj().T
    for q in gate.targets:
        amps = _apply_single_qubit(amps, n, q, vdag)
    mask = 0
    for q in gate.targets:
        mask |= 1 << (q - 1)
    idx = np.arange(amps.size, dtype=np.int64)
    w = np.bitwise_count(idx & mask).astype(np.float64)
    amps = amps * np.exp(-1j * gate.theta * (k - 2.0 * w) ** 2 / 4.0)
    for q in gate.targets:
        amps = _apply_single_qubit(amps, n, q, v)
    return amps


def evolve_circuit(circuit: Circuit, psi0: StateVector) -> StateVector:
    """Apply the gate list in order (plus the tracked phase) to the state."""
    if circuit.n_qubits != psi0.n_qubits:
        raise PreconditionError("register-size mismatch between circuit and state")
    amps = psi0.amplitudes.copy()
    for gate in circuit.gates:
        amps = apply_gate(amps, circuit.n_qubits, gate)
    return StateVector(psi0.n_qubits, circuit.phase * amps).check_norm()
