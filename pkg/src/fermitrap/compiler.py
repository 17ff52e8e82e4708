"""Compilation of Pauli-string exponentials to trapped-ion gate sequences.

Gate set: the collective Molmer-Sorensen gate

    MS(theta, phi) = exp[-i theta (cos(phi) S_x + sin(phi) S_y)^2 / 4],
    S_{x,y} = sum over targets of sigma^{x,y},

collective rotations exp[i angle * sum sigma^axis] (axis x or y), and local
rotations exp[i angle * sigma^axis] (axis x, y or z).

A weight-k >= 3 exponential exp(i phi P) is produced by the sandwich
MS(-pi/2, ms_phi) . L . MS(pi/2, ms_phi): conjugating a local rotation on
one target (the anchor) by the MS half-pulse rotates it into Z on the
anchor times X (ms_phi = 0) or Y (ms_phi = pi/2) on every other target.
The residual sign of that conjugation depends on k mod 4, which fixes the
local-rotation axis and the sign of its angle phi':

    X pattern, odd k : L = exp(i phi' Z),  phi' = +phi for k = 4n+1, -phi for k = 4n-1
    X pattern, even k: L = exp(i phi' Y),  phi' = +phi for k = 4n,   -phi for k = 4n-2
    Y pattern, odd k : L = exp(i phi' Z),  same sign rule as the X pattern
    Y pattern, even k: L = exp(i phi' X),  phi' = +phi for k = 4n-2, -phi for k = 4n

Letters that differ from the natural pattern are fixed by conjugating with
pi/4 rotations (collective where several targets share the same change).
Weight-2 exponentials use a single MS gate directly, since on two qubits
S^2 = 2I + 2 sigma (x) sigma, again with basis conjugations as needed.

Counting convention (stated in all outputs): MS gates, collective
rotations, and sandwiched local rotations each count 1; weight-1
exponentials coming from Hamiltonian terms are merged into one local
rotation layer per step, reported separately, and excluded from the
headline count.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import PreconditionError
from .pauli import DEFAULT_DENSE_LIMIT, PauliString, PauliSum, PauliTerm
from .trotter import TrotterPlan, check_plan_matches

TWO_PI = 2.0 * math.pi
MS_PERIOD = 8.0 * math.pi  # S^2/4 has quarter-integer spectrum
ANGLE_TOL = 1e-12


def _norm_angle(angle: float, period: float = TWO_PI) -> float:
    """Normalize to (-period/2, period/2]."""
    a = math.fmod(angle, period)
    if a > period / 2.0:
        a -= period
    elif a <= -period / 2.0:
        a += period
    return a


@dataclass(frozen=True, slots=True)
class MSGate:
    theta: float
    phi: float
    targets: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.targets) < 2:
            raise ValueError("MS gates act on at least two qubits")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError("MS targets must be distinct")

    def inverse(self) -> "MSGate":
        return MSGate(-self.theta, self.phi, self.targets)


@dataclass(frozen=True, slots=True)
class CollectiveRotation:
    axis: str  # 'x' or 'y'
    angle: float
    targets: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.axis not in ("x", "y"):
            raise ValueError("collective rotations support axes x and y only")
        if not self.targets:
            raise ValueError("collective rotation needs at least one target")

    def inverse(self) -> "CollectiveRotation":
        return CollectiveRotation(self.axis, -self.angle, self.targets)


@dataclass(frozen=True, slots=True)
class LocalRotation:
    axis: str  # 'x', 'y' or 'z'
    angle: float
    qubit: int
    layer: bool = False  # True for merged weight-1 Hamiltonian rotations

    def __post_init__(self) -> None:
        if self.axis not in ("x", "y", "z"):
            raise ValueError("local rotation axis must be x, y or z")

    def inverse(self) -> "LocalRotation":
        return LocalRotation(self.axis, -self.angle, self.qubit, self.layer)


Gate = MSGate | CollectiveRotation | LocalRotation


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list; the first-listed gate is applied first."""

    n_qubits: int
    gates: tuple[Gate, ...] = ()
    phase: complex = 1.0 + 0.0j

    def __post_init__(self) -> None:
        for g in self.gates:
            targets = (g.qubit,) if isinstance(g, LocalRotation) else g.targets
            for q in targets:
                if not 1 <= q <= self.n_qubits:
                    raise ValueError(f"gate target {q} outside register of {self.n_qubits}")

    @property
    def counted_gates(self) -> int:
        return sum(
            1
            for g in self.gates
            if not (isinstance(g, LocalRotation) and g.layer)
        )

    @property
    def local_layer_gates(self) -> int:
        return sum(1 for g in self.gates if isinstance(g, LocalRotation) and g.layer)

    def extended(self, gates: list[Gate], phase: complex = 1.0) -> "Circuit":
        return Circuit(self.n_qubits, self.gates + tuple(gates), self.phase * phase)

    def to_dict(self) -> dict:
        records = []
        for g in self.gates:
            if isinstance(g, MSGate):
                records.append(
                    {"kind": "ms", "theta": g.theta, "phi": g.phi, "targets": list(g.targets)}
                )
            elif isinstance(g, CollectiveRotation):
                records.append(
                    {
                        "kind": "collective_rot",
                        "axis": g.axis,
                        "angle": g.angle,
                        "targets": list(g.targets),
                    }
                )
            else:
                records.append(
                    {
                        "kind": "local_rot",
                        "axis": g.axis,
                        "angle": g.angle,
                        "qubit": g.qubit,
                        "layer": g.layer,
                    }
                )
        return {
            "n_qubits": self.n_qubits,
            "phase": [self.phase.real, self.phase.imag],
            "gates": records,
            "counted_gates": self.counted_gates,
            "local_layer_gates": self.local_layer_gates,
            "total_gates": len(self.gates),
        }


# ---------------------------------------------------------------------------
# Basis-change bookkeeping.  For pattern p in {x, y} the tables give the
# pi/4 conjugation C with C sigma^p C-dag = sigma^letter; the anchor table
# maps the natural Z into the requested anchor letter.
# ---------------------------------------------------------------------------

_PATTERN_Z_ROT = {"x": ("y", math.pi / 4.0), "y": ("x", -math.pi / 4.0)}
_PATTERN_TRANSVERSE_ROT = {"x": ("z", -math.pi / 4.0), "y": ("z", math.pi / 4.0)}
_ANCHOR_ROT = {"x": ("y", -math.pi / 4.0), "y": ("x", math.pi / 4.0)}
_OTHER_TRANSVERSE = {"x": "y", "y": "x"}
_MS_PHI = {"x": 0.0, "y": math.pi / 2.0}


def _sandwich_local(k: int, pattern: str) -> tuple[str, float]:
    """(axis, sign) of the sandwiched local rotation for string weight k."""
    if k % 2 == 1:
        return "z", (1.0 if k % 4 == 1 else -1.0)
    if pattern == "x":
        return "y", (1.0 if k % 4 == 0 else -1.0)
    return "x", (1.0 if k % 4 == 2 else -1.0)


def _conjugation_gates(
    pattern: str, letters: dict[int, str], anchor: int | None
) -> tuple[list[Gate], list[Gate]]:
    """(pre, post) rotations turning the natural pattern into ``letters``.

    post applies the map C (pattern letter -> target letter); pre is its
    inverse.  Qubits whose letter needs the Z direction share one collective
    rotation; transverse mismatches take individual z-axis locals.
    """
    post: list[Gate] = []
    z_group = tuple(sorted(q for q, L in letters.items() if q != anchor and L == "z"))
    if z_group:
        axis, angle = _PATTERN_Z_ROT[pattern]
        post.append(CollectiveRotation(axis, angle, z_group))
    transverse = _OTHER_TRANSVERSE[pattern]
    for q in sorted(q for q, L in letters.items() if q != anchor and L == transverse):
        axis, angle = _PATTERN_TRANSVERSE_ROT[pattern]
        post.append(LocalRotation(axis, angle, q))
    if anchor is not None and letters[anchor] != "z":
        axis, angle = _ANCHOR_ROT[letters[anchor]]
        post.append(LocalRotation(axis, angle, anchor))
    pre = [g.inverse() for g in reversed(post)]
    return pre, post


def _pattern_cost(pattern: str, letters: dict[int, str], anchor: int | None) -> int:
    others = {q: L for q, L in letters.items() if q != anchor}
    cost = 2 * int(any(L == "z" for L in others.values()))
    cost += 2 * sum(1 for L in others.values() if L == _OTHER_TRANSVERSE[pattern])
    return cost


def ms_sandwich(
    targets: tuple[int, ...], anchor: int, pattern: str, phi: float
) -> list[Gate]:
    """Gate triple realizing exp(i phi Z_anchor (x) pattern-letter on the rest).

    Any target may serve as the anchor; the identity is symmetric under
    permutations of the MS targets.
    """
    if anchor not in targets:
        raise PreconditionError("anchor must be one of the MS targets")
    axis, sign = _sandwich_local(len(targets), pattern)
    ms_phi = _MS_PHI[pattern]
    return [
        MSGate(math.pi / 2.0, ms_phi, targets),
        LocalRotation(axis, _norm_angle(sign * phi), anchor),
        MSGate(-math.pi / 2.0, ms_phi, targets),
    ]


def compile_rotation(string: PauliString, phi: float) -> Circuit:
    """Circuit whose unitary is exactly exp(i phi P) (phase tracked)."""
    n = string.n_qubits
    support = string.support()
    w = len(support)
    if w == 0:
        return Circuit(n, (), cmath.exp(1j * phi))
    letters = {q: string.letter(q).lower() for q in support}
    if w == 1:
        q = support[0]
        return Circuit(n, (LocalRotation(letters[q], _norm_angle(phi), q),))
    if w == 2:
        return _compile_pair(n, support, letters, phi)
    return _compile_sandwich(n, support, letters, phi)


def _compile_pair(
    n: int, support: tuple[int, ...], letters: dict[int, str], phi: float
) -> Circuit:
    cost_x = _pattern_cost("x", letters, None)
    cost_y = _pattern_cost("y", letters, None)
    pattern = "x" if cost_x <= cost_y else "y"
    pre, post = _conjugation_gates(pattern, letters, None)
    ms = MSGate(_norm_angle(-2.0 * phi, MS_PERIOD), _MS_PHI[pattern], support)
    gates = tuple(pre) + (ms,) + tuple(post)
    return Circuit(n, gates, cmath.exp(-1j * phi))


def _compile_sandwich(
    n: int, support: tuple[int, ...], letters: dict[int, str], phi: float
) -> Circuit:
    z_candidates = [q for q in support if letters[q] == "z"]
    anchor = z_candidates[0] if z_candidates else support[0]
    cost_x = _pattern_cost("x", letters, anchor)
    cost_y = _pattern_cost("y", letters, anchor)
    pattern = "x" if cost_x <= cost_y else "y"
    pre, post = _conjugation_gates(pattern, letters, anchor)
    inner = ms_sandwich(support, anchor, pattern, phi)
    return Circuit(n, tuple(pre) + tuple(inner) + tuple(post))


def compile_exponential(term: PauliTerm, t_slice: float, coeff_tol: float = 1e-12) -> Circuit:
    """Circuit for exp(-i g t_slice P), i.e. exp(i phi P) with phi = -g t."""
    g = complex(term.coefficient)
    if abs(g.imag) > coeff_tol:
        raise PreconditionError(
            "exponentials need real coefficients; split complex couplings "
            "by Hermitian pairing first"
        )
    return compile_rotation(term.string, -g.real * t_slice)


def compile_plan(plan: TrotterPlan, h: PauliSum, optimize: bool = True) -> Circuit:
    """Concatenated step circuits with the peephole sharing pass applied.

    Runs of weight-1 slices become a merged local-rotation layer (rotations
    on distinct qubits commute; same-qubit same-axis angles add, and the
    plan schedules weight-1 terms contiguously).
    """
    check_plan_matches(plan, h)
    gates: list[Gate] = []
    phase = 1.0 + 0.0j
    for step in range(plan.n_steps):
        buffer: list[tuple[int, str, float]] = []  # (qubit, axis, angle)

        def flush() -> None:
            nonlocal gates
            merged: dict[tuple[int, str], float] = {}
            order: list[tuple[int, str]] = []
            for qubit, axis, angle in buffer:
                key = (qubit, axis)
                if key not in merged:
                    merged[key] = 0.0
                    order.append(key)
                merged[key] += angle
            for qubit, axis in order:
                angle = _norm_angle(merged[(qubit, axis)])
                if abs(angle) > ANGLE_TOL:
                    gates.append(LocalRotation(axis, angle, qubit, layer=True))
            buffer.clear()

        for term_idx, angle in plan.step_slices(step):
            term = h.terms[term_idx]
            if term.string.weight == 1:
                qubit = term.string.support()[0]
                buffer.append((qubit, term.string.letter(qubit).lower(), -angle))
                continue
            flush()
            sub = compile_rotation(term.string, -angle)
            gates.extend(sub.gates)
            phase *= sub.phase
        flush()
        phase *= cmath.exp(-1j * plan.identity_angle_per_step)
    if optimize:
        gates = peephole_optimize(gates)
    return Circuit(h.n_qubits, tuple(gates), phase)


def _try_merge(a: Gate, b: Gate) -> Gate | None | bool:
    """Merged gate, None when the pair cancels, False when unmergeable."""
    if isinstance(a, MSGate) and isinstance(b, MSGate):
        if a.targets == b.targets and abs(_norm_angle(a.phi - b.phi)) <= ANGLE_TOL:
            theta = _norm_angle(a.theta + b.theta, MS_PERIOD)
            return None if abs(theta) <= ANGLE_TOL else MSGate(theta, a.phi, a.targets)
        return False
    if isinstance(a, CollectiveRotation) and isinstance(b, CollectiveRotation):
        if a.targets == b.targets and a.axis == b.axis:
            angle = _norm_angle(a.angle + b.angle)
            return None if abs(angle) <= ANGLE_TOL else CollectiveRotation(a.axis, angle, a.targets)
        return False
    if isinstance(a, LocalRotation) and isinstance(b, LocalRotation):
        if a.qubit == b.qubit and a.axis == b.axis and a.layer == b.layer:
            angle = _norm_angle(a.angle + b.angle)
            return None if abs(angle) <= ANGLE_TOL else LocalRotation(a.axis, angle, a.qubit, a.layer)
        return False
    return False


def peephole_optimize(gates: list[Gate]) -> list[Gate]:
    """Cancel/merge adjacent inverse or same-generator gate pairs.

    Sound because every rewrite uses the exact identity
    e^{iaA} e^{ibA} = e^{i(a+b)A}; iterated to a fixed point.
    """
    out = list(gates)
    changed = True
    while changed:
        changed = False
        i = 0
        while i + 1 < len(out):
            merged = _try_merge(out[i], out[i + 1])
            if merged is False:
                i += 1
                continue
            if merged is None:
                del out[i : i + 2]
            else:
                out[i : i + 2] = [merged]
            changed = True
            i = max(i - 1, 0)
    return out


# ---------------------------------------------------------------------------
# Dense gate matrices (verification back-end).
# ---------------------------------------------------------------------------

_SIGMA = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}
_ID2 = np.eye(2, dtype=complex)


def _kron_embed(factors: dict[int, np.ndarray], n_qubits: int) -> np.ndarray:
    """Little-endian Kronecker chain with identity on absent qubits."""
    out = np.eye(1, dtype=complex)
    for q in range(1, n_qubits + 1):
        out = np.kron(factors.get(q, _ID2), out)
    return out


def _ms_eigenbasis(phi: float) -> np.ndarray:
    """Single-qubit V with (cos phi X + sin phi Y) = V diag(1,-1) V-dag."""
    e = cmath.exp(1j * phi)
    return np.array([[1.0, 1.0], [e, -e]], dtype=complex) / math.sqrt(2.0)


def ms_unitary(gate: MSGate, n_qubits: int, dense_limit: int = DEFAULT_DENSE_LIMIT) -> np.ndarray:
    """Exact dense matrix of the collective MS gate, identity elsewhere.

    Diagonalized analytically: with S = sum of (cos phi X + sin phi Y) over
    the k targets, the basis V^(x)k turns S into the diagonal k - 2w, where
    w counts set target bits, so the phases are exp(-i theta (k-2w)^2 / 4).
    """
    if n_qubits > dense_limit:
        raise PreconditionError(
            f"register of {n_qubits} qubits exceeds the dense limit {dense_limit}"
        )
    k = len(gate.targets)
    mask = 0
    for q in gate.targets:
        mask |= 1 << (q - 1)
    dim = 1 << n_qubits
    idx = np.arange(dim, dtype=np.int64)
    w = np.bitwise_count(idx & mask).astype(np.float64)
    diag = np.exp(-1j * gate.theta * (k - 2.0 * w) ** 2 / 4.0)
    v = _ms_eigenbasis(gate.phi)
    big_v = _kron_embed({q: v for q in gate.targets}, n_qubits)
    return (big_v * diag) @ big_v.conj().T


def gate_matrix(gate: Gate, n_qubits: int, dense_limit: int = DEFAULT_DENSE_LIMIT) -> np.ndarray:
    if isinstance(gate, MSGate):
        return ms_unitary(gate, n_qubits, dense_limit)
    if isinstance(gate, CollectiveRotation):
        r = math.cos(gate.angle) * _ID2 + 1j * math.sin(gate.angle) * _SIGMA[gate.axis]
        return _kron_embed({q: r for q in gate.targets}, n_qubits)
    r = math.cos(gate.angle) * _ID2 + 1j * math.sin(gate.angle) * _SIGMA[gate.axis]
    return _kron_embed({gate.qubit: r}, n_qubits)


def circuit_unitary(circuit: Circuit, dense_limit: int = DEFAULT_DENSE_LIMIT) -> np.ndarray:
    """Ordered product of gate matrices times the tracked phase."""
    if circuit.n_qubits > dense_limit:
        raise PreconditionError(
            f"register of {circuit.n_qubits} qubits exceeds the dense limit {dense_limit}"
        )
    dim = 1 << circuit.n_qubits
    u = np.eye(dim, dtype=complex)
    for gate in circuit.gates:
        u = gate_matrix(gate, circuit.n_qubits, dense_limit) @ u
    return circuit.phase * u
