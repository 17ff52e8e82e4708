"""Constructors for the named lattice Hamiltonians.

Mode ordering is site-major with spin-up before spin-down: site j maps to
modes (2j-1, 2j).  This keeps nearest-neighbour hopping strings at weight 3
(X Z X / Y Z Y patterns), which the ion compiler turns into three gates
each.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

from .fermions import FermionHamiltonian, FermionOp, FermionTerm, SpinFactor, hermitian_closure
from .jordan_wigner import jw_hamiltonian

UP, DOWN = 0, 1


def hubbard_mode(site: int, spin: int) -> int:
    """1-based mode index for (site, spin) with spin in {UP, DOWN}."""
    return 2 * site - 1 + spin


def kondo_mode(momentum: int, spin: int) -> int:
    """1-based mode index for (momentum slot, spin)."""
    return 2 * momentum - 1 + spin


@dataclass(frozen=True, slots=True)
class HubbardSpec:
    """Chain of n_sites with hopping w, on-site repulsion U.

    neighbor_range=1 is the tight-binding case; larger values couple
    arbitrarily distant site pairs.
    """

    n_sites: int
    w: float
    u: float
    neighbor_range: int = 1

    def __post_init__(self) -> None:
        if self.n_sites < 1:
            raise ValueError("n_sites must be positive")
        if self.neighbor_range < 1:
            raise ValueError("neighbor_range must be positive")

    @property
    def n_modes(self) -> int:
        return 2 * self.n_sites


@dataclass(frozen=True)
class KondoSpec:
    """Fermi sea on a finite momentum list coupled to magnetic impurities."""

    n_momenta: int
    epsilons: tuple[float, ...]
    j: float
    impurity_positions: tuple[float, ...] = ()
    momenta: tuple[float, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.n_momenta < 1:
            raise ValueError("n_momenta must be positive")
        if len(self.epsilons) != self.n_momenta:
            raise ValueError("epsilons must list one kinetic energy per momentum")
        momenta = self.momenta or tuple(float(p) for p in range(1, self.n_momenta + 1))
        if len(momenta) != self.n_momenta:
            raise ValueError("momenta must list one value per momentum slot")
        object.__setattr__(self, "momenta", momenta)

    @property
    def n_modes(self) -> int:
        return 2 * self.n_momenta

    @property
    def n_impurities(self) -> int:
        return len(self.impurity_positions)


def build_hubbard(spec: HubbardSpec) -> FermionHamiltonian:
    """Hopping within neighbor_range for both spins plus on-site repulsion.

    Returned Hamiltonian is Hermitian-closed.
    """
    terms: list[FermionTerm] = []
    for d in range(1, spec.neighbor_range + 1):
        for site in range(1, spec.n_sites - d + 1):
            for spin in (UP, DOWN):
                terms.append(
                    FermionTerm(
                        spec.w,
                        (
                            FermionOp(hubbard_mode(site, spin), True),
                            FermionOp(hubbard_mode(site + d, spin), False),
                        ),
                    )
                )
    for site in range(1, spec.n_sites + 1):
        up, down = hubbard_mode(site, UP), hubbard_mode(site, DOWN)
        terms.append(
            FermionTerm(
                spec.u,
                (
                    FermionOp(up, True),
                    FermionOp(up, False),
                    FermionOp(down, True),
                    FermionOp(down, False),
                ),
            )
        )
    return hermitian_closure(FermionHamiltonian(spec.n_modes, 0, tuple(terms)))


def build_kondo(spec: KondoSpec) -> FermionHamiltonian:
    """Kinetic terms plus impurity exchange with momentum-dependent phases.

    For every momentum pair (p, p') and impurity j the exchange bracket
    carries the phase e^{i R_j (p - p')} and couples the spin-z density
    difference and both spin-flip channels, all scaled by -J.  The double
    momentum sum makes the term set Hermitian as written; closure is applied
    to guarantee it.
    """
    terms: list[FermionTerm] = []
    for p in range(1, spec.n_momenta + 1):
        eps = spec.epsilons[p - 1]
        for spin in (UP, DOWN):
            mode = kondo_mode(p, spin)
            terms.append(
                FermionTerm(eps, (FermionOp(mode, True), FermionOp(mode, False)))
            )
    for p in range(1, spec.n_momenta + 1):
        for q in range(1, spec.n_momenta + 1):
            for j in range(1, spec.n_impurities + 1):
                phase = cmath.exp(
                    1j * spec.impurity_positions[j - 1] * (spec.momenta[p - 1] - spec.momenta[q - 1])
                )
                coupling = -spec.j * phase
                up_p, dn_p = kondo_mode(p, UP), kondo_mode(p, DOWN)
                up_q, dn_q = kondo_mode(q, UP), kondo_mode(q, DOWN)
                terms.append(
                    FermionTerm(
                        coupling,
                        (FermionOp(up_p, True), FermionOp(up_q, False)),
                        (SpinFactor(j, "z"),),
                    )
                )
                terms.append(
                    FermionTerm(
                        -coupling,
                        (FermionOp(dn_p, True), FermionOp(dn_q, False)),
                        (SpinFactor(j, "z"),),
                    )
                )
                terms.append(
                    FermionTerm(
                        coupling,
                        (FermionOp(up_p, True), FermionOp(dn_q, False)),
                        (SpinFactor(j, "-"),),
                    )
                )
                terms.append(
                    FermionTerm(
                        coupling,
                        (FermionOp(dn_p, True), FermionOp(up_q, False)),
                        (SpinFactor(j, "+"),),
                    )
                )
    return hermitian_closure(
        FermionHamiltonian(spec.n_modes, spec.n_impurities, tuple(terms))
    )


def nonlocal_term_count(h: FermionHamiltonian) -> int:
    """Number of weight >= 2 strings in the mapped Hamiltonian.

    For a tight-binding chain on N modes this equals 5N/2 - 4.
    """
    return jw_hamiltonian(h).count_weight_at_least(2)
