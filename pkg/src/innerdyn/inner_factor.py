"""Atomic singular inner functions and their combination with Blaschke factors.

The singular factor is exp of a negative Herglotz sum against finitely many
point masses on the unit circle; paired with a finite Blaschke part this
covers every inner function representable here. The Frostman transform
post-composes with a disc automorphism.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from typing import Callable

from .blaschke import FiniteBlaschke, eval_finite
from .errors import AtomProximity, DomainError

# No meaningful double-precision value nearer to an essential singularity.
ATOM_TOL = 1e-12


@dataclass(frozen=True)
class AtomicMeasure:
    """Point masses (angle, mass) on the unit circle; masses strictly positive."""

    atoms: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        atoms = tuple((float(t), float(c)) for t, c in self.atoms)
        for _, c in atoms:
            if c <= 0.0:
                raise DomainError("atom masses must be positive")
        for i in range(len(atoms)):
            for j in range(i + 1, len(atoms)):
                d = (atoms[i][0] - atoms[j][0]) % (2.0 * math.pi)
                if min(d, 2.0 * math.pi - d) < 1e-12:
                    raise DomainError("atom angles must be pairwise distinct mod 2 pi")
        object.__setattr__(self, "atoms", atoms)

    @property
    def count(self) -> int:
        return len(self.atoms)

    def total_mass(self) -> float:
        return sum(c for _, c in self.atoms)


def eval_singular(S: AtomicMeasure, z: complex, atom_tol: float = ATOM_TOL) -> complex:
    """exp(- sum c_j (e^{i t_j} + z)/(e^{i t_j} - z)); modulus in (0,1) for |z| < 1."""
    z = complex(z)
    acc = 0.0 + 0.0j
    for t, c in S.atoms:
        w = cmath.exp(1j * t)
        if abs(z - w) < atom_tol:
            raise AtomProximity(f"evaluation {abs(z - w):.2e} from the atom at angle {t}")
        acc += c * (w + z) / (w - z)
    return cmath.exp(-acc)


@dataclass(frozen=True)
class AtomicInnerFunction:
    """Product of a finite Blaschke part and an atomic singular part.

    The singular part never vanishes in the disc, so the zero set is exactly
    the Blaschke zero set.
    """

    blaschke_part: FiniteBlaschke
    singular_part: AtomicMeasure

    @property
    def blaschke_degree(self) -> int:
        return self.blaschke_part.degree

    @property
    def atom_count(self) -> int:
        return self.singular_part.count

    def __call__(self, z: complex) -> complex:
        return eval_atomic_inner(self, z)

    def to_json(self) -> str:
        return json.dumps(
            {
                "type": "atomic_inner",
                "phase": self.blaschke_part.phase,
                "zeros": [[a.real, a.imag] for a in self.blaschke_part.zeros],
                "atoms": list(map(list, self.singular_part.atoms)),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "AtomicInnerFunction":
        d = json.loads(text)
        if d.get("type") != "atomic_inner":
            raise DomainError("not an atomic_inner record")
        return cls(
            FiniteBlaschke(d["phase"], tuple(complex(x, y) for x, y in d["zeros"])),
            AtomicMeasure(tuple((t, c) for t, c in d["atoms"])),
        )


def eval_atomic_inner(g: AtomicInnerFunction, z: complex, atom_tol: float = ATOM_TOL) -> complex:
    return eval_finite(g.blaschke_part, z) * eval_singular(g.singular_part, z, atom_tol)


def frostman_transform(
    g: Callable[[complex], complex], zeta: complex, z: complex
) -> complex:
    """(g(z) - zeta)/(1 - conj(zeta) g(z)); the disc automorphism through zeta after g."""
    zeta = complex(zeta)
    if abs(zeta) >= 1.0:
        raise DomainError("frostman parameter must lie inside the unit disc")
    w = g(z)
    return (w - zeta) / (1.0 - zeta.conjugate() * w)


# --- canonical one-singularity families --------------------------------------


def exp_family_inner(sigma: float, c: float) -> AtomicInnerFunction:
    """e^{i sigma} exp(c (z-1)/(z+1)): degree 0, one atom of mass c at angle pi."""
    return AtomicInnerFunction(FiniteBlaschke(sigma, ()), AtomicMeasure(((math.pi, c),)))


def zexp_family_inner(sigma: float, c: float) -> AtomicInnerFunction:
    """e^{i sigma} z exp(c (z-1)/(z+1)): one zero at the origin, one atom at angle pi."""
    return AtomicInnerFunction(FiniteBlaschke(sigma, (0.0 + 0.0j,)), AtomicMeasure(((math.pi, c),)))


def power_exp_inner(sigma: float, c: float, q: int) -> AtomicInnerFunction:
    """Equal masses c at the q-th roots of unity behind a constant phase."""
    if q < 1:
        raise DomainError("q must be a positive integer")
    atoms = tuple((2.0 * math.pi * j / q, c) for j in range(1, q + 1))
    return AtomicInnerFunction(FiniteBlaschke(sigma, ()), AtomicMeasure(atoms))
