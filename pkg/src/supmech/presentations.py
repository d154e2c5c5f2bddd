"""Built-in presentations and the symbolic checks of Galilean structure.

The Galilei relations are entered as *commutators* and the expected Poisson
brackets are written out independently, so :func:`verify_pb_table` genuinely
tests the bracket convention ``{A, B} = (-i hbar)^-1 [A, B]`` rather than
reading back its own input.
"""

from __future__ import annotations

from itertools import combinations, permutations, product
from typing import Dict, List, Tuple

from .nc import (
    EVEN,
    ODD,
    AlgebraPresentation,
    Coefficient,
    Generator,
    NcPoly,
    loads_presentation,
    quantum_pb,
    substitute,
)
from .report import VerificationReport

AXES = (1, 2, 3)


def levi_civita(i: int, j: int, k: int) -> int:
    if len({i, j, k}) < 3:
        return 0
    return 1 if (i, j, k) in ((1, 2, 3), (2, 3, 1), (3, 1, 2)) else -1


def _eps_partner(i: int, j: int) -> Tuple[int, int]:
    """The index k and sign eps_ijk for i != j."""
    (k,) = set(AXES) - {i, j}
    return k, levi_civita(i, j, k)


def _cyclic_lines(a: str, b: str, c: str) -> List[str]:
    """``[a_i, b_j] = i hbar eps_ijk c_k`` for the three cyclic (i, j)."""
    out = []
    for i, j in ((1, 2), (2, 3), (3, 1)):
        k, _ = _eps_partner(i, j)
        out.append(f"[{a}{i}, {b}{j}] = i*hbar*{c}{k}")
        if a != b:
            out.append(f"[{a}{j}, {b}{i}] = -i*hbar*{c}{k}")
    return out


def galilei_text(central_mass: bool = False) -> str:
    lines = ["name galilei-central" if central_mass else "name galilei-extended", "params hbar m t s"]
    lines.append("even J1 J2 J3 K1 K2 K3 P1 P2 P3 H" + ("" if central_mass else " M"))
    lines += _cyclic_lines("J", "J", "J")
    lines += _cyclic_lines("J", "K", "K")
    lines += _cyclic_lines("J", "P", "P")
    for i in AXES:
        lines.append(f"[K{i}, H] = i*hbar*P{i}")
        lines.append(f"[K{i}, P{i}] = i*hbar*" + ("m" if central_mass else "M"))
    return "\n".join(lines)


def galilei_extended(central_mass: bool = False) -> AlgebraPresentation:
    """Eleven hamiltonians of the projective Galilei group (ten with ``M = mI``)."""
    return loads_presentation(galilei_text(central_mass))


def ccr_spin_text() -> str:
    lines = ["name ccr-spin", "params hbar m t s", "even X1 X2 X3 P1 P2 P3 S1 S2 S3"]
    lines += [f"[X{j}, P{j}] = i*hbar*I" for j in AXES]
    lines += _cyclic_lines("S", "S", "S")
    return "\n".join(lines)


def ccr_spin() -> AlgebraPresentation:
    """Position, momentum and spin of a nonrelativistic particle."""
    return loads_presentation(ccr_spin_text())


def grassmann(n: int) -> AlgebraPresentation:
    """Grassmann algebra on ``n`` odd hermitian generators ``th1 .. thn``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    gens = [Generator(f"th{k}", ODD) for k in range(1, n + 1)]
    return AlgebraPresentation(f"grassmann:{n}", gens, ("hbar",), {}, "zero")


def by_name(name: str) -> AlgebraPresentation:
    """Resolve ``galilei-extended``, ``galilei-central``, ``ccr-spin`` or ``grassmann:<n>``."""
    if name in ("galilei-extended", "galilei"):
        return galilei_extended()
    if name == "galilei-central":
        return galilei_extended(central_mass=True)
    if name == "ccr-spin":
        return ccr_spin()
    if name.startswith("grassmann:"):
        return grassmann(int(name.split(":", 1)[1]))
    raise KeyError(f"unknown presentation {name!r}")


# -- expected bracket table -----------------------------------------------------


def expected_pb(p: AlgebraPresentation, a: str, b: str) -> NcPoly:
    """Poisson bracket of two Galilei hamiltonians as tabulated (not computed)."""
    def vec_rule(x: str, y: str, z: str) -> NcPoly | None:
        # {x_i, y_j} = -eps_ijk z_k
        if a[0] == x and b[0] == y:
            i, j = int(a[1]), int(b[1])
            if i == j:
                return p.zero()
            k, s = _eps_partner(i, j)
            return p.gen(f"{z}{k}").scale(-s)
        return None

    for x, y, z in (("J", "J", "J"), ("J", "K", "K"), ("J", "P", "P")):
        r = vec_rule(x, y, z)
        if r is not None:
            return r
        if b[0] == x and a[0] == y:  # antisymmetry for the reversed order
            swapped = expected_pb(p, b, a)
            return -swapped
    if a[0] == "K" and b == "H":
        return -p.gen(f"P{a[1]}")
    if b[0] == "K" and a == "H":
        return p.gen(f"P{b[1]}")
    if a[0] == "K" and b[0] == "P":
        return -_mass(p) if a[1] == b[1] else p.zero()
    if a[0] == "P" and b[0] == "K":
        return _mass(p) if a[1] == b[1] else p.zero()
    return p.zero()


def _mass(p: AlgebraPresentation) -> NcPoly:
    return p.gen("M") if "M" in p.index else p.param("m")


def verify_pb_table(p: AlgebraPresentation | None = None) -> VerificationReport:
    """All unordered generator pairs: computed quantum PB minus tabulated PB."""
    p = p or galilei_extended()
    rep = VerificationReport("galilei-pb-table")
    names = [g.name for g in p.generators]
    for a, b in combinations(names, 2):
        residual = quantum_pb(p.gen(a), p.gen(b)) - expected_pb(p, a, b)
        rep.add_exact(f"pb[{a},{b}]", "galilei.pb", residual, group="pb-table")
    return rep


# -- Casimir invariants ------------------------------------------------------------


def boost_moment(p: AlgebraPresentation) -> Dict[int, NcPoly]:
    """``B_j = M J_j - eps_jkl K_k P_l``."""
    M = _mass(p)
    out = {}
    for j in AXES:
        b = M * p.gen(f"J{j}")
        for k, l in permutations(AXES, 2):
            e = levi_civita(j, k, l)
            if e:
                b = b - (p.gen(f"K{k}") * p.gen(f"P{l}")).scale(e)
        out[j] = b
    return out


def casimirs(p: AlgebraPresentation) -> Tuple[NcPoly, NcPoly]:
    M = _mass(p)
    P2 = sum((p.gen(f"P{j}") * p.gen(f"P{j}") for j in AXES), p.zero())
    C1 = (M * p.gen("H")).scale(2) - P2
    B = boost_moment(p)
    C2 = sum((B[j] * B[j] for j in AXES), p.zero())
    return C1, C2


def casimir_check(p: AlgebraPresentation | None = None) -> VerificationReport:
    p = p or galilei_extended()
    rep = VerificationReport("galilei-casimir")
    C1, C2 = casimirs(p)
    for g in p.generators:
        h = p.gen(g.name)
        rep.add_exact(f"pb[C1,{g.name}]", "galilei.casimir.c1", quantum_pb(C1, h), group="casimir")
        rep.add_exact(f"pb[C2,{g.name}]", "galilei.casimir.c2", quantum_pb(C2, h), group="casimir")
    B = boost_moment(p)
    for j, k in product(AXES, AXES):
        expected = p.zero()
        if j != k:
            l, s = _eps_partner(j, k)
            expected = B[l].scale(-s)
        rep.add_exact(f"pb[J{j},B{k}]", "galilei.casimir.b", quantum_pb(p.gen(f"J{j}"), B[k]) - expected, group="casimir-intermediate")
    for name in ("K", "P"):
        for j, k in product(AXES, AXES):
            rep.add_exact(f"pb[{name}{j},B{k}]", "galilei.casimir.b", quantum_pb(p.gen(f"{name}{j}"), B[k]), group="casimir-intermediate")
    for k in AXES:
        rep.add_exact(f"pb[H,B{k}]", "galilei.casimir.b", quantum_pb(p.gen("H"), B[k]), group="casimir-intermediate")
    return rep


# -- observables of an elementary system with M = mI ---------------------------------


def mass_to_unit(e: NcPoly, target: AlgebraPresentation) -> NcPoly:
    """Image of an element under ``M -> m I`` in the central-mass presentation."""
    return substitute(e, {"M": target.param("m")}, target)


def derived_elements(q: AlgebraPresentation) -> Dict[str, NcPoly]:
    """Position, spin, internal energy and free Hamiltonian built from hamiltonians."""
    inv_m = Coefficient.param("m", -1)
    X = {j: q.gen(f"K{j}").scale(inv_m) for j in AXES}
    P = {j: q.gen(f"P{j}") for j in AXES}
    out: Dict[str, NcPoly] = {}
    for j in AXES:
        out[f"X{j}"] = X[j]
    for i in AXES:
        xp = q.zero()
        for j, k in permutations(AXES, 2):
            e = levi_civita(i, j, k)
            if e:
                xp = xp + (X[j] * P[k]).scale(e)
        out[f"S{i}"] = q.gen(f"J{i}") - xp
    P2 = sum((P[j] * P[j] for j in AXES), q.zero())
    out["P2"] = P2
    out["Hfree"] = P2.scale(Coefficient.param("m", -1) / 2)
    out["U"] = q.gen("H") - out["Hfree"]
    return out


def derived_observables(value_of_M: str = "mI") -> VerificationReport:
    """Position, spin and internal energy after replacing ``M`` by ``m I``."""
    if value_of_M != "mI":
        raise ValueError("only the central value M = m I is supported")
    full = galilei_extended()
    q = galilei_extended(central_mass=True)
    d = derived_elements(q)
    X = {j: d[f"X{j}"] for j in AXES}
    S = {j: d[f"S{j}"] for j in AXES}
    P = {j: q.gen(f"P{j}") for j in AXES}
    J = {j: q.gen(f"J{j}") for j in AXES}
    rep = VerificationReport("galilei-derived")

    def eps_rhs(i, j, vec):
        if i == j:
            return q.zero()
        k, s = _eps_partner(i, j)
        return vec[k].scale(-s)

    for j, k in product(AXES, AXES):
        rep.add_exact(f"pb[X{j},X{k}]", "galilei.position", quantum_pb(X[j], X[k]), group="position")
        delta = q.unit() if j == k else q.zero()
        rep.add_exact(f"pb[P{j},X{k}]", "galilei.position", quantum_pb(P[j], X[k]) - delta, group="position")
        rep.add_exact(f"pb[J{j},X{k}]", "galilei.position", quantum_pb(J[j], X[k]) - eps_rhs(j, k, X), group="position")
    for i, j in product(AXES, AXES):
        rep.add_exact(f"pb[S{i},S{j}]", "galilei.spin", quantum_pb(S[i], S[j]) - eps_rhs(i, j, S), group="spin")
        rep.add_exact(f"pb[S{i},X{j}]", "galilei.spin", quantum_pb(S[i], X[j]), group="spin")
        rep.add_exact(f"pb[S{i},P{j}]", "galilei.spin", quantum_pb(S[i], P[j]), group="spin")
    C1, C2 = casimirs(full)
    C1q, C2q = mass_to_unit(C1, q), mass_to_unit(C2, q)
    S2 = sum((S[j] * S[j] for j in AXES), q.zero())
    rep.add_exact("C2-m^2*S^2", "galilei.c2_spin", C2q - S2.scale(Coefficient.param("m", 2)), group="casimir-spin")
    rep.add_exact("C1/2m-U", "galilei.internal_energy", C1q.scale(Coefficient.param("m", -1) / 2) - d["U"], group="casimir-spin")
    for j in AXES:
        rep.add_exact(f"pb[Hfree,P{j}]", "galilei.free_particle", quantum_pb(d["Hfree"], P[j]), group="free-particle")
        rep.add_exact(f"pb[Hfree,J{j}]", "galilei.free_particle", quantum_pb(d["Hfree"], J[j]), group="free-particle")
    return rep


def presentation_checks(p: AlgebraPresentation) -> VerificationReport:
    """Jacobi and star-closure checks for an arbitrary presentation."""
    rep = VerificationReport(f"presentation:{p.name}")
    bad = p.check_jacobi()
    rep.add_flag("jacobi", "kernel.jacobi", not bad, group="consistency", violations=bad)
    bad_star = p.check_star_closure()
    rep.add_flag("star-closure", "kernel.star", not bad_star, group="consistency", violations=bad_star)
    return rep
