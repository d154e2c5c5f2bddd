"""Berezin calculus on ``G_n`` and the compatible-completeness (CC) checker.

Expectations are ``phi(f) = coefficient of th^n ... th^1 in f rho``.  With the
kernel's normal order ``th1 th2 ... thn`` this is ``(-1)^(n(n-1)/2)`` times the
coefficient of ``th1 ... thn``, so ``rho = th^n ... th^1`` gives ``phi(1) = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Callable, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from .nc import ONE, AlgebraPresentation, Coefficient, NcPoly, star
from .presentations import grassmann


def _top_sign(n: int) -> int:
    return -1 if (n * (n - 1) // 2) % 2 else 1


def _rank(p: AlgebraPresentation) -> int:
    return len(p.generators)


@dataclass(frozen=True)
class GrassmannState:
    density: NcPoly

    @property
    def n(self) -> int:
        return _rank(self.density.pres)

    def __call__(self, f: NcPoly) -> complex:
        return berezin_expectation(f, self)


def top_monomial(p: AlgebraPresentation) -> NcPoly:
    """``th^n ... th^1``, the canonical normalized density."""
    out = p.unit()
    for g in reversed(p.gens()):
        out = out * g
    return out


def berezin_exact(f: NcPoly, rho: "GrassmannState | NcPoly") -> Coefficient:
    dens = rho.density if isinstance(rho, GrassmannState) else rho
    if f.pres is not dens.pres:
        if _rank(f.pres) != _rank(dens.pres):
            raise ValueError(f"mismatched Grassmann algebras: G_{_rank(f.pres)} vs G_{_rank(dens.pres)}")
        raise ValueError("f and rho live in different presentation objects")
    n = _rank(f.pres)
    c = (f * dens).coefficient(tuple(range(n)))
    return c * _top_sign(n)


def berezin_expectation(f: NcPoly, rho: "GrassmannState | NcPoly") -> complex:
    return berezin_exact(f, rho).evaluate({})


def monomials(p: AlgebraPresentation) -> List[NcPoly]:
    n = _rank(p)
    return [NcPoly(p, {w: ONE}) for k in range(n + 1) for w in combinations(range(n), k)]


@dataclass
class StateFamily:
    n: int
    states: List[GrassmannState]
    free_parameters: int
    forced_zero: List[str] = field(default_factory=list)

    @property
    def unique(self) -> bool:
        return self.free_parameters == 0 and len(self.states) == 1

    def is_pure(self) -> bool:
        """A singleton convex family has no nontrivial decomposition."""
        return self.unique


def _gauss_to_sympy(c: Coefficient):
    re, im = c.constant_value()
    return sympy.Rational(re.numerator, re.denominator) + sympy.I * sympy.Rational(im.numerator, im.denominator)


def enumerate_states(n: int) -> StateFamily:
    """All states on ``G_n`` by exact elimination.

    Unknowns are the real and imaginary parts of ``phi`` on the monomial basis.
    Hermiticity and normalization are linear.  Positivity enters through the
    Gram matrix ``phi(b_i^* b_j)``: a diagonal entry that vanishes identically
    forces its whole row to vanish, which is again linear.  This is iterated to
    a fixed point; any parameters left free are reported.
    """
    if not 0 <= n <= 4:
        raise ValueError("enumeration is supported for 0 <= n <= 4")
    p = grassmann(n)
    basis = monomials(p)
    d = len(basis)
    a = sympy.symbols(f"a0:{d}", real=True)
    b = sympy.symbols(f"b0:{d}", real=True)
    index = {next(iter(m.terms)): k for k, m in enumerate(basis)}

    def phi(f: NcPoly):
        return sum((_gauss_to_sympy(c) * (a[index[w]] + sympy.I * b[index[w]]) for w, c in f.items()), sympy.Integer(0))

    eqs = [a[0] - 1, b[0]]
    for k, m in enumerate(basis):
        herm = sympy.expand(phi(star(m)) - sympy.conjugate(a[k] + sympy.I * b[k]))
        eqs += [sympy.re(herm), sympy.im(herm)]
    stars = [star(m) for m in basis]
    gram = [[phi(stars[i] * basis[j]) for j in range(d)] for i in range(d)]
    unknowns = list(a) + list(b)
    sol = {}
    forced = set()
    while True:
        sol = sympy.solve([e for e in eqs if e != 0], unknowns, dict=True)
        if not sol:
            raise RuntimeError("linear constraints are inconsistent")
        sol = sol[0]
        changed = False
        for i in range(d):
            if i in forced:
                continue
            if sympy.simplify(gram[i][i].subs(sol)) == 0:
                forced.add(i)
                for j in range(d):
                    e = sympy.expand(gram[i][j])
                    eqs += [sympy.re(e), sympy.im(e)]
                changed = True
        if not changed:
            break
    values = [sympy.nsimplify((a[k] + sympy.I * b[k]).subs(sol)) for k in range(d)]
    free = set().union(*(sympy.sympify(v).free_symbols for v in values))
    states: List[GrassmannState] = []
    if not free:
        G = np.array([[complex(sympy.N(gram[i][j].subs(sol))) for j in range(d)] for i in range(d)])
        if np.linalg.eigvalsh((G + G.conj().T) / 2)[0] >= -1e-12:
            states.append(GrassmannState(_density_from_values(p, basis, values)))
    return StateFamily(n, states, len(free), [basis_label(basis[i]) for i in sorted(forced)])


def basis_label(m: NcPoly) -> str:
    (w,) = m.terms
    return "1" if not w else "th" + "".join(str(g + 1) for g in w)


def _density_from_values(p: AlgebraPresentation, basis: List[NcPoly], values) -> NcPoly:
    """Invert ``phi(th^S) = sign * coeff_top(th^S rho)``; only the complement of ``S`` contributes."""
    n = _rank(p)
    full = tuple(range(n))
    sign = _top_sign(n)
    terms = {}
    for k, m in enumerate(basis):
        (S,) = m.terms
        comp = tuple(g for g in full if g not in S)
        c = (m * NcPoly(p, {comp: ONE})).coefficient(full)
        v = sympy.nsimplify(values[k])
        re, im = sympy.re(v), sympy.im(v)
        val = Coefficient.const(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))
        if val:
            terms[comp] = val * c * sign  # c = +-1, its own inverse
    return NcPoly(p, terms)


# -- compatible completeness -----------------------------------------------------------


@dataclass
class CCResult:
    passed: bool
    condition: Optional[str] = None  # "observables" or "states"
    pair: Optional[Tuple[int, int]] = None
    values: Optional[Tuple[complex, complex]] = None

    def __bool__(self) -> bool:
        return self.passed


def cc_check(algebra: Any, observables: Sequence[Any], pure_states: Sequence[Any], tol: float = 1e-9) -> CCResult:
    """First pair violating compatible completeness, or a pass.

    Observables and states are either Grassmann elements with ``GrassmannState``
    (when ``algebra`` is a presentation) or hermitian matrices with state vectors.
    Distinct observables need a state giving different expectations; distinct
    rays need an observable giving different expectations.
    """
    if isinstance(algebra, AlgebraPresentation):
        expect = lambda A, s: berezin_expectation(A, s)
        same_obs = lambda A, B: A == B
        same_state = lambda s, t: s.density == t.density
    else:
        expect = lambda A, psi: complex(np.vdot(psi, A @ psi) / np.vdot(psi, psi))
        same_obs = lambda A, B: np.allclose(A, B, atol=tol)
        same_state = lambda s, t: abs(abs(np.vdot(s, t)) ** 2 / (np.vdot(s, s) * np.vdot(t, t)).real - 1) <= tol
    table = np.array([[expect(A, s) for s in pure_states] for A in observables], dtype=complex).reshape(
        len(observables), len(pure_states)
    )
    for i, j in combinations(range(len(observables)), 2):
        if same_obs(observables[i], observables[j]):
            continue
        if not np.any(np.abs(table[i] - table[j]) > tol):
            k = 0 if len(pure_states) else None
            vals = (table[i, k], table[j, k]) if k is not None else None
            return CCResult(False, "observables", (i, j), vals)
    for i, j in combinations(range(len(pure_states)), 2):
        if same_state(pure_states[i], pure_states[j]):
            continue
        if not np.any(np.abs(table[:, i] - table[:, j]) > tol):
            vals = (table[0, i], table[0, j]) if len(observables) else None
            return CCResult(False, "states", (i, j), vals)
    return CCResult(True)


def witness_observables(p: AlgebraPresentation, bs: Sequence[int] = (1, 2)) -> List[NcPoly]:
    """``1 + i b th1 th2``: even, hermitian, indistinguishable by the unique state."""
    t1, t2 = p.gen("th1"), p.gen("th2")
    return [p.unit() + (t1 * t2).scale(Coefficient.const(0, bb)) for bb in bs]


def hermitian_basis(n: int) -> List[np.ndarray]:
    """Real-linear basis of ``n x n`` hermitian matrices."""
    out = []
    for i in range(n):
        E = np.zeros((n, n), dtype=complex)
        E[i, i] = 1
        out.append(E)
    for i, j in combinations(range(n), 2):
        E = np.zeros((n, n), dtype=complex)
        E[i, j] = E[j, i] = 1
        out.append(E)
        F = np.zeros((n, n), dtype=complex)
        F[i, j], F[j, i] = -1j, 1j
        out.append(F)
    return out


def random_rays(n: int, count: int, rng: np.random.Generator) -> List[np.ndarray]:
    return [v / np.linalg.norm(v) for v in (rng.normal(size=(count, n)) + 1j * rng.normal(size=(count, n)))]


def separating_state(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Eigenvector of ``A - B`` for its largest-magnitude eigenvalue."""
    lam, V = np.linalg.eigh(A - B)
    return V[:, int(np.argmax(np.abs(lam)))]


def separating_observable(psi1: np.ndarray, psi2: np.ndarray) -> np.ndarray:
    """Projector onto ``psi1``: expectation 1 versus ``|(psi1, psi2)|^2 < 1``."""
    v = psi1 / np.linalg.norm(psi1)
    return np.outer(v, v.conj())


def random_element(p: AlgebraPresentation, rng: np.random.Generator, scale: int = 5) -> NcPoly:
    """Random element of ``G_n`` with small Gaussian-integer coefficients."""
    terms = {}
    for m in monomials(p):
        (w,) = m.terms
        re, im = rng.integers(-scale, scale + 1, size=2)
        if re or im:
            terms[w] = Coefficient.const(int(re), int(im))
    return NcPoly(p, terms)
