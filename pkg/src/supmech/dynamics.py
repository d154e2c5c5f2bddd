"""Heisenberg evolution and Noether invariants (exact), Schrödinger evolution,
localization and Weyl relations on a periodic one-dimensional grid."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .nc import Coefficient, NcPoly, quantum_pb
from .presentations import AXES, ccr_spin, levi_civita
from .report import VerificationReport

K_MAX = 64


class SeriesNotTerminating(RuntimeError):
    pass


# -- symbolic ------------------------------------------------------------------------


def _time_coefficient(t) -> Coefficient:
    if isinstance(t, str):
        return Coefficient.param(t)
    return Coefficient.coerce(Fraction(t) if not isinstance(t, Coefficient) else t)


def heisenberg_evolve(A: NcPoly, H: NcPoly, t: Union[str, int, Fraction, Coefficient] = "t", k_max: int = K_MAX) -> NcPoly:
    """``A(t) = sum_k t^k/k! {H, .}^k A``; the series must terminate by ``k_max``."""
    tc = _time_coefficient(t)
    total, term = A, A
    for k in range(1, k_max + 1):
        term = quantum_pb(H, term).scale(tc / k)
        if term.is_zero():
            return total
        total = total + term
    raise SeriesNotTerminating(f"{{H, .}}^k A still nonzero at k = {k_max}")


def heisenberg_residual(A_t: NcPoly, H: NcPoly, t: str = "t") -> NcPoly:
    """``dA/dt - {H, A(t)}``."""
    return A_t.diff_param(t) - quantum_pb(H, A_t)


def free_hamiltonian(p=None) -> NcPoly:
    p = p or ccr_spin()
    P2 = sum((p.gen(f"P{j}") * p.gen(f"P{j}") for j in AXES), p.zero())
    return P2.scale(Coefficient.param("m", -1) / 2)


def noether_invariants(p) -> Dict[str, Tuple[str, NcPoly]]:
    """Conserved quantities of the free particle keyed by name, with anchor keys."""
    X = {j: p.gen(f"X{j}") for j in AXES}
    P = {j: p.gen(f"P{j}") for j in AXES}
    m, t = Coefficient.param("m"), Coefficient.param("t")
    out: Dict[str, Tuple[str, NcPoly]] = {}
    for i in AXES:
        J = p.zero()
        for j, k in permutations(AXES, 2):
            e = levi_civita(i, j, k)
            if e:
                J = J + (X[j] * P[k]).scale(e)
        out[f"J{i}"] = ("dynamics.noether.J", J)
    for i in AXES:
        out[f"P{i}"] = ("dynamics.noether.P", P[i])
    for i in AXES:
        out[f"mX{i}-P{i}t"] = ("dynamics.noether.K", X[i].scale(m) - P[i].scale(t))
    out["-H"] = ("dynamics.noether.H", -free_hamiltonian(p))
    out["M"] = ("dynamics.noether.M", p.scalar(m))
    return out


def noether_check(H: Optional[NcPoly] = None) -> VerificationReport:
    """``dG/dt + {H, G} = 0`` for every free-particle invariant ``G``."""
    p = H.pres if H is not None else ccr_spin()
    H = H if H is not None else free_hamiltonian(p)
    rep = VerificationReport("noether")
    for name, (key, G) in noether_invariants(p).items():
        rep.add_exact(name, key, G.diff_param("t") + quantum_pb(H, G), group="noether")
    return rep


# -- grid ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PhaseGrid:
    """Periodic grid ``x_k = -L/2 + (k + 1/2) dx`` and its conjugate momenta."""

    L: float
    N: int
    hbar: float = 1.0

    def __post_init__(self):
        if self.N < 2 or self.N & (self.N - 1):
            raise ValueError("N must be a power of two")
        if not self.L > 0 or not self.hbar > 0:
            raise ValueError("L and hbar must be positive")

    @property
    def dx(self) -> float:
        return self.L / self.N

    @property
    def dp(self) -> float:
        return 2 * np.pi * self.hbar / self.L

    @property
    def x(self) -> np.ndarray:
        return -self.L / 2 + (np.arange(self.N) + 0.5) * self.dx

    @property
    def k(self) -> np.ndarray:
        """Angular wavenumbers in FFT order."""
        return 2 * np.pi * np.fft.fftfreq(self.N, self.dx)

    @property
    def p_fft(self) -> np.ndarray:
        return self.hbar * self.k

    @property
    def p(self) -> np.ndarray:
        """Momenta ``(j - N/2) dp`` in increasing order."""
        return (np.arange(self.N) - self.N // 2) * self.dp

    def edge_index(self, edge: float) -> int:
        """Index of a cell boundary; raises if ``edge`` is not on one."""
        r = (edge + self.L / 2) / self.dx
        k = int(round(r))
        if abs(r - k) > 1e-9 or not 0 <= k <= self.N:
            raise ValueError(f"{edge} is not a cell boundary of the grid")
        return k

    def shift_cells(self, a: float) -> int:
        r = a / self.dx
        k = int(round(r))
        if abs(r - k) > 1e-9:
            raise ValueError(f"translation {a} is not a whole number of cells")
        return k


@dataclass(frozen=True, eq=False)
class WaveField:
    grid: PhaseGrid
    psi: np.ndarray

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.psi) ** 2) * self.grid.dx))

    def normalized(self) -> "WaveField":
        return WaveField(self.grid, self.psi / self.norm())

    def density(self) -> np.ndarray:
        return np.abs(self.psi) ** 2

    def boundary_mass(self, cells: Optional[int] = None) -> float:
        """Probability in the outermost cells, a periodic-wraparound indicator."""
        c = cells or max(1, self.grid.N // 32)
        rho = self.density() * self.grid.dx
        return float(rho[:c].sum() + rho[-c:].sum())

    def mean_x(self) -> float:
        return float(np.sum(self.grid.x * self.density()) * self.grid.dx)

    def var_x(self) -> float:
        mu = self.mean_x()
        return float(np.sum((self.grid.x - mu) ** 2 * self.density()) * self.grid.dx)

    def overlap(self, other: "WaveField") -> complex:
        return complex(np.vdot(self.psi, other.psi) * self.grid.dx)

    def to_csv(self, path) -> None:
        data = np.column_stack([self.grid.x, self.psi.real, self.psi.imag])
        np.savetxt(path, data, delimiter=",", header="x,re_psi,im_psi", comments="", fmt="%.17g")


def gaussian(grid: PhaseGrid, x0: float = 0.0, sigma: float = 1.0, p0: float = 0.0) -> WaveField:
    """Gaussian packet with position spread ``sigma`` and mean momentum ``p0``."""
    x = grid.x
    psi = np.exp(-((x - x0) ** 2) / (4 * sigma**2) + 1j * p0 * x / grid.hbar)
    return WaveField(grid, psi.astype(complex)).normalized()


def coherent_state(grid: PhaseGrid, m: float, omega: float, x0: float, p0: float = 0.0) -> WaveField:
    return gaussian(grid, x0, np.sqrt(grid.hbar / (2 * m * omega)), p0)


def _kinetic_phase(grid: PhaseGrid, m: float, dt: float) -> np.ndarray:
    return np.exp(-1j * grid.hbar * grid.k**2 * dt / (2 * m))


def schrodinger_evolve(psi: WaveField, V: np.ndarray, t: float, steps: int, m: float = 1.0) -> WaveField:
    """Strang split-step: half potential kick, exact free drift, half kick."""
    if not t >= 0 or steps < 1:
        raise ValueError("need t >= 0 and steps >= 1")
    g = psi.grid
    V = np.asarray(V, dtype=float) if np.ndim(V) else np.full(g.N, float(V))
    if V.shape != (g.N,):
        raise ValueError("potential has the wrong number of samples")
    dt = t / steps
    half = np.exp(-1j * V * dt / (2 * g.hbar))
    kin = _kinetic_phase(g, m, dt)
    y = psi.psi.astype(complex)
    for step in range(steps):
        y = half * np.fft.ifft(kin * np.fft.fft(half * y))
        if not np.all(np.isfinite(y)):
            raise FloatingPointError(f"non-finite amplitude after step {step + 1} of {steps} (dt = {dt:g})")
    return WaveField(g, y)


def energy(psi: WaveField, V: np.ndarray, m: float = 1.0) -> float:
    g = psi.grid
    phi = np.fft.fft(psi.psi)
    kinetic = np.sum((g.hbar * g.k) ** 2 / (2 * m) * np.abs(phi) ** 2) / np.sum(np.abs(phi) ** 2)
    potential = np.sum(V * psi.density()) / np.sum(psi.density())
    return float(kinetic + potential)


def free_width_squared(sigma0: float, t: float, m: float = 1.0, hbar: float = 1.0) -> float:
    return sigma0**2 * (1 + (hbar * t / (2 * m * sigma0**2)) ** 2)


def richardson_order(psi: WaveField, V: np.ndarray, t: float, steps: int, m: float = 1.0) -> float:
    """Observed order ``log2(|u_n - u_2n| / |u_2n - u_4n|)``."""
    u = [schrodinger_evolve(psi, V, t, s, m).psi for s in (steps, 2 * steps, 4 * steps)]
    e1 = np.linalg.norm(u[0] - u[1])
    e2 = np.linalg.norm(u[1] - u[2])
    return float(np.log2(e1 / e2))


# -- localization -------------------------------------------------------------------

Region = Union[None, Tuple[float, float], Sequence[Tuple[float, float]], np.ndarray]


class PobvmGrid:
    """Position measure ``D -> P(D)``, diagonal 0/1 projections on grid cells.

    A region is ``None`` (empty), an interval ``(a, b)`` of cell boundaries, a
    list of such intervals, a boolean mask, or the string ``"all"``.
    """

    def __init__(self, grid: PhaseGrid):
        self.grid = grid

    def mask(self, D) -> np.ndarray:
        g = self.grid
        if D is None:
            return np.zeros(g.N, dtype=bool)
        if isinstance(D, str):
            if D == "all":
                return np.ones(g.N, dtype=bool)
            raise ValueError(f"unknown region {D!r}")
        arr = np.asarray(D)
        if arr.dtype == bool:
            if arr.shape != (g.N,):
                raise ValueError("mask has the wrong length")
            return arr.copy()
        if arr.ndim == 1 and arr.shape == (2,):
            arr = arr[None, :]
        out = np.zeros(g.N, dtype=bool)
        for a, b in arr:
            ia, ib = g.edge_index(float(a)), g.edge_index(float(b))
            out[ia:ib] = True
        return out

    def projection(self, D) -> np.ndarray:
        """Diagonal of ``P(D)``."""
        return self.mask(D).astype(float)

    def measure_exact(self, psi: WaveField, D) -> Fraction:
        """Exact rational sum of the cell weights ``|psi_k|^2 dx`` in ``D``."""
        w = psi.density() * self.grid.dx
        return sum((Fraction(float(v)) for v in w[self.mask(D)]), Fraction(0))

    def probability(self, psi: WaveField, D) -> float:
        return float(self.measure_exact(psi, D))


def translate(psi: WaveField, a: float) -> WaveField:
    """``[U(a) psi](x) = psi(x - a)``: exact roll for whole cells, spectral otherwise."""
    g = psi.grid
    r = a / g.dx
    if abs(r - round(r)) <= 1e-9:
        return WaveField(g, np.roll(psi.psi, int(round(r))))
    return WaveField(g, np.fft.ifft(np.exp(-1j * g.k * a) * np.fft.fft(psi.psi)))


def boost_phase(psi: WaveField, b: float) -> WaveField:
    """``[V(b) psi](x) = exp(-i b x) psi(x)``."""
    return WaveField(psi.grid, np.exp(-1j * b * psi.grid.x) * psi.psi)


def localization_check(grid: PhaseGrid, psi: WaveField, shifts: Iterable[int] = (1, 5, -7), seed: int = 0) -> VerificationReport:
    rep = VerificationReport("localize")
    pov = PobvmGrid(grid)
    rep.add_exact("P(empty)=0", "dynamics.localization", pov.measure_exact(psi, None), group="pobvm")
    total = pov.measure_exact(psi, "all")
    rep.add_numeric("P(all)=1", "dynamics.localization", abs(float(total) - 1.0), 1e-12, group="pobvm")
    rep.add_exact("P(all)=I", "dynamics.localization", int(not np.all(pov.projection("all") == 1)), group="pobvm")
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, 4, size=grid.N)
    parts = [labels == c for c in range(4)]
    lhs = pov.measure_exact(psi, np.any(parts[:3], axis=0))
    rhs = sum(pov.measure_exact(psi, m) for m in parts[:3])
    rep.add_exact("additivity", "dynamics.pobvm.additivity", lhs - rhs, group="pobvm")
    D = parts[0]
    for k in shifts:
        a = k * grid.dx
        UPU = np.roll(pov.projection(D), k)  # U(a) P(D) U(a)^-1 for a diagonal P
        rep.add_exact(f"covariance[{k}]", "dynamics.pobvm.covariance", int(not np.array_equal(UPU, pov.projection(np.roll(D, k)))), group="covariance")
        moved = pov.probability(translate(psi, a), np.roll(D, k))
        rep.add_numeric(f"prob-identity[{k}]", "dynamics.pobvm.covariance", abs(moved - pov.probability(psi, D)), 1e-12, group="covariance")
    rep.results["boundary_mass"] = psi.boundary_mass()
    return rep


def weyl_relations_check(grid: PhaseGrid, a: float, b: float, psi: Optional[WaveField] = None, tol: float = 1e-10) -> VerificationReport:
    """Weyl form of the canonical relations on a compactly supported state (hbar = 1)."""
    if psi is None:
        x = grid.x
        bump = np.where(np.abs(x) < grid.L / 8, np.cos(np.pi * x / (grid.L / 4)) ** 2, 0.0)
        psi = WaveField(grid, (bump * np.exp(0.3j * x)).astype(complex)).normalized()
    grid.shift_cells(a)
    rep = VerificationReport("weyl-check")
    U = lambda s, f: translate(f, s)
    V = lambda s, f: boost_phase(f, s)
    diff = lambda f, h: float(np.max(np.abs(f.psi - h.psi)))
    rep.add_numeric("U(a)U(a)=U(2a)", "dynamics.weyl.U", diff(U(a, U(a, psi)), U(2 * a, psi)), tol, group="weyl")
    rep.add_numeric("V(b)V(b/2)=V(3b/2)", "dynamics.weyl.V", diff(V(b, V(b / 2, psi)), V(1.5 * b, psi)), tol, group="weyl")
    lhs = U(a, V(b, psi))
    rhs = V(b, U(a, psi))
    rep.add_numeric("U(a)V(b)=e^{iab}V(b)U(a)", "dynamics.weyl.UV", diff(lhs, WaveField(grid, np.exp(1j * a * b) * rhs.psi)), tol, group="weyl")
    rep.add_numeric("U(a)U(-a)=I", "dynamics.weyl.inverse", diff(U(a, U(-a, psi)), psi), tol, group="weyl")
    rep.results["boundary_mass"] = psi.boundary_mass()
    return rep


def generator_errors(psi: WaveField, eps: Sequence[float]) -> List[float]:
    """``max |(U(e) psi - psi)/e + (i/hbar) P psi|`` for each ``e``."""
    g = psi.grid
    Ppsi = np.fft.ifft(g.hbar * g.k * np.fft.fft(psi.psi))
    target = -1j / g.hbar * Ppsi
    return [float(np.max(np.abs((translate(psi, e).psi - psi.psi) / e - target))) for e in eps]


def fitted_rate(h: Sequence[float], err: Sequence[float]) -> float:
    """Least-squares slope of ``log err`` against ``log h``."""
    return float(np.polyfit(np.log(h), np.log(err), 1)[0])
