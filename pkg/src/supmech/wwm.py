"""Weyl symbols, Wigner functions and the Moyal star product on a phase-space grid.

Operators are ``N x N`` matrices acting on grid samples, so a continuum kernel
``K(x, x')`` corresponds to the matrix ``K(x_a, x_b) dx``.  The Weyl symbol

    A_W(x, p) = sum_s exp(-i p s dx / hbar) K(x + s dx/2, x - s dx/2)

is read off the matrix diagonals ``a - b = s``.  For even ``s`` the midpoint is a
grid node; for odd ``s`` it is a half cell away and the diagonal is moved onto the
nodes by a spectral half-cell shift.  Every step is invertible, so
:func:`weyl_quantize` is the exact inverse of :func:`weyl_symbol`.

Wigner fields use ``W~ = W / (2 pi hbar)`` so that ``sum W~ dx dp = 1`` and
``(psi, A psi) = sum A_W W~ dx dp``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, factorial
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np
from numpy.polynomial import Polynomial

from .dynamics import PhaseGrid, WaveField
from .report import VerificationReport

MAX_ORDER = 8
MAX_QUADRATURE_N = 256


# -- fields --------------------------------------------------------------------------


@dataclass(eq=False)
class SymbolField:
    """Samples ``f(x_j, p_k)``; rows index position, columns momentum."""

    grid: PhaseGrid
    values: np.ndarray

    def _other(self, o):
        if isinstance(o, SymbolField):
            if o.grid != self.grid:
                raise ValueError("symbols live on different grids")
            return o.values
        return o

    def __add__(self, o):
        return SymbolField(self.grid, self.values + self._other(o))

    __radd__ = __add__

    def __sub__(self, o):
        return SymbolField(self.grid, self.values - self._other(o))

    def __rsub__(self, o):
        return SymbolField(self.grid, self._other(o) - self.values)

    def __mul__(self, o):
        """Pointwise product (the star product is :func:`star_product`)."""
        return SymbolField(self.grid, self.values * self._other(o))

    __rmul__ = __mul__

    def __neg__(self):
        return SymbolField(self.grid, -self.values)

    def __truediv__(self, c):
        return SymbolField(self.grid, self.values / c)


def phase_mesh(grid: PhaseGrid):
    return np.meshgrid(grid.x, grid.p, indexing="ij")


def symbol(grid: PhaseGrid, fn: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> SymbolField:
    X, P = phase_mesh(grid)
    return SymbolField(grid, np.asarray(fn(X, P), dtype=complex) * np.ones_like(X, dtype=complex))


@dataclass(eq=False)
class WignerField:
    grid: PhaseGrid
    values: np.ndarray  # real
    imag_residual: float = 0.0

    def mass(self) -> float:
        g = self.grid
        return float(self.values.sum() * g.dx * g.dp)

    def marginal_x(self) -> np.ndarray:
        return self.values.sum(axis=1) * self.grid.dp

    def marginal_p(self) -> np.ndarray:
        return self.values.sum(axis=0) * self.grid.dx

    def purity(self) -> float:
        """``2 pi hbar sum W~^2 dx dp``: one for pure states, below one otherwise."""
        g = self.grid
        return float(2 * np.pi * g.hbar * np.sum(self.values**2) * g.dx * g.dp)

    def expectation(self, A: Union[SymbolField, np.ndarray]) -> complex:
        vals = A.values if isinstance(A, SymbolField) else A
        g = self.grid
        return complex(np.sum(vals * self.values) * g.dx * g.dp)

    def to_csv(self, path) -> None:
        X, P = phase_mesh(self.grid)
        data = np.column_stack([X.ravel(), P.ravel(), self.values.ravel()])
        np.savetxt(path, data, delimiter=",", header="x,p,w", comments="", fmt="%.17g")


# -- Weyl transform ------------------------------------------------------------------


def _offsets(N: int) -> np.ndarray:
    return np.arange(-N // 2, N // 2)


def _half_shift(rows: np.ndarray, direction: int) -> np.ndarray:
    """Resample at ``y - direction * dx/2`` (spectral) along the last axis."""
    N = rows.shape[-1]
    phase = np.exp(-1j * np.pi * np.fft.fftfreq(N) * direction)
    return np.fft.ifft(np.fft.fft(rows, axis=-1) * phase, axis=-1)


def _diagonal_indices(N: int):
    """Row/column index arrays ``(a[s, m], b[s, m])`` with ``a - b = s`` (mod N)."""
    s = _offsets(N)[:, None]
    m = np.arange(N)[None, :]
    even = (s % 2 == 0)
    a = np.where(even, m + s // 2, m + (s + 1) // 2) % N
    b = np.where(even, m - s // 2, m - (s - 1) // 2) % N
    return a, b, even[:, 0]


def weyl_symbol(K: np.ndarray, grid: PhaseGrid) -> SymbolField:
    """Weyl symbol of the operator with grid matrix ``K``."""
    N = grid.N
    K = np.asarray(K, dtype=complex)
    if K.shape != (N, N):
        raise ValueError("kernel shape does not match the grid")
    a, b, even = _diagonal_indices(N)
    D = K[a, b]
    D[~even] = _half_shift(D[~even], +1)
    # A[j, q] = sum_s exp(-2 pi i (q - N/2) s / N) D[s, j]
    Dm = np.fft.ifftshift(D, axes=0)  # row index = s mod N
    F = np.fft.fft(Dm, axis=0)
    return SymbolField(grid, np.fft.fftshift(F, axes=0).T)


def weyl_quantize(f: Union[SymbolField, np.ndarray], grid: Optional[PhaseGrid] = None) -> np.ndarray:
    """Grid matrix whose Weyl symbol is ``f`` (exact inverse of :func:`weyl_symbol`)."""
    if isinstance(f, SymbolField):
        grid, vals = f.grid, f.values
    else:
        vals = np.asarray(f)
    N = grid.N
    Dm = np.fft.ifft(np.fft.ifftshift(vals.T, axes=0), axis=0)
    D = np.fft.fftshift(Dm, axes=0)
    a, b, even = _diagonal_indices(N)
    D = D.copy()
    D[~even] = _half_shift(D[~even], -1)
    K = np.zeros((N, N), dtype=complex)
    K[a, b] = D
    return K


def position_operator(grid: PhaseGrid) -> np.ndarray:
    return np.diag(grid.x).astype(complex)


def momentum_operator(grid: PhaseGrid) -> np.ndarray:
    """``-i hbar d/dx`` as a spectral matrix (Nyquist mode at ``-N/2 dp``)."""
    N = grid.N
    F = np.fft.fft(np.eye(N), axis=0)
    return np.fft.ifft(grid.p_fft[:, None] * F, axis=0)


def harmonic_operator(grid: PhaseGrid, m: float = 1.0, omega: float = 1.0) -> np.ndarray:
    P = momentum_operator(grid)
    return P @ P / (2 * m) + np.diag(0.5 * m * omega**2 * grid.x**2)


def wigner(psi: WaveField) -> WignerField:
    g = psi.grid
    rho = np.outer(psi.psi, psi.psi.conj()) * g.dx
    return wigner_density(rho, g)


def wigner_density(rho: np.ndarray, grid: PhaseGrid) -> WignerField:
    """Wigner field of a density matrix on the grid (trace one)."""
    A = weyl_symbol(rho, grid).values / (2 * np.pi * grid.hbar)
    return WignerField(grid, A.real.copy(), float(np.max(np.abs(A.imag))))


def expectation(psi: WaveField, K: np.ndarray) -> complex:
    return complex(np.vdot(psi.psi, K @ psi.psi) * psi.grid.dx)


# -- derivatives ---------------------------------------------------------------------


def fornberg_weights(z: float, x: np.ndarray, m: int) -> np.ndarray:
    """Finite-difference weights ``c[k, j]`` for the ``k``-th derivative at ``z``."""
    n = len(x)
    c = np.zeros((m + 1, n))
    c1, c4 = 1.0, x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2, c5, c4 = 1.0, c4, x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[k, i] = c1 * (k * c[k - 1, i - 1] - c5 * c[k, i - 1]) / c2
                c[0, i] = -c1 * c5 * c[0, i - 1] / c2
            for k in range(mn, 0, -1):
                c[k, j] = (c4 * c[k, j] - k * c[k - 1, j]) / c3
            c[0, j] = c4 * c[0, j] / c3
        c1 = c2
    return c


@lru_cache(maxsize=64)
def _fd_matrix(N: int, h: float, order: int, width: int = 9) -> np.ndarray:
    """Dense ``width``-point FD matrix; windows slide inward at the edges."""
    D = np.zeros((N, N))
    for i in range(N):
        s = min(max(i - width // 2, 0), N - width)
        nodes = (np.arange(s, s + width) - i) * h
        D[i, s : s + width] = fornberg_weights(0.0, nodes, order)[order]
    return D


def _spectral(f: np.ndarray, axis: int, h: float, order: int) -> np.ndarray:
    N = f.shape[axis]
    k = 2 * np.pi * np.fft.fftfreq(N, h)
    mult = (1j * k) ** order
    if order % 2:
        mult[N // 2] = 0
    shape = [1, 1]
    shape[axis] = N
    return np.fft.ifft(np.fft.fft(f, axis=axis) * mult.reshape(shape), axis=axis)


def derivative(f: np.ndarray, grid: PhaseGrid, nx: int, np_: int, method: str = "fd") -> np.ndarray:
    """``d^nx/dx^nx d^np/dp^np f`` on the phase grid."""
    out = np.asarray(f, dtype=complex)
    if method == "fd":
        if nx:
            out = _fd_matrix(grid.N, grid.dx, nx) @ out
        if np_:
            out = out @ _fd_matrix(grid.N, grid.dp, np_).T
        return out
    if method == "spectral":
        if nx:
            out = _spectral(out, 0, grid.dx, nx)
        if np_:
            out = _spectral(out, 1, grid.dp, np_)
        return out
    raise ValueError(f"unknown derivative method {method!r}")


# -- star product --------------------------------------------------------------------


def classical_bracket(f: SymbolField, g: SymbolField, method: str = "fd") -> SymbolField:
    """``{f, g}_cl = f_p g_x - f_x g_p`` (so that ``{p, x}_cl = 1``)."""
    G = f.grid
    fp, fx = derivative(f.values, G, 0, 1, method), derivative(f.values, G, 1, 0, method)
    gp, gx = derivative(g.values, G, 0, 1, method), derivative(g.values, G, 1, 0, method)
    return SymbolField(G, fp * gx - fx * gp)


def _star_series(f: SymbolField, g: SymbolField, hbar: float, order: int, method: str) -> SymbolField:
    G = f.grid
    cache: Dict[tuple, np.ndarray] = {}

    def d(which, vals, a, b):
        key = (which, a, b)
        if key not in cache:
            cache[key] = derivative(vals, G, a, b, method)
        return cache[key]

    out = f.values * g.values
    for n in range(1, order + 1):
        term = np.zeros_like(out)
        for k in range(n + 1):
            term += comb(n, k) * (-1) ** k * d("f", f.values, n - k, k) * d("g", g.values, k, n - k)
        out = out + (1j * hbar / 2) ** n / factorial(n) * term
    return SymbolField(G, out)


def star_product(f: SymbolField, g: SymbolField, hbar: Optional[float] = None, method: str = "series", order: int = 4, deriv: str = "fd") -> SymbolField:
    """Moyal product ``f * g`` with ``x * p = xp + i hbar/2``.

    ``series`` truncates the bidifferential expansion after ``order`` terms and
    is exact for polynomials of total degree up to ``order``.  ``quadrature``
    composes the quantized operators on the grid and transforms back; it needs
    ``hbar`` equal to the grid's and serves as the oracle.
    """
    if f.grid != g.grid:
        raise ValueError("symbols live on different grids")
    hbar = f.grid.hbar if hbar is None else hbar
    if method == "series":
        if not 0 <= order <= MAX_ORDER:
            raise ValueError(f"series order must lie in 0..{MAX_ORDER}")
        return _star_series(f, g, hbar, order, deriv)
    if method == "quadrature":
        if abs(hbar - f.grid.hbar) > 1e-15 * max(1.0, hbar):
            raise ValueError("quadrature star product uses the grid's hbar")
        if f.grid.N > MAX_QUADRATURE_N:
            raise ValueError(f"quadrature star product limited to N <= {MAX_QUADRATURE_N}")
        return weyl_symbol(weyl_quantize(f) @ weyl_quantize(g), f.grid)
    raise ValueError(f"unknown star-product method {method!r}")


def moyal_bracket(f: SymbolField, g: SymbolField, hbar: Optional[float] = None, **kw) -> SymbolField:
    """``{f, g}_M = (-i hbar)^-1 (f * g - g * f)``."""
    hbar = f.grid.hbar if hbar is None else hbar
    return (star_product(f, g, hbar, **kw) - star_product(g, f, hbar, **kw)) / (-1j * hbar)


def interior(grid: PhaseGrid) -> tuple:
    """Index window away from the periodic seams and the Nyquist momentum column."""
    N = grid.N
    return slice(N // 4, 3 * N // 4 + 1), slice(max(1, N // 4), 3 * N // 4 + 1)


PLANE_WAVE_MODES = ((1, 1), (1, -1), (2, 1), (1, 3), (3, -2))


def calibration_residual(grid: PhaseGrid, method: str = "series", **kw) -> float:
    """Relative deviation of the star commutator of ``x`` and ``p`` from ``i hbar``.

    The series evaluator checks ``x*p - p*x = i hbar`` on the interior window.
    Polynomials are not periodic on the grid, so the quadrature evaluator checks
    the exponentiated form ``e^{iax} * e^{ibp} = e^{-i hbar ab/2} e^{i(ax+bp)}``
    for lattice plane waves and reads ``hbar`` (with its sign) off the phase.
    """
    if method == "series":
        x = symbol(grid, lambda X, P: X)
        p = symbol(grid, lambda X, P: P)
        c = star_product(x, p, method=method, **kw) - star_product(p, x, method=method, **kw)
        r = c.values - 1j * grid.hbar
        return float(np.max(np.abs(r[interior(grid)])) / grid.hbar)
    if method != "quadrature":
        raise ValueError(f"unknown star-product method {method!r}")
    worst = 0.0
    X, P = phase_mesh(grid)
    for k, l in PLANE_WAVE_MODES:
        a = 2 * np.pi * k / grid.L
        b = 2 * np.pi * l / (grid.N * grid.dp)
        ea = SymbolField(grid, np.exp(1j * a * X))
        eb = SymbolField(grid, np.exp(1j * b * P))
        ratio = star_product(ea, eb, method="quadrature").values / np.exp(1j * (a * X + b * P))
        hbar_est = -2 * np.angle(ratio) / (a * b)
        worst = max(worst, float(np.max(np.abs(hbar_est - grid.hbar)) / grid.hbar), float(np.max(np.abs(np.abs(ratio) - 1))))
    return worst


@dataclass
class ScalingFit:
    hbars: List[float]
    remainders: List[float]
    slope: float
    intercept: float
    residuals: List[float]
    excluded: List[float] = field(default_factory=list)
    quadrature_gap: Optional[float] = None


def fit_loglog(h: Sequence[float], r: Sequence[float]):
    lh, lr = np.log(np.asarray(h)), np.log(np.asarray(r))
    slope, intercept = np.polyfit(lh, lr, 1)
    return float(slope), float(intercept), (lr - (slope * lh + intercept)).tolist()


def semiclassical_remainder(f: SymbolField, g: SymbolField, hbar: float, order: int = 4, deriv: str = "fd") -> SymbolField:
    fg = star_product(f, g, hbar, order=order, deriv=deriv)
    return fg - f * g + (1j * hbar / 2) * classical_bracket(f, g, deriv)


def semiclassical_scaling(f: SymbolField, g: SymbolField, hbars: Sequence[float], order: int = 4, deriv: str = "fd", floor: float = 1e-13) -> ScalingFit:
    """Sup norm of ``f*g - fg + (i hbar/2){f,g}_cl`` across ``hbars`` and its log-log slope."""
    hbars = list(hbars)
    if len(hbars) < 4:
        raise ValueError("need at least four hbar values")
    scale = float(np.max(np.abs(f.values * g.values))) or 1.0
    kept_h, kept_r, excluded = [], [], []
    all_r = []
    for h in hbars:
        R = float(np.max(np.abs(semiclassical_remainder(f, g, h, order, deriv).values)))
        all_r.append(R)
        if R <= floor * scale:
            excluded.append(h)
        else:
            kept_h.append(h)
            kept_r.append(R)
    if len(kept_h) < 2:
        raise ValueError("remainders at floating-point floor; nothing to fit")
    slope, intercept, res = fit_loglog(kept_h, kept_r)
    fit = ScalingFit(hbars, all_r, slope, intercept, res, excluded)
    top = max(hbars)
    if abs(top - f.grid.hbar) <= 1e-15 * top and f.grid.N <= MAX_QUADRATURE_N:
        s = star_product(f, g, top, order=order, deriv=deriv).values
        q = star_product(f, g, top, method="quadrature").values
        fit.quadrature_gap = float(np.max(np.abs(s - q)))
    return fit


# -- classical limit -----------------------------------------------------------------


def _as_poly(V) -> Polynomial:
    if isinstance(V, Polynomial):
        return V
    return Polynomial(np.asarray(V, dtype=float))


def moyal_rhs(W: np.ndarray, grid: PhaseGrid, V: Polynomial, m: float, hbar: float) -> np.ndarray:
    """``{W, H}_M`` for ``H = p^2/2m + V(x)`` with polynomial ``V``."""
    x, p = grid.x, grid.p
    out = -(p[None, :] / m) * _spectral(W, 0, grid.dx, 1).real
    Vd = V
    for n in range(1, V.degree() + 1):
        Vd = Vd.deriv()
        if n % 2 == 0:
            continue
        vals = Vd(x)
        if not np.any(vals):
            continue
        c = (-1) ** ((n - 1) // 2) * (hbar / 2) ** (n - 1) / factorial(n)
        out = out + c * vals[:, None] * _spectral(W, 1, grid.dp, n).real
    return out


def _stiffness(grid: PhaseGrid, V: Polynomial, m: float, hbar: float) -> float:
    kx, kp = np.pi / grid.dx, np.pi / grid.dp
    lam = np.max(np.abs(grid.p)) / m * kx
    Vd = V
    for n in range(1, V.degree() + 1):
        Vd = Vd.deriv()
        if n % 2:
            c = (hbar / 2) ** (n - 1) / factorial(n)
            lam += c * np.max(np.abs(Vd(grid.x))) * kp**n
    return float(lam)


def _rk4(W, rhs, dt, steps):
    for _ in range(steps):
        k1 = rhs(W)
        k2 = rhs(W + 0.5 * dt * k1)
        k3 = rhs(W + 0.5 * dt * k2)
        k4 = rhs(W + dt * k3)
        W = W + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return W


class CFLError(RuntimeError):
    pass


_YOSHIDA = (1 / (2 - 2 ** (1 / 3)), -(2 ** (1 / 3)) / (2 - 2 ** (1 / 3)), 1 / (2 - 2 ** (1 / 3)))


def _split_evolve(W0: np.ndarray, grid: PhaseGrid, V: Polynomial, t: float, m: float, hbar: float, dt: float):
    """Fourth-order composition of Strang steps with exact Fourier substeps.

    The drift ``-(p/m) d_x`` has constant coefficients along each column and the
    force terms ``c_n V^(n)(x) d_p^n`` along each row, so both flows are phase
    multipliers in the respective Fourier variable.
    """
    kx = 2 * np.pi * np.fft.fftfreq(grid.N, grid.dx)
    kp = 2 * np.pi * np.fft.fftfreq(grid.N, grid.dp)
    nyq = grid.N // 2
    gen = np.zeros((grid.N, grid.N), dtype=complex)  # rows x, columns kp
    Vd = V
    for n in range(1, V.degree() + 1):
        Vd = Vd.deriv()
        if n % 2 == 0:
            continue
        c = (-1) ** ((n - 1) // 2) * (hbar / 2) ** (n - 1) / factorial(n)
        mult = (1j * kp) ** n
        mult[nyq] = 0
        gen += c * Vd(grid.x)[:, None] * mult[None, :]
    drift_gen = -(1j * kx)[:, None] * (grid.p / m)[None, :]
    drift_gen[nyq, :] = 0
    steps = max(1, int(np.ceil(t / dt)))
    h = t / steps
    cache = {}

    def flows(tau):
        key = round(tau / h, 12)
        if key not in cache:
            cache[key] = (np.exp(0.5 * tau * drift_gen), np.exp(tau * gen))
        return cache[key]

    W = W0.astype(complex)
    for _ in range(steps):
        for w in _YOSHIDA:
            half_drift, kick = flows(w * h)
            W = np.fft.ifft(half_drift * np.fft.fft(W, axis=0), axis=0)
            W = np.fft.ifft(kick * np.fft.fft(W, axis=1), axis=1)
            W = np.fft.ifft(half_drift * np.fft.fft(W, axis=0), axis=0)
    return W.real, h, steps


def moyal_evolve(W0: np.ndarray, grid: PhaseGrid, V, t: float, m: float = 1.0, hbar: Optional[float] = None, dt: Optional[float] = None, cfl: float = 0.5, retries: int = 3, method: str = "rk4"):
    """Evolve ``dW/dt = {W, H}_M``; returns ``(W, dt, steps)``.

    ``rk4`` is the method of lines with a CFL-limited step; ``split`` is the
    unconditionally stable fourth-order splitting for stiff deformation terms.
    """
    V = _as_poly(V)
    hbar = grid.hbar if hbar is None else hbar
    if method == "split":
        return _split_evolve(W0, grid, V, t, m, hbar, dt or 0.01)
    if method != "rk4":
        raise ValueError(f"unknown evolution method {method!r}")
    limit = cfl * 2.8 / max(_stiffness(grid, V, m, hbar), 1e-300)
    step = min(dt, limit) if dt else limit
    mass0 = np.sum(np.abs(W0))
    for _ in range(retries + 1):
        steps = max(1, int(np.ceil(t / step)))
        h = t / steps
        W = _rk4(W0.copy(), lambda w: moyal_rhs(w, grid, V, m, hbar), h, steps)
        if np.all(np.isfinite(W)) and np.sum(np.abs(W)) <= 10 * mass0:
            return W, h, steps
        step /= 2
    raise CFLError(f"unstable after {retries} step refinements (last dt = {h:g})")


def backtrace(grid: PhaseGrid, V, t: float, m: float = 1.0, steps: int = 1000):
    """Phase points ``Phi_{-t}(x, p)`` of every grid node under ``H = p^2/2m + V``."""
    V = _as_poly(V)
    dV = V.deriv()
    X, P = phase_mesh(grid)
    h = -t / steps

    def f(x, p):
        return p / m, -dV(x)

    for _ in range(steps):
        k1 = f(X, P)
        k2 = f(X + 0.5 * h * k1[0], P + 0.5 * h * k1[1])
        k3 = f(X + 0.5 * h * k2[0], P + 0.5 * h * k2[1])
        k4 = f(X + h * k3[0], P + h * k3[1])
        X = X + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        P = P + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    return X, P


def _interpolate(W0: np.ndarray, grid: PhaseGrid, X: np.ndarray, P: np.ndarray) -> np.ndarray:
    from scipy.ndimage import map_coordinates

    ix = (X - grid.x[0]) / grid.dx
    ip = (P - grid.p[0]) / grid.dp
    return map_coordinates(W0, [ix, ip], order=5, mode="grid-wrap")


@dataclass
class ClassicalLimitResult:
    l1_gap: float
    expectation_gaps: Dict[str, float]
    quantum: np.ndarray
    classical: np.ndarray
    dt: float
    steps: int


def classical_limit_compare(V, W0: Union[np.ndarray, Callable], t: float, grid: PhaseGrid, m: float = 1.0, hbar: Optional[float] = None, dt: Optional[float] = None, trace_steps: Optional[int] = None, method: str = "rk4") -> ClassicalLimitResult:
    """Moyal evolution against Liouville transport of the same initial density.

    ``W0`` may be a callable ``(x, p) -> density``; then the classical side
    evaluates it exactly at the back-traced points, otherwise it interpolates.
    """
    X, P = phase_mesh(grid)
    W0_samples = W0(X, P) if callable(W0) else np.asarray(W0, dtype=float)
    Wq, h, steps = moyal_evolve(W0_samples, grid, V, t, m, hbar, dt, method=method)
    Xb, Pb = backtrace(grid, V, t, m, trace_steps or steps)
    Wc = W0(Xb, Pb) if callable(W0) else _interpolate(W0_samples, grid, Xb, Pb)
    cell = grid.dx * grid.dp
    gaps = {}
    for name, A in (("x", X), ("p", P), ("x^2", X**2)):
        gaps[name] = float(abs(np.sum(A * (Wq - Wc)) * cell))
    return ClassicalLimitResult(float(np.sum(np.abs(Wq - Wc)) * cell), gaps, Wq, Wc, h, steps)


def gaussian_density(x0: float, p0: float, sx: float, sp: float) -> Callable:
    """Normalized phase-space Gaussian (a valid Wigner function when ``sx sp >= hbar/2``)."""
    def rho(X, P):
        return np.exp(-((X - x0) ** 2) / (2 * sx**2) - (P - p0) ** 2 / (2 * sp**2)) / (2 * np.pi * sx * sp)
    return rho


def quartic_sweep(hbars: Sequence[float], lam: float = 1.0, sigma: float = 0.25, x0: float = 0.0, t: float = 1.0, N: int = 64, half_width: float = 2.0, dt: float = 0.01) -> ScalingFit:
    """L1 gap between Moyal and Liouville evolution under ``V = lam x^4``.

    The phase-space lattice and the initial density are fixed; only the
    deformation parameter in the Moyal bracket varies.  The packet starts at
    rest near the origin so that no probability is pushed across the periodic
    box, which would add an hbar-independent floor to the gap.
    """
    L = 2 * half_width
    grid = PhaseGrid(L, N, hbar=L * L / (2 * np.pi * N))
    V = Polynomial([0, 0, 0, 0, lam])
    rho0 = gaussian_density(x0, 0.0, sigma, sigma)
    gaps = [
        classical_limit_compare(V, rho0, t, grid, hbar=h, dt=dt, method="split", trace_steps=400).l1_gap
        for h in hbars
    ]
    slope, intercept, res = fit_loglog(hbars, gaps)
    return ScalingFit(list(hbars), gaps, slope, intercept, res)


# -- report helpers ------------------------------------------------------------------


def born_check(grid: PhaseGrid, psi: WaveField, tol: float = 1e-8, m: float = 1.0, omega: float = 1.0) -> VerificationReport:
    rep = VerificationReport("born")
    W = wigner(psi)
    ops = {
        "I": np.eye(grid.N, dtype=complex),
        "X": position_operator(grid),
        "P": momentum_operator(grid),
        "H": harmonic_operator(grid, m, omega),
    }
    for name, K in ops.items():
        lhs = expectation(psi, K)
        rhs = W.expectation(weyl_symbol(K, grid))
        rep.add_numeric(f"born[{name}]", "wwm.born", abs(lhs - rhs), tol, group="born", value=lhs.real)
    return rep
