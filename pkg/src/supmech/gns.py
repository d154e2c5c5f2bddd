"""Finite-dimensional *-algebras, states and the GNS construction.

An algebra is given by a basis ``b_0 = I, b_1, ..., b_{d-1}``, structure
constants ``b_i b_j = sum_k c[i, j, k] b_k`` and a star matrix whose column
``i`` holds the coefficients of ``b_i^*``.  Elements are complex coefficient
vectors; the involution acts antilinearly, ``(sum a_i b_i)^* = S conj(a)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as sla

PSD_REL_TOL = 1e-10
NULL_REL_TOL = 1e-10


class StateError(ValueError):
    pass


def _nullspace(M: np.ndarray, rel_tol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis (columns) of the null space of ``M``."""
    if M.size == 0:
        return np.eye(M.shape[1], dtype=complex)
    _, s, vh = np.linalg.svd(M, full_matrices=M.shape[0] < M.shape[1])
    scale = max(1.0, s[0] if s.size else 0.0)
    rank = int(np.sum(s > rel_tol * scale))
    return vh[rank:].conj().T


@dataclass(frozen=True, eq=False)
class FiniteAlgebra:
    labels: Tuple[str, ...]
    structure: np.ndarray
    star_matrix: np.ndarray
    matrices: Optional[np.ndarray] = None
    name: str = "algebra"

    def __post_init__(self):
        d = len(self.labels)
        if self.structure.shape != (d, d, d) or self.star_matrix.shape != (d, d):
            raise ValueError("structure constants / star matrix have the wrong shape")
        e0 = np.zeros(d, dtype=complex)
        e0[0] = 1
        for i in range(d):
            ei = np.eye(d, dtype=complex)[i]
            if not (np.allclose(self.mul(e0, ei), ei, atol=1e-12) and np.allclose(self.mul(ei, e0), ei, atol=1e-12)):
                raise ValueError(f"first basis element is not a two-sided unit (fails on {self.labels[i]})")
        # associativity (b_i b_j) b_k = b_i (b_j b_k)
        c = self.structure
        left = np.einsum("ijm,mkn->ijkn", c, c)
        right = np.einsum("jkm,imn->ijkn", c, c)
        if not np.allclose(left, right, atol=1e-10):
            raise ValueError("structure constants are not associative")
        S = self.star_matrix
        if not np.allclose(S @ S.conj(), np.eye(d), atol=1e-12):
            raise ValueError("star is not involutive")
        for i, j in product(range(d), repeat=2):
            ei, ej = np.eye(d)[i], np.eye(d)[j]
            lhs = self.star(self.mul(ei, ej))
            rhs = self.mul(self.star(ej), self.star(ei))
            if not np.allclose(lhs, rhs, atol=1e-10):
                raise ValueError("star is not an anti-automorphism")

    @property
    def dim(self) -> int:
        return len(self.labels)

    def basis(self, label: str) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.labels.index(label)] = 1
        return v

    def unit(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1
        return v

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.einsum("i,j,ijk->k", a, b, self.structure)

    def star(self, a: np.ndarray) -> np.ndarray:
        return self.star_matrix @ np.conj(a)

    def left_matrix(self, i: int) -> np.ndarray:
        """Matrix of ``x -> b_i x`` on coefficient vectors."""
        return self.structure[i].T

    def to_matrix(self, a: np.ndarray) -> np.ndarray:
        if self.matrices is None:
            raise ValueError("algebra has no matrix realization")
        return np.tensordot(a, self.matrices, axes=1)

    def from_matrix(self, A: np.ndarray) -> np.ndarray:
        """Coefficients of a matrix in the span of the realization."""
        if self.matrices is None:
            raise ValueError("algebra has no matrix realization")
        M = self.matrices.reshape(self.dim, -1).T
        coef, *_ = np.linalg.lstsq(M, A.reshape(-1), rcond=None)
        if not np.allclose(M @ coef, A.reshape(-1), atol=1e-10):
            raise ValueError("matrix is not in the algebra")
        return coef

    # -- constructors --------------------------------------------------------------

    @classmethod
    def from_matrices(cls, labels: Sequence[str], mats: Sequence[np.ndarray], name: str = "algebra") -> "FiniteAlgebra":
        mats = np.array(mats, dtype=complex)
        d = len(labels)
        if not np.allclose(mats[0], np.eye(mats.shape[1])):
            raise ValueError("first matrix must be the identity")
        M = mats.reshape(d, -1).T
        prods = np.einsum("iab,jbc->ijac", mats, mats).reshape(d * d, -1).T
        c, *_ = np.linalg.lstsq(M, prods, rcond=None)
        if not np.allclose(M @ c, prods, atol=1e-10):
            raise ValueError("matrices do not span a subalgebra")
        adj = np.conj(np.transpose(mats, (0, 2, 1))).reshape(d, -1).T
        s, *_ = np.linalg.lstsq(M, adj, rcond=None)
        structure = _clean(c.T.reshape(d, d, d))
        return cls(tuple(labels), structure, _clean(s), mats, name)

    @classmethod
    def matn(cls, n: int) -> "FiniteAlgebra":
        """Full matrix algebra ``M_n``; basis ``I`` then all units except ``e_nn``."""
        labels, mats = ["I"], [np.eye(n)]
        for i, j in product(range(n), repeat=2):
            if (i, j) == (n - 1, n - 1):
                continue
            E = np.zeros((n, n))
            E[i, j] = 1
            labels.append(f"e{i + 1}{j + 1}")
            mats.append(E)
        return cls.from_matrices(labels, mats, f"mat:{n}")

    @classmethod
    def sumn(cls, *sizes: int) -> "FiniteAlgebra":
        """Block-diagonal direct sum ``M_n1 + M_n2 + ...`` with block-labelled units."""
        D = sum(sizes)
        labels, mats = ["I"], [np.eye(D)]
        offset = 0
        last = len(sizes) - 1
        for b, n in enumerate(sizes):
            for i, j in product(range(n), repeat=2):
                if b == last and (i, j) == (n - 1, n - 1):
                    continue
                E = np.zeros((D, D))
                E[offset + i, offset + j] = 1
                labels.append(f"b{b + 1}e{i + 1}{j + 1}")
                mats.append(E)
            offset += n
        return cls.from_matrices(labels, mats, "sum:" + ",".join(map(str, sizes)))

    @classmethod
    def grassmann(cls, n: int) -> "FiniteAlgebra":
        """Grassmann algebra ``G_n`` as a 2^n-dimensional associative *-algebra."""
        from .presentations import grassmann as grassmann_presentation

        p = grassmann_presentation(n)
        words = [w for k in range(n + 1) for w in _subsets(n, k)]
        index = {w: k for k, w in enumerate(words)}
        d = len(words)
        structure = np.zeros((d, d, d), dtype=complex)
        star_m = np.zeros((d, d), dtype=complex)
        from .nc import NcPoly, ONE, star

        polys = [NcPoly(p, {w: ONE}) for w in words]
        for i, j in product(range(d), repeat=2):
            for w, c in (polys[i] * polys[j]).items():
                structure[i, j, index[w]] = c.evaluate({})
        for i in range(d):
            for w, c in star(polys[i]).items():
                star_m[index[w], i] = c.evaluate({})
        labels = ["I"] + ["th" + "".join(str(g + 1) for g in w) for w in words[1:]]
        return cls(tuple(labels), structure, star_m, None, f"grassmann:{n}")

    @classmethod
    def by_name(cls, spec: str) -> "FiniteAlgebra":
        """``mat:<n>`` / ``matn:<n>``, ``sum:<n1>,<n2>`` / ``sumn:...``, ``grassmann:<n>``."""
        kind, _, arg = spec.partition(":")
        if kind in ("mat", "matn"):
            return cls.matn(int(arg))
        if kind in ("sum", "sumn"):
            return cls.sumn(*(int(x) for x in arg.split(",")))
        if kind == "grassmann":
            return cls.grassmann(int(arg))
        path = Path(spec)
        if path.exists():
            return load_algebra(path)
        raise KeyError(f"unknown algebra {spec!r}")


def _subsets(n: int, k: int):
    from itertools import combinations

    return [tuple(c) for c in combinations(range(n), k)]


def _clean(a: np.ndarray, tol: float = 1e-13) -> np.ndarray:
    a = np.array(a, dtype=complex)
    re, im = a.real.copy(), a.imag.copy()
    for part in (re, im):
        r = np.round(part)
        close = np.abs(part - r) < tol
        part[close] = r[close]
    return re + 1j * im


def loads_algebra(text: str) -> FiniteAlgebra:
    """Parse the structure-constant text format.

    ::

        basis I a
        mul a a = 1*I          # unlisted products vanish
        star a = 1*a           # unlisted stars: basis element is hermitian

    Right-hand sides are sums of ``<complex>*<label>`` terms.  Products with the
    unit are implied.
    """
    labels: List[str] = []
    muls, stars = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split(None, 1)
        if head == "basis":
            labels = rest[0].split()
        elif head == "mul":
            lhs, rhs = rest[0].split("=", 1)
            a, b = lhs.split()
            muls.append((lineno, a, b, rhs))
        elif head == "star":
            lhs, rhs = rest[0].split("=", 1)
            stars.append((lineno, lhs.strip(), rhs))
        else:
            raise ValueError(f"line {lineno}: cannot parse {raw.strip()!r}")
    if not labels or labels[0] != "I":
        raise ValueError("basis must be declared and start with I")
    d = len(labels)
    idx = {l: k for k, l in enumerate(labels)}

    def combo(lineno, rhs):
        v = np.zeros(d, dtype=complex)
        for term in rhs.replace("-", "+-").split("+"):
            term = term.strip()
            if not term:
                continue
            if "*" in term:
                c, lab = term.rsplit("*", 1)
                c = c.strip()
                coeff = complex(c.replace("i", "j")) if c not in ("", "-") else (-1 if c == "-" else 1)
            else:
                coeff, lab = (-1, term[1:]) if term.startswith("-") else (1, term)
            lab = lab.strip()
            if lab not in idx:
                raise ValueError(f"line {lineno}: unknown basis label {lab!r}")
            v[idx[lab]] += coeff
        return v

    structure = np.zeros((d, d, d), dtype=complex)
    for k in range(d):
        structure[0, k, k] = structure[k, 0, k] = 1
    for lineno, a, b, rhs in muls:
        structure[idx[a], idx[b]] = combo(lineno, rhs)
    S = np.eye(d, dtype=complex)
    for lineno, a, rhs in stars:
        S[:, idx[a]] = combo(lineno, rhs)
    return FiniteAlgebra(tuple(labels), structure, S, None, "file")


def load_algebra(path) -> FiniteAlgebra:
    return loads_algebra(Path(path).read_text())


# -- states -------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StateFunctional:
    """Values ``phi(b_i)`` of a linear functional on the basis."""

    values: np.ndarray

    def __call__(self, a: np.ndarray) -> complex:
        return complex(np.dot(a, self.values))


def state_from_density(alg: FiniteAlgebra, rho: np.ndarray) -> StateFunctional:
    """``phi(A) = Tr(rho A)`` in the matrix realization."""
    return StateFunctional(np.einsum("ab,iba->i", rho, alg.matrices))


def vector_state(alg: FiniteAlgebra, psi: np.ndarray) -> StateFunctional:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return state_from_density(alg, np.outer(psi, psi.conj()))


def named_state(alg: FiniteAlgebra, spec: str) -> StateFunctional:
    """``e<k><k>`` (vector state on the k-th coordinate), ``trace``, ``top`` (Grassmann)."""
    if spec == "trace":
        D = alg.matrices.shape[1]
        return state_from_density(alg, np.eye(D) / D)
    if spec.startswith("e") and len(spec) == 3 and spec[1] == spec[2] and spec[1].isdigit():
        D = alg.matrices.shape[1]
        v = np.zeros(D)
        v[int(spec[1]) - 1] = 1
        return vector_state(alg, v)
    if spec.startswith("coord:"):
        D = alg.matrices.shape[1]
        v = np.zeros(D)
        v[int(spec.split(":")[1]) - 1] = 1
        return vector_state(alg, v)
    raise KeyError(f"unknown state {spec!r}")


def random_density(alg: FiniteAlgebra, rng: np.random.Generator, rank: Optional[int] = None, block: Optional[int] = None) -> np.ndarray:
    """Random density matrix commuting with the block structure of ``alg``.

    ``block`` restricts the support to one block; ``rank`` fixes the rank inside
    each supported block (rank 1 in one block gives a pure state).
    """
    D = alg.matrices.shape[1]
    sizes = _block_sizes(alg)
    rho = np.zeros((D, D), dtype=complex)
    offset = 0
    chosen = range(len(sizes)) if block is None else [block]
    weights = rng.random(len(sizes)) if block is None else np.eye(len(sizes))[block]
    for b, n in enumerate(sizes):
        if b in chosen and weights[b] > 0:
            r = n if rank is None else min(rank, n)
            G = rng.normal(size=(n, r)) + 1j * rng.normal(size=(n, r))
            blk = G @ G.conj().T
            rho[offset : offset + n, offset : offset + n] = weights[b] * blk / np.trace(blk).real
        offset += n
    return rho / np.trace(rho).real


def _block_sizes(alg: FiniteAlgebra) -> List[int]:
    """Sizes of the diagonal blocks of the realization (connected components)."""
    D = alg.matrices.shape[1]
    support = np.any(np.abs(alg.matrices) > 0, axis=0)
    seen, sizes = set(), []
    for start in range(D):
        if start in seen:
            continue
        comp, stack = set(), [start]
        while stack:
            a = stack.pop()
            if a in comp:
                continue
            comp.add(a)
            stack.extend(b for b in range(D) if (support[a, b] or support[b, a]) and b not in comp)
        seen |= comp
        sizes.append(len(comp))
    return sizes


@dataclass
class StateCheck:
    ok: bool
    normalization_error: float
    min_eigenvalue: float
    threshold: float
    gram: np.ndarray

    def __bool__(self) -> bool:
        return self.ok


def gram_matrix(alg: FiniteAlgebra, phi: StateFunctional) -> np.ndarray:
    """``G[i, j] = phi(b_i^* b_j)``."""
    C = np.einsum("kjl,l->kj", alg.structure, phi.values)
    return alg.star_matrix.T @ C


def check_state(alg: FiniteAlgebra, phi: StateFunctional, tol: float = 1e-10) -> StateCheck:
    if np.shape(phi.values) != (alg.dim,):
        raise ValueError(f"state has {np.size(phi.values)} values, algebra has dimension {alg.dim}")
    G = gram_matrix(alg, phi)
    herm_err = np.max(np.abs(G - G.conj().T)) if G.size else 0.0
    Gh = (G + G.conj().T) / 2
    eigs = np.linalg.eigvalsh(Gh)
    threshold = -PSD_REL_TOL * max(abs(np.trace(Gh).real), 1e-300)
    norm_err = abs(phi.values[0] - 1)
    ok = bool(norm_err <= tol and eigs[0] >= threshold and herm_err <= tol * max(1.0, np.abs(G).max()))
    return StateCheck(ok, float(norm_err), float(eigs[0]), float(threshold), G)


# -- representations ------------------------------------------------------------------


@dataclass(eq=False)
class Representation:
    algebra: FiniteAlgebra
    matrices: np.ndarray  # (d, D, D): pi(b_i)
    blocks: Tuple[int, ...] = ()

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]

    def __call__(self, a: np.ndarray) -> np.ndarray:
        return np.tensordot(a, self.matrices, axes=1)

    def homomorphism_residual(self) -> float:
        alg, pi = self.algebra, self.matrices
        prod_img = np.einsum("ijk,kab->ijab", alg.structure, pi)
        prod_mat = np.einsum("iab,jbc->ijac", pi, pi)
        return float(np.max(np.abs(prod_img - prod_mat), initial=0.0))

    def star_residual(self) -> float:
        alg, pi = self.algebra, self.matrices
        star_img = np.einsum("ki,kab->iab", alg.star_matrix, pi)
        return float(np.max(np.abs(star_img - np.conj(np.transpose(pi, (0, 2, 1)))), initial=0.0))

    def commutant_basis(self) -> np.ndarray:
        D = self.dim
        Id = np.eye(D)
        rows = [np.kron(Id, p.T) - np.kron(p, Id) for p in self.matrices]
        N = _nullspace(np.vstack(rows))
        return N.T.reshape(-1, D, D)

    def commutant_dim(self) -> int:
        return len(self.commutant_basis())

    def kernel_dim(self) -> int:
        d = self.algebra.dim
        M = self.matrices.reshape(d, -1).T
        s = np.linalg.svd(M, compute_uv=False)
        scale = max(1.0, s[0] if s.size else 0.0)
        return d - int(np.sum(s > 1e-9 * scale))

    def is_faithful(self) -> bool:
        return self.kernel_dim() == 0


@dataclass(eq=False)
class GnsRep(Representation):
    state: Optional[StateFunctional] = None
    cyclic: Optional[np.ndarray] = None
    embedding: Optional[np.ndarray] = None  # coefficient vector -> Hilbert coordinates
    null_basis: Optional[np.ndarray] = None  # columns span L_phi
    gram: Optional[np.ndarray] = None

    def vector(self, a: np.ndarray) -> np.ndarray:
        """Hilbert-space image ``[a]`` of an algebra element."""
        return self.embedding @ a

    def reconstruction_residual(self) -> float:
        vals = np.einsum("a,iab,b->i", self.cyclic.conj(), self.matrices, self.cyclic)
        return float(np.max(np.abs(vals - self.state.values)))


def gns(alg: FiniteAlgebra, phi: StateFunctional) -> GnsRep:
    """GNS representation of ``phi``: quotient by the null ideal, left action."""
    chk = check_state(alg, phi)
    if not chk.ok:
        raise StateError(
            f"not a state: |phi(I) - 1| = {chk.normalization_error:.3e}, min Gram eigenvalue "
            f"{chk.min_eigenvalue:.3e} (threshold {chk.threshold:.3e})"
        )
    G = (chk.gram + chk.gram.conj().T) / 2
    lam, V = np.linalg.eigh(G)
    keep = lam > NULL_REL_TOL * max(lam[-1], 1e-300)
    lam_p, V_p = lam[keep], V[:, keep]
    E = (np.sqrt(lam_p)[:, None]) * V_p.conj().T
    E_pinv = V_p / np.sqrt(lam_p)[None, :]
    mats = np.array([E @ alg.left_matrix(i) @ E_pinv for i in range(alg.dim)])
    chi = E @ alg.unit()
    return GnsRep(alg, mats, (len(lam_p),), phi, chi, E, V[:, ~keep], chk.gram)


def is_pure(alg: FiniteAlgebra, phi: StateFunctional) -> bool:
    return gns(alg, phi).commutant_dim() == 1


def state_from_vector(alg: FiniteAlgebra, phi: StateFunctional, B: np.ndarray, tol: float = 1e-12) -> StateFunctional:
    """``phi_B(A) = phi(B^* A B) / phi(B^* B)``."""
    Bs = alg.star(B)
    norm = phi(alg.mul(Bs, B))
    if abs(norm) <= tol:
        raise StateError("B lies in the null ideal of phi (phi(B*B) = 0)")
    d = alg.dim
    vals = np.array([phi(alg.mul(alg.mul(Bs, np.eye(d)[i]), B)) for i in range(d)]) / norm
    return StateFunctional(vals)


def find_intertwiner(rep1: Representation, rep2: Representation, seed: int = 0, tol: float = 1e-10) -> Optional[np.ndarray]:
    """Unitary ``U`` with ``U pi1(b) = pi2(b) U`` for all basis ``b``, or ``None``."""
    if rep1.algebra.dim != rep2.algebra.dim:
        raise ValueError("representations of different algebras")
    if rep1.dim != rep2.dim:
        return None
    D = rep1.dim
    Id = np.eye(D)
    rows = [np.kron(Id, p1.T) - np.kron(p2, Id) for p1, p2 in zip(rep1.matrices, rep2.matrices)]
    N = _nullspace(np.vstack(rows))
    if N.shape[1] == 0:
        return None
    rng = np.random.default_rng(seed)
    coef = rng.normal(size=N.shape[1]) + 1j * rng.normal(size=N.shape[1])
    T = (N @ coef).reshape(D, D)
    W, s, Vh = np.linalg.svd(T)
    if s[-1] <= 1e-8 * s[0]:
        return None
    U = W @ Vh
    res = max(np.max(np.abs(U @ p1 - p2 @ U)) for p1, p2 in zip(rep1.matrices, rep2.matrices))
    return U if res <= tol else None


def intertwiner_residual(U: np.ndarray, rep1: Representation, rep2: Representation) -> float:
    return float(max(np.max(np.abs(U @ p1 - p2 @ U)) for p1, p2 in zip(rep1.matrices, rep2.matrices)))


def direct_sum(reps: Sequence[Representation]) -> Representation:
    if not reps:
        raise ValueError("empty list of representations")
    alg = reps[0].algebra
    mats = np.array([sla.block_diag(*[r.matrices[i] for r in reps]) for i in range(alg.dim)])
    return Representation(alg, mats, tuple(r.dim for r in reps))


def direct_sum_faithful(alg: FiniteAlgebra, states: Sequence[StateFunctional]) -> Tuple[Representation, bool]:
    """Block sum of the GNS representations of ``states`` and its faithfulness."""
    if not states:
        raise ValueError("empty state list")
    rep = direct_sum([gns(alg, phi) for phi in states])
    return rep, rep.is_faithful()


@dataclass
class Superselection:
    sector_dims: List[int]
    projectors: List[np.ndarray]
    center_dim: int
    faithful: bool
    commutation_residual: float
    completeness_residual: float
    first_index: List[int] = field(default_factory=list)

    def charge_operator(self, charges: Sequence[float]) -> np.ndarray:
        """``Q = sum_alpha a_alpha P_alpha``."""
        if len(charges) != len(self.projectors):
            raise ValueError("one charge per sector required")
        return sum(a * P for a, P in zip(charges, self.projectors))


def _chop(P: np.ndarray, tol: float = 1e-13) -> np.ndarray:
    return _clean(P, tol)


def center_basis(rep: Representation) -> np.ndarray:
    """Basis (stacked matrices) of the center of the image algebra."""
    pi = rep.matrices
    d, D = pi.shape[0], rep.dim
    comm = np.einsum("iab,jbc->ijac", pi, pi) - np.einsum("jab,ibc->ijac", pi, pi)
    # sum_i a_i [pi_i, pi_j] = 0 for all j
    A = comm.transpose(1, 2, 3, 0).reshape(d * D * D, d)
    N = _nullspace(A)
    Z = np.einsum("ik,iab->kab", N, pi)
    flat = Z.reshape(len(Z), -1)
    if flat.size == 0:
        return np.zeros((0, D, D), dtype=complex)
    u, s, vh = np.linalg.svd(flat, full_matrices=False)
    rank = int(np.sum(s > 1e-9 * max(1.0, s[0])))
    return vh[:rank].reshape(rank, D, D)


def superselection_decompose(rep: Representation, seed: int = 12345) -> Superselection:
    """Minimal central projections of the image algebra of ``rep``."""
    faithful = rep.is_faithful()
    Zs = center_basis(rep)
    D = rep.dim
    rng = np.random.default_rng(seed)
    H = np.zeros((D, D), dtype=complex)
    for Z in Zs:
        a, b = rng.normal(size=2)
        H += a * (Z + Z.conj().T) / 2 + b * (Z - Z.conj().T) / 2j
    lam, V = np.linalg.eigh(H)
    scale = max(1.0, np.max(np.abs(lam), initial=0.0))
    groups: List[List[int]] = []
    for k in range(D):
        if groups and abs(lam[k] - lam[groups[-1][-1]]) <= 1e-8 * scale:
            groups[-1].append(k)
        else:
            groups.append([k])
    projs = [_chop(V[:, g] @ V[:, g].conj().T) for g in groups]
    first = [int(np.argmax(np.abs(np.diag(P)) > 1e-8)) for P in projs]
    order = sorted(range(len(projs)), key=lambda a: (-len(groups[a]), first[a]))
    projs = [projs[a] for a in order]
    dims = [len(groups[a]) for a in order]
    first = [first[a] for a in order]
    comm = max(
        (np.max(np.abs(P @ p - p @ P)) for P in projs for p in rep.matrices), default=0.0
    )
    total = sum(projs) if projs else np.zeros((D, D))
    compl = float(np.max(np.abs(total - np.eye(D)), initial=0.0))
    return Superselection(dims, projs, len(Zs), faithful, float(comm), compl, first)


# -- transition probability -------------------------------------------------------------


@dataclass
class TransitionResult:
    probability: float
    povm: Optional[List[np.ndarray]] = None
    povm_probability: Optional[float] = None
    basis: Optional[np.ndarray] = None


def _check_density(rho: np.ndarray, name: str, tol: float = 1e-10) -> None:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"{name} is not a square matrix")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValueError(f"{name} is not hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise ValueError(f"{name} does not have unit trace")
    if np.linalg.eigvalsh(rho)[0] < -tol:
        raise ValueError(f"{name} is not positive semidefinite")


def transition_probability(rho1: np.ndarray, rho2: np.ndarray, tol: float = 1e-10) -> TransitionResult:
    """``Tr(rho1 rho2)``; for pure inputs also the witnessing projective POVM.

    The POVM consists of the rank-one projectors onto an orthonormal basis whose
    first vector is the state of ``rho2``; the event ``{1}`` has probability
    ``|(psi1, psi2)|^2`` in the state ``rho1``.
    """
    rho1, rho2 = np.asarray(rho1, dtype=complex), np.asarray(rho2, dtype=complex)
    _check_density(rho1, "rho1", tol)
    _check_density(rho2, "rho2", tol)
    if rho1.shape != rho2.shape:
        raise ValueError("density matrices act on different spaces")
    w = float(np.trace(rho1 @ rho2).real)
    pure = all(abs(np.trace(r @ r).real - 1) <= 1e-9 for r in (rho1, rho2))
    if not pure:
        return TransitionResult(w)
    lam, V = np.linalg.eigh(rho2)
    psi2 = V[:, -1]
    n = len(psi2)
    Q, _ = np.linalg.qr(np.column_stack([psi2, np.eye(n)]))
    basis = Q[:, :n]
    basis[:, 0] = psi2  # QR may flip the phase of the first column
    povm = [np.outer(basis[:, r], basis[:, r].conj()) for r in range(n)]
    p_event = float(np.trace(rho1 @ povm[0]).real)
    return TransitionResult(w, povm, p_event, basis)
