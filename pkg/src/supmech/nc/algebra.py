"""Normal-ordered polynomials in a finitely presented *-superalgebra.

A presentation fixes a totally ordered list of generators, each even or odd,
together with a table giving the supercommutator of every out-of-order pair as
a polynomial of word length at most one (Lie type plus central terms).  Any
word can then be rewritten into ordered (PBW) form by repeatedly replacing an
adjacent descent ``a b`` with ``(-1)^{|a||b|} b a + [a, b]``.  For odd ``a``
the square is replaced by ``[a, a] / 2``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .coefficient import IMAG, ONE, ZERO, Coefficient

Word = Tuple[int, ...]
Terms = Dict[Word, Coefficient]

EVEN, ODD = 0, 1


class RelationError(LookupError):
    """Raised when rewriting meets a generator pair missing from the table."""


class PresentationError(ValueError):
    """Raised for malformed presentations (bad degrees, broken star closure)."""


@dataclass(frozen=True)
class Generator:
    name: str
    parity: int = EVEN
    hermitian: bool = True
    adjoint: Optional[str] = None

    def star_name(self) -> str:
        return self.name if self.hermitian else (self.adjoint or self.name)


def _add_into(acc: Terms, word: Word, c: Coefficient) -> None:
    if word in acc:
        s = acc[word] + c
        if s:
            acc[word] = s
        else:
            del acc[word]
    elif c:
        acc[word] = c


class AlgebraPresentation:
    """Generators, parities, hermiticity, order and reordering relations.

    ``relations`` maps a pair of generator names ``(a, b)`` to the value of the
    supercommutator ``[a, b]``.  The value may be an :class:`NcPoly`, a mapping
    ``{tuple_of_names: scalar}`` or an expression string (parsed after the
    generators are known).  Pairs absent from the table supercommute when
    ``unlisted == "zero"``; with ``unlisted == "error"`` rewriting through them
    raises :class:`RelationError`.
    """

    def __init__(
        self,
        name: str,
        generators: Sequence[Generator],
        params: Iterable[str] = ("hbar",),
        relations: Mapping[Tuple[str, str], object] | None = None,
        unlisted: str = "zero",
        hbar: str = "hbar",
    ):
        if unlisted not in ("zero", "error"):
            raise PresentationError(f"unlisted must be 'zero' or 'error', got {unlisted!r}")
        self.name = name
        self.generators: Tuple[Generator, ...] = tuple(generators)
        self.params: Tuple[str, ...] = tuple(dict.fromkeys(params))
        self.unlisted = unlisted
        self.hbar = hbar
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise PresentationError("duplicate generator names")
        for reserved in ("i", "I"):
            if reserved in names or reserved in self.params:
                raise PresentationError(f"{reserved!r} is reserved")
        clash = set(names) & set(self.params)
        if clash:
            raise PresentationError(f"names used both as generator and parameter: {sorted(clash)}")
        self.index: Dict[str, int] = {n: k for k, n in enumerate(names)}
        self.parity: Tuple[int, ...] = tuple(g.parity for g in self.generators)
        self._star_index: Tuple[int, ...] = tuple(self.index[g.star_name()] for g in self.generators)
        for g in self.generators:
            if g.star_name() not in self.index:
                raise PresentationError(f"adjoint of {g.name} is not a generator")
            partner = self.generators[self.index[g.star_name()]]
            if partner.star_name() != g.name:
                raise PresentationError(f"adjoint pairing of {g.name} is not involutive")
            if partner.parity != g.parity:
                raise PresentationError(f"{g.name} and its adjoint differ in parity")
        # (i, j) with i > j, or i == j for odd generators  ->  value of [g_i, g_j]
        self._rel: Dict[Tuple[int, int], Terms] = {}
        for (a, b), value in (relations or {}).items():
            self._set_relation(a, b, value)
        if unlisted == "zero":
            for i in range(len(names)):
                for j in range(i + 1):
                    if i == j and self.parity[i] == EVEN:
                        continue
                    self._rel.setdefault((i, j), {})
        self._nf_word = lru_cache(maxsize=None)(self._nf_word_uncached)

    # -- relation table -----------------------------------------------------

    def _set_relation(self, a: str, b: str, value) -> None:
        for n in (a, b):
            if n not in self.index:
                raise PresentationError(f"unknown generator {n!r} in relation")
        i, j = self.index[a], self.index[b]
        terms = self._coerce_terms(value)
        for word in terms:
            if len(word) >= 2:
                raise PresentationError(
                    f"relation [{a}, {b}] has a term of word length {len(word)}; only Lie-type "
                    "relations (length <= 1) are admitted"
                )
            wp = sum(self.parity[g] for g in word) % 2
            if wp != (self.parity[i] + self.parity[j]) % 2:
                raise PresentationError(f"relation [{a}, {b}] has a term of the wrong parity")
        if i == j and self.parity[i] == EVEN:
            if terms:
                raise PresentationError(f"[{a}, {a}] must vanish for an even generator")
            return
        if i < j:
            # [b, a] = -(-1)^{|a||b|} [a, b]
            sign = 1 if self.parity[i] * self.parity[j] else -1
            terms = {w: c * sign for w, c in terms.items()}
            i, j = j, i
        if (i, j) in self._rel and self._rel[(i, j)] != terms:
            raise PresentationError(f"conflicting relations for pair ({a}, {b})")
        self._rel[(i, j)] = terms

    def _coerce_terms(self, value) -> Terms:
        if isinstance(value, NcPoly):
            return dict(value.terms)
        if isinstance(value, str):
            from .parser import parse_expr

            return dict(parse_expr(value, self._free_copy()).terms)
        if value == 0:
            return {}
        out: Terms = {}
        for names, c in dict(value).items():
            if isinstance(names, str):
                names = () if names in ("", "I") else (names,)
            word = tuple(self.index[n] for n in names)
            _add_into(out, word, Coefficient.coerce(c))
        return out

    def _free_copy(self) -> "AlgebraPresentation":
        # same generators, no relations: enough to parse length <= 1 relation values
        return AlgebraPresentation(self.name, self.generators, self.params, {}, "zero", self.hbar)

    def relation(self, a: str, b: str) -> "NcPoly":
        """Value of the supercommutator ``[a, b]`` of two generators."""
        i, j = self.index[a], self.index[b]
        return NcPoly(self, self._pair_value(i, j))

    def _pair_value(self, i: int, j: int) -> Terms:
        if i == j and self.parity[i] == EVEN:
            return {}
        if i >= j:
            key = (i, j)
            sign = 1
        else:
            key = (j, i)
            sign = 1 if self.parity[i] * self.parity[j] else -1
        if key not in self._rel:
            raise RelationError(
                f"no relation for the pair ({self.generators[i].name}, {self.generators[j].name}) "
                f"in presentation {self.name!r}"
            )
        return {w: c * sign for w, c in self._rel[key].items()}

    @property
    def relations(self) -> Dict[Tuple[str, str], "NcPoly"]:
        g = self.generators
        return {(g[i].name, g[j].name): NcPoly(self, dict(t)) for (i, j), t in self._rel.items()}

    def gen(self, name: str) -> "NcPoly":
        return NcPoly(self, {(self.index[name],): ONE})

    def gens(self) -> List["NcPoly"]:
        return [NcPoly(self, {(k,): ONE}) for k in range(len(self.generators))]

    def unit(self) -> "NcPoly":
        return NcPoly(self, {(): ONE})

    def zero(self) -> "NcPoly":
        return NcPoly(self, {})

    def scalar(self, c) -> "NcPoly":
        c = Coefficient.coerce(c)
        return NcPoly(self, {(): c} if c else {})

    def param(self, name: str, power: int = 1) -> "NcPoly":
        if name not in self.params:
            raise KeyError(f"unknown parameter {name!r} in presentation {self.name!r}")
        return self.scalar(Coefficient.param(name, power))

    def word_parity(self, word: Word) -> int:
        return sum(self.parity[g] for g in word) % 2

    # -- rewriting ------------------------------------------------------------

    def _descents(self, word: Word) -> List[int]:
        par = self.parity
        return [
            k
            for k in range(len(word) - 1)
            if word[k] > word[k + 1] or (word[k] == word[k + 1] and par[word[k]] == ODD)
        ]

    def _first_descent(self, word: Word) -> int:
        par = self.parity
        for k in range(len(word) - 1):
            a, b = word[k], word[k + 1]
            if a > b or (a == b and par[a] == ODD):
                return k
        return -1

    def _rewrite_at(self, word: Word, k: int) -> List[Tuple[Word, Coefficient]]:
        a, b = word[k], word[k + 1]
        pre, post = word[:k], word[k + 2 :]
        out: List[Tuple[Word, Coefficient]] = []
        if a == b:
            # odd square: a a = [a, a] / 2
            half = Coefficient.const(Fraction(1, 2))
            for w, c in self._pair_value(a, a).items():
                out.append((pre + w + post, c * half))
            return out
        sign = -1 if self.parity[a] * self.parity[b] else 1
        out.append((pre + (b, a) + post, Coefficient.const(sign)))
        for w, c in self._pair_value(a, b).items():
            out.append((pre + w + post, c))
        return out

    def _nf_word_uncached(self, word: Word) -> Tuple[Tuple[Word, Coefficient], ...]:
        k = self._first_descent(word)
        if k < 0:
            return ((word, ONE),)
        acc: Terms = {}
        for w, c in self._rewrite_at(word, k):
            for w2, c2 in self._nf_word(w):
                _add_into(acc, w2, c * c2)
        return tuple(acc.items())

    def normal_terms(self, terms: Mapping[Word, Coefficient]) -> Terms:
        acc: Terms = {}
        for w, c in terms.items():
            if not c:
                continue
            for w2, c2 in self._nf_word(w):
                _add_into(acc, w2, c * c2)
        return acc

    def rewrite_terms(self, terms: Mapping[Word, Coefficient], choose: Callable[[List[int]], int]) -> Terms:
        """Worklist rewriting where ``choose`` picks which descent to resolve."""
        pending: List[Tuple[Word, Coefficient]] = [(w, c) for w, c in terms.items() if c]
        acc: Terms = {}
        while pending:
            w, c = pending.pop()
            ds = self._descents(w)
            if not ds:
                _add_into(acc, w, c)
                continue
            k = choose(ds)
            for w2, c2 in self._rewrite_at(w, k):
                pending.append((w2, c * c2))
        return acc

    # -- consistency checks --------------------------------------------------

    def check_jacobi(self) -> List[Tuple[str, str, str]]:
        """Generator triples violating the super-Jacobi identity (empty if confluent)."""
        bad = []
        gens = self.gens()
        for a, b, c in product(range(len(gens)), repeat=3):
            if not (a <= b <= c):
                continue
            A, B, C = gens[a], gens[b], gens[c]
            if jacobi_residual(A, B, C):
                g = self.generators
                bad.append((g[a].name, g[b].name, g[c].name))
        return bad

    def check_star_closure(self) -> List[Tuple[str, str]]:
        """Pairs whose relation is not mapped by ``*`` onto the table again."""
        bad = []
        g = self.generators
        for (i, j), terms in self._rel.items():
            lhs = star(NcPoly(self, dict(terms)))
            si, sj = self._star_index[i], self._star_index[j]
            rhs = NcPoly(self, self._pair_value(sj, si))
            if lhs != rhs:
                bad.append((g[i].name, g[j].name))
        return bad

    def __repr__(self) -> str:
        return f"AlgebraPresentation({self.name!r}, {len(self.generators)} generators)"


class NcPoly:
    """Normal-ordered element of a presented algebra: ``{word: Coefficient}``."""

    __slots__ = ("pres", "_terms", "_hash")

    def __init__(self, pres: AlgebraPresentation, terms: Mapping[Word, Coefficient] | None = None, *, normalize: bool = False):
        self.pres = pres
        t = {w: c for w, c in (terms or {}).items() if c}
        self._terms: Terms = pres.normal_terms(t) if normalize else t
        self._hash = None

    @property
    def terms(self) -> Terms:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def degree(self) -> int:
        return max((len(w) for w in self._terms), default=-1)

    def parities(self) -> set:
        return {self.pres.word_parity(w) for w in self._terms}

    def homogeneous_parts(self) -> Dict[int, "NcPoly"]:
        parts: Dict[int, Terms] = {}
        for w, c in self._terms.items():
            parts.setdefault(self.pres.word_parity(w), {})[w] = c
        return {p: NcPoly(self.pres, t) for p, t in parts.items()}

    def parity(self) -> int:
        ps = self.parities()
        if len(ps) > 1:
            raise ValueError("element is not parity-homogeneous")
        return ps.pop() if ps else EVEN

    def coefficient(self, word: Sequence[str] | Word) -> Coefficient:
        if word and isinstance(word[0], str):
            word = tuple(self.pres.index[n] for n in word)
        return self._terms.get(tuple(word), ZERO)

    def constant(self) -> Coefficient:
        return self._terms.get((), ZERO)

    def is_scalar(self) -> bool:
        return all(not w for w in self._terms)

    # -- arithmetic ------------------------------------------------------------

    def _coerce(self, other) -> "NcPoly":
        if isinstance(other, NcPoly):
            if other.pres is not self.pres:
                raise ValueError("elements of different presentations")
            return other
        return self.pres.scalar(other)

    def __add__(self, other) -> "NcPoly":
        other = self._coerce(other)
        acc = dict(self._terms)
        for w, c in other._terms.items():
            _add_into(acc, w, c)
        return NcPoly(self.pres, acc)

    __radd__ = __add__

    def __neg__(self) -> "NcPoly":
        return NcPoly(self.pres, {w: -c for w, c in self._terms.items()})

    def __sub__(self, other) -> "NcPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "NcPoly":
        return self._coerce(other) - self

    def scale(self, c) -> "NcPoly":
        c = Coefficient.coerce(c)
        if not c:
            return self.pres.zero()
        return NcPoly(self.pres, {w: v * c for w, v in self._terms.items()})

    def __mul__(self, other) -> "NcPoly":
        if not isinstance(other, NcPoly):
            return self.scale(other)
        other = self._coerce(other)
        raw: Terms = {}
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                _add_into(raw, w1 + w2, c1 * c2)
        return NcPoly(self.pres, raw, normalize=True)

    def __rmul__(self, other) -> "NcPoly":
        return self.scale(other)

    def __truediv__(self, other) -> "NcPoly":
        if isinstance(other, NcPoly):
            if not other.is_scalar():
                raise ZeroDivisionError("division by a non-scalar element")
            other = other.constant()
        return self.scale(Coefficient.coerce(other).inverse())

    def __pow__(self, n: int) -> "NcPoly":
        if n < 0:
            raise ValueError("negative powers of algebra elements are not defined")
        out = self.pres.unit()
        for _ in range(n):
            out = out * self
        return out

    # -- parameters ----------------------------------------------------------

    def diff_param(self, name: str) -> "NcPoly":
        return NcPoly(self.pres, {w: c.diff(name) for w, c in self._terms.items()})

    def subs_params(self, values: Mapping[str, object]) -> "NcPoly":
        vals = {k: Coefficient.coerce(v) for k, v in values.items()}
        acc: Terms = {}
        for w, c in self._terms.items():
            _add_into(acc, w, c.subs(vals))
        return NcPoly(self.pres, acc)

    # -- protocol --------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, NcPoly):
            return self.pres is other.pres and self._terms == other._terms
        try:
            return self == self.pres.scalar(other)
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((id(self.pres), frozenset(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"NcPoly({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        names = [g.name for g in self.pres.generators]
        parts = []
        for w in sorted(self._terms, key=lambda w: (len(w), w)):
            c = self._terms[w]
            word = "*".join(names[g] for g in w)
            cs = str(c)
            if not word:
                parts.append(cs)
                continue
            if cs == "1":
                parts.append(word)
            elif cs == "-1":
                parts.append("-" + word)
            else:
                if len(c.terms) > 1 and not cs.startswith("("):
                    cs = f"({cs})"
                parts.append(f"{cs}*{word}")
        return " + ".join(parts).replace("+ -", "- ")


# -- free functions on elements ------------------------------------------------


def normal_form(e: NcPoly, p: AlgebraPresentation | None = None, strategy: str = "leftmost", seed: int | None = None) -> NcPoly:
    """Rewrite ``e`` into ordered form.

    ``strategy`` selects the descent resolved at each step: ``"leftmost"``
    (memoised recursion), ``"rightmost"`` or ``"random"`` (worklist, uncached).
    All strategies agree on Lie-type tables satisfying the Jacobi identity.
    """
    p = p or e.pres
    if e.pres is not p:
        raise ValueError("element does not belong to the given presentation")
    terms = e.terms
    if strategy == "leftmost":
        return NcPoly(p, p.normal_terms(terms))
    if strategy == "rightmost":
        return NcPoly(p, p.rewrite_terms(terms, lambda ds: ds[-1]))
    if strategy == "random":
        rng = random.Random(seed)
        return NcPoly(p, p.rewrite_terms(terms, lambda ds: rng.choice(ds)))
    raise ValueError(f"unknown rewrite strategy {strategy!r}")


def from_words(p: AlgebraPresentation, terms: Mapping[Sequence[str], object]) -> NcPoly:
    """Build an element from *unordered* words of generator names."""
    raw: Terms = {}
    for names, c in terms.items():
        if isinstance(names, str):
            names = tuple(names.split()) if names not in ("", "I") else ()
        _add_into(raw, tuple(p.index[n] for n in names), Coefficient.coerce(c))
    return NcPoly(p, raw, normalize=True)


def supercommutator(a: NcPoly, b: NcPoly) -> NcPoly:
    """``[a, b] = ab - (-1)^{|a||b|} ba``, extended bilinearly over parity parts."""
    if a.pres is not b.pres:
        raise ValueError("elements of different presentations")
    out = a.pres.zero()
    for pa, A in a.homogeneous_parts().items():
        for pb, B in b.homogeneous_parts().items():
            if pa and pb:
                out = out + A * B + B * A
            else:
                out = out + A * B - B * A
    return out


def quantum_pb(a: NcPoly, b: NcPoly) -> NcPoly:
    """Quantum Poisson bracket ``(-i hbar)^{-1} [a, b]``."""
    hbar = a.pres.hbar
    if hbar not in a.pres.params:
        raise ValueError(f"presentation {a.pres.name!r} has no parameter {hbar!r}")
    factor = IMAG * Coefficient.param(hbar, -1)  # (-i hbar)^{-1} = i / hbar
    return supercommutator(a, b).scale(factor)


def star(a: NcPoly) -> NcPoly:
    """Antilinear anti-automorphism: ``(c g1...gk)^* = conj(c) gk^*...g1^*``."""
    p = a.pres
    raw: Terms = {}
    si = p._star_index
    for w, c in a.items():
        _add_into(raw, tuple(si[g] for g in reversed(w)), c.conjugate())
    return NcPoly(p, raw, normalize=True)


def jacobi_residual(a: NcPoly, b: NcPoly, c: NcPoly) -> NcPoly:
    """Graded-cyclic Jacobi sum for homogeneous ``a, b, c`` (zero when it holds)."""
    pa, pb, pc = a.parity(), b.parity(), c.parity()
    s = lambda x, y: -1 if x * y else 1  # noqa: E731
    return (
        supercommutator(supercommutator(a, b), c).scale(s(pa, pc))
        + supercommutator(supercommutator(b, c), a).scale(s(pb, pa))
        + supercommutator(supercommutator(c, a), b).scale(s(pc, pb))
    )


def substitute(e: NcPoly, images: Mapping[str, NcPoly], target: AlgebraPresentation) -> NcPoly:
    """Apply the algebra homomorphism sending generator ``g`` to ``images[g]``.

    Generators not in ``images`` must exist in ``target`` under the same name.
    Coefficients are carried over unchanged.
    """
    gens = []
    for g in e.pres.generators:
        if g.name in images:
            img = images[g.name]
            if img.pres is not target:
                raise ValueError(f"image of {g.name} lives in another presentation")
            gens.append(img)
        else:
            gens.append(target.gen(g.name))
    out = target.zero()
    for w, c in e.items():
        term = target.scalar(c)
        for k in w:
            term = term * gens[k]
        out = out + term
    return out
