"""Declarative text format for presentations.

Example::

    # canonical commutation relations in one dimension
    name ccr1
    params hbar
    even X P
    [X, P] = i*hbar*I

Lines
    ``name <id>``               presentation name
    ``params <p1> <p2> ...``    formal parameters (``hbar`` is always added)
    ``even <g1> <g2> ...``      even hermitian generators, in order
    ``odd <g1> <g2> ...``       odd hermitian generators, in order
    ``adjoint <a> <b>``         declare ``a* = b`` (both become non-hermitian)
    ``unlisted zero|error``     treatment of pairs with no relation line
    ``[<a>, <b>] = <expr>``     supercommutator of two generators

Generator order is declaration order.  ``#`` starts a comment.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Dict, List, Tuple

from .algebra import EVEN, ODD, AlgebraPresentation, Generator, PresentationError

_REL = re.compile(r"^\[\s*([A-Za-z][A-Za-z0-9_]*)\s*,\s*([A-Za-z][A-Za-z0-9_]*)\s*\]\s*=\s*(.+)$")


def loads_presentation(text: str) -> AlgebraPresentation:
    name = "custom"
    params: List[str] = ["hbar"]
    gens: List[Tuple[str, int]] = []
    adjoints: Dict[str, str] = {}
    unlisted = "zero"
    rel_lines: List[Tuple[int, str, str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _REL.match(line)
        if m:
            rel_lines.append((lineno, m.group(1), m.group(2), m.group(3)))
            continue
        head, *rest = line.split()
        if head == "name" and len(rest) == 1:
            name = rest[0]
        elif head == "params":
            params.extend(rest)
        elif head in ("even", "odd"):
            if not rest:
                raise PresentationError(f"line {lineno}: no generators listed")
            gens.extend((g, EVEN if head == "even" else ODD) for g in rest)
        elif head == "adjoint" and len(rest) == 2:
            a, b = rest
            adjoints[a], adjoints[b] = b, a
        elif head == "unlisted" and len(rest) == 1:
            unlisted = rest[0]
        else:
            raise PresentationError(f"line {lineno}: cannot parse {raw.strip()!r}")
    generators = [
        Generator(g, parity, hermitian=g not in adjoints, adjoint=adjoints.get(g)) for g, parity in gens
    ]
    relations = {}
    for lineno, a, b, rhs in rel_lines:
        if (a, b) in relations:
            raise PresentationError(f"line {lineno}: duplicate relation for [{a}, {b}]")
        relations[(a, b)] = rhs
    try:
        return AlgebraPresentation(name, generators, params, relations, unlisted)
    except (KeyError, ValueError) as exc:
        raise PresentationError(f"invalid presentation {name!r}: {exc}") from exc


def load_presentation(path: str | Path) -> AlgebraPresentation:
    return loads_presentation(Path(path).read_text())
