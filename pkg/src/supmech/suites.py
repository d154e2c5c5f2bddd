"""Named verification suites with validated parameter schemas.

Each suite maps a parameter dict to a :class:`VerificationReport` and may write
grid artifacts into an output directory.  The CLI and the acceptance tests both
run suites through :func:`run_suite`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import erf, sqrt
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from numpy.polynomial import Polynomial

from . import dynamics as dyn
from . import gns as G
from . import grassmann as gr
from . import presentations as pres
from . import wwm
from .nc import load_presentation, star
from .report import VerificationReport


class SchemaError(ValueError):
    pass


def _bool(v) -> bool:
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _floats(v) -> List[float]:
    if isinstance(v, (list, tuple)):
        return [float(x) for x in v]
    return [float(x) for x in str(v).replace(",", " ").split()]


def _strs(v) -> List[str]:
    if isinstance(v, (list, tuple)):
        return [str(x) for x in v]
    return [x.strip() for x in str(v).split(",") if x.strip()]


def _pow2(v) -> int:
    n = int(v)
    if n < 2 or n & (n - 1):
        raise ValueError(f"{n} is not a power of two")
    return n


REQUIRED = object()


@dataclass
class Suite:
    name: str
    schema: Dict[str, tuple]  # key -> (converter, default)
    runner: Callable[..., VerificationReport]
    random: Callable[[Dict[str, Any]], bool] = lambda p: False

    def validate(self, params: Dict[str, Any], require_seed: bool = False) -> Dict[str, Any]:
        unknown = sorted(set(params) - set(self.schema))
        if unknown:
            raise SchemaError(f"suite {self.name!r}: unknown keys {unknown}; allowed {sorted(self.schema)}")
        out = {}
        for key, (conv, default) in self.schema.items():
            if key in params and params[key] is not None:
                try:
                    out[key] = conv(params[key])
                except (TypeError, ValueError) as exc:
                    raise SchemaError(f"suite {self.name!r}: bad value for {key!r}: {exc}") from exc
            elif default is REQUIRED:
                raise SchemaError(f"suite {self.name!r}: missing required key {key!r}")
            else:
                out[key] = default
        if require_seed and self.random(out) and out.get("seed") is None:
            raise SchemaError(f"suite {self.name!r}: this configuration uses randomness and needs a 'seed'")
        if self.random(out) and out.get("seed") is None:
            out["seed"] = 0
        return out


# -- suites ---------------------------------------------------------------------------


def suite_verify_algebra(preset: str, intermediate: bool, out: Optional[Path]) -> VerificationReport:
    rep = VerificationReport("verify-algebra")
    if preset in ("galilei", "galilei-extended"):
        table = pres.verify_pb_table()
        cas = pres.casimir_check()
        if not intermediate:
            cas.entries = [e for e in cas.entries if e.group != "casimir-intermediate"]
        rep.extend(table).extend(cas)
    elif preset == "galilei-derived":
        rep.extend(pres.derived_observables())
    else:
        try:
            p = pres.by_name(preset)
        except KeyError:
            path = Path(preset)
            if not path.exists():
                raise SchemaError(f"unknown preset {preset!r} (not a built-in name or an existing file)")
            p = load_presentation(path)
        rep.extend(pres.presentation_checks(p))
        rep.results["generators"] = [g.name for g in p.generators]
    counts: Dict[str, int] = {}
    for e in rep.entries:
        counts[e.group] = counts.get(e.group, 0) + 1
    rep.results["groups"] = counts
    rep.results["preset"] = preset
    return rep


def _make_state(alg: G.FiniteAlgebra, spec: str, rng: Optional[np.random.Generator]) -> G.StateFunctional:
    if spec in ("random", "random-pure"):
        if rng is None:
            raise SchemaError("random states need a seed")
        if alg.matrices is None:
            raise SchemaError("random states need a matrix realization")
        sizes = G._block_sizes(alg)
        if spec == "random":
            return G.state_from_density(alg, G.random_density(alg, rng))
        return G.state_from_density(alg, G.random_density(alg, rng, rank=1, block=int(rng.integers(len(sizes)))))
    if spec.startswith(("block:", "pure:")):
        if alg.matrices is None:
            raise SchemaError(f"state {spec!r} needs a matrix realization")
        kind, _, k = spec.partition(":")
        sizes = G._block_sizes(alg)
        b = int(k) - 1
        if not 0 <= b < len(sizes):
            raise SchemaError(f"state {spec!r}: the realization has {len(sizes)} blocks")
        if kind == "pure":
            if rng is None:
                raise SchemaError("random states need a seed")
            return G.state_from_density(alg, G.random_density(alg, rng, rank=1, block=b))
        v = np.zeros(alg.matrices.shape[1])
        v[sum(sizes[:b])] = 1
        return G.vector_state(alg, v)
    if spec.startswith("values:"):
        vals = np.array([complex(v.replace("i", "j")) for v in spec[7:].split(";")])
        return G.StateFunctional(vals)
    if spec == "top" and alg.name.startswith("grassmann:"):
        vals = np.zeros(alg.dim, dtype=complex)
        vals[0] = 1
        return G.StateFunctional(vals)
    return G.named_state(alg, spec)


def suite_gns(algebra: str, state: str, sectors: List[str], seed: Optional[int], tol: float, out: Optional[Path]) -> VerificationReport:
    rep = VerificationReport("gns")
    try:
        alg = G.FiniteAlgebra.by_name(algebra)
    except (KeyError, ValueError) as exc:
        raise SchemaError(f"algebra {algebra!r}: {exc.args[0] if exc.args else exc}") from exc
    rng = np.random.default_rng(seed) if seed is not None else None
    phi = _make_state(alg, state, rng)
    chk = G.check_state(alg, phi)
    rep.add_flag("state", "gns.state", chk.ok, group="gns", min_gram_eigenvalue=chk.min_eigenvalue)
    if chk.ok:
        r = G.gns(alg, phi)
        cdim = r.commutant_dim()
        rep.add_numeric("reconstruction", "gns.reconstruction", r.reconstruction_residual(), tol, group="gns")
        rep.add_numeric("homomorphism", "gns.homomorphism", r.homomorphism_residual(), 1e-10, group="gns")
        rep.add_numeric("star", "gns.homomorphism", r.star_residual(), 1e-10, group="gns")
        rep.results.update(dim=r.dim, commutant_dim=cdim, irreducible=cdim == 1, null_dim=int(r.null_basis.shape[1]))
    if sectors:
        states = [_make_state(alg, s, rng) for s in sectors]
        rsum, faithful = G.direct_sum_faithful(alg, states)
        ss = G.superselection_decompose(rsum)
        rep.add_flag("faithful", "gns.faithful", faithful, group="superselection")
        rep.add_numeric("central-commutation", "gns.superselection", ss.commutation_residual, tol, group="superselection")
        rep.add_exact("completeness", "gns.superselection", ss.completeness_residual, group="superselection")
        rep.results["sectors"] = ss.sector_dims
        rep.results["center_dim"] = ss.center_dim
    rep.results.update(algebra=algebra, state=state)
    return rep


def suite_grassmann_cc(n: int, samples: int, seed: Optional[int], out: Optional[Path]) -> VerificationReport:
    rep = VerificationReport("grassmann-cc")
    fam = gr.enumerate_states(n)
    rep.add_flag("unique-state", "grassmann.uniqueness", fam.unique, group="states", free_parameters=fam.free_parameters)
    rep.results["states"] = [str(s.density) for s in fam.states]
    rep.results["forced_zero"] = fam.forced_zero
    rep.results["free_parameters"] = fam.free_parameters
    if fam.states:
        s = fam.states[0]
        p = s.density.pres
        one = gr.berezin_exact(p.unit(), s)
        rep.add_exact("phi(1)=1", "grassmann.normalization", one - 1, group="states")
        if samples:
            rng = np.random.default_rng(seed)
            worst = min(gr.berezin_expectation(f * star(f), s).real for f in (gr.random_element(p, rng) for _ in range(samples)))
            rep.add_numeric("positivity", "grassmann.positivity", max(0.0, -worst), 1e-12, group="states", samples=samples)
        if n >= 2:
            W = gr.witness_observables(p)
            cc = gr.cc_check(p, W, [s])
            rep.add_flag("cc-witness", "grassmann.cc", not cc.passed and cc.condition == "observables", group="cc")
            rep.results["cc"] = {
                "verdict": "pass" if cc.passed else "witness",
                "condition": cc.condition,
                "observables": [str(w) for w in W],
                "expectations": list(cc.values) if cc.values else None,
            }
    return rep


def suite_noether(out: Optional[Path]) -> VerificationReport:
    return dyn.noether_check()


def suite_evolve(L: float, N: int, hbar: float, m: float, potential: str, omega: float, x0: float, p0: float, sigma: float, t: float, steps: int, tol: float, out: Optional[Path]) -> VerificationReport:
    grid = dyn.PhaseGrid(L, N, hbar)
    rep = VerificationReport("evolve")
    if potential == "free":
        V = np.zeros(N)
        psi0 = dyn.gaussian(grid, x0, sigma, p0)
        psi = dyn.schrodinger_evolve(psi0, V, t, steps, m)
        w2 = psi.var_x()
        exact = dyn.free_width_squared(sigma, t, m, hbar)
        rep.add_numeric("width-law", "dynamics.schrodinger", abs(w2 - exact) / exact, tol, group="evolve", width2=w2, closed_form=exact)
    elif potential == "harmonic":
        V = 0.5 * m * omega**2 * grid.x**2
        psi0 = dyn.coherent_state(grid, m, omega, x0, p0)
        period = 2 * np.pi / omega
        psi = dyn.schrodinger_evolve(psi0, V, period, steps, m)
        fid = abs(psi0.overlap(psi)) ** 2
        rep.add_numeric("coherent-return", "dynamics.schrodinger", 1 - fid, 1e-8, group="evolve", fidelity=fid)
        e0, e1 = dyn.energy(psi0, V, m), dyn.energy(psi, V, m)
        rep.add_numeric("energy-drift", "dynamics.schrodinger", abs(e1 - e0) / abs(e0), 1e-8, group="evolve")
    else:
        raise SchemaError(f"unknown potential {potential!r} (free or harmonic)")
    rep.add_numeric("norm", "dynamics.schrodinger", abs(psi.norm() - 1), 1e-12 * steps, group="evolve")
    rep.results["boundary_mass"] = psi.boundary_mass()
    if out is not None:
        psi.to_csv(out / "psi.csv")
    return rep


def suite_localize(L: float, N: int, x0: float, sigma: float, seed: Optional[int], tol: float, out: Optional[Path]) -> VerificationReport:
    grid = dyn.PhaseGrid(L, N)
    psi = dyn.gaussian(grid, x0, sigma)
    rep = dyn.localization_check(grid, psi, seed=seed or 0)
    pov = dyn.PobvmGrid(grid)
    half = (-L / 2, grid.x[N // 2] - grid.dx / 2)
    prob = pov.probability(psi, half)
    oracle = 0.5 * (1 + erf((half[1] - x0) / (sigma * sqrt(2))))
    rep.add_numeric("half-line-erf", "dynamics.localization", abs(prob - oracle), tol, group="oracle", probability=prob, oracle=oracle)
    return rep


def suite_weyl_check(L: float, N: int, a_cells: int, b_modes: float, out: Optional[Path]) -> VerificationReport:
    grid = dyn.PhaseGrid(L, N, 1.0)
    rep = dyn.weyl_relations_check(grid, a_cells * grid.dx, 2 * np.pi / L * b_modes)
    rep.results.update(a=a_cells * grid.dx, b=2 * np.pi / L * b_modes)
    return rep


def suite_wigner(N: int, hbar: float, m: float, omega: float, x0: float, p0: float, tol: float, out: Optional[Path]) -> VerificationReport:
    L = float(np.sqrt(2 * np.pi * hbar * N))
    grid = dyn.PhaseGrid(L, N, hbar)
    psi = dyn.coherent_state(grid, m, omega, x0, p0)
    W = wwm.wigner(psi)
    rep = VerificationReport("wigner")
    rep.add_numeric("real", "wwm.wigner", W.imag_residual, 1e-12, group="wigner")
    rep.add_numeric("mass", "wwm.wigner", abs(W.mass() - 1), 1e-10, group="wigner")
    rep.add_numeric("x-marginal", "wwm.wigner", float(np.max(np.abs(W.marginal_x() - psi.density()))), tol, group="wigner")
    rep.add_numeric("purity", "wwm.wigner", abs(W.purity() - 1), tol, group="wigner")
    X, P = wwm.phase_mesh(grid)
    s = m * omega
    exact = np.exp(-(s * (X - x0) ** 2 + (P - p0) ** 2 / s) / hbar) / (np.pi * hbar)
    rep.add_numeric("coherent-closed-form", "wwm.wigner", float(np.max(np.abs(W.values - exact))), tol, group="wigner")
    rep.extend(wwm.born_check(grid, psi, tol, m, omega))
    if out is not None:
        W.to_csv(out / "wigner.csv")
    return rep


def suite_star(N: int, hbar: float, order: int, hbars: List[float], tol_series: float, tol_quadrature: float, out: Optional[Path]) -> VerificationReport:
    grid = dyn.PhaseGrid(float(np.sqrt(2 * np.pi * hbar * N)), N, hbar)
    rep = VerificationReport("star")
    rep.add_numeric("calibration-series", "wwm.calibration", wwm.calibration_residual(grid, "series", order=order), tol_series, group="calibration")
    rep.add_numeric("calibration-quadrature", "wwm.calibration", wwm.calibration_residual(grid, "quadrature"), tol_quadrature, group="calibration")
    x = wwm.symbol(grid, lambda X, P: X)
    p = wwm.symbol(grid, lambda X, P: P)
    mb = wwm.moyal_bracket(p, x, order=order)
    rep.add_numeric("{p,x}_M=1", "wwm.moyal", float(np.max(np.abs(mb.values - 1))), tol_series, group="moyal")
    x2, p2 = x * x, p * p
    R = wwm.semiclassical_remainder(x2, p2, hbar, order)
    rep.add_numeric("x^2*p^2-remainder", "wwm.semiclassical", float(np.max(np.abs(np.abs(R.values) - hbar**2 / 2))), tol_series * max(1.0, hbar**2), group="semiclassical")
    top = max(hbars)
    sgrid = dyn.PhaseGrid(float(np.sqrt(2 * np.pi * top * N)), N, top)
    f = wwm.symbol(sgrid, lambda X, P: np.exp(-((X - 0.3) ** 2) - P**2))
    g = wwm.symbol(sgrid, lambda X, P: np.exp(-(X**2) - 2 * (P + 0.2) ** 2))
    fit = wwm.semiclassical_scaling(f, g, hbars, order)
    rep.add_numeric("gaussian-slope", "wwm.semiclassical", abs(fit.slope - 2), 0.2, group="semiclassical", slope=fit.slope)
    scaling = {"slope": fit.slope, "intercept": fit.intercept, "residuals": fit.residuals, "hbars": fit.hbars, "remainders": fit.remainders, "quadrature_gap": fit.quadrature_gap}
    rep.results["scaling"] = scaling
    if out is not None:
        (out / "scaling.json").write_text(json.dumps(scaling, indent=2, sort_keys=True) + "\n")
    return rep


def suite_classical_limit(case: str, N: int, t: float, hbars: List[float], tol: float, out: Optional[Path]) -> VerificationReport:
    rep = VerificationReport("classical-limit")
    if case in ("harmonic", "free"):
        grid = dyn.PhaseGrid(float(np.sqrt(2 * np.pi * N)), N, 1.0)
        rho0 = wwm.gaussian_density(1.0, 0.5, sqrt(0.5), sqrt(0.5))
        if case == "harmonic":
            V = Polynomial([0, 0, 0.5])
            t = 2 * np.pi if t <= 0 else t
        else:
            V = Polynomial([0.0])
            t = 2.0 if t <= 0 else t
        r = wwm.classical_limit_compare(V, rho0, t, grid)
        rep.add_numeric("l1-gap", "wwm.classical_limit", r.l1_gap, tol, group="classical-limit", dt=r.dt, steps=r.steps)
        for k, v in r.expectation_gaps.items():
            rep.add_numeric(f"<{k}>-gap", "wwm.classical_limit", v, tol, group="classical-limit")
        if case == "free":
            X, P = wwm.phase_mesh(grid)
            cell = grid.dx * grid.dp
            mean_x = float(np.sum(X * r.quantum) * cell)
            rep.add_numeric("ehrenfest", "wwm.classical_limit", abs(mean_x - (1.0 + 0.5 * t)), tol, group="classical-limit")
        if out is not None:
            np.savetxt(out / "classical_gap.csv", np.column_stack([wwm.phase_mesh(grid)[0].ravel(), wwm.phase_mesh(grid)[1].ravel(), (r.quantum - r.classical).ravel()]), delimiter=",", header="x,p,gap", comments="", fmt="%.17g")
    elif case == "quartic":
        fit = wwm.quartic_sweep(hbars, N=N, t=t if t > 0 else 1.0)
        rep.add_numeric("gap-slope", "wwm.classical_limit", abs(fit.slope - 2), 0.2, group="classical-limit", slope=fit.slope)
        rep.results["scaling"] = {"slope": fit.slope, "intercept": fit.intercept, "residuals": fit.residuals, "hbars": fit.hbars, "gaps": fit.remainders}
    else:
        raise SchemaError(f"unknown case {case!r} (harmonic, free or quartic)")
    rep.results["case"] = case
    return rep


SUITES: Dict[str, Suite] = {
    "verify-algebra": Suite("verify-algebra", {"preset": (str, "galilei"), "intermediate": (_bool, False)}, suite_verify_algebra),
    "gns": Suite(
        "gns",
        {"algebra": (str, "mat:2"), "state": (str, "e11"), "sectors": (_strs, []), "seed": (int, None), "tol": (float, 1e-12)},
        suite_gns,
        random=lambda p: any(s.startswith(("random", "pure:")) for s in [p["state"], *p["sectors"]]),
    ),
    "grassmann-cc": Suite("grassmann-cc", {"n": (int, 3), "samples": (int, 500), "seed": (int, None)}, suite_grassmann_cc, random=lambda p: p["samples"] > 0),
    "noether": Suite("noether", {}, suite_noether),
    "evolve": Suite(
        "evolve",
        {
            "L": (float, 80.0), "N": (_pow2, 512), "hbar": (float, 1.0), "m": (float, 1.0), "potential": (str, "free"),
            "omega": (float, 1.0), "x0": (float, 0.0), "p0": (float, 0.0), "sigma": (float, 1.0), "t": (float, 1.0),
            "steps": (int, 100), "tol": (float, 1e-6),
        },
        suite_evolve,
    ),
    "localize": Suite(
        "localize",
        {"L": (float, 40.0), "N": (_pow2, 8192), "x0": (float, 0.0), "sigma": (float, 1.0), "seed": (int, None), "tol": (float, 1e-6)},
        suite_localize,
        random=lambda p: True,
    ),
    "weyl-check": Suite("weyl-check", {"L": (float, 20.0), "N": (_pow2, 256), "a_cells": (int, 64), "b_modes": (float, 32.0)}, suite_weyl_check),
    "wigner": Suite(
        "wigner",
        {"N": (_pow2, 128), "hbar": (float, 1.0), "m": (float, 1.0), "omega": (float, 1.0), "x0": (float, 0.0), "p0": (float, 0.0), "tol": (float, 1e-8)},
        suite_wigner,
    ),
    "star": Suite(
        "star",
        {"N": (_pow2, 64), "hbar": (float, 1.0), "order": (int, 4), "hbars": (_floats, [0.1, 0.05, 0.025, 0.0125]), "tol_series": (float, 1e-8), "tol_quadrature": (float, 1e-6)},
        suite_star,
    ),
    "classical-limit": Suite(
        "classical-limit",
        {"case": (str, "harmonic"), "N": (_pow2, 128), "t": (float, 0.0), "hbars": (_floats, [0.1, 0.05, 0.025, 0.0125]), "tol": (float, 1e-6)},
        suite_classical_limit,
    ),
}


def run_suite(name: str, params: Optional[Dict[str, Any]] = None, out: Optional[Path] = None, require_seed: bool = False) -> VerificationReport:
    if name not in SUITES:
        raise SchemaError(f"unknown suite {name!r}; available: {sorted(SUITES)}")
    suite = SUITES[name]
    args = suite.validate(dict(params or {}), require_seed)
    rep = suite.runner(**args, out=out)
    rep.suite = name
    rep.results.setdefault("params", args)
    return rep.finish()
