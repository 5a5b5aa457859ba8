"""Command-line interface: scenario files in, JSON reports out.

Exit codes: 0 when the computation finished (whatever the verdict), 2 for
unreadable input, 3 for input that fails validation, 4 when a solver could
not produce a trustworthy answer.

Scenario paths that do not exist are looked up by base name among the
scenarios shipped with the package, so ``examples/box2`` works anywhere.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import classical, entanglement, io, linalg, quantum, quasiprob, sos
from .errors import IncoherentError, NumericalFailure, UndefinedConditional

SEED_ENV = "PCOHERENT_SEED"

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_SOLVER = 0, 2, 3, 4


class InputError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


REAL_VECTOR = {"type": "array", "minItems": 1, "items": {"type": "number"}}
DIMS = {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 2}}
POLY = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["alpha", "beta", "coeff"],
        "properties": {
            "alpha": {"type": "integer", "minimum": 0},
            "beta": {"type": "integer", "minimum": 0},
            "coeff": {"type": "number"},
        },
    },
}
COMMON = {"kind": {"type": "string"}, "seed": {"type": "integer", "minimum": 0}, "description": {"type": "string"}}

SCHEMAS = {
    "classical": {
        "type": "object",
        "required": ["kind", "assessments"],
        "properties": {
            **COMMON,
            "omega": {"type": "array", "items": {"type": "string"}},
            "omega_size": {"type": "integer", "minimum": 1},
            "assessments": {"type": "array", "items": REAL_VECTOR},
            "query": REAL_VECTOR,
        },
    },
    "quantum": {
        "type": "object",
        "required": ["kind", "dims"],
        "properties": {
            **COMMON,
            "dims": DIMS,
            "assessments": {"type": "array", "items": io.MATRIX},
            "pin_state": io.MATRIX,
            "query": io.MATRIX,
            "state": io.MATRIX,
            "projector": io.MATRIX,
            "measurement": {"type": "array", "items": io.MATRIX},
            "unitary": io.MATRIX,
        },
    },
    "witness": {
        "type": "object",
        "required": ["kind", "dims", "state"],
        "properties": {
            **COMMON,
            "dims": DIMS,
            "gamble": io.MATRIX,
            "state": io.MATRIX,
            "epsilon": {"type": "number", "minimum": 0},
            "from_ppt": {"type": "boolean"},
            "restarts": {"type": "integer", "minimum": 1},
        },
    },
    "chsh": {
        "type": "object",
        "required": ["kind", "angles", "state"],
        "properties": {
            **COMMON,
            "angles": {
                "type": "object",
                "required": ["alpha1", "alpha2", "beta1", "beta2"],
                "properties": {k: {"type": "number"} for k in ("alpha1", "alpha2", "beta1", "beta2")},
            },
            "state": io.MATRIX,
            "restarts": {"type": "integer", "minimum": 1},
        },
    },
    "quasifit": {
        "type": "object",
        "required": ["kind"],
        "properties": {
            **COMMON,
            "dims": DIMS,
            "state": io.MATRIX,
            "k_atoms": {"type": "integer", "minimum": 1},
            "nonnegative": {"type": "boolean"},
            "charge": {"type": "string", "enum": ["box1"]},
        },
    },
    "sos": {
        "type": "object",
        "required": ["kind"],
        "properties": {
            **COMMON,
            "poly": POLY,
            "named_poly": {"type": "string", "enum": ["motzkin", "neg_motzkin"]},
            "moment": io.MATRIX,
            "named_moment": {"type": "string", "enum": ["ze"]},
        },
    },
}

# which scenario kind each command consumes
KIND_OF = {
    "coherence classical": "classical",
    "prevision classical": "classical",
    "coherence quantum": "quantum",
    "prevision quantum": "quantum",
    "condition": "quantum",
    "evolve": "quantum",
    "witness": "witness",
    "chsh": "chsh",
    "quasifit": "quasifit",
    "sos gram": "sos",
    "sos eval": "sos",
}


def shipped_scenarios() -> dict:
    root = resources.files("pcoherent.scenarios")
    return {Path(p.name).stem: p for p in root.iterdir() if p.name.endswith(".json")}


def resolve_scenario(path: str):
    p = Path(path)
    if p.is_file():
        return p.read_text(encoding="utf-8")
    name = p.name[:-5] if p.name.endswith(".json") else p.name
    shipped = shipped_scenarios()
    if name in shipped:
        return shipped[name].read_text(encoding="utf-8")
    raise InputError(f"scenario not found: {path}", EXIT_PARSE)


def load_scenario(path: str, command: str) -> dict:
    text = resolve_scenario(path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"cannot parse {path}: {e}", EXIT_PARSE) from None
    kind = KIND_OF[command]
    if not isinstance(data, dict) or data.get("kind") != kind:
        raise InputError(f"command '{command}' needs a scenario of kind '{kind}'", EXIT_VALIDATION)
    try:
        jsonschema.validate(data, SCHEMAS[kind])
    except jsonschema.ValidationError as e:
        raise InputError(f"invalid scenario: {e.message}", EXIT_VALIDATION) from None
    return data


def _hermitian(rows, what):
    try:
        return linalg.hermitian(io.parse_matrix(rows))
    except ValueError as e:
        raise ValueError(f"{what}: {e}") from None


# command handlers; each returns the report body


def _classical_set(sc):
    n = sc.get("omega_size") or (len(sc["omega"]) if "omega" in sc else None)
    return classical.AssessmentSet(sc["assessments"], n, sc.get("omega", ()))


def _book(b):
    return None if b is None else {"coefficients": b.coefficients, "combined": b.combined, "sure_loss": b.sure_loss}


def cmd_coherence_classical(sc, args):
    a = _classical_set(sc)
    out = {"verdict": "coherent" if a.is_coherent else "incoherent", "outcomes": list(a.labels)}
    if a.is_coherent:
        out["credal_witness"] = classical.credal_witness(a).pmf
    else:
        out["dutch_book"] = _book(a.dutch_book)
    return out


def cmd_prevision_classical(sc, args):
    a = _classical_set(sc)
    if "query" not in sc:
        raise ValueError("prevision needs a 'query' gamble")
    if not a.is_coherent:
        return {"verdict": "incoherent", "dutch_book": _book(a.dutch_book)}
    lo = classical.solve_lower_prevision(a, sc["query"])
    up = classical.solve_lower_prevision(a, -np.asarray(sc["query"], dtype=float))
    return {
        "verdict": "coherent",
        "lower_prevision": lo.value,
        "upper_prevision": -up.value,
        "lower_certificate": {"stakes": lo.coefficients, "pmf": lo.pmf},
        "upper_certificate": {"stakes": up.coefficients, "pmf": up.pmf},
        "diagnostics": {"pivots": [lo.report.iterations, up.report.iterations], "gaps": [lo.report.gap, up.report.gap]},
    }


def _quantum_set(sc):
    dims = quantum.system_shape(sc["dims"])
    gs = [_hermitian(m, "assessment") for m in sc.get("assessments", [])]
    a = quantum.QuantumAssessmentSet(gs, dims)
    if "pin_state" in sc:
        pin = quantum.pin_state_assessments(_hermitian(sc["pin_state"], "pin_state"), dims)
        a = quantum.QuantumAssessmentSet(a.gambles + pin.gambles, dims)
    return a


def _coherence_diag(a):
    r = a._coherence.report
    return {"margin": a._coherence.tau, "iterations": r.iterations, "gap": r.gap}


def cmd_coherence_quantum(sc, args):
    a = _quantum_set(sc)
    out = {"verdict": "p-coherent" if a.is_p_coherent else "p-incoherent", "n_assessments": len(a)}
    if a.is_p_coherent:
        out["dual_state"] = io.complex_matrix(quantum.dual_state(a))
    else:
        out["certificate"] = {"lambda": a.certificate.lam, "M": io.complex_matrix(a.certificate.M)}
    out["diagnostics"] = _coherence_diag(a)
    return out


def cmd_prevision_quantum(sc, args):
    a = _quantum_set(sc)
    if "query" not in sc:
        raise ValueError("prevision needs a 'query' matrix")
    F = quantum.HermitianGamble(_hermitian(sc["query"], "query"), a.dims)
    if not a.is_p_coherent:
        c = a.certificate
        return {"verdict": "p-incoherent", "certificate": {"lambda": c.lam, "M": io.complex_matrix(c.M)}}
    lo = quantum.solve_lower_prevision(a, F)
    up = quantum.solve_lower_prevision(a, -F)

    def side(r):
        return {
            "value": r.value,
            "primal_value": r.primal_value,
            "gap": r.gap,
            "duality_ok": r.duality_ok,
            "lambda": r.lam,
            "rho": io.complex_matrix(r.rho),
            "iterations": r.solve.iterations,
        }

    return {
        "verdict": "p-coherent",
        "lower_prevision": lo.value,
        "upper_prevision": -up.value,
        "lower": side(lo),
        "upper": side(up),
        "sigma_class": quantum.sigma_class(F, args.tol),
    }


def _state(sc, key="state"):
    if key not in sc:
        raise ValueError(f"scenario needs a '{key}'")
    return quantum.density_matrix(_hermitian(sc[key], key))


def cmd_condition(sc, args):
    rho = _state(sc)
    if "projector" not in sc:
        raise ValueError("condition needs a 'projector'")
    P = _hermitian(sc["projector"], "projector")
    prior = float(np.trace(P @ rho).real)
    try:
        post = quantum.luder_condition(rho, P)
    except UndefinedConditional as e:
        return {"verdict": "undefined", "reason": str(e), "probability": prior}
    return {
        "verdict": "defined",
        "probability": prior,
        "posterior": io.complex_matrix(post),
        "posterior_probability": float(np.trace(P @ post).real),
    }


def cmd_evolve(sc, args):
    rho = _state(sc)
    if "unitary" not in sc:
        raise ValueError("evolve needs a 'unitary'")
    U = io.parse_matrix(sc["unitary"])
    out_state = quantum.unitary_evolve(rho, U)
    out = {
        "state": io.complex_matrix(out_state),
        "spectrum_before": linalg.eigvalsh(rho),
        "spectrum_after": linalg.eigvalsh(out_state),
    }
    if "measurement" in sc:
        ps = [_hermitian(m, "measurement") for m in sc["measurement"]]
        out["born_before"] = quantum.born_probabilities(rho, ps)
        out["born_after"] = quantum.born_probabilities(out_state, ps)
    return out


def _tol(args, default):
    return default if args.tol is None else args.tol


def _product_state(s):
    return [io.complex_vector(f) for f in s.factors]


def cmd_witness(sc, args):
    dims = tuple(sc["dims"])
    rho = _state(sc)
    restarts = sc.get("restarts", entanglement.DEFAULT_RESTARTS)
    out = {}
    if sc.get("from_ppt"):
        ppt = entanglement.ppt_check(rho, dims, tol=_tol(args, 1e-9))
        out["ppt"] = {"entangled": ppt.entangled, "min_eigenvalue": ppt.min_eigenvalue, "exact": ppt.exact}
        if not ppt.entangled:
            out["verdict"] = "no witness"
            return out
        W = entanglement.witness_from_ppt(rho, dims, restarts=restarts, rng_seed=args.seed)
        out["witness"] = io.complex_matrix(W.G)
        out["trace_rho_w"] = float(np.trace(rho @ W.G).real)
        h = -W
    else:
        if "gamble" not in sc:
            raise ValueError("witness needs a 'gamble' or 'from_ppt': true")
        h = quantum.HermitianGamble(_hermitian(sc["gamble"], "gamble"), dims)
    eps = sc.get("epsilon", 0.0)
    r = entanglement.witness_check(h, rho, eps, tol=_tol(args, 1e-9), restarts=restarts, rng_seed=args.seed, threads=args.threads)
    out.update(
        {
            "verdict": "dutch book" if r.condition_holds else "no dutch book",
            "epsilon": r.epsilon,
            "trace_value": r.trace_value,
            "product_max": r.product_max,
            "product_max_state": _product_state(r.product_max_state),
            "upper_bound": r.upper_bound,
            "condition_holds": r.condition_holds,
            "epsilon_band": {"lower_open": r.epsilon_band[0], "upper_closed": r.epsilon_band[1], "nonempty": r.band_nonempty},
            "restarts": r.restarts,
            "note": "product_max is an attained value, a lower bound on the supremum over product states",
        }
    )
    return out


def cmd_chsh(sc, args):
    c = entanglement.ChshConfig(**sc["angles"])
    rho = _state(sc)
    restarts = sc.get("restarts", entanglement.DEFAULT_RESTARTS)
    r = entanglement.bell_gap_report(c, rho, restarts=restarts, rng_seed=args.seed, threads=args.threads)
    return {
        "operator": io.complex_matrix(entanglement.chsh_operator(c).G),
        "quantum_value": r.quantum_value,
        "product_max": r.product_max,
        "product_max_state": _product_state(r.product_max_state),
        "classical_bound": r.classical_bound,
        "lambda_max": r.lambda_max,
        "chain_holds": r.chain_holds,
    }


def _charge_report(c):
    return {
        "atoms": quasiprob.charge_to_records(c),
        "weight_sum": float(c.weights.sum()),
        "min_weight": c.min_weight,
        "moment_matrix": io.complex_matrix(quasiprob.charge_moment_matrix(c)),
        "marginals": [io.complex_matrix(quasiprob.marginal_moments(c, j)) for j in range(len(c.dims))],
    }


def cmd_quasifit(sc, args):
    if sc.get("charge") == "box1":
        c = quasiprob.box1_charge()
        out = _charge_report(c)
        if "state" in sc:
            out["max_deviation"] = float(np.abs(quasiprob.charge_moment_matrix(c) - _state(sc)).max())
        return out
    rho = _state(sc)
    dims = tuple(sc.get("dims", (rho.shape[0],)))
    k = sc.get("k_atoms", rho.shape[0] ** 2 + 4)
    if len(dims) == 1:
        return {"method": "eigen", **_charge_report(quasiprob.eigen_charge(rho, dims))}
    out = {"method": "least-squares", **_charge_report(quasiprob.fit_signed_charge(rho, dims, k, args.seed))}
    if sc.get("nonnegative"):
        nn = quasiprob.nonnegative_charge(rho, dims, k, args.seed)
        out["nonnegative"] = None if nn is None else _charge_report(nn)
    return out


def _poly(sc):
    if "named_poly" in sc:
        m = sos.motzkin()
        return m if sc["named_poly"] == "motzkin" else -m
    if "poly" in sc:
        return sos.Poly2.from_records(sc["poly"])
    raise ValueError("scenario needs 'poly' or 'named_poly'")


def _sos_result(r):
    out = {"sos": r.sos, "margin": r.margin, "iterations": r.report.iterations}
    if r.sos:
        out["gram"] = io.real_matrix(r.gram)
    else:
        out["moment_certificate"] = io.real_matrix(r.moment)
        out["certificate_verified"] = True
    return out


def cmd_sos_gram(sc, args):
    p = _poly(sc)
    out = {"poly": p.to_records(), **_sos_result(sos.gram_sos_feasible(p, _tol(args, 1e-9)))}
    if p.exact:
        w = sos.exact_non_sos_witness(p)
        out["exact_forced_diagonal"] = None if w is None else {"monomial": w.monomial, "target": w.target, "value": w.value}
    return out


def _moment(sc):
    if "moment" in sc:
        M = io.parse_matrix(sc["moment"])
        if np.abs(M.imag).max() > 0:
            raise ValueError("moment matrices are real")
        R = M.real
        return sos.MomentMatrixZ(R.astype(np.int64) if np.all(R == np.round(R)) and np.abs(R).max() < 2**53 else R)
    return sos.ze_matrix()


def cmd_sos_eval(sc, args):
    p = _poly(sc)
    Z = _moment(sc)
    return {"poly": p.to_records(), "value": sos.lb_evaluate(Z, p), "moment_min_eigenvalue": float(linalg.eigvalsh(Z.Z.astype(float))[0])}


def cmd_sos_motzkin(sc, args):
    m = sos.motzkin()
    Z = sos.ze_matrix()
    r = sos.gram_sos_feasible(m, _tol(args, 1e-9))
    w = sos.exact_non_sos_witness(m)
    return {
        "poly": m.to_records(),
        "L_neg_motzkin": sos.lb_evaluate(Z, -m),
        "gram": _sos_result(r),
        "exact_forced_diagonal": None if w is None else {"monomial": w.monomial, "target": w.target, "value": w.value},
        "ze_min_eigenvalue": float(linalg.eigvalsh(Z.Z.astype(float))[0]),
        "ze_psd": True,
        "marginal_x1": io.real_matrix(sos.marginal_moment_matrix(Z, 1)),
        "marginal_x2": io.real_matrix(sos.marginal_moment_matrix(Z, 2)),
        "grid_min": sos.grid_min(m),
    }


HANDLERS = {
    "coherence classical": cmd_coherence_classical,
    "prevision classical": cmd_prevision_classical,
    "coherence quantum": cmd_coherence_quantum,
    "prevision quantum": cmd_prevision_quantum,
    "condition": cmd_condition,
    "evolve": cmd_evolve,
    "witness": cmd_witness,
    "chsh": cmd_chsh,
    "quasifit": cmd_quasifit,
    "sos gram": cmd_sos_gram,
    "sos eval": cmd_sos_eval,
    "sos motzkin": cmd_sos_motzkin,
}


def _default_seed() -> int:
    v = os.environ.get(SEED_ENV)
    if v is None:
        return 0
    try:
        s = int(v)
    except ValueError:
        raise InputError(f"{SEED_ENV} must be a nonnegative integer", EXIT_VALIDATION) from None
    if s < 0:
        raise InputError(f"{SEED_ENV} must be a nonnegative integer", EXIT_VALIDATION)
    return s


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--seed", type=int, default=argparse.SUPPRESS, help=f"random seed (default: the scenario's, then ${SEED_ENV}, then 0)"
    )
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="override the decision tolerance")
    common.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS, help="solver traces on stderr")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker threads for see-saw restarts")

    parser = argparse.ArgumentParser(prog="pcoherent", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    def with_file(p):
        p.add_argument("scenario", help="scenario JSON file (or the name of a shipped scenario)")

    for name in ("coherence", "prevision"):
        p = sub.add_parser(name, parents=[common])
        s2 = p.add_subparsers(dest="theory", required=True)
        for theory in ("classical", "quantum"):
            with_file(s2.add_parser(theory, parents=[common]))
    for name in ("witness", "chsh", "quasifit", "condition", "evolve"):
        with_file(sub.add_parser(name, parents=[common]))
    p = sub.add_parser("sos", parents=[common])
    s2 = p.add_subparsers(dest="action", required=True)
    s2.add_parser("motzkin", parents=[common])
    for action in ("gram", "eval"):
        with_file(s2.add_parser(action, parents=[common]))
    return parser


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    for name, default in (("tol", None), ("verbose", False), ("threads", 1)):
        if not hasattr(args, name):
            setattr(args, name, default)
    command = args.command
    if command in ("coherence", "prevision"):
        command = f"{command} {args.theory}"
    elif command == "sos":
        command = f"sos {args.action}"
    if args.verbose:
        logging.basicConfig(level=logging.DEBUG, stream=sys.stderr, format="%(name)s: %(message)s")
    try:
        sc = load_scenario(args.scenario, command) if command in KIND_OF else {}
        if not hasattr(args, "seed"):
            args.seed = sc["seed"] if "seed" in sc else _default_seed()
        if args.seed < 0 or args.threads < 1 or (args.tol is not None and not args.tol >= 0):
            raise InputError("seed and tol must be nonnegative and threads positive", EXIT_VALIDATION)
        body = HANDLERS[command](sc, args)
    except InputError as e:
        print(f"pcoherent: {e}", file=sys.stderr)
        return e.code
    except NumericalFailure as e:
        print(f"pcoherent: solver failure: {e}", file=sys.stderr)
        return EXIT_SOLVER
    except IncoherentError as e:
        print(f"pcoherent: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ValueError, TypeError) as e:
        print(f"pcoherent: invalid input: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    report = {"command": command, "seed": args.seed, "input": sc, **body}
    stdout.write(io.dumps(report))
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))
