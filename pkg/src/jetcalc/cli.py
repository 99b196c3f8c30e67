"""Command-line front end.

Every subcommand prints canonical text (default) or one JSON document
``{"spec": {...}, "result": {...}, "warnings": [...]}``.  Errors go to
stderr; the exit code is 2 for malformed input and 3 for violated
preconditions.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import fock
from .errors import InputError, JetError, ParseError
from .expr import JetSpec, parse, render
from .forms import (
    Evolution,
    contact_component,
    contact_homotopy,
    contact_structure_decomposition,
    is_strongly_contact,
    parse_form,
    render as render_form,
)
from .multiindex import render as render_index
from .prolong import check_el_naturality, load_morphism, prolong_evolution, prolong_morphism
from .variational import (
    HyperJacobianCoeffs,
    Lagrangian,
    SourceForm,
    check_highest_order_system,
    euler_lagrange,
    helmholtz,
    hyper_jacobian,
    is_variationally_trivial,
    tonti_lagrangian,
    trivial_lagrangian_from_coeffs,
)

FUNCTION_WARNING = (
    "input contains elementary functions; a false verdict may be spurious "
    "because zero testing is only complete for polynomials"
)


class Problem:
    """Jet space and input strings gathered from flags and an optional problem file."""

    def __init__(self, args):
        data = {}
        if getattr(args, "input", None) and args.command not in ("fock-trace", "fock-solve", "trivial"):
            data = _read_json(args.input)
        self.n = args.n if args.n is not None else int(data.get("n", 1))
        self.m = args.m if args.m is not None else int(data.get("m", 1))
        self.r = args.order if args.order is not None else int(data.get("order", 1))
        self.spec = JetSpec(self.n, self.m, self.r)
        self.lagrangian = getattr(args, "lagrangian", None) or data.get("lagrangian")
        self.equation = getattr(args, "equation", None) or data.get("equation")
        self.form = getattr(args, "form", None) or data.get("form")
        self.warnings = []

    def as_json(self):
        return {"n": self.n, "m": self.m, "order": self.r}

    def need(self, name):
        value = getattr(self, name)
        if value is None:
            raise InputError(f"missing --{name}")
        return value

    def lagrangian_value(self) -> Lagrangian:
        return Lagrangian(self.spec, parse(self.need("lagrangian"), self.spec))

    def source_form(self) -> SourceForm:
        eq = self.need("equation")
        if isinstance(eq, str):
            eq = [eq]
        if len(eq) != self.m:
            raise InputError(f"need {self.m} equation components, got {len(eq)}")
        return SourceForm(self.spec, tuple(parse(e, self.spec) for e in eq))

    def form_value(self):
        return parse_form(self.need("form"), self.spec)


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _read_text(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _flag(value: bool) -> str:
    return "true" if value else "false"


def _verdict(problem, value, exprs):
    if not value and any(e.has_functions() for e in exprs):
        problem.warnings.append(FUNCTION_WARNING)
    return value


# -- subcommands: each returns (text lines, json result) -----------------------------


def cmd_el(args, problem):
    T = euler_lagrange(problem.lagrangian_value())
    comps = {f"T{s}": render(c) for s, c in enumerate(T.components, start=1)}
    return [f"{k} = {v}" for k, v in comps.items()], {"components": comps}


def _helmholtz_label(J, sigma, nu):
    return f"H^{render_index(J)}_({sigma},{nu})"


def cmd_helmholtz(args, problem):
    T = problem.source_form()
    table = helmholtz(T)
    entries = {_helmholtz_label(*key): render(v) for key, v in sorted(table.entries.items(), key=_table_key)}
    verdict = _verdict(problem, table.all_zero(), T.components)
    lines = [f"{k} = {v}" for k, v in entries.items()] + [f"variational: {_flag(verdict)}"]
    return lines, {"table": entries, "variational": verdict}


def _table_key(item):
    (J, sigma, nu), _ = item
    return (len(J), J, sigma, nu)


def cmd_variational(args, problem):
    T = problem.source_form()
    verdict = _verdict(problem, helmholtz(T).all_zero(), T.components)
    return [f"variational: {_flag(verdict)}"], {"variational": verdict}


def cmd_tonti(args, problem):
    lam = tonti_lagrangian(problem.source_form())
    text = render(lam.L)
    return [f"L = {text}"], {"lagrangian": text}


def _load_coeffs(path):
    data = _read_json(path)
    try:
        n, m, r = int(data["n"]), int(data["m"]), int(data["order"])
        spec = JetSpec(n, m, r)
        span = n - 1 if data.get("kind", "lagrangian") == "lagrangian" else n
        fam = HyperJacobianCoeffs(n, m, r - 1, span)
        for entry in data.get("entries", []):
            pairs = [(int(s), tuple(int(i) for i in I)) for s, I in entry["pairs"]]
            free = [int(i) for i in entry.get("free", [])]
            fam.set(pairs, free, parse(str(entry["value"]), spec.with_order(max(r - 1, 0))))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed coefficient file: {exc}") from exc
    return spec, fam


def cmd_trivial(args, problem):
    if args.input:
        spec, fam = _load_coeffs(args.input)
        lam, V = trivial_lagrangian_from_coeffs(fam, spec)
        comps = {f"V{j}": render(v) for j, v in enumerate(V, start=1)}
        lines = [f"L = {render(lam.L)}"] + [f"{k} = {v}" for k, v in comps.items()]
        return lines, {"lagrangian": render(lam.L), "divergence": comps}
    lam = problem.lagrangian_value()
    verdict = _verdict(problem, is_variationally_trivial(lam), [lam.L])
    return [f"trivial: {_flag(verdict)}"], {"trivial": verdict}


def _parse_pair(text):
    sigma, _, multi = text.partition(":")
    try:
        body = multi.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ValueError
        return int(sigma), tuple(int(v) for v in body[1:-1].split())
    except ValueError as exc:
        raise ParseError(f"pair must look like 1:[1 2], got {text!r}") from exc


def cmd_hyperjac(args, problem):
    pairs = [_parse_pair(p) for p in args.pair or []]
    value = hyper_jacobian(problem.spec, [I for _, I in pairs], [s for s, _ in pairs], args.free or [])
    return [render(value)], {"hyper_jacobian": render(value)}


def cmd_decompose(args, problem):
    rho = problem.form_value()
    if args.structure:
        phi, psi = contact_structure_decomposition(rho)
        phi_out = {f"w{s}_{render_index(J)}": render_form(f) for (s, J), f in phi.items()}
        psi_out = {f"dw{s}_{render_index(I)}": render_form(f) for (s, I), f in psi.items()}
        lines = [f"Phi[{k}] = {v}" for k, v in phi_out.items()]
        lines += [f"Psi[{k}] = {v}" for k, v in psi_out.items()]
        return lines, {"phi": phi_out, "psi": psi_out}
    if args.k is None:
        parts = {str(k): render_form(contact_component(rho, k)) for k in range(rho.degree + 1)}
        return [f"p{k} = {v}" for k, v in parts.items()], {"components": parts}
    text = render_form(contact_component(rho, args.k))
    return [text], {"k": args.k, "component": text}


def cmd_homotopy(args, problem):
    text = render_form(contact_homotopy(problem.form_value()))
    return [text], {"homotopy": text}


def cmd_strong_contact(args, problem):
    verdict = is_strongly_contact(problem.form_value())
    return [f"strongly contact: {_flag(verdict)}"], {"strongly_contact": verdict}


def cmd_prolong(args, problem):
    r = problem.r
    if args.morphism:
        phi = load_morphism(_read_text(args.morphism), problem.n, problem.m)
        comps = prolong_morphism(phi, r)
        lines, result = [], {}
        for (s, J), v in sorted(comps.items(), key=lambda kv: (kv[0][0], len(kv[0][1]), kv[0][1])):
            label = f"F{s}" + ("" if not J else f"_{render_index(J)}")
            result[label] = render(v)
            lines.append(f"{label} = {render(v)}")
        out = {"components": result}
        if problem.lagrangian is not None:
            lam = problem.lagrangian_value()
            verdict = check_el_naturality(phi, lam)
            out["naturality"] = _verdict(problem, verdict, [lam.L])
            lines.append(f"naturality: {_flag(out['naturality'])}")
        return lines, out
    if args.evolution:
        if len(args.evolution) != problem.m:
            raise InputError(f"need {problem.m} evolution components")
        comps = [parse(e, problem.spec) for e in args.evolution]
        order = max(c.order for c in comps)
        xi = Evolution(problem.spec.with_order(order), tuple(comps))
        table = prolong_evolution(xi, r)
        result = {}
        for (s, J), v in sorted(table.items(), key=lambda kv: (kv[0][0], len(kv[0][1]), kv[0][1])):
            result[f"xi{s}" + ("" if not J else f"_{render_index(J)}")] = render(v)
        return [f"{k} = {v}" for k, v in result.items()], {"components": result}
    raise InputError("prolong needs --morphism FILE or --evolution")


def _tensor_lines(label, X):
    dumped = fock.dump_tensor(X)
    if not dumped["entries"]:
        return [f"{label}: 0"], dumped
    lines = [f"{label}:"] + [f"  {render_index(tuple(i))} = {v}" for i, v in dumped["entries"]]
    return lines, dumped


def _load_fock(args):
    if not args.input:
        raise InputError("missing --input tensor file")
    return fock.load_tensor(_read_text(args.input))


def cmd_fock_trace(args, problem):
    X = _load_fock(args)
    X0, parts = fock.trace_decompose(X)
    lines, d0 = _tensor_lines("X0", X0)
    result = {"traceless": d0, "parts": []}
    for alpha, part in enumerate(parts, start=1):
        more, d = _tensor_lines(f"X{alpha}", part)
        lines += more
        result["parts"].append(d)
    return lines, result


def cmd_fock_solve(args, problem):
    X = _load_fock(args)
    parts = fock.solve_kernel_representation(X, args.s)
    lines, result = [], {"parts": []}
    for alpha, part in enumerate(parts, start=1):
        more, d = _tensor_lines(f"X{alpha}", part)
        lines += more
        result["parts"].append(d)
    return lines, result


def cmd_check_system(args, problem):
    lam = problem.lagrangian_value()
    verdict = _verdict(problem, check_highest_order_system(lam), [lam.L])
    return [f"highest-order system: {_flag(verdict)}"], {"highest_order_system": verdict}


COMMANDS = {
    "el": (cmd_el, "Euler-Lagrange expressions of a Lagrangian"),
    "helmholtz": (cmd_helmholtz, "Helmholtz table of a source form"),
    "variational": (cmd_variational, "decide local variationality"),
    "tonti": (cmd_tonti, "Tonti-Vainberg Lagrangian of a source form"),
    "trivial": (cmd_trivial, "test triviality, or build a trivial Lagrangian from --input coefficients"),
    "hyperjac": (cmd_hyperjac, "hyper-Jacobian for --pair sigma:[I] and --free indices"),
    "decompose": (cmd_decompose, "contact components p_k or the contact structure decomposition"),
    "homotopy": (cmd_homotopy, "contact homotopy operator"),
    "strong-contact": (cmd_strong_contact, "strong contact test"),
    "prolong": (cmd_prolong, "prolong a morphism (--morphism) or an evolution (--evolution)"),
    "fock-trace": (cmd_fock_trace, "trace decomposition of a tensor file"),
    "fock-solve": (cmd_fock_solve, "write a kernel element as sum of B_a images"),
    "check-system": (cmd_check_system, "highest-order system of a Lagrangian"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jetcalc", description="Exact variational calculus on jet spaces.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--n", type=int, help="base dimension (default 1)")
        p.add_argument("--m", type=int, help="fibre dimension (default 1)")
        p.add_argument("--order", type=int, help="chart order r (default 1)")
        p.add_argument("--input", help="problem file (JSON)")
        p.add_argument("--format", choices=("text", "json"), default="text")
        if name in ("el", "trivial", "check-system", "prolong"):
            p.add_argument("--lagrangian")
        if name in ("helmholtz", "variational", "tonti"):
            p.add_argument("--equation", action="append", help="one per fibre index")
        if name in ("decompose", "homotopy", "strong-contact"):
            p.add_argument("--form")
        if name == "decompose":
            p.add_argument("--k", type=int)
            p.add_argument("--structure", action="store_true")
        if name == "hyperjac":
            p.add_argument("--pair", action="append", help="sigma:[I], e.g. 1:[1 2]")
            p.add_argument("--free", type=int, nargs="*")
        if name == "prolong":
            p.add_argument("--morphism", help="morphism file (JSON)")
            p.add_argument("--evolution", action="append")
        if name == "fock-solve":
            p.add_argument("--s", type=int)
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    handler = COMMANDS[args.command][0]
    try:
        problem = Problem(args)
        lines, result = handler(args, problem)
    except JetError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=stderr)
        return exc.exit_code
    if args.format == "json":
        doc = {"spec": problem.as_json(), "result": result, "warnings": problem.warnings}
        print(json.dumps(doc, indent=2, sort_keys=True), file=stdout)
    else:
        for line in lines:
            print(line, file=stdout)
        for w in problem.warnings:
            print(f"warning: {w}", file=stderr)
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
