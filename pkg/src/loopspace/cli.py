"""Command line front end.

    loopspace COMMAND MODEL_FILE [--max-degree N] [--format text|json]
                                 [--growth] [--jobs K]

Commands: validate, betti, hodge, quotient, aut-ranks, verify.  Output is
deterministic byte for byte: tables are emitted in sorted label order and
JSON with sorted keys.  Exit codes: 0 all checks pass, 1 invalid model,
2 unreadable model file, 3 a mathematical identity failed, 4 an internal
invariant broke (a bug in the tool, never the model's fault).

Table entries computed above the model's declared completeness are
suffixed with '?' in text output; JSON carries the per-table
trusted_up_to bound instead.
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

from .errors import (ParseError, ValidationFailure, MathMismatch,
                     InternalCheckFailure, exit_code_for)
from .sullivan import (parse_model, validate, cohomology_table,
                       check_poincare_duality)
from .freeloop import (build_free_loop_model, hodge_betti_table, loop_betti,
                       growth_report)
from .pdquotient import build_quotient, structure_identities, verify_quasi_iso
from .sections import (extend_to_quotient_loop, verify_rho_tensor_quasi_iso,
                       duality_map, build_dual_complex,
                       verify_duality_quasi_iso, aut_rank_table,
                       low_degree_section_classes, derivation_oracle,
                       verify_theorems)


@dataclass
class Report:
    model: str
    command: str
    max_degree: int | None
    trusted_up_to: int | None
    tables: dict = field(default_factory=dict)
    verdicts: list = field(default_factory=list)
    exit_code: int = 0
    error: str | None = None
    notes: list = field(default_factory=list)

    def add_table(self, label, values, start=0, trusted_up_to=None):
        self.tables[label] = {"start": start, "trusted_up_to": trusted_up_to,
                              "values": list(values)}

    def add_rows(self, label, rows, start=0, trusted_up_to=None):
        self.tables[label] = {"start": start, "trusted_up_to": trusted_up_to,
                              "rows": [list(r) for r in rows]}

    def add_verdict(self, check, passed, degree=None):
        self.verdicts.append({"check": check, "degree": degree,
                              "pass": bool(passed)})

    @property
    def passed(self):
        return all(v["pass"] for v in self.verdicts)

    def as_dict(self):
        d = {"model": self.model, "command": self.command,
             "max_degree": self.max_degree, "trusted_up_to": self.trusted_up_to,
             "tables": self.tables, "verdicts": self.verdicts,
             "exit_code": self.exit_code}
        if self.error is not None:
            d["error"] = self.error
        return d

    def to_json(self):
        return json.dumps(self.as_dict(), sort_keys=True,
                          separators=(",", ":")) + "\n"

    def to_text(self):
        lines = ["model: %s" % self.model, "command: %s" % self.command]
        if self.max_degree is not None:
            lines.append("max-degree: %d" % self.max_degree)
        if self.trusted_up_to is not None:
            lines.append("trusted-up-to: %d" % self.trusted_up_to)
        for label in sorted(self.tables):
            tab = self.tables[label]
            if "rows" in tab:
                for off, row in enumerate(tab["rows"]):
                    n = tab["start"] + off
                    mark = "?" if (tab["trusted_up_to"] is not None
                                   and n > tab["trusted_up_to"]) else ""
                    lines.append("table %s n=%d%s: %s"
                                 % (label, n, mark,
                                    " ".join(str(v) for v in row)))
            else:
                vals = tab["values"]
                if not vals:
                    lines.append("table %s: (empty)" % label)
                    continue
                parts = []
                for off, v in enumerate(vals):
                    idx = tab["start"] + off
                    s = str(v)
                    if tab["trusted_up_to"] is not None and idx > tab["trusted_up_to"]:
                        s += "?"
                    parts.append(s)
                lines.append("table %s (%d..%d): %s"
                             % (label, tab["start"],
                                tab["start"] + len(vals) - 1, " ".join(parts)))
        for note in self.notes:
            lines.append(note)
        for v in self.verdicts:
            where = "" if v["degree"] is None else " (degree %d)" % v["degree"]
            lines.append("verdict %s%s: %s"
                         % (v["check"], where, "pass" if v["pass"] else "FAIL"))
        if self.error is not None:
            lines.append("error: %s" % self.error)
        lines.append("exit-code: %d" % self.exit_code)
        return "\n".join(lines) + "\n"


def _corrupt_first_product(algebra):
    """Fault injection hook: bump the first off-diagonal structure constant.

    Exists so the failure path of the identity checker can be exercised
    end to end; a corrupted table must be caught and exit with code 3.
    """
    for (i, j) in sorted(algebra.products):
        if i == j:
            continue
        coeffs = algebra.products[(i, j)]
        k = min(coeffs)
        coeffs[k] = coeffs[k] + 1
        return True
    return False


def _tamper_hook(args):
    if getattr(args, "corrupt_alpha", False):
        return _corrupt_first_product
    return None


def _window(model, args, clamp_quotient=False):
    n_max = args.max_degree
    if n_max is None:
        n_max = model.formal_dim + 8
    if clamp_quotient:
        n_max = max(n_max, model.formal_dim + 2)
    return n_max


def _require_valid(model, report):
    vrep = validate(model)
    for name, ok, _ in vrep.checks:
        report.add_verdict(name, ok)
    if not vrep.passed:
        bad = "; ".join(d for _, ok, d in vrep.checks if not ok)
        raise ValidationFailure("model is not a valid input: %s" % bad)
    return vrep


def _growth_tables(report, table):
    g = growth_report(table)
    report.add_table("growth_partial_sums", g.partial_sums, start=0)
    report.add_table("growth_ratios", [str(r) for r in g.ratios], start=0)
    report.add_table("growth_roots", [s for _, s in g.roots], start=1)
    report.add_table("growth_verdict", [g.verdict])


def cmd_validate(model, args, report):
    vrep = validate(model)
    for name, ok, _ in vrep.checks:
        report.add_verdict(name, ok)
    if not vrep.passed:
        report.exit_code = 1
        return report
    n_max = _window(model, args)
    try:
        pd = check_poincare_duality(model, n_max)
    except ValidationFailure as e:
        report.add_verdict("poincare_duality", False,
                           degree=getattr(e, "degree", None))
        report.error = str(e)
        report.exit_code = 1
        return report
    report.add_verdict("poincare_duality", True)
    report.add_table("base_betti", pd.betti.as_array(n_max), start=0,
                     trusted_up_to=pd.betti.trusted_up_to)
    report.notes.append("fundamental-class: %s" % pd.fundamental_render)
    return report


def cmd_betti(model, args, report):
    _require_valid(model, report)
    n_max = _window(model, args)
    base = cohomology_table(model, n_max)
    report.add_table("base_betti", base.as_array(n_max), start=0,
                     trusted_up_to=base.trusted_up_to)
    flm = build_free_loop_model(model)
    loop = loop_betti(flm, n_max)
    report.add_table("loop_betti", loop.as_array(n_max), start=0,
                     trusted_up_to=loop.trusted_up_to)
    if args.growth:
        _growth_tables(report, loop)
    return report


def cmd_hodge(model, args, report):
    _require_valid(model, report)
    n_max = _window(model, args)
    flm = build_free_loop_model(model)
    hodge = hodge_betti_table(flm, n_max, jobs=args.jobs)
    loop = loop_betti(flm, n_max, hodge=hodge)
    report.add_verdict("hodge_sum_consistency", True)
    rows = [[hodge.get(n, k) for k in range(n + 1)] for n in range(n_max + 1)]
    report.add_rows("hodge", rows, start=0, trusted_up_to=hodge.trusted_up_to)
    report.add_table("loop_betti", loop.as_array(n_max), start=0,
                     trusted_up_to=loop.trusted_up_to)
    if args.growth:
        _growth_tables(report, loop)
    return report


def cmd_quotient(model, args, report):
    _require_valid(model, report)
    n_max = _window(model, args, clamp_quotient=True)
    pd = check_poincare_duality(model, n_max)
    report.add_verdict("poincare_duality", True)
    algebra, qmap = build_quotient(model, pd)
    tamper = _tamper_hook(args)
    if tamper:
        tamper(algebra)
    structure_identities(algebra)
    report.add_verdict("structure_identities", True)
    verify_quasi_iso(model, algebra, qmap, n_max)
    report.add_verdict("quotient_quasi_iso", True)
    N = model.formal_dim
    dims = [len(algebra.by_degree(k)) for k in range(N + 1)]
    report.add_table("quotient_dims", dims, start=0)
    report.notes.append("classes: %s" % " | ".join(algebra.labels))
    return report


def cmd_aut_ranks(model, args, report):
    _require_valid(model, report)
    n_max = _window(model, args, clamp_quotient=True)
    N = model.formal_dim
    pd = check_poincare_duality(model, n_max)
    report.add_verdict("poincare_duality", True)
    algebra, qmap = build_quotient(model, pd)
    tamper = _tamper_hook(args)
    if tamper:
        tamper(algebra)
    structure_identities(algebra)
    report.add_verdict("structure_identities", True)
    flm = build_free_loop_model(model)
    eqm = extend_to_quotient_loop(model, algebra, qmap, flm, check_to=n_max)
    dmap = duality_map(algebra)
    dual = build_dual_complex(algebra, eqm, dmap)
    report.add_verdict("square_identity", True)
    aut = aut_rank_table(eqm, n_max - N, dual=dual)
    report.add_verdict("dual_complex_agreement", True)
    report.add_table("aut_ranks", aut.as_array(n_max - N)[1:], start=1,
                     trusted_up_to=aut.trusted_up_to)
    low = low_degree_section_classes(eqm)
    report.add_table("low_degree_section_classes",
                     [low[n] for n in range(1, N + 1)], start=1)
    report.trusted_up_to = aut.trusted_up_to
    return report


def cmd_verify(model, args, report):
    n_max = _window(model, args, clamp_quotient=True)
    rep = verify_theorems(model, n_max, jobs=args.jobs,
                          _tamper=_tamper_hook(args))
    N = rep.formal_dim
    for check in ("simply_connected", "minimal", "d_squared_zero",
                  "poincare_duality", "structure_identities",
                  "quotient_quasi_iso", "loop_extension_quasi_iso",
                  "duality_chain_property", "duality_cohomology_iso",
                  "square_identity", "dual_complex_quasi_iso",
                  "hodge_sum_consistency", "rank_triple_agreement"):
        report.add_verdict(check, True)
    report.add_table("base_betti", rep.pd_report.betti.as_array(n_max),
                     start=0, trusted_up_to=rep.pd_report.betti.trusted_up_to)
    report.add_table("loop_betti", rep.loop.as_array(n_max), start=0,
                     trusted_up_to=rep.loop.trusted_up_to)
    report.add_table("aut_ranks", rep.aut.as_array(n_max - N)[1:], start=1,
                     trusted_up_to=rep.aut.trusted_up_to)
    report.add_table("derivation_ranks",
                     rep.oracle.as_array(n_max - N + 1)[1:], start=1,
                     trusted_up_to=rep.oracle.trusted_up_to)
    report.add_table("low_degree_section_classes",
                     [rep.low_degree[n] for n in range(1, N + 1)], start=1)
    rows = [[rep.hodge.get(n, k) for k in range(n + 1)]
            for n in range(n_max + 1)]
    report.add_rows("hodge", rows, start=0,
                    trusted_up_to=rep.hodge.trusted_up_to)
    if args.growth:
        _growth_tables(report, rep.loop)
    report.notes.append("fundamental-class: %s" % rep.pd_report.fundamental_render)
    report.notes.append("duality-cochain-invertible: %s"
                        % ("yes" if rep.cochain_perfect else "no"))
    return report


_COMMANDS = {
    "validate": cmd_validate,
    "betti": cmd_betti,
    "hodge": cmd_hodge,
    "quotient": cmd_quotient,
    "aut-ranks": cmd_aut_ranks,
    "verify": cmd_verify,
}


def build_parser():
    p = argparse.ArgumentParser(
        prog="loopspace",
        description="Exact rational cohomology of free loop spaces from "
                    "Sullivan models, with duality and rank cross-checks.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        sp = sub.add_parser(name, help=fn.__doc__)
        sp.add_argument("model_file", help="model description file")
        sp.add_argument("--max-degree", type=int, default=None,
                        help="top degree of the computed window "
                             "(default: formal dimension + 8)")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--growth", action="store_true",
                        help="append partial-sum growth tables")
        sp.add_argument("--jobs", type=int, default=1,
                        help="worker processes for degree slices")
        sp.add_argument("--corrupt-alpha", action="store_true",
                        help=argparse.SUPPRESS)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    name = os.path.splitext(os.path.basename(args.model_file))[0]
    report = Report(model=name, command=args.command,
                    max_degree=None, trusted_up_to=None)
    try:
        try:
            with open(args.model_file, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise ParseError("cannot read model file: %s" % e)
        model = parse_model(text, name_hint=name)
        report.model = model.name
        report.max_degree = _window(
            model, args, clamp_quotient=args.command in ("quotient",
                                                         "aut-ranks", "verify"))
        if report.trusted_up_to is None:
            report.trusted_up_to = model.trusted_base(report.max_degree)
        report = _COMMANDS[args.command](model, args, report)
    except (ParseError, ValidationFailure, MathMismatch,
            InternalCheckFailure) as e:
        report.exit_code = exit_code_for(e)
        report.error = str(e)
    out = report.to_json() if args.format == "json" else report.to_text()
    sys.stdout.write(out)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
