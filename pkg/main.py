#!/usr/bin/env python3
"""
safeltl command line
Stage-wise commands (parse, check-syntax, translate, include, path) and the
full self-supervised loop (run, bench, survey)
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from automata.buchi import BuchiAutomaton
from automata.product import product
from automata.simulation import prune_with_simulation
from automata.translate import translate
from config import BACKENDS, BackendSettings, PipelineConfig, log_level_from_env
from inclusion import check_inclusion, extract_divergence_path, render_counterexample_report
from ltl.formula import Formula, negate, render, to_nnf
from ltl.parser import check_syntax, parse
from models import PipelineStatus
from pdf_export import export_report_pdf
from pipeline import (
    initial_violation_survey, make_backend_factory, render_report_table, run, run_benchmark,
    summarize_results,
)
from utils.loaders import load_dataset, load_formula_file, load_rules, load_transcripts
from utils.validators import (
    AgentError, InclusionEngineError, LTLSyntaxError, SafeLTLError, ValidationError,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_ENGINE = 3


def _formula_argument(value: str) -> Formula:
    """A formula file if the path exists, the formula text otherwise"""
    if Path(value).is_file():
        return load_formula_file(value)
    return parse(value)


def _print_diagnostics(diagnostics) -> None:
    for diagnostic in diagnostics:
        print(diagnostic)


def cmd_parse(args) -> int:
    if args.file:
        try:
            text = Path(args.file).read_text(encoding="utf-8")
        except OSError as e:
            print(f"Cannot read {args.file}: {e}", file=sys.stderr)
            return EXIT_USAGE
    elif args.formula is not None:
        text = args.formula
    else:
        print("parse needs a formula or --file", file=sys.stderr)
        return EXIT_USAGE

    try:
        formula = parse(text.strip())
    except LTLSyntaxError as e:
        _print_diagnostics(e.diagnostics)
        return EXIT_NEGATIVE
    print(render(formula))
    return EXIT_OK


def cmd_check_syntax(args) -> int:
    diagnostics = check_syntax(args.formula)
    if diagnostics:
        _print_diagnostics(diagnostics)
        return EXIT_NEGATIVE
    print("No syntax errors.")
    return EXIT_OK


def cmd_translate(args) -> int:
    automaton = translate(_formula_argument(args.formula))
    if args.prune:
        automaton = prune_with_simulation(automaton)
    print(automaton.to_dot("formula") if args.dot else automaton.to_text(), end="")
    return EXIT_OK


def _write_dot(directory: Path, name: str, automaton: BuchiAutomaton) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{name}.dot"
    path.write_text(automaton.to_dot(name), encoding="utf-8")
    logger.info("Wrote %s", path)


def cmd_include(args) -> int:
    phi = load_formula_file(args.phi_file)
    rules = load_rules(args.rules_file)
    a_phi = translate(phi)

    included = True
    for rule in rules:
        verdict = check_inclusion(phi, rule.formula, minimize=not args.no_minimize)
        a_rule = translate(rule.formula)
        if args.dot_dir:
            directory = Path(args.dot_dir)
            _write_dot(directory, "input", a_phi)
            _write_dot(directory, rule.name, a_rule)
            _write_dot(directory, f"{rule.name}_product",
                       product(a_phi, translate(to_nnf(negate(rule.formula)))))

        if verdict.is_included:
            if args.report:
                print(f"Rule {rule.name}: Included.")
            continue
        included = False
        print(f"Rule {rule.name}:")
        print(render_counterexample_report(verdict, a_phi, a_rule), end="")

    if included:
        print("Included.")
        return EXIT_OK
    return EXIT_NEGATIVE


def cmd_path(args) -> int:
    phi = _formula_argument(args.phi)
    psi = _formula_argument(args.psi)
    a1, a2 = translate(phi), translate(psi)
    path = extract_divergence_path(a1, a2, args.maxdepth)
    alphabet = tuple(sorted(set(a1.alphabet) | set(a2.alphabet)))
    if path is None:
        print("No divergence found.")
        return EXIT_NEGATIVE
    print(path.render(alphabet))
    return EXIT_OK


def _pipeline_config(args) -> PipelineConfig:
    overrides = {
        'max_iterations': args.max_iters,
        'backend': args.backend,
        'random_seed': args.seed,
    }
    if args.parallel:
        overrides['parallel_entries'] = True
        overrides['parallel_rules'] = True
    return PipelineConfig.from_env(**overrides)


def _backend_factory(args, config: PipelineConfig):
    if args.transcript:
        return make_backend_factory(config, load_transcripts(args.transcript))
    if config.backend == "remote":
        settings = BackendSettings.from_env()
        if not settings.has_credentials:
            raise ValidationError("Remote backend needs SAFELTL_LLM_ENDPOINT and SAFELTL_LLM_TOKEN "
                                  "(or pass --transcript)")
        return make_backend_factory(config, settings=settings)
    return make_backend_factory(config)


def _write_report(args, report) -> None:
    if args.out:
        with open(args.out, 'w', encoding='utf-8') as f:
            json.dump(report.to_dict(), f, sort_keys=True, indent=2)
            f.write("\n")
        logger.info("Wrote %s", args.out)
    if getattr(args, 'pdf', None):
        export_report_pdf(report, args.pdf)
        logger.info("Wrote %s", args.pdf)


def cmd_run(args) -> int:
    config = _pipeline_config(args)
    factory = _backend_factory(args, config)
    dataset = load_dataset(args.dataset)
    rules = load_rules(args.rules)
    results = [run(entry, rules, config, factory(entry)) for entry in dataset]
    for result in results:
        formula = render(result.final_formula) if result.final_formula is not None else "-"
        print(f"{result.entry_id}: {result.status.value} after {result.iterations_used} "
              f"iteration(s)")
        print(f"  {formula}")

    if args.out:
        _write_report(args, summarize_results(results, rules, "repair", config.parallel_rules))

    statuses = {result.status for result in results}
    if PipelineStatus.ENGINE_FAILED in statuses:
        return EXIT_ENGINE
    return EXIT_OK if statuses == {PipelineStatus.COMPLIANT} else EXIT_NEGATIVE


def cmd_bench(args) -> int:
    config = _pipeline_config(args)
    factory = _backend_factory(args, config)
    dataset = load_dataset(args.dataset)
    rules = load_rules(args.rules)
    if args.command == "survey":
        report = initial_violation_survey(dataset, rules, config, factory)
    else:
        report = run_benchmark(dataset, rules, config, factory)
    print(render_report_table(report), end="")
    _write_report(args, report)
    return EXIT_OK


def _add_pipeline_arguments(parser: argparse.ArgumentParser, default_out: Optional[str]) -> None:
    parser.add_argument('dataset', help='Dataset file of task entries')
    parser.add_argument('rules', help='Rule file')
    parser.add_argument('--max-iters', type=int, dest='max_iters', help='Repair iteration cap')
    parser.add_argument('--backend', choices=BACKENDS, help='Text backend')
    parser.add_argument('--transcript', help='Scripted transcript file')
    parser.add_argument('--parallel', action='store_true', help='Check entries and rules concurrently')
    parser.add_argument('--seed', type=int, help='Sampling seed sent to the remote model')
    parser.add_argument('--out', default=default_out, help='JSON report path')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='safeltl',
                                     description='LTL extraction, rule inclusion and counterexample-guided repair')
    parser.add_argument('-v', '--verbose', action='count', default=0, help='More logging (-vv for debug)')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('parse', help='Parse and render a formula')
    p.add_argument('formula', nargs='?')
    p.add_argument('--file')
    p.set_defaults(handler=cmd_parse)

    p = sub.add_parser('check-syntax', help='List syntax diagnostics')
    p.add_argument('formula')
    p.set_defaults(handler=cmd_check_syntax)

    p = sub.add_parser('translate', help='Translate a formula to a Büchi automaton')
    p.add_argument('formula', help='Formula text or file')
    p.add_argument('--prune', action='store_true', help='Quotient by forward simulation')
    p.add_argument('--dot', action='store_true', help='Graphviz output')
    p.set_defaults(handler=cmd_translate)

    p = sub.add_parser('include', help='Check a formula against every rule')
    p.add_argument('phi_file')
    p.add_argument('rules_file')
    p.add_argument('--report', action='store_true', help='Also list passing rules')
    p.add_argument('--dot-dir', dest='dot_dir', help='Write automata as DOT files')
    p.add_argument('--no-minimize', dest='no_minimize', action='store_true')
    p.set_defaults(handler=cmd_include)

    p = sub.add_parser('path', help='First transition enabled in PHI but not in PSI')
    p.add_argument('phi')
    p.add_argument('psi')
    p.add_argument('--maxdepth', type=int)
    p.set_defaults(handler=cmd_path)

    p = sub.add_parser('run', help='Run the repair loop on each dataset entry')
    _add_pipeline_arguments(p, None)
    p.set_defaults(handler=cmd_run)

    for name, help_text in (('bench', 'Benchmark the repair loop'),
                            ('survey', 'Violation rate of the initial formulas')):
        p = sub.add_parser(name, help=help_text)
        _add_pipeline_arguments(p, 'results.json')
        p.add_argument('--pdf', help='Also write the report as PDF')
        p.set_defaults(handler=cmd_bench)

    return parser


def configure_logging(verbosity: int) -> None:
    level = log_level_from_env()
    if verbosity == 1:
        level = "INFO"
    elif verbosity >= 2:
        level = "DEBUG"
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    configure_logging(args.verbose)

    try:
        return args.handler(args)
    except InclusionEngineError as e:
        print(f"Engine error: {e}", file=sys.stderr)
        return EXIT_ENGINE
    except LTLSyntaxError as e:
        print(f"Syntax error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationError, AgentError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SafeLTLError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_ENGINE
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
