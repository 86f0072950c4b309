import logging
import os
import sys
import time
from argparse import ArgumentParser, Namespace
from fractions import Fraction
from pathlib import Path

from cocycle_lab.cochains import average_kappa, coboundary, dimension_shift_Q, first_cocycle_failure
from cocycle_lab.cohomology import brute_force_cohomology, cohomology, is_coboundary
from cocycle_lab.config import CocycleLabConfig, OutputFormat, capacity_limit, get_config
from cocycle_lab.errors import (
    CocycleLabError,
    InputError,
    ModuleMismatch,
    NotACocycle,
    ParseError,
    VerificationFailure,
)
from cocycle_lab.exactness import les_check
from cocycle_lab.extensions import (
    cocycle_from_extension,
    equivalence_map,
    extension_from_cocycle,
    extensions_equivalent,
    find_homomorphic_section,
)
from cocycle_lab.limits import descend_cocycle, direct_system_experiment, tower_experiment
from cocycle_lab.regularization import (
    crossed_hom_bound_check,
    fit_constants,
    load_constants,
    regularize,
    save_constants,
    unstable_degrees,
)
from cocycle_lab.report import (
    brute_force_body,
    cohomology_body,
    crossed_hom_body,
    descent_body,
    direct_system_body,
    exactness_body,
    extension_body,
    header,
    membership_body,
    regularization_body,
    render,
    tower_body,
)
from cocycle_lab.selftest import SUITES, run_selftest
from cocycle_lab.serialize import (
    Workspace,
    cochain_document,
    dump_document,
    extension_document,
    format_values,
    parse_document,
)
from cocycle_lab.visualize import plot_regularization_profile


class LabArgumentParser(ArgumentParser):
    """Usage errors exit with the input error code rather than argparse's 2."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(InputError.exit_code, f"{self.prog}: error: {message}\n")


def get_arg_parser() -> LabArgumentParser:
    parent_parser = LabArgumentParser(add_help=False)
    parent_parser.add_argument(
        "--config",
        type=Path,
        default=Path("cocycle_config.toml"),
        help="The TOML configuration file (default: %(default)s).",
    )
    parent_parser.add_argument(
        "--max-entries",
        type=int,
        help="Largest table or matrix the computation may build (overrides config and environment).",
    )
    parent_parser.add_argument(
        "--threads",
        type=int,
        help="Worker threads for per-level computations; never changes the output.",
    )
    parent_parser.add_argument(
        "--format",
        choices=list(OutputFormat),
        help="Report format (default from config).",
    )
    parent_parser.add_argument(
        "--timings",
        action="store_true",
        help="Add wall-clock timings to the report; the report is then no longer byte-stable.",
    )
    parser = LabArgumentParser(prog="cocycle-lab")
    subparsers = parser.add_subparsers(dest="command", required=True)

    compute = subparsers.add_parser("compute", help="Compute H^p(G, A).", parents=[parent_parser])
    compute.add_argument("--group", type=Path, help="Check the module's group against this group file.")
    compute.add_argument("--module", type=Path, required=True, help="The coefficient module file.")
    compute.add_argument("--degree", type=int, required=True, help="The cohomological degree p.")
    compute.add_argument(
        "--denominator-multiplier", type=int, help="Torus truncation multiplier k (default from config)."
    )

    oracle = subparsers.add_parser(
        "oracle", help="Brute-force |H^p| by enumeration.", parents=[parent_parser]
    )
    oracle.add_argument("--module", type=Path, required=True, help="A finite coefficient module file.")
    oracle.add_argument("--degree", type=int, required=True, help="The cohomological degree p.")
    oracle.add_argument("--limit", type=int, help="Search limit (default from config).")

    verify = subparsers.add_parser(
        "verify",
        help="Check a cochain is a cocycle and solve for a coboundary witness.",
        parents=[parent_parser],
    )
    verify.add_argument("--cochain", type=Path, required=True, help="The cochain file.")

    for name, description in (
        ("d", "Write the coboundary of a cochain."),
        ("shift", "Write the dimension shift Q of a cocycle."),
        ("average", "Write the averaging primitive kappa of a rational cocycle."),
    ):
        sub = subparsers.add_parser(name, help=description, parents=[parent_parser])
        sub.add_argument("--cochain", type=Path, required=True, help="The input cochain file.")
        sub.add_argument("--output", type=Path, help="Write the resulting cochain document here.")

    reg = subparsers.add_parser(
        "regularize", help="Decompose small cocycles as phi + d(lambda).", parents=[parent_parser]
    )
    reg.add_argument("--cochain", type=Path, nargs="+", required=True, help="One or more cocycle files.")
    reg.add_argument(
        "--threshold-override", type=Fraction, help="Replace eta_p; bounds are then not guaranteed."
    )
    reg.add_argument("--fit", action="store_true", help="Fit the bound multipliers over all given cocycles.")
    reg.add_argument("--update-constants", action="store_true", help="Overwrite the persisted constants.")
    reg.add_argument("--plot", type=Path, help="Save the regularization profile plot (with --fit).")
    reg.add_argument("--crossed-hom", action="store_true", help="Also check the crossed homomorphism bound.")

    tower = subparsers.add_parser("tower", help="Inflation along an inverse tower.", parents=[parent_parser])
    tower.add_argument("--tower", type=Path, required=True, help="The tower file.")
    tower.add_argument("--module", type=Path, required=True, help="A module over the coarsest level.")
    tower.add_argument("--degree", type=int, required=True, help="The cohomological degree p.")

    dirsys = subparsers.add_parser(
        "dirsys", help="Cohomology along a direct system of modules.", parents=[parent_parser]
    )
    dirsys.add_argument("--system", type=Path, required=True, help="The direct system file.")
    dirsys.add_argument("--degree", type=int, required=True, help="The cohomological degree p.")

    descend = subparsers.add_parser(
        "descend", help="Descend a cocycle to a coarser tower level.", parents=[parent_parser]
    )
    descend.add_argument("--cochain", type=Path, required=True, help="A cocycle over the finer level.")
    descend.add_argument("--tower", type=Path, required=True, help="The tower file.")
    descend.add_argument("--source-level", type=int, required=True, help="Level of the cocycle (0-based).")
    descend.add_argument("--target-level", type=int, required=True, help="Level to descend to (0-based).")
    descend.add_argument("--threshold-override", type=Fraction, help="Smallness gate override.")

    les = subparsers.add_parser(
        "les", help="Check the long exact sequence of a SES.", parents=[parent_parser]
    )
    les.add_argument("--ses", type=Path, required=True, help="The short exact sequence file.")
    les.add_argument("--max-degree", type=int, default=2, help="Highest degree (default: %(default)s).")

    extension = subparsers.add_parser("extension", help="Group extensions and factor sets.")
    extension_commands = extension.add_subparsers(dest="extension_command", required=True)
    build = extension_commands.add_parser(
        "build", help="Build the extension of a 2-cocycle.", parents=[parent_parser]
    )
    build.add_argument("--cochain", type=Path, required=True, help="The 2-cocycle file.")
    build.add_argument("--diagnostic", action="store_true", help="Report a failing associativity triple.")
    build.add_argument("--output", type=Path, help="Write the extension document here.")
    factorset = extension_commands.add_parser(
        "factorset", help="Extract the factor set of an extension.", parents=[parent_parser]
    )
    factorset.add_argument("--extension", type=Path, required=True, help="The extension file.")
    factorset.add_argument("--section", type=int, nargs="+", help="Section images s(g) in element order.")
    equiv = extension_commands.add_parser(
        "equiv", help="Decide whether two 2-cocycles give equivalent extensions.", parents=[parent_parser]
    )
    equiv.add_argument("--first", type=Path, required=True, help="The first 2-cocycle file.")
    equiv.add_argument("--second", type=Path, required=True, help="The second 2-cocycle file.")

    selftest = subparsers.add_parser("selftest", help="Run the invariant suites.", parents=[parent_parser])
    selftest.add_argument("--seed", type=int, default=0, help="Random seed (default: %(default)s).")
    selftest.add_argument("--suite", nargs="*", choices=list(SUITES), help="Run only these suites.")

    return parser


def apply_options(config: CocycleLabConfig, options: Namespace) -> CocycleLabConfig:
    if options.max_entries is not None:
        config.limits.max_entries = options.max_entries
    if options.threads is not None:
        config.parallel.threads = options.threads
    if options.format is not None:
        config.report.format = OutputFormat(options.format)
    if options.timings:
        config.report.timings = True
    if getattr(options, "threshold_override", None) is not None:
        config.regularity.threshold_override = options.threshold_override
    return config


def _rebased(ref, source: Path, output: Path):
    """A reference written relative to source, rewritten relative to output's directory."""
    if not isinstance(ref, str):
        return ref
    return os.path.relpath((source.parent / ref).resolve(), output.resolve().parent)


def _write_cochain(phi, options: Namespace, module_ref) -> dict:
    if options.output is None:
        return {"degree": phi.degree, "values": format_values(phi.values)}
    ref = _rebased(module_ref, options.cochain, options.output)
    options.output.write_text(dump_document(cochain_document(phi, ref)))
    logging.info(f"Wrote degree {phi.degree} cochain to {options.output}")
    return {"degree": phi.degree, "written": str(options.output)}


def _input_module_ref(path: Path):
    return parse_document(path.read_bytes())["module"]


def _regularize(config: CocycleLabConfig, options: Namespace, workspace: Workspace) -> dict:
    regularity = config.regularity
    results = []
    for path in options.cochain:
        results.append(
            regularize(
                workspace.cochain(path),
                threshold_override=regularity.threshold_override,
                eta_scale=regularity.eta_scale,
            )
        )
    body = {"results": [regularization_body(result) for result in results]}
    if options.crossed_hom:
        body["crossed_hom"] = crossed_hom_body(crossed_hom_bound_check(results[0].psi.module))
    if not options.fit:
        return body
    fitted = fit_constants(results, regularity.eta_scale)
    constants_file = Path(regularity.constants_file)
    if constants_file.exists() and not options.update_constants:
        unstable = unstable_degrees(fitted, load_constants(constants_file))
        body["unstable_degrees"] = unstable
        if unstable:
            raise VerificationFailure(f"fitted constants exceed the persisted ones in degrees {unstable}")
    else:
        save_constants(fitted, constants_file)
    body["constants"] = {str(p): value for p, value in sorted(fitted.k_powers.items())}
    if options.plot is not None:
        plot_regularization_profile(results, options.plot)
    return body


def _extension(config: CocycleLabConfig, options: Namespace, workspace: Workspace) -> dict:
    match options.extension_command:
        case "build":
            ext = extension_from_cocycle(workspace.cochain(options.cochain), diagnostic=options.diagnostic)
            body = extension_body(ext)
            body["split"] = find_homomorphic_section(ext, config.limits.brute_force_limit) is not None
            if options.output is not None:
                ref = _rebased(str(options.cochain.name), options.cochain, options.output)
                options.output.write_text(dump_document(extension_document(ext, ref)))
                body["written"] = str(options.output)
            return body
        case "factorset":
            ext = workspace.extension(options.extension)
            psi = cocycle_from_extension(ext, options.section)
            equivalence_map(ext, options.section)
            return {"factor_set": format_values(psi.values), "equivalence_verified": True}
        case "equiv":
            first, second = workspace.cochain(options.first), workspace.cochain(options.second)
            membership = extensions_equivalent(first, second)
            body = membership_body(membership)
            body["equivalent"] = body.pop("coboundary")
            return body
        case _:
            raise ValueError(f"Invalid {options.extension_command=}")


def run(config: CocycleLabConfig, options: Namespace, workspace: Workspace) -> dict:
    multiplier = getattr(options, "denominator_multiplier", None) or config.torus.denominator_multiplier
    match options.command:
        case "compute":
            module = workspace.module(options.module)
            if options.group is not None and workspace.group(options.group) != module.group:
                raise ModuleMismatch("the module does not live over the given group")
            return cohomology_body(cohomology(module, options.degree, denominator_multiplier=multiplier))
        case "oracle":
            limit = options.limit or config.limits.brute_force_limit
            module = workspace.module(options.module)
            return brute_force_body(brute_force_cohomology(module, options.degree, limit))
        case "verify":
            psi = workspace.cochain(options.cochain)
            if (failing := first_cocycle_failure(psi)) is not None:
                raise NotACocycle(f"degree {psi.degree} cochain is not a cocycle", failing)
            group = cohomology(psi.module, psi.degree, denominator_multiplier=multiplier)
            return membership_body(is_coboundary(psi, group))
        case "d":
            phi = coboundary(workspace.cochain(options.cochain))
            return _write_cochain(phi, options, _input_module_ref(options.cochain))
        case "shift":
            ref = {"induced": _input_module_ref(options.cochain)}
            return _write_cochain(dimension_shift_Q(workspace.cochain(options.cochain)), options, ref)
        case "average":
            kappa = average_kappa(workspace.cochain(options.cochain))
            return _write_cochain(kappa, options, _input_module_ref(options.cochain))
        case "regularize":
            return _regularize(config, options, workspace)
        case "tower":
            report = tower_experiment(
                workspace.tower(options.tower),
                workspace.module(options.module),
                options.degree,
                threads=config.parallel.threads,
                denominator_multiplier=multiplier,
            )
            return tower_body(report)
        case "dirsys":
            report = direct_system_experiment(
                workspace.system(options.system), options.degree, threads=config.parallel.threads
            )
            return direct_system_body(report)
        case "descend":
            tower = workspace.tower(options.tower)
            outcome = descend_cocycle(
                workspace.cochain(options.cochain),
                tower.composite(options.source_level, options.target_level),
                threshold_override=config.regularity.threshold_override,
                eta_scale=config.regularity.eta_scale,
            )
            return descent_body(outcome)
        case "les":
            ses = workspace.ses(options.ses)
            report = les_check(ses, options.max_degree, denominator_multiplier=multiplier)
            return exactness_body(report)
        case "extension":
            return _extension(config, options, workspace)
        case "selftest":
            results = run_selftest(options.seed, options.suite)
            failed = [r.name for r in results if not r.passed]
            if failed:
                raise VerificationFailure(f"selftest suites failed: {failed}")
            return {"suites": [{"name": r.name, "passed": r.passed, "detail": r.detail} for r in results]}
        case _:
            raise ValueError(f"Invalid {options.command=}")


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s %(levelname)s: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )
    options = get_arg_parser().parse_args(argv)
    try:
        config = apply_options(get_config(file=options.config), options)
    except (AssertionError, ParseError) as e:
        logging.error(f"Invalid configuration: {e}")
        return 1
    workspace = Workspace()
    start = time.perf_counter()
    try:
        with capacity_limit(config.limits.max_entries):
            body = run(config, options, workspace)
    except CocycleLabError as e:
        logging.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    command = options.command
    if command == "extension":
        command = f"extension {options.extension_command}"
    document = header(command, config, workspace.digests) | {"result": body}
    if config.report.timings:
        document["timings"] = {"seconds": f"{time.perf_counter() - start:.3f}"}
    sys.stdout.write(render(document, config.report.format))
    return 0


if __name__ == "__main__":
    sys.exit(main())
