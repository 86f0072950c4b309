"""Report documents for every subcommand, rendered as JSON or as an aligned table."""

import os
from fractions import Fraction

import numpy as np

from cocycle_lab.cochains import Cochain
from cocycle_lab.cohomology import BruteForceResult, CohomologyGroup, Membership
from cocycle_lab.config import CocycleLabConfig, OutputFormat
from cocycle_lab.exactness import ExactnessReport
from cocycle_lab.extensions import ExtensionPresentation
from cocycle_lab.limits import Descent, DirectSystemReport, Obstruction, TowerExperimentReport
from cocycle_lab.regularization import CrossedHomReport, RegularizationResult
from cocycle_lab.serialize import dump_document, format_value, format_values


def plain(value):
    """JSON-ready copy: rationals as strings, tuples as lists, numpy scalars as ints."""
    match value:
        case bool() | str() | None:
            return value
        case Fraction():
            return format_value(value)
        case int() | np.integer():
            return int(value)
        case dict():
            return {str(k): plain(v) for k, v in value.items()}
        case list() | tuple():
            return [plain(v) for v in value]
        case np.ndarray():
            return plain(value.tolist())
        case Cochain():
            return format_values(value.values)
        case _:
            raise TypeError(f"cannot serialize {type(value).__name__}")


def header(command: str, config: CocycleLabConfig, digests: dict[str, str]) -> dict:
    """Everything that can change the output bytes, and nothing else."""
    root = os.getcwd()
    return {
        "tool": "cocycle-lab",
        "command": command,
        "configuration": config.reproducibility(),
        "inputs": {os.path.relpath(path, root): digest for path, digest in sorted(digests.items())},
    }


def cohomology_body(group: CohomologyGroup) -> dict:
    return {
        "degree": group.degree,
        "coefficients": str(group.module.coefficients.kind),
        "factors": list(group.factors),
        "rank": group.rank,
        "order": group.order,
        "truncation": group.truncation,
        "generators": [format_values(g.values) for g in group.generators],
    }


def brute_force_body(result: BruteForceResult) -> dict:
    return {
        "order": result.order,
        "factors": list(result.factors),
        "cocycles": result.cocycles,
        "coboundaries": result.coboundaries,
    }


def membership_body(membership: Membership) -> dict:
    return {
        "cocycle": True,
        "coboundary": membership.member,
        "coordinates": plain(membership.coordinates),
        "witness": None if membership.witness is None else format_values(membership.witness.values),
    }


def regularization_body(result: RegularizationResult) -> dict:
    return {
        "degree": result.degree,
        "threshold": format_value(result.threshold),
        "guaranteed": result.guaranteed,
        "rho0_psi": format_value(result.rho0_psi),
        "rho0_lambda": format_value(result.rho0_lambda),
        "rho_inf_phi": format_value(result.rho_inf_phi),
        "phi": format_values(result.phi.values),
        "lambda": format_values(result.lam.values),
        "levels": [
            {
                "degree": level.degree,
                "rho0_psi": format_value(level.rho0_psi),
                "eps_prime": None if level.eps_prime is None else format_value(level.eps_prime),
                "sqrt_small": level.sqrt_small,
                "rho0_lambda": format_value(level.rho0_lambda),
                "rho_inf_phi": format_value(level.rho_inf_phi),
            }
            for level in result.levels
        ],
    }


def crossed_hom_body(report: CrossedHomReport) -> dict:
    return {
        "tested": report.tested,
        "small": report.small,
        "sampled": report.sampled,
        "vacuous": report.vacuous,
        "holds": report.holds,
        "extremal_ratio": plain(report.extremal_ratio),
        "violations": [format_values(v.values) for v in report.violations],
    }


def tower_body(report: TowerExperimentReport) -> dict:
    return {
        "degree": report.degree,
        "levels": [cohomology_body(group) for group in report.groups],
        "inflations": [plain(hom.matrix) for hom in report.inflations],
        "injective": report.injective,
        "surjective": report.surjective,
        "functorial": report.functorial,
        "stabilized_within_observed_levels_from": report.stabilization,
    }


def direct_system_body(report: DirectSystemReport) -> dict:
    body = {
        "degree": report.degree,
        "stages": [cohomology_body(group) for group in report.groups],
        "maps": [plain(hom.matrix) for hom in report.maps],
        "bijective": report.bijective,
    }
    if report.ambient_group is not None:
        body["ambient"] = cohomology_body(report.ambient_group)
        body["hits"] = [
            {"generator": hit.generator, "stage": hit.stage, "hit": hit.hit} for hit in report.hits
        ]
        body["deaths"] = [
            {"stage": d.stage, "coordinates": plain(d.coordinates), "dies_at": d.dies_at}
            for d in report.deaths
        ]
    return body


def descent_body(outcome: Descent | Obstruction) -> dict:
    if isinstance(outcome, Obstruction):
        return {
            "descended": False,
            "defect_rho0": format_value(outcome.defect_rho0),
            "coordinates": plain(outcome.coordinates),
            "inflation_image": plain(outcome.image_generators),
        }
    return {
        "descended": True,
        "path": outcome.path,
        "defect_rho0": format_value(outcome.defect_rho0),
        "psi_prime": format_values(outcome.psi_prime.values),
        "witness": format_values(outcome.witness.values),
    }


def exactness_body(report: ExactnessReport) -> dict:
    return {
        "family": str(report.family),
        "max_degree": report.max_degree,
        "exact": report.exact,
        "slots": [
            {
                "position": slot.position,
                "degree": slot.degree,
                "exact": slot.exact,
                "detail": slot.detail,
                "coordinates": plain(slot.coordinates),
                "counterexample": plain(slot.counterexample),
            }
            for slot in report.slots
        ],
    }


def extension_body(ext: ExtensionPresentation) -> dict:
    group = ext.group
    return {
        "order": group.order,
        "exponent": group.exponent,
        "abelian": group.is_abelian,
        "normalization": None if ext.normalization is None else format_values(ext.normalization.values),
    }


def _rows(prefix: str, value) -> list[tuple[str, str]]:
    if isinstance(value, dict):
        rows = []
        for key, item in value.items():
            rows.extend(_rows(f"{prefix}.{key}" if prefix else str(key), item))
        return rows
    if isinstance(value, list) and any(isinstance(v, dict) for v in value):
        rows = []
        for k, item in enumerate(value):
            rows.extend(_rows(f"{prefix}[{k}]", item))
        return rows
    if isinstance(value, list):
        return [(prefix, " ".join(str(v) for v in value) if value else "-")]
    if value is None:
        return [(prefix, "-")]
    return [(prefix, str(value).lower() if isinstance(value, bool) else str(value))]


def render(document: dict, fmt: OutputFormat = OutputFormat.json) -> str:
    match fmt:
        case OutputFormat.json:
            return dump_document(plain(document))
        case OutputFormat.table:
            rows = _rows("", plain(document))
            width = max((len(key) for key, _ in rows), default=0)
            return "".join(f"{key.ljust(width)}  {value}\n" for key, value in rows)
        case _:
            raise ValueError(f"Invalid {fmt=}")
