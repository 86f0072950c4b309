"""JSON documents for groups, modules, cochains, towers, sequences and direct systems.

Coefficient values and action matrices are written as decimal strings
("3", "-1/2"); structural integers such as orders, degrees and table entries
stay JSON integers. Field order on output is fixed.
"""

import hashlib
import json
import logging
from dataclasses import replace
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from cocycle_lab.cochains import Cochain
from cocycle_lab.errors import CocycleLabError, ModuleMismatch, ParseError
from cocycle_lab.extensions import ExtensionPresentation
from cocycle_lab.groups import (
    FiniteGroup,
    GroupHom,
    Tower,
    make_cyclic,
    make_product,
    make_symmetric,
    make_tower,
)
from cocycle_lab.limits import DirectSystem, explicit_chain, two_power_chain
from cocycle_lab.modules import CoefficientGroup, CoefficientKind, GModule, InducedModule, Module
from cocycle_lab.sequences import ModuleSES, explicit_ses, multiplication_ses, rational_ses

Reference = str | dict


def format_value(x) -> str:
    return str(Fraction(x)) if isinstance(x, Fraction) else str(int(x))


def format_values(values) -> list[str]:
    return [format_value(x) for x in np.asarray(values).reshape(-1)]


def dump_document(document: dict) -> str:
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


def parse_document(text: str | bytes) -> dict:
    try:
        document = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise ParseError(f"not a JSON document: {e}") from e
    if not isinstance(document, dict):
        raise ParseError("a document must be a JSON object")
    return document


def _field(document: dict, key: str, what: str):
    if key not in document:
        raise ParseError(f"{what} document has no '{key}' field")
    return document[key]


def group_document(group: FiniteGroup) -> dict:
    document = {"order": group.order, "mul": group.mul.tolist()}
    if group.label:
        document["label"] = group.label
    return document


def save_group(group: FiniteGroup) -> str:
    return dump_document(group_document(group))


def group_from_document(document: dict) -> FiniteGroup:
    if "mul" not in document:
        raise ParseError("group document has no 'mul' field")
    mul = document["mul"]
    order = _field(document, "order", "group")
    if not isinstance(mul, list) or len(mul) != order or any(
        not isinstance(row, list) or len(row) != order for row in mul
    ):
        raise ParseError(f"multiplication table is not {order} x {order}")
    try:
        table = np.array(mul, dtype=np.int64)
    except (TypeError, ValueError) as e:
        raise ParseError(f"multiplication table has non-integer entries: {e}") from e
    return FiniteGroup(table, label=document.get("label", ""))


def load_group(text: str | bytes) -> FiniteGroup:
    return group_from_document(parse_document(text))


def coefficients_document(coefficients: CoefficientGroup) -> dict:
    match coefficients.kind:
        case CoefficientKind.free:
            return {"kind": "free", "rank": coefficients.width}
        case CoefficientKind.finite:
            return {"kind": "finite", "factors": list(coefficients.moduli)}
        case CoefficientKind.rational | CoefficientKind.torus:
            return {"kind": str(coefficients.kind), "dimension": coefficients.width}
        case _:
            raise ValueError(f"Invalid {coefficients.kind=}")


def coefficients_from_document(document: dict) -> CoefficientGroup:
    match _field(document, "kind", "coefficients"):
        case "free":
            return CoefficientGroup.free(int(document.get("rank", 1)))
        case "finite":
            return CoefficientGroup.finite([int(f) for f in _field(document, "factors", "coefficients")])
        case "rational":
            return CoefficientGroup.rational(int(document.get("dimension", 1)))
        case "torus":
            return CoefficientGroup.torus(int(document.get("dimension", 1)))
        case kind:
            raise ParseError(f"unknown coefficient kind {kind!r}")


def module_document(module: GModule, group_ref: Reference) -> dict:
    if module.is_trivial:
        action = "trivial"
    else:
        action = {
            "matrices": {
                str(g): [format_values(row) for row in module.matrices[g]]
                for g in range(module.group.order)
            }
        }
    return {
        "group": group_ref,
        "coefficients": coefficients_document(module.coefficients),
        "action": action,
    }


def _matrix(rows, coefficients: CoefficientGroup) -> np.ndarray:
    values = [[Fraction(x) for x in row] for row in rows]
    if coefficients.kind == CoefficientKind.rational:
        return np.array(values, dtype=object)
    if any(x.denominator != 1 for row in values for x in row):
        raise ParseError("action matrices must be integral")
    return np.array([[int(x) for x in row] for row in values], dtype=np.int64)


def cochain_document(phi: Cochain, module_ref: Reference) -> dict:
    return {"module": module_ref, "degree": phi.degree, "values": format_values(phi.values)}


def tower_document(tower: Tower, group_refs: list[Reference]) -> dict:
    return {"groups": group_refs, "steps": [step.map.tolist() for step in tower.steps]}


def extension_document(
    ext: ExtensionPresentation, cocycle_ref: Reference | None = None, quotient_ref: Reference | None = None
) -> dict:
    return {
        "cocycle": cocycle_ref,
        "group": group_document(ext.group),
        "quotient": quotient_ref if quotient_ref is not None else group_document(ext.quotient),
        "coefficients": coefficients_document(ext.module.coefficients),
        "embedding": ext.embedding.tolist(),
        "projection": ext.projection.map.tolist(),
    }


def file_digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class Workspace:
    """Objects loaded from documents, cached by resolved path.

    References inside a document are paths relative to that document, or
    inline documents. Every file read is recorded with its sha256 digest.
    """

    def __init__(self, root: str | Path = "."):
        self.root = Path(root)
        self.objects: dict[tuple[str, str], Any] = {}
        self.digests: dict[str, str] = {}

    def _read(self, ref: Reference, base: Path) -> tuple[dict, Path, str | None]:
        if isinstance(ref, dict):
            return ref, base, None
        if not isinstance(ref, str):
            raise ParseError(f"invalid reference {ref!r}")
        path = (base / ref).resolve()
        if not path.exists():
            raise ParseError(f"referenced file {ref} does not exist")
        key = str(path)
        if key not in self.digests:
            self.digests[key] = file_digest(path)
            logging.info(f"Loading {path}")
        return parse_document(path.read_bytes()), path.parent, key

    def _cached(self, kind: str, ref: Reference, base: Path | None, build):
        document, directory, key = self._read(ref, base or self.root)
        if key is not None and (kind, key) in self.objects:
            return self.objects[(kind, key)]
        try:
            value = build(document, directory)
        except (KeyError, TypeError, ValueError, IndexError) as e:
            raise ParseError(f"malformed {kind} document: {e}") from e
        if key is not None:
            self.objects[(kind, key)] = value
        return value

    def group(self, ref: Reference, base: Path | None = None) -> FiniteGroup:
        def build(document: dict, directory: Path) -> FiniteGroup:
            if "cyclic" in document:
                return make_cyclic(int(document["cyclic"]))
            if "symmetric" in document:
                return make_symmetric(int(document["symmetric"]))
            if "product" in document:
                first, second = document["product"]
                return make_product(self.group(first, directory), self.group(second, directory))
            return group_from_document(document)

        return self._cached("group", ref, base, build)

    def module(self, ref: Reference, base: Path | None = None) -> Module:
        def build(document: dict, directory: Path) -> Module:
            if "induced" in document:
                return InducedModule(self.module(document["induced"], directory))
            group = self.group(_field(document, "group", "module"), directory)
            coefficients = coefficients_from_document(_field(document, "coefficients", "module"))
            action = document.get("action", "trivial")
            if action == "trivial":
                return GModule(group, coefficients)
            matrices = _field(action, "matrices", "action")
            table = [_matrix(matrices[str(g)], coefficients) for g in range(group.order)]
            return GModule(group, coefficients, np.stack(table))

        return self._cached("module", ref, base, build)

    def cochain(self, ref: Reference, base: Path | None = None) -> Cochain:
        def build(document: dict, directory: Path) -> Cochain:
            module = self.module(_field(document, "module", "cochain"), directory)
            degree = int(_field(document, "degree", "cochain"))
            values = _field(document, "values", "cochain")
            base_module = module.base if isinstance(module, InducedModule) else module
            try:
                parsed = [base_module.coefficients.parse(x) for x in values]
            except CocycleLabError as e:
                raise ParseError(str(e)) from e
            rows = module.group.order**degree
            if len(parsed) != rows * module.width:
                raise ParseError(f"cochain has {len(parsed)} values, expected {rows * module.width}")
            return Cochain(module, degree, np.array(parsed, dtype=module.dtype).reshape(rows, module.width))

        return self._cached("cochain", ref, base, build)

    def tower(self, ref: Reference, base: Path | None = None) -> Tower:
        def build(document: dict, directory: Path) -> Tower:
            if "orders" in document:
                return make_tower([int(n) for n in document["orders"]])
            groups = [self.group(g, directory) for g in _field(document, "groups", "tower")]
            steps = [
                GroupHom(groups[m + 1], groups[m], images)
                for m, images in enumerate(_field(document, "steps", "tower"))
            ]
            return Tower(tuple(groups), tuple(steps))

        return self._cached("tower", ref, base, build)

    def ses(self, ref: Reference, base: Path | None = None) -> ModuleSES:
        def build(document: dict, directory: Path) -> ModuleSES:
            family = _field(document, "family", "ses")
            matrices = None
            if "matrices" in document:
                free = CoefficientGroup.free()
                given = document["matrices"]
                matrices = np.stack([_matrix(given[str(g)], free) for g in range(len(given))])
            match family:
                case "ZxmZ_Zm":
                    group = self.group(_field(document, "group", "ses"), directory)
                    return multiplication_ses(
                        group,
                        int(_field(document, "m", "ses")),
                        int(document.get("width", 1)),
                        matrices,
                        document.get("section", "canonical"),
                    )
                case "Z_Q_QmodZ":
                    group = self.group(_field(document, "group", "ses"), directory)
                    return rational_ses(group, int(document.get("width", 1)), matrices)
                case "explicit":
                    a, b, c = (self.module(document[k], directory) for k in ("a", "b", "c"))
                    return explicit_ses(a, b, c, document["i"], document["j"], document.get("section"))
                case _:
                    raise ParseError(f"unknown sequence family {family!r}")

        return self._cached("ses", ref, base, build)

    def system(self, ref: Reference, base: Path | None = None) -> DirectSystem:
        def build(document: dict, directory: Path) -> DirectSystem:
            if document.get("family") == "two_power":
                group = self.group(_field(document, "group", "system"), directory)
                return two_power_chain(group, int(document["depth"]), int(document.get("width", 1)))
            stages = [self.module(s, directory) for s in _field(document, "stages", "system")]
            ambient = document.get("ambient")
            return explicit_chain(
                stages,
                _field(document, "inclusions", "system"),
                None if ambient is None else self.module(ambient, directory),
                document.get("ambient_maps", ()),
            )

        return self._cached("system", ref, base, build)

    def extension(self, ref: Reference, base: Path | None = None) -> ExtensionPresentation:
        def build(document: dict, directory: Path) -> ExtensionPresentation:
            group = group_from_document(_field(document, "group", "extension"))
            quotient = self.group(_field(document, "quotient", "extension"), directory)
            coefficients = coefficients_from_document(_field(document, "coefficients", "extension"))
            projection = GroupHom(group, quotient, _field(document, "projection", "extension"))
            embedding = _field(document, "embedding", "extension")
            ext = ExtensionPresentation.from_maps(group, embedding, projection, coefficients)
            if (cocycle_ref := document.get("cocycle")) is None:
                return ext
            cocycle = self.cochain(cocycle_ref, directory)
            if cocycle.module != ext.module:
                raise ModuleMismatch("the originating cocycle acts differently from conjugation in E")
            return replace(ext, cocycle=cocycle)

        return self._cached("extension", ref, base, build)
