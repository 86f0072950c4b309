from pathlib import Path

import numpy as np

from cocycle_lab.cochains import Cochain
from cocycle_lab.groups import make_cyclic
from cocycle_lab.modules import CoefficientGroup, GModule
from cocycle_lab.serialize import cochain_document, dump_document, group_document, module_document

FIXTURES = Path("tests/fixtures")


def carry_cocycle(module: GModule) -> Cochain:
    """psi(g, h) = 1 when the representatives of g and h overflow n, over a cyclic group."""
    n = module.group.order
    g, h = np.divmod(np.arange(n * n), n)
    return Cochain(module, 2, (g + h >= n).astype(np.int64).reshape(-1, 1))


def write_document(name: str, document: dict) -> Path:
    path = FIXTURES / name
    path.write_text(dump_document(document))
    return path


def generate_test_data() -> None:
    z2, z4 = make_cyclic(2), make_cyclic(4)
    z2_mod2 = GModule(z2, CoefficientGroup.finite([2]))
    z4_mod2 = GModule(z4, CoefficientGroup.finite([2]))
    write_document("z2.json", group_document(z2))
    write_document("z4.json", {"cyclic": 4})
    write_document("z2_mod2.json", module_document(z2_mod2, "z2.json"))
    write_document("z4_mod2.json", module_document(z4_mod2, "z4.json"))
    write_document(
        "z4_torus.json",
        {"group": "z4.json", "coefficients": {"kind": "torus", "dimension": 1}, "action": "trivial"},
    )
    write_document(
        "z3_rational.json",
        {"group": {"cyclic": 3}, "coefficients": {"kind": "rational"}},
    )
    write_document("carry.json", cochain_document(carry_cocycle(z2_mod2), "z2_mod2.json"))
    write_document("identity.json", {"module": "z2_mod2.json", "degree": 1, "values": ["0", "1"]})
    write_document(
        "not_cocycle.json", {"module": "z2_mod2.json", "degree": 2, "values": ["0", "1", "0", "0"]}
    )
    z4_mod4 = {"group": "z4.json", "coefficients": {"kind": "finite", "factors": [4]}}
    write_document(
        "carry_z4.json", cochain_document(carry_cocycle(GModule(z4, CoefficientGroup.finite([4]))), z4_mod4)
    )
    write_document("tower.json", {"orders": [2, 4, 8]})
    write_document("ses.json", {"family": "ZxmZ_Zm", "group": "z2.json", "m": 2})
    write_document("rational_ses.json", {"family": "Z_Q_QmodZ", "group": "z2.json"})
    write_document("system.json", {"family": "two_power", "group": "z2.json", "depth": 3})
    write_document("bad_group.json", {"order": 2, "mul": [[0, 1], [1, 1]]})
    write_document("broken.json", {"order": 2, "mul": [[0, 1]]})
    write_document("z4_z2_cocycle.json", cochain_document(carry_cocycle(z4_mod2), "z4_mod2.json"))
