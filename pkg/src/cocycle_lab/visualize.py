import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from cocycle_lab.regularization import RegularizationResult, profile_points  # noqa: E402


def plot_regularization_profile(results: list[RegularizationResult], path: str | Path) -> Path:
    """Achieved rho_inf(phi) and rho0(lambda) against rho0(psi)^(2^-p), one colour per degree."""
    points = profile_points(results)
    fig, ax = plt.subplots(figsize=(6, 4))
    for degree in sorted({p for p, *_ in points}):
        xs = [x for p, x, _, _ in points if p == degree]
        sup_phi = [y for p, _, y, _ in points if p == degree]
        mass_lambda = [y for p, _, _, y in points if p == degree]
        ax.scatter(xs, sup_phi, marker="o", label=f"rho_inf(phi), p={degree}")
        ax.scatter(xs, mass_lambda, marker="x", label=f"rho0(lambda), p={degree}")
    ax.set_xlabel("rho0(psi)^(2^-p)")
    ax.set_ylabel("achieved norm")
    ax.set_title("Regularization profile")
    if points:
        ax.legend()
    path = Path(path)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    logging.info(f"Saved regularization profile with {len(points)} runs to {path}")
    return path
