import logging
import os
import tomllib
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, field
from enum import StrEnum
from fractions import Fraction
from pathlib import Path
from typing import Iterator

from cocycle_lab.errors import CapacityExceeded, ParseError

MAX_ENTRIES_ENV = "COCYCLELAB_MAX_ENTRIES"
DEFAULT_MAX_ENTRIES = 2**24


class OutputFormat(StrEnum):
    json = "json"
    table = "table"


class SesFamily(StrEnum):
    multiplication = "ZxmZ_Zm"
    rational = "Z_Q_QmodZ"
    explicit = "explicit"


@dataclass
class LimitsConfig:
    max_entries: int = DEFAULT_MAX_ENTRIES
    brute_force_limit: int = 2_000_000

    def __post_init__(self):
        assert self.max_entries > 0, "invalid max_entries"
        assert self.brute_force_limit > 0, "invalid brute_force_limit"


@dataclass
class RegularityConfig:
    eta_scale: int = 100
    threshold_override: Fraction | None = None
    constants_file: str = "regularization_constants.json"

    def __post_init__(self):
        assert self.eta_scale > 0, "invalid eta_scale"
        if self.threshold_override is not None:
            self.threshold_override = Fraction(self.threshold_override)
            assert 0 < self.threshold_override < 1, "invalid threshold_override"
            logging.warning(
                f"Using threshold override {self.threshold_override}; regularity bounds are not guaranteed"
            )


@dataclass
class TorusConfig:
    denominator_multiplier: int = 1

    def __post_init__(self):
        assert self.denominator_multiplier > 0, "invalid denominator_multiplier"


@dataclass
class ReportConfig:
    format: OutputFormat = OutputFormat.json
    timings: bool = False

    def __post_init__(self):
        assert self.format in list(OutputFormat), "invalid format"
        self.format = OutputFormat(self.format)


@dataclass
class ParallelConfig:
    threads: int = 1

    def __post_init__(self):
        assert self.threads > 0, "invalid threads"


@dataclass
class CocycleLabConfig:
    limits: LimitsConfig = field(default_factory=LimitsConfig)
    regularity: RegularityConfig = field(default_factory=RegularityConfig)
    torus: TorusConfig = field(default_factory=TorusConfig)
    report: ReportConfig = field(default_factory=ReportConfig)
    parallel: ParallelConfig = field(default_factory=ParallelConfig)

    def reproducibility(self) -> dict:
        """Settings that can change report contents; the thread count never does."""
        override = self.regularity.threshold_override
        return {
            "max_entries": self.limits.max_entries,
            "brute_force_limit": self.limits.brute_force_limit,
            "eta_scale": self.regularity.eta_scale,
            "threshold_override": None if override is None else str(override),
            "denominator_multiplier": self.torus.denominator_multiplier,
        }


def get_config(file: str | Path = "cocycle_config.toml") -> CocycleLabConfig:
    if not Path(file).exists():
        logging.warning(f"Config file {file} not found. Using defaults.")
        config = {}
    else:
        with open(file, mode="rb") as fp:
            try:
                config = tomllib.load(fp)
            except tomllib.TOMLDecodeError as e:
                raise ParseError(f"malformed config file {file}: {e}") from e
    regularity = dict(config.get("regularity", {}))
    try:
        if "threshold_override" in regularity:
            regularity["threshold_override"] = Fraction(regularity["threshold_override"])
        lab_config = CocycleLabConfig(
            limits=LimitsConfig(**config.get("limits", {})),
            regularity=RegularityConfig(**regularity),
            torus=TorusConfig(**config.get("torus", {})),
            report=ReportConfig(**config.get("report", {})),
            parallel=ParallelConfig(**config.get("parallel", {})),
        )
        if env_value := os.environ.get(MAX_ENTRIES_ENV):
            lab_config.limits = LimitsConfig(
                max_entries=int(env_value),
                brute_force_limit=lab_config.limits.brute_force_limit,
            )
    except (TypeError, ValueError) as e:
        raise ParseError(f"unreadable setting in {file}: {e}") from e
    return lab_config


_max_entries: ContextVar[int] = ContextVar("max_entries", default=DEFAULT_MAX_ENTRIES)


@contextmanager
def capacity_limit(max_entries: int) -> Iterator[None]:
    token = _max_entries.set(max_entries)
    try:
        yield
    finally:
        _max_entries.reset(token)


def check_capacity(entries: int, what: str = "table") -> None:
    if entries > (limit := _max_entries.get()):
        raise CapacityExceeded(f"{what} needs {entries} entries, limit is {limit}")
