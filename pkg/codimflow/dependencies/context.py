"""
Run context shared by the subcommands: loads the JSON configuration,
applies the overrides, validates it against the schema of the subcommand,
sets the worker pool and builds the provenance of every artifact.

"""

import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterator, TypeVar

import numpy as np
import orjson
import typer
from pydantic import BaseModel, ValidationError

from codimflow.schemas.experiments import ExperimentSpec
from codimflow.schemas.reports import CheckReport, Provenance
from codimflow.utils.reports import config_hash, emit_report
from codimflow.utils.workers import set_threads
from core.errors import CodimflowError, ConfigError, exit_code_for
from core.secrets import env



logger = logging.getLogger(__name__)

Config = TypeVar("Config", bound=BaseModel)



# Configuration documents

def load_document(path:Path) -> dict[str, Any]:
    try:
        document = orjson.loads(Path(path).read_bytes())
    except OSError as error:
        raise ConfigError("Cannot read the configuration", path=str(path)) from error
    except orjson.JSONDecodeError as error:
        raise ConfigError("The configuration is not valid JSON", path=str(path), reason=str(error)) from error
    if not isinstance(document, dict):
        raise ConfigError("The configuration must be a JSON object", path=str(path))
    return document



def parse_value(text:str) -> Any:
    """JSON value when the text parses, the text itself otherwise."""

    try:
        return orjson.loads(text)
    except orjson.JSONDecodeError:
        return text



def apply_overrides(document:dict[str, Any], overrides:list[str]) -> dict[str, Any]:
    """Set `key.sub=value` paths in the document; list items use integer keys."""

    for item in overrides:
        path, _, text = item.partition("=")
        keys = [key.strip() for key in path.split(".")]
        target = document
        for key in keys[:-1]:
            if isinstance(target, list):
                target = target[int(key)]
                continue
            target = target.setdefault(key, {})
            if not isinstance(target, (dict, list)):
                raise ConfigError("Override goes through a scalar value", override=item)
        last = keys[-1]
        if isinstance(target, list):
            target[int(last)] = parse_value(text)
        else:
            target[last] = parse_value(text)
    return document



# Run context

class RunContext:
    """Validated configuration and artifact plumbing of one subcommand run.

    Attributes:
      - spec (ExperimentSpec): command-line arguments.
      - config (BaseModel): validated configuration.
      - effective (dict): JSON form of the configuration, dumped with the run.
      - provenance (Provenance): header fields of every artifact.
      - base_dir (Path): directory relative paths of the config resolve from.
      - rng (Generator): seeded random generator of the run.
    """

    def __init__(self, spec:ExperimentSpec, schema:type[Config], flags:dict[str, Any]|None=None):
        document = load_document(spec.config) if spec.config is not None else {}
        try:
            apply_overrides(document, spec.overrides)
        except (IndexError, ValueError, AttributeError) as error:
            raise ConfigError("Cannot apply the overrides", reason=str(error)) from error
        document.update({key: value for key, value in (flags or {}).items() if value is not None})

        self.spec = spec
        self.config:Config = schema.model_validate(document)
        self.effective = self.config.model_dump(mode="json")
        self.provenance = Provenance(version=env.app_version, seed=spec.seed,
                                     config_sha256=config_hash(self.effective))
        self.base_dir = spec.config.parent if spec.config is not None else Path.cwd()
        self.rng = np.random.default_rng(spec.seed)
        set_threads(spec.threads)
        self.out.mkdir(parents=True, exist_ok=True)
        logger.info("Run %s into %s (config %s)", spec.name.value, self.out,
                    self.provenance.config_sha256[:12])

    @property
    def out(self) -> Path:
        return self.spec.out

    @property
    def seed(self) -> int:
        return self.spec.seed

    def failure(self, check:str, case:str, error:CodimflowError) -> CheckReport:
        """Failing report standing for a check that raised."""

        logger.error("%s (%s) failed: %s", check, case, error)
        metrics = {key: value for key, value in error.details.items()
                   if isinstance(value, (int, float, bool)) and not isinstance(value, np.ndarray)}
        return CheckReport(check=check, case=case, metrics=metrics, passed=False,
                           notes=[f"{type(error).__name__}: {error}"])

    def finish(self, reports:list[CheckReport], tables:dict[str, list[dict]]|None=None) -> int:
        """Write the artifacts and return the exit code of the run."""

        summary = emit_report(self.out, reports, self.provenance, self.effective, tables)
        return 0 if summary.passed else 1



# Exit codes

@contextmanager
def exit_codes() -> Iterator[None]:
    """Translate configuration and numerical errors into exit codes."""

    try:
        yield
    except ValidationError as error:
        logger.error("Invalid configuration:\n%s", error)
        raise typer.Exit(2)
    except CodimflowError as error:
        logger.error("%s: %s", type(error).__name__, error)
        raise typer.Exit(exit_code_for(error))



def experiment_spec(name, config, out, seed, overrides, threads) -> ExperimentSpec:
    return ExperimentSpec(name=name, config=config, out=out if out is not None else env.out, seed=seed,
                          overrides=overrides or [], threads=threads)
