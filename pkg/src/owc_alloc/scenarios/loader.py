"""Read and write scenario documents (JSON or YAML)."""

import json
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

import structlog
import yaml
from pydantic import ValidationError

from owc_alloc.errors import ConfigError
from owc_alloc.scenarios.schema import ScenarioSpec

logger = structlog.get_logger(__name__)

_YAML_SUFFIXES = (".yaml", ".yml")


def _error_path(location: Tuple[Union[int, str], ...]) -> str:
    return ".".join(str(part) for part in location) or "<document>"


def validate_document(document: Any) -> ScenarioSpec:
    """Validate a parsed document; raise :class:`ConfigError` listing every violation."""
    if not isinstance(document, dict):
        raise ConfigError([("<document>", "scenario document must be a mapping")])
    try:
        spec = ScenarioSpec.model_validate(document)
    except ValidationError as exc:
        problems: List[Tuple[str, str]] = [
            (_error_path(error["loc"]), error["msg"]) for error in exc.errors()
        ]
        raise ConfigError(problems) from exc
    return check_spec(spec)


def check_spec(spec: ScenarioSpec) -> ScenarioSpec:
    """Run the cross-field checks; builtin specs go through here too."""
    problems = spec.problems()
    if problems:
        raise ConfigError(problems)
    return spec


def load_config(path: Union[str, Path]) -> ScenarioSpec:
    """Load a scenario document; ``.yaml``/``.yml`` files are parsed as YAML.

    Raises:
        ConfigError: the document does not parse or fails validation
        FileNotFoundError: ``path`` does not exist
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        if path.suffix.lower() in _YAML_SUFFIXES:
            document = yaml.safe_load(text)
        else:
            document = json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError([("<document>", f"cannot parse {path.name}: {exc}")]) from exc

    spec = validate_document(document)
    logger.info("scenario_loaded", path=str(path), name=spec.name, users=len(spec.users))
    return spec


def spec_to_document(spec: ScenarioSpec) -> Dict[str, Any]:
    return spec.model_dump(mode="json")


def dump_config(spec: ScenarioSpec, path: Union[str, Path]) -> Path:
    """Write ``spec`` as JSON (or YAML for a YAML suffix) with sorted keys."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = spec_to_document(spec)
    if path.suffix.lower() in _YAML_SUFFIXES:
        text = yaml.safe_dump(document, sort_keys=True)
    else:
        text = json.dumps(document, indent=2, sort_keys=True) + "\n"
    path.write_text(text, encoding="utf-8")
    return path
