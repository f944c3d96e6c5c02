"""
Run configuration files: strict JSON loading with line-precise errors and the
config hash recorded in every output.
"""

import hashlib
import json
import re
from pathlib import Path
from typing import Any, Dict, Sequence, Tuple, Union

from loguru import logger
from pydantic import ValidationError

from src.exceptions import ConfigError
from src.models.cascade import RunConfig

# Excluded from the hash: they change where outputs go or which stream is
# used, and the seed is recorded next to the hash anyway.
UNHASHED_FIELDS = {"output_dir", "seed"}


def _line_of(text: str, offset: int) -> int:
    return text.count("\n", 0, offset) + 1


def locate_field(text: str, path: Sequence[Union[str, int]]) -> Tuple[int, int]:
    """Line and column of the innermost key of `path` found in `text`.

    Keys are searched in order, each after the previous one; path elements
    that are not keys (list indexes, union tags, missing fields) leave the
    position unchanged.
    """
    position = 0
    found = None
    for part in path:
        if not isinstance(part, str):
            continue
        match = re.compile(r'"%s"\s*:' % re.escape(part)).search(text, position)
        if match is None:
            continue
        position = match.end()
        found = match.start()
    if found is None:
        return 1, 1
    line = _line_of(text, found)
    column = found - (text.rfind("\n", 0, found) + 1) + 1
    return line, column


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    """RunConfig from a JSON document; every failure becomes a ConfigError."""
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{source}: invalid JSON: {e.msg}", line=e.lineno, column=e.colno) from e
    if not isinstance(document, dict):
        raise ConfigError(f"{source}: top level must be a JSON object", line=1, column=1)

    try:
        return RunConfig.model_validate(document)
    except ValidationError as e:
        first = e.errors()[0]
        path = first.get("loc", ())
        line, column = locate_field(text, path)
        extra = f" (+{e.error_count() - 1} more)" if e.error_count() > 1 else ""
        raise ConfigError(f"{source}: {first['msg']}{extra}", line=line, column=column, path=path) from e


def load_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    config = parse_config(text, source=str(path))
    logger.debug(f"Loaded config '{config.name}' ({config.model.family}) from {path}")
    return config


def canonical_config(config: RunConfig) -> Dict[str, Any]:
    return config.model_dump(mode="json", exclude=UNHASHED_FIELDS)


def config_hash(config: RunConfig) -> str:
    """md5 of the canonical JSON of the config."""
    payload = json.dumps(canonical_config(config), sort_keys=True, separators=(",", ":"))
    return hashlib.md5(payload.encode("utf-8")).hexdigest()
