"""
Bundled benchmark systems and system-file loading.

A system reference is either a path to a JSON file or the name of a
bundled system (``ex1``, ``ex1.json``).
"""

import json
import logging
from importlib import resources
from pathlib import Path
from typing import Dict, List, Union

from pydantic import ValidationError

from ..errors import SystemFileError
from ..models.schema import SystemFile

logger = logging.getLogger(__name__)


class SystemLibrary:
    """Bundled system definitions shipped with the package"""

    def __init__(self) -> None:
        self._root = resources.files(__name__)

    def available(self) -> List[str]:
        return sorted(
            entry.name[: -len(".json")]
            for entry in self._root.iterdir()
            if entry.name.endswith(".json")
        )

    def describe(self) -> Dict[str, str]:
        return {name: self.get(name).description for name in self.available()}

    def has(self, name: str) -> bool:
        return _bundled_name(name) in self.available()

    def get(self, name: str) -> SystemFile:
        key = _bundled_name(name)
        if key not in self.available():
            raise SystemFileError(f"no bundled system named {name!r}", path=name)
        text = self._root.joinpath(f"{key}.json").read_text(encoding="utf-8")
        return parse_system(text, source=f"<bundled {key}>")


def _bundled_name(name: str) -> str:
    return name[: -len(".json")] if name.endswith(".json") else name


def parse_system(text: str, source: Union[str, Path] = "<string>") -> SystemFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SystemFileError(f"invalid JSON: {e}", path=source) from e
    try:
        return SystemFile.model_validate(data)
    except ValidationError as e:
        raise SystemFileError(f"invalid system definition: {e}", path=source) from e


def load_system(ref: Union[str, Path]) -> SystemFile:
    """Load a system file from disk, falling back to the bundled library"""
    path = Path(ref)
    if path.is_file():
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise SystemFileError(f"cannot read file: {e}", path=path) from e
        logger.debug(f"Loading system from {path}")
        return parse_system(text, source=path)

    library = SystemLibrary()
    if library.has(str(ref)):
        logger.debug(f"Loading bundled system {ref}")
        return library.get(str(ref))
    raise SystemFileError("no such file or bundled system", path=ref)
