import json
from pathlib import Path
from typing import Union

from pydantic import ValidationError

from ...application.dtos import SetupDocument
from ...domain import ConfigError, SetupConfig, SetupRepositoryInterface


DATA_DIR = Path(__file__).resolve().parent / "data"


def resolve_bundled(name_or_path: Union[str, Path], suffix: str, data_dir: Path = DATA_DIR) -> Path:
    """An existing path wins; otherwise a bare name is looked up among the bundled files"""
    path = Path(name_or_path)
    if path.exists():
        return path
    bundled = data_dir / f"{name_or_path}{suffix}"
    if bundled.exists():
        return bundled
    raise FileNotFoundError(f"No such file or bundled {suffix} document: '{name_or_path}'")


def _config_error(error: ValidationError) -> ConfigError:
    first = error.errors()[0]
    key = ".".join(str(part) for part in first["loc"]) or "document"
    return ConfigError(key, first["msg"])


class JsonSetupRepository(SetupRepositoryInterface):
    """JSON setup documents on disk, with bundled documents addressable by name"""

    def __init__(self, data_dir: Path = DATA_DIR):
        self._data_dir = data_dir

    def read_text(self, name_or_path: str) -> str:
        return resolve_bundled(name_or_path, ".json", self._data_dir).read_text(encoding="utf-8")

    def get(self, name_or_path: str) -> SetupConfig:
        return self.parse(self.read_text(name_or_path))

    def parse(self, text: str) -> SetupConfig:
        try:
            document = SetupDocument.model_validate_json(text)
        except ValidationError as e:
            raise _config_error(e) from e
        return document.to_entity()

    def serialize(self, config: SetupConfig) -> str:
        """Canonical form: sorted keys, two-space indent, trailing newline"""
        document = SetupDocument.from_entity(config).model_dump(mode="json")
        return json.dumps(document, indent=2, sort_keys=True) + "\n"
