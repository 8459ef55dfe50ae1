"""
Run configuration sidecar.

A sidecar is a text file of ``key=value`` lines holding every parameter of
one command invocation, defaults included. Multi-valued parameters use one
``key[]=value`` line per value. Lines starting with ``#`` are comments.
"""
import math
import os
from pathlib import Path
from typing import Any, Dict, List, Union

from pydantic import BaseModel, Field

from .. import __version__
from ..core.errors import ConfigError

PathLike = Union[str, os.PathLike]


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


class RunConfig(BaseModel):
    """Effective parameters of one command invocation."""

    command: str = Field(..., min_length=1, description="Subcommand name")
    params: Dict[str, Union[str, List[str]]] = Field(default_factory=dict, description="Parameter values as text")

    @classmethod
    def from_params(cls, command: str, params: Dict[str, Any]) -> "RunConfig":
        """Capture click's resolved parameters; None values are left out."""
        text: Dict[str, Union[str, List[str]]] = {}
        for key, value in sorted(params.items()):
            if value is None:
                continue
            if isinstance(value, (list, tuple)):
                if value:
                    text[key] = [_format_value(v) for v in value]
                continue
            text[key] = _format_value(value)
        return cls(command=command, params=text)

    def to_text(self) -> str:
        lines = [f"# pelflow {__version__} run configuration", f"command={self.command}"]
        for key, value in self.params.items():
            if isinstance(value, list):
                lines.extend(f"{key}[]={v}" for v in value)
            else:
                lines.append(f"{key}={value}")
        return "\n".join(lines) + "\n"

    def write(self, path: PathLike) -> Path:
        path = Path(path)
        path.write_text(self.to_text())
        return path

    @classmethod
    def parse(cls, text: str, source: str = "<sidecar>") -> "RunConfig":
        command = None
        params: Dict[str, Union[str, List[str]]] = {}
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{source}:{number}: expected key=value, got {line!r}")
            key, value = line.split("=", 1)
            key = key.strip()
            if key == "command":
                command = value.strip()
            elif key.endswith("[]"):
                bucket = params.setdefault(key[:-2], [])
                if not isinstance(bucket, list):
                    raise ConfigError(f"{source}:{number}: {key[:-2]} given as both scalar and list")
                bucket.append(value)
            else:
                params[key] = value
        if not command:
            raise ConfigError(f"{source}: no command= line")
        return cls(command=command, params=params)

    @classmethod
    def read(cls, path: PathLike) -> "RunConfig":
        return cls.parse(Path(path).read_text(), source=str(path))

    def default_map(self) -> Dict[str, Dict[str, Union[str, List[str]]]]:
        """click ``default_map`` replaying this run."""
        return {self.command: dict(self.params)}
