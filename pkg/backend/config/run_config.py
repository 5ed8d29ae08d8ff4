"""
Run configuration
Built-in defaults < config file < command-line flags. The config file is
versioned key-value text:

    qnlp-config v1
    # comment
    seed = 7
    epochs = 40
"""

import logging
from typing import Dict, Mapping, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from errors import ConfigError

logger = logging.getLogger(__name__)

CONFIG_HEADER = "qnlp-config v1"


class RunConfig(BaseModel):
    """Effective settings of one CLI run"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    command: str
    seed: int = 0
    threads: Optional[int] = Field(default=None, ge=1)
    # qpostr
    text: Optional[str] = None
    alphabet: Optional[str] = None
    shots: Optional[int] = Field(default=None, ge=1)
    positions: Optional[float] = Field(default=None, ge=1)
    alphabet_size: Optional[float] = Field(default=None, ge=1)
    circuit_out: Optional[str] = None
    # training
    corpus: Optional[str] = None
    epochs: Optional[int] = Field(default=None, ge=0)
    learning_rate: Optional[float] = Field(default=None, gt=0)
    gradient_method: Optional[str] = None
    out: Optional[str] = None
    # embeddings
    scheme: str = "circuit"
    qubits: Optional[int] = Field(default=None, ge=1)
    layers: Optional[int] = Field(default=None, ge=1)
    window: Optional[int] = Field(default=None, ge=1)
    negatives: Optional[int] = Field(default=None, ge=1)
    model: Optional[str] = None
    pairs: Optional[str] = None
    # seqgen
    arch: str = "proposed"
    ckpt: Optional[str] = None
    split: str = "test"
    prompt: Optional[str] = None
    length: int = Field(default=5, ge=0)

    def record_fields(self) -> Dict:
        """Non-empty settings in a fixed order, for the printed config record"""
        return {key: value for key, value in self.model_dump().items() if value is not None}


FILE_KEYS = frozenset(RunConfig.model_fields) - {"command"}


def parse_config_text(text: str, source: str = "<config>") -> Dict[str, str]:
    values: Dict[str, str] = {}
    header_seen = False
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            if line != CONFIG_HEADER:
                raise ConfigError(f"{source}: first line must be {CONFIG_HEADER!r}, got {line!r}")
            header_seen = True
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{number}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in FILE_KEYS:
            raise ConfigError(f"{source}:{number}: unknown key {key!r}")
        values[key] = value
    if not header_seen:
        raise ConfigError(f"{source}: missing {CONFIG_HEADER!r} header")
    return values


def load_config_file(path: str) -> Dict[str, str]:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            text = f.read()
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}")
    values = parse_config_text(text, path)
    logger.info("Loaded %d settings from %s", len(values), path)
    return values


def resolve_run_config(command: str, file_values: Optional[Mapping[str, str]] = None,
                       flags: Optional[Mapping] = None) -> RunConfig:
    """Merge config-file values with the flags that were actually given"""
    merged: Dict = dict(file_values or {})
    merged.update({key: value for key, value in (flags or {}).items() if value is not None})
    try:
        return RunConfig(command=command, **merged)
    except ValidationError as exc:
        raise ConfigError(f"invalid configuration: {exc}")
