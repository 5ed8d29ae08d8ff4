"""
Sequence-model specification
Registers are laid out input | hidden | output. Context tokens are streamed
through the input register one stage at a time; neuron blocks attach to a
stage, a target register and a list of source registers.
"""

import json
import logging
from enum import Enum
from pathlib import Path
from typing import List, NamedTuple, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from errors import SpecError

logger = logging.getLogger(__name__)

SPEC_DIR = Path(__file__).resolve().parent / "specs"


class Register(str, Enum):
    INPUT = "input"
    HIDDEN = "hidden"
    OUTPUT = "output"


class Architecture(str, Enum):
    PROPOSED = "proposed"
    LONDON = "london-baseline"
    UNIFORM = "uniform"


class NeuronBlock(BaseModel):
    """`layers` repetitions of one neuron per target qubit"""
    model_config = ConfigDict(frozen=True)

    stage: int = Field(ge=0)
    target: Register
    sources: Tuple[Register, ...]
    layers: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _check_registers(self) -> "NeuronBlock":
        if self.target == Register.INPUT:
            raise SpecError("neurons cannot target the input register")
        if not self.sources:
            raise SpecError("a neuron block needs at least one source register")
        if len(set(self.sources)) != len(self.sources):
            raise SpecError("repeated source register")
        return self


class Neuron(NamedTuple):
    stage: int
    controls: Tuple[int, ...]
    target: int
    slots: Tuple[str, ...]


class SeqModelSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    architecture: Architecture
    bits_per_token: int = Field(default=4, ge=1)
    context_length: int = Field(default=2, ge=1)
    input_slots: int = Field(default=1, ge=1)
    hidden_width: int = Field(default=1, ge=0)
    output_width: int = Field(default=4, ge=1)
    # classification readout (london-baseline): index into the hidden register
    readout: Optional[int] = None
    blocks: Tuple[NeuronBlock, ...] = ()

    @model_validator(mode="after")
    def _check_wiring(self) -> "SeqModelSpec":
        for block in self.blocks:
            if block.stage >= self.context_length:
                raise SpecError(f"block at stage {block.stage} but context length is {self.context_length}")
            for register in (block.target, *block.sources):
                if self.width_of(register) == 0:
                    raise SpecError(f"block uses the empty {register.value} register")
        if self.readout is not None and not 0 <= self.readout < self.hidden_width:
            raise SpecError(f"readout {self.readout} outside the hidden register")
        if self.architecture == Architecture.UNIFORM and self.blocks:
            raise SpecError("the uniform baseline has no neurons")
        if self.architecture == Architecture.LONDON and self.readout is None:
            raise SpecError("london-baseline needs a designated readout qubit")
        return self

    @property
    def input_width(self) -> int:
        return self.bits_per_token * self.input_slots

    @property
    def total_qubits(self) -> int:
        return self.input_width + self.hidden_width + self.output_width

    def width_of(self, register: Register) -> int:
        return {
            Register.INPUT: self.input_width,
            Register.HIDDEN: self.hidden_width,
            Register.OUTPUT: self.output_width,
        }[register]

    def qubits_of(self, register: Register) -> Tuple[int, ...]:
        start = {
            Register.INPUT: 0,
            Register.HIDDEN: self.input_width,
            Register.OUTPUT: self.input_width + self.hidden_width,
        }[register]
        return tuple(range(start, start + self.width_of(register)))

    @property
    def output_qubits(self) -> Tuple[int, ...]:
        return self.qubits_of(Register.OUTPUT)

    @property
    def readout_qubit(self) -> Optional[int]:
        if self.readout is None:
            return None
        return self.qubits_of(Register.HIDDEN)[self.readout]

    def slot_qubits(self, slot: int) -> Tuple[int, ...]:
        start = slot * self.bits_per_token
        return tuple(range(start, start + self.bits_per_token))


def expand_neurons(spec: SeqModelSpec) -> List[Neuron]:
    """
    Neurons in application order

    A source equal to the target register contributes only the qubits below
    the neuron's target, so each output qubit sees the ones before it.
    """
    neurons = []
    for number, block in enumerate(spec.blocks):
        targets = spec.qubits_of(block.target)
        for layer in range(block.layers):
            for position, target in enumerate(targets):
                controls: List[int] = []
                for source in block.sources:
                    qubits = spec.qubits_of(source)
                    controls.extend(qubits[:position] if source == block.target else qubits)
                name = f"s{block.stage}.b{number}.l{layer}.{block.target.value}{position}"
                slots = (f"{name}.bias",) + tuple(f"{name}.c{q}" for q in controls)
                neurons.append(Neuron(block.stage, tuple(controls), target, slots))
    return neurons


def count_parameters(spec: SeqModelSpec) -> int:
    return sum(len(neuron.controls) + 1 for neuron in expand_neurons(spec))


def load_spec(path) -> SeqModelSpec:
    try:
        with open(path, 'r') as f:
            data = json.load(f)
        return SeqModelSpec(**data)
    except FileNotFoundError:
        raise SpecError(f"{path} not found")
    except (json.JSONDecodeError, TypeError, ValidationError) as exc:
        raise SpecError(f"invalid model spec {path}: {exc}")


def builtin_spec(name: str) -> SeqModelSpec:
    """proposed / london-baseline (alias london) / uniform"""
    aliases = {"london": Architecture.LONDON.value}
    name = aliases.get(name, name)
    try:
        Architecture(name)
    except ValueError:
        raise SpecError(f"unknown architecture {name!r}; use proposed, london or uniform")
    return load_spec(SPEC_DIR / f"{name}.json")
