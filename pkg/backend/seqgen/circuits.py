"""
Circuit builders for the sequence models
E(x) writes token codes with X gates; N(theta) is an RY bias on the target
followed by one singly-controlled RY per control qubit.
"""

from functools import lru_cache
from typing import Optional, Sequence, Tuple

from errors import ParameterError, QubitIndexError, SpecError, VocabularyError
from seqgen.corpus import PAD_ID
from seqgen.spec import SeqModelSpec, expand_neurons
from simulator.circuit import Circuit, CircuitBuilder
from simulator.gates import GateKind
from simulator.statevector import read_register


def _check_code(token: int, bits: int) -> int:
    if not 0 <= token < 1 << bits:
        raise VocabularyError(f"token id {token} does not fit in {bits} bits")
    return token


def encode_tokens(tokens: Sequence[int], bits_per_token: int, width: Optional[int] = None, offset: int = 0,
                  previous: Optional[Sequence[int]] = None) -> Circuit:
    """
    Basis encoding: token i goes to qubits offset + i*bits ... offset + (i+1)*bits - 1

    `previous` holds the codes already on those sub-registers; only differing
    bits are flipped.
    """
    previous = list(previous) if previous is not None else [PAD_ID] * len(tokens)
    if len(previous) != len(tokens):
        raise ParameterError(f"{len(previous)} previous codes for {len(tokens)} tokens")
    width = width if width is not None else offset + bits_per_token * len(tokens)
    builder = CircuitBuilder(max(width, 1))
    for i, (token, old) in enumerate(zip(tokens, previous)):
        flips = _check_code(token, bits_per_token) ^ _check_code(old, bits_per_token)
        for bit in range(bits_per_token):
            if flips >> bit & 1:
                builder.x(offset + i * bits_per_token + bit)
    return builder.build()


def build_neuron(controls: Sequence[int], target: int, slots: Sequence[str], width: Optional[int] = None) -> Circuit:
    """Bias RY(slots[0]) on target, then controlled-RY(slots[j+1]) from controls[j]"""
    if target in controls:
        raise QubitIndexError(f"neuron target {target} is also a control")
    if len(slots) != len(controls) + 1:
        raise ParameterError(f"neuron with {len(controls)} controls needs {len(controls) + 1} slots, got {len(slots)}")
    width = width if width is not None else max((target, *controls)) + 1
    builder = CircuitBuilder(width)
    builder.ry(target, slots[0])
    for control, slot in zip(controls, slots[1:]):
        builder.mcu(GateKind.RY, [control], target, slot)
    return builder.build()


def build_seq_circuit(spec: SeqModelSpec, context: Optional[Sequence[int]] = None) -> Circuit:
    """
    Whole model for one context window

    Stage s writes context[s] into input slot s mod input_slots, then applies
    the neuron blocks attached to stage s. No reset and no mixing between
    stages. A missing context is the all-padding window.
    """
    context = tuple(context) if context is not None else (PAD_ID,) * spec.context_length
    if len(context) != spec.context_length:
        raise SpecError(f"context of {len(context)} tokens, model expects {spec.context_length}")
    return _seq_circuit(spec, context)


@lru_cache(maxsize=256)
def _seq_circuit(spec: SeqModelSpec, context: Tuple[int, ...]) -> Circuit:
    width = spec.total_qubits
    neurons = expand_neurons(spec)
    builder = CircuitBuilder(width)
    written = [PAD_ID] * spec.input_slots
    for stage, token in enumerate(context):
        slot = stage % spec.input_slots
        offset = spec.slot_qubits(slot)[0]
        builder.extend(encode_tokens([token], spec.bits_per_token, width, offset, [written[slot]]))
        written[slot] = token
        for neuron in neurons:
            if neuron.stage == stage:
                builder.extend(build_neuron(neuron.controls, neuron.target, neuron.slots, width))
    circuit = builder.build()
    if circuit.count(GateKind.RESET):
        raise SpecError("sequence circuits never reset")
    return circuit


def decode_input(spec: SeqModelSpec, index: int) -> Tuple[int, ...]:
    """Token codes held by each input slot in one basis index"""
    return tuple(read_register(index, spec.slot_qubits(slot)) for slot in range(spec.input_slots))
