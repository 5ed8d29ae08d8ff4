"""
Hardware-efficient layered ansatz
Each layer applies RY then RZ on every qubit, followed by a CNOT ring
q -> (q+1) mod m. Parameters are ordered per layer, per qubit: (ry, rz).
"""

from typing import List

from pydantic import BaseModel, ConfigDict, Field

from simulator.circuit import Circuit, CircuitBuilder


class AnsatzSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    qubits: int = Field(ge=1)
    layers: int = Field(ge=1)

    @property
    def num_params(self) -> int:
        return 2 * self.qubits * self.layers

    def param_names(self, prefix: str = "") -> List[str]:
        names = []
        for layer in range(self.layers):
            for qubit in range(self.qubits):
                names.append(f"{prefix}l{layer}.q{qubit}.ry")
                names.append(f"{prefix}l{layer}.q{qubit}.rz")
        return names


def build_ansatz_circuit(spec: AnsatzSpec, prefix: str = "") -> Circuit:
    builder = CircuitBuilder(spec.qubits, prefix=prefix)
    for layer in range(spec.layers):
        for qubit in range(spec.qubits):
            builder.ry(qubit, f"l{layer}.q{qubit}.ry")
            builder.rz(qubit, f"l{layer}.q{qubit}.rz")
        if spec.qubits > 1:
            for qubit in range(spec.qubits):
                builder.cnot(qubit, (qubit + 1) % spec.qubits)
    return builder.build()
