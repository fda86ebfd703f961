"""Single-process scripting interface to the qpool state-vector simulator."""

from ._qpool import (
    CapabilityError,
    ContractError,
    DomainError,
    ParseError,
    QubitRegister,
    TransportError,
    run_circuit_file,
)

__all__ = [
    "CapabilityError",
    "ContractError",
    "DomainError",
    "ParseError",
    "QubitRegister",
    "TransportError",
    "run_circuit_file",
]
