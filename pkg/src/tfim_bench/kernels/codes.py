"""Integer codes shared by the kernel implementations."""

RX = 0
RZZ = 1
HAD = 2

PAULI_I = 0
PAULI_X = 1
PAULI_Y = 2
PAULI_Z = 3
