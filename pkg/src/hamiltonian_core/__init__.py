"""Phase-space state, Hamiltonian, structural operator and derived fields."""
