"""Extended charge density and its shifted charge/torque pairings."""
