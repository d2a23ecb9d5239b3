"""Refined DT invariants of quivers with potential via finite-field point counts."""
