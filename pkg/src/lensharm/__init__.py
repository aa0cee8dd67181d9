"""Lens-space spectra, harmonic-counting measures and isospectrality on congruence lattices."""
