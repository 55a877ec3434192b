"""Polarization-controlled four-wave-mixing gear simulator."""
