"""Pulsatile LH simulation and time-frequency analysis of circannual rhythms."""

__version__ = "0.1.0"
