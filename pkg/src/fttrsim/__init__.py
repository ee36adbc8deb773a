"""Discrete-event simulator for XR traffic over Fiber-To-The-Room (cascaded TDM-PON + WiFi)."""

__version__ = "0.1.0"
