"""Honeypot detection for EVM runtime bytecode."""

__version__ = "0.1.0"
