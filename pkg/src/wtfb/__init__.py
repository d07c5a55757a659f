"""Secrecy bounds and coding simulations for wiretap channels with feedback."""

__version__ = "0.1.0"
