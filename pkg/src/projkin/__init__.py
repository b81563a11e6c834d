"""Projective Runge-Kutta integration for kinetic equations with BGK relaxation."""
__version__ = "0.1.0"
