"""Experiment drivers, reference solvers and the command-line interface."""
