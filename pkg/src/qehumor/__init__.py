"""Density-matrix entropy features and an SVM harness for humor recognition."""

__version__ = "0.1.0"
