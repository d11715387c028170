"""Fundamental solution of the free-space fractional Fokker-Planck equation."""
