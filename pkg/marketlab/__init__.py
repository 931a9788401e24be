"""
Solvers, verifiers and parameter sweeps for two-stage electricity markets
with strategic generators and loads.
"""
