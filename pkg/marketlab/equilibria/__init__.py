"""
Closed-form competitive and Nash equilibria of every market design.
"""

from .da_mpm import *
from .factory import *
from .rt_mpm import *
from .slope import *
from .standard import *

__all__ = [
    'competitive_standard', 'nash_standard', 'load_split_standard',
    'da_dominance_threshold',
    'competitive_rt_mpm', 'nash_rt_mpm',
    'competitive_da_mpm', 'nash_da_mpm',
    'competitive_slope', 'nash_slope',
    'CompetitiveNashSolvers', 'create_solver', 'solve_equilibrium'
]
