from wheel.wheel_set import (
    Context, ContextCheck, ContextProductReport, WheelSet, build_wheel, verify_context_products,
)
from wheel.nchv import (
    BoundaryResult, ExhaustiveResult, Gf2Result, Gf2System, NchvAssignment,
    apply_boundary_conditions, prove_no_nchv_exhaustive, prove_no_nchv_gf2,
)

__all__ = [
    'BoundaryResult', 'Context', 'ContextCheck', 'ContextProductReport', 'ExhaustiveResult',
    'Gf2Result', 'Gf2System', 'NchvAssignment', 'WheelSet', 'apply_boundary_conditions',
    'build_wheel', 'prove_no_nchv_exhaustive', 'prove_no_nchv_gf2', 'verify_context_products',
]
