from interfsim.coupling import (
    CouplingConfig, Mode, ProtocolSettings, default_chi_grid, ideal_intensity, pointer_infidelity,
    pointer_states,
)
from interfsim.simulator import Interferogram, expected_counts, simulate, subtract_background
from interfsim.fitting import SineFit, fit_sine
from interfsim.extraction import (
    MeasuredZ, ProtocolRun, extract_weak_value, invert_asymmetries, measure_weak_value, run_protocol,
)

__all__ = [
    'CouplingConfig', 'Interferogram', 'MeasuredZ', 'Mode', 'ProtocolRun', 'ProtocolSettings',
    'SineFit', 'default_chi_grid', 'expected_counts', 'extract_weak_value', 'fit_sine',
    'ideal_intensity', 'invert_asymmetries', 'measure_weak_value', 'pointer_infidelity',
    'pointer_states', 'run_protocol', 'simulate', 'subtract_background',
]
