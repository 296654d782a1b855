from weakval.values import (
    PigeonholeReport, WeakValue, abl_probability, anomaly_flags, eigenprojector_terms,
    pairwise_zz_wv, pigeonhole_report, projector_weak_value, weak_value_pauli,
)
from weakval.witness import (
    BasisIndex, WitnessResult, forbidden_projector_wv, ideal_witness_value, ideal_zw,
    projector_weak_values, projector_wv_batch, sign_pattern, sign_pattern_direct,
    violation_sigmas, witness_C, witness_c_batch, witness_from_projectors,
)

__all__ = [
    'BasisIndex', 'PigeonholeReport', 'WeakValue', 'WitnessResult',
    'abl_probability', 'anomaly_flags', 'eigenprojector_terms', 'forbidden_projector_wv',
    'ideal_witness_value', 'ideal_zw', 'pairwise_zz_wv', 'pigeonhole_report',
    'projector_weak_value', 'projector_weak_values', 'projector_wv_batch', 'sign_pattern',
    'sign_pattern_direct', 'violation_sigmas', 'weak_value_pauli', 'witness_C', 'witness_c_batch',
    'witness_from_projectors',
]
