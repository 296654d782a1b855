from analysis.data import DataSetTable, PublishedPair, load_published_pairs, read_measured_csv, write_measured_csv
from analysis.propagation import (
    Expression, Method, PropagationConfig, PropagationResult, pair_expression, projector_expression,
    propagate, propagate_values, witness_expression,
)
from analysis.reproduction import (
    REPORTED_PROJECTOR_INDICES, PairComparison, ReproductionReport, WitnessRow, published_pair_ids,
    reproduce_paper, stationarity_check, write_report,
)

__all__ = [
    'DataSetTable', 'Expression', 'Method', 'PairComparison', 'PropagationConfig',
    'PropagationResult', 'PublishedPair', 'REPORTED_PROJECTOR_INDICES', 'ReproductionReport',
    'WitnessRow', 'load_published_pairs', 'pair_expression', 'projector_expression', 'propagate',
    'propagate_values', 'published_pair_ids', 'read_measured_csv', 'reproduce_paper',
    'stationarity_check', 'witness_expression', 'write_measured_csv', 'write_report',
]
