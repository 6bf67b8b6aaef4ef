"""Certified entanglement bounds from witness data.

Trusted witnesses, measurement-device-independent correlation tables and
Bell values are turned into lower bounds on the trace-distance entanglement
``E_tr`` (and quantifiers derived from it). An independent separable-state
search in `entwitness.oracle` supplies upper bounds to check them against.
"""

from . import config
from .depth import depth_trace_bound, producibility_bound, svetlichny, trusted_depth_bound
from .di import (
    BellExpression,
    QuantumRange,
    bell_operator,
    chsh,
    chsh_product_max,
    classical_bound,
    di_trace_bound,
    quantum_range,
    tsirelson_range,
)
from .errors import EntWitnessError
from .linalg import (
    DensityMatrix,
    HermitianOperator,
    Spectrum,
    eigendecompose,
    expectation,
    tensor,
    trace_distance,
    trace_norm,
)
from .mdi import (
    MdiDecomposition,
    PovmMeasurement,
    decompose_witness,
    mdi_trace_bound,
    mdi_value,
    outcome_values,
    simulate,
)
from .oracle import etr_upper_bound, ppt_check, verify
from .witness import BoundReport, Witness, bound_table, normalize, ratio_check, trace_bound

__version__ = "0.1.0"
