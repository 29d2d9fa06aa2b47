"""Data-driven model order reduction with the Loewner framework.

Typical pipeline::

    ds = sample_frequency_response(system, log_grid(0.1, 100, 400))
    td = conjugate_close(partition(ds))
    pencil = build_pencil(td, make_real=True)
    svd = svd_pencil(pencil)
    model = reduce(pencil, svd, select_order(svd, tol=1e-10))
"""

__version__ = "0.1.0"

from .analysis import (
    ErrorReport,
    SweepEntry,
    error_sweep,
    relative_error,
    response_table,
    singular_value_table,
)
from .core import (
    LoewnerPencil,
    PencilSVD,
    ReducedModel,
    build_pencil,
    reduce,
    reduce_bumping,
    select_order,
    svd_pencil,
    sylvester_residual,
)
from .data import (
    FrequencyResponseDataset,
    FrequencySample,
    extract_node,
    log_grid,
    read_dataset,
    sample_frequency_response,
    write_dataset,
)
from .lti import (
    DescriptorSystem,
    eval_transfer,
    freqresp,
    generate_modal_system,
    iss_like_system,
    poles,
)
from .partition import RealTransform, TangentialDataset, conjugate_close, partition, realify
