"""Self-adjusting lists under precedence constraints.

DET and RAND are built on Move-Recursively-Forward; an exhaustive offline
optimum and event-level checks sit next to them for small instances.
"""

from .algorithms import (
    SERVERS,
    Access,
    AlgorithmState,
    Delete,
    EventRecord,
    Insert,
    Request,
    bit_reference,
    det_serve,
    mrf,
    mtf_reference,
    new_state,
    rand_serve,
    run,
    static_serve,
)
from .dag import (
    DependencyDag,
    build_dag,
    direct_dependency,
    is_linear_extension,
    is_transitive,
    reachable,
    transitive_closure,
)
from .errors import MrfError, ParseError, ValidationError
from .listcore import CostLedger, ListState, access, inversions, kls_sets, move_to, potential_det, potential_rand
from .offline import bfs_distance_oracle, enumerate_linear_extensions, opt_cost, transposition_distance
from .trace import Trace, parse_trace, serialize_trace

__version__ = "0.1.0"
