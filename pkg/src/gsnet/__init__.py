"""Bell-pair extraction from noisy cluster-state chains.

The package simulates entanglement-based networks whose nodes share a 1D
cluster state. Measuring out the qubits between two targets converts the
chain into a Bell pair; the surviving fidelity depends on gate noise, on
memory dephasing while classical outcomes travel, and on the measurement
pattern. Simulation tracks noise operators symbolically through the
measurement sequence, so cost scales with the number of noise terms
rather than the Hilbert-space dimension; a small dense-matrix oracle
provides an independent cross-check.
"""

from .graphstate import GraphState, chain_graph, measure_update
from .network import (
    EntanglementTopology,
    NetworkGeometry,
    Request,
    delays_central,
    delays_local,
    hops,
    line_geometry,
)
from .noise import (
    NoiseAssignment,
    PauliChannel,
    dephasing_channel,
    depolarizing_channel,
    strategy_fidelity,
)
from .oracle import dense_oracle_fidelity
from .patterns import (
    MeasurementPattern,
    Strategy,
    all_x_pattern,
    best_patterns,
    dephasing_candidate_pattern,
    enumerate_patterns,
    optimize_pattern,
    pattern_from_string,
    pattern_string,
    pattern_to_strategy,
    strategy_to_pattern,
)
from .scenarios import (
    NetworkScenario,
    NoiseParameters,
    ScenarioResult,
    dense_request_fidelity,
    run_request,
    run_topology_comparison,
    sweep_asymmetry,
    sweep_symmetric_grid,
    symmetric_scenario,
)

__version__ = "0.1.0"
