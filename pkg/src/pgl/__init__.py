"""Pandemic location game: epidemic final sizes, equilibria and price of anarchy."""

__version__ = "0.1.0"

from .epidemic import (
    DegenerateError,
    DomainError,
    FinalSizeSolution,
    GameParams,
    PglError,
    SingularityError,
    SirTrajectory,
    SolverError,
    attack_probability,
    attack_probability_derivative,
    final_size,
    final_size_array,
    final_size_derivative,
    final_size_second_derivative,
    simulate_sir,
)
from .game import (
    Allocation,
    LocationCost,
    altruistic_cost,
    isolation_cost,
    selfish_cost,
    selfish_cost_derivative,
    social_cost,
    uniform_social_cost,
)
from .equilibrium import (
    EssRecord,
    EssReport,
    altruistic_ess_threshold,
    altruistic_stability_interval,
    check_ess,
    enumerate_uniform_ess,
    max_selfish_support,
)
from .analysis import (
    PoaReport,
    altruistic_poa_growth,
    optimal_social_cost,
    selfish_poa,
)
