# backend/workbench/__init__.py
"""군 위의 cellular automaton workbench"""

import logging

from .marked_groups import (
    AgreementRadius,
    FreeWord,
    MarkedGroup,
    cyclic_group,
    finite_group,
    free_group,
    marked_distance,
    symmetric_group,
    trivial_group,
    zd_group,
)
from .uniform_windows import WindowPattern, WindowSet, hb_agreement_radius, window_entourage_check
from .shift_space import (
    FiniteConfiguration,
    FixFamily,
    PeriodicConfiguration,
    fix_window,
    full_shift,
    rho_star,
    rho_star_inverse,
    shift_act,
)
from .ca_engine import (
    CellularAutomaton,
    GroupCellularAutomaton,
    ca_apply,
    ca_compose,
    ca_window_apply,
    descend_ca,
    eca,
    pullback_ca,
    synthesize_ca,
)
from .linear_ca import (
    GroupAlgebraMatrix,
    LinearKernel,
    lin_apply,
    lin_decide,
    lin_inverse_kernel,
    lin_matrix,
    stable_finiteness_witness,
)
from .surjunctivity_lab import (
    convergence_experiment,
    gromov_radius,
    injectivity_transfer_check,
    is_injective_1d,
    is_surjective_1d,
    modulus_profile,
    periodic_oracle,
)

logger = logging.getLogger(__name__)

__all__ = [
    'AgreementRadius', 'FreeWord', 'MarkedGroup',
    'cyclic_group', 'finite_group', 'free_group', 'marked_distance', 'symmetric_group', 'trivial_group', 'zd_group',
    'WindowPattern', 'WindowSet', 'hb_agreement_radius', 'window_entourage_check',
    'FiniteConfiguration', 'FixFamily', 'PeriodicConfiguration',
    'fix_window', 'full_shift', 'rho_star', 'rho_star_inverse', 'shift_act',
    'CellularAutomaton', 'GroupCellularAutomaton',
    'ca_apply', 'ca_compose', 'ca_window_apply', 'descend_ca', 'eca', 'pullback_ca', 'synthesize_ca',
    'GroupAlgebraMatrix', 'LinearKernel',
    'lin_apply', 'lin_decide', 'lin_inverse_kernel', 'lin_matrix', 'stable_finiteness_witness',
    'convergence_experiment', 'gromov_radius', 'injectivity_transfer_check',
    'is_injective_1d', 'is_surjective_1d', 'modulus_profile', 'periodic_oracle',
]
