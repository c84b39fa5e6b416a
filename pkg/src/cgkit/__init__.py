"""cgkit: projection-free conditional-gradient solvers over structured
atomic domains.

The public surface: atoms and active sets (`cgkit.atoms`), linear
minimization oracles with a weak-separation cache (`cgkit.lmo`), step
rules (`cgkit.steps`), the solver variants (`cgkit.solvers`), experiment
instances (`cgkit.problems`), a reference projected-gradient baseline
(`cgkit.pgd`) and the benchmark harness (`cgkit.cli`).
"""

from cgkit._core import HAVE_COMPILED, backend
from cgkit.atoms import (
    ActiveSet,
    Atom,
    DenseVec,
    Permutation,
    RankOne,
    ScaledUnit,
    SignedSupport,
    atom_inner,
    iterate_blend,
)
from cgkit.lmo import (
    BirkhoffLMO,
    EnumerationLMO,
    KSparseLMO,
    LinearMinimizationOracle,
    LpBallLMO,
    NuclearNormLMO,
    ProbabilitySimplexLMO,
    VertexCache,
    cached_query,
    hungarian,
    nuclear_norm_lmo,
    top_singular_pair,
)
from cgkit.solvers import (
    RunParams,
    SolverResult,
    TrajectoryRecord,
    away_frank_wolfe,
    blended_cg,
    dual_gap,
    frank_wolfe,
    lazified_frank_wolfe,
    stochastic_fw,
)
from cgkit.steps import (
    AdaptiveStep,
    AgnosticStep,
    LineSearchStep,
    RationalShortStep,
    ShortStep,
    agnostic_step,
    segment_line_search,
    short_step,
)

__version__ = "0.1.0"
