"""Exact finite-window marking of Poisson points and Markov path assembly."""

from .borel import MarkDistribution, digit_step, extract, inject
from .errors import (AlphabetMismatch, DegenerateWindow, EncoderCoreTooSmall, FinitaryError,
                     InsufficientCore, InsufficientSample, InvisibleJump, NoGroundingGap,
                     NotContained, StructureError, Undetermined)
from .flow import (IdentityEncoder, MarkovSpec, SlidingBlockEncoder, Trajectory,
                   ValidationReport, assemble_trajectory, disassemble, sample_ctmc,
                   validate_target)
from .marking import (PsiResult, coding_window, core_contains, mark_cells, marks_on,
                      psi_forward, psi_inverse, special_cells)
from .pointproc import (MarkedConfiguration, PointConfiguration, Window, extend, restrict,
                        sample_poisson, superpose, translate, translate_marked)
from .selection import (Globe, GlobeSet, SelectionParams, SpecialGlobes, find_globes,
                        locality_radius, special_globes)
from .verify import (TestReport, TrialPlan, measure_coding_windows, run_exact_suite,
                     run_statistical_suite)

__all__ = [name for name in dir() if not name.startswith("_")]
