"""Toolkit for finite-speed causal-influence models of quantum correlations:
spacetime v-cone geometries, behavior tables and Bell expressions, an
embedded-LP polytope bound, qubit see-saw optimization, exact v-causal
simulation, and the end-to-end superluminal-signalling demonstration."""

from .behavior import (Behavior, BellExpression, ConditionalFamily,
                       SignallingReport, behavior_from_json, behavior_to_json,
                       conditional_bc_given_ad, evaluate_bell,
                       expression_from_json, expression_to_json,
                       is_no_signalling, marginal, supports_only_ABD_ACD,
                       uniform_behavior)
from .errors import (InternalInconsistencyError, InvalidInputError,
                     SolverFailureError, TotalityError)
from .expressions import QUANTUM_S, chsh, correlator_abcd, hidden_influence_s
from .lp import LinearProgram, LPResult, solve_lp
from .polytope import (DeterministicStrategy, LemmaBound, LocalMembership,
                       conditional_locality_check, deterministic_tables,
                       enumerate_strategies, lemma_polytope_max,
                       local_membership, max_bell_local,
                       random_constrained_behavior, vcausal_config_max)
from .quantum import (QuantumSetup, SeesawResult, behavior_from_quantum,
                      bell_operator, eigh_hermitian,
                      ordering_independence_check, random_setup,
                      reference_setup, seesaw_maximize, setup_from_json,
                      setup_to_json)
from .spacetime import (CausalRelation, Event, Geometry,
                        broadcast_meeting_events, canonical_geometry,
                        causal_relation, effective_speed, geometry_from_json,
                        geometry_to_json, matches, ordering,
                        randomized_schedule, reflect_geometry)
from .vmodel import (DemoReport, SimulationOutcome, VStrategy,
                     demo_report_to_json, marginal_consistency_check,
                     random_strategy, signalling_demo, simulate,
                     strategy_from_json, strategy_to_json,
                     trivial_sequential_model)

__version__ = "0.1.0"
