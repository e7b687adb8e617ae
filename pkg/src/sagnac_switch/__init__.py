"""Reciprocal SU(2) polarization gadgets and a Sagnac-loop quantum-SWITCH
simulator: gadget angle synthesis with bidirectional verification, a
physical noise/count model, the commute/anti-commute discrimination task
and its causal witness, and simulated gadget tomography."""

__version__ = "0.1.0"

from .su2 import (ID2, PAULI_X, PAULI_Y, PAULI_Z, KET_H, KET_V, KET_PLUS,
                  KET_MINUS, KET_L, KET_R, AxisAngle, anticommutator,
                  bloch_expectations, commutator, pauli, phase_equal,
                  projector, rotation, state_fidelity, su2_canonicalize)
from .elements import (Element, FORWARD, BACKWARD, faraday, f_minus, f_plus,
                       format_sequence, hwp, is_reciprocal, jones,
                       parse_sequence, qwp, reverse_element, sequence_matrix)
from .gadget import (GadgetAngles, GadgetReport, SynthesisError,
                     full_gadget_sequence, gx_sequence,
                     reciprocal_gadget_sequence, reduce_angles, synthesize,
                     verify_gadget)
from .gates import (GATE_NAMES, N_GATES, PairClass, classify, enumerate_pairs,
                    gate, gate_set)
from .switchsim import (CountsRecord, EfficiencyCorrection, FitError,
                        NoiseConfigError, NoiseModel, SwitchSetting,
                        default_calibrated_model, efficiency_correction,
                        expected_port_probabilities, ideal_output,
                        port_probabilities, simulate_counts)
from .discrimination import (CAUSAL_BOUND_MEAN, CAUSAL_BOUND_MIN,
                             ProcessMatrix, TaskReport, WitnessOperator,
                             WitnessConstructionError, build_switch_process_matrix,
                             build_witness, double_ket, fixed_order_source,
                             ideal_source, pair_operator,
                             probability_from_process, success_probability,
                             task_report, witness_expectation)
from .tomography import (characterize_ensemble, gate_fidelity, random_unitary,
                         reciprocity, reconstruct_state, simulate_measurements)
