"""qmx: connected-moments (CMX) and PDS energy expansions for small qubit
Hamiltonians, over Hartree-Fock and ADAPT-VQE prepared states, with
measurement caching and coefficient thresholding."""

from .exact import exact_spectrum, oracle_moments, sum_to_matrix, word_to_matrix
from .fermion import (
    FermionHamiltonian,
    PoolElement,
    build_fermionic_singlet_pool,
    build_pauli_pool,
    build_s2_operator,
    hf_bitstring,
    jordan_wigner,
    jw_annihilation,
    jw_creation,
    parse_fcidump,
)
from .moments import (
    CmxResult,
    ExpectationCache,
    MomentTable,
    PdsResult,
    cache_load,
    cache_save,
    cmx_energy,
    connected_moments,
    measurement_report,
    pds_energy,
    raw_moments,
    state_fingerprint,
)
from .pauli import (
    PauliSum,
    PauliWord,
    commutator,
    read_hamiltonian_file,
    sum_mul,
    sum_power,
    truncate_by_coeff,
    word_mul,
    write_hamiltonian_file,
)
from .simulate import (
    AnsatzProgram,
    AnsatzStep,
    Statevector,
    apply_generator_exp,
    dump_amplitudes,
    estimate_depth,
    expect_sum,
    expect_word,
    load_amplitudes,
    prepare_ansatz_state,
    prepare_basis_state,
)
from .vqe import (
    AdaptTrace,
    VqeResult,
    adapt_run,
    parameter_shift_gradient,
    vqe_minimize,
)

__version__ = "0.1.0"
