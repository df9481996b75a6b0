"""srsat: known-plaintext attacks on the SR(n,r,c,e) small-scale AES model
cipher compiled to CNF, with a solver campaign harness, runtime statistics,
and automatic algorithm configuration."""

__version__ = "0.1.0"

from .cipher import (
    CipherParams,
    EncryptionTrace,
    KeyMaterial,
    build_sbox,
    decrypt_block,
    default_params,
    encrypt_block,
    expand_key,
    format_hex_state,
    params_from_config,
    parse_hex_state,
)
from .cnf import ClauseSet, CnfInstance, VarLayout
from .encoder import (
    InstanceSpec,
    check_assignment,
    encode_key_schedule,
    encode_rounds,
    generate_instance,
    make_instance_spec,
    num_vars,
    sbox_relation_clauses,
    witness_assignment,
    xor_clause_expansion,
)
from .dimacs import SolverModel, parse_solver_output, read_dimacs, write_dimacs
from .harness import (
    Campaign,
    InstanceContext,
    NamedConfig,
    RunRecord,
    build_command,
    builtin_configs,
    extract_key,
    run_campaign,
    run_once,
    solve_internal,
)
from .stats import RunStatsSummary, boxplot_summary, summarize, to_table
from .tuner import (
    Configuration,
    EvalResult,
    ParamDef,
    ParamSpace,
    evaluate,
    export_incumbent,
    parse_pcs,
    race,
    sample_config,
)

__all__ = [name for name in dir() if not name.startswith("_")]
