"""First-order SAPT from monomer reduced density matrices."""
from .exchange import BLOCKS, ExchangeResult, SAPTError, VTilde, e_exch1, e_pol1
from .monomer import MonomerState, MonomerStateError, check_rdms, hf_like
from .naive import NaiveExchange, naive_exch1_oracle
from .pipeline import (MonomerRun, MonomerSpec, OrbitalReference, SAPTConfig, SAPTReport,
                       measured_e_pol1, run_sapt)
from .scan import ContinuationResult, continued_sapt, stretch_monomer, vqe_continuation

__all__ = [
    "BLOCKS", "ContinuationResult", "ExchangeResult", "MonomerRun", "MonomerSpec", "MonomerState",
    "MonomerStateError", "NaiveExchange", "OrbitalReference", "SAPTConfig", "SAPTError", "SAPTReport",
    "VTilde", "check_rdms", "continued_sapt", "e_exch1", "e_pol1", "hf_like", "measured_e_pol1",
    "naive_exch1_oracle", "run_sapt", "stretch_monomer", "vqe_continuation",
]
