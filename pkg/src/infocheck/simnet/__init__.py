from .batch import BATCH_STRATEGIES, BatchResult, run_batch
from .complexity import ComplexityReport, analytic_counts, complexity_report, ledger_matches
from .montecarlo import RateEstimate, montecarlo, run_trials, wilson
from .network import AdversaryView, Network
from .secrecy import AuditView, SecrecyHistogram, secrecy_audit, view_from_transcript
from .session import CostLedger, SessionConfig, Transcript, run_session
from .strategies import make_strategy, strategy_catalog

__all__ = [
    "AdversaryView", "AuditView", "BATCH_STRATEGIES", "BatchResult", "ComplexityReport",
    "CostLedger", "Network", "RateEstimate", "SecrecyHistogram", "SessionConfig",
    "Transcript", "analytic_counts", "complexity_report", "ledger_matches", "make_strategy",
    "montecarlo", "run_batch", "run_session", "run_trials", "secrecy_audit",
    "strategy_catalog", "view_from_transcript", "wilson",
]
