from .engine import DEFAULT_DEPTH, DerivationFailure, ProofTrace, derive, explain
from .groups import Fact, Group, ParseError, parse_fact, parse_group
from .kb import KBError, KnowledgeBase, load_kb
from .trace_check import TraceError, check_trace

__all__ = ["DEFAULT_DEPTH", "DerivationFailure", "ProofTrace", "derive", "explain", "Fact", "Group",
           "ParseError", "parse_fact", "parse_group", "KBError", "KnowledgeBase", "load_kb",
           "TraceError", "check_trace"]
