"""Exact norms on finitely supported sequences for a log-scaled mixed Tsirelson-type
space, its equivalent ell-norms, and distortion experiments."""

from .errors import CapExceededError, CertificateError, DistortlabError, ParseError, ValidationError
from .normkernel import (MemoCache, brute_norm, constant_norm, ell_norm, level_norm, run_ell_norm, run_norm,
                         s_norm, verify_cert, verify_ell_cert)
from .tsirelson import odell_norm, t_norm, t_theta_norm
from .vectorspace import (LOG2P1, FinVector, RunVector, ScalingFunction, canonicalize, parse_runs, parse_vector,
                          validate_scaling)

__version__ = "0.1.0"
