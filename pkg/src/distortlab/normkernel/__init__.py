"""Evaluation of the norm, its level norms and the equivalent ell-norms."""

from .cache import CACHE_FORMAT, MemoCache, read_cache_file
from .certs import (EllCert, Leaf, Node, NormCert, cert_depth, cert_from_json, cert_to_json, cert_weights,
                    constant_cert, verify_cert, verify_ell_cert)
from .dense import DENSE_CAP, ORACLE_CAP, TIE_TOL, brute_norm, constant_norm, ell_norm, level_norm, s_norm
from .runs import RUN_CAP, STRADDLE_MODES, run_ell_norm, run_norm
