"""Vector-level witnesses of the f(l)-distortion by the l-norm.

z1 is a normalized sum of l normalized blocks at separated scales, so its
l-norm stays close to 1. z2 is a long normalized constant block, which looks
like an l1 average and has l-norm close to 1/f(l). The ratio of the two
l-norms cannot exceed f(l) and approaches it only slowly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ValidationError
from ..normkernel.certs import cert_to_json
from ..normkernel.runs import run_ell_norm
from ..vectorspace import LOG2P1, RunVector, ScalingFunction
from .blocks import AverageSpec, build_averages, runs_ell_norm, runs_norm, successive_specs

RATIO_TOL = 1e-9


@dataclass
class WitnessReport:
    ell: int
    z1_spec: list
    z2_spec: AverageSpec
    norm_z1_sum: float
    ell_norm_z1: float
    ell_norm_z2: float
    ratio: float
    target: float
    epsilon_effective: float
    size_rule_epsilon: float
    bound_shape: float
    z1_lower_bound: float
    certificates: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "ell": self.ell,
            "z1_spec": [s.as_dict() for s in self.z1_spec],
            "z2_spec": self.z2_spec.as_dict(),
            "norm_z1_sum": self.norm_z1_sum,
            "ell_norm_z1": self.ell_norm_z1,
            "ell_norm_z2": self.ell_norm_z2,
            "ratio": self.ratio,
            "target": self.target,
            "epsilon_effective": self.epsilon_effective,
            "size_rule_epsilon": self.size_rule_epsilon,
            "bound_shape": self.bound_shape,
            "z1_lower_bound": self.z1_lower_bound,
            "certificates": {k: cert_to_json(v) for k, v in self.certificates.items()},
        }


def build_witness_z1(ell: int, lengths, f: ScalingFunction = LOG2P1, *, straddle: str = "auto"):
    """z1 = sum(y_i) / |sum(y_i)| for normalized blocks y_i of the given lengths.

    Returns the unnormalized sum and a dict with its norm, the l-norm of z1, the
    certificates and the guaranteed bound (l / f(l)) / |sum y_i| from choosing
    the blocks' own supports.
    """
    lengths = [int(m) for m in lengths]
    if ell < 2:
        raise ValidationError("ell must be >= 2")
    if len(lengths) != ell:
        raise ValidationError(f"need exactly ell = {ell} block lengths")
    if any(b < a for a, b in zip(lengths, lengths[1:])):
        raise ValidationError("block lengths must be nondecreasing")
    specs = successive_specs(lengths)
    total = build_averages(specs, f)
    norm, cert = runs_norm(total, f, straddle=straddle)
    ell_val, ell_cert = runs_ell_norm(total, ell, f, straddle=straddle)
    part = {
        "specs": specs,
        "sum": total,
        "norm_sum": norm,
        "norm_cert": cert,
        "ell_norm": ell_val / norm,
        "ell_cert": ell_cert,
        "lower_bound": (ell / f(ell)) / norm,
    }
    return total.scale(1 / norm), part


def build_witness_z2(ell: int, n: int, f: ScalingFunction = LOG2P1):
    """Normalized constant block of length n and its l-norm."""
    if ell < 2:
        raise ValidationError("ell must be >= 2")
    if n < 1:
        raise ValidationError("n must be >= 1")
    spec = AverageSpec(1, n)
    z2 = RunVector.constant(spec.value(f), n)
    val, cert = run_ell_norm(z2, ell, f)
    eps = 4 * ell / n
    part = {
        "spec": spec,
        "ell_norm": val,
        "ell_cert": cert,
        "epsilon_effective": f(ell) * val - 1,
        "size_rule_epsilon": eps,
        "bound_shape": eps / 2 + (1 + eps / 2) / f(ell),
    }
    return z2, part


def distortion_report(ell: int, z1_lengths, z2_n: int, f: ScalingFunction = LOG2P1, *,
                      straddle: str = "auto") -> WitnessReport:
    _, p1 = build_witness_z1(ell, z1_lengths, f, straddle=straddle)
    _, p2 = build_witness_z2(ell, z2_n, f)
    ratio = p1["ell_norm"] / p2["ell_norm"]
    target = f(ell)
    if ratio > target + RATIO_TOL:
        raise AssertionError(f"ratio {ratio} exceeds f(ell) = {target}")
    return WitnessReport(
        ell=ell,
        z1_spec=p1["specs"],
        z2_spec=p2["spec"],
        norm_z1_sum=p1["norm_sum"],
        ell_norm_z1=p1["ell_norm"],
        ell_norm_z2=p2["ell_norm"],
        ratio=ratio,
        target=target,
        epsilon_effective=p2["epsilon_effective"],
        size_rule_epsilon=p2["size_rule_epsilon"],
        bound_shape=p2["bound_shape"],
        z1_lower_bound=p1["lower_bound"],
        certificates={"z1_sum": p1["norm_cert"], "z1_ell": p1["ell_cert"], "z2_ell": p2["ell_cert"]},
    )
