"""Certificate records carried through every refutation pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class RefutationCertificate:
    """A numeric upper bound on the value of a target polynomial.

    ``sound`` is False whenever a sampled mean stood in for an exact
    expectation; only sound certificates are guaranteed to dominate the true
    value.  ``components`` records every sub-bound used by ``formula``.
    """

    instance_digest: str
    target: str  # which polynomial the bound applies to
    bound: float
    components: tuple[tuple[str, float], ...]
    formula: str
    partition_mode: str = "none"
    sound: bool = True
    slack: float = 1e-9

    def component(self, name: str) -> float:
        for key, value in self.components:
            if key == name:
                return value
        raise KeyError(name)

    def as_flat_dict(self) -> dict[str, object]:
        out: dict[str, object] = {
            "target": self.target,
            "bound": self.bound,
            "formula": self.formula,
            "partition_mode": self.partition_mode,
            "sound": self.sound,
            "slack": self.slack,
            "instance_digest": self.instance_digest,
        }
        for key, value in self.components:
            out[f"component.{key}"] = value
        return out
