"""Experiment configuration: one JSON document, overridable field by field."""
import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import DomainError

SWEEPS = ("qfi_vs_n", "qfi_vs_q", "bayes")
DEFAULT_MEANS = [0.5] + [float(m) for m in range(1, 21)]

# Fields describing how a run executes rather than what it computes; they
# are kept out of emitted metadata so outputs do not depend on them.
EXECUTION_FIELDS = ("workers", "output_dir", "plot")


@dataclass
class ExperimentConfig:
    sweep: str = "bayes"
    q: float = 0.9
    parity: str = "even"
    mean_a: float | None = None
    mean_b: float | None = None
    mean_total: float | None = None
    split: str = "equal"
    n_max: int = 30
    phi_true: float = math.pi / 2
    phi_eval: float = math.pi / 2
    nu: int = 30
    runs: int = 100
    grid_G: int = 2048
    seed: int = 20240601
    means: list = field(default_factory=lambda: list(DEFAULT_MEANS))
    qs: list = field(default_factory=lambda: [0.1, 0.5, 1.0])
    mean_totals: list = field(default_factory=lambda: [2.0, 5.0, 10.0, 15.0, 20.0])
    allow_truncation: bool = True
    skip_unreachable: bool = False
    swap: bool = False
    workers: int = 1
    output_dir: str = "out"
    plot: bool = True

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.sweep not in SWEEPS:
            raise DomainError(f"sweep must be one of {SWEEPS}, got {self.sweep!r}")
        for q in [self.q, *self.qs]:
            if not 0.0 < float(q) <= 1.0:
                raise DomainError(f"q must lie in (0, 1], got {q!r}")
        if self.parity not in ("even", "odd", "both"):
            raise DomainError(f"parity must be even, odd or both, got {self.parity!r}")
        if self.split not in ("equal", "all_cat", "all_coherent"):
            raise DomainError(f"unknown split rule {self.split!r}")
        if not 0.0 <= self.phi_true <= math.pi:
            raise DomainError("phi_true must lie in [0, pi]")
        for name in ("n_max", "runs", "grid_G", "workers"):
            if int(getattr(self, name)) < 1:
                raise DomainError(f"{name} must be positive")
        if self.nu < 0:
            raise DomainError("nu must be >= 0")
        if int(self.seed) < 0 or int(self.seed) >= 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        for m in [*self.means, *self.mean_totals]:
            if float(m) < 0:
                raise DomainError("mean photon numbers must be >= 0")

    @property
    def parities(self):
        return ["even", "odd"] if self.parity == "both" else [self.parity]

    def split_means(self, mean_total):
        """Per-mode (mean_a, mean_b) for a total mean under the split rule."""
        t = float(mean_total)
        if self.split == "equal":
            return t / 2.0, t / 2.0
        if self.split == "all_cat":
            return 0.0, t
        return t, 0.0

    def physics_dict(self):
        d = dataclasses.asdict(self)
        for key in EXECUTION_FIELDS:
            d.pop(key)
        return d

    def to_json(self):
        return json.dumps(dataclasses.asdict(self), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, data):
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise DomainError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path, overrides=None):
        data = json.loads(Path(path).read_text()) if path else {}
        data.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls.from_dict(data)
