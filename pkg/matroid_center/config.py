"""Run configuration."""

from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import yaml

from .guesses import GuessMode
from .offline import DEFAULT_BRUTE_CAP, DEFAULT_EXACT_CAP
from .streaming import Finisher, Mode


@dataclass(frozen=True)
class RunConfig:
    """Settings of one run.

    ``z``, ``k`` and ``budget`` override the instance file's outlier and
    knapsack sections when given.

    Attributes:
        epsilon: Accuracy parameter in (0, 1]
        mode: Problem variant
        finisher: Offline step for one-pass runs
        guesses: Ladder or stream-strapping
        passes: 1, or 2 for the two-pass matroid center algorithm
        z: Number of outliers
        k: Number of centers for the k-center variants
        budget: Knapsack budget
        verify: Compute the exact optimum and the ratio
        seed: Seed for shuffling the stream
        shuffle: Process the points in a seeded random order
        brute_cap: Candidate cap of the brute-force finisher
        exact_cap: Point cap of the exact optimum
        timing: Include wall-clock time in the report
    """

    epsilon: float = 0.1
    mode: Mode = Mode.MATROID
    finisher: Finisher = Finisher.BRUTE
    guesses: GuessMode = GuessMode.LADDER
    passes: int = 1
    z: int | None = None
    k: int | None = None
    budget: float | None = None
    verify: bool = False
    seed: int = 0
    shuffle: bool = False
    brute_cap: int = DEFAULT_BRUTE_CAP
    exact_cap: int = DEFAULT_EXACT_CAP
    timing: bool = False

    def __post_init__(self):
        # Enum fields also accept their string values
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "finisher", Finisher(self.finisher))
        object.__setattr__(self, "guesses", GuessMode(self.guesses))

        if not 0 < self.epsilon <= 1:
            raise ValueError(f"epsilon must be in (0, 1], got {self.epsilon}")
        if self.passes not in (1, 2):
            raise ValueError(f"passes must be 1 or 2, got {self.passes}")
        if self.passes == 2 and self.mode is not Mode.MATROID:
            raise ValueError("Two passes are only available in matroid mode")
        if self.budget is not None and not self.mode.uses_knapsack:
            raise ValueError(f"A budget only applies to knapsack modes, not {self.mode.value}")
        if self.budget is not None and self.budget < 0:
            raise ValueError(f"budget must be non-negative, got {self.budget}")
        if self.finisher is Finisher.EFFICIENT and self.mode not in (Mode.MATROID, Mode.KNAPSACK):
            raise ValueError(
                "The efficient finisher only applies to matroid and knapsack modes, "
                f"not {self.mode.value}"
            )
        if self.z is not None and self.z < 0:
            raise ValueError(f"z must be non-negative, got {self.z}")
        if self.k is not None and self.k < 1:
            raise ValueError(f"k must be positive, got {self.k}")
        if self.brute_cap < 1 or self.exact_cap < 1:
            raise ValueError("Enumeration caps must be positive")

    @classmethod
    def from_yaml(cls, config_path: Path | str) -> "RunConfig":
        """Load settings from a YAML file with ``run`` and ``caps`` sections.

        Args:
            config_path: Path to the YAML configuration file
        """
        config_path = Path(config_path)
        if not config_path.exists():
            raise FileNotFoundError(f"Run config file not found: {config_path}")

        with open(config_path) as f:
            config = yaml.safe_load(f) or {}

        run = config.get("run", {})
        caps = config.get("caps", {})
        return cls(
            epsilon=float(run.get("epsilon", 0.1)),
            mode=run.get("mode", Mode.MATROID),
            finisher=run.get("finisher", Finisher.BRUTE),
            guesses=run.get("guesses", GuessMode.LADDER),
            passes=int(run.get("passes", 1)),
            z=run.get("z"),
            k=run.get("k"),
            budget=run.get("budget"),
            verify=bool(run.get("verify", False)),
            seed=int(run.get("seed", 0)),
            shuffle=bool(run.get("shuffle", False)),
            brute_cap=int(caps.get("brute", DEFAULT_BRUTE_CAP)),
            exact_cap=int(caps.get("exact", DEFAULT_EXACT_CAP)),
            timing=bool(run.get("timing", False)),
        )

    def with_overrides(self, **overrides) -> "RunConfig":
        """Copy with every non-None override applied."""
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise ValueError(f"Unknown setting(s): {', '.join(sorted(unknown))}")
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def to_dict(self) -> dict:
        data = asdict(self)
        for key in ("mode", "finisher", "guesses"):
            data[key] = data[key].value
        return data
