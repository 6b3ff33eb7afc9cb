"""Run parameters for the optimizing automaton."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class AutomatonParams:
    """Knobs for one optimization run.

    ``damping_factor`` scales a proposed change's driving deviation into a
    switch probability; ``security_threshold`` gates changes by local
    neighborhood compactness (0-16, strict: a cell may change only while
    its factor lies below the threshold); ``removal_interval`` is how often
    redundant crossings are collected; ``stop_patience`` is the number of
    consecutive change-free iterations that ends the run early.
    """

    max_iterations: int = 5000
    damping_factor: float = 7.0
    security_threshold: int = 11
    removal_interval: int = 300
    stop_patience: int = 10
    optimize_boundaries: bool = True
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.security_threshold <= 16:
            raise ValueError("security_threshold must be in [0, 16]")
        if self.removal_interval < 1:
            raise ValueError("removal_interval must be >= 1")
        if self.damping_factor <= 0:
            raise ValueError("damping_factor must be positive")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be non-negative")
