"""Run manifest model."""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional


@dataclass
class RunManifest:
    """Record of one CLI run and everything it wrote.

    Attributes:
        command: CLI sub-command name
        config_hash: sha256 of the canonical scenario document and run options
        tool_version: package version
        started_at: ISO-8601 UTC start time
        finished_at: ISO-8601 UTC end time
        scenario: builtin scenario id, if any
        system: ADR system id, if any
        outputs: every file the run wrote, relative to the run directory
        timings_s: wall time per stage
        memory: process memory snapshot
    """

    command: str
    config_hash: str
    tool_version: str
    started_at: str
    finished_at: Optional[str] = None
    scenario: Optional[int] = None
    system: Optional[int] = None
    outputs: List[str] = field(default_factory=list)
    timings_s: Dict[str, float] = field(default_factory=dict)
    memory: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
