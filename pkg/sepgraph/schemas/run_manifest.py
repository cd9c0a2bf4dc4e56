"""
Pydantic schema for the manifest embedded in or written beside every CLI output
"""
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class RunManifest(BaseModel):
    """Inputs and configuration that produced an output file."""
    command: str
    input_path: Optional[str] = None
    input_sha256: Optional[str] = None
    config: Dict[str, Any] = Field(default_factory=dict)
    tool_version: str
    # file names a sidecar manifest accompanies; empty when embedded
    outputs: List[str] = Field(default_factory=list)
