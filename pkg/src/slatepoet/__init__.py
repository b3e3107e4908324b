"""slatepoet: software slate for magnetic-poetry conversations with a language model.

Scattered word tiles are parsed into reading-ordered poem text, the poem
runs through a mode-specific two-stage prompt chain, and the whole loop
is hosted behind an HTTP/WebSocket service with a detection simulator
and usage analytics alongside.
"""

from .chains import CHAIN_SPECS, ChainResult, ChainSpec, PromptTemplate, render, run_chain, validate_length
from .geometry import (
    DetectedMarker,
    GeometryConfig,
    OrderedLayout,
    Point2,
    ScanLine,
    build_scan_line,
    left_edge_vector,
    line_captures,
    order_markers,
    project_onto_line,
    tangent_of,
)
from .session import (
    ChangeSet,
    SessionEngine,
    SlateSnapshot,
    Submission,
    compose_submission,
    diff_snapshots,
    resolve_mode,
    settle,
)
from .simulate import NoiseModel, TilePose, generate_baseline, generate_grid, synthesize
from .vocabulary import Mode, Vocabulary, WordTile, default_vocabulary, layout_to_text

__version__ = "0.1.0"
