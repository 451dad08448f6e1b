"""Qualitative spatio-temporal grounding of interactions in tracked scenes."""

from .config import DEFAULT_CONFIG, EngineConfig
from .dsl import load_standard_library, parse
from .engine import Engine, FluentAtom, FluentTimeline, InteractionOccurrence, detect, detect_all
from .ingest import fixture, load, save
from .scene import PartRef, Scene

__all__ = [
    "DEFAULT_CONFIG", "EngineConfig", "Engine", "FluentAtom", "FluentTimeline",
    "InteractionOccurrence", "PartRef", "Scene", "detect", "detect_all", "fixture",
    "load", "load_standard_library", "parse", "save",
]
__version__ = "0.1.0"
