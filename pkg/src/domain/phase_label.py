"""
Phase label domain entity
"""
from enum import Enum


class PhaseLabel(str, Enum):
    """Classification of a final state"""
    DISORDER = "Disorder"
    LAMELLAE = "Lamellae"
    HEX_SPOTS = "HexSpots"
    SQUARE_SPOTS = "SquareSpots"
    MIXED = "Mixed"
