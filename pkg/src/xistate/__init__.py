"""State sums for 3-manifolds from pointed Xi-fusion categories of crossed modules."""

from __future__ import annotations

__version__ = "0.1.0"
