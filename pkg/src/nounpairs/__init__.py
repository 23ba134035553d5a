"""Noun-pair semantic similarity dataset construction.

Pipeline: load a wordnet-style KB, generate a random-walk pseudo-corpus,
train text and KB embedding spaces, align and combine them into a hybrid
space, compute four psycholinguistic features per noun, cluster them, and
emit the feature-matched noun-pair dataset plus its similarity-distribution
report and a Spearman evaluation harness.
"""

__version__ = "0.1.0"

from .errors import DataError, PipelineError, ValidationError

__all__ = ["DataError", "PipelineError", "ValidationError", "__version__"]
