"""olivelab: finite verification lab for olive-property witnesses."""

__version__ = "0.1.0"

from . import etr, kbatch, kgroup, ladder, oracles, relational, witness, words

__all__ = ["etr", "kbatch", "kgroup", "ladder", "oracles", "relational",
           "witness", "words", "__version__"]
