"""Local-lemma hierarchy via self-bounding walk automata."""

__version__ = "0.1.0"
