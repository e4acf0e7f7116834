"""Defect prediction from coding-style metrics.

Mines a commit history, labels files buggy or clean with SZZ, extracts 60
style metrics per file and evaluates four classifiers within and across
projects.
"""

__version__ = "0.1.0"
