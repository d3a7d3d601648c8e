"""Interactive video retrieval at desk scale.

Keyframe cataloging, exact cosine semantic search, OCR keyword search,
query enhancement, and dynamic-programming temporal alignment of ordered
event queries, behind an HTTP API and a CLI.
"""

__version__ = "0.1.0"
