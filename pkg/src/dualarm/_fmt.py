"""Fixed float formatting shared by all file writers."""


def f17(x: float) -> str:
    """17 significant digits: diff-stable and exact for float64 round trips."""
    return format(float(x), ".17g")
