"""De-skew solver kernel selection.

The compiled Cython kernel is preferred when the extension built; the
pure-Python kernel implements identical semantics and is used as the
fallback. Both walk the frequency grid sequentially, warm-starting each
point from the previous solution.
"""

try:
    from ._deskew_cy import solve_deskew_grid  # noqa: F401

    BACKEND = "cython"
except ImportError:
    from ._deskew_py import solve_deskew_grid  # noqa: F401

    BACKEND = "python"
