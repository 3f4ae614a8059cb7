from typing import Any, Optional


def filter_sci(value: Optional[float], digits: int = 4) -> str:
    """Scientific notation, ``-`` for missing values.

    Usage in template: ``{{ report.lhs|sci(6) }}``
    """
    if value is None:
        return "-"
    return f"{float(value):.{digits}e}"


def filter_pm(value: Optional[float], err: Optional[float] = None, digits: int = 6) -> str:
    """``value ± err``.

    Usage in template: ``{{ series.exponent|pm(series.exponent_stderr) }}``
    """
    if value is None:
        return "-"
    if not err:
        return f"{float(value):.{digits}g}"
    return f"{float(value):.{digits}g} ± {float(err):.2g}"


def filter_status(passed: Any) -> str:
    """Usage in template: ``{{ record.passed|status }}``"""
    if passed is None:
        return "—"
    return "OK" if passed else "ÉCHEC"
