"""Adaptive Simpson quadrature for smooth integrands on finite intervals."""

from __future__ import annotations


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-10, max_depth: int = 50) -> float:
    """Integrate f over [a, b] to absolute tolerance tol.

    Classic recursive scheme: a panel is accepted when the two-half Simpson
    estimate agrees with the whole-panel one to 15·tol, and the Richardson
    correction (S₂ − S₁)/15 is added to the result.
    """
    if b == a:
        return 0.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson_panel(f, a, b, fa, fm, fb, whole, tol, max_depth)


def _simpson_panel(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    return _simpson_panel(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + _simpson_panel(
        f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1
    )
