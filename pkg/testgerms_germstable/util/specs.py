import numpy as np


def format_complex(z, tol=0.0):
    z = complex(z)
    re, im = z.real, z.imag
    if abs(im) <= tol:
        return repr(re)
    if abs(re) <= tol:
        return f"{repr(im)}i" if im >= 0 else f"-{repr(-im)}i"
    sign = "+" if im >= 0 else "-"
    return f"{repr(re)}{sign}{repr(abs(im))}i"


def format_polynomial(c, tol=0.0):
    terms = []
    c = np.asarray(c, dtype=np.complex128)
    for i in range(c.shape[0]):
        for j in range(c.shape[1]):
            value = c[i, j]
            if abs(value) <= tol:
                continue
            monomial = "*".join(
                part for part in (
                    f"x^{i}" if i > 1 else "x" if i == 1 else "",
                    f"y^{j}" if j > 1 else "y" if j == 1 else "",
                ) if part
            )
            coefficient = f"({format_complex(value)})"
            terms.append(f"{coefficient}*{monomial}" if monomial else coefficient)
    return " + ".join(terms) if terms else "0"


def render_spec(model, order=None, with_curve=True, extra=None):
    """Germ specification text for a model germ, readable by ``parse_germ_spec``."""
    c1, c2 = model.coefficients
    lines = [
        f"# {type(model).__name__}",
        f"F1 = {format_polynomial(c1)}",
        f"F2 = {format_polynomial(c2)}",
        f"order = {model.order if order is None else order}",
    ]
    if with_curve:
        g1, g2 = model.curve_coefficients
        lines.append("curve.gamma1 = [" + ", ".join(format_complex(v) for v in g1) + "]")
        lines.append("curve.gamma2 = [" + ", ".join(format_complex(v) for v in g2) + "]")
    for key, value in (extra or {}).items():
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"
