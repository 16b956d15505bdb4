"""Metric fields given by component expressions in a chart, and the line-oriented metric file format.

File format (UTF-8, one statement per line, ``#`` starts a comment)::

    dim = 3
    coords = x, y, z
    domain z = [-1, 1]          # optional, default [-1, 1]
    g[1][1] = exp(2*z)          # 1 <= j <= i <= dim, omitted entries are 0
    g[2][2] = exp(-2*z)
    g[3][3] = 1
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import expr as ex
from .errors import MetricSourceError, NumericalError

DEFAULT_DOMAIN = (-1.0, 1.0)


@dataclass(frozen=True)
class MetricField:
    """Symmetric metric ``g_ij`` given as expressions of the chart coordinates.

    ``components`` maps 0-based ``(i, j)`` with ``i >= j`` to expressions; missing
    entries are zero.
    """

    coords: tuple[str, ...]
    components: Mapping[tuple[int, int], ex.Expr]
    domain: tuple[tuple[float, float], ...] = ()
    name: str = "metric"
    notes: str = field(default="", compare=False)

    def __post_init__(self):
        n = len(self.coords)
        if n < 1:
            raise MetricSourceError("need at least one coordinate")
        if len(set(self.coords)) != n:
            raise MetricSourceError("duplicate coordinate names")
        for c in self.coords:
            if c in ex.FUNCTIONS or c in ex.CONSTANTS:
                raise MetricSourceError(f"coordinate name {c!r} is reserved")
        comps = {}
        for (i, j), e in self.components.items():
            if i < j:
                i, j = j, i
            if not (0 <= j <= i < n):
                raise MetricSourceError(f"component index ({i + 1},{j + 1}) out of range")
            unknown = ex.variables(e) - set(self.coords)
            if unknown:
                raise MetricSourceError(f"g[{i + 1}][{j + 1}] uses undeclared names {sorted(unknown)}")
            if not ex.is_zero(e):
                comps[(i, j)] = e
        object.__setattr__(self, "components", dict(sorted(comps.items())))
        dom = tuple(self.domain) if self.domain else (DEFAULT_DOMAIN,) * n
        if len(dom) != n:
            raise MetricSourceError("domain must give one interval per coordinate")
        dom = tuple((float(lo), float(hi)) for lo, hi in dom)
        for (lo, hi), c in zip(dom, self.coords):
            if not lo < hi:
                raise MetricSourceError(f"empty domain for {c!r}")
        object.__setattr__(self, "domain", dom)

    @property
    def n(self) -> int:
        return len(self.coords)

    def component(self, i: int, j: int) -> ex.Expr:
        if i < j:
            i, j = j, i
        return self.components.get((i, j), ex.Num(0.0))

    def matrix_at(self, point: Sequence[float]) -> np.ndarray:
        env = dict(zip(self.coords, (float(x) for x in point)))
        g = np.zeros((self.n, self.n))
        for (i, j), e in self.components.items():
            g[i, j] = g[j, i] = ex.eval_float(e, env)
        return g

    def jets_at(self, point: Sequence[float]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return ``(g, dg, ddg)`` with ``dg[k, i, j] = d_k g_ij`` and ``ddg[k, l, i, j] = d_k d_l g_ij``."""
        n = self.n
        g = np.zeros((n, n))
        dg = np.zeros((n, n, n))
        ddg = np.zeros((n, n, n, n))
        for (i, j), e in self.components.items():
            jet = ex.eval_jet(e, point, self.coords)
            g[i, j] = g[j, i] = jet.value
            dg[:, i, j] = dg[:, j, i] = jet.grad
            ddg[:, :, i, j] = ddg[:, :, j, i] = jet.hess
        check_positive_definite(g, point)
        return g, dg, ddg

    def scaled(self, factor: float) -> "MetricField":
        """The metric ``factor * g`` (factor = lambda^2)."""
        k = ex.num(factor)
        comps = {ij: ex.mul(k, e) for ij, e in self.components.items()}
        return MetricField(self.coords, comps, self.domain, f"{self.name}*{factor:g}", self.notes)

    def linear_pullback(self, matrix, new_coords: Sequence[str] | None = None, shift=None) -> "MetricField":
        """Pull the metric back along ``x = A y + b`` and return it in the ``y`` chart.

        The new domain is the largest box centred at ``A^-1 (c - b)`` (``c`` the old
        domain centre) whose image stays inside the old domain box.
        """
        A = np.asarray(matrix, dtype=float)
        n = self.n
        b = np.zeros(n) if shift is None else np.asarray(shift, dtype=float)
        ys = tuple(new_coords) if new_coords else tuple(f"y{i + 1}" for i in range(n))
        if set(ys) & set(self.coords):
            raise MetricSourceError("new coordinate names must differ from the old ones")
        mapping = {}
        for i, c in enumerate(self.coords):
            terms = [ex.mul(ex.num(A[i, j]), ex.Var(ys[j])) for j in range(n) if A[i, j] != 0.0]
            e = ex.num(b[i])
            for t in terms:
                e = ex.add(e, t)
            mapping[c] = e
        old = [[ex.substitute(self.component(i, j), mapping) for j in range(n)] for i in range(n)]
        comps = {}
        for a in range(n):
            for c in range(a + 1):
                acc = None
                for i in range(n):
                    for j in range(n):
                        coef = A[i, a] * A[j, c]
                        if coef == 0.0 or ex.is_zero(self.component(i, j)):
                            continue
                        t = ex.mul(ex.num(coef), old[i][j])
                        acc = t if acc is None else ex.add(acc, t)
                if acc is not None:
                    comps[(a, c)] = acc
        lo = np.array([d[0] for d in self.domain])
        hi = np.array([d[1] for d in self.domain])
        centre = np.linalg.solve(A, (lo + hi) / 2 - b)
        half = np.min(((hi - lo) / 2) / np.abs(A).sum(axis=1))
        dom = tuple((float(c - half), float(c + half)) for c in centre)
        return MetricField(ys, comps, dom, f"{self.name}@linear", self.notes)

    def to_text(self) -> str:
        return format_metric(self)


def check_positive_definite(g: np.ndarray, point=None) -> None:
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        where = "" if point is None else " at (" + ", ".join(f"{float(x):.6g}" for x in point) + ")"
        raise NumericalError(f"metric is not positive definite{where}") from None


# --- file format -----------------------------------------------------------

_COMPONENT_RE = re.compile(r"^g\s*\[\s*(\d+)\s*\]\s*\[\s*(\d+)\s*\]\s*$")
_DOMAIN_RE = re.compile(r"^domain\s+([A-Za-z_][A-Za-z_0-9]*)\s*$")


def _const_value(text: str, line: int, col: int) -> float:
    e = ex.parse_expr(text, names=(), line=line, column=col)
    try:
        return ex.eval_float(e, {})
    except NumericalError as err:
        raise MetricSourceError(str(err), line, col) from None


def _statements(text: str):
    """Yield ``(line, start_column, statement)``; ``;`` separates statements on one line."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        col = 1
        for part in line.split(";"):
            if part.strip():
                yield lineno, col, part
            col += len(part) + 1


def parse_metric_source(text: str, name: str = "metric") -> MetricField:
    """Parse a metric file into a :class:`MetricField`."""
    dim = None
    coords: list[str] | None = None
    domains: dict[str, tuple[float, float]] = {}
    domain_lines: dict[str, int] = {}
    raw_components: list[tuple[int, int, str, int, int]] = []

    for lineno, col0, line in _statements(text):
        if "=" not in line:
            raise MetricSourceError("expected '<key> = <value>'", lineno, col0 + len(line) - len(line.lstrip()))
        key, value = line.split("=", 1)
        vcol = col0 + len(key) + 1 + (len(value) - len(value.lstrip()))
        key = key.strip()
        value_s = value.strip()
        if key == "dim":
            try:
                dim = int(value_s)
            except ValueError:
                raise MetricSourceError(f"dim must be an integer, got {value_s!r}", lineno, vcol) from None
            if dim < 2:
                raise MetricSourceError("dim must be at least 2", lineno, vcol)
        elif key == "coords":
            coords = [c.strip() for c in value_s.split(",")]
            for c in coords:
                if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", c):
                    raise MetricSourceError(f"bad coordinate name {c!r}", lineno, vcol)
        elif m := _DOMAIN_RE.match(key):
            cname = m.group(1)
            if not (value_s.startswith("[") and value_s.endswith("]")) or value_s.count(",") != 1:
                raise MetricSourceError("domain must look like [lo, hi]", lineno, vcol)
            lo_s, hi_s = value_s[1:-1].split(",")
            lo = _const_value(lo_s, lineno, vcol + 1)
            hi = _const_value(hi_s, lineno, vcol + 2 + len(lo_s))
            domains[cname] = (lo, hi)
            domain_lines[cname] = lineno
        elif m := _COMPONENT_RE.match(key):
            raw_components.append((int(m.group(1)), int(m.group(2)), value, lineno, col0 + len(line.split("=", 1)[0]) + 1))
        else:
            raise MetricSourceError(f"unknown statement {key!r}", lineno, col0)

    if coords is None:
        raise MetricSourceError("missing 'coords' declaration")
    if dim is None:
        dim = len(coords)
    if len(coords) != dim:
        raise MetricSourceError(f"dim = {dim} but {len(coords)} coordinates declared")
    for cname in domains:
        if cname not in coords:
            raise MetricSourceError(f"domain given for undeclared coordinate {cname!r}", domain_lines[cname], 1)

    comps: dict[tuple[int, int], ex.Expr] = {}
    for i, j, value, lineno, col in raw_components:
        if not (1 <= i <= dim and 1 <= j <= dim):
            raise MetricSourceError(f"component g[{i}][{j}] outside 1..{dim}", lineno, 1)
        if j > i:
            raise MetricSourceError(f"give the lower triangle: g[{j}][{i}] instead of g[{i}][{j}]", lineno, 1)
        if (i - 1, j - 1) in comps:
            raise MetricSourceError(f"g[{i}][{j}] given twice", lineno, 1)
        comps[(i - 1, j - 1)] = ex.parse_expr(value, names=coords, line=lineno, column=col)

    dom = tuple(domains.get(c, DEFAULT_DOMAIN) for c in coords)
    return MetricField(tuple(coords), comps, dom, name)


def format_metric(m: MetricField) -> str:
    lines = [f"# {m.name}"]
    if m.notes:
        lines += [f"# {ln}" for ln in m.notes.splitlines()]
    lines.append(f"dim = {m.n}")
    lines.append("coords = " + ", ".join(m.coords))
    for c, (lo, hi) in zip(m.coords, m.domain):
        lines.append(f"domain {c} = [{lo!r}, {hi!r}]")
    for (i, j), e in m.components.items():
        lines.append(f"g[{i + 1}][{j + 1}] = {ex.to_text(e)}")
    return "\n".join(lines) + "\n"


def load_metric_file(path, name: str | None = None) -> MetricField:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_metric_source(text, name or str(path))
