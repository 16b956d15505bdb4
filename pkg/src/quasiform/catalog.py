"""Built-in metrics with known curvature, used as ground truth and as starting points.

Provenance tags on expected values:

* ``literature`` - a classical or published fact about the geometry
* ``derived``    - computed by hand (or by an independent brute-force route) for this chart
* ``trivial``    - immediate from the definitions
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import expr as ex
from .metric import MetricField

POLAR_MARGIN = 0.2


def _sq(e: ex.Expr) -> ex.Expr:
    return ex.power(e, 2)


def _names(prefix: str, n: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{i + 1}" for i in range(n))


def make_space_form(n: int, c: float, names: Sequence[str] | None = None) -> MetricField:
    """Real space form M^n(c).

    c = 0: identity chart. c > 0: round-sphere polar chart of radius 1/sqrt(c).
    c < 0: Poincare ball of curvature c.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    c = float(c)
    if c == 0.0:
        coords = tuple(names) if names else _names("x", n)
        comps = {(i, i): ex.num(1) for i in range(n)}
        return MetricField(coords, comps, ((-1.0, 1.0),) * n, f"E{n}")
    if c > 0:
        coords = tuple(names) if names else _names("a", n)
        r2 = ex.num(1.0 / c)
        comps = {}
        factor: ex.Expr = r2
        for i in range(n):
            comps[(i, i)] = factor
            factor = ex.mul(factor, _sq(ex.call("sin", ex.Var(coords[i]))))
        dom = [(POLAR_MARGIN, math.pi - POLAR_MARGIN)] * (n - 1) + [(-math.pi, math.pi)]
        return MetricField(coords, comps, tuple(dom), f"S{n}({c:g})")
    coords = tuple(names) if names else _names("p", n)
    radius2 = ex.num(0)
    for name in coords:
        radius2 = ex.add(radius2, _sq(ex.Var(name)))
    conf = ex.div(ex.num(4.0 / -c), _sq(ex.sub(ex.num(1), radius2)))
    comps = {(i, i): conf for i in range(n)}
    half = 0.9 / math.sqrt(n) if n > 1 else 0.9
    return MetricField(coords, comps, ((-half, half),) * n, f"H{n}({c:g})")


def make_product(a: MetricField, b: MetricField, name: str | None = None) -> MetricField:
    """Riemannian product: block-diagonal metric on the disjoint union of the coordinates."""
    clash = set(a.coords) & set(b.coords)
    if clash:
        raise ValueError(f"coordinate names clash: {sorted(clash)}")
    comps = dict(a.components)
    for (i, j), e in b.components.items():
        comps[(i + a.n, j + a.n)] = e
    return MetricField(a.coords + b.coords, comps, a.domain + b.domain, name or f"{a.name}x{b.name}")


def make_thurston(name: str) -> MetricField:
    """Left-invariant metrics on Nil, Sol and the universal cover of SL(2,R).

    * nil:  dx^2 + dy^2 + (dz - x dy)^2
    * sol:  e^{2z} dx^2 + e^{-2z} dy^2 + dz^2
    * sl2r: (dx^2 + dy^2)/y^2 + (dz + dx/y)^2 on the upper half plane times R
      (base curvature -1, bundle curvature 1/2)
    """
    x, y, z = ex.Var("x"), ex.Var("y"), ex.Var("z")
    coords = ("x", "y", "z")
    if name == "nil":
        comps = {
            (0, 0): ex.num(1),
            (1, 1): ex.add(ex.num(1), _sq(x)),
            (2, 1): ex.Neg(x),
            (2, 2): ex.num(1),
        }
        return MetricField(coords, comps, ((-1.0, 1.0),) * 3, "nil")
    if name == "sol":
        comps = {
            (0, 0): ex.call("exp", ex.mul(ex.num(2), z)),
            (1, 1): ex.call("exp", ex.mul(ex.num(-2), z)),
            (2, 2): ex.num(1),
        }
        return MetricField(coords, comps, ((-1.0, 1.0),) * 3, "sol")
    if name == "sl2r":
        comps = {
            (0, 0): ex.div(ex.num(2), _sq(y)),
            (1, 1): ex.div(ex.num(1), _sq(y)),
            (2, 0): ex.div(ex.num(1), y),
            (2, 2): ex.num(1),
        }
        return MetricField(coords, comps, ((-1.0, 1.0), (0.5, 2.0), (-1.0, 1.0)), "sl2r")
    raise ValueError(f"unknown Thurston geometry {name!r}")


def make_warped(f: ex.Expr | str, k: float, n: int, t_domain=(0.1, 3.0), name: str | None = None) -> MetricField:
    """Warped product ``dt^2 + f(t)^2 g_k`` over a space-form fibre of curvature ``k`` (dimension n-1)."""
    if isinstance(f, str):
        f = ex.parse_expr(f, names=("t",))
    if ex.variables(f) - {"t"}:
        raise ValueError("the warping function may only depend on t")
    lo, hi = t_domain
    for s in range(11):
        t = lo + (hi - lo) * s / 10
        if not ex.eval_float(f, {"t": t}) > 0:
            raise ValueError(f"warping function must be positive on the domain (f({t:g}) <= 0)")
    fibre = make_space_form(n - 1, k, names=_names("u", n - 1))
    f2 = _sq(f)
    comps = {(0, 0): ex.num(1)}
    for (i, j), e in fibre.components.items():
        comps[(i + 1, j + 1)] = ex.mul(f2, e)
    return MetricField(("t",) + fibre.coords, comps, ((float(lo), float(hi)),) + fibre.domain, name or "warped")


def make_generic4() -> MetricField:
    """Negative control: diag(1, 1+x1^2, 1+x2^2, 1+x3^2) plus 0.1 x2 x3 in the (4,1) slot."""
    x1, x2, x3 = ex.Var("x1"), ex.Var("x2"), ex.Var("x3")
    comps = {
        (0, 0): ex.num(1),
        (1, 1): ex.add(ex.num(1), _sq(x1)),
        (2, 2): ex.add(ex.num(1), _sq(x2)),
        (3, 3): ex.add(ex.num(1), _sq(x3)),
        (3, 0): ex.mul(ex.num(0.1), ex.mul(x2, x3)),
    }
    return MetricField(_names("x", 4), comps, ((0.2, 0.9),) * 4, "generic4")


def make_generic3() -> MetricField:
    """Negative control in dimension 3: three distinct Ricci curvatures, not Deszcz symmetric."""
    x, y, z = ex.Var("x"), ex.Var("y"), ex.Var("z")
    comps = {
        (0, 0): ex.num(1),
        (1, 1): ex.add(ex.num(1), _sq(x)),
        (2, 2): ex.add(ex.add(ex.num(1), _sq(y)), ex.mul(ex.num(0.5), ex.mul(x, z))),
        (2, 0): ex.mul(ex.num(0.1), ex.mul(x, y)),
    }
    return MetricField(("x", "y", "z"), comps, ((0.2, 0.9),) * 3, "generic3")


# --- catalog entries -------------------------------------------------------


@dataclass(frozen=True)
class Expected:
    """Ground truth for a catalog metric.

    ``labels`` must all hold globally; ``absent`` must all fail globally.
    ``qcc`` is ``(q, K, K_perp, K_bar)`` or a callable of the point returning it.
    """

    labels: tuple[str, ...] = ()
    absent: tuple[str, ...] = ()
    c: float | None = None
    qcc: tuple | Callable | None = None
    L: float | Callable | None = None
    constant_type: float | None = None
    conformally_euclidean: bool | None = None
    provenance: dict = field(default_factory=dict)

    def qcc_at(self, point):
        return self.qcc(point) if callable(self.qcc) else self.qcc

    def L_at(self, point):
        return self.L(point) if callable(self.L) else self.L

    def as_dict(self) -> dict:
        d = {"labels": list(self.labels), "absent": list(self.absent)}
        if self.c is not None:
            d["c"] = self.c
        if self.qcc is not None:
            d["qcc"] = "point-dependent" if callable(self.qcc) else dict(zip(("q", "K", "Kperp", "Kbar"), self.qcc))
        if self.L is not None:
            d["L"] = "point-dependent" if callable(self.L) else self.L
        if self.constant_type is not None:
            d["constant_type"] = self.constant_type
        if self.conformally_euclidean is not None:
            d["conformally_euclidean"] = self.conformally_euclidean
        d["provenance"] = dict(self.provenance)
        return d


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    description: str
    build: Callable[[], MetricField]
    expected: Expected
    thurston: bool = False

    @property
    def metric(self) -> MetricField:
        m = self.build()
        return MetricField(m.coords, m.components, m.domain, self.name, self.description)


def _space_form_entry(n: int, c: float, label: str) -> CatalogEntry:
    labels = ["CC", "Einstein", "semi-symmetric", "Deszcz", "Ricci-Deszcz", "weyl-zero"]
    if n >= 4:
        labels.append("conformally-flat")
    if c == 0:
        labels.append("flat")
    kind = {0: "Euclidean space", 1: "unit sphere", -1: "hyperbolic space"}[int(c)]
    return CatalogEntry(
        name=label,
        description=f"{kind} of dimension {n}, constant curvature {c:g}",
        build=lambda: make_space_form(n, c),
        expected=Expected(
            labels=tuple(labels),
            absent=("quasi-Einstein", "QCC"),
            c=float(c),
            conformally_euclidean=True,
            provenance={"c": "literature", "labels": "literature"},
        ),
        thurston=(n == 3),
    )


def _warped_sin_truth(point):
    t = point[0]
    f, fp, fpp = 2 + math.sin(t), math.cos(t), -math.sin(t)
    Kb = -fpp / f
    Kp = -(fp**2) / f**2
    return (1, None, Kp, Kb)


def _warped_sin_L(point):
    return math.sin(point[0]) / (2 + math.sin(point[0]))


def _build_entries() -> dict[str, CatalogEntry]:
    entries = [
        _space_form_entry(3, 0, "e3"),
        _space_form_entry(3, 1, "s3"),
        _space_form_entry(3, -1, "h3"),
        _space_form_entry(4, 0, "e4"),
        _space_form_entry(4, 1, "s4"),
        _space_form_entry(4, -1, "h4"),
        CatalogEntry(
            "s2xe1",
            "product of the unit 2-sphere and a line",
            lambda: make_product(make_space_form(2, 1, ("th", "ph")), make_space_form(1, 0, ("s",))),
            Expected(
                labels=("quasi-Einstein", "QCC", "semi-symmetric", "Deszcz", "Ricci-Deszcz", "weyl-zero"),
                absent=("CC", "Einstein"),
                qcc=(1, None, 1.0, 0.0),
                L=0.0,
                constant_type=0.0,
                provenance={"labels": "literature", "qcc": "derived", "L": "literature"},
            ),
            thurston=True,
        ),
        CatalogEntry(
            "h2xe1",
            "product of the hyperbolic plane and a line",
            lambda: make_product(make_space_form(2, -1, ("p1", "p2")), make_space_form(1, 0, ("s",))),
            Expected(
                labels=("quasi-Einstein", "QCC", "semi-symmetric", "Deszcz", "Ricci-Deszcz", "weyl-zero"),
                absent=("CC", "Einstein"),
                qcc=(1, None, -1.0, 0.0),
                L=0.0,
                constant_type=0.0,
                provenance={"labels": "literature", "qcc": "derived", "L": "literature"},
            ),
            thurston=True,
        ),
        CatalogEntry(
            "nil",
            "Heisenberg group with dx^2 + dy^2 + (dz - x dy)^2",
            lambda: make_thurston("nil"),
            Expected(
                labels=("quasi-Einstein", "QCC", "Deszcz", "Ricci-Deszcz", "weyl-zero"),
                absent=("CC", "Einstein", "semi-symmetric"),
                qcc=(1, None, -0.75, 0.25),
                L=0.25,
                constant_type=0.25,
                provenance={"L.sign": "literature", "L.value": "derived", "qcc": "derived"},
            ),
            thurston=True,
        ),
        CatalogEntry(
            "sol",
            "solvable group with e^{2z} dx^2 + e^{-2z} dy^2 + dz^2",
            lambda: make_thurston("sol"),
            Expected(
                labels=("quasi-Einstein", "QCC", "Deszcz", "Ricci-Deszcz", "weyl-zero"),
                absent=("CC", "Einstein", "semi-symmetric"),
                qcc=(1, None, 1.0, -1.0),
                L=-1.0,
                constant_type=-1.0,
                provenance={"L": "literature", "qcc": "derived"},
            ),
            thurston=True,
        ),
        CatalogEntry(
            "sl2r",
            "universal cover of SL(2,R) with (dx^2 + dy^2)/y^2 + (dz + dx/y)^2",
            lambda: make_thurston("sl2r"),
            Expected(
                labels=("quasi-Einstein", "QCC", "Deszcz", "Ricci-Deszcz", "weyl-zero"),
                absent=("CC", "Einstein", "semi-symmetric"),
                qcc=(1, None, -1.75, 0.25),
                L=0.25,
                constant_type=0.25,
                provenance={"L.sign": "literature", "L.value": "derived", "qcc": "derived"},
            ),
            thurston=True,
        ),
        CatalogEntry(
            "s2xh2",
            "product of the unit 2-sphere and the hyperbolic plane (opposite curvatures)",
            lambda: make_product(make_space_form(2, 1, ("th", "ph")), make_space_form(2, -1, ("p1", "p2"))),
            Expected(
                labels=("quasi-Einstein", "QCC", "semi-symmetric", "Deszcz", "Ricci-Deszcz", "weyl-zero", "conformally-flat"),
                absent=("CC", "Einstein"),
                qcc=(2, 1.0, -1.0, 0.0),
                L=0.0,
                constant_type=0.0,
                conformally_euclidean=True,
                provenance={"labels": "literature", "qcc": "derived"},
            ),
        ),
        CatalogEntry(
            "s2xs2",
            "product of two unit 2-spheres (Einstein, not conformally flat)",
            lambda: make_product(make_space_form(2, 1, ("th", "ph")), make_space_form(2, 1, ("al", "be"))),
            Expected(
                labels=("Einstein", "semi-symmetric", "Deszcz", "Ricci-Deszcz"),
                absent=("CC", "quasi-Einstein", "QCC", "weyl-zero", "conformally-flat"),
                L=0.0,
                constant_type=0.0,
                conformally_euclidean=False,
                provenance={"labels": "derived"},
            ),
        ),
        CatalogEntry(
            "s3xe1",
            "product of the unit 3-sphere and a line",
            lambda: make_product(make_space_form(3, 1), make_space_form(1, 0, ("s",))),
            Expected(
                labels=("quasi-Einstein", "QCC", "semi-symmetric", "Deszcz", "Ricci-Deszcz", "weyl-zero", "conformally-flat"),
                absent=("CC", "Einstein"),
                qcc=(1, None, 1.0, 0.0),
                L=0.0,
                constant_type=0.0,
                conformally_euclidean=True,
                provenance={"labels": "literature", "qcc": "derived"},
            ),
        ),
        CatalogEntry(
            "h3xe1",
            "product of hyperbolic 3-space and a line",
            lambda: make_product(make_space_form(3, -1), make_space_form(1, 0, ("s",))),
            Expected(
                labels=("quasi-Einstein", "QCC", "semi-symmetric", "Deszcz", "Ricci-Deszcz", "weyl-zero", "conformally-flat"),
                absent=("CC", "Einstein"),
                qcc=(1, None, -1.0, 0.0),
                L=0.0,
                constant_type=0.0,
                conformally_euclidean=True,
                provenance={"labels": "literature", "qcc": "derived"},
            ),
        ),
        CatalogEntry(
            "warped",
            "dt^2 + (2 + sin t)^2 (du1^2 + du2^2)",
            lambda: make_warped("2 + sin(t)", 0, 3),
            Expected(
                labels=("quasi-Einstein", "QCC", "Deszcz", "Ricci-Deszcz", "weyl-zero"),
                absent=("CC", "Einstein", "semi-symmetric"),
                qcc=_warped_sin_truth,
                L=_warped_sin_L,
                provenance={"qcc": "derived", "L": "derived"},
            ),
        ),
        CatalogEntry(
            "warped4",
            "dt^2 + (2 + sin t)^2 (du1^2 + du2^2 + du3^2)",
            lambda: make_warped("2 + sin(t)", 0, 4),
            Expected(
                labels=("quasi-Einstein", "QCC", "Deszcz", "Ricci-Deszcz", "weyl-zero", "conformally-flat"),
                absent=("CC", "Einstein", "semi-symmetric"),
                qcc=_warped_sin_truth,
                L=_warped_sin_L,
                conformally_euclidean=True,
                provenance={"qcc": "derived", "L": "derived"},
            ),
        ),
        CatalogEntry(
            "warped_hyp",
            "dt^2 + cosh(t)^2 g_H2: hyperbolic 3-space as a warped product",
            lambda: make_warped("cosh(t)", -1, 3, t_domain=(-1.0, 1.0)),
            Expected(
                labels=("CC", "Einstein", "semi-symmetric", "Deszcz", "weyl-zero"),
                absent=("quasi-Einstein", "QCC"),
                c=-1.0,
                provenance={"c": "derived"},
            ),
        ),
        CatalogEntry(
            "generic3",
            "diag(1, 1+x^2, 1+y^2+0.5xz) plus 0.1xy in the (3,1) slot",
            make_generic3,
            Expected(
                labels=("generic", "anisotropic", "weyl-zero"),
                absent=("CC", "Einstein", "quasi-Einstein", "QCC", "Deszcz", "semi-symmetric"),
                provenance={"labels": "derived"},
            ),
        ),
        CatalogEntry(
            "generic4",
            "diag(1, 1+x1^2, 1+x2^2, 1+x3^2) plus 0.1 x2 x3 in the (4,1) slot",
            make_generic4,
            Expected(
                labels=("generic", "anisotropic"),
                absent=("CC", "Einstein", "quasi-Einstein", "QCC", "Deszcz", "semi-symmetric", "weyl-zero"),
                conformally_euclidean=False,
                provenance={"labels": "derived"},
            ),
        ),
    ]
    return {e.name: e for e in entries}


CATALOG: dict[str, CatalogEntry] = _build_entries()


def get(name: str) -> CatalogEntry:
    try:
        return CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown catalog entry {name!r}; known: {', '.join(CATALOG)}") from None


def names() -> list[str]:
    return list(CATALOG)
