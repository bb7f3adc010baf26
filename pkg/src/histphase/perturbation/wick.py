"""Exact functional-derivative (Wick) engine for the quartic CTP expansion.

The free functional is ``Z0 = exp(w)`` with

    w[J, J'] = -(i/2) int int [J D_F J + 2 J D_+ J' - J' D_D J'].

A term of an expansion stands for ``coeff * prod(legs) * prod(props) * Z0``
where a *leg* at vertex ``v`` is ``dw/dJ(t_v)`` (unprimed vertex) or
``dw/dJ'(t_v)`` (primed vertex), and a *prop* is a bare Green's function
between two vertex times:

* ``("F", i, j)``: ``D_F(t_i - t_j)``  (both unprimed, ``i <= j``)
* ``("D", i, j)``: ``D_D(t_i - t_j)``  (both primed, ``i <= j``)
* ``("P", i, j)``: ``D_+(t_i - t_j)``  (``i`` unprimed, ``j`` primed)

The factors ``-i``, ``+i`` of the second derivatives of ``w`` live in the
exact coefficient.  Vertex times are integrated, so terms are compared after
relabelling vertices to a canonical order.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass

from ..errors import PreconditionError
from .exact import I, ONE, GaussQ

UNPRIMED = "unprimed"
PRIMED = "primed"
BRANCHES = (UNPRIMED, PRIMED)

#: coefficient of each quartic vertex per unit coupling: -(i/4!) on the
#: unprimed branch and +(i/4!) on the primed branch
VERTEX_COUPLING = {UNPRIMED: -I / 24, PRIMED: I / 24}

_SYMBOL = {"F": "D_F", "D": "D_D", "P": "D_+"}


def _normalise_prop(kind, i, j, types):
    if kind == "P":
        return ("P", i, j) if types[i] == UNPRIMED else ("P", j, i)
    return (kind, min(i, j), max(i, j))


def _canonical(types, legs, props):
    """Lexicographically smallest relabelling of the vertices."""
    n = len(types)
    best = None
    for perm in itertools.permutations(range(n)):
        # perm[new] = old
        inv = {old: new for new, old in enumerate(perm)}
        t2 = tuple(types[o] for o in perm)
        l2 = tuple(legs[o] for o in perm)
        p2 = tuple(sorted(_normalise_prop(k, inv[i], inv[j], t2) for k, i, j in props))
        key = (t2, l2, p2)
        if best is None or key < best:
            best = key
    return best


@dataclass(frozen=True)
class ExpansionTerm:
    coeff: GaussQ
    types: tuple
    legs: tuple
    props: tuple

    @property
    def order(self) -> int:
        return len(self.types)

    def source_free(self) -> bool:
        return not any(self.legs)

    def connected(self) -> bool:
        n = len(self.types)
        if n <= 1:
            return True
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for _, i, j in self.props:
            parent[find(i)] = find(j)
        return len({find(v) for v in range(n)}) == 1


class SourceKernelExpansion:
    """Sum of exact terms over the Gaussian kernel ``Z0``."""

    def __init__(self, terms=None):
        self._terms: dict = {}
        for t in terms or ():
            self._add(t.coeff, t.types, t.legs, t.props)

    @classmethod
    def unit(cls) -> "SourceKernelExpansion":
        return cls([ExpansionTerm(ONE, (), (), ())])

    def _add(self, coeff, types, legs, props):
        if not coeff:
            return
        key = _canonical(tuple(types), tuple(legs), tuple(props))
        new = self._terms.get(key, GaussQ(0)) + coeff
        if new:
            self._terms[key] = new
        else:
            self._terms.pop(key, None)

    @property
    def terms(self) -> list:
        return [ExpansionTerm(c, *k) for k, c in sorted(self._terms.items())]

    def __len__(self):
        return len(self._terms)

    def __add__(self, other):
        out = SourceKernelExpansion(self.terms)
        for t in other.terms:
            out._add(t.coeff, t.types, t.legs, t.props)
        return out

    def scale(self, factor) -> "SourceKernelExpansion":
        factor = GaussQ.coerce(factor)
        return SourceKernelExpansion(
            [ExpansionTerm(t.coeff * factor, t.types, t.legs, t.props) for t in self.terms]
        )

    def __sub__(self, other):
        return self + other.scale(-1)

    def __mul__(self, other):
        """Product of two expansions (vertex sets are disjoint)."""
        out = SourceKernelExpansion()
        for a in self.terms:
            shift = len(a.types)
            for b in other.terms:
                props = a.props + tuple((k, i + shift, j + shift) for k, i, j in b.props)
                out._add(a.coeff * b.coeff, a.types + b.types, a.legs + b.legs, props)
        return out

    def without_source_free(self) -> "SourceKernelExpansion":
        return SourceKernelExpansion([t for t in self.terms if not t.source_free()])

    def source_free_part(self) -> "SourceKernelExpansion":
        return SourceKernelExpansion([t for t in self.terms if t.source_free()])

    def derivative(self, vertex: int) -> "SourceKernelExpansion":
        """Functional derivative with respect to the source of ``vertex`` at its time."""
        out = SourceKernelExpansion()
        for t in self.terms:
            raw = [(t.coeff, t.types, t.legs, t.props)]
            for coeff, types, legs, props in _raw_derivative(raw, vertex):
                out._add(coeff, types, legs, props)
        return out

    def render(self) -> str:
        return "\n".join(render_term(t) for t in self.terms)


def _raw_derivative(raw, vertex):
    """Derivative of uncanonicalised ``(coeff, types, legs, props)`` tuples."""
    acc = defaultdict(lambda: GaussQ(0))
    for coeff, types, legs, props in raw:
        bv = types[vertex]
        bumped = list(legs)
        bumped[vertex] += 1
        acc[(types, tuple(bumped), props)] += coeff
        for u, count in enumerate(legs):
            if not count:
                continue
            bu = types[u]
            if bu == UNPRIMED and bv == UNPRIMED:
                factor, prop = -I, ("F", u, vertex)
            elif bu == PRIMED and bv == PRIMED:
                factor, prop = I, ("D", u, vertex)
            else:
                factor, prop = -I, ("P", u, vertex)
            lowered = list(legs)
            lowered[u] -= 1
            new_props = tuple(sorted(props + (_normalise_prop(*prop, types),)))
            acc[(types, tuple(lowered), new_props)] += coeff * factor * count
    return [(c, *k) for k, c in acc.items() if c]


def apply_quartic_vertex(expansion: SourceKernelExpansion, branch: str) -> SourceKernelExpansion:
    """Apply ``d^4 / dJ(t)^4`` (or ``dJ'``) at a new vertex time ``t``.

    The coupling ``-(i lambda/4!)`` and the branch sign are not included.
    """
    if branch not in BRANCHES:
        raise PreconditionError(f"branch must be one of {BRANCHES}, got {branch!r}")
    out = SourceKernelExpansion()
    for t in expansion.terms:
        v = len(t.types)
        raw = [(t.coeff, t.types + (branch,), t.legs + (0,), t.props)]
        for _ in range(4):
            raw = _raw_derivative(raw, v)
        for coeff, types, legs, props in raw:
            out._add(coeff, types, legs, props)
    return out


def _vertex_sum(expansion):
    out = SourceKernelExpansion()
    for b in BRANCHES:
        out = out + apply_quartic_vertex(expansion, b).scale(VERTEX_COUPLING[b])
    return out


def expand_z(order: int) -> list:
    """``[Z_0, Z_1, ..., Z_order]`` with ``Z = sum lambda^k Z_k`` and ``Z_k = V^k Z0 / k!``."""
    if order < 0:
        raise PreconditionError("order must be >= 0")
    zs = [SourceKernelExpansion.unit()]
    current = zs[0]
    for k in range(1, order + 1):
        current = _vertex_sum(current).scale(GaussQ(1) / k)
        zs.append(current)
    return zs


def connected_expansion(order: int = 2, drop_vacuum: bool = True) -> list:
    """Coefficients ``W_k`` of ``log(Z/Z0) = sum_k lambda^k W_k`` for ``k <= 2``.

    With ``drop_vacuum`` the source-free terms are discarded; this is the
    normalisation that keeps ``Z[0,0] = 1`` order by order.
    """
    if order > 2:
        raise PreconditionError("the connected expansion is implemented up to second order")
    zs = expand_z(order)
    ws = [SourceKernelExpansion()]
    if order >= 1:
        ws.append(zs[1])
    if order >= 2:
        ws.append(zs[2] - (zs[1] * zs[1]).scale(GaussQ(1, 0) / 2))
    if drop_vacuum:
        ws = [w.without_source_free() for w in ws]
    return ws


# --- substitution of paths for source legs ----------------------------------


@dataclass(frozen=True)
class PathKernel:
    """``coeff * prod_v field_v(t_v)^powers[v] * prod props`` integrated over vertex times.

    ``field_v`` is ``q`` on unprimed vertices and ``q'`` on primed ones; the
    kernel is a contribution to ``i S~`` (the logarithm of the decoherence
    functional).
    """

    coeff: GaussQ
    types: tuple
    powers: tuple
    props: tuple

    @property
    def order(self) -> int:
        return len(self.types)

    def has_self_loop(self) -> bool:
        return any(i == j for _, i, j in self.props)

    def is_cross(self) -> bool:
        return (
            self.order == 2
            and set(self.types) == {UNPRIMED, PRIMED}
            and not self.has_self_loop()
        )

    def category(self) -> str:
        if self.has_self_loop():
            return "tadpole"
        if self.order == 1:
            return "local"
        return "cross" if self.is_cross() else "same-branch"

    def wightman_power(self) -> int:
        return sum(1 for k, _, _ in self.props if k == "P")

    def relative_coeff(self) -> GaussQ:
        """Coefficient relative to ``(-i/4!)^k / k!`` for a kernel with ``k`` vertices."""
        return self.coeff / standard_prefactor(self.order)

    def to_dict(self) -> dict:
        c = self.relative_coeff()
        return {
            "category": self.category(),
            "vertices": list(self.types),
            "powers": list(self.powers),
            "props": [[k, i, j] for k, i, j in self.props],
            "coeff_re": str(self.coeff.re),
            "coeff_im": str(self.coeff.im),
            "relative_re": str(c.re),
            "relative_im": str(c.im),
        }


def standard_prefactor(order: int) -> GaussQ:
    pref = GaussQ(1)
    for k in range(1, order + 1):
        pref = pref * (-I / 24) / k
    return pref


def to_path_kernels(expansion: SourceKernelExpansion) -> list:
    """Replace every leg by ``i q`` (unprimed) or ``i q'`` (primed).

    This is the stationary point of ``w - i int (J q + J' q')``, the Fourier
    pairing ``Z[J, J'] = int d[q, q'] exp(i int (J q + J' q'))``.
    """
    out = []
    for t in expansion.terms:
        coeff = t.coeff * I ** sum(t.legs)
        out.append(PathKernel(coeff, t.types, t.legs, t.props))
    return out


@dataclass(frozen=True)
class PerturbativeExponent:
    """Path kernels of ``i S~`` per order in the coupling (order 0 is the free action)."""

    orders: tuple  # orders[k] = list of PathKernel at lambda^k, k >= 1

    def kernels(self, order: int, category: str | None = None) -> list:
        if order < 1 or order > len(self.orders):
            return []
        ks = self.orders[order - 1]
        return [k for k in ks if category is None or k.category() == category]

    def cross_coefficients(self) -> dict:
        """``{wightman power: relative coefficient}`` of the second-order cross kernels."""
        return {k.wightman_power(): k.relative_coeff() for k in self.kernels(2, "cross")}

    def to_dict(self) -> dict:
        return {
            f"order{k + 1}": [kern.to_dict() for kern in ks] for k, ks in enumerate(self.orders)
        }


def connected_exponent(order: int = 2) -> PerturbativeExponent:
    """Derive the perturbative exponent ``i S~`` from scratch up to ``order`` (<= 2)."""
    if order > 2:
        raise PreconditionError("the connected exponent is implemented up to second order")
    ws = connected_expansion(order)
    return PerturbativeExponent(tuple(to_path_kernels(w) for w in ws[1:]))


def render_term(t) -> str:
    names = []
    for v, b in enumerate(t.types):
        names.append(f"t{v + 1}" if b == UNPRIMED else f"t{v + 1}'")
    parts = []
    powers = t.legs if isinstance(t, ExpansionTerm) else t.powers
    leg_name = "L" if isinstance(t, ExpansionTerm) else "q"
    for v, p in enumerate(powers):
        if p:
            field = leg_name if t.types[v] == UNPRIMED else leg_name + "'"
            parts.append(f"{field}({names[v]})" + (f"^{p}" if p > 1 else ""))
    grouped = defaultdict(int)
    for k, i, j in t.props:
        grouped[(k, i, j)] += 1
    for (k, i, j), p in sorted(grouped.items()):
        arg = "0" if i == j else f"{names[i]}-{names[j]}"
        parts.append(f"{_SYMBOL[k]}({arg})" + (f"^{p}" if p > 1 else ""))
    return f"{t.coeff} " + " ".join(parts)


def render_kernel(k: PathKernel) -> str:
    rel = k.relative_coeff()
    head = "(-i lam/4!)" if k.order == 1 else "1/2 (-i lam/4!)^2"
    return f"[{k.category()}] {head} x {rel} :: " + render_term(
        PathKernel(GaussQ(1), k.types, k.powers, k.props)
    ).split(" ", 1)[1]
