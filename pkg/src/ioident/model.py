"""Model containers: affine state-space systems and linear compartment models."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .algebra import OPERATOR_SYMBOL, PolyRing, RatFunc


class ModelError(ValueError):
    """A model violates a structural invariant."""


def make_ring(params: Sequence[str]) -> PolyRing:
    """Parameter ring with the operator symbol appended last."""
    if OPERATOR_SYMBOL in params:
        raise ModelError(f"'{OPERATOR_SYMBOL}' is reserved for the differential operator")
    return PolyRing(tuple(params) + (OPERATOR_SYMBOL,))


Matrix = tuple  # tuple of tuples of RatFunc


@dataclass(frozen=True)
class LinearModel:
    """x' = A x + B u + f0,  y = C x + D u + g0, entries rational in the parameters."""

    name: str
    params: tuple[str, ...]
    states: tuple[str, ...]
    outputs: tuple[str, ...]
    inputs: tuple[str, ...]
    A: Matrix
    B: Matrix
    C: Matrix
    D: Matrix
    f0: tuple
    g0: tuple
    ring: PolyRing = field(compare=False, repr=False, default=None)

    def __post_init__(self):
        if self.ring is None:
            object.__setattr__(self, "ring", make_ring(self.params))
        n, m, k = len(self.states), len(self.outputs), len(self.inputs)
        if n == 0:
            raise ModelError("model has no states")
        shapes = {"A": (self.A, n, n), "B": (self.B, n, k), "C": (self.C, m, n), "D": (self.D, m, k)}
        for label, (mat, r, c) in shapes.items():
            if len(mat) != r or any(len(row) != c for row in mat):
                raise ModelError(f"matrix {label} must be {r}x{c}")
        if len(self.f0) != n or len(self.g0) != m:
            raise ModelError("offset vectors have wrong length")
        names = list(self.states) + list(self.outputs) + list(self.inputs) + list(self.params)
        if len(set(names)) != len(names):
            raise ModelError("state, output, input and parameter names must be distinct")
        op = self.ring.index(OPERATOR_SYMBOL)
        for x in self.entries():
            if x.num.degree(op) > 0 or x.den.degree(op) > 0:
                raise ModelError(f"entry {x} uses the reserved operator symbol")

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def m(self) -> int:
        return len(self.outputs)

    @property
    def kappa(self) -> int:
        return len(self.inputs)

    def entries(self):
        for mat in (self.A, self.B, self.C, self.D):
            for row in mat:
                yield from row
        yield from self.f0
        yield from self.g0

    def has_offsets(self) -> bool:
        return any(not x.is_zero() for x in self.f0) or any(not x.is_zero() for x in self.g0)

    def param_index(self, name: str) -> int:
        return self.ring.index(name)


@dataclass(frozen=True)
class CompartmentModel:
    """Directed graph with leaks, scaled inputs and scaled outputs.

    Vertices are 1-based.  ``edges`` holds ``(source, target, rate)`` and the
    rate of edge ``i -> j`` enters A at row j, column i.
    """

    name: str
    n: int
    params: tuple[str, ...]
    edges: tuple[tuple[int, int, str], ...]
    leaks: tuple[tuple[int, str], ...]
    inputs: tuple[tuple[int, RatFunc], ...]
    outputs: tuple[tuple[int, RatFunc], ...]
    ring: PolyRing = field(compare=False, repr=False, default=None)

    def __post_init__(self):
        if self.ring is None:
            object.__setattr__(self, "ring", make_ring(self.params))
        if self.n < 1:
            raise ModelError("compartment model needs at least one vertex")
        seen = set()
        for i, j, rate in self.edges:
            for v in (i, j):
                if not 1 <= v <= self.n:
                    raise ModelError(f"edge {i} -> {j} references vertex {v} outside 1..{self.n}")
            if i == j:
                raise ModelError(f"self-loop at vertex {i}")
            if (i, j) in seen:
                raise ModelError(f"duplicate edge {i} -> {j}")
            seen.add((i, j))
            if rate not in self.params:
                raise ModelError(f"undeclared rate symbol {rate}")
        for label, items in (("leak", self.leaks), ("input", self.inputs), ("output", self.outputs)):
            vs = [v for v, _ in items]
            if len(set(vs)) != len(vs):
                raise ModelError(f"vertex listed twice as {label}")
            for v in vs:
                if not 1 <= v <= self.n:
                    raise ModelError(f"{label} at vertex {v} outside 1..{self.n}")
        for _, rate in self.leaks:
            if rate not in self.params:
                raise ModelError(f"undeclared rate symbol {rate}")
        for v, scale in self.inputs + self.outputs:
            if scale.is_zero():
                raise ModelError(f"zero scaling at vertex {v}")

    @property
    def edge_set(self) -> frozenset:
        return frozenset((i, j) for i, j, _ in self.edges)

    @property
    def leak_set(self) -> frozenset:
        return frozenset(v for v, _ in self.leaks)

    @property
    def input_set(self) -> frozenset:
        return frozenset(v for v, _ in self.inputs)

    @property
    def output_vertices(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.outputs)

    def state_names(self) -> tuple[str, ...]:
        return tuple(f"x{i}" for i in range(1, self.n + 1))

    def output_names(self) -> tuple[str, ...]:
        return tuple(f"y{v}" for v, _ in self.outputs)

    def input_names(self) -> tuple[str, ...]:
        return tuple(f"u{v}" for v, _ in self.inputs)

    def compartment_matrix(self, drop_edges: frozenset = frozenset()) -> list[list[RatFunc]]:
        """A(G); edges in ``drop_edges`` get rate zero."""
        ring = self.ring
        zero = RatFunc(ring.zero)
        a = [[zero] * self.n for _ in range(self.n)]
        for i, j, rate in self.edges:
            if (i, j) in drop_edges:
                continue
            r = RatFunc.gen(ring, rate)
            a[j - 1][i - 1] = a[j - 1][i - 1] + r
            a[i - 1][i - 1] = a[i - 1][i - 1] - r
        for v, rate in self.leaks:
            a[v - 1][v - 1] = a[v - 1][v - 1] - RatFunc.gen(ring, rate)
        return a


def compartment_to_state_space(cm: CompartmentModel) -> LinearModel:
    ring = cm.ring
    zero = RatFunc(ring.zero)
    A = cm.compartment_matrix()
    B = [[zero] * len(cm.inputs) for _ in range(cm.n)]
    for col, (v, scale) in enumerate(cm.inputs):
        B[v - 1][col] = scale
    C = [[zero] * cm.n for _ in cm.outputs]
    for row, (v, scale) in enumerate(cm.outputs):
        C[row][v - 1] = scale
    D = [[zero] * len(cm.inputs) for _ in cm.outputs]
    return LinearModel(
        name=cm.name,
        params=cm.params,
        states=cm.state_names(),
        outputs=cm.output_names(),
        inputs=cm.input_names(),
        A=_freeze(A),
        B=_freeze(B),
        C=_freeze(C),
        D=_freeze(D),
        f0=tuple([zero] * cm.n),
        g0=tuple([zero] * len(cm.outputs)),
        ring=ring,
    )


def as_linear(model) -> LinearModel:
    if isinstance(model, CompartmentModel):
        return compartment_to_state_space(model)
    return model


def _freeze(mat) -> tuple:
    return tuple(tuple(row) for row in mat)
