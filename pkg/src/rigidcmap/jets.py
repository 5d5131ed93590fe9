"""Holomorphic prepotentials and their derivative jets.

Three kinds are supported:

* ``polynomial``: a finite sum of complex monomials in ``n`` variables.
* ``very-special-cubic``: ``h(z^1..z^n) / z^0`` on ``C^{n+1}`` with a real
  symmetric cubic ``h``, optionally plus polynomial terms in all ``n+1``
  variables.
* ``derivative-oracle``: an externally supplied evaluator returning all
  partial derivatives up to a declared order.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

POLYNOMIAL = "polynomial"
VERY_SPECIAL = "very-special-cubic"
ORACLE = "derivative-oracle"
KINDS = (POLYNOMIAL, VERY_SPECIAL, ORACLE)

MAX_ORDER = 4
ORACLE_SYMMETRY_RTOL = 1e-12


class PrepotentialError(ValueError):
    """Malformed prepotential document or invalid construction."""


class PoleError(ValueError):
    """Evaluation at a pole (``z^0 = 0`` for very-special prepotentials)."""


class JetOrderError(ValueError):
    """Requested derivative order exceeds what the prepotential supports."""


@dataclass(frozen=True)
class Prepotential:
    """A holomorphic prepotential.

    ``n`` is the declared number of base variables. For the very-special kind
    the function lives on ``C^{n+1}``; use :attr:`dim` for the number of
    complex arguments ``jet`` expects.
    """

    n: int
    kind: str
    terms: tuple = ()
    cubic: Optional[np.ndarray] = field(default=None, compare=False)
    oracle: Optional[Callable] = field(default=None, compare=False)
    oracle_order: int = 0

    @property
    def dim(self) -> int:
        return self.n + 1 if self.kind == VERY_SPECIAL else self.n

    @property
    def max_order(self) -> int:
        return self.oracle_order if self.kind == ORACLE else MAX_ORDER

    def __call__(self, z) -> complex:
        return jet(self, z, order=0).value


@dataclass(frozen=True)
class PrepotentialJet:
    z: np.ndarray
    value: complex
    grad: Optional[np.ndarray] = None
    hess: Optional[np.ndarray] = None
    third: Optional[np.ndarray] = None
    fourth: Optional[np.ndarray] = None

    @property
    def order(self) -> int:
        tensors = (self.grad, self.hess, self.third, self.fourth)
        return sum(t is not None for t in tensors)

    @property
    def dim(self) -> int:
        return len(self.z)

    def tensor(self, k: int) -> np.ndarray:
        t = (self.value, self.grad, self.hess, self.third, self.fourth)[k]
        if t is None:
            raise JetOrderError(f"jet carries derivatives only to order {self.order}, need {k}")
        return t


# --------------------------------------------------------------------------
# construction


def _normalize_terms(terms, dim: int) -> tuple:
    seen = set()
    out = []
    for coeff, exps in terms:
        exps = tuple(int(e) for e in exps)
        if len(exps) != dim:
            raise PrepotentialError(f"exponent multi-index {exps} has length {len(exps)}, expected {dim}")
        if any(e < 0 for e in exps):
            raise PrepotentialError(f"negative exponent in {exps}")
        if exps in seen:
            raise PrepotentialError(f"duplicate term with exponents {exps}")
        seen.add(exps)
        if sum(exps) == 0:
            # additive constants do not affect dF and are normalized away
            continue
        out.append((complex(coeff), exps))
    return tuple(out)


def polynomial(n: int, terms: Sequence) -> Prepotential:
    """Polynomial prepotential from ``(coeff, exponents)`` pairs."""
    if n < 1:
        raise PrepotentialError("n must be a positive integer")
    return Prepotential(n=n, kind=POLYNOMIAL, terms=_normalize_terms(terms, n))


def symmetrize_cubic(entries, n: int) -> np.ndarray:
    """Dense symmetric ``c_ijk`` from ``{(i, j, k): value}`` with 0-based indices.

    The supplied entries define ``h(x) = sum c_ijk x^i x^j x^k`` over the given
    ordered triples; the result is the symmetric tensor defining the same ``h``.
    """
    c = np.zeros((n, n, n))
    for (i, j, k), value in entries.items():
        c[i, j, k] += value
    return sum(np.transpose(c, p) for p in itertools.permutations(range(3))) / 6.0


def very_special(n: int, cubic, terms: Sequence = ()) -> Prepotential:
    """``F(z^0..z^n) = h(z^1..z^n)/z^0`` plus optional polynomial terms.

    ``cubic`` is either a dense ``(n, n, n)`` real array or a mapping from
    0-based index triples to real values.
    """
    if n < 1:
        raise PrepotentialError("n must be a positive integer")
    if isinstance(cubic, dict):
        c = symmetrize_cubic(cubic, n)
    else:
        c = np.asarray(cubic)
        if np.iscomplexobj(c):
            if np.any(c.imag != 0):
                raise PrepotentialError("very-special cubic coefficients must be real")
            c = c.real
        c = symmetrize_cubic({idx: c[idx] for idx in itertools.product(range(n), repeat=3)}, n)
    if c.shape != (n, n, n):
        raise PrepotentialError(f"cubic tensor has shape {c.shape}, expected {(n, n, n)}")
    c.setflags(write=False)
    return Prepotential(n=n, kind=VERY_SPECIAL, terms=_normalize_terms(terms, n + 1), cubic=c)


def from_oracle(n: int, evaluator: Callable, order: int) -> Prepotential:
    """Wrap ``evaluator(z) -> [F, F_i, F_ij, ...]`` (at least ``order + 1`` entries)."""
    if not 0 <= order <= MAX_ORDER:
        raise PrepotentialError(f"oracle order must lie in 0..{MAX_ORDER}")
    return Prepotential(n=n, kind=ORACLE, oracle=evaluator, oracle_order=order)


def _complex_from_json(value) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise PrepotentialError(f"cannot read complex number from {value!r}")


def parse_prepotential(text) -> Prepotential:
    """Build a :class:`Prepotential` from a JSON document (string or parsed dict)."""
    if isinstance(text, (str, bytes)):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise PrepotentialError(f"malformed prepotential document: {exc}") from exc
    else:
        doc = text
    if not isinstance(doc, dict):
        raise PrepotentialError("prepotential document must be a JSON object")
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise PrepotentialError("field 'n' must be a positive integer")
    kind = doc.get("kind")
    if kind not in (POLYNOMIAL, VERY_SPECIAL):
        raise PrepotentialError(f"unsupported kind {kind!r} (documents may declare {POLYNOMIAL!r} or {VERY_SPECIAL!r})")

    try:
        terms = [(_complex_from_json(t["coeff"]), t["exponents"]) for t in doc.get("terms", [])]
    except (KeyError, TypeError) as exc:
        raise PrepotentialError(f"malformed term entry: {exc}") from exc

    if kind == POLYNOMIAL:
        if not terms:
            raise PrepotentialError("polynomial prepotential needs at least one term")
        return polynomial(n, terms)

    entries = {}
    for item in doc.get("cubic", []):
        try:
            idx = tuple(int(i) - 1 for i in item["indices"])
            raw = item["value"]
        except (KeyError, TypeError) as exc:
            raise PrepotentialError(f"malformed cubic entry: {exc}") from exc
        value = _complex_from_json(raw)
        if value.imag != 0:
            raise PrepotentialError("very-special cubic coefficients must be real")
        if len(idx) != 3 or not all(0 <= i < n for i in idx):
            raise PrepotentialError(f"cubic indices {item['indices']} out of range 1..{n}")
        if idx in entries:
            raise PrepotentialError(f"duplicate cubic entry {item['indices']}")
        entries[idx] = value.real
    if not entries:
        raise PrepotentialError("very-special prepotential needs cubic coefficients")
    return very_special(n, entries, terms)


def load_prepotential(path) -> Prepotential:
    with open(path) as fh:
        return parse_prepotential(fh.read())


def prepotential_to_document(F: Prepotential) -> dict:
    if F.kind == ORACLE:
        raise PrepotentialError("derivative-oracle prepotentials have no document form")
    doc = {
        "n": F.n,
        "kind": F.kind,
        "terms": [{"coeff": [c.real, c.imag], "exponents": list(e)} for c, e in F.terms],
    }
    if F.kind == VERY_SPECIAL:
        doc["cubic"] = [
            {"indices": [i + 1, j + 1, k + 1], "value": float(F.cubic[i, j, k])}
            for i, j, k in itertools.combinations_with_replacement(range(F.n), 3)
            if F.cubic[i, j, k] != 0
        ]
        # listing only sorted triples: rescale so the symmetrized tensor is unchanged
        for entry in doc["cubic"]:
            entry["value"] *= len(set(itertools.permutations(entry["indices"])))
    return doc


# --------------------------------------------------------------------------
# evaluation


def _falling(e: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Prod_k e_k (e_k - 1) ... (e_k - a_k + 1), row-wise."""
    out = np.ones(e.shape[0])
    for k in range(e.shape[1]):
        for j in range(int(a[k])):
            out *= e[:, k] - j
    return out


class _Monomials:
    def __init__(self, terms, dim):
        self.dim = dim
        if terms:
            self.coeffs = np.array([c for c, _ in terms], dtype=complex)
            self.exps = np.array([e for _, e in terms], dtype=int).reshape(len(terms), dim)
        else:
            self.coeffs = np.zeros(0, dtype=complex)
            self.exps = np.zeros((0, dim), dtype=int)

    def derivative(self, z: np.ndarray, alpha: np.ndarray) -> complex:
        if not len(self.coeffs):
            return 0j
        mask = np.all(self.exps >= alpha, axis=1)
        if not mask.any():
            return 0j
        e = self.exps[mask]
        powers = np.prod(z[None, :] ** (e - alpha), axis=1)
        return complex(np.sum(self.coeffs[mask] * _falling(e, alpha) * powers))


def _cubic_terms(c: np.ndarray) -> list:
    """Monomial expansion of ``sum c_ijk x^i x^j x^k``."""
    n = c.shape[0]
    terms = []
    for idx in itertools.combinations_with_replacement(range(n), 3):
        mult = len(set(itertools.permutations(idx)))
        value = c[idx] * mult
        if value != 0:
            e = [0] * n
            for i in idx:
                e[i] += 1
            terms.append((complex(value), tuple(e)))
    return terms


def _fill_symmetric(dim: int, order: int, entry: Callable) -> np.ndarray:
    out = np.zeros((dim,) * order, dtype=complex)
    for idx in itertools.combinations_with_replacement(range(dim), order):
        alpha = np.bincount(np.array(idx, dtype=int), minlength=dim)
        value = entry(alpha)
        for perm in set(itertools.permutations(idx)):
            out[perm] = value
    return out


def _check_oracle_symmetry(t: np.ndarray, rtol: float) -> None:
    scale = max(np.max(np.abs(t)), 1.0)
    for perm in itertools.permutations(range(t.ndim)):
        if np.max(np.abs(t - np.transpose(t, perm))) > rtol * scale:
            raise PrepotentialError("oracle derivative tensor is not symmetric")


def jet(F: Prepotential, z, order: int = 2) -> PrepotentialJet:
    """Evaluate ``F`` and all partial derivatives up to ``order`` at ``z``."""
    if not 0 <= order <= MAX_ORDER:
        raise JetOrderError(f"order must lie in 0..{MAX_ORDER}")
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.shape != (F.dim,):
        raise ValueError(f"point has shape {z.shape}, prepotential expects ({F.dim},)")

    if F.kind == ORACLE:
        if order > F.oracle_order:
            raise JetOrderError(f"oracle supplies derivatives only to order {F.oracle_order}")
        raw = F.oracle(z)
        tensors = [np.asarray(raw[k], dtype=complex).reshape((F.dim,) * k) for k in range(order + 1)]
        for t in tensors[2:]:
            _check_oracle_symmetry(t, ORACLE_SYMMETRY_RTOL)
        value = complex(tensors[0])
    else:
        poly = _Monomials(F.terms, F.dim)
        if F.kind == VERY_SPECIAL:
            if z[0] == 0:
                raise PoleError("very-special prepotential has a pole at z^0 = 0")
            h = _Monomials(_cubic_terms(F.cubic), F.n)
            inv = 1.0 / z[0]
            zb = z[1:]

            def entry(alpha):
                a0 = int(alpha[0])
                # d^a0/dz0^a0 (1/z0) = (-1)^a0 a0! / z0^(a0+1)
                factor = (-1) ** a0 * math.factorial(a0) * inv ** (a0 + 1)
                return h.derivative(zb, alpha[1:]) * factor + poly.derivative(z, alpha)
        else:

            def entry(alpha):
                return poly.derivative(z, alpha)

        tensors = [_fill_symmetric(F.dim, k, entry) for k in range(order + 1)]
        value = complex(tensors[0])

    for t in tensors[1:]:
        t.setflags(write=False)
    slots = tensors[1:] + [None] * (MAX_ORDER - order)
    return PrepotentialJet(z, value, *slots)


def euler_residual(F: Prepotential, z) -> complex:
    """``sum_A z^A F_A - 2 F``; vanishes iff ``F`` is degree-2 homogeneous near ``z``."""
    j = jet(F, z, order=1)
    return complex(np.dot(j.z, j.grad) - 2 * j.value)
