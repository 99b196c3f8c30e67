"""Differential forms on a jet chart.

A form is a map from strictly increasing words of coframe symbols to
coefficient expressions, tagged with the chart order ``r`` and a basis:

* ``coordinate``: symbols ``dx^i`` and ``dy^s_J`` with ``|J| <= r``;
* ``contact``:    symbols ``dx^i``, ``w^s_J`` (contact forms, ``|J| <= r-1``)
  and the top-order ``dy^s_J`` with ``|J| = r``.

Symbols are tuples ordered as: every ``dx`` by index, then ``w``/``dy`` by
``(|J|, s, J)`` with ``w`` before ``dy`` at equal key.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np

from .errors import BasisMismatch, DegreeTooLow, NotContact, OrderMismatch, ShapeError
from .expr import (
    BASE,
    JET,
    ONE,
    ZERO,
    Expr,
    JetSpec,
    homogeneous_components,
    render as render_expr,
    total_derivative,
    y,
    zero_fibre,
)
from .multiindex import enumerate_upto, permutation_sign, weight

COORDINATE = "coordinate"
CONTACT = "contact"


def DX(i):
    return (0, i)


def DY(sigma, J=()):
    J = tuple(sorted(J))
    return (1, len(J), sigma, J, 1)


def OMEGA(sigma, J=()):
    J = tuple(sorted(J))
    return (1, len(J), sigma, J, 0)


def is_dx(s):
    return s[0] == 0


def is_dy(s):
    return s[0] == 1 and s[4] == 1


def is_omega(s):
    return s[0] == 1 and s[4] == 0


def fibre_of(s):
    """(sigma, J) of a dy or omega symbol."""
    return s[2], s[3]


def _jet(sigma, J, i):
    return y(sigma, tuple(sorted(J + (i,))))


def sort_word(symbols):
    """Sign and sorted word of a wedge of symbols; sign 0 on repetition."""
    sign = permutation_sign(symbols)
    if sign == 0:
        return 0, None
    return sign, tuple(sorted(symbols))


def _merge(w1, w2):
    if not w1:
        return 1, w2
    if not w2:
        return 1, w1
    seen = set(w1)
    inversions = 0
    for t in w2:
        if t in seen:
            return 0, None
        inversions += sum(1 for u in w1 if u > t)
    return (-1) ** inversions, tuple(sorted(w1 + w2))


def _add_term(terms, word, coeff):
    if coeff.is_zero():
        return
    total = terms.get(word)
    total = coeff if total is None else total + coeff
    if total.is_zero():
        terms.pop(word, None)
    else:
        terms[word] = total


def _symbol_order(s):
    if is_dx(s):
        return 0
    return s[1] if is_dy(s) else s[1] + 1


class DiffForm:
    """A q-form on the chart of order ``spec.r`` (immutable by convention)."""

    __slots__ = ("spec", "degree", "basis", "_terms")

    def __init__(self, spec: JetSpec, degree: int, basis: str, terms=None):
        self.spec = spec
        self.degree = degree
        self.basis = basis
        self._terms = {w: c for w, c in (terms or {}).items() if not c.is_zero()}
        self._validate()

    def _validate(self):
        r = self.spec.r
        if self.basis not in (COORDINATE, CONTACT):
            raise BasisMismatch(f"unknown basis {self.basis!r}")
        if self.basis == CONTACT and r < 1:
            raise BasisMismatch("the contact basis needs a chart of order >= 1")
        for word, coeff in self._terms.items():
            if len(word) != self.degree:
                raise ShapeError(f"word {word} has length != degree {self.degree}")
            if coeff.order > r:
                raise OrderMismatch(f"coefficient of order {coeff.order} on a chart of order {r}")
            for s in word:
                if is_omega(s):
                    if self.basis != CONTACT or s[1] > r - 1:
                        raise BasisMismatch(f"contact symbol {render_symbol(s)} not allowed here")
                elif is_dy(s):
                    if s[1] > r or (self.basis == CONTACT and s[1] != r):
                        raise BasisMismatch(f"symbol {render_symbol(s)} not allowed here")

    @classmethod
    def build(cls, spec, degree, basis, terms):
        """Construct, raising the chart order if coefficients or symbols need it."""
        needed = spec.r
        for word, coeff in terms.items():
            needed = max(needed, coeff.order, max((_symbol_order(s) for s in word), default=0))
        if needed == spec.r:
            return cls(spec, degree, basis, terms)
        coord = _substitute(terms, _omega_to_coordinate(spec.n))
        form = cls(spec.with_order(needed), degree, COORDINATE, coord)
        return to_contact_same_chart(form) if basis == CONTACT else form

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, spec, degree=0, basis=COORDINATE):
        return cls(spec, degree, basis, {})

    @classmethod
    def function(cls, spec, f, basis=COORDINATE):
        f = f if isinstance(f, Expr) else Expr.constant(f)
        return cls.build(spec, 0, basis, {(): f})

    @classmethod
    def dx(cls, spec, i):
        return cls(spec, 1, COORDINATE, {(DX(i),): ONE})

    @classmethod
    def dy(cls, spec, sigma, J=()):
        return cls(spec, 1, COORDINATE, {(DY(sigma, J),): ONE})

    @classmethod
    def omega(cls, spec, sigma, J=()):
        """The contact form w^sigma_J (|J| <= r-1), in the contact basis."""
        return cls(spec, 1, CONTACT, {(OMEGA(sigma, J),): ONE})

    # -- inspection ---------------------------------------------------------

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self):
        return not self._terms

    def coefficient(self, word):
        return self._terms.get(tuple(word), ZERO)

    def scalar(self) -> Expr:
        if self.degree != 0:
            raise ShapeError("not a 0-form")
        return self._terms.get((), ZERO)

    # -- algebra --------------------------------------------------------------

    def _aligned(self, other):
        if (self.spec.n, self.spec.m) != (other.spec.n, other.spec.m):
            raise ShapeError("forms live on different jet spaces")
        a, b = self, other
        if a.degree == 0 and a.basis != b.basis:
            a = DiffForm.build(a.spec, 0, b.basis, a._terms)
        elif b.degree == 0 and a.basis != b.basis:
            b = DiffForm.build(b.spec, 0, a.basis, b._terms)
        if a.basis != b.basis:
            raise BasisMismatch(f"cannot combine {a.basis} and {b.basis} bases")
        r = max(a.spec.r, b.spec.r)
        return pullback(a, r), pullback(b, r)

    def __add__(self, other):
        if isinstance(other, (Expr, int, Fraction)):
            other = DiffForm.function(self.spec, other, self.basis)
        if not isinstance(other, DiffForm):
            return NotImplemented
        if self.degree != other.degree:
            raise ShapeError(f"cannot add forms of degree {self.degree} and {other.degree}")
        a, b = self._aligned(other)
        terms = dict(a._terms)
        for w, c in b._terms.items():
            _add_term(terms, w, c)
        return DiffForm(a.spec, a.degree, a.basis, terms)

    __radd__ = __add__

    def __neg__(self):
        return DiffForm(self.spec, self.degree, self.basis, {w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, DiffForm):
            return wedge(self, other)
        if isinstance(other, (int, Fraction)):
            return DiffForm(self.spec, self.degree, self.basis, {w: c * other for w, c in self._terms.items()})
        if isinstance(other, Expr):
            terms = {w: c * other for w, c in self._terms.items()}
            return DiffForm.build(self.spec, self.degree, self.basis, terms)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * (Fraction(1) / Fraction(other))

    def __eq__(self, other):
        if isinstance(other, (Expr, int, Fraction)):
            other = DiffForm.function(self.spec, other)
        if not isinstance(other, DiffForm):
            return NotImplemented
        if (self.spec.n, self.spec.m, self.degree) != (other.spec.n, other.spec.m, other.degree):
            return False
        return to_coordinate_basis(self)._terms == to_coordinate_basis(other)._terms

    __hash__ = None

    def __repr__(self):
        return f"DiffForm({render(self)!r}, r={self.spec.r}, basis={self.basis})"

    def __str__(self):
        return render(self)


def wedge(a: DiffForm, b: DiffForm) -> DiffForm:
    a, b = a._aligned(b)
    terms = {}
    for w1, c1 in a._terms.items():
        for w2, c2 in b._terms.items():
            sign, w = _merge(w1, w2)
            if sign:
                _add_term(terms, w, c1 * c2 * sign)
    return DiffForm.build(a.spec, a.degree + b.degree, a.basis, terms)


def wedge_all(forms, spec, basis=COORDINATE):
    result = DiffForm.function(spec, ONE, basis)
    for f in forms:
        result = wedge(result, f)
    return result


# -- symbol substitution ------------------------------------------------------


def _substitute(terms, image):
    """Replace each symbol s by the 1-form image(s) = {symbol: Expr} (or None)."""
    out = {}
    for word, coeff in terms.items():
        factors = []
        for s in word:
            img = image(s)
            factors.append({s: ONE} if img is None else img)
        for choice in itertools.product(*(f.items() for f in factors)):
            symbols = [s for s, _ in choice]
            sign, w = sort_word(symbols)
            if not sign:
                continue
            c = coeff * sign
            for _, e in choice:
                c = c * e
            _add_term(out, w, c)
    return out


def _omega_to_coordinate(n):
    def image(s):
        if not is_omega(s):
            return None
        sigma, J = fibre_of(s)
        img = {DY(sigma, J): ONE}
        for i in range(1, n + 1):
            img[DX(i)] = -_jet(sigma, J, i)
        return img

    return image


def _dy_to_contact(n, r):
    def image(s):
        if not is_dy(s) or s[1] >= r:
            return None
        sigma, J = fibre_of(s)
        img = {OMEGA(sigma, J): ONE}
        for i in range(1, n + 1):
            img[DX(i)] = _jet(sigma, J, i)
        return img

    return image


def to_coordinate_basis(rho: DiffForm) -> DiffForm:
    if rho.basis == COORDINATE:
        return rho
    return DiffForm(rho.spec, rho.degree, COORDINATE, _substitute(rho._terms, _omega_to_coordinate(rho.spec.n)))


def to_contact_same_chart(rho: DiffForm) -> DiffForm:
    """Contact basis on the same chart: dy_J = w_J + y_Jj dx^j for |J| < r."""
    if rho.basis == CONTACT:
        return rho
    r = rho.spec.r
    if r < 1:
        raise BasisMismatch("the contact basis needs a chart of order >= 1")
    return DiffForm(rho.spec, rho.degree, CONTACT, _substitute(rho._terms, _dy_to_contact(rho.spec.n, r)))


def pullback(rho: DiffForm, r: int) -> DiffForm:
    """The same form viewed on the chart of order r >= rho.spec.r."""
    if r == rho.spec.r:
        return rho
    if r < rho.spec.r:
        raise OrderMismatch(f"cannot push a form from order {rho.spec.r} down to {r}")
    spec = rho.spec.with_order(r)
    coord = DiffForm(spec, rho.degree, COORDINATE, to_coordinate_basis(rho)._terms)
    return to_contact_same_chart(coord) if rho.basis == CONTACT else coord


def to_contact_basis(rho: DiffForm) -> DiffForm:
    """Pull back to order r+1 and express every dy_J (|J| <= r) through w_J."""
    return to_contact_same_chart(pullback(to_coordinate_basis(rho), rho.spec.r + 1))


# -- exterior derivative ------------------------------------------------------


def differential(f: Expr, n: int):
    """df as {symbol: Expr} using plain partials in canonical coordinates."""
    out = {}
    for i in range(1, n + 1):
        c = f.diff((BASE, i))
        if not c.is_zero():
            out[DX(i)] = c
    for g in f.all_generators():
        if g[0] == JET:
            c = f.diff(g)
            if not c.is_zero():
                out[DY(g[2], g[3])] = c
    return out


def exterior_derivative(rho: DiffForm) -> DiffForm:
    coord = to_coordinate_basis(rho)
    terms = {}
    for word, coeff in coord._terms.items():
        for s, c in differential(coeff, rho.spec.n).items():
            sign, w = _merge((s,), word)
            if sign:
                _add_term(terms, w, c * sign)
    result = DiffForm(rho.spec, rho.degree + 1, COORDINATE, terms)
    return to_contact_same_chart(result) if rho.basis == CONTACT else result


# -- contact components -----------------------------------------------------


def contact_component(rho: DiffForm, k: int) -> DiffForm:
    """p_k: the terms with exactly k contact factors (chart order r+1)."""
    if not 0 <= k <= rho.degree:
        raise ShapeError(f"contact degree {k} outside 0..{rho.degree}")
    full = to_contact_basis(rho)
    terms = {w: c for w, c in full._terms.items() if sum(map(is_omega, w)) == k}
    return DiffForm(full.spec, full.degree, CONTACT, terms)


def contact_components(rho: DiffForm) -> list[DiffForm]:
    return [contact_component(rho, k) for k in range(rho.degree + 1)]


def horizontalize(rho: DiffForm) -> DiffForm:
    return contact_component(rho, 0)


def is_contact(rho: DiffForm) -> bool:
    return horizontalize(rho).is_zero()


def is_strongly_contact(rho: DiffForm) -> bool:
    q, n = rho.degree, rho.spec.n
    if q <= n:
        raise DegreeTooLow(f"strong contact test needs degree > n (degree {q}, n {n})")
    return contact_component(rho, q - n).is_zero()


def total_exterior_derivative(nu: DiffForm) -> DiffForm:
    return horizontalize(exterior_derivative(nu))


# -- homotopy operator --------------------------------------------------------


def contact_homotopy(rho: DiffForm) -> DiffForm:
    """The fibre homotopy operator A.

    Under y_J -> t*y_J every dy_J (or w_J) becomes t*dy_J + y_J dt.  Collecting
    the dt part with dt in front and integrating over t in [0, 1] gives, for a
    word with N fibre symbols and a coefficient of fibre degree d, the factor
    1/(d + N).
    """
    if rho.degree == 0:
        return DiffForm.zero(rho.spec, 0, rho.basis)
    terms = {}
    for word, coeff in rho._terms.items():
        slots = [p for p, s in enumerate(word) if not is_dx(s)]
        if not slots:
            continue
        N = len(slots)
        parts = homogeneous_components(coeff)
        for p in slots:
            sigma, J = fibre_of(word[p])
            rest = word[:p] + word[p + 1:]
            c = ZERO
            for d, part in parts.items():
                c = c + part * Fraction(1, d + N)
            _add_term(terms, rest, c * y(sigma, J) * (-1) ** p)
    return DiffForm(rho.spec, rho.degree - 1, rho.basis, terms)


def zero_section_pullback(rho: DiffForm) -> DiffForm:
    terms = {}
    for word, coeff in rho._terms.items():
        if all(is_dx(s) for s in word):
            _add_term(terms, word, zero_fibre(coeff))
    return DiffForm(rho.spec, rho.degree, rho.basis, terms)


# -- vector fields --------------------------------------------------------------


@dataclass(frozen=True)
class Evolution:
    spec: JetSpec
    components: tuple

    def __post_init__(self):
        comps = tuple(c if isinstance(c, Expr) else Expr.constant(c) for c in self.components)
        object.__setattr__(self, "components", comps)
        if len(comps) != self.spec.m:
            raise ShapeError(f"an evolution needs {self.spec.m} components")
        for c in comps:
            if c.order > self.spec.r:
                raise OrderMismatch(f"component of order {c.order} exceeds {self.spec.r}")


@dataclass(frozen=True)
class VectorField:
    """A field a^i d/dx^i + b^s_J d/dy^s_J in plain canonical coordinates.

    ``order`` is the highest jet order for which fibre components are known
    (missing entries are zero).
    """

    n: int
    m: int
    base: dict
    fibre: dict
    order: int

    def on(self, s) -> Expr:
        if is_dx(s):
            return self.base.get(s[1], ZERO)
        sigma, J = fibre_of(s)
        if len(J) > self.order:
            raise OrderMismatch(f"field prolonged to order {self.order}, form needs {len(J)}")
        value = self.fibre.get((sigma, J), ZERO)
        if is_omega(s):
            for i, a in self.base.items():
                value = value - _jet(sigma, J, i) * a
        return value


def jet_derivatives(f: Expr, n: int, r: int) -> dict:
    """{J: d_J f} for all canonical |J| <= r."""
    out = {(): f}
    for J in enumerate_upto(n, r):
        J = J.entries
        if J:
            out[J] = total_derivative(out[J[:-1]], J[-1])
    return out


def prolonged_field(xi: Evolution, r: int) -> VectorField:
    fibre = {}
    for sigma, comp in enumerate(xi.components, start=1):
        for J, value in jet_derivatives(comp, xi.spec.n, r).items():
            if not value.is_zero():
                fibre[(sigma, J)] = value
    return VectorField(xi.spec.n, xi.spec.m, {}, fibre, r)


def interior_product(field: VectorField, rho: DiffForm) -> DiffForm:
    if rho.degree == 0:
        return DiffForm.zero(rho.spec, 0, rho.basis)
    terms = {}
    for word, coeff in rho._terms.items():
        for p, s in enumerate(word):
            value = field.on(s)
            if not value.is_zero():
                _add_term(terms, word[:p] + word[p + 1:], coeff * value * (-1) ** p)
    return DiffForm.build(rho.spec, rho.degree - 1, rho.basis, terms)


def lie_derivative(xi, rho: DiffForm) -> DiffForm:
    """Lie derivative along the prolongation of an evolution (Cartan formula)."""
    field = prolonged_field(xi, rho.spec.r) if isinstance(xi, Evolution) else xi
    coord = to_coordinate_basis(rho)
    result = interior_product(field, exterior_derivative(coord))
    if rho.degree > 0:
        result = result + exterior_derivative(interior_product(field, coord))
    return to_contact_same_chart(result) if rho.basis == CONTACT else result


# -- structure decomposition ----------------------------------------------------


def d_omega(spec: JetSpec, sigma: int, J) -> DiffForm:
    return exterior_derivative(DiffForm.omega(spec, sigma, J))


def assemble_structure(spec: JetSpec, phi: dict, psi: dict) -> DiffForm:
    """sum w^s_J ^ Phi^J_s + sum dw^s_I ^ Psi^I_s."""
    total = None
    for (sigma, J), form in phi.items():
        term = wedge(to_coordinate_basis(DiffForm.omega(spec, sigma, J)), to_coordinate_basis(form))
        total = term if total is None else total + term
    for (sigma, I), form in psi.items():
        term = wedge(to_coordinate_basis(d_omega(spec, sigma, I)), to_coordinate_basis(form))
        total = term if total is None else total + term
    return total


def contact_structure_decomposition(rho: DiffForm):
    """Split a contact q-form (1 <= q <= n) as sum w^J ^ Phi_J + sum dw^I ^ Psi_I.

    Phi collects every term with a contact factor (keyed by the first one).
    The remainder only contains dx and top-order dy; for each choice of fibre
    labels its coefficient tensor lies in the kernel of B_1...B_s and the Fock
    solver writes it as sum B_a X_a, each B_a contributing one dw_I factor.
    """
    from . import fock

    q, n, r = rho.degree, rho.spec.n, rho.spec.r
    if not 1 <= q <= n:
        raise ShapeError(f"structure decomposition needs 1 <= degree <= n (degree {q}, n {n})")
    if r < 1:
        rho = pullback(rho, 1)
        r = 1
    if not is_contact(rho):
        raise NotContact("h(rho) != 0")
    spec = rho.spec
    form = to_contact_same_chart(rho)
    phi_terms, residue = {}, {}
    for word, coeff in form._terms.items():
        p = next((k for k, s in enumerate(word) if is_omega(s)), None)
        if p is None:
            residue[word] = coeff
        else:
            key = fibre_of(word[p])
            _add_term(phi_terms.setdefault(key, {}), word[:p] + word[p + 1:], coeff * (-1) ** p)
    phi = {k: DiffForm(spec, q - 1, CONTACT, t) for k, t in sorted(phi_terms.items()) if t}

    psi_terms = {}
    by_count = {}
    for word, coeff in residue.items():
        s = sum(map(is_dy, word))
        if s == 0:
            raise NotContact("horizontal terms remain after removing contact factors")
        by_count.setdefault(s, {})[word] = coeff
    for s, words in sorted(by_count.items()):
        k = q - s
        scale = Fraction(1, factorial(s) * factorial(k))
        shape = fock.FockShape(n, k, (r,) * s)
        for sigmas in itertools.product(range(1, spec.m + 1), repeat=s):
            by_monomial = _residue_tensors(words, sigmas, s, k, n, r)
            for mono, array in by_monomial.items():
                monomial = Expr._raw({mono: Fraction(1)})
                parts = fock.solve_kernel_representation(fock.FockTensor(shape, array), s)
                for alpha, part in enumerate(parts, start=1):
                    sign = (-1) ** (s - alpha + 1)
                    _collect_psi(psi_terms, part, sigmas, alpha, k, r, monomial * (scale * sign))
    psi = {key: DiffForm(spec, q - 2, CONTACT, t) for key, t in sorted(psi_terms.items()) if t}
    return phi, psi


def _residue_tensors(words, sigmas, s, k, n, r):
    """Dense coefficient tensors A_sigmas split by monomial.

    Axes: k dx slots, then s groups of r jet slots.  A word
    dx^a ^ dy_K1 ^ ... ^ dy_Ks with coefficient c gives
    A = (-1)^(s k) c / prod weight(K_l) at the sorted arrangement.
    """
    out = {}
    base_sign = (-1) ** (s * k)
    for index in itertools.product(range(1, n + 1), repeat=k + s * r):
        dx_part = index[:k]
        sign_dx = permutation_sign(dx_part)
        if not sign_dx:
            continue
        groups = [tuple(sorted(index[k + l * r:k + (l + 1) * r])) for l in range(s)]
        dys = [DY(sig, K) for sig, K in zip(sigmas, groups)]
        sign_dy, dy_word = sort_word(dys)
        if not sign_dy:
            continue
        word = tuple(DX(i) for i in sorted(dx_part)) + dy_word
        coeff = words.get(word)
        if coeff is None:
            continue
        denom = 1
        for K in groups:
            denom *= weight(K)
        factor = Fraction(base_sign * sign_dx * sign_dy, denom)
        pos = tuple(i - 1 for i in index)
        for mono, c in coeff.items():
            arr = out.get(mono)
            if arr is None:
                arr = np.full((n,) * (k + s * r), Fraction(0), dtype=object)
                out[mono] = arr
            arr[pos] = c * factor
    return out


def _collect_psi(psi_terms, part, sigmas, alpha, k, r, factor):
    """Add the dw-coefficients produced by B_alpha X_alpha."""
    data = part.data
    if data is None:
        return
    degrees = part.shape.bosonic
    for pos in np.ndindex(data.shape):
        value = data[pos]
        if value == 0:
            continue
        index = [p + 1 for p in pos]
        dx_idx = index[: k - 1]
        offset = k - 1
        dys = []
        omega_key = None
        for l, deg in enumerate(degrees, start=1):
            group = tuple(sorted(index[offset:offset + deg]))
            offset += deg
            if l == alpha:
                omega_key = (sigmas[l - 1], group)
            else:
                dys.append(DY(sigmas[l - 1], group))
        sign, word = sort_word(dys + [DX(i) for i in dx_idx])
        if sign:
            _add_term(psi_terms.setdefault(omega_key, {}), word, factor * (value * sign))


# -- rendering and parsing ---------------------------------------------------------


def render_symbol(s) -> str:
    if is_dx(s):
        return f"dx{s[1]}"
    sigma, J = fibre_of(s)
    head = ("dy" if is_dy(s) else "w") + str(sigma)
    return head if not J else head + "_[" + " ".join(map(str, J)) + "]"


def render(rho: DiffForm) -> str:
    if not rho._terms:
        return "0"
    out = ""
    for word in sorted(rho._terms):
        coeff = rho._terms[word]
        symbols = " /\\ ".join(render_symbol(s) for s in word)
        negative = len(coeff._terms) == 1 and next(iter(coeff._terms.values())) < 0
        mag = -coeff if negative else coeff
        if not word:
            body = render_expr(mag)
        elif mag == 1:
            body = symbols
        elif len(mag._terms) == 1:
            body = f"{render_expr(mag)}*{symbols}"
        else:
            body = f"({render_expr(mag)})*{symbols}"
        if not out:
            out = ("-" if negative else "") + body
        else:
            out += (" - " if negative else " + ") + body
    return out


def parse_form(text: str, spec: JetSpec) -> DiffForm:
    from .grammar import FormParser

    return FormParser(text, spec).parse_form()
