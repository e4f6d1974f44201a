"""Normal forms for free groups, Z^d and finite table groups, and the real group ring.

Group elements are plain hashable keys whose shape depends on the strategy:

* ``free``    -- tuple of nonzero ints, ``+(i+1)`` for generator ``i`` and
  ``-(i+1)`` for its inverse, freely reduced;
* ``abelian`` -- tuple of ``d`` integer exponents;
* ``table``   -- an index into the multiplication table.

Equal group elements always have equal keys, so keys can be used directly
as dictionary keys in :class:`GroupRingElement`.
"""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Hashable, Iterable

from .errors import GroupMismatch, InvalidGroup, NoNormalForm, UnknownSymbol

GroupElement = Hashable

STRATEGIES = ("free", "abelian", "table")


@dataclass(frozen=True, eq=False)
class GroupDescriptor:
    generators: tuple[str, ...]
    relators: tuple[str, ...] = ()
    normal_form: str = "free"
    table: tuple[tuple[int, ...], ...] | None = None
    generator_elements: tuple[int, ...] | None = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "relators", tuple(self.relators))
        if len(set(self.generators)) != len(self.generators):
            raise InvalidGroup(f"duplicate generator symbols in {self.generators}")
        for g in self.generators:
            if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", g):
                raise InvalidGroup(f"invalid generator symbol {g!r}")
        if self.normal_form not in STRATEGIES:
            raise InvalidGroup(f"unknown normal form {self.normal_form!r}")
        if self.normal_form == "table":
            if self.table is None:
                raise InvalidGroup("table strategy needs a multiplication table")
            tab = tuple(tuple(int(x) for x in row) for row in self.table)
            object.__setattr__(self, "table", tab)
            gens = self.generator_elements
            if gens is None:
                gens = tuple(i + 1 for i in range(len(self.generators)))
            object.__setattr__(self, "generator_elements", tuple(int(x) for x in gens))
            if len(self.generator_elements) != len(self.generators):
                raise InvalidGroup("generator_elements must list one index per generator")
            _validate_table(tab, self.generator_elements)
        # relators must at least be words over the declared alphabet
        for r in self.relators:
            self.letters_of_word(r)

    # equality by value, but cheap identity fast-path
    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, GroupDescriptor):
            return NotImplemented
        return (self.generators, self.relators, self.normal_form, self.table,
                self.generator_elements) == (other.generators, other.relators,
                                             other.normal_form, other.table,
                                             other.generator_elements)

    def __hash__(self):
        return hash((self.generators, self.relators, self.normal_form, self.table))

    def __repr__(self):
        label = self.name or "/".join(self.generators)
        return f"GroupDescriptor({label!r}, {self.normal_form})"

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def is_finite(self) -> bool:
        return self.normal_form == "table"

    @property
    def has_normal_form(self) -> bool:
        return not (self.normal_form == "free" and self.relators)

    def _require_normal_form(self):
        if not self.has_normal_form:
            raise NoNormalForm(
                f"{self!r}: free strategy with relators is a general finitely presented "
                "group; no normal form is available")

    # ---- core arithmetic on keys -------------------------------------------------

    @cached_property
    def identity(self) -> GroupElement:
        if self.normal_form == "free":
            return ()
        if self.normal_form == "abelian":
            return (0,) * self.rank
        return _table_identity(self.table)

    @cached_property
    def _table_inverse(self):
        e = self.identity
        inv = [0] * len(self.table)
        for a, row in enumerate(self.table):
            inv[a] = row.index(e)
        return tuple(inv)

    def mul(self, a: GroupElement, b: GroupElement) -> GroupElement:
        nf = self.normal_form
        if nf == "free":
            if not a:
                return b
            if not b:
                return a
            k = 0
            n = min(len(a), len(b))
            while k < n and a[-1 - k] == -b[k]:
                k += 1
            return a[:len(a) - k] + b[k:]
        if nf == "abelian":
            return tuple(x + y for x, y in zip(a, b))
        return self.table[a][b]

    def inv(self, a: GroupElement) -> GroupElement:
        nf = self.normal_form
        if nf == "free":
            return tuple(-x for x in reversed(a))
        if nf == "abelian":
            return tuple(-x for x in a)
        return self._table_inverse[a]

    def generator(self, i: int, sign: int = 1) -> GroupElement:
        nf = self.normal_form
        if nf == "free":
            return ((i + 1) * sign,)
        if nf == "abelian":
            v = [0] * self.rank
            v[i] = sign
            return tuple(v)
        g = self.generator_elements[i]
        return g if sign > 0 else self._table_inverse[g]

    @cached_property
    def letters(self) -> tuple[tuple[int, int], ...]:
        """Alphabet S u S^-1 in tie-break order s1, s1^-1, s2, s2^-1, ..."""
        return tuple((i, s) for i in range(self.rank) for s in (1, -1))

    # ---- words --------------------------------------------------------------------

    @cached_property
    def _token_re(self):
        syms = sorted(self.generators, key=len, reverse=True)
        alt = "|".join(re.escape(s) for s in syms) if syms else r"(?!x)x"
        return re.compile(rf"\s*(?:({alt})(?:\^\(?(-?\d+)\)?)?|([*·]))\s*")

    def letters_of_word(self, word: str) -> list[tuple[int, int]]:
        """Parse ``word`` into (generator index, exponent) pairs."""
        w = word.strip()
        if w in ("", "e", "1") and w not in self.generators:
            return []
        out = []
        pos = 0
        while pos < len(w):
            m = self._token_re.match(w, pos)
            if not m or m.end() == pos:
                raise UnknownSymbol(f"cannot parse {word!r} at position {pos}")
            pos = m.end()
            if m.group(1) is None:
                continue
            exp = int(m.group(2)) if m.group(2) is not None else 1
            out.append((self.generators.index(m.group(1)), exp))
        return out

    def element_from_letters(self, letters: Iterable[tuple[int, int]]) -> GroupElement:
        self._require_normal_form()
        x = self.identity
        for i, e in letters:
            if e == 0:
                continue
            step = self.generator(i, 1 if e > 0 else -1)
            for _ in range(abs(e)):
                x = self.mul(x, step)
        return x

    def normalize(self, word: str) -> GroupElement:
        return self.element_from_letters(self.letters_of_word(word))

    def word_letters(self, key: GroupElement) -> list[tuple[int, int]]:
        """A word (as unit letters) representing ``key``; shortest for table groups."""
        nf = self.normal_form
        if nf == "free":
            return [(abs(x) - 1, 1 if x > 0 else -1) for x in key]
        if nf == "abelian":
            return [(i, 1 if e > 0 else -1) for i, e in enumerate(key) for _ in range(abs(e))]
        return list(self._table_words[key])

    def word(self, key: GroupElement) -> str:
        """Canonical string for ``key`` that :meth:`normalize` parses back."""
        letters = self.word_letters(key)
        if not letters:
            return "e" if "e" not in self.generators else "1"
        parts = []
        for i, s in letters:
            if parts and parts[-1][0] == i and (parts[-1][1] > 0) == (s > 0):
                parts[-1][1] += s
            else:
                parts.append([i, s])
        return " ".join(self.generators[i] if e == 1 else f"{self.generators[i]}^{e}"
                        for i, e in parts)

    def length(self, key: GroupElement) -> int:
        nf = self.normal_form
        if nf == "free":
            return len(key)
        if nf == "abelian":
            return sum(abs(x) for x in key)
        return len(self._table_words[key])

    def sort_key(self, key: GroupElement):
        if self.normal_form == "table":
            return (self.length(key), key)
        return (self.length(key), key)

    # ---- finite table helpers ------------------------------------------------------

    @cached_property
    def _table_words(self) -> dict:
        words = {self.identity: ()}
        queue = deque([self.identity])
        while queue:
            g = queue.popleft()
            for i, s in self.letters:
                h = self.mul(g, self.generator(i, s))
                if h not in words:
                    words[h] = words[g] + ((i, s),)
                    queue.append(h)
        if len(words) != len(self.table):
            raise InvalidGroup("declared generators do not generate the table group")
        return words

    @cached_property
    def order(self) -> int | None:
        return len(self.table) if self.normal_form == "table" else None

    @cached_property
    def diameter(self) -> int | None:
        if self.normal_form != "table":
            return None
        return max(len(w) for w in self._table_words.values())

    def elements(self) -> list[GroupElement]:
        if self.normal_form != "table":
            raise InvalidGroup("only finite groups can list their elements")
        return ball(self, self.diameter)

    # ---- serialization --------------------------------------------------------------

    def to_json(self) -> dict:
        d = {"name": self.name, "generators": list(self.generators),
             "relators": list(self.relators), "normal_form": self.normal_form}
        if self.table is not None:
            d["table"] = [list(r) for r in self.table]
            d["generator_elements"] = list(self.generator_elements)
        return d

    @classmethod
    def from_json(cls, d: dict) -> "GroupDescriptor":
        nf = d.get("normal_form", "free")
        if nf not in STRATEGIES:
            raise InvalidGroup(f"unknown normal form {nf!r}")
        table = d.get("table")
        return cls(generators=tuple(d["generators"]), relators=tuple(d.get("relators", ())),
                   normal_form=nf,
                   table=tuple(tuple(r) for r in table) if table is not None else None,
                   generator_elements=tuple(d["generator_elements"])
                   if d.get("generator_elements") is not None else None,
                   name=d.get("name", ""))


def load_group(path) -> GroupDescriptor:
    with open(path) as fh:
        return GroupDescriptor.from_json(json.load(fh))


def _table_identity(table):
    n = len(table)
    for e in range(n):
        if all(table[e][x] == x and table[x][e] == x for x in range(n)):
            return e
    raise InvalidGroup("multiplication table has no identity")


def _validate_table(table, gens):
    n = len(table)
    if n == 0 or any(len(row) != n for row in table):
        raise InvalidGroup("multiplication table must be square and nonempty")
    full = set(range(n))
    for row in table:
        if set(row) != full:
            raise InvalidGroup("table rows must be permutations (Latin square)")
    for j in range(n):
        if {table[i][j] for i in range(n)} != full:
            raise InvalidGroup("table columns must be permutations (Latin square)")
    _table_identity(table)
    for a in range(n):
        ta = table[a]
        for b in range(n):
            ab = ta[b]
            tb = table[b]
            for c in range(n):
                if table[ab][c] != ta[tb[c]]:
                    raise InvalidGroup(f"table is not associative at ({a},{b},{c})")
    for g in gens:
        if not 0 <= g < n:
            raise InvalidGroup(f"generator element index {g} out of range")


# ---- constructors for the standard desk-scale groups ----------------------------------

_DEFAULT_NAMES = ("s", "t", "u", "v", "w")


def default_generator_names(d: int) -> tuple[str, ...]:
    if d <= len(_DEFAULT_NAMES):
        return _DEFAULT_NAMES[:d]
    return tuple(f"s{i + 1}" for i in range(d))


def free_abelian(d: int, names=None, with_relators=True) -> GroupDescriptor:
    names = tuple(names) if names else default_generator_names(d)
    rels = ()
    if with_relators:
        rels = tuple(f"{a} {b} {a}^-1 {b}^-1" for i, a in enumerate(names) for b in names[i + 1:])
    return GroupDescriptor(names, rels, "abelian", name=f"Z^{d}" if d > 1 else "Z")


def free_group(rank: int, names=None) -> GroupDescriptor:
    names = tuple(names) if names else default_generator_names(rank)
    return GroupDescriptor(names, (), "free", name=f"F_{rank}")


def cyclic(n: int, name="s") -> GroupDescriptor:
    table = tuple(tuple((i + j) % n for j in range(n)) for i in range(n))
    return GroupDescriptor((name,), (f"{name}^{n}",), "table", table, (1 % n,), name=f"C{n}")


def symmetric3() -> GroupDescriptor:
    """S3 generated by the transpositions s = (0 1) and t = (1 2)."""
    from itertools import permutations
    perms = list(permutations(range(3)))
    index = {p: i for i, p in enumerate(perms)}
    table = tuple(tuple(index[tuple(p[q[k]] for k in range(3))] for q in perms) for p in perms)
    s = index[(1, 0, 2)]
    t = index[(0, 2, 1)]
    return GroupDescriptor(("s", "t"), ("s^2", "t^2", "s t s t s t"), "table", table, (s, t),
                           name="S3")


# ---- balls ------------------------------------------------------------------------------

def ball(g: GroupDescriptor, radius: int) -> list[GroupElement]:
    """Elements of word length <= radius, breadth first, ties by generator index."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    g._require_normal_form()
    seen = {g.identity}
    out = [g.identity]
    frontier = [g.identity]
    steps = [g.generator(i, s) for i, s in g.letters]
    for _ in range(radius):
        nxt = []
        for x in frontier:
            for st in steps:
                y = g.mul(x, st)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        out.extend(nxt)
        frontier = nxt
        if not nxt:
            break
    return out


def normalize(word: str, g: GroupDescriptor) -> GroupElement:
    return g.normalize(word)


# ---- group ring -------------------------------------------------------------------------

def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12)
    return Fraction(x)


class GroupRingElement:
    """Finitely supported element of R[G] with exact rational coefficients."""

    __slots__ = ("group", "coeffs")

    def __init__(self, group: GroupDescriptor, coeffs=None):
        self.group = group
        clean = {}
        if coeffs:
            for k, v in coeffs.items():
                v = _frac(v)
                if v:
                    clean[k] = v
        self.coeffs = clean

    @classmethod
    def _raw(cls, group, coeffs):
        obj = cls.__new__(cls)
        obj.group = group
        obj.coeffs = coeffs
        return obj

    @classmethod
    def zero(cls, group):
        return cls._raw(group, {})

    @classmethod
    def one(cls, group, value=1):
        return cls(group, {group.identity: value})

    @classmethod
    def from_element(cls, group, key, value=1):
        return cls(group, {key: value})

    @classmethod
    def parse(cls, group, text: str) -> "GroupRingElement":
        return parse_element(group, text)

    # -- basic protocol
    def __bool__(self):
        return bool(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, key) -> Fraction:
        return self.coeffs.get(key, Fraction(0))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = GroupRingElement.one(self.group, other)
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return self.group == other.group and self.coeffs == other.coeffs

    __hash__ = None

    def _check(self, other):
        if self.group is not other.group and self.group != other.group:
            raise GroupMismatch(f"{self.group!r} vs {other.group!r}")

    def _coerce(self, other):
        if isinstance(other, GroupRingElement):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return GroupRingElement.one(self.group, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            s = out.get(k, 0) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return GroupRingElement._raw(self.group, out)

    __radd__ = __add__

    def __neg__(self):
        return GroupRingElement._raw(self.group, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "GroupRingElement":
        c = _frac(c)
        if not c:
            return GroupRingElement.zero(self.group)
        return GroupRingElement._raw(self.group, {k: v * c for k, v in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        self._check(other)
        g = self.group
        out = {}
        for a, x in self.coeffs.items():
            for b, y in other.coeffs.items():
                k = g.mul(a, b)
                s = out.get(k, 0) + x * y
                if s:
                    out[k] = s
                else:
                    out.pop(k, None)
        return GroupRingElement._raw(g, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def left_shift(self, key) -> "GroupRingElement":
        g = self.group
        return GroupRingElement._raw(g, {g.mul(key, k): v for k, v in self.coeffs.items()})

    def right_shift(self, key) -> "GroupRingElement":
        g = self.group
        return GroupRingElement._raw(g, {g.mul(k, key): v for k, v in self.coeffs.items()})

    def star(self) -> "GroupRingElement":
        g = self.group
        return GroupRingElement._raw(g, {g.inv(k): v for k, v in self.coeffs.items()})

    def augmentation(self) -> Fraction:
        return sum(self.coeffs.values(), Fraction(0))

    def norms(self) -> tuple[Fraction, Fraction]:
        l1 = sum((abs(v) for v in self.coeffs.values()), Fraction(0))
        l2 = sum((v * v for v in self.coeffs.values()), Fraction(0))
        return l1, l2

    def support(self) -> list:
        g = self.group
        return sorted(self.coeffs, key=g.sort_key)

    def support_radius(self) -> int:
        if not self.coeffs:
            return 0
        return max(self.group.length(k) for k in self.coeffs)

    def items(self):
        g = self.group
        return sorted(self.coeffs.items(), key=lambda kv: g.sort_key(kv[0]))

    def __str__(self):
        if not self.coeffs:
            return "0"
        g = self.group
        out = []
        for k, v in self.items():
            w = g.word(k)
            ident = k == g.identity
            sign = "-" if v < 0 else "+"
            a = abs(v)
            if ident:
                body = str(a)
            elif a == 1:
                body = w
            else:
                body = f"{a} {w}"
            out.append((sign, body))
        s = ("-" if out[0][0] == "-" else "") + out[0][1]
        for sign, body in out[1:]:
            s += f" {sign} {body}"
        return s

    def __repr__(self):
        return f"GR({self})"

    def to_json(self) -> list:
        g = self.group
        return [{"word": g.word(k), "value": str(v)} for k, v in self.items()]

    @classmethod
    def from_json(cls, group, data) -> "GroupRingElement":
        out = cls.zero(group)
        for c in data:
            out = out + cls.from_element(group, group.normalize(c["word"]), Fraction(c["value"]))
        return out


_TERM_SPLIT = re.compile(r"(?<![\^(])\s*([+-])\s*")


def parse_element(group: GroupDescriptor, text: str) -> GroupRingElement:
    """Parse expressions such as ``"2 - s - s^-1"`` or ``"1/2 s t - 3"``."""
    text = text.strip()
    if not text:
        return GroupRingElement.zero(group)
    if text[0] not in "+-":
        text = "+" + text
    pieces = _TERM_SPLIT.split(text)
    # split yields ['', sign, term, sign, term, ...]
    out = {}
    for sign, term in zip(pieces[1::2], pieces[2::2]):
        m = re.match(r"\s*(\d+(?:/\d+)?)?\s*\*?\s*(.*)$", term)
        coef = Fraction(m.group(1)) if m.group(1) else Fraction(1)
        rest = m.group(2).strip()
        if sign == "-":
            coef = -coef
        key = group.normalize(rest) if rest else group.identity
        out[key] = out.get(key, 0) + coef
    return GroupRingElement(group, out)


def gr_mul(a: GroupRingElement, b: GroupRingElement) -> GroupRingElement:
    return a * b


def star(a: GroupRingElement) -> GroupRingElement:
    return a.star()


def augmentation(a: GroupRingElement) -> Fraction:
    return a.augmentation()


def norms(a: GroupRingElement) -> tuple[Fraction, Fraction]:
    return a.norms()
