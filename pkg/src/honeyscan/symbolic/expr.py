"""Word-level helpers over the engine's value representation.

Stack words are either Python ints in ``[0, 2**256)`` or 256-bit z3
bit-vector terms. Concrete arithmetic stays in Python; anything touching a
symbol becomes a simplified z3 term.
"""

from __future__ import annotations

import z3

WORD_BITS = 256
MOD = 1 << WORD_BITS
MASK = MOD - 1
SIGN_BIT = 1 << (WORD_BITS - 1)
ADDRESS_MASK = (1 << 160) - 1
BYTE_MASK = 0xFF


class Traced(int):
    """A concrete word that remembers the instruction that produced it.

    Only MUL/ADD results and 8-bit truncations of them are traced; ordinary
    arithmetic on a Traced value yields a plain int again.
    """

    def __new__(cls, value: int, op: str, pc: int, source: "Traced | None" = None):
        obj = super().__new__(cls, value)
        obj.op = op
        obj.pc = pc
        obj.source = source
        return obj

    def __repr__(self) -> str:
        return f"Traced({int(self)}, {self.op}@{self.pc})"


def is_concrete(v) -> bool:
    return isinstance(v, int)


def bv(v) -> z3.BitVecRef:
    if isinstance(v, int):
        return z3.BitVecVal(int(v) & MASK, WORD_BITS)
    return v


def norm(e):
    """Simplify a term, collapsing numerals back to Python ints."""
    if isinstance(e, int):
        return e & MASK if not isinstance(e, Traced) else e
    e = z3.simplify(e)
    if z3.is_bv_value(e):
        return e.as_long()
    return e


def to_signed(v: int) -> int:
    return v - MOD if v & SIGN_BIT else v


def to_unsigned(v: int) -> int:
    return v & MASK


def nonzero(v) -> z3.BoolRef | bool:
    if isinstance(v, int):
        return v != 0
    return z3.simplify(v != 0)


def iszero(v) -> z3.BoolRef | bool:
    if isinstance(v, int):
        return v == 0
    return z3.simplify(v == 0)


def bool_to_word(b):
    if isinstance(b, bool):
        return int(b)
    b = z3.simplify(b)
    if z3.is_true(b):
        return 1
    if z3.is_false(b):
        return 0
    return z3.If(b, z3.BitVecVal(1, WORD_BITS), z3.BitVecVal(0, WORD_BITS))


def same(a, b) -> bool:
    """Structural equality after simplification."""
    if isinstance(a, int) and isinstance(b, int):
        return int(a) == int(b)
    a, b = norm(bv(a)), norm(bv(b))
    if isinstance(a, int) or isinstance(b, int):
        return isinstance(a, int) and isinstance(b, int) and a == b
    return a.eq(b)


def constants(e) -> set[str]:
    """Names of the free (uninterpreted, nullary) symbols of a term."""
    if isinstance(e, (int, bool)) or e is None:
        return set()
    return {d.name() for d in _consts(e)}


def _consts(e):
    out = []
    seen = set()
    todo = [e]
    while todo:
        t = todo.pop()
        tid = t.get_id()
        if tid in seen:
            continue
        seen.add(tid)
        if z3.is_const(t) and t.decl().kind() == z3.Z3_OP_UNINTERPRETED:
            out.append(t.decl())
        else:
            todo.extend(t.children())
    return out


def subterms(e):
    if isinstance(e, (int, bool)) or e is None:
        return
    seen = set()
    todo = [e]
    while todo:
        t = todo.pop()
        if t.get_id() in seen:
            continue
        seen.add(t.get_id())
        yield t
        todo.extend(t.children())


def contains(haystack, needle) -> bool:
    if isinstance(needle, int) or isinstance(haystack, int):
        return isinstance(needle, int) and isinstance(haystack, int) and int(needle) == int(haystack)
    nid = needle.get_id()
    return any(t.get_id() == nid for t in subterms(haystack))


def strip_address(e):
    """Remove the zero-extension / 160-bit masking compilers wrap addresses in.

    ``Concat(0, x)`` with a 160-bit ``x`` and ``Extract(159, 0, y)`` both peel
    down to the underlying symbol so that masked and unmasked reads compare equal.
    """
    if isinstance(e, int):
        return e & ADDRESS_MASK
    while True:
        if z3.is_app_of(e, z3.Z3_OP_CONCAT) and e.num_args() == 2:
            hi, lo = e.arg(0), e.arg(1)
            if z3.is_bv_value(hi) and hi.as_long() == 0:
                e = lo
                continue
        if z3.is_app_of(e, z3.Z3_OP_EXTRACT):
            hi_bit, lo_bit = e.params()
            if lo_bit == 0 and hi_bit >= 159:
                e = e.arg(0)
                continue
        if z3.is_app_of(e, z3.Z3_OP_ZERO_EXT):
            e = e.arg(0)
            continue
        if z3.is_app_of(e, z3.Z3_OP_BAND) and e.num_args() == 2:
            a, b = e.arg(0), e.arg(1)
            if z3.is_bv_value(a) and a.as_long() == ADDRESS_MASK:
                e = b
                continue
            if z3.is_bv_value(b) and b.as_long() == ADDRESS_MASK:
                e = a
                continue
        return e


def is_symbol(e, name: str) -> bool:
    if isinstance(e, int):
        return False
    e = strip_address(e)
    return z3.is_const(e) and e.decl().kind() == z3.Z3_OP_UNINTERPRETED and e.decl().name() == name
