"""Named axiom schemes of the strong-Löb family, as instance builders.

Every builder takes a language mode so box principles read the box as
``top ~>`` in the arrow languages.  Schemes that mention the Lewis arrow have
no box-language form; for the box logic, instantiate in arrow mode and carry
the result over with the ``lb`` translation.
"""

from __future__ import annotations

from . import syntax
from .errors import ModeError
from .syntax import And, Arrow, Formula, Iff, Imp, box_in

ARROW_ONLY = ("s_a", "w", "l_a", "tr", "k", "di", "box_a", "four_a", "p", "m")


def _need_arrow(mode: str, name: str):
    if mode == syntax.BOX:
        raise ModeError(f"scheme {name} mentions the Lewis arrow; "
                        "instantiate in arrow mode and translate")


def sl(phi: Formula, mode: str) -> Formula:
    return Imp(Imp(box_in(mode, phi), phi), phi)


def s_box(phi: Formula, mode: str) -> Formula:
    return Imp(phi, box_in(mode, phi))


def s_a(phi: Formula, psi: Formula, mode: str) -> Formula:
    _need_arrow(mode, "s_a")
    return Imp(Imp(phi, psi), Arrow(phi, psi))


def l_box(phi: Formula, mode: str) -> Formula:
    b = lambda f: box_in(mode, f)
    return Imp(b(Imp(b(phi), phi)), b(phi))


def l_a(phi: Formula, mode: str) -> Formula:
    _need_arrow(mode, "l_a")
    return Arrow(Imp(box_in(mode, phi), phi), phi)


def w(phi: Formula, psi: Formula, mode: str) -> Formula:
    _need_arrow(mode, "w")
    return Imp(Arrow(And(phi, box_in(mode, psi)), psi), Arrow(phi, psi))


def box_a(chi: Formula, phi: Formula, psi: Formula, mode: str) -> Formula:
    _need_arrow(mode, "box_a")
    return Imp(Arrow(And(chi, phi), psi), Arrow(chi, Imp(phi, psi)))


def tr(phi: Formula, psi: Formula, chi: Formula, mode: str) -> Formula:
    _need_arrow(mode, "tr")
    return Imp(And(Arrow(phi, psi), Arrow(psi, chi)), Arrow(phi, chi))


def k(phi: Formula, psi: Formula, chi: Formula, mode: str) -> Formula:
    _need_arrow(mode, "k")
    return Imp(And(Arrow(phi, psi), Arrow(phi, chi)), Arrow(phi, And(psi, chi)))


def di(phi: Formula, psi: Formula, chi: Formula, mode: str) -> Formula:
    _need_arrow(mode, "di")
    return Imp(And(Arrow(phi, chi), Arrow(psi, chi)),
               Arrow(syntax.Or(phi, psi), chi))


def four_box(phi: Formula, mode: str) -> Formula:
    return Imp(box_in(mode, phi), box_in(mode, box_in(mode, phi)))


def four_a(phi: Formula, mode: str) -> Formula:
    _need_arrow(mode, "four_a")
    return Arrow(phi, box_in(mode, phi))


def montagna(phi: Formula, psi: Formula, chi: Formula, mode: str) -> Formula:
    _need_arrow(mode, "m")
    b = box_in(mode, chi)
    return Imp(Arrow(phi, psi), Arrow(Imp(b, phi), Imp(b, psi)))


def _dot(phi: Formula, mode: str) -> Formula:
    return And(phi, box_in(mode, phi))


def su0(chi: Formula, r: str, phi: Formula, psi: Formula, mode: str) -> Formula:
    sub = syntax.substitute
    return Imp(box_in(mode, Iff(phi, psi)),
               box_in(mode, Iff(sub(chi, r, phi), sub(chi, r, psi))))


def su1(chi: Formula, r: str, phi: Formula, psi: Formula, mode: str) -> Formula:
    sub = syntax.substitute
    return Imp(_dot(Iff(phi, psi), mode),
               _dot(Iff(sub(chi, r, phi), sub(chi, r, psi)), mode))


def su2(chi: Formula, r: str, phi: Formula, psi: Formula, mode: str) -> Formula:
    # chi is expected to be modalized in r
    sub = syntax.substitute
    return Imp(box_in(mode, Iff(phi, psi)),
               Iff(sub(chi, r, phi), sub(chi, r, psi)))


def su3(chi: Formula, r: str, phi: Formula, psi: Formula, mode: str) -> Formula:
    sub = syntax.substitute
    return Imp(Iff(phi, psi), Iff(sub(chi, r, phi), sub(chi, r, psi)))


def u0(chi: Formula, r: str, phi: Formula, psi: Formula, mode: str) -> Formula:
    sub = syntax.substitute
    b = lambda f: box_in(mode, f)
    return Imp(And(b(Iff(phi, sub(chi, r, phi))), b(Iff(psi, sub(chi, r, psi)))),
               b(Iff(phi, psi)))


def u1(chi: Formula, r: str, phi: Formula, psi: Formula, mode: str) -> Formula:
    sub = syntax.substitute
    return Imp(And(_dot(Iff(phi, sub(chi, r, phi)), mode),
                   _dot(Iff(psi, sub(chi, r, psi)), mode)),
               _dot(Iff(phi, psi), mode))


def u2(chi: Formula, r: str, phi: Formula, psi: Formula, mode: str) -> Formula:
    sub = syntax.substitute
    return Imp(And(_dot(Iff(phi, sub(chi, r, phi)), mode),
                   _dot(Iff(psi, sub(chi, r, psi)), mode)),
               Iff(phi, psi))


def su_strong(chi: Formula, r: str, phi: Formula, psi: Formula) -> Formula:
    sub = syntax.substitute
    return Imp(And(Iff(phi, sub(chi, r, phi)), Iff(psi, sub(chi, r, psi))),
               Iff(phi, psi))


def top_f(chi: Formula, r: str) -> Formula:
    sub = syntax.substitute
    top_inst = sub(chi, r, syntax.Top)
    return Iff(top_inst, sub(chi, r, top_inst))
