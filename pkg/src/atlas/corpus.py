"""Named (root datum, c_s) pairs used by the test suite and the CLI examples.

Each character datum is a list of rational vectors mu, read as the point
with <alpha_i, t> = exp(2 pi i mu_i) on the simple roots.
"""
from dataclasses import dataclass
from fractions import Fraction as F
from functools import lru_cache

from .rootdata import build_root_datum
from .torus import FiniteTorusSubgroup, identity_point, point_from_coweights


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    type_label: str
    isogeny: str
    coweights: tuple        # tuple of rational vectors

    @property
    def rd(self):
        return _rd(self.type_label, self.isogeny)

    @property
    def c_s(self):
        rd = self.rd
        pts = tuple(point_from_coweights(rd, mu) for mu in self.coweights)
        return FiniteTorusSubgroup(pts or (identity_point(rd.rank),))


@lru_cache(maxsize=None)
def _rd(label, iso):
    return build_root_datum(label, iso)


def _e(name, label, iso, *mus):
    return CorpusEntry(name, label, iso, tuple(tuple(F(x) for x in mu) for mu in mus))


h = F(1, 2)
CORPUS = (
    _e("pgl2-unramified", "A1", "ad"),
    _e("sl2-unramified", "A1", "sc"),
    _e("pgl2-quadratic", "A1", "ad", [h]),
    _e("sl2-quadratic", "A1", "sc", [h]),
    _e("sl3-zeta", "A2", "sc", [F(2, 3), F(2, 3)]),
    _e("pgl3-zeta", "A2", "ad", [F(1, 3), F(1, 3)]),
    _e("sl3-unramified", "A2", "sc"),
    _e("pgl3-unramified", "A2", "ad"),
    _e("pgl3-quadratic", "A2", "ad", [h, 0]),
    _e("sl4-unramified", "A3", "sc"),
    _e("pgl4-quadratic", "A3", "ad", [0, h, 0]),
    _e("spin5-unramified", "B2", "sc"),
    _e("so5-quadratic", "B2", "ad", [0, h]),
    _e("sp4-unramified", "C2", "sc"),
    _e("psp4-quadratic", "C2", "ad", [h, 0]),
    _e("sp4-quadratic", "C2", "sc", [0, h]),
    _e("spin7-unramified", "B3", "sc"),
    _e("sp6-quadratic", "C3", "sc", [0, 0, h]),
    _e("g2-unramified", "G2", "sc"),
    _e("g2-quadratic", "G2", "sc", [h, 0]),
    _e("g2-cubic", "G2", "sc", [F(1, 3), 0]),
    _e("a1xa1-unramified", "A1xA1", "ad"),
    _e("a1xa1-quadratic", "A1xA1", "ad", [h, h]),
    _e("a1xa1-klein", "A1xA1", "ad", [h, 0], [0, h]),
)


def corpus_entry(name):
    for e in CORPUS:
        if e.name == name:
            return e
    raise KeyError(name)


__all__ = ["CorpusEntry", "CORPUS", "corpus_entry"]
