"""
Genus-2 surface group: reduced words, the regular-octagon Fuchsian representation,
its principal lift to SL(4,R), bending deformations and the rep file format
"""
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from leafmap.config import DEFAULT_TOLERANCES, Tolerances
from leafmap.errors import BadDirection, BadRepresentation, LeafMapError, UnreducedWord
from leafmap.projlin import eigen_real, inverse_2x2, sym_cube

GENERATORS = ("a1", "b1", "a2", "b2")
# capital letter = inverse generator
LETTERS = ("a1", "A1", "b1", "B1", "a2", "A2", "b2", "B2")
IDENTITY_TOKEN = "e"


def invert_letter(letter: str) -> str:
    return letter.swapcase()


@dataclass(frozen=True)
class Word:
    """Freely reduced word in the generators, e.g. Word.parse("a1b1A1B1")."""
    letters: Tuple[str, ...] = ()

    def __post_init__(self):
        letters = tuple(self.letters)
        for letter in letters:
            if letter not in LETTERS:
                raise LeafMapError(f"unknown letter {letter!r}")
        for first, second in zip(letters, letters[1:]):
            if second == invert_letter(first):
                raise UnreducedWord(f"word {''.join(letters)} is not freely reduced")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, text: str) -> "Word":
        text = text.strip()
        if text in ("", IDENTITY_TOKEN):
            return cls(())
        if len(text) % 2:
            raise LeafMapError(f"cannot parse word {text!r}")
        return cls(tuple(text[i:i + 2] for i in range(0, len(text), 2)))

    def inverse(self) -> "Word":
        return Word(tuple(invert_letter(l) for l in reversed(self.letters)))

    def __mul__(self, other: "Word") -> "Word":
        """Concatenation followed by free reduction."""
        left = list(self.letters)
        right = list(other.letters)
        while left and right and right[0] == invert_letter(left[-1]):
            left.pop()
            right.pop(0)
        return Word(tuple(left + right))

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return "".join(self.letters) or IDENTITY_TOKEN


COMMUTATOR_CURVE = Word(("a1", "b1", "A1", "B1"))
RELATOR = Word(("a1", "b1", "A1", "B1", "a2", "b2", "A2", "B2"))

WordLike = Union[Word, str, Sequence[str]]


def as_word(w: WordLike) -> Word:
    if isinstance(w, Word):
        return w
    if isinstance(w, str):
        return Word.parse(w)
    return Word(tuple(w))


def word_count(max_len: int) -> int:
    """Number of nontrivial reduced words of length <= max_len."""
    return sum(8 * 7 ** (n - 1) for n in range(1, max_len + 1))


def iter_words(max_len: int) -> Iterator[Word]:
    """Reduced words by increasing length, lexicographic in LETTERS order within a length."""
    layer: List[Tuple[str, ...]] = [()]
    for _ in range(max_len):
        next_layer = []
        for letters in layer:
            for letter in LETTERS:
                if letters and letter == invert_letter(letters[-1]):
                    continue
                next_layer.append(letters + (letter,))
        for letters in next_layer:
            yield Word(letters)
        layer = next_layer


def enumerate_words(max_len: int) -> List[Word]:
    return list(iter_words(max_len))


@dataclass(frozen=True, eq=False)
class SurfaceRep:
    """Images of a1, b1, a2, b2 (and their inverses) in SL(2,R) or SL(4,R)."""
    gen_images: Dict[str, np.ndarray]
    inverses: Dict[str, np.ndarray]
    rank: int
    relator_residual: float
    meta: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_generators(cls, images: Dict[str, np.ndarray],
                        inverses: Optional[Dict[str, np.ndarray]] = None,
                        meta: Optional[Dict[str, Any]] = None,
                        tol: Tolerances = DEFAULT_TOLERANCES) -> "SurfaceRep":
        images = {g: np.asarray(images[g], dtype=float) for g in GENERATORS}
        rank = images["a1"].shape[0]
        if rank not in (2, 4) or any(m.shape != (rank, rank) for m in images.values()):
            raise BadRepresentation("generator images must all be 2x2 or all 4x4")
        for g, m in images.items():
            if abs(np.linalg.det(m) - 1.0) > tol.det * max(1.0, np.linalg.norm(m) ** rank):
                raise BadRepresentation(f"det of {g} differs from 1")
        if inverses is None:
            invert = inverse_2x2 if rank == 2 else np.linalg.inv
            inverses = {g: invert(m) for g, m in images.items()}
        rep = cls(gen_images=images, inverses=dict(inverses), rank=rank,
                  relator_residual=0.0, meta=dict(meta or {}))
        residual = relator_residual(rep)
        if residual > tol.relator:
            raise BadRepresentation(f"surface relator residual {residual:.3e} too large")
        object.__setattr__(rep, "relator_residual", residual)
        return rep

    def letter_image(self, letter: str) -> np.ndarray:
        if letter in self.gen_images:
            return self.gen_images[letter]
        return self.inverses[invert_letter(letter)]


def evaluate(rep: SurfaceRep, w: WordLike) -> np.ndarray:
    """Product of the letter images; the identity word gives the identity matrix."""
    result = np.eye(rep.rank)
    for letter in as_word(w).letters:
        result = result @ rep.letter_image(letter)
    return result


def evaluate_inverse(rep: SurfaceRep, w: WordLike) -> np.ndarray:
    """Inverse of evaluate(rep, w) as a product of stored inverses."""
    return evaluate(rep, as_word(w).inverse())


def relator_residual(rep: SurfaceRep) -> float:
    """
    Relative residual of [a1,b1][a2,b2] = I, compared as
    a1 b1 A1 B1 against B2 A2 b2 a2 to keep products short; the sign is free.
    """
    left = evaluate(rep, "a1b1A1B1")
    right = evaluate(rep, "b2a2B2A2")
    scale = max(1.0, np.linalg.norm(left))
    return float(min(np.linalg.norm(left - right), np.linalg.norm(left + right)) / scale)


# ---------------------------------------------------------------------------
# constructions

def _rotation(theta: float) -> np.ndarray:
    """Elliptic element of SL(2,R) rotating the upper half-plane about i by theta."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]])


def fuchsian_octagon_rep(tol: Tolerances = DEFAULT_TOLERANCES) -> SurfaceRep:
    """
    Side pairings of the regular octagon with interior angles pi/4.

    Side k is paired with side k+2 (mod 8, in blocks 0..3 and 4..7) by the
    translation along the axis through the centre in direction k*pi/4
    composed with a quarter turn. cosh of the centre-to-side distance is 1 + sqrt(2).
    """
    half_width = np.arccosh(1.0 + np.sqrt(2.0))
    shift = np.diag([np.exp(half_width), np.exp(-half_width)])
    quarter = _rotation(np.pi / 2)

    def pairing(k: int) -> np.ndarray:
        r = _rotation(k * np.pi / 4)
        return r @ shift @ r.T @ quarter

    images = {"a1": inverse_2x2(pairing(1)), "b1": pairing(0),
              "a2": inverse_2x2(pairing(5)), "b2": pairing(4)}
    return SurfaceRep.from_generators(images, meta={"kind": "fuchsian", "rank": 2}, tol=tol)


def lift_principal(rep2: SurfaceRep, tol: Tolerances = DEFAULT_TOLERANCES) -> SurfaceRep:
    """Compose with the irreducible representation SL(2,R) -> SL(4,R)."""
    if rep2.rank != 2:
        raise BadRepresentation("principal lift expects a rank 2 representation")
    images = {g: sym_cube(m, tol) for g, m in rep2.gen_images.items()}
    inverses = {g: sym_cube(m, tol) for g, m in rep2.inverses.items()}
    meta = dict(rep2.meta)
    meta["rank"] = 4
    return SurfaceRep.from_generators(images, inverses=inverses, meta=meta, tol=tol)


def bend(rep4: SurfaceRep, curve: WordLike, direction: Sequence[float], eps: float,
         tol: Tolerances = DEFAULT_TOLERANCES) -> SurfaceRep:
    """
    Bending along the separating curve [a1, b1].

    a2 and b2 are conjugated by exp(eps * diag(direction)) written in the
    eigenbasis of rho([a1, b1]), which commutes with the curve's image.
    """
    curve = as_word(curve)
    if curve != COMMUTATOR_CURVE:
        raise LeafMapError(f"bending is supported along {COMMUTATOR_CURVE} only")
    direction = np.asarray(direction, dtype=float)
    if direction.shape != (rep4.rank,):
        raise BadDirection(f"direction must have {rep4.rank} components")
    if abs(direction.sum()) > 1e-12:
        raise BadDirection("direction components must sum to 0")

    meta = dict(rep4.meta)
    meta.update({"kind": "bent", "eps": float(eps), "direction": direction.tolist(),
                 "curve": str(curve)})
    if eps == 0:
        return SurfaceRep.from_generators(rep4.gen_images, inverses=rep4.inverses,
                                          meta=meta, tol=tol)

    split = eigen_real(evaluate(rep4, curve), inverse=evaluate_inverse(rep4, curve), tol=tol)
    V = split.eigenvectors
    V_inv = np.linalg.inv(V)
    c = V @ np.diag(np.exp(eps * direction)) @ V_inv
    c_inv = V @ np.diag(np.exp(-eps * direction)) @ V_inv

    images = dict(rep4.gen_images)
    inverses = dict(rep4.inverses)
    for g in ("a2", "b2"):
        images[g] = c @ rep4.gen_images[g] @ c_inv
        inverses[g] = c @ rep4.inverses[g] @ c_inv
    return SurfaceRep.from_generators(images, inverses=inverses, meta=meta, tol=tol)


# ---------------------------------------------------------------------------
# rep file

def save_rep(rep: SurfaceRep, path: Path) -> Path:
    path = Path(path)
    payload = {
        "rank": rep.rank,
        "generators": [rep.gen_images[g].ravel().tolist() for g in GENERATORS],
        "meta": rep.meta,
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w') as f:
        json.dump(payload, f, indent=2)
    return path


def load_rep(path: Path, tol: Tolerances = DEFAULT_TOLERANCES) -> SurfaceRep:
    with open(path, 'r') as f:
        payload = json.load(f)
    rank = int(payload["rank"])
    generators = payload["generators"]
    if len(generators) != 4:
        raise BadRepresentation("rep file must list 4 generators")
    images = {g: np.asarray(vals, dtype=float).reshape(rank, rank)
              for g, vals in zip(GENERATORS, generators)}
    return SurfaceRep.from_generators(images, meta=payload.get("meta", {}), tol=tol)
