"""Word problem for right-angled Coxeter groups.

Elements are stored as tuples of generator indices in ShortLex normal form
(shortest word, lexicographically first among commutation-equivalent
words).  Every generator is an involution, so inverses are reversed words.
"""

from __future__ import annotations

import heapq
from itertools import combinations
from typing import Iterable, Sequence

Word = tuple[int, ...]


class RacgGroup:
    """The right-angled Coxeter group of a finite simple graph.

    ``generators`` names the vertices of the defining graph; ``edges`` lists
    commuting pairs.  Generator order fixes the ShortLex order.
    """

    def __init__(self, generators: Sequence[str], edges: Iterable[tuple[str, str]] = ()):
        self.names = tuple(generators)
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate generator names")
        self.index = {name: i for i, name in enumerate(self.names)}
        n = len(self.names)
        self.commutes = [[False] * n for _ in range(n)]
        for a, b in edges:
            i, j = self.index[a], self.index[b]
            if i == j:
                raise ValueError(f"loop at generator {a!r}")
            self.commutes[i][j] = self.commutes[j][i] = True
        self.free = not any(any(row) for row in self.commutes)

    @property
    def rank(self) -> int:
        return len(self.names)

    def dimension(self) -> int:
        """Size of a largest clique of the defining graph (dimension of the Davis complex)."""
        best = 1 if self.names else 0
        n = self.rank
        for k in range(2, n + 1):
            found = False
            for clique in combinations(range(n), k):
                if all(self.commutes[a][b] for a, b in combinations(clique, 2)):
                    found = True
                    break
            if not found:
                break
            best = k
        return best

    # -- words ---------------------------------------------------------

    def parse(self, text: str | Sequence[str]) -> Word:
        """Normal form of a word given as a string of one-letter names or a name list."""
        if isinstance(text, str):
            text = [] if text in ("", "1") else list(text)
        return self.normal_form(self.index[s] for s in text)

    def format(self, word: Word) -> str:
        return "".join(self.names[s] for s in word) or "1"

    def append(self, word: Word, s: int) -> Word:
        """Normal form of ``word * s`` for ``word`` already in normal form."""
        if self.free:
            return word[:-1] if word and word[-1] == s else word + (s,)
        comm = self.commutes[s]
        # cancellation: rightmost s reachable through commuting letters.  That
        # letter commutes with everything after it, so removing it changes no
        # other choice of the greedy lex-first ordering and the rest stays put.
        for i in range(len(word) - 1, -1, -1):
            t = word[i]
            if t == s:
                return word[:i] + word[i + 1:]
            if not comm[t]:
                break
        # s may sit anywhere after the last letter it fails to commute with;
        # the first slot in that range preceding a larger letter is lex-least
        lo = len(word)
        while lo > 0 and comm[word[lo - 1]]:
            lo -= 1
        j = lo
        while j < len(word) and word[j] < s:
            j += 1
        return word[:j] + (s,) + word[j:]

    def _relex(self, word: Word) -> Word:
        # lexicographically first linear extension of a reduced trace:
        # repeatedly emit the smallest letter with no pending non-commuting predecessor
        n = len(word)
        succ: list[list[int]] = [[] for _ in range(n)]
        blocked = [0] * n
        for j in range(n):
            cj = self.commutes[word[j]]
            for i in range(j):
                if not cj[word[i]]:
                    succ[i].append(j)
                    blocked[j] += 1
        ready = [(word[i], i) for i in range(n) if not blocked[i]]
        heapq.heapify(ready)
        out = []
        while ready:
            t, i = heapq.heappop(ready)
            out.append(t)
            for j in succ[i]:
                blocked[j] -= 1
                if not blocked[j]:
                    heapq.heappush(ready, (word[j], j))
        return tuple(out)

    def prepend(self, s: int, word: Word) -> Word:
        """Normal form of ``s * word`` for ``word`` already in normal form."""
        if self.free:
            return word[1:] if word and word[0] == s else (s,) + word
        comm = self.commutes[s]
        for i, t in enumerate(word):
            if t == s:
                return self._relex(word[:i] + word[i + 1:])
            if not comm[t]:
                break
        return self._relex((s,) + word)

    def normal_form(self, letters: Iterable[int]) -> Word:
        word: Word = ()
        for s in letters:
            word = self.append(word, s)
        return word

    def multiply(self, u: Word, v: Word) -> Word:
        for s in v:
            u = self.append(u, s)
        return u

    def inverse(self, w: Word) -> Word:
        return self.normal_form(reversed(w))

    def power(self, w: Word, n: int) -> Word:
        base = w if n >= 0 else self.inverse(w)
        out: Word = ()
        for _ in range(abs(n)):
            out = self.multiply(out, base)
        return out

    def length(self, w: Word) -> int:
        return len(w)

    def distance(self, u: Word, v: Word) -> int:
        """Word-metric distance, equal to the combinatorial distance in the Davis complex."""
        return len(self.multiply(self.inverse(u), v))

    def reflection(self, g: Word, s: int) -> Word:
        """The reflection ``g s g^-1`` whose wall is crossed by the edge ``(g, g s)``."""
        if self.free:
            # g s g^-1 is already freely reduced when g s is reduced
            if g and g[-1] == s:
                g = g[:-1]
            return g + (s,) + g[::-1]
        return self.multiply(self.append(g, s), self.inverse(g))

    def is_reduced(self, letters: Sequence[int]) -> bool:
        return len(self.normal_form(letters)) == len(letters)
