"""Union-find and ground congruence closure."""

from __future__ import annotations

from typing import Dict, Hashable, Iterable, List

from .syntax import App, Term


class UnionFind:
    def __init__(self, items: Iterable[Hashable] = ()):
        self.parent: Dict[Hashable, Hashable] = {}
        for x in items:
            self.add(x)

    def add(self, x) -> None:
        if x not in self.parent:
            self.parent[x] = x

    def find(self, x):
        self.add(x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True

    def same(self, a, b) -> bool:
        return self.find(a) == self.find(b)

    def classes(self) -> List[list]:
        groups: Dict[Hashable, list] = {}
        for x in self.parent:
            groups.setdefault(self.find(x), []).append(x)
        return list(groups.values())


class CongruenceClosure:
    """Congruence closure over a finite, subterm-closed set of terms.

    Variables are treated as uninterpreted constants.
    """

    def __init__(self, terms: Iterable[Term] = ()):
        self.uf = UnionFind()
        self.apps: List[App] = []
        for t in terms:
            self.add_term(t)

    def add_term(self, t: Term) -> None:
        if t in self.uf.parent:
            return
        if isinstance(t, App):
            for a in t.args:
                self.add_term(a)
            if t.args:
                self.apps.append(t)
        self.uf.add(t)

    def merge(self, a: Term, b: Term) -> None:
        self.add_term(a)
        self.add_term(b)
        if self.uf.union(a, b):
            self._propagate()

    def _propagate(self) -> None:
        changed = True
        while changed:
            changed = False
            table: Dict[tuple, App] = {}
            for t in self.apps:
                key = (t.sym, tuple(self.uf.find(a) for a in t.args))
                other = table.setdefault(key, t)
                if other is not t and self.uf.union(other, t):
                    changed = True

    def equal(self, a: Term, b: Term) -> bool:
        if a == b:
            return True
        self.add_term(a)
        self.add_term(b)
        self._propagate()
        return self.uf.same(a, b)

    def find(self, t: Term):
        if t not in self.uf.parent:
            self.add_term(t)
            self._propagate()
        return self.uf.find(t)

    @property
    def terms(self) -> List[Term]:
        return list(self.uf.parent)
