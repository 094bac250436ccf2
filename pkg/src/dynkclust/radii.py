"""Augmented AVL trees answering ball-growing radius queries.

For a point ``i`` and a facility cost ``lam``, the radius ``r_i`` is the
smallest ``r`` with ``sum_j w(j) * max(0, r - b*d(i, j)) >= lam``. Each point
keeps a tree over ``(b*d(i, j), j)`` with weight ``w(j)``; subtree mass, first
and second moments and the slack aggregate ``phi`` make the radius and the
associated connection cost logarithmic-time queries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from .errors import DuplicateId, NonpositiveLambda, UnknownId
from .metric import WeightedMetricSpace


class AugNode:
    __slots__ = ("d", "id", "q", "left", "right", "height",
                 "mass", "psi", "psi2", "phi", "lo", "hi")

    def __init__(self, d: float, ident: int, q: float) -> None:
        self.d = d
        self.id = ident
        self.q = q
        self.left: AugNode | None = None
        self.right: AugNode | None = None
        self.height = 1
        self.mass = q
        self.psi = q * d
        self.psi2 = q * d * d
        self.phi = 0.0
        self.lo = d
        self.hi = d

    @property
    def key(self) -> tuple[float, int]:
        return (self.d, self.id)

    def pull(self) -> None:
        """Recompute this node's aggregates from its children."""
        v, w = self.left, self.right
        q, d = self.q, self.d
        mass, psi, psi2 = q, q * d, q * d * d
        hv = hw = 0
        lo = hi = d
        if w is not None:
            hi = w.hi
            hw = w.height
            mass += w.mass
            psi += w.psi
            psi2 += w.psi2
        phi = q * (hi - d)
        if w is not None:
            phi += w.phi
        if v is not None:
            lo = v.lo
            hv = v.height
            mass += v.mass
            psi += v.psi
            psi2 += v.psi2
            phi += v.phi + v.mass * (hi - v.hi)
        self.mass, self.psi, self.psi2, self.phi = mass, psi, psi2, phi
        self.lo, self.hi = lo, hi
        self.height = 1 + (hv if hv > hw else hw)


def _h(u: AugNode | None) -> int:
    return 0 if u is None else u.height


def _rot_right(u: AugNode) -> AugNode:
    v = u.left
    u.left = v.right
    v.right = u
    u.pull()
    v.pull()
    return v


def _rot_left(u: AugNode) -> AugNode:
    v = u.right
    u.right = v.left
    v.left = u
    u.pull()
    v.pull()
    return v


def _balance(u: AugNode) -> AugNode:
    u.pull()
    bal = _h(u.left) - _h(u.right)
    if bal > 1:
        if _h(u.left.left) < _h(u.left.right):
            u.left = _rot_left(u.left)
        return _rot_right(u)
    if bal < -1:
        if _h(u.right.right) < _h(u.right.left):
            u.right = _rot_right(u.right)
        return _rot_left(u)
    return u


def _insert(u: AugNode | None, node: AugNode) -> AugNode:
    if u is None:
        return node
    if node.key < u.key:
        u.left = _insert(u.left, node)
    elif node.key > u.key:
        u.right = _insert(u.right, node)
    else:
        raise DuplicateId(node.id)
    return _balance(u)


def _pop_min(u: AugNode) -> tuple[AugNode | None, AugNode]:
    if u.left is None:
        return u.right, u
    u.left, m = _pop_min(u.left)
    return _balance(u), m


def _delete(u: AugNode | None, key: tuple[float, int]) -> AugNode | None:
    if u is None:
        raise UnknownId(key[1])
    if key < u.key:
        u.left = _delete(u.left, key)
    elif key > u.key:
        u.right = _delete(u.right, key)
    else:
        if u.left is None:
            return u.right
        if u.right is None:
            return u.left
        rest, m = _pop_min(u.right)
        m.left, m.right = u.left, rest
        return _balance(m)
    return _balance(u)


def mass_query(u: AugNode, eta: float) -> float:
    """``phi(u) + eta * (largest key - smallest key)`` over the subtree of ``u``."""
    return u.phi + eta * (u.hi - u.lo)


def search_query(u: AugNode, mu: float, eta: float = 0.0) -> tuple[AugNode, float]:
    """Last node ``v`` of ``T_u`` (in key order) with ``phi_eta(u, v) < mu``.

    ``phi_eta(u, v)`` is the slack ``sum_{x <= v} q_x (d_v - d_x)`` plus an
    external mass ``eta`` sitting at the subtree's smallest key. The slack is
    nondecreasing along the key order, so one root-to-leaf descent suffices.
    Returns the node and its slack value.
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    base = u.lo
    mass, psi = eta, eta * base
    best, best_val = None, 0.0
    cur: AugNode | None = u
    while cur is not None:
        m, s = mass + cur.q, psi + cur.q * cur.d
        if cur.left is not None:
            m += cur.left.mass
            s += cur.left.psi
        val = cur.d * m - s
        if val < mu:
            best, best_val = cur, val
            mass, psi = m, s
            cur = cur.right
        else:
            cur = cur.left
    return best, max(best_val, 0.0)


@dataclass
class Prefix:
    """Sums over the nodes of a tree up to and including a given node."""
    mass: float = 0.0
    psi: float = 0.0
    psi2: float = 0.0


def prefix_sums(root: AugNode, target: AugNode) -> Prefix:
    key = target.key
    out = Prefix()
    cur = root
    while cur is not None:
        if key < cur.key:
            cur = cur.left
            continue
        out.mass += cur.q
        out.psi += cur.q * cur.d
        out.psi2 += cur.q * cur.d * cur.d
        if cur.left is not None:
            out.mass += cur.left.mass
            out.psi += cur.left.psi
            out.psi2 += cur.left.psi2
        if key == cur.key:
            return out
        cur = cur.right
    raise KeyError(key)


def compute_weight(root: AugNode, target: AugNode) -> float:
    """Total mass of the nodes of ``root``'s tree up to and including ``target``."""
    return prefix_sums(root, target).mass


class AugTree:
    """An AVL tree of ``(d, id)`` keys carrying masses and subtree aggregates."""

    def __init__(self) -> None:
        self.root: AugNode | None = None
        self._keys: dict[int, float] = {}

    def __len__(self) -> int:
        return len(self._keys)

    def __contains__(self, ident: object) -> bool:
        return ident in self._keys

    def insert(self, d: float, ident: int, q: float) -> None:
        if ident in self._keys:
            raise DuplicateId(ident)
        self.root = _insert(self.root, AugNode(d, ident, q))
        self._keys[ident] = d

    def delete(self, ident: int) -> None:
        try:
            d = self._keys.pop(ident)
        except KeyError:
            raise UnknownId(ident) from None
        self.root = _delete(self.root, (d, ident))

    def nodes(self) -> Iterator[AugNode]:
        stack, cur = [], self.root
        while stack or cur is not None:
            while cur is not None:
                stack.append(cur)
                cur = cur.left
            cur = stack.pop()
            yield cur
            cur = cur.right

    def find(self, ident: int) -> AugNode:
        key = (self._keys[ident], ident)
        cur = self.root
        while cur is not None and cur.key != key:
            cur = cur.left if key < cur.key else cur.right
        if cur is None:
            raise UnknownId(ident)
        return cur

    def snapshot(self) -> list[tuple[float, int, float]]:
        """In-order ``(d, id, q)`` triples; equal for trees holding the same entries."""
        return [(u.d, u.id, u.q) for u in self.nodes()]

    def check(self, rtol: float = 1e-9) -> None:
        """Assert ordering, balance and every aggregate against recomputation."""
        def rec(u):
            if u is None:
                return 0, []
            hl, left = rec(u.left)
            hr, right = rec(u.right)
            assert abs(hl - hr) <= 1, u.key
            assert u.height == 1 + max(hl, hr), u.key
            items = left + [(u.d, u.id, u.q)] + right
            assert all(items[t][:2] < items[t + 1][:2] for t in range(len(items) - 1))
            hi = items[-1][0]
            want = {
                "mass": math.fsum(q for _, _, q in items),
                "psi": math.fsum(q * d for d, _, q in items),
                "psi2": math.fsum(q * d * d for d, _, q in items),
                "phi": math.fsum(q * (hi - d) for d, _, q in items),
            }
            for name, val in want.items():
                got = getattr(u, name)
                assert abs(got - val) <= 1e-12 + rtol * abs(val), (u.key, name, got, val)
            assert u.lo == items[0][0] and u.hi == hi
            return u.height, items
        rec(self.root)


class RadiiMP:
    """One :class:`AugTree` per live point, keyed by ``beta``-scaled distance.

    Call :meth:`on_insert` after a point enters the space and
    :meth:`on_delete` after it leaves (its payload must still be retained).
    """

    def __init__(self, space: WeightedMetricSpace, beta: float) -> None:
        if not beta > 0:
            raise ValueError(f"beta must be positive, got {beta}")
        self.space = space
        self.beta = beta
        self.trees: dict[int, AugTree] = {}
        ids = space.ids()
        dist = space.distance_fn()
        for i in ids:
            tree = AugTree()
            for j in ids:
                tree.insert(beta * dist(i, j), j, space.weight(j))
            self.trees[i] = tree

    def __len__(self) -> int:
        return len(self.trees)

    def on_insert(self, j: int) -> None:
        if j in self.trees:
            raise DuplicateId(j)
        if j not in self.space:
            raise UnknownId(j)
        dist = self.space.distance_fn()
        wj = self.space.weight(j)
        b = self.beta
        mine = AugTree()
        mine.insert(0.0, j, wj)
        for i, tree in self.trees.items():
            dij = b * dist(i, j)
            tree.insert(dij, j, wj)
            mine.insert(dij, i, self.space.weight(i))
        self.trees[j] = mine

    def on_delete(self, j: int) -> None:
        if j not in self.trees:
            raise UnknownId(j)
        del self.trees[j]
        for tree in self.trees.values():
            tree.delete(j)

    def _tree(self, i: int, lam: float) -> AugTree:
        if lam <= 0:
            raise NonpositiveLambda(lam)
        try:
            return self.trees[i]
        except KeyError:
            raise UnknownId(i) from None

    def _locate(self, i: int, lam: float) -> tuple[float, Prefix]:
        root = self._tree(i, lam).root
        node, _ = search_query(root, lam)
        pre = prefix_sums(root, node)
        # slack at d is d*W - psi, so the linear piece hits lam at (lam + psi)/W
        r = (lam + pre.psi) / pre.mass
        return max(r, node.d), pre

    def radius(self, i: int, lam: float) -> float:
        return self._locate(i, lam)[0]

    def connection_cost(self, i: int, lam: float) -> float:
        """``(w(i)/lam) * sum_{b*d(i,j) <= r} w(j) * (r - b*d(i,j)) * b*d(i,j)``."""
        return self.radius_and_cost(i, lam)[1]

    def radius_and_cost(self, i: int, lam: float) -> tuple[float, float]:
        r, pre = self._locate(i, lam)
        c = self.space.weight(i) / lam * max(r * pre.psi - pre.psi2, 0.0)
        return r, c

    def check(self) -> None:
        live = set(self.space.ids())
        assert set(self.trees) == live
        for i, tree in self.trees.items():
            assert set(tree._keys) == live, i
            tree.check()
