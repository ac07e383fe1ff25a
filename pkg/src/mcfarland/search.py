"""Exhaustive searches over transversals with character-sum conditions.

The engine fixes the representative of the identity coset to the identity
(all conditions used here are translation invariant) and enumerates one
element per remaining coset. Congruence ``chi(E) = 0 (mod M)`` is linear in
the chosen representatives, so the free cosets are split into a left and a
right block, residue vectors are tabulated for each block, and the two tables
are hash-joined on ``left + right = 0 (mod M)``. Every match is re-checked
exactly. The choices for the first left coset define independent branches,
which is the unit of parallelism and of resumption.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterable, Sequence

import numpy as np

from .characters import _IM4, _RE4, _phase_matrix, gaussian_sums, order2_character_indices, principal_on_mask
from .errors import InvalidArgument, UnsupportedGroup
from .groups import (
    ElementSet,
    FinAbGroup,
    Subgroup,
    as_subgroup,
    automorphism_generators,
    frattini_and_socle,
    make_group,
    quotient,
    subgroup_orbits,
    subgroups_of_order,
)


@dataclass
class SearchReport:
    target: str
    candidates_examined: int
    satisfying_found: int
    witnesses: list[tuple[int, ...]]
    wall_time: float = 0.0
    details: dict = field(default_factory=dict)
    group: FinAbGroup | None = None

    def __post_init__(self) -> None:
        if self.satisfying_found != len(self.witnesses):
            raise ValueError("satisfying_found must equal the number of witnesses")

    def to_json(self, include_time: bool = False) -> dict:
        if self.group is not None:
            wits = [[list(self.group.exponents(g)) for g in w] for w in self.witnesses]
        else:
            wits = [list(w) for w in self.witnesses]
        out = {
            "target": self.target,
            "candidates_examined": self.candidates_examined,
            "satisfying_found": self.satisfying_found,
            "witnesses": wits,
            "details": self.details,
        }
        if self.group is not None:
            out["group"] = self.group.descriptor
        if include_time:
            out["wall_time"] = round(self.wall_time, 3)
        return out


# -- exact predicates on batches of sets (rows of element indices) -------------


def congruence_predicate(group: FinAbGroup, modulus: int) -> Callable[[np.ndarray], np.ndarray]:
    """``chi(E) = 0 (mod modulus)`` componentwise for every character."""
    if not group.exponent_divides(4):
        raise UnsupportedGroup("congruence checks need exponent dividing 4")

    def pred(batch: np.ndarray) -> np.ndarray:
        re, im = gaussian_sums(group, batch)
        return ((re % modulus == 0) & (im % modulus == 0)).all(axis=0)

    return pred


def half_modulus_predicate(group: FinAbGroup) -> Callable[[np.ndarray], np.ndarray]:
    """``|chi(E)| in {|E|/2, 0}`` for every non-principal chi, exactly, in any abelian group.

    Equivalent to ``E^2 E^(-1) - (|E|^2/4) E`` being a multiple of ``G``.
    """

    def pred(batch: np.ndarray) -> np.ndarray:
        batch = np.atleast_2d(batch)
        rows, k = batch.shape
        if k * k % 4:
            return np.zeros(rows, dtype=bool)
        a = batch[:, :, None, None]
        b = batch[:, None, :, None]
        c = group.inv(batch)[:, None, None, :]
        prod = group.mul(group.mul(a, b), c).reshape(rows, -1)
        offs = (np.arange(rows) * group.order)[:, None]
        coeffs = np.bincount((prod + offs).ravel(), minlength=rows * group.order).reshape(rows, group.order)
        np.subtract.at(coeffs, (np.repeat(np.arange(rows), k), batch.ravel()), k * k // 4)
        return (coeffs == coeffs[:, :1]).all(axis=1)

    return pred


# -- the engine ---------------------------------------------------------------------


@dataclass
class BranchResult:
    branch: int
    candidates: int
    witnesses: list[tuple[int, ...]]
    key_matches: int

    def to_json(self) -> dict:
        return {
            "branch": self.branch,
            "candidates": self.candidates,
            "witnesses": [list(w) for w in self.witnesses],
            "key_matches": self.key_matches,
        }

    @classmethod
    def from_json(cls, d: dict) -> BranchResult:
        return cls(d["branch"], d["candidates"], [tuple(w) for w in d["witnesses"]], d["key_matches"])


class TransversalSearch:
    """Normalized transversals ``E`` of ``N`` (identity coset fixed) satisfying a condition.

    ``modulus`` drives the hash join (1 disables pruning); ``predicate`` is the
    exact acceptance test applied to joined candidates (defaults to the
    congruence itself).
    """

    def __init__(
        self,
        group: FinAbGroup,
        sub: Subgroup,
        modulus: int = 1,
        predicate: str = "congruence",
        split: int | None = None,
    ) -> None:
        self.group = group
        self.sub = as_subgroup(sub)
        self.modulus = int(modulus)
        self.predicate_name = predicate
        if self.modulus > 1 and not group.exponent_divides(4):
            raise UnsupportedGroup("residue pruning needs exponent dividing 4")
        qmap = quotient(group, self.sub)
        img = np.asarray(qmap(np.arange(group.order)))
        order = np.argsort(img, kind="stable")
        self.choices = order.reshape(qmap.target.order, self.sub.order)  # row j: coset j, ascending
        free = list(range(1, qmap.target.order))
        n_left = len(free) // 2 if split is None else split
        self.left = free[:n_left]
        self.right = free[n_left:]
        self.k = qmap.target.order
        if predicate == "congruence":
            self._pred = congruence_predicate(group, self.modulus)
        elif predicate == "half-modulus":
            self._pred = half_modulus_predicate(group)
        else:
            raise InvalidArgument(f"unknown predicate {predicate!r}")
        self._right_table = None

    # residues: one int8 row per element, (re, im) for every character, mod M
    def _residues(self, elements: np.ndarray) -> np.ndarray:
        if self.modulus == 1:
            return np.zeros((len(elements), 0), dtype=np.int16)
        P4 = (_phase_matrix(self.group, self.group.digits, elements) * 4) // self.group.exponent
        res = np.concatenate([_RE4[P4], _IM4[P4]], axis=0).T % self.modulus
        return res.astype(np.int16)

    def _block_table(self, cosets: Sequence[int], first: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """All combinations for ``cosets`` (lexicographic), as (choice indices, residues)."""
        width = self._width
        idx = np.zeros((1, 0), dtype=np.int64)
        acc = np.zeros((1, width), dtype=np.int16)
        for pos, c in enumerate(cosets):
            opts = np.arange(self.sub.order) if not (pos == 0 and first is not None) else np.array([first])
            r = self._residues(self.choices[c, opts])
            idx = np.concatenate([np.repeat(idx, len(opts), axis=0), np.tile(opts, len(idx))[:, None]], axis=1)
            acc = ((acc[:, None, :] + r[None, :, :]) % self.modulus).astype(np.int16).reshape(len(idx), width)
        return idx, acc

    @property
    def _width(self) -> int:
        return 0 if self.modulus == 1 else 2 * self.group.order

    @property
    def branches(self) -> list[int]:
        return list(range(self.sub.order)) if self.left else [0]

    @property
    def total_candidates(self) -> int:
        return self.sub.order ** (self.k - 1)

    def _right(self):
        if self._right_table is None:
            ridx, racc = self._block_table(self.right)
            table: dict[bytes, list[int]] = {}
            for row, key in enumerate(racc):
                table.setdefault(key.tobytes(), []).append(row)
            self._right_table = (ridx, table)
        return self._right_table

    def _check_pairs(self, lidx, ridx, L, R) -> list[tuple[int, ...]]:
        chosen = np.concatenate([lidx[L], ridx[R]], axis=1)
        cosets = np.array(self.left + self.right)
        elems = self.choices[cosets[None, :], chosen]
        batch = np.sort(np.concatenate([np.zeros((len(L), 1), dtype=np.int64), elems], axis=1), axis=1)
        ok = np.zeros(len(batch), dtype=bool)
        for start in range(0, len(batch), 4096):
            ok[start : start + 4096] = self._pred(batch[start : start + 4096])
        return [tuple(int(x) for x in row) for row in batch[ok]]

    def run_branch(self, branch: int, stop_at_first: bool = False, max_pairs: int = 1 << 20) -> BranchResult:
        """Join one branch. With ``stop_at_first`` the scan ends after the first
        left row that yields a solution; only the rows scanned are counted."""
        ridx, table = self._right()
        if self.left:
            lidx, lacc = self._block_table(self.left, first=branch)
        else:
            lidx, lacc = np.zeros((1, 0), dtype=np.int64), np.zeros((1, self._width), dtype=np.int16)
        # the fixed identity contributes chi(1) = 1 to every sum
        need = ((-(lacc + self._residues(np.zeros(1, dtype=np.int64)))) % self.modulus).astype(np.int16)
        witnesses: list[tuple[int, ...]] = []
        pairs_l: list[int] = []
        pairs_r: list[int] = []
        matches = 0
        rows_done = 0

        def flush():
            nonlocal pairs_l, pairs_r
            if pairs_l:
                witnesses.extend(self._check_pairs(lidx, ridx, np.asarray(pairs_l), np.asarray(pairs_r)))
            pairs_l, pairs_r = [], []

        for row, key in enumerate(need):
            hits = table.get(key.tobytes())
            rows_done = row + 1
            if hits:
                matches += len(hits)
                pairs_l.extend([row] * len(hits))
                pairs_r.extend(hits)
                if stop_at_first or len(pairs_l) >= max_pairs:
                    flush()
                    if stop_at_first and witnesses:
                        break
        flush()
        return BranchResult(branch, rows_done * len(ridx), witnesses, matches)

    def run(
        self,
        workers: int = 1,
        resume: Iterable[BranchResult] = (),
        checkpoint: str | os.PathLike | None = None,
        target: str = "transversal-search",
        stop_at_first: bool = False,
    ) -> SearchReport:
        t0 = time.perf_counter()
        done = {r.branch: r for r in resume}
        todo = [b for b in self.branches if b not in done]
        if stop_at_first:
            for b in todo:
                done[b] = self.run_branch(b, stop_at_first=True)
                if done[b].witnesses:
                    break
            results = [done[b] for b in self.branches if b in done]
        elif workers > 1 and len(todo) > 1:
            spec = (self.group.factor_orders, self.sub.elements, self.modulus, self.predicate_name, len(self.left))
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for res in pool.map(_worker, [spec] * len(todo), todo):
                    done[res.branch] = res
                    _write_checkpoint(checkpoint, target, done)
        else:
            for b in todo:
                done[b] = self.run_branch(b)
                _write_checkpoint(checkpoint, target, done)
        if not stop_at_first:
            results = [done[b] for b in self.branches]
        witnesses = [w for r in results for w in r.witnesses]
        return SearchReport(
            target=target,
            candidates_examined=sum(r.candidates for r in results),
            satisfying_found=len(witnesses),
            witnesses=witnesses,
            wall_time=time.perf_counter() - t0,
            details={
                "N": {"generators": self.sub.generator_tuples()},
                "modulus": self.modulus,
                "predicate": self.predicate_name,
                "branches": len(results),
                "key_matches": sum(r.key_matches for r in results),
                "stopped_early": stop_at_first,
            },
            group=self.group,
        )


def _worker(spec, branch: int) -> BranchResult:
    orders, elems, modulus, pred, n_left = spec
    group = make_group(orders)
    eng = TransversalSearch(group, ElementSet(group, elems), modulus, pred, split=n_left)
    return eng.run_branch(branch)


def _write_checkpoint(path, target: str, done: dict[int, BranchResult]) -> None:
    if path is None:
        return
    payload = {"target": target, "completed": [done[b].to_json() for b in sorted(done)]}
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump(payload, fh, sort_keys=True)
    os.replace(tmp, path)


def load_checkpoint(path: str | os.PathLike) -> list[BranchResult]:
    with open(path) as fh:
        payload = json.load(fh)
    return [BranchResult.from_json(d) for d in payload["completed"]]


# -- the Z4^3 certificate ------------------------------------------------------------------

Z43_GROUP = (4, 4, 4)


def _z43_instance():
    group = make_group(Z43_GROUP)
    _, socle = frattini_and_socle(group)
    return group, socle


def normalized_z43_subsearch() -> dict:
    """Both readings of the normal form ``1+x+y+z+xy w_xy+yz w_yz+zx w_zx+xyz w_xyz``.

    ``w`` ranges over the socle ``N`` (4096 assignments). ``constraints``
    counts assignments meeting the membership conditions derived from order-2
    and order-4 characters; ``characters`` counts those for which the set
    itself satisfies ``chi(E) = 0 (mod 4)`` for all chi.
    """
    group, socle = _z43_instance()
    # socle elements as bit triples (a, b, c) <-> x^2a y^2b z^2c
    bits = [(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)]

    def s(*names: str) -> set[tuple[int, int, int]]:
        out = set()
        for name in names:
            out.add(tuple(int(v in name) for v in "xyz"))
        return out

    def shift(w, S):
        return {tuple((p + q) % 2 for p, q in zip(w, t)) for t in S}

    one = ""
    c_xy, c_yz, c_zx = s(one, "x", "y", "xy"), s(one, "y", "z", "yz"), s(one, "x", "z", "xz")
    d_xy, d_yz, d_zx = s(one, "z", "xy", "xyz"), s(one, "x", "yz", "xyz"), s(one, "y", "zx", "xyz")
    c_xyz = s("x", "y", "z", "xyz")
    by_constraints = 0
    for wxy, wyz, wzx, wxyz in product(bits, repeat=4):
        total = tuple(sum(t) % 2 for t in zip(wxy, wyz, wzx, wxyz))
        if (
            wxyz in c_xyz
            and wxy in c_xy & shift(wxyz, d_xy)
            and wyz in c_yz & shift(wxyz, d_yz)
            and wzx in c_zx & shift(wxyz, d_zx)
            and total == (0, 0, 0)
        ):
            by_constraints += 1

    # direct evaluation
    def el(v):
        return group.index(v)

    w_idx = np.array([el((2 * a, 2 * b, 2 * c)) for a, b, c in bits])
    base = [el((0, 0, 0)), el((1, 0, 0)), el((0, 1, 0)), el((0, 0, 1))]
    xy, yz, zx, xyz = el((1, 1, 0)), el((0, 1, 1)), el((1, 0, 1)), el((1, 1, 1))
    grid = np.array(list(product(range(8), repeat=4)))
    rows = np.column_stack(
        [np.tile(base, (len(grid), 1))]
        + [group.mul(g, w_idx[grid[:, j]])[:, None] for j, g in enumerate((xy, yz, zx, xyz))]
    )
    pred = congruence_predicate(group, 4)
    by_characters = int(pred(rows).sum())
    return {"assignments": len(grid), "constraints": by_constraints, "characters": by_characters}


def oracle_z43(
    workers: int = 1,
    resume: Iterable[BranchResult] = (),
    checkpoint: str | None = None,
    modulus: int = 4,
    subsearch: bool = True,
    stop_at_first: bool = False,
) -> SearchReport:
    """No transversal of the socle of ``Z4^3`` has all character sums divisible by 4."""
    group, socle = _z43_instance()
    eng = TransversalSearch(group, socle, modulus, "congruence")
    target = "z43" if modulus == 4 else f"z43-mod{modulus}"
    report = eng.run(workers, resume, checkpoint, target=target, stop_at_first=stop_at_first)
    if subsearch and modulus == 4:
        report.details["normalized_subsearch"] = normalized_z43_subsearch()
    return report


def z43_control(workers: int = 1) -> SearchReport:
    """Same engine, relaxed to modulus 2: solutions must exist."""
    return oracle_z43(workers=workers, modulus=2, subsearch=False, stop_at_first=True)


# -- size bound -------------------------------------------------------------------------


def two_groups(order: int, max_exponent: int | None = None) -> list[FinAbGroup]:
    """Abelian groups of the given 2-power order, one per isomorphism type."""
    e = order.bit_length() - 1
    if order != 1 << e:
        raise InvalidArgument("order must be a power of 2")
    out = []

    def parts(n, cap):
        if n == 0:
            yield ()
            return
        for p in range(min(n, cap), 0, -1):
            for rest in parts(n - p, p):
                yield (p,) + rest

    for part in parts(e, e):
        orders = [2**p for p in part]
        if max_exponent is not None and max(orders, default=1) > max_exponent:
            continue
        out.append(make_group(orders))
    return out


def _half_modulus_modulus(group: FinAbGroup, size: int) -> int:
    return size // 2 if size >= 4 and group.exponent_divides(4) else 1


def oracle_size(max_group_order: int = 32, sizes: Sequence[int] = (2, 4)) -> SearchReport:
    """Transversals with the half-modulus property never have ``|N| > |E|`` (|E| in {2, 4}).

    Exhaustive over every abelian 2-group of order at most ``max_group_order``
    and every subgroup N of index |E|.
    """
    if any(s not in (2, 4) for s in sizes):
        raise InvalidArgument("exhaustive mode supports |E| in {2, 4}; use oracle_size_curated for 8")
    t0 = time.perf_counter()
    candidates = 0
    counterexamples: list[tuple[int, ...]] = []
    per_size = {}
    instances = []
    order = 2
    while order <= max_group_order:
        for group in two_groups(order):
            for s in sizes:
                if order % s or order == s:
                    continue
                for sub in subgroups_of_order(group, order // s):
                    eng = TransversalSearch(group, sub, _half_modulus_modulus(group, s), "half-modulus")
                    rep = eng.run(target="size")
                    candidates += rep.candidates_examined
                    q = rep.satisfying_found
                    stats = per_size.setdefault(str(s), {"instances": 0, "qualifying": 0, "counterexamples": 0})
                    stats["instances"] += 1
                    stats["qualifying"] += q
                    if sub.order > s and q:
                        stats["counterexamples"] += q
                        counterexamples.extend(rep.witnesses)
                        instances.append({"group": group.descriptor, "N": sub.generator_tuples()})
        order *= 2
    return SearchReport(
        target="size",
        candidates_examined=candidates,
        satisfying_found=len(counterexamples),
        witnesses=counterexamples,
        wall_time=time.perf_counter() - t0,
        details={"max_group_order": max_group_order, "sizes": list(sizes), "per_size": per_size, "counterexample_instances": instances},
    )


# curated |E| = 8 instances: (group, generators of N)
CURATED_SIZE8 = (
    # odd branch: |N| = 16 > |E|, expected empty
    ((2, 2, 2, 2, 2, 2, 2), [(1, 0, 0, 0, 0, 0, 0), (0, 1, 0, 0, 0, 0, 0), (0, 0, 1, 0, 0, 0, 0), (0, 0, 0, 1, 0, 0, 0)]),
    ((4, 2, 2, 2, 2, 2), [(2, 0, 0, 0, 0, 0), (0, 1, 0, 0, 0, 0), (0, 0, 1, 0, 0, 0), (0, 0, 0, 1, 0, 0)]),
    ((4, 2, 2, 2, 2, 2), [(1, 0, 0, 0, 0, 0), (0, 1, 0, 0, 0, 0), (0, 0, 1, 0, 0, 0)]),
    ((4, 4, 2, 2, 2), [(1, 0, 0, 0, 0), (0, 2, 0, 0, 0), (0, 0, 1, 0, 0)]),
    ((4, 4, 4, 2), [(2, 0, 0, 0), (0, 2, 0, 0), (0, 0, 2, 0), (0, 0, 0, 1)]),
    # even branch: |N| = 8 = |E|, positives allowed
    ((2, 2, 2, 2, 2, 2), [(1, 0, 0, 0, 0, 0), (0, 1, 0, 0, 0, 0), (0, 0, 1, 0, 0, 0)]),
    ((4, 2, 2, 2, 2), [(2, 0, 0, 0, 0), (0, 1, 0, 0, 0), (0, 0, 1, 0, 0)]),
)


def oracle_size_curated(workers: int = 1, instances=CURATED_SIZE8) -> SearchReport:
    """The |E| = 8 case on a fixed list of (G, N); counterexamples need |N| > 8."""
    t0 = time.perf_counter()
    candidates = 0
    counterexamples: list[tuple[int, ...]] = []
    rows = []
    for orders, gens in instances:
        group = make_group(orders)
        sub = group.subgroup(gens)
        if group.order // sub.order != 8:
            raise InvalidArgument(f"instance {group.descriptor} does not have index 8")
        rep = QuotientLiftSearch(group, sub).run(workers, target="size8")
        candidates += rep.candidates_examined
        lam_num = 3 * 64
        rows.append(
            {
                "group": group.descriptor,
                "N": {"generators": sub.generator_tuples()},
                "N_order": sub.order,
                "lambda": lam_num // (4 * sub.order) if lam_num % (4 * sub.order) == 0 else lam_num / (4 * sub.order),
                "candidates": rep.candidates_examined,
                "qualifying": rep.satisfying_found,
            }
        )
        if sub.order > 8:
            counterexamples.extend(rep.witnesses)
    return SearchReport(
        target="size8",
        candidates_examined=candidates,
        satisfying_found=len(counterexamples),
        witnesses=counterexamples,
        wall_time=time.perf_counter() - t0,
        details={"instances": rows},
    )


# -- quotient-lifting search ---------------------------------------------------------------


def _index2_chain(sub: Subgroup) -> list[int]:
    """Elements ``h_1, h_2, ...`` with ``H_j = <h_1..h_j>`` of order ``2^j`` ending at ``sub``."""
    group = sub.parent
    current = {0}
    steps = []
    while len(current) < sub.order:
        for g in sub.elements:
            if g not in current and int(group.power(g, 2)) in current:
                new = current | {int(group.mul(x, g)) for x in current}
                steps.append(int(g))
                current = new
                break
    return steps


class QuotientLiftSearch:
    """Half-modulus transversals of N, found by descending a chain of quotients.

    If E has the property in G, its image in ``G/H`` (``H <= N``) is a
    transversal of ``N/H`` with the same property. Along a chain
    ``1 = H_0 < H_1 < ... < H_r = N`` of index-2 steps ``H_j = <H_(j-1), h_j>``,
    a candidate for ``G/H_j`` is lifted to ``G/H_(j-1)`` by replacing each
    non-identity representative ``g`` by ``g`` or ``g h_j``. The characters that
    become visible are exactly those trivial on ``H_(j-1)`` with
    ``chi(h_j) = -1``, so all lifts of a candidate are scored by one signed
    sum per character. Values are exact Gaussian integers (exponent <= 4).
    """

    def __init__(self, group: FinAbGroup, sub: Subgroup) -> None:
        if not group.is_2group() or not group.exponent_divides(4):
            raise UnsupportedGroup("quotient lifting needs a 2-group of exponent at most 4")
        self.group = group
        self.sub = as_subgroup(sub)
        self.steps = _index2_chain(self.sub)
        labels = quotient(group, self.sub)
        img = np.asarray(labels(np.arange(group.order)))
        _, first = np.unique(img, return_index=True)
        self.start = np.sort(first)[None, :]  # identity (index 0) first
        self.k = self.start.shape[1]
        self.target = self.k * self.k // 4
        flips = np.array(list(product((1, -1), repeat=self.k - 1)), dtype=np.float64)
        self._signs = np.concatenate([np.ones((len(flips), 1)), flips], axis=1)
        self._moved = self._signs < 0
        # per level: values (re, im) of the newly visible characters on every element
        allel = np.arange(group.order)
        self._tables = []
        for j in range(1, len(self.steps) + 1):
            below = [0]
            for h in self.steps[: j - 1]:
                below = below + [int(group.mul(x, h)) for x in below]
            P = _phase_matrix(group, group.digits, np.array(below + [self.steps[j - 1]]))
            new = np.flatnonzero(~P[:, :-1].any(axis=1) & (P[:, -1] != 0))
            P4 = (_phase_matrix(group, group.digits[new], allel) * 4) // group.exponent
            self._tables.append((_RE4[P4].astype(np.float64), _IM4[P4].astype(np.float64)))

    def lift(self, cands: np.ndarray, j: int) -> tuple[np.ndarray, int]:
        """Survivors in ``G/H_(j-1)`` of all lifts of ``cands`` (valid in ``G/H_j``)."""
        re_t, im_t = self._tables[j - 1]
        h = self.steps[j - 1]
        out = []
        for start in range(0, len(cands), 512):
            batch = cands[start : start + 512]
            nb, nc = len(batch), re_t.shape[0]
            sre = re_t[:, batch].reshape(-1, self.k) @ self._signs.T  # (chars * batch, lifts)
            sim = im_t[:, batch].reshape(-1, self.k) @ self._signs.T
            mod2 = np.rint(sre * sre + sim * sim).astype(np.int64).reshape(nc, nb, -1)
            ok = ((mod2 == 0) | (mod2 == self.target)).all(axis=0)
            b, f = np.nonzero(ok)
            if len(b):
                moved = self.group.mul(batch[b], h)
                out.append(np.where(self._moved[f], moved, batch[b]))
        found = np.concatenate(out) if out else np.zeros((0, self.k), dtype=np.int64)
        return found, len(cands) * len(self._signs)

    def run_from(self, cands: np.ndarray, level: int) -> tuple[np.ndarray, list[int]]:
        counts = []
        for j in range(level, 0, -1):
            cands, n = self.lift(cands, j)
            counts.append(n)
        return cands, counts

    def run(self, workers: int = 1, target: str = "quotient-lift") -> SearchReport:
        t0 = time.perf_counter()
        top = len(self.steps)
        per_level = []
        if top == 0:
            final = self.start
        else:
            branches, n = self.lift(self.start, top)
            per_level.append(n)
            if workers > 1 and len(branches) > 1 and top > 1:
                spec = (self.group.factor_orders, self.sub.elements)
                chunks = np.array_split(branches, min(len(branches), 4 * workers))
                with ProcessPoolExecutor(max_workers=workers) as pool:
                    results = list(pool.map(_lift_worker, [spec] * len(chunks), chunks, [top - 1] * len(chunks)))
            else:
                results = [self.run_from(branches, top - 1)]
            for _, counts in results:
                for i, c in enumerate(counts):
                    if len(per_level) <= i + 1:
                        per_level.append(0)
                    per_level[i + 1] += c
            final = np.concatenate([r[0] for r in results]) if results else np.zeros((0, self.k), dtype=np.int64)
        final = np.sort(final, axis=1)
        if len(final):
            final = final[np.lexsort(final.T[::-1])]
            # certify survivors with the group-ring identity
            if not half_modulus_predicate(self.group)(final).all():
                raise RuntimeError("lifted survivor failed the exact group-ring check")
        witnesses = [tuple(int(x) for x in row) for row in final]
        return SearchReport(
            target=target,
            candidates_examined=int(sum(per_level)),
            satisfying_found=len(witnesses),
            witnesses=witnesses,
            wall_time=time.perf_counter() - t0,
            details={
                "N": {"generators": self.sub.generator_tuples()},
                "canonical_space": self.sub.order ** (self.k - 1),
                "lifts_per_level": per_level,
            },
            group=self.group,
        )


def _lift_worker(spec, cands: np.ndarray, level: int):
    orders, elems = spec
    group = make_group(orders)
    eng = QuotientLiftSearch(group, as_subgroup(ElementSet(group, elems)))
    return eng.run_from(cands, level)


# -- the EI/EJ sweep -----------------------------------------------------------------------


def _witness_mask(group: FinAbGroup, rows: np.ndarray, chars: np.ndarray) -> np.ndarray:
    """Rows for which some character in ``chars`` has ``|chi(E)| = |E|/2``."""
    if len(chars) == 0 or len(rows) == 0:
        return np.zeros(len(rows), dtype=bool)
    re, im = gaussian_sums(group, rows, chars)
    k = rows.shape[1]
    return (4 * (re * re + im * im) == k * k).any(axis=0)


def ei_ej_sweep(max_order: int = 64, min_n: int = 8, classify_prefix: int = 16, workers: int = 1) -> SearchReport:
    """Half-modulus transversals meeting the EI or EJ hypotheses are of type I or II.

    Every abelian 2-group of exponent at most 4 and order at most
    ``max_order``, every proper subgroup ``N`` with ``|N| >= min_n`` up to the
    elementary automorphisms, every normalized transversal (identity coset
    represented by 1; all conditions are translation invariant). EI applies
    when ``N`` is elementary with an order-2 witness character, EJ when ``G``
    and ``N`` have exponent 4 with a witness in the dual Frattini subgroup.
    The type II flag is decided for every hypothesis-meeting set by the
    stabilizer order; sets that are not type II, and the first
    ``classify_prefix`` of every instance, go through the full classifier.
    Witnesses are the sets reported as neither type.
    """
    from .transversals import classify_transversal, stabilizer_orders

    t0 = time.perf_counter()
    rows_out = []
    failures: list[tuple[int, ...]] = []
    examined = 0
    order = 2
    while order <= max_order:
        for group in two_groups(order, max_exponent=4):
            o2 = order2_character_indices(group)
            _, socle = frattini_and_socle(group)
            phi_dual = np.flatnonzero(principal_on_mask(group, socle))[1:]
            perms = automorphism_generators(group)
            size = min_n
            while size < order:
                subs = subgroups_of_order(group, size)
                for orbit in subgroup_orbits(subs, perms):
                    sub = subs[orbit[0]]
                    elementary = sub.is_elementary()
                    ej = group.exponent == 4 and not elementary
                    rep = QuotientLiftSearch(group, sub).run(workers, target="ei-ej")
                    examined += rep.candidates_examined
                    found = np.array(rep.witnesses, dtype=np.int64).reshape(len(rep.witnesses), order // size)
                    chars = o2 if elementary else (phi_dual if ej else np.zeros(0, dtype=np.int64))
                    hyp = found[_witness_mask(group, found, chars)]
                    k = group.order // size
                    if k % 8 == 0 and len(hyp):
                        type2 = stabilizer_orders(group, hyp) >= k // 8
                    else:
                        type2 = np.zeros(len(hyp), dtype=bool)
                    todo = sorted(set(range(min(classify_prefix, len(hyp)))) | set(np.flatnonzero(~type2).tolist()))
                    n_I = n_II = 0
                    bad = 0
                    for i in todo:
                        e = ElementSet(group, tuple(int(x) for x in hyp[i]))
                        cr = classify_transversal(e, sub)
                        if bool(cr.type_II is not None) != bool(type2[i]):
                            raise RuntimeError("batched type II flag disagrees with the classifier")
                        n_I += cr.type_I is not None
                        n_II += cr.type_II is not None
                        if cr.neither:
                            bad += 1
                            failures.append(tuple(int(x) for x in hyp[i]))
                    rows_out.append(
                        {
                            "group": group.descriptor,
                            "N": {"generators": sub.generator_tuples()},
                            "orbit_size": len(orbit),
                            "hypotheses": "EI" if elementary else ("EJ" if ej else "none"),
                            "half_modulus": len(found),
                            "hypotheses_met": len(hyp),
                            "type_II_batched": int(type2.sum()),
                            "classified": len(todo),
                            "classified_type_I": n_I,
                            "classified_type_II": n_II,
                            "neither": bad,
                        }
                    )
                size *= 2
        order *= 2
    return SearchReport(
        target="ei-ej",
        candidates_examined=examined,
        satisfying_found=len(failures),
        witnesses=failures,
        wall_time=time.perf_counter() - t0,
        details={
            "max_order": max_order,
            "min_N": min_n,
            "instances": rows_out,
            "hypotheses_met": sum(r["hypotheses_met"] for r in rows_out),
        },
    )
