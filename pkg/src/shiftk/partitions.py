"""Past-equivalence partitions of a shift space and the matrix tower over them.

Two points are level-l equivalent when their predecessor sets agree in every
grade up to l.  On the finite context carrier this is computed two ways at
once:

* a grade-wise refinement over the prepend transition (exact, never
  enumerates words), which defines the classes; and
* explicit graded predecessor-word sets (capped), which give the canonical
  class ordering and are checked against the refinement when available.

The matrices attached to consecutive levels follow the source's indexing:
entry (i, j) of the inclusion matrix is 1 when class i of level l+1 is
contained in class j of level l, and entry (i, j) of the per-symbol action
matrix is 1 when prepending that symbol maps class i of level l+1 into
class j of level l (never into two classes; that would be a hard internal
error).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConsistencyError, StraddleError, ValidationError
from .intlinalg import IntMatrix
from .presentations import Presentation
from .words import EPSILON


@dataclass(frozen=True)
class PartitionClass:
    contexts: tuple[int, ...]          # context indices, sorted
    signature: tuple                   # per grade: ("w", words...) or ("e", rank)

    @property
    def size(self) -> int:
        return len(self.contexts)


@dataclass(frozen=True)
class PartitionLevel:
    level: int
    classes: tuple[PartitionClass, ...]
    class_of: tuple[int, ...]          # context index -> class index

    @property
    def m(self) -> int:
        return len(self.classes)

    def groups(self) -> frozenset[frozenset[int]]:
        return frozenset(frozenset(c.contexts) for c in self.classes)


@dataclass(frozen=True)
class Stabilization:
    stable: bool
    level: int | None
    checked_to: int

    def render(self) -> str:
        if self.stable:
            return f"stable at level {self.level} (verified through {self.checked_to})"
        return f"not stable within {self.checked_to} levels"


@dataclass(frozen=True)
class RestrictedMaps:
    """The level maps restricted to the coordinates with nonempty grade-k past."""

    inclusion: IntMatrix               # Z^{M_k^l} -> Z^{M_k^{l+1}}
    action: IntMatrix                  # Z^{M_k^l} -> Z^{M_{k+1}^{l+1}}
    delta: IntMatrix | None            # Z^{M_k^l} -> Z^{M_{k+1}^l}, only for k < l
    domain: tuple[int, ...]
    inclusion_range: tuple[int, ...]
    action_range: tuple[int, ...]
    delta_range: tuple[int, ...] | None


class PartitionChain:
    """Partition levels 0..length plus the inclusion/action matrices between them."""

    def __init__(self, presentation, steps, levels, inclusion, actions, reach, reach_limit,
                 stabilization):
        self.presentation: Presentation = presentation
        self.steps = steps
        self.levels: tuple[PartitionLevel, ...] = levels
        self.length = len(levels) - 1
        self._inclusion: tuple[IntMatrix, ...] = inclusion
        self._actions: tuple[dict, ...] = actions
        self.reach: tuple[frozenset[int], ...] = reach
        self.reach_limit: frozenset[int] = reach_limit
        self.stabilization: Stabilization = stabilization

    def m(self, level: int) -> int:
        return self.levels[level].m

    @property
    def m_sequence(self) -> tuple[int, ...]:
        return tuple(lv.m for lv in self.levels)


def _step_table(p: Presentation):
    ctxs = p.contexts
    idx = p.context_index
    steps = []
    for c in ctxs:
        row = []
        for a in p.alphabet:
            c2 = p.prepend_context(c, a)
            if c2 is None:
                row.append(None)
            else:
                j = idx.get(c2)
                if j is None:
                    raise ConsistencyError("prepending left the realizable context set")
                row.append(j)
        steps.append(tuple(row))
    return tuple(steps)


def _grade_ranks(steps, n_letters: int, upto: int):
    """Canonical rank of each context under single-grade equivalence, per grade."""
    n = len(steps)
    ranks = [[0] * n]
    for _ in range(upto):
        prev = ranks[-1]
        keys = [
            tuple(-1 if steps[i][a] is None else prev[steps[i][a]] for a in range(n_letters))
            for i in range(n)
        ]
        order = {key: r for r, key in enumerate(sorted(set(keys)))}
        ranks.append([order[key] for key in keys])
    return ranks


def _graded_word_sets(steps, n_letters: int, start: int, upto: int, cap: int):
    """Explicit predecessor-word sets per grade; None marks grades past the cap."""
    sets: list[frozenset | None] = [frozenset([EPSILON])]
    frontier = {EPSILON: start}
    for _ in range(upto):
        if frontier is None:
            sets.append(None)
            continue
        nxt = {}
        too_big = False
        for w, ci in frontier.items():
            for a in range(n_letters):
                cj = steps[ci][a]
                if cj is not None:
                    nxt[(a,) + w] = cj
            if len(nxt) > cap:
                too_big = True
                break
        if too_big:
            frontier = None
            sets.append(None)
        else:
            frontier = nxt
            sets.append(frozenset(nxt))
    return sets


def _build_levels(p: Presentation, upto: int):
    steps = _step_table(p)
    n = len(p.contexts)
    n_letters = len(p.alphabet)
    grade = _grade_ranks(steps, n_letters, upto)
    word_sets = [
        _graded_word_sets(steps, n_letters, i, upto, p.caps.max_signature_words)
        for i in range(n)
    ]

    levels = []
    level_id = [0] * n
    for l in range(upto + 1):
        if l > 0:
            keys = [(level_id[i], grade[l][i]) for i in range(n)]
            order = {key: r for r, key in enumerate(sorted(set(keys)))}
            level_id = [order[key] for key in keys]
        groups: dict[int, list[int]] = {}
        for i, cid in enumerate(level_id):
            groups.setdefault(cid, []).append(i)

        classes = []
        for members in groups.values():
            members = sorted(members)
            rep = min(members, key=lambda i: p.contexts[i].sort_key)
            sig = []
            for k in range(l + 1):
                ws = word_sets[rep][k]
                if ws is None:
                    sig.append(("e", grade[k][rep]))
                else:
                    sig.append(("w",) + tuple(sorted(ws)))
            # the signature is a class invariant; verify on the other members
            for other in members:
                for k in range(l + 1):
                    ws, wo = word_sets[rep][k], word_sets[other][k]
                    if ws is not None and wo is not None and ws != wo:
                        raise ConsistencyError(
                            "contexts in one class disagree on a predecessor set")
            classes.append((tuple(sig), members))

        classes.sort(key=lambda item: (item[0], p.contexts[item[1][0]].sort_key))
        class_of = [0] * n
        out = []
        for ci, (sig, members) in enumerate(classes):
            for i in members:
                class_of[i] = ci
            out.append(PartitionClass(tuple(members), sig))
        levels.append(PartitionLevel(l, tuple(out), tuple(class_of)))
    return steps, tuple(levels)


def past_partition(p: Presentation, level: int) -> PartitionLevel:
    """Contexts grouped by equality of all predecessor sets up to ``level``."""
    if level < 0:
        raise ValidationError("level must be >= 0")
    _, levels = _build_levels(p, level)
    return levels[level]


def _reach_sets(steps, n_letters: int, upto: int):
    n = len(steps)
    reach = [frozenset(range(n))]
    for _ in range(upto):
        prev = reach[-1]
        reach.append(frozenset(
            i for i in range(n)
            if any(steps[i][a] is not None and steps[i][a] in prev for a in range(n_letters))
        ))
    cur = reach[-1]
    while True:
        nxt = frozenset(
            i for i in cur
            if any(steps[i][a] is not None and steps[i][a] in cur for a in range(n_letters))
        )
        if nxt == cur:
            break
        cur = nxt
    return tuple(reach), cur


def build_chain(p: Presentation, length: int) -> PartitionChain:
    """Levels 0..length, all inter-level matrices, reach sets, stabilization."""
    if length < 1:
        raise ValidationError("chain length must be >= 1")
    steps, levels = _build_levels(p, length)
    n_letters = len(p.alphabet)

    inclusion = []
    actions = []
    for l in range(length):
        fine, coarse = levels[l + 1], levels[l]
        rows = []
        for cls in fine.classes:
            targets = {coarse.class_of[i] for i in cls.contexts}
            if len(targets) != 1:
                raise ConsistencyError("a refined class straddles two coarser classes")
            j = targets.pop()
            rows.append(tuple(1 if jj == j else 0 for jj in range(coarse.m)))
        inclusion.append(IntMatrix.from_rows(rows))

        per_symbol = {}
        for a in range(n_letters):
            rows = []
            for cls in fine.classes:
                images = [steps[i][a] for i in cls.contexts]
                defined = [x for x in images if x is not None]
                if defined and len(defined) != len(images):
                    raise ConsistencyError(
                        f"prepending symbol {a} is defined on part of a class only")
                row = [0] * coarse.m
                if defined:
                    targets = {coarse.class_of[x] for x in defined}
                    if len(targets) != 1:
                        raise StraddleError(
                            f"prepending symbol {a} moves one class into two classes")
                    row[targets.pop()] = 1
                rows.append(tuple(row))
            per_symbol[a] = IntMatrix.from_rows(rows)
        actions.append(per_symbol)

    reach, reach_limit = _reach_sets(steps, n_letters, length)

    stable_level = None
    for l in range(length):
        if levels[l].groups() == levels[l + 1].groups():
            stable_level = l
            break
    if stable_level is not None:
        for l in range(stable_level, length):
            if levels[l].groups() != levels[l + 1].groups():
                raise ConsistencyError(
                    "partition refined again after stabilizing; monotonicity broken")
            ident = IntMatrix.identity(levels[l].m)
            if inclusion[l].entries != ident.entries:
                raise ConsistencyError(
                    "inclusion matrix is not the identity past stabilization")
        stab = Stabilization(True, stable_level, length)
    else:
        stab = Stabilization(False, None, length)

    return PartitionChain(p, steps, levels, tuple(inclusion), tuple(actions),
                          reach, reach_limit, stab)


# ---------------------------------------------------------------------------
# matrices over the tower


def _check_level(chain: PartitionChain, l: int) -> None:
    if not 0 <= l < chain.length:
        raise ValidationError(f"level {l} out of range; chain has matrices for 0..{chain.length - 1}")


def inclusion_matrix(chain: PartitionChain, l: int) -> IntMatrix:
    """0/1 matrix with one 1 per row: class i of level l+1 inside class j of level l."""
    _check_level(chain, l)
    return chain._inclusion[l]


def action_matrices(chain: PartitionChain, l: int) -> dict[int, IntMatrix]:
    """Per-symbol 0/1 matrices: prepending the symbol maps class i (level l+1) into class j (level l)."""
    _check_level(chain, l)
    return dict(chain._actions[l])


def action_sum(chain: PartitionChain, l: int) -> IntMatrix:
    _check_level(chain, l)
    per = chain._actions[l]
    total = IntMatrix.zeros(chain.m(l + 1), chain.m(l))
    for a in sorted(per):
        total = total.add(per[a])
    return total


def bowen_franks_matrix(chain: PartitionChain, l: int) -> IntMatrix:
    """Inclusion minus summed action; its cokernel/kernel carry the K-data."""
    return inclusion_matrix(chain, l).sub(action_sum(chain, l))


def m_index_set(chain: PartitionChain, k: int, l: int) -> tuple[int, ...]:
    """Classes of level l whose grade-k predecessor set is nonempty."""
    if not 0 <= k <= l <= chain.length:
        raise ValidationError("need 0 <= k <= l <= chain length")
    level = chain.levels[l]
    out = []
    for ci, cls in enumerate(level.classes):
        inside = [i in chain.reach[k] for i in cls.contexts]
        if any(inside) != all(inside):
            raise ConsistencyError("grade-k reachability is not constant on a class")
        if inside[0]:
            out.append(ci)
    return tuple(out)


def restricted_maps(chain: PartitionChain, k: int, l: int) -> RestrictedMaps:
    """The inclusion/action/projection maps on the M-indexed coordinates."""
    if not 0 <= k <= l:
        raise ValidationError("need 0 <= k <= l")
    _check_level(chain, l)
    dom = m_index_set(chain, k, l)
    inc_range = m_index_set(chain, k, l + 1)
    act_range = m_index_set(chain, k + 1, l + 1)

    inc_full = inclusion_matrix(chain, l)
    act_full = action_sum(chain, l)
    inc_range_set, act_range_set = set(inc_range), set(act_range)
    for j in dom:
        for i in range(chain.m(l + 1)):
            if inc_full.entry(i, j) and i not in inc_range_set:
                raise ConsistencyError("inclusion leaves the grade-k coordinates")
            if act_full.entry(i, j) and i not in act_range_set:
                raise ConsistencyError("action leaves the grade-(k+1) coordinates")

    inc = inc_full.submatrix(inc_range, dom)
    act = act_full.submatrix(act_range, dom)

    delta = None
    delta_range = None
    if k < l:
        delta_range = m_index_set(chain, k + 1, l)
        delta = IntMatrix.from_rows(
            [[1 if i == j else 0 for j in dom] for i in delta_range])
    return RestrictedMaps(inc, act, delta, dom, inc_range, act_range, delta_range)


def persistent_classes(chain: PartitionChain, l: int) -> tuple[int, ...]:
    """Classes of level l whose predecessor sets are nonempty in every grade.

    Persistence is constant on classes of stabilized levels; calling this on
    a level that still mixes persistent and dying contexts is an error.
    """
    level = chain.levels[l]
    out = []
    for ci, cls in enumerate(level.classes):
        inside = [i in chain.reach_limit for i in cls.contexts]
        if any(inside) != all(inside):
            raise ConsistencyError("persistent reachability is not constant on a class")
        if inside[0]:
            out.append(ci)
    return tuple(out)


def persistence_markers(chain: PartitionChain, l: int) -> tuple[str, ...]:
    """Per-class display marker: '+' all persistent, '-' none, '~' mixed."""
    level = chain.levels[l]
    out = []
    for cls in level.classes:
        inside = [i in chain.reach_limit for i in cls.contexts]
        out.append("+" if all(inside) else "-" if not any(inside) else "~")
    return tuple(out)


# ---------------------------------------------------------------------------
# export


def _signature_json(p: Presentation, sig) -> list:
    out = []
    for k, entry in enumerate(sig):
        if entry[0] == "w":
            out.append({"grade": k, "words": [p.alphabet.render_word(w) for w in entry[1:]]})
        else:
            out.append({"grade": k, "elided": True, "rank": entry[1]})
    return out


def chain_to_json(chain: PartitionChain) -> dict:
    """Chain export: class signatures, matrices row-major, M-sets, stabilization."""
    p = chain.presentation
    levels = []
    for lv in chain.levels:
        levels.append({
            "level": lv.level,
            "m": lv.m,
            "classes": [
                {
                    "contexts": [p.render_context(p.contexts[i]) for i in cls.contexts],
                    "signature": _signature_json(p, cls.signature),
                }
                for cls in lv.classes
            ],
        })
    matrices = []
    for l in range(chain.length):
        matrices.append({
            "level": l,
            "inclusion": inclusion_matrix(chain, l).to_lists(),
            "action": {
                p.alphabet.symbols[a]: mat.to_lists()
                for a, mat in sorted(action_matrices(chain, l).items())
            },
            "action_sum": action_sum(chain, l).to_lists(),
            "bowen_franks": bowen_franks_matrix(chain, l).to_lists(),
        })
    m_sets = []
    for l in range(chain.length + 1):
        m_sets.append({
            "level": l,
            "by_grade": [list(m_index_set(chain, k, l)) for k in range(l + 1)],
            "persistence": list(persistence_markers(chain, l)),
        })
    return {
        "m_sequence": list(chain.m_sequence),
        "stabilization": {
            "stable": chain.stabilization.stable,
            "level": chain.stabilization.level,
            "checked_to": chain.stabilization.checked_to,
        },
        "levels": levels,
        "matrices": matrices,
        "m_sets": m_sets,
    }
