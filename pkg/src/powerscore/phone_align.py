"""Constrained phone-level alignment of error spans and word recombination.

The aligner is a unit-cost Levenshtein variant over phone tokens with three
hard constraints: boundary tokens are never substituted, vowels only align
to vowels, and consonants only align to consonants (semivowels count as
consonants).  Forbidden pairings are simply unavailable moves; deletion plus
insertion always remains possible, so the DP is total.

Among all minimal-cost paths the aligner returns the one minimizing the
number of deletion/insertion steps that fall strictly between the first and
last correct-aligned word boundary steps.  The minimal-cost backtrace matrix
is reduced to the DAG of edges lying on some optimal path, gap weights are
attached, and a shortest path is found with Dijkstra's algorithm on a small
phase-expanded graph (before the first correct word boundary / between /
after the last).  Residual ties are broken lexicographically with moves
ordered diagonal < deletion < insertion, scanning left to right.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .errors import InternalInvariantError
from .inventory import VOWELS
from .lexicon import Boundary, BoundaryKind, Lexicon, Phoneme, Token, WORD_BOUNDARY
from .word_align import AlignLabel

_DIAG, _DEL, _INS = 0, 1, 2


@dataclass(frozen=True, slots=True)
class PhoneToken:
    """A phone or boundary token tagged with its owning word."""

    payload: Token
    word_index: int
    is_first_syllable: bool


@dataclass(frozen=True, slots=True)
class PhoneStep:
    ref: PhoneToken | None
    hyp: PhoneToken | None
    label: AlignLabel


@dataclass(frozen=True)
class PhoneAlignment:
    steps: tuple[PhoneStep, ...]

    def cost(self) -> int:
        return sum(1 for s in self.steps if s.label is not AlignLabel.COR)


@dataclass(frozen=True, slots=True)
class SpanEntry:
    """One recombined word-level unit: ranges index the span's word lists."""

    ref_range: tuple[int, int]
    hyp_range: tuple[int, int]
    label: AlignLabel

    def ref_size(self) -> int:
        return self.ref_range[1] - self.ref_range[0]

    def hyp_size(self) -> int:
        return self.hyp_range[1] - self.hyp_range[0]


@dataclass(frozen=True)
class SpanResult:
    entries: tuple[SpanEntry, ...]


def is_word_boundary(token: Token) -> bool:
    return isinstance(token, Boundary) and token.kind is BoundaryKind.WORD


def build_phone_sequence(words: list[str], lexicon: Lexicon) -> list[PhoneToken]:
    """Concatenate word pronunciations; consecutive words share one boundary."""
    tokens: list[PhoneToken] = []
    for w_idx, word in enumerate(words):
        pron = lexicon.pronounce(word)
        if w_idx == 0:
            tokens.append(PhoneToken(WORD_BOUNDARY, 0, False))
        syllables_seen = 0
        for tok in pron.tokens[1:-1]:
            if isinstance(tok, Boundary) and tok.kind is BoundaryKind.SYLLABLE:
                syllables_seen += 1
            tokens.append(PhoneToken(tok, w_idx, syllables_seen <= 1))
        tokens.append(PhoneToken(WORD_BOUNDARY, w_idx, False))
    return tokens


def _diag_cost(a: Token, b: Token) -> int | None:
    """0 for identical tokens, 1 for a permitted substitution, None if forbidden."""
    if isinstance(a, Boundary) or isinstance(b, Boundary):
        if isinstance(a, Boundary) and isinstance(b, Boundary) and a.kind is b.kind:
            return 0
        return None
    if a.symbol == b.symbol:
        return 0
    if (a.symbol in VOWELS) != (b.symbol in VOWELS):
        return None
    return 1


def align_phones(ref: list[PhoneToken], hyp: list[PhoneToken]) -> PhoneAlignment:
    """Minimal-cost constrained alignment, disambiguated by gap minimization."""
    n, m = len(ref), len(hyp)
    ref_payload = [t.payload for t in ref]
    hyp_payload = [t.payload for t in hyp]

    diag = [[None] * m for _ in range(n)]
    for i in range(n):
        for j in range(m):
            diag[i][j] = _diag_cost(ref_payload[i], hyp_payload[j])

    dist = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        dist[i][0] = i
    for j in range(1, m + 1):
        dist[0][j] = j
    for i in range(1, n + 1):
        row, prev = dist[i], dist[i - 1]
        drow = diag[i - 1]
        for j in range(1, m + 1):
            best = min(prev[j], row[j - 1]) + 1
            dcost = drow[j - 1]
            if dcost is not None and prev[j - 1] + dcost < best:
                best = prev[j - 1] + dcost
            row[j] = best

    edges = _optimal_edges(dist, diag, n, m)
    moves = _select_best_path(edges, ref_payload, hyp_payload, n, m)

    steps: list[PhoneStep] = []
    i = j = 0
    for move in moves:
        if move == _DIAG:
            label = AlignLabel.COR if diag[i][j] == 0 else AlignLabel.SUB
            steps.append(PhoneStep(ref[i], hyp[j], label))
            i, j = i + 1, j + 1
        elif move == _DEL:
            steps.append(PhoneStep(ref[i], None, AlignLabel.DEL))
            i += 1
        else:
            steps.append(PhoneStep(None, hyp[j], AlignLabel.INS))
            j += 1
    return PhoneAlignment(tuple(steps))


def _optimal_edges(dist, diag, n, m):
    """Edges of the minimal-cost backtrace DAG, keyed by source cell.

    An edge survives iff it is tight (takes its target's DP value) and its
    target can still reach (n, m) along tight edges.
    """
    back = [[False] * (m + 1) for _ in range(n + 1)]
    back[n][m] = True
    edges: dict[tuple[int, int], list[tuple[int, tuple[int, int]]]] = {}
    for total in range(n + m - 1, -1, -1):
        lo = max(0, total - m)
        hi = min(n, total)
        for i in range(lo, hi + 1):
            j = total - i
            cell_edges = []
            if i < n and j < m and diag[i][j] is not None:
                if dist[i][j] + diag[i][j] == dist[i + 1][j + 1] and back[i + 1][j + 1]:
                    cell_edges.append((_DIAG, (i + 1, j + 1)))
            if i < n and dist[i][j] + 1 == dist[i + 1][j] and back[i + 1][j]:
                cell_edges.append((_DEL, (i + 1, j)))
            if j < m and dist[i][j] + 1 == dist[i][j + 1] and back[i][j + 1]:
                cell_edges.append((_INS, (i, j + 1)))
            if cell_edges:
                back[i][j] = True
                edges[(i, j)] = cell_edges
    if not back[0][0] and (n, m) != (0, 0):
        raise InternalInvariantError("alignment DAG has no start-to-end path")
    return edges


def _select_best_path(edges, ref_payload, hyp_payload, n, m) -> list[int]:
    """Gap-minimal path through the optimal-edge DAG, ties broken lexically.

    Phases: 0 before the first correct word-boundary step, 1 between the
    first and last, 2 after the last.  Deletions and insertions cost 1 only
    in phase 1; correct word-boundary steps may advance 0->1, 0->2, 1->2 and
    are forbidden in phase 2.  Suffix distances are computed with Dijkstra
    on the reversed graph; the walk then greedily picks the smallest move
    (diagonal < deletion < insertion) that still attains the optimum.
    """

    def is_cwb(i, j):
        a, b = ref_payload[i], hyp_payload[j]
        return (
            isinstance(a, Boundary)
            and isinstance(b, Boundary)
            and a.kind is BoundaryKind.WORD
            and b.kind is BoundaryKind.WORD
        )

    # Suffix gap distance h[(i, j, phase)] via backward Dijkstra.
    INF = float("inf")
    h: dict[tuple[int, int, int], float] = {}
    pq: list[tuple[float, int, int, int]] = []
    for p in (0, 1, 2):
        h[(n, m, p)] = 0.0
        heapq.heappush(pq, (0.0, n, m, p))

    # Reverse adjacency: for each target cell, the edges arriving there.
    rev: dict[tuple[int, int], list[tuple[tuple[int, int], int, bool]]] = {}
    for src, cell_edges in edges.items():
        for move, tgt in cell_edges:
            i, j = src
            cwb = move == _DIAG and is_cwb(i, j)
            rev.setdefault(tgt, []).append((src, move, cwb))

    while pq:
        d, i, j, p = heapq.heappop(pq)
        if d > h.get((i, j, p), INF):
            continue
        for (si, sj), move, cwb in rev.get((i, j), []):
            if cwb:
                # p is the phase after the step; sources allowed: 0->1, 0->2, 1->1, 1->2
                sources = {1: (0, 1), 2: (0, 1)}.get(p, ())
                for sp in sources:
                    if d < h.get((si, sj, sp), INF):
                        h[(si, sj, sp)] = d
                        heapq.heappush(pq, (d, si, sj, sp))
            else:
                w = 1.0 if (move != _DIAG and p == 1) else 0.0
                if d + w < h.get((si, sj, p), INF):
                    h[(si, sj, p)] = d + w
                    heapq.heappush(pq, (d + w, si, sj, p))

    target = h.get((0, 0, 0), INF)
    if target is INF:
        raise InternalInvariantError("gap graph lost the optimal path")

    # Forward walk: track the reachable phases with their best prefix gaps.
    moves: list[int] = []
    pm: dict[int, float] = {0: 0.0}
    i = j = 0
    while (i, j) != (n, m):
        cell_edges = sorted(edges[(i, j)], key=lambda e: e[0])
        taken = False
        for move, (ti, tj) in cell_edges:
            cwb = move == _DIAG and is_cwb(i, j)
            pm2: dict[int, float] = {}
            for p, acc in pm.items():
                if cwb:
                    if p in (0, 1):
                        for p2 in (1, 2):
                            if acc < pm2.get(p2, INF):
                                pm2[p2] = acc
                else:
                    w = 1.0 if (move != _DIAG and p == 1) else 0.0
                    if acc + w < pm2.get(p, INF):
                        pm2[p] = acc + w
            best = min(
                (acc + h.get((ti, tj, p), INF) for p, acc in pm2.items()),
                default=INF,
            )
            if best == target:
                moves.append(move)
                pm = pm2
                i, j = ti, tj
                taken = True
                break
        if not taken:
            raise InternalInvariantError("no move preserves the gap optimum")
    return moves


def recombine(alignment: PhoneAlignment, ref_words: list[str], hyp_words: list[str]) -> SpanResult:
    """Turn a phone alignment back into word-level labels for the span.

    Correct-aligned word boundary pairs close a segment; the words covered by
    a segment become one substitution (1:1) or substitution span entry, and a
    1:1 segment whose two words are identical is relabeled correct (the phone
    stage recovered a match the word-level tie policy wasted).  A word whose
    closing boundary passes while nothing has been scanned on the other side
    becomes a deletion or insertion.  Finally, a segment side with exactly
    one extra syllable sheds an edge word when that word is monosyllabic and
    none of its phones aligned (at most one split per side).
    """
    n_ref_words = len(ref_words)
    n_hyp_words = len(hyp_words)
    syl_ref = [0] * n_ref_words
    syl_hyp = [0] * n_hyp_words
    aligned_ref: set[int] = set()
    aligned_hyp: set[int] = set()
    for st in alignment.steps:
        for tok, syl, aligned in ((st.ref, syl_ref, aligned_ref), (st.hyp, syl_hyp, aligned_hyp)):
            if tok is None:
                continue
            if isinstance(tok.payload, Boundary):
                if tok.payload.kind is BoundaryKind.SYLLABLE:
                    syl[tok.word_index] += 1
            elif st.label in (AlignLabel.COR, AlignLabel.SUB):
                aligned.add(tok.word_index)

    entries: list[SpanEntry] = []
    ref_done = 0
    hyp_done = 0
    pending_ref: list[int] = []
    pending_hyp: list[int] = []

    def emit(ref_words: list[int], hyp_words: list[int], label: AlignLabel):
        nonlocal ref_done, hyp_done
        if ref_words:
            if ref_words[0] != ref_done or ref_words != list(range(ref_words[0], ref_words[-1] + 1)):
                raise InternalInvariantError("recombination broke reference word tiling")
            ref_range = (ref_words[0], ref_words[-1] + 1)
            ref_done = ref_range[1]
        else:
            ref_range = (ref_done, ref_done)
        if hyp_words:
            if hyp_words[0] != hyp_done or hyp_words != list(range(hyp_words[0], hyp_words[-1] + 1)):
                raise InternalInvariantError("recombination broke hypothesis word tiling")
            hyp_range = (hyp_words[0], hyp_words[-1] + 1)
            hyp_done = hyp_range[1]
        else:
            hyp_range = (hyp_done, hyp_done)
        entries.append(SpanEntry(ref_range, hyp_range, label))

    def flush():
        nonlocal pending_ref, pending_hyp
        if pending_ref and pending_hyp:
            split = _syllable_split(pending_ref, pending_hyp, syl_ref, syl_hyp, aligned_ref, aligned_hyp)
            if split is not None:
                side, word = split
                if side == "ref":
                    if word == pending_ref[0]:
                        emit([word], [], AlignLabel.DEL)
                        pending_ref = pending_ref[1:]
                        _emit_segment()
                    else:
                        pending_ref = pending_ref[:-1]
                        _emit_segment()
                        emit([word], [], AlignLabel.DEL)
                else:
                    if word == pending_hyp[0]:
                        emit([], [word], AlignLabel.INS)
                        pending_hyp = pending_hyp[1:]
                        _emit_segment()
                    else:
                        pending_hyp = pending_hyp[:-1]
                        _emit_segment()
                        emit([], [word], AlignLabel.INS)
            else:
                _emit_segment()
        elif pending_ref:
            for w in pending_ref:
                emit([w], [], AlignLabel.DEL)
        elif pending_hyp:
            for w in pending_hyp:
                emit([], [w], AlignLabel.INS)
        pending_ref = []
        pending_hyp = []

    def _emit_segment():
        if len(pending_ref) == 1 and len(pending_hyp) == 1:
            same = ref_words[pending_ref[0]] == hyp_words[pending_hyp[0]]
            label = AlignLabel.COR if same else AlignLabel.SUB
        else:
            label = AlignLabel.SUBSPAN
        emit(pending_ref, pending_hyp, label)

    for st in alignment.steps:
        closure = (
            st.label is AlignLabel.COR
            and st.ref is not None
            and is_word_boundary(st.ref.payload)
        )
        if closure:
            flush()
            continue
        if st.ref is not None and not is_word_boundary(st.ref.payload):
            w = st.ref.word_index
            if not pending_ref or pending_ref[-1] != w:
                pending_ref.append(w)
        if st.hyp is not None and not is_word_boundary(st.hyp.payload):
            w = st.hyp.word_index
            if not pending_hyp or pending_hyp[-1] != w:
                pending_hyp.append(w)
        if (
            st.label is AlignLabel.DEL
            and st.ref is not None
            and is_word_boundary(st.ref.payload)
            and not pending_hyp
            and pending_ref
        ):
            for w in pending_ref:
                emit([w], [], AlignLabel.DEL)
            pending_ref = []
        if (
            st.label is AlignLabel.INS
            and st.hyp is not None
            and is_word_boundary(st.hyp.payload)
            and not pending_ref
            and pending_hyp
        ):
            for w in pending_hyp:
                emit([], [w], AlignLabel.INS)
            pending_hyp = []
    flush()

    if ref_done != n_ref_words or hyp_done != n_hyp_words:
        raise InternalInvariantError(
            f"recombination covered {ref_done}/{n_ref_words} reference and "
            f"{hyp_done}/{n_hyp_words} hypothesis words"
        )
    return SpanResult(tuple(entries))


@dataclass(frozen=True, slots=True)
class LabeledUnit:
    """Word-level alignment unit in utterance coordinates."""

    ref_range: tuple[int, int]
    hyp_range: tuple[int, int]
    label: AlignLabel

    def ref_size(self) -> int:
        return self.ref_range[1] - self.ref_range[0]

    def hyp_size(self) -> int:
        return self.hyp_range[1] - self.hyp_range[0]


@dataclass(frozen=True)
class RecombinedAlignment:
    """A whole utterance after span re-alignment (or a plain word alignment

    when the phonetic stage is disabled: every unit then covers at most one
    word per side).
    """

    units: tuple[LabeledUnit, ...]
    ref_len: int
    hyp_len: int


def recombine_utterance(alignment, spans, span_results) -> RecombinedAlignment:
    """Splice per-span recombination results back into the word alignment.

    `spans` and `span_results` run in parallel; pairs outside any span keep
    their original labels as single-word units.
    """
    units: list[LabeledUnit] = []
    by_start = {span.pair_start: (span, result) for span, result in zip(spans, span_results)}
    idx = 0
    pairs = alignment.pairs
    while idx < len(pairs):
        if idx in by_start:
            span, result = by_start[idx]
            for entry in result.entries:
                units.append(
                    LabeledUnit(
                        (span.ref_start + entry.ref_range[0], span.ref_start + entry.ref_range[1]),
                        (span.hyp_start + entry.hyp_range[0], span.hyp_start + entry.hyp_range[1]),
                        entry.label,
                    )
                )
            idx = span.pair_end
            continue
        pair = pairs[idx]
        ref_range = (pair.ref_index, pair.ref_index + 1) if pair.ref_index is not None else None
        hyp_range = (pair.hyp_index, pair.hyp_index + 1) if pair.hyp_index is not None else None
        if ref_range is None:
            ref_pos = units[-1].ref_range[1] if units else 0
            ref_range = (ref_pos, ref_pos)
        if hyp_range is None:
            hyp_pos = units[-1].hyp_range[1] if units else 0
            hyp_range = (hyp_pos, hyp_pos)
        units.append(LabeledUnit(ref_range, hyp_range, pair.label))
        idx += 1
    return RecombinedAlignment(tuple(units), alignment.ref_len, alignment.hyp_len)


def _syllable_split(pending_ref, pending_hyp, syl_ref, syl_hyp, aligned_ref, aligned_hyp):
    """Pick the word to shed from a segment, or None.

    Fires when one side carries exactly one extra syllable and an edge word
    of that side is a monosyllabic word none of whose phones aligned.
    """
    sr = sum(syl_ref[w] for w in pending_ref)
    sh = sum(syl_hyp[w] for w in pending_hyp)
    if sr == sh + 1 and len(pending_ref) >= 2:
        for w in (pending_ref[0], pending_ref[-1]):
            if syl_ref[w] == 1 and w not in aligned_ref:
                return ("ref", w)
    if sh == sr + 1 and len(pending_hyp) >= 2:
        for w in (pending_hyp[0], pending_hyp[-1]):
            if syl_hyp[w] == 1 and w not in aligned_hyp:
                return ("hyp", w)
    return None
