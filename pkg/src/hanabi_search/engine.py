"""Hanabi referee: state, legality, transitions, scoring, knowledge tracking,
and information-set sampling primitives.

Encodings (chosen for speed in search inner loops):

* A card identity is an int in ``0..24``: ``colour * 5 + (value - 1)``.
  Helpers :func:`mk_card`, :func:`card_colour`, :func:`card_value`.
* Per-slot knowledge is an int bitmask: bits 0-4 = possible colours,
  bits 5-9 = possible values, bit 10 = "hinted playable" convention mark,
  bit 11 = "hinted discardable" convention mark.
* An action is an int: ``0..4`` play slot, ``5..9`` discard slot-5,
  ``10 + target*10 + c`` hint, where criterion ``c`` is 0-4 for a colour
  and 5-9 for value ``c - 4``.

Randomness: the engine never reads global randomness.  Callers pass
``random.Random`` streams; per-stream seeds are derived with
:func:`split_seed` (SplitMix64) so experiments replay bit-exactly.
"""

from __future__ import annotations

import json
import random
from typing import NamedTuple, Optional

COLOURS = ("red", "blue", "green", "white", "yellow")
COLOUR_LETTERS = "RBGWY"
NUM_COLOURS = 5
NUM_VALUES = 5
NUM_IDENTITIES = 25
VALUE_MULTIPLICITY = (3, 2, 2, 2, 1)  # copies of value 1..5 per suit
FULL_COUNTS = tuple(VALUE_MULTIPLICITY[i % 5] for i in range(NUM_IDENTITIES))
DECK_TOTAL = 50
MAX_HINTS = 8
MAX_LIVES = 3
PERFECT_SCORE = 25
HAND_SIZE = {2: 5, 3: 5, 4: 4, 5: 4}

# Knowledge bitmask layout.
COLOUR_MASK_ALL = 0x1F
VALUE_MASK_ALL = 0x3E0
KNOW_ALL = 0x3FF
PLAYABLE_OVERRIDE = 1 << 10
DISCARDABLE_OVERRIDE = 1 << 11
OVERRIDE_BITS = PLAYABLE_OVERRIDE | DISCARDABLE_OVERRIDE

# Bits a knowledge mask must contain to admit identity i.
IDENTITY_REQ = tuple((1 << (i // 5)) | (1 << (5 + i % 5)) for i in range(NUM_IDENTITIES))

# Diagnostic counters (e.g. slot fills that had to relax their knowledge).
DIAGNOSTICS = {"relaxed_slot_fills": 0}


class EngineError(Exception):
    """Referee-level contract violation (corrupted state or knowledge)."""


class IllegalActionError(EngineError):
    """Action not legal in the given state."""


# ---------------------------------------------------------------------------
# Cards, knowledge, actions
# ---------------------------------------------------------------------------

def mk_card(colour: int, value: int) -> int:
    return colour * 5 + (value - 1)


def card_colour(card: int) -> int:
    return card // 5


def card_value(card: int) -> int:
    return card % 5 + 1


def card_str(card: int) -> str:
    return f"{COLOUR_LETTERS[card // 5]}{card % 5 + 1}"


def parse_card(text: str) -> int:
    colour = COLOUR_LETTERS.index(text[0])
    return mk_card(colour, int(text[1]))


def knowledge_admits(know: int, card: int) -> bool:
    req = IDENTITY_REQ[card]
    return know & req == req


def know_colours(know: int) -> tuple:
    return tuple(c for c in range(NUM_COLOURS) if know & (1 << c))


def know_values(know: int) -> tuple:
    return tuple(v for v in range(1, NUM_VALUES + 1) if know & (1 << (4 + v)))


def know_colour_fixed(know: int) -> Optional[int]:
    cs = know_colours(know)
    return cs[0] if len(cs) == 1 else None


def know_value_fixed(know: int) -> Optional[int]:
    vs = know_values(know)
    return vs[0] if len(vs) == 1 else None


PLAY, DISCARD, HINT = "play", "discard", "hint"


def play_action(slot: int) -> int:
    return slot


def discard_action(slot: int) -> int:
    return 5 + slot


def hint_colour_action(target: int, colour: int) -> int:
    return 10 + target * 10 + colour


def hint_value_action(target: int, value: int) -> int:
    return 10 + target * 10 + 4 + value


def action_kind(action: int) -> str:
    if action < 5:
        return PLAY
    if action < 10:
        return DISCARD
    return HINT


def action_slot(action: int) -> int:
    return action if action < 5 else action - 5


def action_target(action: int) -> int:
    return (action - 10) // 10


def hint_criterion(action: int):
    """Return ("colour", c) or ("value", v) for a hint action."""
    c = (action - 10) % 10
    return ("colour", c) if c < 5 else ("value", c - 4)


def action_to_str(action: int) -> str:
    kind = action_kind(action)
    if kind == PLAY:
        return f"play {action}"
    if kind == DISCARD:
        return f"discard {action - 5}"
    dim, crit = hint_criterion(action)
    label = COLOURS[crit] if dim == "colour" else str(crit)
    return f"hint {action_target(action)} {label}"


def action_from_str(text: str) -> int:
    parts = text.split()
    if parts[0] == "play":
        return play_action(int(parts[1]))
    if parts[0] == "discard":
        return discard_action(int(parts[1]))
    if parts[0] == "hint":
        target = int(parts[1])
        if parts[2].isdigit():
            return hint_value_action(target, int(parts[2]))
        return hint_colour_action(target, COLOURS.index(parts[2]))
    raise ValueError(f"unparseable action {text!r}")


class Outcome(NamedTuple):
    """What every player at the table can observe about a move."""

    player: int
    action: int
    card: Optional[int]       # identity revealed by a play/discard
    success: Optional[bool]   # play in sequence? (plays only)
    touched: Optional[tuple]  # slots touched by a hint
    drew: bool                # a replacement card was drawn


# ---------------------------------------------------------------------------
# Game state
# ---------------------------------------------------------------------------

class GameState:
    """Full referee-visible state.  Treat as immutable: the public ops copy
    before mutating.  In-place mutation is reserved for search internals that
    own their scratch copy."""

    __slots__ = ("n_players", "hand_size", "hands", "knows", "deck", "discard",
                 "tableau", "hints", "lives", "current", "final_turns",
                 "move_index")

    def __init__(self, n_players, hand_size, hands, knows, deck, discard,
                 tableau, hints, lives, current, final_turns, move_index):
        self.n_players = n_players
        self.hand_size = hand_size
        self.hands = hands            # per player: list of card ids (-1 = empty)
        self.knows = knows            # per player: list of knowledge masks
        self.deck = deck              # list of card ids; deterministic draw pops the end
        self.discard = discard        # counts per identity
        self.tableau = tableau        # top value per suit
        self.hints = hints
        self.lives = lives
        self.current = current
        self.final_turns = final_turns
        self.move_index = move_index

    def copy(self) -> "GameState":
        new = GameState.__new__(GameState)
        new.n_players = self.n_players
        new.hand_size = self.hand_size
        new.hands = [list(h) for h in self.hands]
        new.knows = [list(k) for k in self.knows]
        new.deck = list(self.deck)
        new.discard = list(self.discard)
        new.tableau = list(self.tableau)
        new.hints = self.hints
        new.lives = self.lives
        new.current = self.current
        new.final_turns = self.final_turns
        new.move_index = self.move_index
        return new

    def view(self, player: int) -> "PlayerView":
        return PlayerView(self, player)

    def __repr__(self):
        hands = " | ".join(
            " ".join(card_str(c) if c >= 0 else "--" for c in h) for h in self.hands)
        return (f"<GameState p{self.current} score={score(self)} hints={self.hints} "
                f"lives={self.lives} deck={len(self.deck)} hands=[{hands}]>")


def split_seed(seed: int, *path: int) -> int:
    """Derive an independent 64-bit stream seed from (seed, path) via SplitMix64."""
    x = seed & 0xFFFFFFFFFFFFFFFF
    for step in path:
        x = (x + 0x9E3779B97F4A7C15 * (step + 1)) & 0xFFFFFFFFFFFFFFFF
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
        x = z ^ (z >> 31)
    return x


def new_game(n_players: int, seed: int) -> GameState:
    """Deal a fresh game.  Identical (n_players, seed) gives a bit-identical state."""
    if n_players not in HAND_SIZE:
        raise EngineError(f"player count must be 2..5, got {n_players}")
    rng = random.Random(split_seed(seed, 0))
    deck = [i for i in range(NUM_IDENTITIES) for _ in range(FULL_COUNTS[i])]
    rng.shuffle(deck)
    hand_size = HAND_SIZE[n_players]
    hands = [[deck.pop() for _ in range(hand_size)] for _ in range(n_players)]
    knows = [[KNOW_ALL] * hand_size for _ in range(n_players)]
    return GameState(n_players, hand_size, hands, knows, deck,
                     [0] * NUM_IDENTITIES, [0] * NUM_COLOURS,
                     MAX_HINTS, MAX_LIVES, 0, None, 0)


def score(state: GameState) -> int:
    return sum(state.tableau)


def is_terminal(state: GameState) -> bool:
    return (state.lives == 0 or state.final_turns == 0
            or state.tableau[0] + state.tableau[1] + state.tableau[2]
            + state.tableau[3] + state.tableau[4] == PERFECT_SCORE)


def _legal_actions_fast(state: GameState) -> list:
    actor = state.current
    hand = state.hands[actor]
    actions = [s for s in range(len(hand)) if hand[s] >= 0]
    actions += [5 + s for s in range(len(hand)) if hand[s] >= 0]
    if state.hints > 0:
        n = state.n_players
        for off in range(1, n):
            q = (actor + off) % n
            colours_seen = 0
            values_seen = 0
            for c in state.hands[q]:
                if c >= 0:
                    colours_seen |= 1 << (c // 5)
                    values_seen |= 1 << (c % 5)
            base = 10 + q * 10
            for col in range(NUM_COLOURS):
                if colours_seen & (1 << col):
                    actions.append(base + col)
            for v in range(NUM_VALUES):
                if values_seen & (1 << v):
                    actions.append(base + 5 + v)
    return actions


def legal_actions(state: GameState, player: Optional[int] = None) -> list:
    if player is not None and player != state.current:
        raise IllegalActionError(f"player {player} is not to move")
    if is_terminal(state):
        raise IllegalActionError("state is terminal")
    return _legal_actions_fast(state)


def _unseen_counts(state: GameState, player: int) -> list:
    """Census of cards the player cannot see: 50 minus discard, tableau and
    the other players' hands (the player's own hand and the deck are unseen)."""
    counts = list(FULL_COUNTS)
    discard = state.discard
    for i in range(NUM_IDENTITIES):
        counts[i] -= discard[i]
    for colour in range(NUM_COLOURS):
        top = state.tableau[colour]
        base = colour * 5
        for v in range(top):
            counts[base + v] -= 1
    for q in range(state.n_players):
        if q != player:
            for c in state.hands[q]:
                if c >= 0:
                    counts[c] -= 1
    return counts


def _record_convention_mark(state: GameState, actor: int, target: int, slot: int) -> None:
    """After a single-touch hint to the next player, mark what the convention
    lets the target conclude: playable now, or (when every currently playable
    identity it admits is visibly exhausted) discardable."""
    know = state.knows[target][slot] & ~OVERRIDE_BITS
    tableau = state.tableau
    playable_ids = [mk_card(c, tableau[c] + 1) for c in range(NUM_COLOURS)
                    if tableau[c] < 5 and knowledge_admits(know, mk_card(c, tableau[c] + 1))]
    if playable_ids:
        unseen = _unseen_counts(state, target)
        if any(unseen[i] > 0 for i in playable_ids):
            know |= PLAYABLE_OVERRIDE
        else:
            know |= DISCARDABLE_OVERRIDE
    state.knows[target][slot] = know


def _draw_into_slot(state: GameState, player: int, slot: int, rng) -> bool:
    """Replace a consumed slot from the deck.  Search passes an rng so the
    draw is uniform over the remaining deck; the public deterministic path
    pops the end.  Starts the final-round countdown when the deck empties."""
    deck = state.deck
    if deck:
        if rng is None:
            card = deck.pop()
        else:
            i = rng.randrange(len(deck))
            card = deck[i]
            deck[i] = deck[-1]
            deck.pop()
        state.hands[player][slot] = card
        state.knows[player][slot] = KNOW_ALL
        if not deck and state.final_turns is None:
            state.final_turns = state.n_players
        return True
    del state.hands[player][slot]
    del state.knows[player][slot]
    return False


def apply_inplace(state: GameState, action: int, rng=None, defer_draw: bool = False) -> Outcome:
    """Mutating transition; no legality checks.  Search owns its scratch state
    and calls this directly; everything else should use :func:`apply`."""
    actor = state.current
    counting_down = state.final_turns is not None
    card = success = None
    touched = None
    drew = False
    if action < 10:
        slot = action if action < 5 else action - 5
        card = state.hands[actor][slot]
        if action < 5:
            colour = card // 5
            value = card % 5 + 1
            success = state.tableau[colour] + 1 == value
            if success:
                state.tableau[colour] = value
                if value == 5 and state.hints < MAX_HINTS:
                    state.hints += 1
            else:
                state.lives -= 1
                state.discard[card] += 1
        else:
            state.discard[card] += 1
            if state.hints < MAX_HINTS:
                state.hints += 1
        if defer_draw:
            state.hands[actor][slot] = -1
            state.knows[actor][slot] = KNOW_ALL
        else:
            drew = _draw_into_slot(state, actor, slot, rng)
    else:
        state.hints -= 1
        target = (action - 10) // 10
        crit = (action - 10) % 10
        hand = state.hands[target]
        knows = state.knows[target]
        hits = []
        if crit < 5:
            bit = 1 << crit
            for i, c in enumerate(hand):
                if c >= 0:
                    if c // 5 == crit:
                        hits.append(i)
                        knows[i] = (knows[i] & ~COLOUR_MASK_ALL) | bit
                    else:
                        knows[i] &= ~bit
        else:
            bit = 1 << crit  # value v occupies bit 5 + (v-1) == crit
            for i, c in enumerate(hand):
                if c >= 0:
                    if c % 5 == crit - 5:
                        hits.append(i)
                        knows[i] = (knows[i] & ~VALUE_MASK_ALL) | bit
                    else:
                        knows[i] &= ~bit
        touched = tuple(hits)
        if len(hits) == 1 and target == (actor + 1) % state.n_players:
            _record_convention_mark(state, actor, target, hits[0])
    if counting_down:
        state.final_turns -= 1
    state.current = (actor + 1) % state.n_players
    state.move_index += 1
    return Outcome(actor, action, card, success, touched, drew)


def apply(state: GameState, action: int) -> tuple:
    """Pure transition: validates the action, returns (new state, outcome)."""
    if action not in legal_actions(state):
        raise IllegalActionError(f"{action_to_str(action)} is illegal here")
    new = state.copy()
    outcome = apply_inplace(new, action)
    return new, outcome


# ---------------------------------------------------------------------------
# Player views (information sets)
# ---------------------------------------------------------------------------

class PlayerView:
    """The projection of a GameState visible to one player: everything except
    their own card identities and the deck contents/order.

    Wraps the referee state without copying; views are transient snapshots
    valid until the backing state is replaced.  Agents must only use this API.
    """

    __slots__ = ("_state", "player", "_unseen", "_dead_tops", "_probs")

    def __init__(self, state: GameState, player: int):
        self._state = state
        self.player = player
        self._unseen = None
        self._dead_tops = None
        self._probs = {}

    # -- public zone accessors -------------------------------------------
    @property
    def n_players(self):
        return self._state.n_players

    @property
    def hints(self):
        return self._state.hints

    @property
    def lives(self):
        return self._state.lives

    @property
    def tableau(self):
        return self._state.tableau

    @property
    def discard_counts(self):
        return self._state.discard

    @property
    def deck_size(self):
        return len(self._state.deck)

    @property
    def current_player(self):
        return self._state.current

    @property
    def final_turns(self):
        return self._state.final_turns

    @property
    def move_index(self):
        return self._state.move_index

    def score(self) -> int:
        return score(self._state)

    def is_terminal(self) -> bool:
        return is_terminal(self._state)

    def legal_actions(self) -> list:
        return _legal_actions_fast(self._state)

    def hand_size_of(self, q: int) -> int:
        return sum(1 for c in self._state.hands[q] if c >= 0)

    def slot_count(self, q: Optional[int] = None) -> int:
        return len(self._state.hands[self.player if q is None else q])

    def own_knowledge(self, slot: int) -> int:
        return self._state.knows[self.player][slot]

    def visible_hand(self, q: int) -> list:
        if q == self.player:
            raise EngineError("a player cannot see their own cards")
        return self._state.hands[q]

    def visible_know(self, q: int) -> list:
        return self._state.knows[q]

    def fingerprint(self) -> tuple:
        s = self._state
        others = tuple(
            (tuple(s.hands[q]), tuple(s.knows[q]))
            for q in range(s.n_players) if q != self.player)
        return (s.n_players, self.player, s.hints, s.lives, tuple(s.tableau),
                tuple(s.discard), len(s.deck), s.current, s.final_turns,
                s.move_index, tuple(s.knows[self.player]), others)

    # -- census and probabilities ----------------------------------------
    def unseen_counts(self) -> list:
        if self._unseen is None:
            self._unseen = _unseen_counts(self._state, self.player)
        return self._unseen

    def dead_tops(self) -> list:
        """Per suit, the highest value still reachable given the discard pile."""
        if self._dead_tops is None:
            tops = []
            discard = self._state.discard
            for colour in range(NUM_COLOURS):
                top = self._state.tableau[colour]
                base = colour * 5
                while top < 5 and FULL_COUNTS[base + top] - discard[base + top] > 0:
                    top += 1
                tops.append(top)
            self._dead_tops = tops
        return self._dead_tops

    def slot_probabilities(self, slot: int, convention: bool = False) -> tuple:
        """(P playable, P discardable, P playable-plus-one) for an own slot,
        uniform over identities consistent with knowledge and the census."""
        know = self._state.knows[self.player][slot]
        key = (slot, convention, know)
        cached = self._probs.get(key)
        if cached is not None:
            return cached
        if convention:
            if know & PLAYABLE_OVERRIDE:
                result = (1.0, 0.0, 0.0)
                self._probs[key] = result
                return result
            if know & DISCARDABLE_OVERRIDE:
                result = (0.0, 1.0, 0.0)
                self._probs[key] = result
                return result
        unseen = self.unseen_counts()
        dead = self.dead_tops()
        tableau = self._state.tableau
        total = play = disc = plus = 0
        for i in range(NUM_IDENTITIES):
            w = unseen[i]
            if w and know & IDENTITY_REQ[i] == IDENTITY_REQ[i]:
                total += w
                top = tableau[i // 5]
                v = i % 5 + 1
                if v == top + 1:
                    play += w
                elif v <= top or v > dead[i // 5]:
                    disc += w
                if v == top + 2:
                    plus += w
        if total == 0:
            raise EngineError(f"slot {slot} admits no identity: corrupted knowledge")
        result = (play / total, disc / total, plus / total)
        self._probs[key] = result
        return result

    # -- information-set sampling ----------------------------------------
    def sample_state(self, rng, shuffle_deck: bool = True) -> GameState:
        """A full state drawn from this information set: own hand resampled
        against knowledge and census, deck absorbing the swap."""
        state = self._state.copy()
        redeterminize_hand(state, self.player, rng, shuffle_deck=shuffle_deck)
        return state

    def roll_forward_hint(self, action: int) -> "PlayerView":
        """This player's view after giving a hint (hints draw no cards, so the
        roll-forward is deterministic and stays inside the information set)."""
        if action < 10:
            raise EngineError("only hint actions roll forward deterministically")
        state = self._state.copy()
        apply_inplace(state, action)
        return PlayerView(state, self.player)


def card_probability(view: PlayerView, slot: int, predicate: str,
                     convention: bool = False) -> float:
    """Probability that the viewing player's card in `slot` satisfies the
    predicate: "playable", "discardable" or "playable_plus_one"."""
    probs = view.slot_probabilities(slot, convention)
    if predicate == "playable":
        return probs[0]
    if predicate == "discardable":
        return probs[1]
    if predicate == "playable_plus_one":
        return probs[2]
    raise ValueError(f"unknown predicate {predicate!r}")


# ---------------------------------------------------------------------------
# Determinization
# ---------------------------------------------------------------------------

_MASK_CANDIDATES = {}


def _mask_candidates(know: int) -> tuple:
    key = know & KNOW_ALL
    cached = _MASK_CANDIDATES.get(key)
    if cached is None:
        cached = tuple(i for i in range(NUM_IDENTITIES)
                       if key & IDENTITY_REQ[i] == IDENTITY_REQ[i])
        _MASK_CANDIDATES[key] = cached
    return cached


def _completions(slot_idx, cand_sets, counts, memo, relevant):
    if slot_idx == len(cand_sets):
        return 1
    key = (slot_idx, tuple(counts[i] for i in relevant))
    hit = memo.get(key)
    if hit is not None:
        return hit
    total = 0
    for i in cand_sets[slot_idx]:
        c = counts[i]
        if c:
            counts[i] = c - 1
            total += c * _completions(slot_idx + 1, cand_sets, counts, memo, relevant)
            counts[i] = c
    memo[key] = total
    return total


def sample_hand(counts: list, masks: list, rng) -> Optional[list]:
    """Sample slot identities uniformly over joint assignments of physical
    cards consistent with each slot's knowledge and the pool `counts`.

    Unconstrained slots are drawn sequentially (exactly uniform); constrained
    slots are drawn with exact completion-count weighting so interacting
    constraints do not bias the joint distribution.  Returns None when no
    consistent assignment exists.  `counts` is decremented in place.
    """
    order = []
    free = []
    for idx, know in enumerate(masks):
        if know & KNOW_ALL == KNOW_ALL:
            free.append(idx)
        else:
            order.append(idx)
    result = [-1] * len(masks)
    if order:
        cand_sets = [_mask_candidates(masks[i]) for i in order]
        relevant = sorted({i for s in cand_sets for i in s})
        memo = {}
        for pos, idx in enumerate(order):
            weights = []
            total = 0
            for i in cand_sets[pos]:
                c = counts[i]
                if c:
                    counts[i] = c - 1
                    w = c * _completions(pos + 1, cand_sets, counts, memo, relevant)
                    counts[i] = c
                else:
                    w = 0
                weights.append(w)
                total += w
            if total == 0:
                for j in order[:pos]:
                    counts[result[j]] += 1
                return None
            r = rng.randrange(total)
            for i, w in zip(cand_sets[pos], weights):
                r -= w
                if r < 0:
                    result[idx] = i
                    counts[i] -= 1
                    break
    remaining = sum(counts)
    for idx in free:
        r = rng.randrange(remaining)
        for i in range(NUM_IDENTITIES):
            r -= counts[i]
            if r < 0:
                result[idx] = i
                counts[i] -= 1
                remaining -= 1
                break
    return result


def redeterminize_hand(state: GameState, player: int, rng,
                       shuffle_deck: bool = True) -> None:
    """In place: resample the player's hand slots from their information set;
    the deck absorbs the swap.  Empty slots stay empty."""
    hand = state.hands[player]
    deck = state.deck
    counts = [0] * NUM_IDENTITIES
    for c in deck:
        counts[c] += 1
    held = []
    for i, c in enumerate(hand):
        if c >= 0:
            counts[c] += 1
            held.append(i)
    masks = [state.knows[player][i] for i in held]
    new_ids = sample_hand(counts, masks, rng)
    if new_ids is None:
        raise EngineError("no hand consistent with knowledge and census")
    for i in held:
        deck.append(hand[i])
    for i, card in zip(held, new_ids):
        deck.remove(card)
        hand[i] = card
    if shuffle_deck:
        rng.shuffle(deck)


def determinize(state: GameState, perspective: int, rng) -> GameState:
    """A state sampled uniformly from `perspective`'s information set: their
    hand and the deck are resampled; all other zones are unchanged."""
    new = state.copy()
    redeterminize_hand(new, perspective, rng, shuffle_deck=True)
    return new


def remove_incompatible_cards(state: GameState, player: int) -> GameState:
    """Drop any of the player's cards whose identity is no longer consistent
    with the visible zones (copies exhausted by discard/tableau/other hands),
    leaving empty slots.  Used when restoring a saved hand in search."""
    new = state.copy()
    avail = list(FULL_COUNTS)
    for i in range(NUM_IDENTITIES):
        avail[i] -= new.discard[i]
    for colour in range(NUM_COLOURS):
        base = colour * 5
        for v in range(new.tableau[colour]):
            avail[base + v] -= 1
    for q in range(new.n_players):
        if q != player:
            for c in new.hands[q]:
                if c >= 0:
                    avail[c] -= 1
    hand = new.hands[player]
    for i, c in enumerate(hand):
        if c >= 0:
            if avail[c] <= 0:
                hand[i] = -1
            else:
                avail[c] -= 1
    return new


def determinize_empty_slots(state: GameState, player: int, rng) -> GameState:
    """Fill the player's empty slots with deck cards consistent with each
    slot's knowledge.  Falls back to the whole deck when a slot's knowledge
    admits nothing left (counted in DIAGNOSTICS); drops the slot when the
    deck is exhausted."""
    new = state.copy()
    fill_empty_slots(new, player, rng)
    return new


def fill_empty_slots(state: GameState, player: int, rng) -> None:
    hand = state.hands[player]
    knows = state.knows[player]
    deck = state.deck
    empties = [i for i, c in enumerate(hand) if c < 0]
    if not empties:
        return
    drops = []
    for i in empties:
        if not deck:
            drops.append(i)
            continue
        know = knows[i]
        if know & KNOW_ALL == KNOW_ALL:
            j = rng.randrange(len(deck))
        else:
            candidates = [j for j, c in enumerate(deck) if knowledge_admits(know, c)]
            if candidates:
                j = candidates[rng.randrange(len(candidates))]
            else:
                DIAGNOSTICS["relaxed_slot_fills"] += 1
                j = rng.randrange(len(deck))
        card = deck[j]
        deck[j] = deck[-1]
        deck.pop()
        hand[i] = card
    for i in reversed(drops):
        del hand[i]
        del knows[i]
    if not deck and state.final_turns is None:
        state.final_turns = state.n_players


# ---------------------------------------------------------------------------
# Game-record serialization (one JSON line per move, bit-exact round-trip)
# ---------------------------------------------------------------------------

def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def outcome_to_dict(outcome: Outcome) -> dict:
    d = {"player": outcome.player, "action": action_to_str(outcome.action),
         "drew": outcome.drew}
    if outcome.card is not None:
        d["card"] = card_str(outcome.card)
    if outcome.success is not None:
        d["success"] = outcome.success
    if outcome.touched is not None:
        d["touched"] = list(outcome.touched)
    return d


def move_record_line(game_id, seed, n_players, move_index, player, action,
                     outcome, post_score, post_lives, post_hints) -> str:
    return _dumps({
        "gameId": game_id, "seed": seed, "nPlayers": n_players,
        "moveIndex": move_index, "player": player,
        "action": action_to_str(action), "outcome": outcome_to_dict(outcome),
        "postScore": post_score, "postLives": post_lives,
        "postHints": post_hints})


def final_record_line(game_id, score_value) -> str:
    return _dumps({"gameId": game_id, "terminal": True, "score": score_value})


def parse_record_line(line: str) -> dict:
    return json.loads(line)


def serialize_record(record: dict) -> str:
    return _dumps(record)
