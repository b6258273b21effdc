import random

import pytest

from hanabi_search import engine as E


def cards(*names):
    return [E.parse_card(n) for n in names]


def know_mask(colours=None, values=None, playable_mark=False, discardable_mark=False):
    """Build a knowledge bitmask from explicit colour/value possibility sets."""
    k = 0
    for c in range(5):
        if colours is None or E.COLOURS[c] in colours or c in (colours or ()):
            k |= 1 << c
    for v in range(1, 6):
        if values is None or v in (values or ()):
            k |= 1 << (4 + v)
    if playable_mark:
        k |= E.PLAYABLE_OVERRIDE
    if discardable_mark:
        k |= E.DISCARDABLE_OVERRIDE
    return k


def census_counts(state):
    counts = list(state.discard)
    for hand in state.hands:
        for c in hand:
            if c >= 0:
                counts[c] += 1
    for c in state.deck:
        counts[c] += 1
    for colour in range(5):
        for v in range(state.tableau[colour]):
            counts[colour * 5 + v] += 1
    return counts


def assert_census(state):
    assert census_counts(state) == list(E.FULL_COUNTS)


def make_state(hands, deck, tableau=None, discard=None, hints=8, lives=3,
               current=0, knows=None, final_turns=None, validate=True):
    """Construct an explicit referee state.  `hands` and `deck` are lists of
    card names; anything not placed must be accounted for by `discard` (a
    {card name: count} mapping) and `tableau` for the census to balance."""
    n = len(hands)
    hand_lists = [cards(*h) for h in hands]
    know_lists = ([list(k) for k in knows] if knows is not None
                  else [[E.KNOW_ALL] * len(h) for h in hand_lists])
    discard_counts = [0] * E.NUM_IDENTITIES
    for name, cnt in (discard or {}).items():
        discard_counts[E.parse_card(name)] += cnt
    state = E.GameState(
        n, E.HAND_SIZE.get(n, len(hand_lists[0]) or 4), hand_lists, know_lists,
        cards(*deck), discard_counts, list(tableau or [0] * 5),
        hints, lives, current, final_turns, 0)
    if validate:
        assert_census(state)
    return state


def pad_census_discard(hands, deck, tableau=None):
    """Discard counts that make hands+deck+tableau a legal 50-card census."""
    used = [0] * E.NUM_IDENTITIES
    for h in hands:
        for name in h:
            used[E.parse_card(name)] += 1
    for name in deck:
        used[E.parse_card(name)] += 1
    if tableau:
        for colour, top in enumerate(tableau):
            for v in range(top):
                used[colour * 5 + v] += 1
    out = {}
    for i in range(E.NUM_IDENTITIES):
        left = E.FULL_COUNTS[i] - used[i]
        assert left >= 0, f"overcommitted {E.card_str(i)}"
        if left:
            out[E.card_str(i)] = left
    return out


def random_playout_states(seed, n_games, skip=0.0):
    """Yield mid-game states from seeded random play (fuzzing corpus)."""
    rng = random.Random(seed)
    for _ in range(n_games):
        state = E.new_game(rng.choice([2, 3, 4, 5]), rng.randrange(2 ** 63))
        while not E.is_terminal(state):
            if rng.random() >= skip:
                yield state
            acts = E.legal_actions(state)
            state, _ = E.apply(state, acts[rng.randrange(len(acts))])


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
