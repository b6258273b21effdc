"""Heuristic rule library, the "playable now" hint convention, and the
baseline policy roster.

Rules map a player view to at most one action each; together they bound the
search branching factor (9 rules, so at most 9 candidate moves).  Policies
are total functions (view, rng) -> action used as baselines, rollout brains
and opponent models; the identifiers in POLICY_NAMES are the stable public
names.

Tie-breaking is deterministic throughout: hints prefer the next player to
play, then lower slots; when hinting a specific card the value dimension is
tried before colour; slot ties go to the lowest index.
"""

from __future__ import annotations

from . import engine as E

FULL_CONFIDENCE = 1.0 - 1e-12


def _offset_order(view):
    p, n = view.player, view.n_players
    return [(p + off) % n for off in range(1, n)]


def _truth_playable(view, q, slot):
    c = view.visible_hand(q)[slot]
    return c >= 0 and c % 5 + 1 == view.tableau[c // 5] + 1


def _truth_discardable(view, q, slot):
    c = view.visible_hand(q)[slot]
    if c < 0:
        return False
    v = c % 5 + 1
    return v <= view.tableau[c // 5] or v > view.dead_tops()[c // 5]


def _hint_touches(view, q, action):
    dim, crit = E.hint_criterion(action)
    hand = view.visible_hand(q)
    if dim == "colour":
        return [i for i, c in enumerate(hand) if c >= 0 and c // 5 == crit]
    return [i for i, c in enumerate(hand) if c >= 0 and c % 5 + 1 == crit]


def _best_slot(view, which, convention):
    """(slot, probability) maximising one of the slot predicates;
    which: 0 playable, 1 discardable."""
    best, best_p = 0, -1.0
    for i in range(view.slot_count()):
        p = view.slot_probabilities(i, convention)[which]
        if p > best_p:
            best, best_p = i, p
    return best, best_p


# ---------------------------------------------------------------------------
# Convention
# ---------------------------------------------------------------------------

def hint_violates_convention(view, action) -> bool:
    """True for a hint that would be a lie under the "playable now"
    convention: it touches exactly one of the next player's cards and that
    card is not currently playable."""
    q = E.action_target(action)
    if q != (view.player + 1) % view.n_players:
        return False
    touched = _hint_touches(view, q, action)
    if len(touched) != 1:
        return False
    return not _truth_playable(view, q, touched[0])


def filter_illegal_convention_hints(view, candidate_hints):
    """Drop candidate hints that would be false under the convention."""
    return [a for a in candidate_hints if not hint_violates_convention(view, a)]


def convention_overrides(view, hint_action, hint_actor):
    """What the convention lets the viewing player conclude from the last
    observed hint: (slot, "playable") when the touched card can still be a
    currently playable identity, (slot, "discardable") when every playable
    identity it admits is visibly exhausted, else None.

    Applies only to a hint from the immediately previous player touching
    exactly one of the viewer's cards.  The engine records the same
    conclusion on the slot's knowledge while applying the hint; this is the
    view-level computation for observers and tests.  `view` must be the
    viewer's view taken after the hint, `hint_action` the observed hint.
    """
    p = view.player
    if hint_actor != (p - 1) % view.n_players or E.action_target(hint_action) != p:
        return None
    dim, crit = E.hint_criterion(hint_action)
    touched = []
    for i in range(view.slot_count()):
        know = view.own_knowledge(i)
        if dim == "colour":
            hit = E.know_colours(know) == (crit,)
        else:
            hit = E.know_values(know) == (crit,)
        if hit:
            touched.append(i)
    if len(touched) != 1:
        return None
    slot = touched[0]
    know = view.own_knowledge(slot)
    tableau = view.tableau
    playable_ids = [E.mk_card(c, tableau[c] + 1) for c in range(E.NUM_COLOURS)
                    if tableau[c] < 5
                    and E.knowledge_admits(know, E.mk_card(c, tableau[c] + 1))]
    if not playable_ids:
        return None
    unseen = view.unseen_counts()
    if any(unseen[i] > 0 for i in playable_ids):
        return (slot, "playable")
    return (slot, "discardable")


# ---------------------------------------------------------------------------
# Branching-factor rules
# ---------------------------------------------------------------------------

def _info_gain(view, q, action):
    """(slot, dimension) pairs whose possibility set the hint would shrink."""
    dim, crit = E.hint_criterion(action)
    hand = view.visible_hand(q)
    knows = view.visible_know(q)
    gain = 0
    for i, c in enumerate(hand):
        if c < 0:
            continue
        know = knows[i]
        if dim == "colour":
            if c // 5 == crit:
                gain += E.know_colours(know) != (crit,)
            else:
                gain += bool(know & (1 << crit))
        else:
            if c % 5 + 1 == crit:
                gain += E.know_values(know) != (crit,)
            else:
                gain += bool(know & (1 << (4 + crit)))
    return gain


def _hint_candidates(view, q):
    base = 10 + q * 10
    colours = set()
    values = set()
    for c in view.visible_hand(q):
        if c >= 0:
            colours.add(c // 5)
            values.add(c % 5 + 1)
    for col in sorted(colours):
        yield base + col
    for v in sorted(values):
        yield base + 4 + v


def tell_most_information(view, convention=False):
    if view.hints == 0:
        return None
    best = None
    best_gain = 0
    for q in _offset_order(view):
        for action in _hint_candidates(view, q):
            if convention and hint_violates_convention(view, action):
                continue
            gain = _info_gain(view, q, action)
            if gain > best_gain:
                best, best_gain = action, gain
    return best


def _tell_about(view, convention, wants, require_unknown_dims=None,
                fresh_only=False):
    """Shared body of the Tell*/CompleteTell* rules: find the first card
    (next player first, low slot first) matching `wants` and hint one of its
    unknown dimensions."""
    if view.hints == 0:
        return None
    for q in _offset_order(view):
        hand = view.visible_hand(q)
        knows = view.visible_know(q)
        for i, c in enumerate(hand):
            if c < 0 or not wants(q, i):
                continue
            know = knows[i]
            if fresh_only and know & E.KNOW_ALL != E.KNOW_ALL:
                continue
            colour_known = E.know_colour_fixed(know) is not None
            value_known = E.know_value_fixed(know) is not None
            unknown = (not colour_known) + (not value_known)
            if unknown == 0:
                continue
            if require_unknown_dims is not None and unknown != require_unknown_dims:
                continue
            candidates = []
            if not value_known:
                candidates.append(E.hint_value_action(q, c % 5 + 1))
            if not colour_known:
                candidates.append(E.hint_colour_action(q, c // 5))
            for action in candidates:
                if convention and hint_violates_convention(view, action):
                    continue
                return action
    return None


def tell_anyone_about_useful(view, convention=False):
    return _tell_about(view, convention,
                       lambda q, i: _truth_playable(view, q, i))


def tell_dispensable(view, convention=False):
    return _tell_about(view, convention,
                       lambda q, i: _truth_discardable(view, q, i))


def complete_tell_useful(view, convention=False):
    return _tell_about(view, convention,
                       lambda q, i: _truth_playable(view, q, i),
                       require_unknown_dims=1)


def complete_tell_dispensable(view, convention=False):
    return _tell_about(view, convention,
                       lambda q, i: _truth_discardable(view, q, i),
                       require_unknown_dims=1)


def complete_tell_unplayable(view, convention=False):
    return _tell_about(
        view, convention,
        lambda q, i: (not _truth_playable(view, q, i)
                      and not _truth_discardable(view, q, i)),
        require_unknown_dims=1)


def play_probably_safe(view, convention=False, threshold=0.7):
    if view.slot_count() == 0:
        return None
    slot, p = _best_slot(view, 0, convention)
    if p >= threshold:
        return E.play_action(slot)
    return None


def play_probably_safe_late(view, convention=False, threshold=0.4):
    if view.deck_size > 5:
        return None
    return play_probably_safe(view, convention, threshold)


def discard_probably_useless(view, convention=False):
    if view.slot_count() == 0:
        return None
    slot, _ = _best_slot(view, 1, convention)
    return E.discard_action(slot)


RULES = (
    ("TellMostInformation", tell_most_information),
    ("TellAnyoneAboutUseful", tell_anyone_about_useful),
    ("TellDispensable", tell_dispensable),
    ("CompleteTellUseful", complete_tell_useful),
    ("CompleteTellDispensable", complete_tell_dispensable),
    ("CompleteTellUnplayable", complete_tell_unplayable),
    ("PlayProbablySafe", play_probably_safe),
    ("PlayProbablySafeLate", play_probably_safe_late),
    ("DiscardProbablyUseless", discard_probably_useless),
)

RULE_NAMES = tuple(name for name, _ in RULES)


def rule_actions_tagged(view, rule_set=None, convention=False):
    """Ordered, de-duplicated [(action, [rule names])] over the rule set."""
    out = []
    index = {}
    for name, rule in (rule_set or RULES):
        action = rule(view, convention)
        if action is None:
            continue
        if action in index:
            out[index[action]][1].append(name)
        else:
            index[action] = len(out)
            out.append((action, [name]))
    if not out:
        # Unreachable while a card is held (the discard rule is total);
        # covers hand-exhausted endgame corners so search never stalls.
        legal = view.legal_actions()
        if legal:
            out.append((legal[0], ["Fallback"]))
    return out


def rule_actions(view, rule_set=None, convention=False):
    return [a for a, _ in rule_actions_tagged(view, rule_set, convention)]


# ---------------------------------------------------------------------------
# Baseline policies
# ---------------------------------------------------------------------------

def tell_most_cards(view):
    """Hint touching the most cards; next player first on ties."""
    if view.hints == 0:
        return None
    best = None
    best_n = 0
    for q in _offset_order(view):
        for action in _hint_candidates(view, q):
            n = len(_hint_touches(view, q, action))
            if n > best_n:
                best, best_n = action, n
    return best


def _fallback(view, rng):
    legal = view.legal_actions()
    return legal[rng.randrange(len(legal))]


def random_policy(view, rng):
    return _fallback(view, rng)


def van_den_bergh_policy(view, rng):
    """Play at 60% confidence; else discard at 100%; else hint a playable
    card; else the hint touching most cards; else discard the most likely
    discardable card."""
    if view.slot_count():
        slot, p = _best_slot(view, 0, False)
        if p >= 0.6:
            return E.play_action(slot)
        dslot, dp = _best_slot(view, 1, False)
        if dp >= FULL_CONFIDENCE:
            return E.discard_action(dslot)
    if view.hints > 0:
        action = tell_anyone_about_useful(view)
        if action is not None:
            return action
        action = tell_most_cards(view)
        if action is not None:
            return action
    if view.slot_count():
        return E.discard_action(_best_slot(view, 1, False)[0])
    return _fallback(view, rng)


def _threshold_cascade(threshold):
    def policy(view, rng):
        if view.slot_count():
            slot, p = _best_slot(view, 0, False)
            if p >= threshold:
                return E.play_action(slot)
        if view.hints > 0:
            action = tell_anyone_about_useful(view)
            if action is not None:
                return action
            action = tell_most_information(view)
            if action is not None:
                return action
        if view.slot_count():
            return discard_probably_useless(view)
        return _fallback(view, rng)
    return policy


cautious_policy = _threshold_cascade(FULL_CONFIDENCE)
risky_policy = _threshold_cascade(0.6)


def iggi_policy(view, rng):
    """Cautious play plus a deterministic discard: oldest untouched card."""
    if view.slot_count():
        slot, p = _best_slot(view, 0, False)
        if p >= FULL_CONFIDENCE:
            return E.play_action(slot)
    if view.hints > 0:
        action = tell_anyone_about_useful(view)
        if action is not None:
            return action
    for i in range(view.slot_count()):
        if view.own_knowledge(i) & E.KNOW_ALL == E.KNOW_ALL:
            return E.discard_action(i)
    if view.slot_count():
        return E.discard_action(0)
    return _fallback(view, rng)


def piers_policy(view, rng):
    """iggi with extra stages: risk a 60% play while lives remain, and tell
    about discardable cards before discarding."""
    if view.slot_count():
        slot, p = _best_slot(view, 0, False)
        if p >= FULL_CONFIDENCE:
            return E.play_action(slot)
        if view.lives > 1 and view.deck_size > 0 and p >= 0.6:
            return E.play_action(slot)
    if view.hints > 0:
        action = tell_anyone_about_useful(view)
        if action is not None:
            return action
        action = tell_dispensable(view)
        if action is not None:
            return action
    if view.slot_count():
        return discard_probably_useless(view)
    return _fallback(view, rng)


def flawed_policy(view, rng):
    """Plays cards it is only slightly sure of and hints at random."""
    if view.slot_count():
        slot, p = _best_slot(view, 0, False)
        if p >= 0.25:
            return E.play_action(slot)
    if view.hints > 0:
        hints = [a for a in view.legal_actions() if a >= 10]
        if hints:
            return hints[rng.randrange(len(hints))]
    if view.slot_count():
        return E.discard_action(rng.randrange(view.slot_count()))
    return _fallback(view, rng)


def outer_policy(view, rng):
    """Plays sure cards, and spends hints marking discardable cards before
    useful ones so teammates can discard safely."""
    if view.slot_count():
        slot, p = _best_slot(view, 0, False)
        if p >= FULL_CONFIDENCE:
            return E.play_action(slot)
    if view.hints > 0:
        action = tell_dispensable(view)
        if action is not None:
            return action
        action = tell_anyone_about_useful(view)
        if action is not None:
            return action
    if view.slot_count():
        return discard_probably_useless(view)
    return _fallback(view, rng)


POLICY_NAMES = ("random", "cautious", "iggi", "flawed", "piers", "risky",
                "outer", "vdb", "evalfn", "evalfn_c")

BASELINE_POLICIES = {
    "random": random_policy,
    "cautious": cautious_policy,
    "iggi": iggi_policy,
    "flawed": flawed_policy,
    "piers": piers_policy,
    "risky": risky_policy,
    "outer": outer_policy,
    "vdb": van_den_bergh_policy,
}


def baseline_policy(name):
    """The named heuristic policy; evalfn/evalfn_c live with the learner."""
    try:
        return BASELINE_POLICIES[name]
    except KeyError:
        raise ValueError(f"unknown policy {name!r}") from None
