#include "trustsim/game.h"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace trustsim {

namespace {

constexpr std::array<std::string_view, kNumRanks> kRankNames = {
    "2", "3", "4", "5", "6", "7", "8", "9", "10", "J", "Q", "K", "A"};

void CheckBit(int bit, const char* what) {
  if (bit != 0 && bit != 1) {
    throw std::invalid_argument(std::string(what) + " must be 0 or 1");
  }
}

// Picks `k` cards uniformly without replacement from `pool`.
Hand DrawCards(const Hand& pool, int k, Rng& rng) {
  std::vector<int> cards;
  for (int r = 0; r < kNumRanks; ++r) {
    for (int c = 0; c < pool.counts()[r]; ++c) cards.push_back(r);
  }
  Hand out;
  for (int i = 0; i < k; ++i) {
    const auto j = rng.UniformInt(i, static_cast<std::int64_t>(cards.size()) - 1);
    std::swap(cards[i], cards[j]);
    out.Add(Rank(cards[i]));
  }
  return out;
}

Claim ScriptedClaim(const GameState& state) {
  // Even rounds: honest claim of the most-held rank (lowest index on ties).
  // Odd rounds: cheat with one card, naming the lowest rank not held.
  const Hand& hand = state.hand_p2;
  Claim c;
  if (state.round_index % 2 == 0) {
    int best = 0;
    for (int r = 1; r < kNumRanks; ++r) {
      if (hand.counts()[r] > hand.counts()[best]) best = r;
    }
    c.rank = Rank(best);
    c.m = std::min(hand.counts()[best], kMaxClaim);
    c.actual.Add(c.rank, c.m);
    c.cheat = 0;
    return c;
  }
  int lowest = 0;
  while (hand.counts()[lowest] == 0) ++lowest;
  int named = 0;
  while (named < kNumRanks && hand.counts()[named] > 0) ++named;
  if (named == kNumRanks) named = (lowest + 1) % kNumRanks;
  c.rank = Rank(named);
  c.m = 1;
  c.actual.Add(Rank(lowest));
  c.cheat = 1;
  return c;
}

}  // namespace

Rank::Rank(int i) : index(i) {
  if (i < 0 || i >= kNumRanks) throw std::out_of_range("rank index out of range");
}

std::string RankName(Rank r) { return std::string(kRankNames[r.index]); }

std::optional<Rank> ParseRank(std::string_view text) {
  for (int r = 0; r < kNumRanks; ++r) {
    if (text == kRankNames[r]) return Rank(r);
  }
  if (text.size() == 1) {
    switch (text[0]) {
      case 'j': return Rank(9);
      case 'q': return Rank(10);
      case 'k': return Rank(11);
      case 'a': return Rank(12);
      default: break;
    }
  }
  return std::nullopt;
}

Hand::Hand(const std::array<int, kNumRanks>& counts) : counts_(counts) {
  for (int c : counts_) {
    if (c < 0 || c > kCopiesPerRank) {
      throw std::invalid_argument("hand count outside [0,4]");
    }
  }
}

Hand Hand::FullDeck() {
  Hand h;
  h.counts_.fill(kCopiesPerRank);
  return h;
}

int Hand::Size() const {
  int total = 0;
  for (int c : counts_) total += c;
  return total;
}

bool Hand::Contains(const Hand& other) const {
  for (int r = 0; r < kNumRanks; ++r) {
    if (other.counts_[r] > counts_[r]) return false;
  }
  return true;
}

void Hand::Add(Rank r, int k) {
  if (counts_[r.index] + k > kCopiesPerRank) {
    throw std::logic_error("more than 4 copies of a rank");
  }
  counts_[r.index] += k;
}

void Hand::Remove(Rank r, int k) {
  if (counts_[r.index] < k) throw std::logic_error("removing cards not held");
  counts_[r.index] -= k;
}

void Hand::Add(const Hand& other) {
  for (int r = 0; r < kNumRanks; ++r) Add(Rank(r), other.counts_[r]);
}

void Hand::Remove(const Hand& other) {
  if (!Contains(other)) throw std::logic_error("removing cards not held");
  for (int r = 0; r < kNumRanks; ++r) counts_[r] -= other.counts_[r];
}

std::optional<std::string> ValidateClaim(const Hand& hand_p2, const Claim& c) {
  if (hand_p2.Empty()) return "empty_hand";
  if (c.m < 1 || c.m > kMaxClaim) return "bad_count";
  if (c.m > hand_p2.Size()) return "not_enough_cards";
  if (c.cheat != 0 && c.cheat != 1) return "bad_cheat_flag";
  if (c.cheat == 0 && hand_p2.Count(c.rank) < c.m) return "infeasible_honest_claim";
  if (c.cheat == 1 && hand_p2.Size() - hand_p2.Count(c.rank) < c.m) {
    return "infeasible_cheat_claim";
  }
  if (c.actual.Size() != c.m) return "count_mismatch";
  if (!hand_p2.Contains(c.actual)) return "cards_not_held";
  const int genuine = c.actual.Count(c.rank);
  if (c.cheat == 0 && genuine != c.m) return "honest_claim_with_other_ranks";
  if (c.cheat == 1 && genuine != 0) return "cheat_claim_with_claimed_rank";
  return std::nullopt;
}

std::string_view ToString(OpponentMode mode) {
  switch (mode) {
    case OpponentMode::kRandom: return "random";
    case OpponentMode::kScripted: return "scripted";
    case OpponentMode::kExternal: return "external";
  }
  return "random";
}

OpponentMode ParseOpponentMode(std::string_view text) {
  if (text == "random") return OpponentMode::kRandom;
  if (text == "scripted") return OpponentMode::kScripted;
  if (text == "external") return OpponentMode::kExternal;
  throw std::invalid_argument("unknown opponent mode: " + std::string(text));
}

void GameConfig::Validate() const {
  if (initial_hand_size < 1) {
    throw std::invalid_argument("initial_hand_size must be >= 1");
  }
  if (2 * initial_hand_size > kDeckSize) {
    throw std::invalid_argument("two hands of initial_hand_size exceed the deck");
  }
  if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
  if (!(p2_cheat_prob >= 0.0 && p2_cheat_prob <= 1.0)) {
    throw std::invalid_argument("p2_cheat_prob must be in [0,1]");
  }
}

GameState NewGame(const GameConfig& config, std::uint64_t seed) {
  config.Validate();
  GameState state;
  state.config = config;
  state.rng = Rng(seed);

  std::array<int, kDeckSize> deck{};
  for (int i = 0; i < kDeckSize; ++i) deck[i] = i / kCopiesPerRank;
  state.rng.Shuffle(deck.begin(), deck.end());

  const int k = config.initial_hand_size;
  for (int i = 0; i < k; ++i) state.hand_p1.Add(Rank(deck[i]));
  for (int i = k; i < 2 * k; ++i) state.hand_p2.Add(Rank(deck[i]));
  for (int i = 2 * k; i < kDeckSize; ++i) state.deck_remainder.Add(Rank(deck[i]));
  return state;
}

Claim OpponentClaim(GameState& state) {
  const Hand& hand = state.hand_p2;
  if (hand.Empty()) throw std::logic_error("opponent_claim on an empty hand");
  switch (state.config.opponent_mode) {
    case OpponentMode::kScripted:
      return ScriptedClaim(state);
    case OpponentMode::kExternal:
      throw std::logic_error("external opponent claims come from the session");
    case OpponentMode::kRandom:
      break;
  }

  Rng& rng = state.rng;
  Claim c;
  c.m = static_cast<int>(rng.UniformInt(1, std::min(kMaxClaim, hand.Size())));
  c.cheat = rng.Bernoulli(state.config.p2_cheat_prob) ? 1 : 0;

  if (c.cheat == 0) {
    std::vector<int> honest_ranks;
    for (int r = 0; r < kNumRanks; ++r) {
      if (hand.counts()[r] >= c.m) honest_ranks.push_back(r);
    }
    if (honest_ranks.empty()) {
      c.cheat = 1;  // honesty infeasible
    } else {
      const auto pick = rng.UniformInt(
          0, static_cast<std::int64_t>(honest_ranks.size()) - 1);
      c.rank = Rank(honest_ranks[pick]);
      c.actual.Add(c.rank, c.m);
      return c;
    }
  }

  // Any rank leaving at least m other cards may be named, held or not.
  std::vector<int> nameable;
  for (int r = 0; r < kNumRanks; ++r) {
    if (hand.Size() - hand.counts()[r] >= c.m) nameable.push_back(r);
  }
  const auto pick =
      rng.UniformInt(0, static_cast<std::int64_t>(nameable.size()) - 1);
  c.rank = Rank(nameable[pick]);
  Hand others = hand;
  others.Remove(c.rank, hand.Count(c.rank));
  c.actual = DrawCards(others, c.m, rng);
  return c;
}

int CountClaimedRank(const Hand& hand, Rank rank) { return hand.Count(rank); }

RoundOutcome ResolveRound(GameState& state, const Claim& claim, int a_p1,
                          int a_r) {
  CheckBit(a_p1, "a_p1");
  CheckBit(a_r, "a_r");
  if (IsTerminal(state)) throw std::logic_error("resolve_round on a terminal state");
  if (auto why = ValidateClaim(state.hand_p2, claim)) {
    throw std::invalid_argument("illegal claim: " + *why);
  }

  RoundOutcome out;
  out.a_p2 = claim.cheat;
  out.a_r = a_r;
  out.a_p1 = a_p1;
  out.m = claim.m;
  out.n = CountClaimedRank(state.hand_p1, claim.rank);
  out.revealed = a_p1 == 1;

  if (a_p1 == 0) {
    state.hand_p2.Remove(claim.actual);
    state.out_of_play += claim.m;
    out.dc_p2 = -claim.m;
  } else if (claim.cheat == 1) {
    // Correct challenge: the discard goes straight back to P2.
  } else {
    state.hand_p2.Remove(claim.actual);
    state.hand_p1.Add(claim.actual);
    out.dc_p1 = claim.m;
    out.dc_p2 = -claim.m;
  }
  ++state.round_index;
  return out;
}

bool IsTerminal(const GameState& state) {
  return state.round_index >= state.config.max_rounds || state.hand_p2.Empty();
}

}  // namespace trustsim
