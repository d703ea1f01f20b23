#pragma once

// Half-round Cheat: P2 claims and discards, the P1 + robot team decides
// whether to challenge. One standard 52-card deck, 13 ranks, no suits.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "trustsim/rng.h"

namespace trustsim {

inline constexpr int kNumRanks = 13;
inline constexpr int kCopiesPerRank = 4;
inline constexpr int kDeckSize = kNumRanks * kCopiesPerRank;
inline constexpr int kMaxClaim = 4;

struct Rank {
  int index = 0;

  constexpr Rank() = default;
  explicit Rank(int i);

  auto operator<=>(const Rank&) const = default;
};

// "2".."10", "J", "Q", "K", "A".
std::string RankName(Rank r);
std::optional<Rank> ParseRank(std::string_view text);

// Multiset of ranks stored as a rank-count vector of length 13.
class Hand {
 public:
  Hand() { counts_.fill(0); }
  explicit Hand(const std::array<int, kNumRanks>& counts);

  static Hand FullDeck();

  int Count(Rank r) const { return counts_[r.index]; }
  int Size() const;
  bool Empty() const { return Size() == 0; }
  bool Contains(const Hand& other) const;

  void Add(Rank r, int k = 1);
  void Remove(Rank r, int k = 1);
  void Add(const Hand& other);
  void Remove(const Hand& other);

  const std::array<int, kNumRanks>& counts() const { return counts_; }

  bool operator==(const Hand&) const = default;

 private:
  std::array<int, kNumRanks> counts_;
};

// A P2 claim. `cheat` is a_P2: 0 = not cheating, 1 = cheating.
struct Claim {
  Rank rank;
  int m = 1;
  Hand actual;
  int cheat = 0;

  bool operator==(const Claim&) const = default;
};

// Why a claim is not legal for a hand, or nullopt when it is.
std::optional<std::string> ValidateClaim(const Hand& hand_p2, const Claim& c);

struct RoundOutcome {
  int a_p2 = 0;
  int a_r = 0;
  int a_p1 = 0;
  int dc_p1 = 0;
  int dc_p2 = 0;
  bool revealed = false;
  int m = 0;
  int n = 0;

  bool operator==(const RoundOutcome&) const = default;
};

enum class OpponentMode { kRandom, kScripted, kExternal };

std::string_view ToString(OpponentMode mode);
OpponentMode ParseOpponentMode(std::string_view text);

struct GameConfig {
  int initial_hand_size = 10;
  int max_rounds = 10;
  double p2_cheat_prob = 0.5;
  OpponentMode opponent_mode = OpponentMode::kRandom;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument.
  void Validate() const;

  bool operator==(const GameConfig&) const = default;
};

struct GameState {
  Hand hand_p1;
  Hand hand_p2;
  Hand deck_remainder;
  // P2 discards that left play (passed claims).
  int out_of_play = 0;
  int round_index = 0;
  GameConfig config;
  Rng rng;

  int TotalCards() const {
    return hand_p1.Size() + hand_p2.Size() + deck_remainder.Size() +
           out_of_play;
  }

  bool operator==(const GameState& o) const {
    return hand_p1 == o.hand_p1 && hand_p2 == o.hand_p2 &&
           deck_remainder == o.deck_remainder &&
           out_of_play == o.out_of_play && round_index == o.round_index &&
           config == o.config && rng == o.rng;
  }
};

GameState NewGame(const GameConfig& config, std::uint64_t seed);

// Draws P2's next claim in random or scripted mode. External-mode claims
// come from the session layer and are checked with ValidateClaim.
Claim OpponentClaim(GameState& state);

int CountClaimedRank(const Hand& hand, Rank rank);

// Moves cards for one decision:
//   pass                      -> P2's discard leaves play
//   challenge, P2 cheated     -> P2 takes the cards back
//   challenge, P2 was honest  -> P1 picks the cards up
RoundOutcome ResolveRound(GameState& state, const Claim& claim, int a_p1,
                          int a_r);

bool IsTerminal(const GameState& state);

}  // namespace trustsim
