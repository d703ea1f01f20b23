#include "trustsim/terminal.h"

#include <istream>
#include <ostream>
#include <sstream>

namespace trustsim {

using nlohmann::json;

namespace {

std::string Lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string Cards(const json& hand) {
  std::string s;
  for (const auto& c : hand["cards"]) s += c.get<std::string>() + " ";
  if (!s.empty()) s.pop_back();
  return s.empty() ? "(empty)" : s;
}

void PrintOutcome(const json& o, SessionRole role, std::ostream& out) {
  out << "  last round: " << o["m"] << " x " << o["rank"].get<std::string>()
      << ", P1 " << o["a_p1"].get<std::string>();
  if (role == SessionRole::kP1) out << " (advice was " << o["advice"].get<std::string>() << ")";
  if (o.contains("a_p2")) {
    out << "; P2 was " << o["a_p2"].get<std::string>() << " with " << Cards(o["actual"]);
  } else {
    out << "; cards not revealed";
  }
  out << "; cards P1 " << (o["dc_p1"].get<int>() >= 0 ? "+" : "") << o["dc_p1"]
      << ", P2 " << (o["dc_p2"].get<int>() >= 0 ? "+" : "") << o["dc_p2"] << "\n";
}

void PrintState(const json& v, SessionRole role, std::ostream& out) {
  if (v.contains("outcome")) PrintOutcome(v["outcome"], role, out);
  if (v["phase"] == "finished" || v["phase"] == "aborted") return;
  out << "\nRound " << v["round"].get<int>() + 1 << " of " << v["max_rounds"] << "\n";
  out << "  your hand: " << Cards(v["hand"]) << "\n";
  out << "  opponent holds " << v["opponent_cards"] << " cards\n";
  if (role == SessionRole::kP1) {
    out << "  P2 claims " << v["claim"]["m"] << " x " << v["claim"]["rank"].get<std::string>()
        << "\n  robot advises: " << v["advice"].get<std::string>() << "\n";
  }
}

const char* Prompt(SessionRole role) {
  return role == SessionRole::kP1 ? "call or pass? " : "claim (<rank> <m> honest|cheat [cards]): ";
}

}  // namespace

json ParseTerminalCommand(const std::string& line, SessionRole role, int round) {
  std::istringstream in(line);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  if (words.empty()) return nullptr;
  if (role == SessionRole::kP1) {
    if (words.size() != 1) return nullptr;
    const std::string w = Lower(words[0]);
    if (w == "call" || w == "c" || w == "1") return {{"round", round}, {"action", "call"}};
    if (w == "pass" || w == "p" || w == "0") return {{"round", round}, {"action", "pass"}};
    return nullptr;
  }
  if (words.size() < 3) return nullptr;
  json req = {{"round", round}, {"action", "claim"}, {"rank", words[0]}};
  try {
    std::size_t used = 0;
    const int m = std::stoi(words[1], &used);
    if (used != words[1].size()) return nullptr;
    req["m"] = m;
  } catch (const std::exception&) {
    return nullptr;
  }
  const std::string kind = Lower(words[2]);
  if (kind == "honest" || kind == "h") {
    req["cheat"] = false;
  } else if (kind == "cheat" || kind == "c") {
    req["cheat"] = true;
  } else {
    return nullptr;
  }
  if (words.size() > 3) {
    req["discard"] = std::vector<std::string>(words.begin() + 3, words.end());
  }
  return req;
}

json PlayTerminal(Session& session, std::istream& in, std::ostream& out) {
  const SessionRole role = session.role();
  out << "Session " << session.id() << ": you are " << (role == SessionRole::kP1 ? "P1" : "P2")
      << ". Type quit to leave.\n";
  PrintState(session.View(), role, out);
  while (!session.finished()) {
    out << Prompt(role) << std::flush;
    std::string line;
    if (!std::getline(in, line)) {
      session.Abort("end_of_input");
      out << "\ninput closed, session aborted\n";
      break;
    }
    const std::string trimmed = Lower(line);
    if (trimmed == "quit" || trimmed == "q" || trimmed == "exit") {
      session.Abort("quit");
      out << "session aborted\n";
      break;
    }
    const json req = ParseTerminalCommand(line, role, session.round());
    if (req.is_null()) {
      out << "could not understand \"" << line << "\"\n";
      continue;
    }
    const auto res = session.Submit(req);
    if (!res.accepted) {
      out << "rejected: " << res.message["detail"].get<std::string>() << "\n";
      continue;
    }
    PrintState(res.message, role, out);
  }
  const json summary = session.Summary();
  out << "\nGame over (" << summary["status"].get<std::string>() << "): " << summary["rounds"]
      << " rounds, P1 holds " << summary["cards_p1"] << " cards, P2 holds "
      << summary["cards_p2"] << ".\n";
  return session.Transcript();
}

}  // namespace trustsim
