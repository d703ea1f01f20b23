#pragma once

#include <iosfwd>

#include "json.hpp"
#include "trustsim/session.h"

namespace trustsim {

// Text front end for one session. Illegal or unparsable input re-prompts;
// end of input or "quit" aborts the session. Returns the transcript.
nlohmann::json PlayTerminal(Session& session, std::istream& in, std::ostream& out);

// Turns one line of terminal input into a session request. Returns null for
// lines that cannot be understood.
nlohmann::json ParseTerminalCommand(const std::string& line, SessionRole role, int round);

}  // namespace trustsim
