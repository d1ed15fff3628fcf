#ifndef SCJ2_CLI_SERVER_HPP_
#define SCJ2_CLI_SERVER_HPP_

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "scj2/checker/explore.hpp"

namespace httplib {
class Server;
}

namespace scj2::cli {

inline constexpr int kProtocolVersion = 1;

/// One animation session: a stack of concrete states. Offered events are
/// the visible transitions of the current state's tau-closure, in canonical
/// order; stepping picks one of them by index.
class Session {
 public:
  Session(std::shared_ptr<const kernel::Composition> comp, check::ExploreLimits limits);

  nlohmann::ordered_json state() const;
  nlohmann::ordered_json events() const;

  bool step(std::size_t index);
  bool backtrack();
  void reset();
  /// Replays `channel(v,...)` strings from the initial state, searching
  /// through nondeterministic choices. On failure the session is unchanged.
  bool load_trace(const std::vector<std::string>& trace, std::string& error);

  const kernel::SystemState& current() const { return stack_.back().state; }
  std::size_t depth() const { return stack_.size() - 1; }

 private:
  struct Frame {
    kernel::SystemState state;
    std::optional<kernel::Label> via;
    check::Expansion ex;
  };
  Frame frame(kernel::SystemState s, std::optional<kernel::Label> via) const;

  std::shared_ptr<const kernel::Composition> comp_;
  check::ExploreLimits limits_;
  std::vector<Frame> stack_;
};

/// GET /state, GET /events, POST /step {index}, POST /backtrack,
/// POST /reset, POST /trace {events:[...]}. Requests are handled one at a
/// time.
void install_routes(httplib::Server& server, Session& session);

/// Blocks serving `session`; false when the port cannot be bound.
bool serve(Session& session, const std::string& host, int port, std::ostream& log);

}  // namespace scj2::cli

#endif  // SCJ2_CLI_SERVER_HPP_
