#include "brickctl/replication.hpp"

#include <algorithm>

namespace brickctl {

Supervisor replicate(const Supervisor& s, int j) {
  if (s.automaton.empty())
    throw ModelError("cannot replicate an empty supervisor");
  if (j < 1)
    throw ModelError("robot index must be positive");
  if (j == s.robot)
    return s;
  const int i = s.robot;
  std::vector<Event> alphabet;
  for (const auto& e : s.automaton.alphabet())
    alphabet.push_back(reindex(e, i, j));
  Supervisor r = s;
  r.robot = j;
  r.automaton = s.automaton.relabel(
      [i, j](const Event& e) { return std::vector<Event>{reindex(e, i, j)}; }, std::move(alphabet));
  return r;
}

ExplicitAutomaton refine(const Supervisor& s, int n) {
  if (s.robot < 1 || s.robot > n)
    throw ModelError("supervisor robot " + std::to_string(s.robot) + " outside 1.." +
                     std::to_string(n));
  auto expand = [&](const Event& e) {
    if (!e.is_other_unload())
      return std::vector<Event>{e};
    std::vector<Event> out;
    for (int j = 1; j <= n; ++j)
      if (j != s.robot)
        out.push_back(Event::unload_indexed(j, e.cell));
    return out;
  };
  std::vector<Event> alphabet;
  for (const auto& e : s.automaton.alphabet())
    for (auto& x : expand(e))
      alphabet.push_back(x);
  return s.automaton.relabel(expand, std::move(alphabet));
}

} // namespace brickctl
