#include "brickctl/cli.hpp"

#include "brickctl/simulator.hpp"
#include "brickctl/verification.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace brickctl {

namespace {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!(out << text))
    throw InputError("cannot write " + path);
}

StructureSpec load_structure(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return parse_structure(text);
  } catch (const ParseError& e) {
    throw InputError(path + ":" + std::to_string(e.line()) + ": " + e.what());
  } catch (const ModelError& e) {
    throw InputError(path + ": " + e.what());
  }
}

RepairMode repair_mode(const std::string& s) {
  return s == "transitions" ? RepairMode::Transitions : RepairMode::States;
}

struct Options {
  std::string structure;
  std::string out;
  bool stats = false;
  std::string mode = "states";
  std::size_t cap = kDefaultStateCap;
  int robots = 1;
  bool plant = false;
  std::string supervisor;
  std::uint64_t seed = 0;
  std::string policy = "random";
  std::size_t max_steps = 100'000;
  std::string trace;
  bool render = false;
};

int cmd_structure(const Options& o, std::ostream& out) {
  const StructureSpec spec = load_structure(o.structure);
  const ExplicitAutomaton t = structure_automaton_or_empty(spec, 1, o.cap);
  if (t.empty()) {
    out << "target structure unreachable\n";
    return kExitNoSupervisor;
  }
  if (!o.out.empty())
    write_file(o.out, to_text(t));
  if (o.stats)
    out << "states " << t.num_states() << "\ntransitions " << t.num_transitions() << '\n';
  if (o.out.empty() && !o.stats)
    out << to_text(t);
  return kExitOk;
}

int cmd_synth(const Options& o, std::ostream& out) {
  const StructureSpec spec = load_structure(o.structure);
  SynthesisOptions so;
  so.repair_mode = repair_mode(o.mode);
  so.state_cap = o.cap;
  const SynthesisResult r = synthesize(spec, 1, so);
  out << "plant states=" << r.plant_states << " trans=" << r.plant_transitions << '\n';
  if (!r.supervisor) {
    out << "no supervisor exists\n";
    return kExitNoSupervisor;
  }
  const Supervisor& s = *r.supervisor;
  out << "supervisor states=" << s.automaton.num_states() << " trans=" << s.automaton.num_transitions()
      << " passes=" << r.passes << " macrostates=" << s.macrostates.size() << '\n'
      << "certificate trim=" << s.certificate.trim << " taskobs=" << s.certificate.task_observer
      << " reciprocal=" << s.certificate.totally_reciprocal << '\n';
  if (!o.out.empty())
    write_file(o.out, to_text(s));
  return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
  if (o.robots < 1)
    throw InputError("--robots must be at least 1");
  VerificationReport r;
  if (!o.supervisor.empty()) {
    Supervisor s;
    try {
      s = parse_supervisor(read_file(o.supervisor));
    } catch (const ParseError& e) {
      throw InputError(o.supervisor + ":" + std::to_string(e.line()) + ": " + e.what());
    }
    std::vector<Supervisor> all;
    for (int j = 1; j <= o.robots; ++j)
      all.push_back(replicate(s, j));
    r = verify_supervisors(all, o.cap);
  } else {
    const StructureSpec spec = load_structure(o.structure);
    VerifyOptions vo;
    vo.state_cap = o.cap;
    vo.repair_mode = repair_mode(o.mode);
    r = o.plant ? verify_plant(spec, o.robots, vo) : verify_theorem(spec, o.robots, vo);
  }
  out << to_text(r);
  if (!r.supervisor_exists)
    return kExitNoSupervisor;
  return r.nonblocking ? kExitOk : kExitBlocking;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  SimulationConfig c;
  c.spec = load_structure(o.structure);
  c.robots = o.robots;
  c.seed = o.seed;
  c.max_steps = o.max_steps;
  if (o.robots < 1 || o.robots > 26)
    throw InputError("--robots must be within 1..26");
  if (o.max_steps < 1)
    throw InputError("--max-steps must be at least 1");
  if (o.policy.starts_with("script:")) {
    const std::string path = o.policy.substr(7);
    try {
      c.script = parse_script(read_file(path));
    } catch (const ParseError& e) {
      throw ScriptError(0, path + ":" + std::to_string(e.line()) + ": " + e.what());
    }
  } else if (o.policy != "random") {
    throw InputError("--policy must be random or script:<file>");
  }

  SynthesisOptions so;
  so.repair_mode = repair_mode(o.mode);
  so.state_cap = o.cap;
  const SynthesisResult r = synthesize(c.spec, 1, so);
  if (!r.supervisor) {
    out << "no supervisor exists\n";
    return kExitNoSupervisor;
  }
  TraceObserver observer;
  if (o.render)
    observer = [&out](const TraceEvent& t, const Simulator& sim) {
      out << to_string(t) << '\n';
      if (t.cause == Cause::Executed)
        out << sim.render();
    };
  const Trace trace = run(c, *r.supervisor, observer);
  const std::string text = to_text(trace);
  if (!o.trace.empty())
    write_file(o.trace, text);
  if (o.render)
    out << "outcome=" << to_string(trace.outcome) << " steps=" << trace.steps << '\n';
  else
    out << text;
  switch (trace.outcome) {
  case Outcome::Completed:
    return kExitOk;
  case Outcome::StepLimit:
    return kExitStepLimit;
  case Outcome::Stuck:
    return kExitStuck;
  }
  return kExitFailure;
}

// Physical replay only: heights and positions follow the executed events.
int cmd_render(const Options& o, std::ostream& out) {
  const StructureSpec spec = load_structure(o.structure);
  Trace trace;
  try {
    trace = parse_trace(read_file(o.trace));
  } catch (const ParseError& e) {
    throw InputError(o.trace + ":" + std::to_string(e.line()) + ": " + e.what());
  }
  int robots = 1;
  for (const auto& t : trace.events)
    robots = std::max(robots, t.robot);
  if (robots > 26)
    throw InputError("at most 26 robots can be rendered");
  Heights heights(spec.area(), 0);
  std::vector<std::optional<Cell>> where(static_cast<std::size_t>(robots));

  auto snapshot = [&] {
    for (int y = 1; y <= spec.height(); ++y) {
      for (int x = 1; x <= spec.width(); ++x) {
        const int h = heights[spec.index({x, y})];
        char ch = h <= 9 ? static_cast<char>('0' + h) : '*';
        for (int k = 0; k < robots; ++k)
          if (where[k] == Cell{x, y})
            ch = static_cast<char>('A' + k);
        out << ch;
      }
      out << '\n';
    }
    out << "outside:";
    bool any = false;
    for (int k = 0; k < robots; ++k)
      if (!where[k]) {
        out << ' ' << static_cast<char>('A' + k);
        any = true;
      }
    out << (any ? "\n" : " -\n");
  };

  snapshot();
  for (const auto& t : trace.events) {
    out << to_string(t) << '\n';
    if (t.cause != Cause::Executed)
      continue;
    auto& pos = where[static_cast<std::size_t>(t.robot - 1)];
    const Event& e = t.event;
    if (e.is_unload()) {
      if (!spec.in_domain(e.cell))
        throw InputError("unload outside the grid at step " + std::to_string(t.step));
      ++heights[spec.index(e.cell)];
    } else if (e.move == Move::Enter) {
      pos = e.cell;
    } else if (e.move == Move::Exit) {
      pos.reset();
    } else if (e.move != Move::Pick) {
      if (!pos)
        throw InputError("move while outside at step " + std::to_string(t.step));
      const int dx = e.move == Move::East ? 1 : e.move == Move::West ? -1 : 0;
      const int dy = e.move == Move::South ? 1 : e.move == Move::North ? -1 : 0;
      pos = Cell{pos->x + dx, pos->y + dy};
    }
    snapshot();
  }
  out << "outcome=" << to_string(trace.outcome) << " steps=" << trace.steps << '\n';
  return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Supervisor synthesis and simulation for robotic brick construction", "brickctl"};
  app.require_subcommand(1);
  Options o;

  auto* structure = app.add_subcommand("structure", "Structure automaton tools");
  structure->require_subcommand(1);
  auto* build = structure->add_subcommand("build", "Build and serialize the structure automaton");
  build->add_option("file", o.structure, "Structure file")->required();
  build->add_option("--out", o.out, "Write the automaton here");
  build->add_flag("--stats", o.stats, "Print state and transition counts");
  build->add_option("--state-cap", o.cap, "Explicit state limit");

  auto add_synthesis_options = [&o](CLI::App* c) {
    c->add_option("--repair-mode", o.mode, "Task-observer repair")
        ->check(CLI::IsMember({"states", "transitions"}));
    c->add_option("--state-cap", o.cap, "Explicit state limit");
  };

  auto* synth = app.add_subcommand("synth", "Synthesize the supervisor template");
  synth->add_option("file", o.structure, "Structure file")->required();
  synth->add_option("--out", o.out, "Write the supervisor here");
  add_synthesis_options(synth);

  auto* verify = app.add_subcommand("verify", "Check the joint behavior of n supervisors");
  verify->add_option("file", o.structure, "Structure file");
  verify->add_option("--robots", o.robots, "Number of robots");
  verify->add_flag("--plant", o.plant, "Use the unsynthesized plant instead");
  verify->add_option("--supervisor", o.supervisor, "Supervisor file to replicate");
  add_synthesis_options(verify);

  auto* simulate = app.add_subcommand("simulate", "Run the closed-loop simulation");
  simulate->add_option("file", o.structure, "Structure file")->required();
  simulate->add_option("--robots", o.robots, "Number of robots");
  simulate->add_option("--seed", o.seed, "Random seed");
  simulate->add_option("--policy", o.policy, "random or script:<file>");
  simulate->add_option("--max-steps", o.max_steps, "Step limit");
  simulate->add_option("--trace", o.trace, "Write the trace here");
  simulate->add_flag("--render", o.render, "Print a snapshot after each executed event");
  add_synthesis_options(simulate);

  auto* render = app.add_subcommand("render", "Replay a trace as ASCII snapshots");
  render->add_option("file", o.structure, "Structure file")->required();
  render->add_option("trace", o.trace, "Trace file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    if (*build)
      return cmd_structure(o, out);
    if (*synth)
      return cmd_synth(o, out);
    if (*verify) {
      if (o.structure.empty() && o.supervisor.empty())
        throw InputError("verify needs a structure file or --supervisor");
      return cmd_verify(o, out);
    }
    if (*simulate)
      return cmd_simulate(o, out);
    if (*render)
      return cmd_render(o, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ResourceLimitError& e) {
    err << "error: " << e.what() << '\n';
    return kExitStateCap;
  } catch (const ScriptError& e) {
    err << "error: " << e.what() << '\n';
    return kExitScript;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

} // namespace brickctl
