#pragma once

#include <string>

#include "carpetperc/cli.hpp"
#include "carpetperc/lattice.hpp"

namespace carpetperc::cli {

struct Output {
  std::string body;     // the artifact
  std::string summary;  // optional side report (JSON)
};

struct Context {
  const RunConfig& cfg;
  Limits limits;
  GeneratorSet T;
};

/// Allowed --format values of a subcommand; the first one is the default.
const std::vector<std::string>& formats_of(const std::string& subcommand);
void validate(const RunConfig& c);

Output cmd_lattice(const Context& ctx);
Output cmd_dual(const Context& ctx);
Output cmd_sample(const Context& ctx);
Output cmd_events(const Context& ctx);
Output cmd_estimate(const Context& ctx);
Output cmd_sweep(const Context& ctx);
Output cmd_pc(const Context& ctx);
Output cmd_theta(const Context& ctx);
Output cmd_tau(const Context& ctx);
Output cmd_russo(const Context& ctx);
Output cmd_recursion(const Context& ctx);
Output cmd_branching(const Context& ctx);

Point parse_point(const std::string& text);

}  // namespace carpetperc::cli
