#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "neurocnn/polynomial.hpp"

namespace neurocnn::tools {

enum ExitCode : int {
  kOk = 0,
  kPrecondition = 2,
  kPropertyFailure = 3,
  kDegeneracy = 4,
};

// args excludes the program name. Everything the command emits goes to out,
// diagnostics to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::uint64_t fnv1a64(std::string_view bytes);

// "2*a*b*c + a^2*d"; "0" for the zero polynomial.
std::string format_poly(const HomoPoly<Rational>& p, const std::vector<std::string>& names);

// a, b, c, ... for up to 26 parameters, otherwise w<layer>_<index>.
std::vector<std::string> parameter_names(const std::vector<int>& k);

}  // namespace neurocnn::tools
