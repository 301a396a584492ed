#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rigidlab/serialize.hpp"

namespace rigidlab {

// "2n^3-n" -> [0,-1,0,2]. Integer coefficients only; errors carry the offending position.
IntVec parse_poly_expr(const std::string& text);

struct RunConfig {
  std::size_t depth = 5;
  std::size_t samples = 100000;
  std::uint64_t seed = 42;
  std::size_t index_cap = kDefaultRepCap;
  std::size_t ell_cap = kMaxSplitDimension;
  long coeff_bound = 5;
  std::size_t depth_cap = 6;
  std::size_t sample_cap = 10000000;
  std::optional<double> tol;
  std::optional<std::string> out;
  std::string format;  // "csv" or "json"; empty picks the command default
};
// Keys as in RunConfig; anything else is rejected.
RunConfig config_from_json(const Json& j);
void validate(const RunConfig& c);

// Exit codes: 0 ok, 1 I/O or parse failure, 2 precondition, 3 cap exceeded or search exhausted.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace rigidlab
