#pragma once

// Text formats: JSON for reports, JSON lines for datasets. Doubles are written
// in shortest round-trip form; integers that do not fit in 64 bits are
// written as decimal strings.

#include <iosfwd>
#include <string>

#include "neurocnn/census.hpp"
#include "neurocnn/invariants.hpp"
#include "neurocnn/regression.hpp"

namespace neurocnn {

std::string to_json(const Architecture& arch);
std::string to_json(const InvariantReport& report);
std::string to_json(const CensusReport& report);
std::string to_json(const WeightTuple<double>& w);

// One {"x":[...],"y":[...]} object per line.
void write_jsonl(std::ostream& out, const Dataset& data);
// Blank lines are skipped. Throws ParseError with the offending line number.
Dataset read_jsonl(std::istream& in);

std::string big_to_string(const BigInt& v);

}  // namespace neurocnn
