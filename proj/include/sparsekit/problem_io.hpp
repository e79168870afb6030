#pragma once

#include "sparsekit/synth.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace sparsekit {

/// Text problem format:
///   line 1       N M K seed
///   line 2       support indices, one-based, space separated (empty when K = 0)
///   N lines      dictionary rows, M entries each, 17 significant digits
///   last line    N signal entries
void write_problem(std::ostream& out, const ProblemInstance& problem);

/// Parses the format above. Throws ParseError on any structural problem.
/// Coefficients are not stored in the file; they are recovered by least squares.
ProblemInstance read_problem(std::istream& in);

void save_problem(const std::filesystem::path& path, const ProblemInstance& problem);
ProblemInstance load_problem(const std::filesystem::path& path);

/// Shortest decimal text with 17 significant digits ("%.17g").
std::string format_double(double value);

}  // namespace sparsekit
