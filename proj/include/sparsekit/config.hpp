#pragma once

#include "sparsekit/bench.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace sparsekit {

/// Flat `key = value` settings. Lines starting with '#' and blank lines are
/// ignored; a repeated key keeps its last value.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& in);
KeyValues load_key_values(const std::filesystem::path& path);

/// Recognised keys:
///   n, axis (m|k), values (comma list), m, k, algorithms (comma list),
///   matrices, vectors, seed, signed (0|1), import (aggregates file),
///   scale (linear|log), and solver overrides either bare (applied to every
///   algorithm) or prefixed with an algorithm name, e.g. `sce.outer_iters`.
/// Solver override keys: k, population, elite_ratio, alpha, max_iters,
///   inner_iters, outer_iters, eps, eps_relative, lambda.
/// Throws ParseError for unknown keys or malformed values.
SweepConfig sweep_config_from(const KeyValues& kv);

/// Applies the solver override keys in kv (no prefix) onto `o`.
void apply_solver_keys(SolverOverrides& o, const KeyValues& kv, const std::string& prefix = "");

/// Fully resolved configuration in the same key=value format.
std::string describe(const SweepConfig& cfg);
std::string describe(const SolverOverrides& o, const std::string& prefix = "");

std::vector<int> parse_int_list(const std::string& text);

}  // namespace sparsekit
