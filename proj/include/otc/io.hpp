#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "otc/params.hpp"
#include "otc/state.hpp"

namespace otc {

// One run configuration: a model class with its parameter block plus
// per-command settings. Parsed from a JSON file; keys follow the parameter
// names (lambda, gamma_u, gamma_tilde_ui, m, s, a, b, c0..c2, d0..d2).
struct RunConfig {
  ModelClass model_class = ModelClass::NonSegmented;
  std::optional<NonSegmentedParams> nonseg;
  std::optional<PartiallySegmentedParams> partseg;
  std::optional<HeterogeneousParams> het;

  // Initial state in serialization order; the default split state when absent.
  std::optional<std::vector<double>> initial;

  struct IntegrateBlock {
    double t_end = 100.0;
    double step = 1e-3;
    double sample_every = 1.0;
  } integrate;

  struct SteadyBlock {
    double tol = 1e-10;
    double eps = 1e-6;
    std::size_t grid = 9;
  } steady;

  struct SimulateBlock {
    std::size_t n = 1000;
    std::uint64_t seed = 1;
    double t_end = 100.0;
    double sample_every = 1.0;
    bool compare = true;
  } simulate;

  struct VerifyBlock {
    double tol = 1e-6;
    std::uint64_t seed = 1;
    std::size_t draws = 10;
    std::size_t sim_n = 2000;
    double sim_sup_tol = 0.06;
  } verify;

  std::string out_prefix = "out";
};

// Strict parse: unknown keys and malformed values raise ConfigParse.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& config);

// Full-precision decimal formatting (17 significant digits), bit-stable
// across write/parse round trips.
std::string format_full(double v);

// Delimited text tables, one header row, tab separated, written atomically
// (temp file then rename).
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void write_table_atomic(const std::filesystem::path& path, const Table& table);
Table read_table(const std::filesystem::path& path);

}  // namespace otc
