#pragma once

#include <choquard/grid.hpp>
#include <choquard/nonlinearity.hpp>
#include <choquard/periodic_profile.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace choquard {

enum class Command { check_assumptions, verify_embedding, moser_scan, solve, kernel_bench };
enum class OutputFormat { json, csv };

std::string_view to_string(Command command);
Command command_from_string(std::string_view name);
std::string_view to_string(OutputFormat format);
OutputFormat output_format_from_string(std::string_view name);

/*
 * Defaults
 *
 *   [grid]          kind = cartesian, radius = 20, resolution = 128
 *   [nonlinearity]  kind = exp_minus_one, q (required), p = 1, s0 = 1, beta = 1,
 *                   c_base = 1, c_amplitude = 0
 *   [potential]     base = 1, amplitude = 0
 *   [solver]        path_nodes = 16, descent_step = 1, max_iterations = 200,
 *                   tolerance = 1e-4, rho_sphere = 1e-2
 *   [scan]          s_min = 1e-3, s_max = 10, samples = 4000, epsilon = 0.05
 *   [embedding]     alphas = 2pi, moser_n = 4,8,16,32,64, radius = 8, resolution = 2048
 *   [moser]         n = 8,16,32,64, rho = 0.5, resolution = 1024, t_max = 3, samples = 128
 *   [bench]         sizes = 16,32,64, pairs = 3
 *   [output]        path = (stdout), format = json, field = (none), timings = false
 *   [run]           seed = 0, threads = 1
 */
struct GridBlock {
  GridKind kind = GridKind::cartesian;
  double radius = 20.0;
  int resolution = 128;
};

struct SolverBlock {
  int path_nodes = 16;
  double descent_step = 1.0;
  int max_iterations = 200;
  double tolerance = 1e-4;
  double rho_sphere = 1e-2;
};

struct EmbeddingBlock {
  std::vector<double> alphas{6.283185307179586};
  std::vector<int> moser_n{4, 8, 16, 32, 64};
  double radius = 8.0;
  int resolution = 2048;
};

struct MoserBlock {
  std::vector<int> n{8, 16, 32, 64};
  std::vector<double> rho{0.5};
  int resolution = 1024;
  double t_max = 3.0;
  int samples = 128;
};

struct BenchBlock {
  std::vector<int> sizes{16, 32, 64};
  int pairs = 3;
};

struct RunConfig {
  Command command = Command::solve;
  GridBlock grid;
  NonlinearitySpec spec;
  PeriodicProfile potential;
  SolverBlock solver;
  ScanPlan scan;
  EmbeddingBlock embedding;
  MoserBlock moser;
  BenchBlock bench;
  std::string output;  // empty: stdout
  OutputFormat format = OutputFormat::json;
  std::string field_output;
  bool timings = false;
  std::uint64_t seed = 0;
  int threads = 1;

  /// Throws validation with the offending key.
  void validate() const;
};

/// INI text with the sections above; unknown sections or keys are rejected.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

nlohmann::json to_json(const RunConfig& config);

}  // namespace choquard
