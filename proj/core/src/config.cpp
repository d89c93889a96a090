#include <choquard/config.hpp>

#include <choquard/errors.hpp>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace choquard {

namespace pt = boost::property_tree;

std::string_view to_string(Command command) {
  switch (command) {
    case Command::check_assumptions: return "check-assumptions";
    case Command::verify_embedding: return "verify-embedding";
    case Command::moser_scan: return "moser-scan";
    case Command::solve: return "solve";
    case Command::kernel_bench: return "kernel-bench";
  }
  return "unknown";
}

Command command_from_string(std::string_view name) {
  for (Command c : {Command::check_assumptions, Command::verify_embedding, Command::moser_scan,
                    Command::solve, Command::kernel_bench})
    if (to_string(c) == name) return c;
  fail(ErrorKind::validation, "unknown command '" + std::string(name) + "'");
}

std::string_view to_string(OutputFormat format) {
  return format == OutputFormat::json ? "json" : "csv";
}

OutputFormat output_format_from_string(std::string_view name) {
  if (name == "json") return OutputFormat::json;
  if (name == "csv") return OutputFormat::csv;
  fail(ErrorKind::validation, "unknown output format '" + std::string(name) + "'");
}

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"run", {"command", "seed", "threads"}},
      {"grid", {"kind", "radius", "resolution"}},
      {"nonlinearity", {"kind", "q", "p", "s0", "beta", "c_base", "c_amplitude"}},
      {"potential", {"base", "amplitude"}},
      {"solver", {"path_nodes", "descent_step", "max_iterations", "tolerance", "rho_sphere"}},
      {"scan", {"s_min", "s_max", "samples", "epsilon"}},
      {"embedding", {"alphas", "moser_n", "radius", "resolution"}},
      {"moser", {"n", "rho", "resolution", "t_max", "samples"}},
      {"bench", {"sizes", "pairs"}},
      {"output", {"path", "format", "field", "timings"}},
  };
  return keys;
}

template <class T>
T get(const pt::ptree& tree, const std::string& key, T fallback) {
  const auto node = tree.get_child_optional(pt::ptree::path_type(key, '.'));
  if (!node) return fallback;
  try {
    return node->get_value<T>();
  } catch (const pt::ptree_bad_data&) {
    fail(ErrorKind::validation, "cannot parse '" + key + "' = '" + node->data() + "'");
  }
}

template <class T>
std::vector<T> get_list(const pt::ptree& tree, const std::string& key, std::vector<T> fallback) {
  const auto node = tree.get_child_optional(pt::ptree::path_type(key, '.'));
  if (!node) return fallback;
  std::vector<T> out;
  std::string text = node->data();
  for (char& ch : text)
    if (ch == ',') ch = ' ';
  std::istringstream in(text);
  T value;
  while (in >> value) out.push_back(value);
  if (!in.eof() || out.empty())
    fail(ErrorKind::validation, "cannot parse list '" + key + "' = '" + node->data() + "'");
  return out;
}

bool get_bool(const pt::ptree& tree, const std::string& key, bool fallback) {
  const std::string text = get<std::string>(tree, key, fallback ? "true" : "false");
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  fail(ErrorKind::validation, "cannot parse '" + key + "' = '" + text + "'");
}

// Module preconditions surface as validation errors before any work starts.
template <class Fn>
void check(const char* block, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    fail(ErrorKind::validation, std::string("[") + block + "] " + e.what());
  }
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::validation, e.what());
  }
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end() || body.empty())
      fail(ErrorKind::validation, "unknown section '" + section + "'");
    for (const auto& [key, _] : body)
      if (!it->second.contains(key))
        fail(ErrorKind::validation, "unknown key '" + section + "." + key + "'");
  }

  RunConfig c;
  if (auto cmd = tree.get_optional<std::string>("run.command")) c.command = command_from_string(*cmd);
  c.seed = get<std::uint64_t>(tree, "run.seed", c.seed);
  c.threads = get<int>(tree, "run.threads", c.threads);

  if (auto kind = tree.get_optional<std::string>("grid.kind")) {
    check("grid", [&] { c.grid.kind = grid_kind_from_string(*kind); });
  }
  c.grid.radius = get<double>(tree, "grid.radius", c.grid.radius);
  c.grid.resolution = get<int>(tree, "grid.resolution", c.grid.resolution);

  if (!tree.get_child_optional("nonlinearity.q"))
    fail(ErrorKind::validation, "missing required key 'nonlinearity.q'");
  NonlinearitySpec& s = c.spec;
  check("nonlinearity", [&] {
    s.kind = nonlinearity_kind_from_string(get<std::string>(tree, "nonlinearity.kind", "exp_minus_one"));
  });
  if (s.kind == NonlinearityKind::custom)
    fail(ErrorKind::validation, "custom nonlinearities cannot be configured from a file");
  s.q = get<double>(tree, "nonlinearity.q", s.q);
  s.p = get<double>(tree, "nonlinearity.p", s.p);
  s.s0 = get<double>(tree, "nonlinearity.s0", s.s0);
  s.beta = get<double>(tree, "nonlinearity.beta", s.beta);
  s.c_profile.base = get<double>(tree, "nonlinearity.c_base", s.c_profile.base);
  s.c_profile.amplitude = get<double>(tree, "nonlinearity.c_amplitude", s.c_profile.amplitude);

  c.potential.base = get<double>(tree, "potential.base", c.potential.base);
  c.potential.amplitude = get<double>(tree, "potential.amplitude", c.potential.amplitude);

  c.solver.path_nodes = get<int>(tree, "solver.path_nodes", c.solver.path_nodes);
  c.solver.descent_step = get<double>(tree, "solver.descent_step", c.solver.descent_step);
  c.solver.max_iterations = get<int>(tree, "solver.max_iterations", c.solver.max_iterations);
  c.solver.tolerance = get<double>(tree, "solver.tolerance", c.solver.tolerance);
  c.solver.rho_sphere = get<double>(tree, "solver.rho_sphere", c.solver.rho_sphere);

  c.scan.s_min = get<double>(tree, "scan.s_min", c.scan.s_min);
  c.scan.s_max = get<double>(tree, "scan.s_max", c.scan.s_max);
  c.scan.samples = get<int>(tree, "scan.samples", c.scan.samples);
  c.scan.epsilon = get<double>(tree, "scan.epsilon", c.scan.epsilon);

  c.embedding.alphas = get_list<double>(tree, "embedding.alphas", c.embedding.alphas);
  c.embedding.moser_n = get_list<int>(tree, "embedding.moser_n", c.embedding.moser_n);
  c.embedding.radius = get<double>(tree, "embedding.radius", c.embedding.radius);
  c.embedding.resolution = get<int>(tree, "embedding.resolution", c.embedding.resolution);

  c.moser.n = get_list<int>(tree, "moser.n", c.moser.n);
  c.moser.rho = get_list<double>(tree, "moser.rho", c.moser.rho);
  c.moser.resolution = get<int>(tree, "moser.resolution", c.moser.resolution);
  c.moser.t_max = get<double>(tree, "moser.t_max", c.moser.t_max);
  c.moser.samples = get<int>(tree, "moser.samples", c.moser.samples);

  c.bench.sizes = get_list<int>(tree, "bench.sizes", c.bench.sizes);
  c.bench.pairs = get<int>(tree, "bench.pairs", c.bench.pairs);

  c.output = get<std::string>(tree, "output.path", c.output);
  if (auto fmt = tree.get_optional<std::string>("output.format"))
    c.format = output_format_from_string(*fmt);
  c.field_output = get<std::string>(tree, "output.field", c.field_output);
  c.timings = get_bool(tree, "output.timings", c.timings);

  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::validation, "cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void RunConfig::validate() const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) fail(ErrorKind::validation, what);
  };
  need(grid.radius > 0.0, "grid.radius must be positive");
  need(grid.resolution >= 8, "grid.resolution must be at least 8");
  check("nonlinearity", [&] { spec.validate(); });
  need(spec.beta > 0.0, "nonlinearity.beta must be positive");
  check("nonlinearity", [&] { spec.c_profile.validate("c"); });
  check("potential", [&] { potential.validate("V"); });
  need(solver.path_nodes >= 8, "solver.path_nodes must be at least 8");
  need(solver.descent_step > 0.0, "solver.descent_step must be positive");
  need(solver.max_iterations >= 1, "solver.max_iterations must be positive");
  need(solver.tolerance > 0.0, "solver.tolerance must be positive");
  need(solver.rho_sphere > 0.0, "solver.rho_sphere must be positive");
  need(scan.s_min > 0.0 && scan.s_max > 2.0 * scan.s_min, "scan range must satisfy 0 < 2 s_min < s_max");
  need(scan.samples >= 16, "scan.samples must be at least 16");
  need(scan.epsilon > 0.0 && scan.epsilon < 1.0, "scan.epsilon must lie in (0, 1)");
  for (double a : embedding.alphas) need(a > 0.0, "embedding.alphas must be positive");
  for (int n : embedding.moser_n) need(n >= 2, "embedding.moser_n entries must be at least 2");
  need(embedding.radius > 0.5, "embedding.radius must exceed 1/2");
  need(embedding.resolution >= 64, "embedding.resolution must be at least 64");
  for (int n : moser.n) need(n >= 2, "moser.n entries must be at least 2");
  for (double r : moser.rho) need(r > 0.0 && r <= 0.5, "moser.rho entries must lie in (0, 1/2]");
  need(moser.resolution >= 64, "moser.resolution must be at least 64");
  need(moser.t_max > 0.0, "moser.t_max must be positive");
  need(moser.samples >= 8, "moser.samples must be at least 8");
  for (int n : bench.sizes) need(n >= 4, "bench.sizes entries must be at least 4");
  need(bench.pairs >= 1, "bench.pairs must be positive");
  need(threads >= 1, "run.threads must be positive");
  if (command == Command::moser_scan)
    need(spec.c_profile.is_constant(), "moser-scan runs on radial grids and needs constant c");
}

nlohmann::json to_json(const RunConfig& c) {
  using nlohmann::json;
  return json{
      {"command", to_string(c.command)},
      {"grid", {{"kind", to_string(c.grid.kind)}, {"radius", c.grid.radius}, {"resolution", c.grid.resolution}}},
      {"nonlinearity",
       {{"kind", to_string(c.spec.kind)},
        {"q", c.spec.q},
        {"p", c.spec.p},
        {"s0", c.spec.s0},
        {"beta", c.spec.beta},
        {"c_base", c.spec.c_profile.base},
        {"c_amplitude", c.spec.c_profile.amplitude}}},
      {"potential", {{"base", c.potential.base}, {"amplitude", c.potential.amplitude}}},
      {"solver",
       {{"path_nodes", c.solver.path_nodes},
        {"descent_step", c.solver.descent_step},
        {"max_iterations", c.solver.max_iterations},
        {"tolerance", c.solver.tolerance},
        {"rho_sphere", c.solver.rho_sphere}}},
      {"scan",
       {{"s_min", c.scan.s_min}, {"s_max", c.scan.s_max}, {"samples", c.scan.samples}, {"epsilon", c.scan.epsilon}}},
      {"embedding",
       {{"alphas", c.embedding.alphas},
        {"moser_n", c.embedding.moser_n},
        {"radius", c.embedding.radius},
        {"resolution", c.embedding.resolution}}},
      {"moser",
       {{"n", c.moser.n},
        {"rho", c.moser.rho},
        {"resolution", c.moser.resolution},
        {"t_max", c.moser.t_max},
        {"samples", c.moser.samples}}},
      {"bench", {{"sizes", c.bench.sizes}, {"pairs", c.bench.pairs}}},
      {"output",
       {{"path", c.output}, {"format", to_string(c.format)}, {"field", c.field_output}, {"timings", c.timings}}},
      {"run", {{"seed", c.seed}, {"threads", c.threads}}},
  };
}

}  // namespace choquard
