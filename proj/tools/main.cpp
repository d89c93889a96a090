// choquard: command-line front end.
//
//   choquard solve --config run.ini --output report.json --threads 1 --seed 7

#include <choquard/commands.hpp>
#include <choquard/parallel.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

int main(int argc, char** argv) {
  using namespace choquard;

  CLI::App app{"Logarithmic Choquard toolkit"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::string> output, format;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;

  for (Command c : {Command::check_assumptions, Command::verify_embedding, Command::moser_scan,
                    Command::solve, Command::kernel_bench}) {
    auto* sub = app.add_subcommand(std::string(to_string(c)));
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--output", output, "report path (default stdout)");
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "random seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_validation;
  }

  try {
    RunConfig config = load_config(config_path);
    config.command = command_from_string(app.get_subcommands().front()->get_name());
    if (output) config.output = *output;
    if (format) config.format = output_format_from_string(*format);
    if (threads) config.threads = *threads;
    if (seed) config.seed = *seed;
    config.validate();
    set_thread_count(config.threads);

    const RunReport report = run_command(config);
    if (config.output.empty()) {
      write_report(report, config.format, std::cout);
    } else {
      std::ofstream out(config.output);
      if (!out) {
        std::cerr << "error: cannot write " << config.output << '\n';
        return exit_validation;
      }
      write_report(report, config.format, out);
    }
    return report.exit_code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
