#include <iostream>

#include "commands.hpp"

namespace pvt::cli {

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"pvt: color-polarization DoFP simulation, reconstruction baselines and evaluation", "pvt"};
  app.require_subcommand(1);
  app.fallthrough(false);
  ActionTable actions;
  register_capture_commands(app, actions);
  register_polar_commands(app, actions);
  register_motion_commands(app, actions);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const CLI::App* sub = app.get_subcommands().front();
  auto* out_buf = std::cout.rdbuf(out.rdbuf());
  auto* err_buf = std::cerr.rdbuf(err.rdbuf());
  int code = 0;
  try {
    actions.at(sub)();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << sub->help();
    code = 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    code = 1;
  }
  std::cout.rdbuf(out_buf);
  std::cerr.rdbuf(err_buf);
  return code;
}

}  // namespace pvt::cli
