// divstokes: convergence, condition-number, pressure-robustness and
// verification runs on structured cube meshes.

#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "divstokes/cli.hpp"

using namespace divstokes;

namespace {

void add_common(CLI::App* app, RunConfig& c, std::string& h_mode) {
  app->add_option("--levels", c.levels, "Mesh levels n (n^3 cubes, 6 tets each), strictly increasing")->delimiter(',');
  app->add_option("--nu", c.nu, "Viscosity")->capture_default_str();
  app->add_option("--h-mode", h_mode, "Mesh-size weight in the stabilization terms")
      ->check(CLI::IsMember({"element", "per_facet", "global"}))
      ->capture_default_str();
  app->add_option("--output,-o", c.output, "CSV output path (stdout if omitted)");
}

void add_method(CLI::App* app, std::string& method) {
  app->add_option("--method", method, "Discretization")
      ->check(CLI::IsMember({"hdg", "mcs", "both"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Divergence-free Stokes discretizations on the unit cube"};
  app.require_subcommand(1);

  RunConfig c;
  std::string method = "both", h_mode = "element";

  auto* conv = app.add_subcommand("convergence", "Errors and orders against the manufactured solution");
  add_common(conv, c, h_mode);
  add_method(conv, method);
  conv->add_option("--alpha", c.alpha, "HDG stabilization parameter")->capture_default_str();
  conv->add_flag("--add-divdiv", c.add_divdiv, "Add nu/3 (div u, div v) to the stress method");

  auto* cond = app.add_subcommand("cond-study", "Condition numbers of the kinematic blocks");
  add_common(cond, c, h_mode);
  cond->add_option("--alphas", c.alphas, "HDG stabilization parameters")->delimiter(',')->capture_default_str();

  auto* rob = app.add_subcommand("robustness", "Response to a gradient perturbation of the forcing");
  add_common(rob, c, h_mode);
  add_method(rob, method);
  rob->add_option("--alpha", c.alpha, "HDG stabilization parameter")->capture_default_str();
  rob->add_flag("--add-divdiv", c.add_divdiv, "Add nu/3 (div u, div v) to the stress method");

  auto* ver = app.add_subcommand("verify", "Invariant checks; exit status 1 on any failure");
  add_common(ver, c, h_mode);
  ver->add_option("--alpha", c.alpha, "HDG stabilization parameter")->capture_default_str();
  ver->add_option("--seed", c.seed, "Seed for the sampling suites")->capture_default_str();
  ver->add_option("--samples", c.samples, "Random samples per level")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  const std::map<CLI::App*, Command> commands{{conv, Command::Convergence},
                                             {cond, Command::CondStudy},
                                             {rob, Command::Robustness},
                                             {ver, Command::Verify}};
  CLI::App* sub = app.get_subcommands().front();
  c.command = commands.at(sub);
  try {
    c.method = parse_method_choice(method);
    c.h_mode = parse_hmode(h_mode);
    validate(c);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n\n" << sub->help();
    return 2;
  }
  try {
    return run(c, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
