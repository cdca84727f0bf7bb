#ifndef DIVSTOKES_CLI_HPP
#define DIVSTOKES_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

#include "divstokes/study.hpp"

namespace divstokes {

enum class Command { Convergence, CondStudy, Robustness, Verify };
enum class MethodChoice { Hdg, Mcs, Both };

const char* to_string(Command c);
const char* to_string(MethodChoice m);
MethodChoice parse_method_choice(const std::string& name);

struct RunConfig {
  Command command = Command::Convergence;
  MethodChoice method = MethodChoice::Both;
  std::vector<int> levels;  ///< empty selects default_levels(command)
  double alpha = 6.0;
  std::vector<double> alphas{2, 4, 6, 8, 12, 16};
  double nu = 1e-4;
  HMode h_mode = HMode::Element;
  bool add_divdiv = false;
  std::string output;  ///< empty writes to the given stream
  unsigned seed = 7;
  int samples = 100;

  StudyParams params() const;
  std::vector<int> effective_levels() const;
};

std::vector<int> default_levels(Command c);

/// Throws std::invalid_argument naming the offending setting.
void validate(const RunConfig& config);

/// "# "-prefixed lines: command, parameters and the mesh description.
std::vector<std::string> config_header(const RunConfig& config);

/// out.csv -> out_hdg.csv; a path without extension gets the suffix appended.
std::string method_output_path(const std::string& output, Method method);

/// Runs one command. CSV goes to config.output (or `out` when empty), progress
/// lines to `log`. Returns 1 iff verify has a failing check.
int run(const RunConfig& config, std::ostream& out, std::ostream& log);

}  // namespace divstokes

#endif
