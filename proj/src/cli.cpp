#include "divstokes/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "divstokes/verify.hpp"

namespace divstokes {

const char* to_string(Command c) {
  switch (c) {
    case Command::Convergence: return "convergence";
    case Command::CondStudy: return "cond-study";
    case Command::Robustness: return "robustness";
    case Command::Verify: return "verify";
  }
  return "?";
}

const char* to_string(MethodChoice m) {
  switch (m) {
    case MethodChoice::Hdg: return "hdg";
    case MethodChoice::Mcs: return "mcs";
    case MethodChoice::Both: return "both";
  }
  return "?";
}

MethodChoice parse_method_choice(const std::string& name) {
  if (name == "hdg") return MethodChoice::Hdg;
  if (name == "mcs") return MethodChoice::Mcs;
  if (name == "both") return MethodChoice::Both;
  throw std::invalid_argument("unknown method '" + name + "' (expected hdg, mcs or both)");
}

StudyParams RunConfig::params() const {
  StudyParams p;
  p.nu = nu;
  p.alpha = alpha;
  p.h_mode = h_mode;
  p.add_divdiv = add_divdiv;
  return p;
}

std::vector<int> default_levels(Command c) {
  if (c == Command::Convergence) return {2, 4, 8};
  return {2, 4};
}

std::vector<int> RunConfig::effective_levels() const { return levels.empty() ? default_levels(command) : levels; }

void validate(const RunConfig& c) {
  const auto levels = c.effective_levels();
  if (std::any_of(levels.begin(), levels.end(), [](int n) { return n < 1; }))
    throw std::invalid_argument("levels must be positive");
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (levels[i] <= levels[i - 1]) throw std::invalid_argument("levels must be strictly increasing");
  if (!(c.alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(c.nu > 0.0)) throw std::invalid_argument("nu must be positive");
  if (c.alphas.empty()) throw std::invalid_argument("alphas must not be empty");
  if (std::any_of(c.alphas.begin(), c.alphas.end(), [](double a) { return !(a > 0.0); }))
    throw std::invalid_argument("alphas must be positive");
  if (c.samples < 1) throw std::invalid_argument("samples must be positive");
  if (c.command == Command::Verify && levels.size() < 2) throw std::invalid_argument("verify needs at least two levels");
}

namespace {

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream s;
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
  return s.str();
}

std::vector<Method> methods(MethodChoice m) {
  if (m == MethodChoice::Hdg) return {Method::Hdg};
  if (m == MethodChoice::Mcs) return {Method::Mcs};
  return {Method::Hdg, Method::Mcs};
}

/// Writes to `path`, or to `fallback` when the path is empty.
template <class Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  write(f);
}

}  // namespace

std::vector<std::string> config_header(const RunConfig& c) {
  std::ostringstream p;
  p << "method=" << to_string(c.method) << " levels=" << join(c.effective_levels()) << " nu=" << c.nu
    << " h_mode=" << to_string(c.h_mode);
  if (c.command == Command::CondStudy)
    p << " alphas=" << join(c.alphas) << " add_divdiv=true(stress block)";
  else
    p << " alpha=" << c.alpha << " add_divdiv=" << (c.add_divdiv ? "true" : "false");
  if (c.command == Command::Verify) p << " seed=" << c.seed << " samples=" << c.samples;
  return {std::string("divstokes ") + to_string(c.command), p.str(),
          "mesh: structured Kuhn cube (0,1)^3, 6 n^3 tets, Neumann face x=0, Dirichlet elsewhere",
          "data: polynomial manufactured solution, u = curl(psi,psi,psi), p = x^5+y^5+z^5-1/2"};
}

std::string method_output_path(const std::string& output, Method method) {
  const std::filesystem::path p(output);
  std::filesystem::path r = p.parent_path() / (p.stem().string() + "_" + to_string(method));
  r += p.extension();
  return r.string();
}

int run(const RunConfig& c, std::ostream& out, std::ostream& log) {
  validate(c);
  const auto header = config_header(c);
  const auto levels = c.effective_levels();
  const StudyParams params = c.params();

  switch (c.command) {
    case Command::Convergence: {
      const auto ms = methods(c.method);
      for (Method m : ms) {
        const ConvergenceReport rep = convergence_study(m, levels, params, &log);
        const std::string path = ms.size() > 1 && !c.output.empty() ? method_output_path(c.output, m) : c.output;
        emit(path, out, [&](std::ostream& s) {
          write_comment_header(s, header);
          write_convergence_csv(s, rep);
        });
      }
      return 0;
    }
    case Command::CondStudy: {
      const auto rows = condition_study(levels, c.alphas, params, &log);
      emit(c.output, out, [&](std::ostream& s) {
        write_comment_header(s, header);
        write_condition_csv(s, rows);
      });
      return 0;
    }
    case Command::Robustness: {
      std::vector<RobustnessReport> reps;
      for (Method m : methods(c.method))
        for (int n : levels) {
          reps.push_back(pressure_robustness(m, n, params, default_pressure_potential()));
          log << to_string(m) << " n=" << n << " kinematic_change=" << format_float(reps.back().kinematic_change)
              << '\n';
        }
      emit(c.output, out, [&](std::ostream& s) {
        write_comment_header(s, header);
        write_comment_header(s, {"perturbation: f += grad(10 (x^5+y^5+z^5)), p += 10 (x^5+y^5+z^5)"});
        s << "method,level,kinematic_change,stress_change,pressure_shift_error,div_max\n";
        for (const auto& r : reps)
          s << to_string(r.method) << ',' << r.level << ',' << format_float(r.kinematic_change) << ','
            << format_float(r.stress_change) << ',' << format_float(r.pressure_shift_error) << ','
            << format_float(r.div_max) << '\n';
      });
      return 0;
    }
    case Command::Verify: {
      VerifyOptions o;
      o.levels = levels;
      o.seed = c.seed;
      o.samples = c.samples;
      o.params = params;
      const auto checks = run_verification(o, &log);
      emit(c.output, out, [&](std::ostream& s) {
        write_comment_header(s, header);
        write_checks_csv(s, checks);
      });
      const bool ok = all_passed(checks);
      log << (ok ? "verify: all checks passed\n" : "verify: FAILED\n");
      return ok ? 0 : 1;
    }
  }
  return 0;
}

}  // namespace divstokes
