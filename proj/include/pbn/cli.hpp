#ifndef PBN_CLI_HPP
#define PBN_CLI_HPP

#include "pbn/lang.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pbn::cli {

inline constexpr std::string_view kSchemaVersion = "model-schema-1";

/// Exit codes of every command.
enum ExitCode : int { kSuccess = 0, kCheckFailed = 1, kUsageError = 2 };

struct LoadOptions {
    /// Accept a measure that does not sum to 1 and rescale it; the raw sum is
    /// kept in ModelFile::raw_measure_sum. Used by `check`, which reports the
    /// violation instead of refusing the file.
    bool lenient_measure = false;
};

struct ModelFile {
    lang::Model model;
    double raw_measure_sum = 1.0;
};

/// Reads and validates a model file. Throws IoError, SchemaError (with a JSON
/// pointer) or ValidationError.
ModelFile load_model(const std::string &path, const LoadOptions &opts = {});
ModelFile parse_model(std::string_view json_text, const LoadOptions &opts = {});

struct CommandOptions {
    double tol = 1e-12; ///< uniformization tail tolerance
    bool quiet = false;
};

/// 15 significant digits, '.' separator, independent of the global locale.
std::string format_number(double v);

int cmd_eval(const ModelFile &m, std::string_view query, std::ostream &out,
             std::ostream &err, const CommandOptions &opts = {});

/// CSV `t,p:<label>...[,E[<obs>]]` at t = 0, step, ..., t_max.
int cmd_evolve(const ModelFile &m, double t_max, double step,
               const std::optional<std::string> &observable, std::ostream &out,
               std::ostream &err, const CommandOptions &opts = {});

/// CSV `state,p`.
int cmd_stationary(const ModelFile &m, std::ostream &out, std::ostream &err,
                   const CommandOptions &opts = {});

/// Runs the identity suite; one PASS/FAIL/SKIP line each.
int cmd_check(const ModelFile &m, std::ostream &out, std::ostream &err,
              const CommandOptions &opts = {});

/// Full command line, `args[0]` being the program name.
int run_cli(const std::vector<std::string> &args, std::ostream &out,
            std::ostream &err);

} // namespace pbn::cli

#endif
