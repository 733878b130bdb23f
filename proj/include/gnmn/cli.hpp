#ifndef GNMN_CLI_HPP
#define GNMN_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace gnmn::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kConfigError = 2,
    kIngestError = 3,
    kRuntimeError = 4,
};

/// Environment variable naming the output directory when --out is absent.
inline constexpr const char* kOutDirEnv = "GNMN_OUT_DIR";

/// Entry point shared by the executable and the tests. `args` excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace gnmn::cli

#endif // GNMN_CLI_HPP
