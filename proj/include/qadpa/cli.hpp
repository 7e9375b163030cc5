#pragma once

#include <string>
#include <vector>

namespace qadpa {

// Command-line entry point. Exit codes: 0 success, 2 validation or parse
// failure, 3 numerical failure. QADPA_SEED in the environment overrides the
// --seed flag of seeded subcommands.
int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args);

}  // namespace qadpa
