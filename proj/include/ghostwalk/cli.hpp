#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ghostwalk/ghostdet.hpp"

namespace ghostwalk {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailure = 1,
  kExitUsage = 2,
  kExitResourceCap = 3,
};

/// Resolves one position token of a state spec to a target key.
using KeyResolver = std::function<int(std::string_view)>;

/// Parses `k=1,survivors=0,4,ghosts=(2,2);(6,4)`. Every part is optional; k,
/// when present, must equal the number of ghost pairs. Tokens are integers by
/// default. Throws std::invalid_argument on malformed input.
FinalState parse_state_spec(std::string_view spec, const KeyResolver& resolve = {});

/// Entry point behind the `ghostwalk` binary. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ghostwalk
