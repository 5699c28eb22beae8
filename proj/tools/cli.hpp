// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tfev::cli {

/// Runs one subcommand. `args` excludes the program name. Returns 0 on
/// success, 1 on a usage error, 2 on a data or validation error.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tfev::cli
