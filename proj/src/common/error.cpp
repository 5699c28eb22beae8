// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfev/error.hpp"

namespace tfev {

void throw_data(const std::string& what) { throw DataError(what); }

}  // namespace tfev
