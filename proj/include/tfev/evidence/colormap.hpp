// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace tfev::evidence {

struct Rgb {
  std::uint8_t r, g, b;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

enum class Colormap { Viridis, Gray };

/// Fixed 256-entry lookup tables, dark (index 0) to bright (index 255).
const std::array<Rgb, 256>& colormap_table(Colormap map);
Colormap parse_colormap(std::string_view name);
std::string_view to_string(Colormap map);

}  // namespace tfev::evidence
