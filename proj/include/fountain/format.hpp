#pragma once

#include <string>

namespace fountain {

/// Locale-independent shortest-exact rendering with 17 significant digits;
/// non-finite values print as nan / inf / -inf.
std::string format_double(double v);

}  // namespace fountain
