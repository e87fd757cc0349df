#pragma once

#include <string>

namespace realcross {

/// Shortest general-format rendering with 12 significant digits, '.' decimal
/// point, independent of the global locale. Non-finite values render as
/// "nan", "inf" or "-inf".
std::string format_number(double x);

}  // namespace realcross
