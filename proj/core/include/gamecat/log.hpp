#pragma once

#include <functional>
#include <string_view>

namespace gamecat {

using WarningHandler = std::function<void(std::string_view)>;

// Installs the sink for non-fatal diagnostics (dropped rows, empty term
// selections). The default writes to stderr. Passing an empty handler
// silences warnings. Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(std::string_view message);

}  // namespace gamecat
