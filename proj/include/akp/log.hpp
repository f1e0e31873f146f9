#pragma once

#include <functional>
#include <string_view>

namespace akp {

using WarningSink = std::function<void(std::string_view)>;

/// Routes library warnings (default: stderr). Returns the previous sink.
WarningSink set_warning_sink(WarningSink sink);

void warn(std::string_view message);

}  // namespace akp
