#pragma once

#include <functional>
#include <string>

namespace cqs {

// Non-fatal warnings (regime guards, convergence gaps). Default sink is stderr.
using WarningSink = std::function<void(const std::string&)>;

void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace cqs
