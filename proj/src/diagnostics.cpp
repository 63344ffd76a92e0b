#include "cqs/diagnostics.hpp"

#include <iostream>
#include <utility>

namespace cqs {

namespace {
WarningSink& sink() {
  static WarningSink s = [](const std::string& m) { std::cerr << "warning: " << m << '\n'; };
  return s;
}
}  // namespace

void set_warning_sink(WarningSink s) {
  if (s)
    sink() = std::move(s);
  else
    sink() = [](const std::string&) {};
}

void warn(const std::string& message) { sink()(message); }

}  // namespace cqs
