#include "graspsim/format.hpp"

#include <fmt/format.h>

namespace graspsim {

std::string format_number(double value) {
    std::string s = fmt::format("{:.10f}", value);
    const auto dot = s.find('.');
    if (dot != std::string::npos) {
        auto last = s.find_last_not_of('0');
        if (last == dot) --last;
        s.erase(last + 1);
    }
    if (s == "-0") s = "0";
    return s;
}

std::string format_exact(double value) { return fmt::format("{}", value); }

}  // namespace graspsim
