#pragma once

#include <string>

namespace kpbloch::cli {

/// Raised by parse_arguments for --help; carries the help text.
struct HelpRequested {
    std::string text;
};

}  // namespace kpbloch::cli
