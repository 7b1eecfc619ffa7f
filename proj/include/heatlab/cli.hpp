#ifndef HEATLAB_CLI_HPP
#define HEATLAB_CLI_HPP

#include <iosfwd>

namespace heatlab {

/// Exit codes: 0 success, 1 a "fails" verdict under --strict, 2 usage, input
/// or IO error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace heatlab

#endif  // HEATLAB_CLI_HPP
