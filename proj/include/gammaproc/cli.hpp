#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gammaproc {

/// Run the command line given as argv (program name first). Exit status 0 on
/// success, 1 on failed validation or a runtime failure, 2 on usage or parse
/// errors.
int command_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gammaproc
