#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qpvlab {

/// Command-line front end: bound | entropy | simulate | attack | sweep.
/// `args` excludes the program name. Returns 0 on success or help, 1 on a
/// domain error, 2 on a usage error. The default seed comes from
/// QPVLAB_SEED (1 if unset).
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qpvlab
