#pragma once

#include <string>

namespace geoperiods::cli {

/// Python/matplotlib script that reads the bundle's CSVs from its own directory.
std::string plot_script_for(const std::string& subcommand);

}  // namespace geoperiods::cli
