#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "hvrp/core/instance.hpp"

namespace hvrp {

/// Cordeau MDVRP text: "type m n t" header, t "D Q" depot lines, n customer
/// rows "i x y d q f a list...", then t depot rows. A nonzero D sets the
/// duration limit.
Instance parse_cordeau(std::string_view text, std::string name = "");

/// TSPLIB / CVRPLIB keyword format with EUC_2D weights. TSP files become
/// tsp_mode instances; CVRP files are single-depot with the depot moved to
/// index 0. Distances are rounded (nint) for TSP files and for Set-X names
/// ("X-n..."), matching the published objective conventions.
Instance parse_tsplib_like(std::string_view text);

/// Solomon VRPTW layout; row 0 is the depot and supplies the horizon.
Instance parse_solomon(std::string_view text);

enum class InstanceFormat { cordeau, tsplib, solomon, json };

/// Guesses the format from the content (keywords / header shape).
InstanceFormat detect_format(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);

/// Reads and parses any supported format; the instance name defaults to the
/// file stem when the format carries none.
Instance load_instance(const std::filesystem::path& path);

}  // namespace hvrp
