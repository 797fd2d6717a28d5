#pragma once

// RodSpec JSON: {"name":…, "sections":[{"length_mm":…, "e_MPa":…}×3],
// "side_mm":…, "residual_flux_mT":…}. External files are mm/MPa/mT;
// conversion to SI happens here.

#include <string>

#include "magbend/rod.hpp"

namespace magbend {

RodSpec rod_spec_from_json(const std::string& text);
RodSpec rod_spec_from_file(const std::string& path);
std::string rod_spec_to_json(const RodSpec& spec);

std::string read_text_file(const std::string& path);        // throws io_error
void write_text_file(const std::string& path, const std::string& text);

}  // namespace magbend
