#include "magbend/spec_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "magbend/errors.hpp"

namespace magbend {

RodSpec rod_spec_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("rod spec is not valid JSON: ") + e.what());
    }
    try {
        RodSpec spec;
        spec.name = j.value("name", "");
        const auto& sections = j.at("sections");
        if (!sections.is_array() || sections.size() != 3)
            throw config_error("rod spec '" + spec.name + "': exactly 3 sections required");
        static const char* labels[3] = {"bottom", "middle", "top"};
        for (int i = 0; i < 3; ++i) {
            spec.sections[i].length = sections[i].at("length_mm").get<double>() * 1e-3;
            spec.sections[i].youngs_modulus = sections[i].at("e_MPa").get<double>() * 1e6;
            spec.sections[i].label = labels[i];
        }
        spec.cross_section_side = j.at("side_mm").get<double>() * 1e-3;
        spec.residual_flux = j.at("residual_flux_mT").get<double>() * 1e-3;
        spec.validate();
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("rod spec: missing or mistyped field: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw config_error(e.what());
    }
}

RodSpec rod_spec_from_file(const std::string& path) {
    return rod_spec_from_json(read_text_file(path));
}

std::string rod_spec_to_json(const RodSpec& spec) {
    nlohmann::ordered_json j;
    j["name"] = spec.name;
    nlohmann::ordered_json sections = nlohmann::ordered_json::array();
    for (const Section& s : spec.sections) {
        nlohmann::ordered_json sj;
        sj["length_mm"] = s.length * 1e3;
        sj["e_MPa"] = s.youngs_modulus * 1e-6;
        sections.push_back(sj);
    }
    j["sections"] = sections;
    j["side_mm"] = spec.cross_section_side * 1e3;
    j["residual_flux_mT"] = spec.residual_flux * 1e3;
    return j.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw io_error("read failed for '" + path + "'");
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw io_error("write failed for '" + path + "'");
}

}  // namespace magbend
