#include "fb/common/error.hpp"
#include "fb/rbfn/rbfn.hpp"

namespace fb::rbfn {

Json to_json(const RbfnModel& model)
{
    Json units = Json::array();
    for (const RbfUnit& u : model.units()) {
        Json unit{{"features", u.features}, {"centers", u.centers}};
        if (u.shared_width())
            unit["width"] = std::get<double>(u.widths);
        else
            unit["widths"] = std::get<std::vector<double>>(u.widths);
        unit["output"] = consequent_to_json(u.output);
        units.push_back(std::move(unit));
    }
    return Json{{"type", "rbfn"}, {"input_dim", model.input_dim()}, {"normalized", model.normalized()}, {"units", units}};
}

RbfnModel rbfn_from_json(const Json& j)
{
    if (j.contains("type") && j["type"] != "rbfn")
        throw DataError("model json: expected an rbfn model");
    const std::size_t d = require_index(j, "input_dim");
    const Json& norm = require_field(j, "normalized");
    if (!norm.is_boolean())
        throw DataError("model json: 'normalized' must be a boolean");
    const Json& units_json = require_field(j, "units");
    if (!units_json.is_array())
        throw DataError("model json: 'units' must be an array");
    std::vector<RbfUnit> units;
    for (const Json& uj : units_json) {
        RbfUnit u{{}, number_array(require_field(uj, "centers"), "centers"), 0.0,
                  consequent_from_json(require_field(uj, "output"), d)};
        const Json& features = require_field(uj, "features");
        if (!features.is_array())
            throw DataError("model json: 'features' must be an array");
        for (const Json& f : features) {
            if (!f.is_number_unsigned())
                throw DataError("model json: feature indices must be non-negative integers");
            u.features.push_back(f.get<std::size_t>());
        }
        if (uj.contains("width"))
            u.widths = require_number(uj, "width");
        else
            u.widths = number_array(require_field(uj, "widths"), "widths");
        units.push_back(std::move(u));
    }
    try {
        return RbfnModel(d, std::move(units), norm.get<bool>());
    } catch (const InvalidArgument& e) {
        throw DataError(std::string("model json: ") + e.what());
    }
}

}  // namespace fb::rbfn
