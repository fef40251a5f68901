#include "fb/common/error.hpp"
#include "fb/moe/moe.hpp"

namespace fb::moe {

Json to_json(const MoeModel& model)
{
    Json experts = Json::array();
    for (const Affine& e : model.experts())
        experts.push_back(consequent_to_json(Consequent{e}));
    Json gates = Json::array();
    for (const GateFunction& g : model.gates()) {
        if (const auto* q = std::get_if<QuadraticGate>(&g))
            gates.push_back(Json{{"kind", "quadratic"}, {"centers", q->centers}, {"widths", q->widths}});
        else {
            const auto& a = std::get<AffineGate>(g);
            gates.push_back(Json{{"kind", "affine"}, {"weights", a.weights}, {"bias", a.bias}});
        }
    }
    return Json{{"type", "moe"}, {"input_dim", model.input_dim()}, {"experts", experts}, {"gates", gates}};
}

MoeModel moe_from_json(const Json& j)
{
    if (j.contains("type") && j["type"] != "moe")
        throw DataError("model json: expected a moe model");
    const std::size_t d = require_index(j, "input_dim");
    const Json& experts_json = require_field(j, "experts");
    const Json& gates_json = require_field(j, "gates");
    if (!experts_json.is_array() || !gates_json.is_array())
        throw DataError("model json: 'experts' and 'gates' must be arrays");
    std::vector<Affine> experts;
    for (const Json& ej : experts_json) {
        const Consequent c = consequent_from_json(ej, d);
        if (!c.is_affine())
            throw DataError("model json: moe experts must be affine");
        experts.push_back(*c.affine());
    }
    std::vector<GateFunction> gates;
    for (const Json& gj : gates_json) {
        const Json& kind = require_field(gj, "kind");
        if (kind == "quadratic")
            gates.emplace_back(QuadraticGate{number_array(require_field(gj, "centers"), "centers"),
                                             number_array(require_field(gj, "widths"), "widths")});
        else if (kind == "affine")
            gates.emplace_back(AffineGate{number_array(require_field(gj, "weights"), "weights"), require_number(gj, "bias")});
        else
            throw DataError("model json: gate kind must be quadratic or affine");
    }
    try {
        return MoeModel(d, std::move(experts), std::move(gates));
    } catch (const InvalidArgument& e) {
        throw DataError(std::string("model json: ") + e.what());
    }
}

}  // namespace fb::moe
