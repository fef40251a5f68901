#include "fb/common/error.hpp"
#include "fb/stacking/stacking.hpp"

namespace fb::stacking {

namespace {

Json base_to_json(const BaseModel& b)
{
    Json j;
    j["seed"] = b.seed;
    j["ridge"] = b.ridge;
    j["slopes"] = b.slopes;
    j["intercept"] = b.intercept;
    return j;
}

BaseModel base_from_json(const Json& j, std::size_t d)
{
    BaseModel b;
    const Json& seed = require_field(j, "seed");
    if (!seed.is_number_unsigned())
        throw DataError("stack base: 'seed' must be a non-negative integer");
    b.seed = seed.get<std::uint64_t>();
    b.ridge = require_number(j, "ridge");
    b.slopes = number_array(require_field(j, "slopes"), "stack base slopes");
    if (b.slopes.size() != d)
        throw DataError("stack base: expected " + std::to_string(d) + " slopes");
    b.intercept = require_number(j, "intercept");
    return b;
}

}  // namespace

Json to_json(const StackModel& model)
{
    Json j;
    j["type"] = "stack";
    j["input_dim"] = model.input_dim();
    Json bases = Json::array();
    for (const BaseModel& b : model.bases())
        bases.push_back(base_to_json(b));
    j["bases"] = std::move(bases);
    Json c;
    if (const auto* w = std::get_if<ConstantWeights>(&model.combiner())) {
        c["kind"] = "constant";
        c["weights"] = w->weights;
        c["intercept"] = w->intercept;
    } else {
        c["kind"] = "adaptive";
        Json gates = Json::array();
        for (const moe::AffineGate& g : std::get<AdaptiveGates>(model.combiner()).gates)
            gates.push_back(Json{{"weights", g.weights}, {"bias", g.bias}});
        c["gates"] = std::move(gates);
    }
    j["combiner"] = std::move(c);
    return j;
}

StackModel stack_from_json(const Json& j)
{
    if (!j.is_object() || !j.contains("type") || j["type"] != "stack")
        throw DataError("stack: expected an object with \"type\": \"stack\"");
    const std::size_t d = require_index(j, "input_dim");
    const Json& bases_json = require_field(j, "bases");
    if (!bases_json.is_array())
        throw DataError("stack: 'bases' must be an array");
    std::vector<BaseModel> bases;
    for (const Json& b : bases_json)
        bases.push_back(base_from_json(b, d));

    const Json& c = require_field(j, "combiner");
    const Json& kind = require_field(c, "kind");
    try {
        if (kind == "constant")
            return StackModel(d, std::move(bases),
                              ConstantWeights{number_array(require_field(c, "weights"), "stack weights"),
                                              require_number(c, "intercept")});
        if (kind == "adaptive") {
            const Json& gates_json = require_field(c, "gates");
            if (!gates_json.is_array())
                throw DataError("stack: 'gates' must be an array");
            AdaptiveGates gates;
            for (const Json& g : gates_json)
                gates.gates.push_back(
                    moe::AffineGate{number_array(require_field(g, "weights"), "gate weights"), require_number(g, "bias")});
            return StackModel(d, std::move(bases), std::move(gates));
        }
    } catch (const InvalidArgument& e) {
        throw DataError(e.what());
    }
    throw DataError("stack: unknown combiner kind " + kind.dump());
}

}  // namespace fb::stacking
