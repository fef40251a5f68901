#include <string>

#include "fb/cart/cart.hpp"
#include "fb/common/error.hpp"

namespace fb::cart {
namespace {

Json node_to_json(const RegressionTree& tree, const std::vector<double>* steepness, std::size_t i)
{
    const TreeNode& n = tree.node(i);
    if (n.is_leaf())
        return Json{{"leaf", consequent_to_json(n.leaf)}};
    Json j{{"feature", n.feature}, {"threshold", n.threshold}};
    if (steepness)
        j["alpha"] = (*steepness)[i];
    j["left"] = node_to_json(tree, steepness, static_cast<std::size_t>(n.left));
    j["right"] = node_to_json(tree, steepness, static_cast<std::size_t>(n.right));
    return j;
}

// Depth-first, left child before right: node indices follow pre-order.
void node_from_json(const Json& j, std::size_t dim, bool fuzzy, std::vector<TreeNode>& nodes,
                    std::vector<double>& steepness, int depth)
{
    if (depth > 512)
        throw DataError("model json: tree is too deep");
    if (!j.is_object())
        throw DataError("model json: tree node must be an object");
    const std::size_t index = nodes.size();
    nodes.emplace_back();
    steepness.push_back(0.0);
    if (j.contains("leaf")) {
        nodes[index].leaf = consequent_from_json(j["leaf"], dim);
        return;
    }
    nodes[index].feature = require_index(j, "feature");
    nodes[index].threshold = require_number(j, "threshold");
    if (fuzzy)
        steepness[index] = require_number(j, "alpha");
    nodes[index].left = static_cast<std::ptrdiff_t>(nodes.size());
    node_from_json(require_field(j, "left"), dim, fuzzy, nodes, steepness, depth + 1);
    nodes[index].right = static_cast<std::ptrdiff_t>(nodes.size());
    node_from_json(require_field(j, "right"), dim, fuzzy, nodes, steepness, depth + 1);
}

Json ranges_to_json(const RegressionTree& tree)
{
    Json out = Json::array();
    for (const FeatureRange& r : tree.feature_ranges())
        out.push_back(Json::array({r.lo, r.hi}));
    return out;
}

RegressionTree read_tree(const Json& j, bool fuzzy, std::vector<double>& steepness)
{
    const std::size_t d = require_index(j, "input_dim");
    std::vector<FeatureRange> ranges;
    if (j.contains("feature_ranges")) {
        for (const Json& r : j["feature_ranges"]) {
            const std::vector<double> lohi = number_array(r, "feature_ranges");
            if (lohi.size() != 2)
                throw DataError("model json: feature range must be [lo, hi]");
            ranges.push_back({lohi[0], lohi[1]});
        }
    }
    std::vector<TreeNode> nodes;
    node_from_json(require_field(j, "root"), d, fuzzy, nodes, steepness, 0);
    try {
        return RegressionTree(d, std::move(nodes), std::move(ranges));
    } catch (const InvalidArgument& e) {
        throw DataError(std::string("model json: ") + e.what());
    }
}

}  // namespace

Json to_json(const RegressionTree& tree)
{
    return Json{{"type", "tree"},
                {"input_dim", tree.input_dim()},
                {"feature_ranges", ranges_to_json(tree)},
                {"root", node_to_json(tree, nullptr, 0)}};
}

Json to_json(const FuzzyRegressionTree& ftree)
{
    return Json{{"type", "fuzzy_tree"},
                {"input_dim", ftree.tree().input_dim()},
                {"feature_ranges", ranges_to_json(ftree.tree())},
                {"root", node_to_json(ftree.tree(), &ftree.steepness(), 0)}};
}

RegressionTree tree_from_json(const Json& j)
{
    if (j.contains("type") && j["type"] != "tree")
        throw DataError("model json: expected a tree model");
    std::vector<double> unused;
    return read_tree(j, false, unused);
}

FuzzyRegressionTree fuzzy_tree_from_json(const Json& j)
{
    if (j.contains("type") && j["type"] != "fuzzy_tree")
        throw DataError("model json: expected a fuzzy_tree model");
    std::vector<double> steepness;
    RegressionTree tree = read_tree(j, true, steepness);
    try {
        return FuzzyRegressionTree(std::move(tree), std::move(steepness));
    } catch (const InvalidArgument& e) {
        throw DataError(std::string("model json: ") + e.what());
    }
}

}  // namespace fb::cart
