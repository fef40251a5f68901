#include <cmath>
#include <limits>
#include <string>

#include "fb/cart/cart.hpp"
#include "fb/common/error.hpp"

namespace fb::cart {

FuzzyRegressionTree::FuzzyRegressionTree(RegressionTree tree, std::vector<double> steepness)
    : tree_(std::move(tree)), steepness_(std::move(steepness))
{
    if (steepness_.size() != tree_.nodes().size())
        throw InvalidArgument("fuzzy tree: one steepness entry per node is required");
    for (std::size_t i = 0; i < steepness_.size(); ++i)
        if (!tree_.node(i).is_leaf() && (!(steepness_[i] > 0.0) || !std::isfinite(steepness_[i])))
            throw InvalidArgument("fuzzy tree: node " + std::to_string(i) + " needs a finite steepness > 0");
}

std::vector<FuzzyRegressionTree::LeafGrade> FuzzyRegressionTree::leaf_grades(std::span<const double> x) const
{
    if (x.size() != tree_.input_dim())
        throw DataError("fuzzy tree: input has " + std::to_string(x.size()) + " features, tree expects " +
                        std::to_string(tree_.input_dim()));
    std::vector<LeafGrade> out;
    std::vector<LeafGrade> stack{{0, 1.0}};
    while (!stack.empty()) {
        const LeafGrade f = stack.back();
        stack.pop_back();
        const TreeNode& n = tree_.node(f.node);
        if (n.is_leaf()) {
            out.push_back(f);
            continue;
        }
        const double alpha = steepness_[f.node];
        const double left = MembershipFunction(SigmoidDown{alpha, n.threshold}).grade(x[n.feature]);
        const double right = MembershipFunction(SigmoidUp{alpha, n.threshold}).grade(x[n.feature]);
        stack.push_back({static_cast<std::size_t>(n.right), f.grade * right});
        stack.push_back({static_cast<std::size_t>(n.left), f.grade * left});
    }
    return out;
}

double FuzzyRegressionTree::path_grade_sum(std::span<const double> x) const
{
    double s = 0.0;
    for (const LeafGrade& g : leaf_grades(x))
        s += g.grade;
    return s;
}

double FuzzyRegressionTree::predict(std::span<const double> x) const
{
    const std::vector<LeafGrade> grades = leaf_grades(x);
    std::vector<double> weights;
    weights.reserve(grades.size());
    for (const LeafGrade& g : grades)
        weights.push_back(g.grade);
    weights = normalize_firings(std::move(weights));
    double y = 0.0;
    for (std::size_t k = 0; k < grades.size(); ++k)
        y += weights[k] * tree_.node(grades[k].node).leaf.evaluate(x);
    return y;
}

FuzzyRegressionTree fuzzify_tree(const RegressionTree& tree, SteepnessPolicy policy)
{
    if (!(policy.value > 0.0) || !std::isfinite(policy.value))
        throw InvalidArgument("fuzzify_tree: steepness parameter must be finite and > 0");
    const auto& nodes = tree.nodes();
    std::vector<double> steepness(nodes.size(), 0.0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].is_leaf())
            continue;
        if (policy.kind == SteepnessPolicy::Kind::Fixed) {
            steepness[i] = policy.value;
            continue;
        }
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            if (j == i || nodes[j].is_leaf() || nodes[j].feature != nodes[i].feature)
                continue;
            const double g = std::abs(nodes[j].threshold - nodes[i].threshold);
            if (g > 0.0)
                gap = std::min(gap, g);
        }
        if (!std::isfinite(gap)) {
            const auto& ranges = tree.feature_ranges();
            const double span = ranges.empty() ? 0.0 : ranges[nodes[i].feature].hi - ranges[nodes[i].feature].lo;
            gap = span > 0.0 ? span / 10.0 : 1.0;
        }
        steepness[i] = policy.value / gap;
    }
    return FuzzyRegressionTree(tree, std::move(steepness));
}

TskModel fuzzy_tree_to_tsk(const FuzzyRegressionTree& ftree, bool upgrade_affine)
{
    const RegressionTree& tree = ftree.tree();
    const std::size_t d = tree.input_dim();
    std::vector<Rule> rules;
    struct Frame {
        std::size_t node;
        Antecedent antecedent;
    };
    std::vector<Frame> stack;
    stack.push_back({0, {}});
    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        const TreeNode& n = tree.node(f.node);
        if (n.is_leaf()) {
            std::vector<bool> seen(d, false);
            for (const Clause& c : f.antecedent.clauses) {
                if (seen[c.feature])
                    f.antecedent.path = true;
                seen[c.feature] = true;
            }
            Consequent out = n.leaf;
            if (upgrade_affine)
                if (const auto* c = n.leaf.constant())
                    out = Affine{std::vector<double>(d, 0.0), c->value};
            rules.push_back(Rule{std::move(f.antecedent), std::move(out)});
            continue;
        }
        const double alpha = ftree.steepness(f.node);
        Frame right{static_cast<std::size_t>(n.right), f.antecedent};
        right.antecedent.clauses.push_back(Clause{n.feature, SigmoidUp{alpha, n.threshold}});
        f.antecedent.clauses.push_back(Clause{n.feature, SigmoidDown{alpha, n.threshold}});
        stack.push_back(std::move(right));
        stack.push_back(Frame{static_cast<std::size_t>(n.left), std::move(f.antecedent)});
    }
    return TskModel(d, std::move(rules), Aggregation::WeightedAverage);
}

}  // namespace fb::cart
