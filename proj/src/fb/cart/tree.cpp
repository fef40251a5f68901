#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <fmt/format.h>

#include "fb/cart/cart.hpp"
#include "fb/common/error.hpp"

namespace fb::cart {

RegressionTree::RegressionTree(std::size_t input_dim, std::vector<TreeNode> nodes, std::vector<FeatureRange> feature_ranges)
    : input_dim_(input_dim), nodes_(std::move(nodes)), ranges_(std::move(feature_ranges))
{
    if (input_dim_ == 0)
        throw InvalidArgument("tree: input dimension must be >= 1");
    if (nodes_.empty())
        throw InvalidArgument("tree: needs at least one node");
    if (!ranges_.empty() && ranges_.size() != input_dim_)
        throw InvalidArgument("tree: feature range count does not match the input dimension");

    // Every node reachable exactly once from the root, and every path leaves a
    // non-empty interval on each feature.
    struct Frame {
        std::size_t node;
        std::vector<double> lo, hi;
    };
    std::vector<bool> visited(nodes_.size(), false);
    std::vector<Frame> stack;
    stack.push_back({0, std::vector<double>(input_dim_, -std::numeric_limits<double>::infinity()),
                     std::vector<double>(input_dim_, std::numeric_limits<double>::infinity())});
    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        if (visited[f.node])
            throw InvalidArgument("tree: node " + std::to_string(f.node) + " has more than one parent");
        visited[f.node] = true;
        const TreeNode& n = nodes_[f.node];
        if (n.is_leaf()) {
            if (const auto* a = n.leaf.affine(); a && a->slopes.size() != input_dim_)
                throw InvalidArgument("tree: leaf " + std::to_string(f.node) + " has the wrong number of slopes");
            continue;
        }
        if (n.right < 0 || static_cast<std::size_t>(n.left) >= nodes_.size() ||
            static_cast<std::size_t>(n.right) >= nodes_.size())
            throw InvalidArgument("tree: node " + std::to_string(f.node) + " has an invalid child index");
        if (n.feature >= input_dim_)
            throw InvalidArgument("tree: node " + std::to_string(f.node) + " splits on feature " +
                                  std::to_string(n.feature) + " >= input dimension");
        if (!std::isfinite(n.threshold))
            throw InvalidArgument("tree: node " + std::to_string(f.node) + " has a non-finite threshold");
        if (!(n.threshold > f.lo[n.feature] && n.threshold < f.hi[n.feature]))
            throw InvalidArgument("tree: node " + std::to_string(f.node) +
                                  " threshold leaves an empty region on its path");
        Frame left{static_cast<std::size_t>(n.left), f.lo, f.hi};
        left.hi[n.feature] = n.threshold;
        Frame right{static_cast<std::size_t>(n.right), std::move(f.lo), std::move(f.hi)};
        right.lo[n.feature] = n.threshold;
        stack.push_back(std::move(right));
        stack.push_back(std::move(left));
    }
    if (std::find(visited.begin(), visited.end(), false) != visited.end())
        throw InvalidArgument("tree: unreachable nodes");
}

std::vector<std::size_t> RegressionTree::leaves() const
{
    std::vector<std::size_t> out;
    std::vector<std::size_t> stack{0};
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        if (nodes_[i].is_leaf()) {
            out.push_back(i);
            continue;
        }
        stack.push_back(static_cast<std::size_t>(nodes_[i].right));
        stack.push_back(static_cast<std::size_t>(nodes_[i].left));
    }
    return out;
}

std::size_t RegressionTree::leaf_for(std::span<const double> x) const
{
    if (x.size() != input_dim_)
        throw DataError("tree: input has " + std::to_string(x.size()) + " features, tree expects " +
                        std::to_string(input_dim_));
    std::size_t i = 0;
    while (!nodes_[i].is_leaf()) {
        const TreeNode& n = nodes_[i];
        i = static_cast<std::size_t>(x[n.feature] < n.threshold ? n.left : n.right);
    }
    return i;
}

double RegressionTree::predict(std::span<const double> x) const { return nodes_[leaf_for(x)].leaf.evaluate(x); }

namespace {

struct Candidate {
    bool valid = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
};

struct OpenLeaf {
    std::size_t node;
    std::vector<std::size_t> rows;
    Candidate split;
};

double mean_of(const Dataset& data, const std::vector<std::size_t>& rows)
{
    double s = 0.0;
    for (std::size_t r : rows)
        s += data.target(r);
    return s / static_cast<double>(rows.size());
}

Candidate best_split(const Dataset& data, const std::vector<std::size_t>& rows, std::size_t min_leaf)
{
    Candidate best;
    const std::size_t n = rows.size();
    if (n < 2 * min_leaf)
        return best;

    const double mean = mean_of(data, rows);
    double sse = 0.0;
    for (std::size_t r : rows) {
        const double u = data.target(r) - mean;
        sse += u * u;
    }
    if (!(sse > 0.0))
        return best;
    // Splits that only shave rounding noise off a constant node do not count.
    const double min_gain = 1e-12 * sse;

    std::vector<std::size_t> order(rows);
    for (std::size_t f = 0; f < data.dim(); ++f) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return data.row(a)[f] < data.row(b)[f]; });
        double total = 0.0;
        for (std::size_t r : order)
            total += data.target(r) - mean;
        double left_sum = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            left_sum += data.target(order[i]) - mean;
            const double a = data.row(order[i])[f];
            const double b = data.row(order[i + 1])[f];
            if (!(a < b))
                continue;
            const std::size_t n_left = i + 1;
            const std::size_t n_right = n - n_left;
            if (n_left < min_leaf || n_right < min_leaf)
                continue;
            const double ml = left_sum / static_cast<double>(n_left);
            const double mr = (total - left_sum) / static_cast<double>(n_right);
            const double gain = static_cast<double>(n_left) * static_cast<double>(n_right) / static_cast<double>(n) *
                                (ml - mr) * (ml - mr);
            if (gain > min_gain && gain > best.gain) {
                double t = 0.5 * (a + b);
                if (!(t > a))
                    t = b;
                best = Candidate{true, f, t, gain};
            }
        }
    }
    return best;
}

// Renumber so that node indices follow a left-first pre-order walk, the layout
// the JSON reader produces.
std::vector<TreeNode> preorder(const std::vector<TreeNode>& nodes)
{
    struct Frame {
        std::size_t old;
        std::ptrdiff_t parent;
        bool right;
    };
    std::vector<TreeNode> out;
    out.reserve(nodes.size());
    std::vector<Frame> stack{{0, -1, false}};
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        const auto slot = static_cast<std::ptrdiff_t>(out.size());
        if (f.parent >= 0) {
            TreeNode& p = out[static_cast<std::size_t>(f.parent)];
            (f.right ? p.right : p.left) = slot;
        }
        out.push_back(nodes[f.old]);
        if (!nodes[f.old].is_leaf()) {
            stack.push_back({static_cast<std::size_t>(nodes[f.old].right), slot, true});
            stack.push_back({static_cast<std::size_t>(nodes[f.old].left), slot, false});
        }
    }
    return out;
}

}  // namespace

RegressionTree fit_tree(const Dataset& data, std::size_t max_leaves, std::size_t min_leaf)
{
    if (data.empty())
        throw DataError("fit_tree: empty dataset");
    if (max_leaves == 0)
        throw InvalidArgument("fit_tree: max_leaves must be >= 1");
    if (min_leaf == 0)
        throw InvalidArgument("fit_tree: min_leaf must be >= 1");

    std::vector<FeatureRange> ranges(data.dim(), FeatureRange{std::numeric_limits<double>::infinity(),
                                                              -std::numeric_limits<double>::infinity()});
    for (std::size_t n = 0; n < data.size(); ++n)
        for (std::size_t i = 0; i < data.dim(); ++i) {
            ranges[i].lo = std::min(ranges[i].lo, data.row(n)[i]);
            ranges[i].hi = std::max(ranges[i].hi, data.row(n)[i]);
        }

    std::vector<TreeNode> nodes(1);
    std::vector<std::size_t> all(data.size());
    std::iota(all.begin(), all.end(), 0);
    nodes[0].leaf = Constant{mean_of(data, all)};

    std::vector<OpenLeaf> open;
    open.push_back({0, all, best_split(data, all, min_leaf)});
    std::size_t leaves = 1;
    while (leaves < max_leaves) {
        // Largest gain; ties to the earliest-created leaf.
        std::ptrdiff_t pick = -1;
        for (std::size_t i = 0; i < open.size(); ++i)
            if (open[i].split.valid && (pick < 0 || open[i].split.gain > open[static_cast<std::size_t>(pick)].split.gain))
                pick = static_cast<std::ptrdiff_t>(i);
        if (pick < 0)
            break;
        OpenLeaf leaf = std::move(open[static_cast<std::size_t>(pick)]);
        open.erase(open.begin() + pick);

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : leaf.rows)
            (data.row(r)[leaf.split.feature] < leaf.split.threshold ? left_rows : right_rows).push_back(r);

        const std::size_t left_index = nodes.size();
        const std::size_t right_index = left_index + 1;
        TreeNode& parent = nodes[leaf.node];
        parent.feature = leaf.split.feature;
        parent.threshold = leaf.split.threshold;
        parent.left = static_cast<std::ptrdiff_t>(left_index);
        parent.right = static_cast<std::ptrdiff_t>(right_index);
        parent.leaf = Constant{0.0};
        nodes.push_back(TreeNode{0, 0.0, -1, -1, Constant{mean_of(data, left_rows)}});
        nodes.push_back(TreeNode{0, 0.0, -1, -1, Constant{mean_of(data, right_rows)}});

        Candidate left_split = best_split(data, left_rows, min_leaf);
        Candidate right_split = best_split(data, right_rows, min_leaf);
        open.push_back({left_index, std::move(left_rows), left_split});
        open.push_back({right_index, std::move(right_rows), right_split});
        ++leaves;
    }
    return RegressionTree(data.dim(), preorder(nodes), std::move(ranges));
}

bool CrispRule::matches(std::span<const double> x) const
{
    for (const SplitTest& t : tests) {
        const bool below = x[t.feature] < t.threshold;
        if (below != t.below)
            return false;
    }
    return true;
}

std::vector<CrispRule> extract_crisp_rules(const RegressionTree& tree)
{
    std::vector<CrispRule> out;
    struct Frame {
        std::size_t node;
        std::vector<SplitTest> tests;
    };
    std::vector<Frame> stack{{0, {}}};
    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        const TreeNode& n = tree.node(f.node);
        if (n.is_leaf()) {
            out.push_back(CrispRule{std::move(f.tests), n.leaf});
            continue;
        }
        Frame right{static_cast<std::size_t>(n.right), f.tests};
        right.tests.push_back({n.feature, n.threshold, false});
        f.tests.push_back({n.feature, n.threshold, true});
        stack.push_back(std::move(right));
        stack.push_back(Frame{static_cast<std::size_t>(n.left), std::move(f.tests)});
    }
    return out;
}

std::string format_rule(const CrispRule& rule, int decimals)
{
    std::string out = "IF ";
    if (rule.tests.empty())
        out += "true";
    for (std::size_t i = 0; i < rule.tests.size(); ++i) {
        const SplitTest& t = rule.tests[i];
        if (i > 0)
            out += " AND ";
        out += fmt::format("x{} {} {:.{}f}", t.feature, t.below ? "<" : ">=", t.threshold, decimals);
    }
    out += " THEN y = ";
    if (const auto* c = rule.value.constant()) {
        out += fmt::format("{:.{}f}", c->value, decimals);
    } else {
        const Affine& a = *rule.value.affine();
        for (std::size_t i = 0; i < a.slopes.size(); ++i)
            out += fmt::format("{:.{}f}*x{} + ", a.slopes[i], decimals, i);
        out += fmt::format("{:.{}f}", a.intercept, decimals);
    }
    return out;
}

}  // namespace fb::cart
