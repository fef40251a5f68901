#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fb/core/dataset.hpp"
#include "fb/core/io.hpp"
#include "fb/core/tsk.hpp"

namespace fb::cart {

// Internal nodes send x left when x[feature] < threshold.
struct TreeNode {
    std::size_t feature = 0;
    double threshold = 0.0;
    std::ptrdiff_t left = -1;
    std::ptrdiff_t right = -1;
    Consequent leaf = Constant{0.0};

    bool is_leaf() const { return left < 0; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// Flat node arena with the root at index 0.
class RegressionTree {
public:
    RegressionTree(std::size_t input_dim, std::vector<TreeNode> nodes, std::vector<FeatureRange> feature_ranges = {});

    std::size_t input_dim() const { return input_dim_; }
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    const TreeNode& node(std::size_t i) const { return nodes_[i]; }
    // Observed training range per feature; empty when unknown.
    const std::vector<FeatureRange>& feature_ranges() const { return ranges_; }

    // Leaf node indices, left subtree first.
    std::vector<std::size_t> leaves() const;
    std::size_t leaf_count() const { return leaves().size(); }
    std::size_t leaf_for(std::span<const double> x) const;
    double predict(std::span<const double> x) const;

    friend bool operator==(const RegressionTree&, const RegressionTree&) = default;

private:
    std::size_t input_dim_;
    std::vector<TreeNode> nodes_;
    std::vector<FeatureRange> ranges_;
};

inline double tree_predict(const RegressionTree& tree, std::span<const double> x) { return tree.predict(x); }

// Greedy best-first growth by largest SSE reduction until `max_leaves` leaves
// exist or no split reduces the error. Thresholds are midpoints between
// consecutive distinct feature values; ties go to the lowest feature index,
// then the lowest threshold.
RegressionTree fit_tree(const Dataset& data, std::size_t max_leaves, std::size_t min_leaf = 1);

struct SplitTest {
    std::size_t feature = 0;
    double threshold = 0.0;
    bool below = true;  // x < threshold; otherwise x >= threshold
};

struct CrispRule {
    std::vector<SplitTest> tests;
    Consequent value;
    bool matches(std::span<const double> x) const;
};

std::vector<CrispRule> extract_crisp_rules(const RegressionTree& tree);
// "IF x0 < 5.00 AND x1 >= 2.00 THEN y = 30.00"
std::string format_rule(const CrispRule& rule, int decimals = 2);

class FuzzyRegressionTree {
public:
    // `steepness[i]` belongs to internal node i (ignored for leaves).
    FuzzyRegressionTree(RegressionTree tree, std::vector<double> steepness);

    const RegressionTree& tree() const { return tree_; }
    double steepness(std::size_t node) const { return steepness_[node]; }
    const std::vector<double>& steepness() const { return steepness_; }

    struct LeafGrade {
        std::size_t node;
        double grade;  // product of the sigmoid grades along the path
    };
    std::vector<LeafGrade> leaf_grades(std::span<const double> x) const;
    double path_grade_sum(std::span<const double> x) const;
    // sum_leaves grade * y_leaf / sum_leaves grade
    double predict(std::span<const double> x) const;

    friend bool operator==(const FuzzyRegressionTree&, const FuzzyRegressionTree&) = default;

private:
    RegressionTree tree_;
    std::vector<double> steepness_;
};

inline double fuzzy_tree_predict(const FuzzyRegressionTree& tree, std::span<const double> x) { return tree.predict(x); }

struct SteepnessPolicy {
    enum class Kind { GapScaled, Fixed };
    Kind kind = Kind::GapScaled;
    // GapScaled: steepness = value / gap. Fixed: steepness = value.
    double value = 8.0;

    static SteepnessPolicy gap_scaled(double factor = 8.0) { return {Kind::GapScaled, factor}; }
    static SteepnessPolicy fixed(double steepness) { return {Kind::Fixed, steepness}; }
};

// Replace each crisp split by complementary sigmoids: SigmoidDown on the left
// branch, SigmoidUp on the right. The gap of a split is the distance to the
// nearest other threshold on the same feature in the tree, or a tenth of the
// feature range when there is none.
FuzzyRegressionTree fuzzify_tree(const RegressionTree& tree, SteepnessPolicy policy = SteepnessPolicy::gap_scaled());

// One rule per leaf; the antecedent is the path's sigmoid clauses in root-to-
// leaf order. `upgrade_affine` turns each leaf constant c into 0 . x + c.
TskModel fuzzy_tree_to_tsk(const FuzzyRegressionTree& tree, bool upgrade_affine = false);

// Gaussian-weighted local affine models on the partitions of a tree:
//   f_k(x) = exp(-sum_i (x_i - mean_ki)^2 / width_ki^2)
struct SupportPartition {
    std::vector<double> means;
    std::vector<double> widths;
    Affine model;
};

std::vector<SupportPartition> fit_support(const Dataset& data, const RegressionTree& tree);
double support_predict(std::span<const SupportPartition> partitions, std::span<const double> x);

Json to_json(const RegressionTree& tree);
Json to_json(const FuzzyRegressionTree& tree);
RegressionTree tree_from_json(const Json& j);
FuzzyRegressionTree fuzzy_tree_from_json(const Json& j);

}  // namespace fb::cart
