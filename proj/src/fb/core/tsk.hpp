#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "fb/core/dataset.hpp"
#include "fb/core/membership.hpp"

namespace fb {

struct Constant {
    double value = 0.0;
    friend bool operator==(const Constant&, const Constant&) = default;
};

// slopes . x + intercept
struct Affine {
    std::vector<double> slopes;
    double intercept = 0.0;
    friend bool operator==(const Affine&, const Affine&) = default;
};

class Consequent {
public:
    using Form = std::variant<Constant, Affine>;

    Consequent(Constant c) : form_(c) {}
    Consequent(Affine a) : form_(std::move(a)) {}

    const Form& form() const { return form_; }
    const Affine* affine() const { return std::get_if<Affine>(&form_); }
    const Constant* constant() const { return std::get_if<Constant>(&form_); }
    bool is_affine() const { return affine() != nullptr; }

    double evaluate(std::span<const double> x) const;

    friend bool operator==(const Consequent&, const Consequent&) = default;

private:
    Form form_;
};

struct Clause {
    std::size_t feature = 0;
    MembershipFunction mf;
    friend bool operator==(const Clause&, const Clause&) = default;
};

// Conjunction of clauses under the product t-norm. An empty clause list fires
// at 1. Ordinarily each feature appears at most once; `path` marks an
// antecedent read off a tree path, where the same feature may be tested more
// than once and its grades simply multiply.
struct Antecedent {
    std::vector<Clause> clauses;
    bool path = false;

    double log_firing(std::span<const double> x) const;
    double firing(std::span<const double> x) const;
    bool covers_all_features(std::size_t dim) const;

    friend bool operator==(const Antecedent&, const Antecedent&) = default;
};

struct Rule {
    Antecedent antecedent;
    Consequent consequent;
    friend bool operator==(const Rule&, const Rule&) = default;
};

double firing_level(const Rule& rule, std::span<const double> x);

enum class Aggregation { WeightedAverage, WeightedSum };

// Immutable once built; safe to share across threads for prediction.
class TskModel {
public:
    TskModel(std::size_t input_dim, std::vector<Rule> rules, Aggregation aggregation = Aggregation::WeightedAverage);

    std::size_t input_dim() const { return input_dim_; }
    std::size_t size() const { return rules_.size(); }
    const std::vector<Rule>& rules() const { return rules_; }
    const Rule& rule(std::size_t k) const { return rules_[k]; }
    Aggregation aggregation() const { return aggregation_; }

    std::vector<double> firings(std::span<const double> x) const;
    // f_k / sum f; uniform 1/K when the total firing underflows kFiringEpsilon.
    std::vector<double> normalized_firings(std::span<const double> x) const;
    double predict(std::span<const double> x) const;

    friend bool operator==(const TskModel&, const TskModel&) = default;

private:
    void check_input(std::span<const double> x) const;

    std::size_t input_dim_;
    std::vector<Rule> rules_;
    Aggregation aggregation_;
};

// Uniform fallback shared by every normalized-firing computation.
std::vector<double> normalize_firings(std::vector<double> raw);

// All conjunctions of one MF per feature, first feature varying slowest.
std::vector<Antecedent> grid_antecedents(const std::vector<std::vector<MembershipFunction>>& per_feature,
                                         std::size_t rule_cap);

}  // namespace fb
