#include <cmath>
#include <limits>
#include <string>

#include "fb/anfis/anfis.hpp"
#include "fb/common/error.hpp"
#include "fb/common/rng.hpp"

namespace fb::anfis {
namespace {

constexpr std::size_t kLloydIterations = 50;
constexpr double kLloydTolerance = 1e-8;

double squared_distance(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double u = a[i] - b[i];
        s += u * u;
    }
    return s;
}

}  // namespace

TskModel grid_init(std::size_t dim, std::size_t mfs_per_input, std::span<const FeatureRange> ranges,
                   const Dataset* data, std::size_t rule_cap)
{
    if (dim == 0)
        throw InvalidArgument("grid_init: dimension must be >= 1");
    if (ranges.size() != dim)
        throw InvalidArgument("grid_init: expected " + std::to_string(dim) + " ranges, got " +
                              std::to_string(ranges.size()));
    if (data && data->dim() != dim)
        throw DataError("grid_init: dataset dimension does not match");
    std::vector<std::vector<MembershipFunction>> per_feature;
    for (const FeatureRange& r : ranges)
        per_feature.push_back(uniform_gaussian_partition(r, mfs_per_input));

    const double intercept = data && !data->empty() ? data->target_mean() : 0.0;
    std::vector<Rule> rules;
    for (Antecedent& a : grid_antecedents(per_feature, rule_cap))
        rules.push_back(Rule{std::move(a), Affine{std::vector<double>(dim, 0.0), intercept}});
    return TskModel(dim, std::move(rules));
}

TskModel cluster_init(const Dataset& data, std::size_t rules, std::uint64_t seed)
{
    const std::size_t n = data.size();
    const std::size_t d = data.dim();
    if (rules == 0)
        throw InvalidArgument("cluster_init: need at least one rule");
    if (rules > n)
        throw InvalidArgument("cluster_init: " + std::to_string(rules) + " clusters requested from " +
                              std::to_string(n) + " examples");

    // Seeded farthest-point initialization.
    Rng rng(seed);
    std::vector<std::vector<double>> centroids;
    const auto first = data.row(rng.index(n));
    centroids.emplace_back(first.begin(), first.end());
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    while (centroids.size() < rules) {
        std::size_t far = 0;
        double far_dist = -1.0;
        for (std::size_t p = 0; p < n; ++p) {
            nearest[p] = std::min(nearest[p], squared_distance(data.row(p), centroids.back()));
            if (nearest[p] > far_dist) {
                far_dist = nearest[p];
                far = p;
            }
        }
        centroids.emplace_back(data.row(far).begin(), data.row(far).end());
    }

    std::vector<std::size_t> label(n, 0);
    auto assign = [&] {
        for (std::size_t p = 0; p < n; ++p) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < rules; ++k) {
                const double dist = squared_distance(data.row(p), centroids[k]);
                if (dist < best) {
                    best = dist;
                    label[p] = k;
                }
            }
        }
    };

    for (std::size_t iter = 0; iter < kLloydIterations; ++iter) {
        assign();
        std::vector<std::vector<double>> sums(rules, std::vector<double>(d, 0.0));
        std::vector<std::size_t> counts(rules, 0);
        for (std::size_t p = 0; p < n; ++p) {
            ++counts[label[p]];
            for (std::size_t i = 0; i < d; ++i)
                sums[label[p]][i] += data.row(p)[i];
        }
        double movement = 0.0;
        for (std::size_t k = 0; k < rules; ++k) {
            if (counts[k] == 0)
                continue;  // keep the previous centroid
            for (std::size_t i = 0; i < d; ++i) {
                const double c = sums[k][i] / static_cast<double>(counts[k]);
                movement = std::max(movement, std::abs(c - centroids[k][i]));
                centroids[k][i] = c;
            }
        }
        if (movement < kLloydTolerance)
            break;
    }
    assign();

    // Per-feature spread; an empty cluster borrows the global spread.
    std::vector<double> global_sd(d, 0.0);
    {
        std::vector<double> mean(d, 0.0);
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t i = 0; i < d; ++i)
                mean[i] += data.row(p)[i] / static_cast<double>(n);
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t i = 0; i < d; ++i) {
                const double u = data.row(p)[i] - mean[i];
                global_sd[i] += u * u / static_cast<double>(n);
            }
        for (double& s : global_sd)
            s = std::sqrt(s);
    }

    std::vector<std::vector<double>> spread(rules, std::vector<double>(d, 0.0));
    std::vector<std::size_t> counts(rules, 0);
    for (std::size_t p = 0; p < n; ++p) {
        ++counts[label[p]];
        for (std::size_t i = 0; i < d; ++i) {
            const double u = data.row(p)[i] - centroids[label[p]][i];
            spread[label[p]][i] += u * u;
        }
    }

    const double intercept = data.target_mean();
    std::vector<Rule> out;
    for (std::size_t k = 0; k < rules; ++k) {
        Antecedent a;
        for (std::size_t i = 0; i < d; ++i) {
            const double sd = counts[k] > 0 ? std::sqrt(spread[k][i] / static_cast<double>(counts[k])) : global_sd[i];
            a.clauses.push_back(Clause{i, Gaussian{centroids[k][i], clamp_width(sd)}});
        }
        out.push_back(Rule{std::move(a), Affine{std::vector<double>(d, 0.0), intercept}});
    }
    return TskModel(d, std::move(out));
}

}  // namespace fb::anfis
