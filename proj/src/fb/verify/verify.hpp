#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fb/cart/cart.hpp"
#include "fb/core/dataset.hpp"
#include "fb/core/io.hpp"
#include "fb/core/tsk.hpp"
#include "fb/moe/moe.hpp"
#include "fb/rbfn/rbfn.hpp"
#include "fb/stacking/stacking.hpp"

namespace fb::verify {

enum class Suite { Equivalence, Gradients, Oracles };

std::string suite_name(Suite s);
Suite parse_suite(std::string_view name);
// equivalence 1e-10, gradients 1e-4 (relative), oracles 1e-10
double default_tolerance(Suite s);

struct Check {
    std::string name;
    double max_deviation = 0.0;
    double tolerance = 0.0;
    bool passed = true;
};

struct Report {
    std::string suite;
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    double tolerance = 0.0;
    std::vector<Check> checks;
    bool passed = true;
};

struct Options {
    std::size_t trials = 20;
    std::optional<double> tolerance = std::nullopt;
    std::uint64_t seed = 0;
    std::size_t points = 1000;  // random inputs per paired evaluation
};

// Randomized checks on freshly generated fixtures.
Report run_suite(Suite suite, const Options& options);

// The same checks restricted to what applies to one supplied model. Inputs are
// drawn from the data's bounding box when data is given, otherwise from a box
// derived from the model. Throws InvalidArgument when no check applies.
Report verify_model(Suite suite, const TskModel& model, const Options& options, const Dataset* data = nullptr);
Report verify_model(Suite suite, const rbfn::RbfnModel& model, const Options& options, const Dataset* data = nullptr);
Report verify_model(Suite suite, const moe::MoeModel& model, const Options& options, const Dataset* data = nullptr);
Report verify_model(Suite suite, const cart::RegressionTree& model, const Options& options,
                    const Dataset* data = nullptr);
Report verify_model(Suite suite, const cart::FuzzyRegressionTree& model, const Options& options,
                    const Dataset* data = nullptr);
Report verify_model(Suite suite, const stacking::StackModel& model, const Options& options,
                    const Dataset* data = nullptr);

// Per-component |a - n| / max(|a|, |n|, 1e-3 * max_j |n_j|, 1e-8): relative
// error with a floor tied to the gradient's scale, so components that are zero
// up to finite-difference noise do not dominate.
double gradient_relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric);

// Central differences of `f` around `params` with step h.
template <class F>
std::vector<double> central_differences(const std::vector<double>& params, F&& f, double h = 1e-5)
{
    std::vector<double> g(params.size());
    std::vector<double> p = params;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double saved = p[i];
        p[i] = saved + h;
        const double up = f(p);
        p[i] = saved - h;
        const double down = f(p);
        p[i] = saved;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

Json to_json(const Report& report);
std::string to_text(const Report& report);

}  // namespace fb::verify
