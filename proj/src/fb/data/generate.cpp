#include <charconv>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "fb/common/error.hpp"
#include "fb/common/rng.hpp"
#include "fb/data/data.hpp"

namespace fb::data {

namespace {

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

std::size_t fixed_dim(Generator g)
{
    switch (g) {
    case Generator::Sinc2d: return 2;
    case Generator::Friedman1: return 5;
    default: return 0;
    }
}

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view text)
{
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
        throw InvalidArgument(fmt::format("data spec: bad value for '{}': '{}'", key, text));
    return value;
}

std::vector<FeatureRange> parse_ranges(std::string_view text)
{
    std::vector<FeatureRange> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        if (comma == std::string_view::npos)
            comma = text.size();
        const std::string_view item = trim(text.substr(start, comma - start));
        const auto colon = item.find(':');
        if (colon == std::string_view::npos)
            throw InvalidArgument(fmt::format("data spec: range '{}' is not lo:hi", item));
        const double lo = parse_number<double>("ranges", trim(item.substr(0, colon)));
        const double hi = parse_number<double>("ranges", trim(item.substr(colon + 1)));
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
            throw InvalidArgument(fmt::format("data spec: range '{}' needs finite lo < hi", item));
        out.push_back(FeatureRange{lo, hi});
        start = comma + 1;
    }
    return out;
}

}  // namespace

std::string generator_name(Generator g)
{
    switch (g) {
    case Generator::Sinc2d: return "sinc2d";
    case Generator::Friedman1: return "friedman1";
    case Generator::PiecewiseLinear: return "piecewise_linear";
    case Generator::Step: return "step";
    }
    return "?";
}

Generator parse_generator(std::string_view name)
{
    for (Generator g : {Generator::Sinc2d, Generator::Friedman1, Generator::PiecewiseLinear, Generator::Step})
        if (generator_name(g) == name)
            return g;
    throw InvalidArgument(
        fmt::format("unknown generator '{}' (expected sinc2d, friedman1, piecewise_linear or step)", name));
}

std::vector<FeatureRange> default_ranges(Generator g)
{
    switch (g) {
    case Generator::Sinc2d: return {{-10.0, 10.0}, {-10.0, 10.0}};
    case Generator::Friedman1: return std::vector<FeatureRange>(5, FeatureRange{0.0, 1.0});
    case Generator::PiecewiseLinear: return {{0.0, 1.0}, {0.0, 1.0}};
    case Generator::Step: return {{0.0, 1.0}};
    }
    return {};
}

std::pair<Affine, Affine> piecewise_regimes(std::size_t dim)
{
    if (dim == 0)
        throw InvalidArgument("piecewise_linear: dimension must be >= 1");
    Affine left{std::vector<double>(dim, 0.5), 1.0};
    Affine right{std::vector<double>(dim, -0.5), 3.0};
    left.slopes[0] = 2.0;
    right.slopes[0] = -2.0;
    return {std::move(left), std::move(right)};
}

double generator_target(Generator g, std::span<const double> x)
{
    switch (g) {
    case Generator::Sinc2d:
        return sinc(x[0]) * sinc(x[1]);
    case Generator::Friedman1:
        return 10.0 * std::sin(std::numbers::pi * x[0] * x[1]) + 20.0 * (x[2] - 0.5) * (x[2] - 0.5) + 10.0 * x[3] +
               5.0 * x[4];
    case Generator::PiecewiseLinear: {
        const auto [left, right] = piecewise_regimes(x.size());
        return Consequent(x[0] < 0.5 ? left : right).evaluate(x);
    }
    case Generator::Step:
        return x[0] >= 0.5 ? 1.0 : 0.0;
    }
    return 0.0;
}

Dataset generate(const DataSpec& spec)
{
    if (spec.n == 0)
        throw InvalidArgument("generate: n must be >= 1");
    if (!(spec.noise_sd >= 0.0) || !std::isfinite(spec.noise_sd))
        throw InvalidArgument("generate: noise_sd must be finite and >= 0");
    const std::vector<FeatureRange> ranges = spec.ranges.empty() ? default_ranges(spec.generator) : spec.ranges;
    const std::size_t fixed = fixed_dim(spec.generator);
    if (fixed != 0 && ranges.size() != fixed)
        throw InvalidArgument(fmt::format("generate: {} takes {} ranges, got {}", generator_name(spec.generator),
                                          fixed, ranges.size()));
    for (const FeatureRange& r : ranges)
        if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || !(r.lo < r.hi))
            throw InvalidArgument("generate: every range needs finite lo < hi");
    const std::size_t d = ranges.size();

    Rng rng(spec.seed);
    std::vector<double> inputs;
    inputs.reserve(spec.n * d);
    if (spec.layout == Layout::Random) {
        for (std::size_t n = 0; n < spec.n; ++n)
            for (const FeatureRange& r : ranges)
                inputs.push_back(rng.uniform(r.lo, r.hi));
    } else {
        const auto m = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(spec.n), 1.0 / d)));
        std::size_t total = 1;
        for (std::size_t i = 0; i < d; ++i)
            total *= m;
        if (m < 2 || total != spec.n)
            throw InvalidArgument(fmt::format("generate: grid layout needs n = m^{} with m >= 2, got n = {}", d, spec.n));
        std::vector<std::size_t> digit(d, 0);
        for (std::size_t n = 0; n < spec.n; ++n) {
            for (std::size_t i = 0; i < d; ++i) {
                const FeatureRange& r = ranges[i];
                // Endpoints land exactly on lo and hi.
                inputs.push_back(digit[i] + 1 == m ? r.hi
                                                   : r.lo + (r.hi - r.lo) * static_cast<double>(digit[i]) /
                                                                static_cast<double>(m - 1));
            }
            for (std::size_t i = d; i-- > 0;) {
                if (++digit[i] < m)
                    break;
                digit[i] = 0;
            }
        }
    }
    std::vector<double> targets(spec.n);
    for (std::size_t n = 0; n < spec.n; ++n)
        targets[n] = generator_target(spec.generator, std::span<const double>(inputs.data() + n * d, d));
    if (spec.noise_sd > 0.0)
        for (double& y : targets)
            y += spec.noise_sd * rng.normal();
    return Dataset(d, std::move(inputs), std::move(targets));
}

std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text)
{
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos)
            nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw InvalidArgument(fmt::format("config line {}: expected key=value, got '{}'", line_no, line));
        const std::string_view key = trim(line.substr(0, eq));
        if (key.empty())
            throw InvalidArgument(fmt::format("config line {}: empty key", line_no));
        out.emplace_back(std::string(key), std::string(trim(line.substr(eq + 1))));
    }
    return out;
}

DataSpec parse_data_spec(const std::vector<std::pair<std::string, std::string>>& entries, DataSpec spec)
{
    for (const auto& [key, value] : entries) {
        if (key == "generator")
            spec.generator = parse_generator(value);
        else if (key == "n")
            spec.n = parse_number<std::size_t>(key, value);
        else if (key == "noise_sd")
            spec.noise_sd = parse_number<double>(key, value);
        else if (key == "seed")
            spec.seed = parse_number<std::uint64_t>(key, value);
        else if (key == "layout") {
            if (value == "random")
                spec.layout = Layout::Random;
            else if (value == "grid")
                spec.layout = Layout::Grid;
            else
                throw InvalidArgument("data spec: layout must be random or grid, got '" + value + "'");
        } else if (key == "ranges")
            spec.ranges = parse_ranges(value);
        else
            throw InvalidArgument("data spec: unknown key '" + key + "'");
    }
    return spec;
}

}  // namespace fb::data
