#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fb/core/dataset.hpp"
#include "fb/core/io.hpp"
#include "fb/core/membership.hpp"
#include "fb/core/tsk.hpp"

namespace fb::data {

// First row is a header; the last column is the target, every other column a
// numeric feature. Errors name the 1-based line and column.
Dataset load_csv(const std::string& path);
Dataset parse_csv(std::string_view text, std::string_view source = "<csv>");
// Header x0,...,x{d-1},y; numbers in shortest round-trip form.
std::string format_csv(const Dataset& data);
void save_csv(const std::string& path, const Dataset& data);

enum class Generator { Sinc2d, Friedman1, PiecewiseLinear, Step };
enum class Layout { Random, Grid };

struct DataSpec {
    Generator generator = Generator::Sinc2d;
    std::size_t n = 100;
    double noise_sd = 0.0;
    std::uint64_t seed = 0;
    // Empty means the generator's default box. The number of ranges fixes d
    // for piecewise_linear and step; sinc2d and friedman1 have fixed d.
    std::vector<FeatureRange> ranges;
    // Grid needs n = m^d and puts m evenly spaced points on every axis.
    Layout layout = Layout::Random;
};

std::string generator_name(Generator g);
Generator parse_generator(std::string_view name);
std::vector<FeatureRange> default_ranges(Generator g);

// Noise-free target of a generator at x.
double generator_target(Generator g, std::span<const double> x);

// Inputs first (row by row, feature by feature) from Rng(seed), then, when
// noise_sd > 0, one normal() draw per row added to the target.
Dataset generate(const DataSpec& spec);

// The two affine regimes of piecewise_linear in dimension d: left (x0 < 0.5)
// and right.
std::pair<Affine, Affine> piecewise_regimes(std::size_t dim);

// "key=value" lines; blank lines and '#' comments skipped, whitespace trimmed.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text);

// Keys: generator, n, noise_sd, seed, layout, ranges ("lo:hi,lo:hi,...").
// Unknown keys are rejected.
DataSpec parse_data_spec(const std::vector<std::pair<std::string, std::string>>& entries, DataSpec base = {});

struct Split {
    Dataset train;
    Dataset test;
    std::vector<std::size_t> train_indices;  // ascending
    std::vector<std::size_t> test_indices;   // ascending
};

// Seeded Fisher-Yates permutation; the first round(fraction * N) indices
// become the test set. Both sides keep the original row order.
Split split(const Dataset& data, double test_fraction, std::uint64_t seed);

// Feature-wise z-scores from training statistics (population sd; a constant
// feature keeps sd = 1). Targets pass through untouched.
class Standardizer {
public:
    static Standardizer fit(const Dataset& train);
    Standardizer(std::vector<double> means, std::vector<double> sds);

    const std::vector<double>& means() const { return means_; }
    const std::vector<double>& sds() const { return sds_; }

    Dataset apply(const Dataset& data) const;
    Dataset invert(const Dataset& data) const;

    friend bool operator==(const Standardizer&, const Standardizer&) = default;

private:
    std::vector<double> means_;
    std::vector<double> sds_;
};

struct Standardized {
    Dataset train;
    Dataset test;
    Standardizer transform;
};

Standardized standardize(const Dataset& train, const Dataset& test);

Json to_json(const Standardizer& s);
Standardizer standardizer_from_json(const Json& j);

}  // namespace fb::data
