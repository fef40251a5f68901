#include <algorithm>
#include <cmath>

#include "fb/common/error.hpp"
#include "fb/common/rng.hpp"
#include "fb/data/data.hpp"

namespace fb::data {

Split split(const Dataset& data, double test_fraction, std::uint64_t seed)
{
    if (!(test_fraction >= 0.0 && test_fraction < 1.0))
        throw InvalidArgument("split: test fraction must lie in [0, 1)");
    const std::size_t n = data.size();
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i)
        perm[i] = i;
    Rng rng(seed);
    for (std::size_t i = n; i > 1; --i)
        std::swap(perm[i - 1], perm[rng.index(i)]);

    const auto n_test = std::min<std::size_t>(
        static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n))), n == 0 ? 0 : n - 1);
    std::vector<std::size_t> test(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::vector<std::size_t> train(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
    std::sort(test.begin(), test.end());
    std::sort(train.begin(), train.end());
    return Split{data.subset(train), data.subset(test), std::move(train), std::move(test)};
}

Standardizer::Standardizer(std::vector<double> means, std::vector<double> sds)
    : means_(std::move(means)), sds_(std::move(sds))
{
    if (means_.size() != sds_.size())
        throw InvalidArgument("standardizer: means and sds differ in length");
    for (std::size_t i = 0; i < sds_.size(); ++i)
        if (!std::isfinite(means_[i]) || !std::isfinite(sds_[i]) || !(sds_[i] > 0.0))
            throw InvalidArgument("standardizer: needs finite means and positive sds");
}

Standardizer Standardizer::fit(const Dataset& train)
{
    if (train.empty())
        throw DataError("standardizer: empty training set");
    const std::size_t d = train.dim();
    const auto count = static_cast<double>(train.size());
    std::vector<double> means(d, 0.0);
    std::vector<double> sds(d, 0.0);
    for (std::size_t n = 0; n < train.size(); ++n)
        for (std::size_t i = 0; i < d; ++i)
            means[i] += train.row(n)[i];
    for (double& m : means)
        m /= count;
    for (std::size_t n = 0; n < train.size(); ++n)
        for (std::size_t i = 0; i < d; ++i) {
            const double u = train.row(n)[i] - means[i];
            sds[i] += u * u;
        }
    for (double& s : sds) {
        s = std::sqrt(s / count);
        if (!(s > 0.0))
            s = 1.0;
    }
    return Standardizer(std::move(means), std::move(sds));
}

Dataset Standardizer::apply(const Dataset& data) const
{
    if (data.dim() != means_.size())
        throw DataError("standardizer: dimension mismatch");
    std::vector<double> x = data.inputs();
    for (std::size_t k = 0; k < x.size(); ++k) {
        const std::size_t i = k % means_.size();
        x[k] = (x[k] - means_[i]) / sds_[i];
    }
    return Dataset(data.dim(), std::move(x), data.targets());
}

Dataset Standardizer::invert(const Dataset& data) const
{
    if (data.dim() != means_.size())
        throw DataError("standardizer: dimension mismatch");
    std::vector<double> x = data.inputs();
    for (std::size_t k = 0; k < x.size(); ++k) {
        const std::size_t i = k % means_.size();
        x[k] = x[k] * sds_[i] + means_[i];
    }
    return Dataset(data.dim(), std::move(x), data.targets());
}

Standardized standardize(const Dataset& train, const Dataset& test)
{
    Standardizer s = Standardizer::fit(train);
    return Standardized{s.apply(train), s.apply(test), std::move(s)};
}

Json to_json(const Standardizer& s) { return Json{{"means", s.means()}, {"sds", s.sds()}}; }

Standardizer standardizer_from_json(const Json& j)
{
    try {
        return Standardizer(number_array(require_field(j, "means"), "means"), number_array(require_field(j, "sds"), "sds"));
    } catch (const InvalidArgument& e) {
        throw DataError(e.what());
    }
}

}  // namespace fb::data
