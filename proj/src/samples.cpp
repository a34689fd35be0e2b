#include "cbtest/samples.hpp"

#include <algorithm>
#include <stdexcept>

namespace cbtest {

ColourBlindSample blind(const LabeledSample& s) {
    if (s.pairs.empty()) throw std::invalid_argument("blind: empty sample");
    ColourBlindSample out;
    out.pairs.reserve(s.pairs.size());
    out.pooled.reserve(2 * s.pairs.size());
    for (const auto& [x, y] : s.pairs) {
        out.pairs.emplace_back(std::max(x, y), std::min(x, y));
        out.pooled.push_back(x);
        out.pooled.push_back(y);
    }
    std::sort(out.pooled.begin(), out.pooled.end());
    return out;
}

double StepFunction::operator()(double x) const {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    if (it == xs.begin()) return left;
    return ys[static_cast<size_t>(it - xs.begin()) - 1];
}

StepFunction edf_of(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("edf_of: empty value set");
    std::sort(values.begin(), values.end());
    StepFunction f;
    double m = static_cast<double>(values.size());
    for (size_t i = 0; i < values.size(); ++i) {
        if (i + 1 < values.size() && values[i + 1] == values[i]) continue;  // tie collapses
        f.xs.push_back(values[i]);
        f.ys.push_back(static_cast<double>(i + 1) / m);
    }
    return f;
}

Edfs edfs(const ColourBlindSample& s) {
    std::vector<double> mins, maxs;
    mins.reserve(s.pairs.size());
    maxs.reserve(s.pairs.size());
    for (const auto& [u, v] : s.pairs) {
        maxs.push_back(u);
        mins.push_back(v);
    }
    Edfs e;
    e.pmin = edf_of(std::move(mins));
    e.pmax = edf_of(std::move(maxs));
    e.qn = edf_of(s.pooled);
    return e;
}

}  // namespace cbtest
