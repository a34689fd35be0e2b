#include "cbtest/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "cbtest/asymptotics.hpp"

namespace cbtest {

SymmetricKernel SymmetricKernel::product(std::function<double(double)> h) {
    return {[h = std::move(h)](double u, double v) { return h(u) * h(v); }};
}

SymmetricKernel SymmetricKernel::max_comp(std::function<double(double)> alpha) {
    return {[a = std::move(alpha)](double u, double) { return a(u); }};
}

namespace {

// distinct sorted values with the pooled EDF at each
struct PooledGrid {
    std::vector<double> values;
    std::vector<double> qn;
};

PooledGrid pooled_grid(const std::vector<double>& pooled_sorted) {
    PooledGrid g;
    double m = static_cast<double>(pooled_sorted.size());
    for (size_t i = 0; i < pooled_sorted.size(); ++i) {
        if (i + 1 < pooled_sorted.size() && pooled_sorted[i + 1] == pooled_sorted[i]) continue;
        g.values.push_back(pooled_sorted[i]);
        g.qn.push_back(static_cast<double>(i + 1) / m);
    }
    return g;
}

// index of value t in g.values; t must be a member
size_t grid_index(const PooledGrid& g, double t) {
    return static_cast<size_t>(
        std::lower_bound(g.values.begin(), g.values.end(), t) - g.values.begin());
}

// Both sup sweeps walk the corner grid of distinct pooled values; the
// processes are constant on the half-open cells whose value is attained at
// the bottom-left corner and vanish below the smallest pooled value, so this
// grid realizes the exact supremum (cross-checked against a brute force with
// midpoints in the tests). Above `thin_threshold` distinct values per axis
// the grid is thinned to ~2000 quantile-spaced columns/rows, a documented
// approximation never active at the n used by the shipped experiments.
constexpr size_t thin_threshold = 4000;

std::vector<size_t> axis_indices(size_t m) {
    std::vector<size_t> idx;
    if (m <= thin_threshold) {
        idx.resize(m);
        for (size_t i = 0; i < m; ++i) idx[i] = i;
        return idx;
    }
    size_t target = 2000;
    idx.reserve(target + 1);
    for (size_t k = 0; k < target; ++k) idx.push_back(k * (m - 1) / (target - 1));
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    return idx;
}

}  // namespace

double ks_colour_blind(const ColourBlindSample& s) {
    const size_t n = s.pairs.size();
    PooledGrid g = pooled_grid(s.pooled);
    const size_t m = g.values.size();

    // pairs bucketed by the grid index of their maximum
    std::vector<int> row_count(m, 0);
    std::vector<size_t> iu(n), iv(n);
    for (size_t i = 0; i < n; ++i) {
        iu[i] = grid_index(g, s.pairs[i].first);
        iv[i] = grid_index(g, s.pairs[i].second);
        ++row_count[iu[i]];
    }
    std::vector<int> row_start(m + 1, 0);
    for (size_t j = 0; j < m; ++j) row_start[j + 1] = row_start[j] + row_count[j];
    std::vector<int> bucket_v(n);
    {
        std::vector<int> fill(row_start.begin(), row_start.end() - 1);
        for (size_t i = 0; i < n; ++i) bucket_v[fill[iu[i]]++] = static_cast<int>(iv[i]);
    }

    std::vector<double> qsq(m);
    for (size_t k = 0; k < m; ++k) qsq[k] = g.qn[k] * g.qn[k];

    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<int> cnt(m, 0);
    std::vector<double> pre(m, 0.0);
    double best = 0.0;

    if (m <= thin_threshold) {
        for (size_t j = 0; j < m; ++j) {
            for (int t = row_start[j]; t < row_start[j + 1]; ++t) ++cnt[bucket_v[t]];
            double two_qj = 2.0 * g.qn[j];
            int acc = 0;
            for (size_t k = 0; k <= j; ++k) {
                acc += cnt[k];
                double val = acc * inv_n - two_qj * g.qn[k] + qsq[k];
                double a = std::fabs(val);
                if (a > best) best = a;
            }
        }
    } else {
        std::vector<size_t> cols = axis_indices(m);
        size_t next_col = 0;
        for (size_t j = 0; j < m; ++j) {
            for (int t = row_start[j]; t < row_start[j + 1]; ++t) ++cnt[bucket_v[t]];
            if (next_col < cols.size() && cols[next_col] == j) {
                ++next_col;
                double two_qj = 2.0 * g.qn[j];
                int acc = 0;
                size_t ci = 0;
                for (size_t k = 0; k <= j; ++k) {
                    acc += cnt[k];
                    if (ci < cols.size() && cols[ci] == k) {
                        ++ci;
                        double val = acc * inv_n - two_qj * g.qn[k] + qsq[k];
                        double a = std::fabs(val);
                        if (a > best) best = a;
                    }
                }
            }
        }
    }
    return std::sqrt(static_cast<double>(n)) * best;
}

double ks_full(const LabeledSample& s) {
    const size_t n = s.pairs.size();
    if (n == 0) throw std::invalid_argument("ks_full: empty sample");
    std::vector<double> pooled;
    pooled.reserve(2 * n);
    for (const auto& [x, y] : s.pairs) {
        pooled.push_back(x);
        pooled.push_back(y);
    }
    std::sort(pooled.begin(), pooled.end());
    PooledGrid g = pooled_grid(pooled);
    const size_t m = g.values.size();

    std::vector<int> row_count(m, 0);
    std::vector<size_t> ix(n), iy(n);
    for (size_t i = 0; i < n; ++i) {
        ix[i] = grid_index(g, s.pairs[i].first);
        iy[i] = grid_index(g, s.pairs[i].second);
        ++row_count[ix[i]];
    }
    std::vector<int> row_start(m + 1, 0);
    for (size_t j = 0; j < m; ++j) row_start[j + 1] = row_start[j] + row_count[j];
    std::vector<int> bucket_y(n);
    {
        std::vector<int> fill(row_start.begin(), row_start.end() - 1);
        for (size_t i = 0; i < n; ++i) bucket_y[fill[ix[i]]++] = static_cast<int>(iy[i]);
    }

    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<int> cnt(m, 0);
    double best = 0.0;
    std::vector<size_t> cols = axis_indices(m);
    bool full_grid = m <= thin_threshold;
    size_t next_col = 0;
    for (size_t j = 0; j < m; ++j) {
        for (int t = row_start[j]; t < row_start[j + 1]; ++t) ++cnt[bucket_y[t]];
        if (!full_grid) {
            if (next_col >= cols.size() || cols[next_col] != j) continue;
            ++next_col;
        }
        double qj = g.qn[j];
        int acc = 0;
        if (full_grid) {
            for (size_t k = 0; k < m; ++k) {
                acc += cnt[k];
                double val = acc * inv_n - qj * g.qn[k];
                double a = std::fabs(val);
                if (a > best) best = a;
            }
        } else {
            size_t ci = 0;
            for (size_t k = 0; k < m; ++k) {
                acc += cnt[k];
                if (ci < cols.size() && cols[ci] == k) {
                    ++ci;
                    double val = acc * inv_n - qj * g.qn[k];
                    double a = std::fabs(val);
                    if (a > best) best = a;
                }
            }
        }
    }
    return std::sqrt(static_cast<double>(n)) * best;
}

double linear_stat(const ColourBlindSample& s, const SymmetricKernel& k) {
    const size_t n = s.pairs.size();
    double data_term = 0.0;
    for (const auto& [u, v] : s.pairs) {
        double val = k.phi(u, v);
        if (!std::isfinite(val))
            throw std::domain_error("linear_stat: non-finite kernel value on a data pair");
        data_term += val;
    }
    const auto& w = s.pooled;
    const size_t m2 = w.size();
    double dbl = 0.0;
    for (size_t j = 0; j < m2; ++j) {
        dbl += k.tilde(w[j], w[j]);
        for (size_t l = j + 1; l < m2; ++l) dbl += 2.0 * k.tilde(w[j], w[l]);
    }
    double rt = std::sqrt(static_cast<double>(n));
    double m2d = static_cast<double>(m2);
    return data_term / rt - rt * dbl / (m2d * m2d);
}

double optimal_linear_stat(const ColourBlindSample& s, const EqualityAlternative& alt) {
    const auto& h = alt.h;
    const size_t n = s.pairs.size();
    double data_term = 0.0;
    for (const auto& [u, v] : s.pairs) data_term += h(u) * h(v);
    double mean = 0.0;
    for (double w : s.pooled) mean += h(w);
    mean /= static_cast<double>(s.pooled.size());
    double rt = std::sqrt(static_cast<double>(n));
    return data_term / rt - rt * mean * mean;
}

double maxima_stat(const ColourBlindSample& s, const std::function<double(double)>& alpha) {
    const size_t n = s.pairs.size();
    double data_term = 0.0;
    for (const auto& [u, v] : s.pairs) {
        (void)v;
        data_term += alpha(u);
    }
    PooledGrid g = pooled_grid(s.pooled);
    double integral = 0.0, prev_sq = 0.0;
    for (size_t t = 0; t < g.values.size(); ++t) {
        double sq = g.qn[t] * g.qn[t];
        integral += alpha(g.values[t]) * (sq - prev_sq);
        prev_sq = sq;
    }
    double rt = std::sqrt(static_cast<double>(n));
    return data_term / rt - rt * integral;
}

std::function<double(double)> s_operator(const std::function<double(double)>& alpha,
                                         const DistributionSpec& Q) {
    auto qd = Q.density;
    auto cdf = Q.cdf;
    auto a = alpha;
    auto cum = std::make_shared<const CumulativeIntegral>(
        [a, qd](double x) { return a(x) * qd(x); });
    double total = cum->total();
    return [a, cdf, cum, total](double x) {
        return a(x) * cdf(x) + 4.0 * (total - (*cum)(x));
    };
}

MaximaSnr snr_maxima(const std::function<double(double)>& alpha, const EqualityAlternative& alt,
                     int n) {
    const DistributionSpec& Q = alt.base;
    auto qd = Q.density;
    auto cdf = Q.cdf;
    auto wsq = [qd, cdf](double x) { return 2.0 * cdf(x) * qd(x); };  // density of Q^2

    double abar = quad([&](double x) { return alpha(x) * wsq(x); }, 0.0, 1.0);
    auto a0 = [alpha, abar](double x) { return alpha(x) - abar; };

    auto q = q_direction(alt);
    MaximaSnr out;
    out.shift_rate = quad([&](double x) { return a0(x) * q(x) * wsq(x); }, 0.0, 1.0);
    double norm_sq = quad([&](double x) { return a0(x) * a0(x) * wsq(x); }, 0.0, 1.0);
    auto Sa = s_operator(a0, Q);
    double cross = quad([&](double x) { return a0(x) * Sa(x) * wsq(x); }, 0.0, 1.0);
    out.variance = norm_sq - cross;
    if (!(out.variance > 1e-14 * std::max(1.0, norm_sq)))
        throw std::domain_error("snr_maxima: nonpositive variance, degenerate direction");

    SymmetricKernel proj = project_Lstar(SymmetricKernel::max_comp(a0), Q);
    out.variance_direct = inner_product(proj, proj, Q);

    out.snr = std::sqrt(static_cast<double>(n)) * alt.epsilon * alt.epsilon * out.shift_rate /
              std::sqrt(out.variance);
    return out;
}

ConeResult cone_membership(const std::function<double(double)>& alpha,
                           const DistributionSpec& Q) {
    auto qd = Q.density;
    auto cdf = Q.cdf;
    auto a = alpha;
    auto run = std::make_shared<const CumulativeIntegral>(
        [a, qd, cdf](double x) { return a(x) * 2.0 * cdf(x) * qd(x); });
    ConeResult out;
    double mn = 0.0;
    for (double v : run->node_values()) mn = std::min(mn, v);
    out.min_running_integral = mn;
    out.is_member = mn >= -1e-10;
    out.H = [run](double x) { return std::sqrt(std::max((*run)(x), 0.0)); };
    auto H = out.H;
    out.h = [a, cdf, H](double x) {
        double Hx = H(x);
        if (Hx <= 1e-8) return 0.0;  // the exceptional set where recovery is degenerate
        return cdf(x) * a(x) / Hx;
    };
    return out;
}

double cross_probability(const ColourBlindSample& s) {
    const size_t n = s.pairs.size();
    if (n < 2) throw std::domain_error("cross_probability: need n >= 2");
    std::vector<double> mins;
    mins.reserve(n);
    for (const auto& [u, v] : s.pairs) {
        (void)u;
        mins.push_back(v);
    }
    std::sort(mins.begin(), mins.end());
    long long count = 0;
    for (const auto& [u, v] : s.pairs) {
        auto below = std::lower_bound(mins.begin(), mins.end(), u) - mins.begin();
        count += below - (v < u ? 1 : 0);  // drop the i = j term
    }
    return static_cast<double>(count) /
           (static_cast<double>(n) * static_cast<double>(n - 1));
}

Chain inequality_chain(const DistributionSpec& p1, const DistributionSpec& p2, double x) {
    double f1 = p1.cdf(x), f2 = p2.cdf(x);
    Chain c;
    c.lo = f1 * f2;
    double avg = 0.5 * (f1 + f2);
    c.mid = avg * avg;
    double root = std::sqrt((1.0 - f1) * (1.0 - f2));
    c.hi = (1.0 - root) * (1.0 - root);
    return c;
}

}  // namespace cbtest
