#include "fraccite/stats.hpp"

#include "fraccite/error.hpp"
#include "fraccite/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace fraccite::stats {

std::string_view to_string(Method m) noexcept {
    switch (m) {
    case Method::KruskalWallis: return "KruskalWallis";
    case Method::Levene: return "Levene";
    case Method::Anova: return "Anova";
    case Method::PearsonT: return "PearsonT";
    case Method::SpearmanT: return "SpearmanT";
    }
    return "Unknown";
}

namespace {

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool is_constant(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

// Treats a sum of squares as zero when it is negligible against the data scale.
bool negligible(double ss, double scale) { return ss <= 1e-26 * scale || ss == 0.0; }

TestResult correlation(std::span<const double> x, std::span<const double> y, Method method) {
    if (x.size() != y.size())
        throw Error(ErrorCode::LengthMismatch,
                    std::to_string(x.size()) + " vs " + std::to_string(y.size()) + " values");
    if (x.size() < 3) throw Error(ErrorCode::InvalidArgument, "correlation needs at least 3 pairs");

    const double df = static_cast<double>(x.size()) - 2.0;
    TestResult result{method, 0.0, df, std::nullopt, 1.0, {}};
    const bool cx = is_constant(x), cy = is_constant(y);
    if (cx && cy) throw Error(ErrorCode::ConstantInput, "both inputs are constant");
    if (cx || cy) {
        result.note = "one input is constant";
        return result;
    }

    const double mx = mean_of(x), my = mean_of(y);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    result.statistic = r;
    if (std::fabs(r) >= 1.0) {
        result.p_value = 0.0;
    } else {
        const double t = r * std::sqrt(df / (1.0 - r * r));
        result.p_value = t_two_sided_p(t, df);
    }
    return result;
}

void require_groups(const Groups& groups, std::size_t min_size, const char* test) {
    if (groups.size() < 2) throw Error(ErrorCode::TooFewGroups, std::string(test) + " needs at least 2 groups");
    for (const auto& g : groups) {
        if (g.size() < min_size)
            throw Error(ErrorCode::TooFewGroups, std::string(test) + " needs at least " +
                                                     std::to_string(min_size) + " values per group");
    }
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
        i = j + 1;
    }
    return ranks;
}

TestResult pearson(std::span<const double> x, std::span<const double> y) {
    return correlation(x, y, Method::PearsonT);
}

TestResult spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw Error(ErrorCode::LengthMismatch,
                    std::to_string(x.size()) + " vs " + std::to_string(y.size()) + " values");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return correlation(rx, ry, Method::SpearmanT);
}

std::string CorrelationMatrix::stars(double p) {
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

CorrelationMatrix correlation_matrix(const std::vector<NamedColumn>& columns, std::size_t n) {
    CorrelationMatrix m;
    const auto size = columns.size();
    for (const auto& c : columns) {
        if (c.values.size() != n)
            throw Error(ErrorCode::LengthMismatch, c.name + " has " + std::to_string(c.values.size()) +
                                                       " values, expected " + std::to_string(n));
        m.labels.push_back(c.name);
    }
    const std::vector<double> zeros(size, 0.0);
    m.pearson.assign(size, zeros);
    m.spearman.assign(size, zeros);
    m.pearson_p.assign(size, zeros);
    m.spearman_p.assign(size, zeros);
    for (std::size_t i = 0; i < size; ++i) {
        m.pearson[i][i] = m.spearman[i][i] = 1.0;
        for (std::size_t j = i + 1; j < size; ++j) {
            const auto p = pearson(columns[i].values, columns[j].values);
            const auto s = spearman(columns[i].values, columns[j].values);
            m.pearson[i][j] = m.pearson[j][i] = p.statistic;
            m.pearson_p[i][j] = m.pearson_p[j][i] = p.p_value;
            m.spearman[i][j] = m.spearman[j][i] = s.statistic;
            m.spearman_p[i][j] = m.spearman_p[j][i] = s.p_value;
        }
    }
    return m;
}

TestResult kruskal_wallis(const Groups& groups, TieCorrection ties) {
    require_groups(groups, 1, "Kruskal-Wallis");
    std::vector<double> pooled;
    for (const auto& g : groups) pooled.insert(pooled.end(), g.begin(), g.end());
    const auto n_total = static_cast<double>(pooled.size());
    if (pooled.size() < 3) throw Error(ErrorCode::TooFewGroups, "Kruskal-Wallis needs at least 3 values");

    const auto ranks = average_ranks(pooled);
    const double mean_rank = 0.5 * (n_total + 1.0);
    double h = 0.0;
    std::size_t offset = 0;
    for (const auto& g : groups) {
        double sum = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) sum += ranks[offset + i];
        offset += g.size();
        const double n = static_cast<double>(g.size());
        const double dev = sum / n - mean_rank;
        h += n * dev * dev;
    }
    h *= 12.0 / (n_total * (n_total + 1.0));

    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    double tie_sum = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        tie_sum += t * t * t - t;
        i = j;
    }
    const double correction = 1.0 - tie_sum / (n_total * n_total * n_total - n_total);
    if (correction <= 0.0) throw Error(ErrorCode::AllValuesTied, "every pooled value is identical");

    TestResult result{Method::KruskalWallis, 0.0, static_cast<double>(groups.size() - 1), std::nullopt, 1.0, {}};
    result.statistic = std::max(0.0, ties == TieCorrection::Apply ? h / correction : h);
    result.p_value = chi_squared_sf(result.statistic, result.df1);
    return result;
}

TestResult one_way_anova(const Groups& groups) {
    require_groups(groups, 1, "ANOVA");
    std::size_t n_total = 0;
    double grand = 0.0, scale = 0.0;
    for (const auto& g : groups) {
        n_total += g.size();
        for (double x : g) {
            grand += x;
            scale += x * x;
        }
    }
    const auto k = groups.size();
    if (n_total <= k) throw Error(ErrorCode::TooFewGroups, "ANOVA needs more observations than groups");
    grand /= static_cast<double>(n_total);

    double ssb = 0.0, ssw = 0.0;
    for (const auto& g : groups) {
        const double m = mean_of(g);
        ssb += static_cast<double>(g.size()) * (m - grand) * (m - grand);
        for (double x : g) ssw += (x - m) * (x - m);
    }
    const double df1 = static_cast<double>(k - 1);
    const double df2 = static_cast<double>(n_total - k);
    TestResult result{Method::Anova, 0.0, df1, df2, 1.0, {}};
    if (negligible(ssw, scale)) {
        if (negligible(ssb, scale)) {
            result.note = "no variance in the data";
            return result;
        }
        result.statistic = std::numeric_limits<double>::infinity();
        result.p_value = 0.0;
        result.note = "zero within-group variance";
        return result;
    }
    result.statistic = (ssb / df1) / (ssw / df2);
    result.p_value = f_sf(result.statistic, df1, df2);
    return result;
}

TestResult levene(const Groups& groups, LeveneCenter center) {
    require_groups(groups, 2, "Levene");
    Groups deviations;
    deviations.reserve(groups.size());
    for (const auto& g : groups) {
        const double c = center == LeveneCenter::Mean ? mean_of(g) : median_of(g);
        std::vector<double> z;
        z.reserve(g.size());
        for (double x : g) z.push_back(std::fabs(x - c));
        deviations.push_back(std::move(z));
    }

    std::size_t n_total = 0;
    double grand = 0.0, scale = 0.0;
    for (const auto& z : deviations) {
        n_total += z.size();
        for (double v : z) {
            grand += v;
            scale += v * v;
        }
    }
    grand /= static_cast<double>(n_total);
    double between = 0.0, within = 0.0;
    for (const auto& z : deviations) {
        const double m = mean_of(z);
        between += static_cast<double>(z.size()) * (m - grand) * (m - grand);
        for (double v : z) within += (v - m) * (v - m);
    }

    const auto k = groups.size();
    const double df1 = static_cast<double>(k - 1);
    const double df2 = static_cast<double>(n_total - k);
    TestResult result{Method::Levene, 0.0, df1, df2, 1.0, {}};
    if (negligible(within, scale)) {
        if (negligible(between, scale))
            throw Error(ErrorCode::DegenerateGroups, "all absolute deviations are equal; W is undefined");
        result.statistic = std::numeric_limits<double>::infinity();
        result.p_value = 0.0;
        result.note = "zero within-group spread of deviations";
        return result;
    }
    result.statistic = (df2 / df1) * between / within;
    result.p_value = f_sf(result.statistic, df1, df2);
    return result;
}

std::vector<PairwiseDecision> dunnett_c(const std::vector<NamedSample>& groups, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
    if (groups.size() < 2) throw Error(ErrorCode::TooFewGroups, "Dunnett's C needs at least 2 groups");
    const int k = static_cast<int>(groups.size());

    struct Summary {
        const std::string* name;
        double mean;
        double v;  // s² / n
        double q;
    };
    std::map<std::size_t, double> q_by_size;
    std::vector<Summary> sums;
    for (const auto& g : groups) {
        const auto n = g.values.size();
        if (n < 2) throw Error(ErrorCode::TooFewGroups, "Dunnett's C needs at least 2 values in " + g.name);
        const double m = mean_of(g.values);
        double ss = 0.0;
        for (double x : g.values) ss += (x - m) * (x - m);
        auto it = q_by_size.find(n);
        if (it == q_by_size.end())
            it = q_by_size.emplace(n, studentized_range_quantile(alpha, k, static_cast<double>(n - 1))).first;
        sums.push_back({&g.name, m, ss / static_cast<double>(n - 1) / static_cast<double>(n), it->second});
    }

    std::vector<PairwiseDecision> out;
    for (std::size_t a = 0; a < sums.size(); ++a) {
        for (std::size_t b = a + 1; b < sums.size(); ++b) {
            const Summary* i = &sums[a];
            const Summary* j = &sums[b];
            if (*j->name < *i->name) std::swap(i, j);
            PairwiseDecision d{*i->name, *j->name, i->mean - j->mean, 0.0, false};
            const double vsum = i->v + j->v;
            if (vsum == 0.0) {
                d.significant = d.mean_diff != 0.0;
            } else {
                d.critical_diff = std::sqrt(vsum / 2.0) * (i->q * i->v + j->q * j->v) / vsum;
                d.significant = std::fabs(d.mean_diff) > d.critical_diff;
            }
            out.push_back(std::move(d));
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        return std::tie(x.unit_i, x.unit_j) < std::tie(y.unit_i, y.unit_j);
    });
    return out;
}

}  // namespace fraccite::stats
