#pragma once

// Correlation, omnibus tests and the Dunnett's C post-hoc comparison.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fraccite::stats {

enum class Method { KruskalWallis, Levene, Anova, PearsonT, SpearmanT };

std::string_view to_string(Method m) noexcept;

struct TestResult {
    Method method = Method::KruskalWallis;
    // H, W, F; for correlations the coefficient r (p-value from its t statistic).
    double statistic = 0.0;
    double df1 = 0.0;
    std::optional<double> df2;
    double p_value = 1.0;
    std::string note;  // degenerate-case flag, empty otherwise
};

using Groups = std::vector<std::vector<double>>;

// Average ranks (1-based); ties share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

// Both throw Error{LengthMismatch} (or fewer than 3 pairs) and
// Error{ConstantInput} when both inputs are constant. If only one is constant
// the coefficient is reported as 0 with p = 1 and a note.
TestResult pearson(std::span<const double> x, std::span<const double> y);
TestResult spearman(std::span<const double> x, std::span<const double> y);

struct NamedColumn {
    std::string name;
    std::vector<double> values;
};

// Full square matrices; presentation puts Pearson below and Spearman above
// the diagonal.
struct CorrelationMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> pearson;
    std::vector<std::vector<double>> spearman;
    std::vector<std::vector<double>> pearson_p;
    std::vector<std::vector<double>> spearman_p;

    // "**" for p < 0.01, "*" for p < 0.05 (two-tailed), "" otherwise.
    static std::string stars(double p);
};

CorrelationMatrix correlation_matrix(const std::vector<NamedColumn>& columns, std::size_t n);

enum class TieCorrection { Apply, None };

// H on average ranks, divided by 1 - Σ(t³ - t)/(N³ - N) unless disabled.
// Throws TooFewGroups, AllValuesTied.
TestResult kruskal_wallis(const Groups& groups, TieCorrection ties = TieCorrection::Apply);

enum class LeveneCenter { Mean, Median };

// Throws TooFewGroups; DegenerateGroups when every absolute deviation is equal.
TestResult levene(const Groups& groups, LeveneCenter center = LeveneCenter::Mean);

// Zero within-group variance with nonzero between-group variance yields
// F = inf, p = 0 and a note.
TestResult one_way_anova(const Groups& groups);

// Studentized range: P(Q ≤ q) for k means and df error degrees of freedom
// (df may be +inf).
double studentized_range_cdf(double q, int k, double df);
// Upper-alpha critical value; relative error well below 1e-4. Throws
// Error{ConvergenceFailure} if the root search stalls.
double studentized_range_quantile(double alpha, int k, double df);

struct NamedSample {
    std::string name;
    std::vector<double> values;
};

struct PairwiseDecision {
    std::string unit_i;
    std::string unit_j;
    double mean_diff = 0.0;  // mean_i - mean_j
    double critical_diff = 0.0;
    bool significant = false;
};

// Dunnett's C for unequal variances. With v = s²/n per group and k groups:
//   crit_ij = sqrt((v_i + v_j)/2) * (q(α,k,n_i-1) v_i + q(α,k,n_j-1) v_j) / (v_i + v_j)
// Pairs come out with unit_i < unit_j, sorted by (unit_i, unit_j).
std::vector<PairwiseDecision> dunnett_c(const std::vector<NamedSample>& groups, double alpha = 0.05);

}  // namespace fraccite::stats
