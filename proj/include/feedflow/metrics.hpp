#pragma once

#include <optional>
#include <span>
#include <vector>

#include "feedflow/types.hpp"

namespace feedflow {

struct Histogram {
    std::vector<double> edges;   // bins + 1 entries
    std::vector<long> counts;    // first bin closed on both sides, rest right-closed
};

struct DiversityReport {
    std::vector<double> phi;    // per user, NaN for masked rows
    std::vector<double> echo;   // per user, NaN for masked rows
    double phi_bar = 0.0;       // mean phi over valid rows
    double mean_echo = 0.0;
    int valid_rows = 0;
    int masked_rows = 0;
    std::vector<double> content_share;      // mean p_s over valid rows
    std::vector<double> recommended_share;  // mean of per-user normalised x; empty without policy
    Histogram phi_hist;
    Histogram echo_hist;
};

struct ComparisonStats {
    double mean_abs_error = 0.0;                          // over pairwise-valid entries
    std::vector<std::optional<double>> pearson;           // per party; empty when variance is zero
    double mean_echo_a = 0.0;
    double mean_echo_b = 0.0;
};

/// Diversity of one feed distribution: S/(S-1) * sum_s p_s (1 - p_s).
/// 0 for a one-hot row, 1 for the uniform row. Throws on rows that are not
/// a distribution (negative entries or sum off 1 by more than 1e-6).
double phi(std::span<const double> p_row);

/// Same polynomial without the distribution check; optimizer internals need it
/// on intermediate states whose rows do not sum to 1.
double phi_unchecked(std::span<const double> p_row);

double phi_bar(const NewsfeedState& state);

Histogram histogram_unit(std::span<const double> values, int bins = 20);

DiversityReport aggregate(const NewsfeedState& state, const UserGraph& graph,
                          const RecommendationPolicy* policy = nullptr, int bins = 20);

ComparisonStats compare(const NewsfeedState& a, const NewsfeedState& b, const UserGraph& graph);

}  // namespace feedflow
