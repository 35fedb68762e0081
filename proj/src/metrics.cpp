#include "feedflow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "feedflow/estimation.hpp"
#include "feedflow/io.hpp"

namespace feedflow {

double phi_unchecked(std::span<const double> p_row) {
    const auto S = static_cast<double>(p_row.size());
    double sum = 0;
    for (double v : p_row) sum += v * (1.0 - v);
    return S / (S - 1.0) * sum;
}

double phi(std::span<const double> p_row) {
    if (p_row.size() < 2) throw DataError("phi: need at least two parties");
    double total = 0;
    for (double v : p_row) {
        if (v < 0) throw DataError("phi: negative entry " + io::fmt(v));
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-6)
        throw DataError("phi: row sums to " + io::fmt(total) + ", not 1");
    return phi_unchecked(p_row);
}

double phi_bar(const NewsfeedState& state) {
    double sum = 0;
    int count = 0;
    for (int n = 0; n < state.n_users; ++n) {
        if (!state.row_valid(n)) continue;
        sum += phi_unchecked(state.row(n));
        ++count;
    }
    if (count == 0) throw DataError("phi_bar: all rows are masked");
    return sum / count;
}

Histogram histogram_unit(std::span<const double> values, int bins) {
    Histogram h;
    h.edges.resize(bins + 1);
    for (int i = 0; i <= bins; ++i) h.edges[i] = static_cast<double>(i) / bins;
    h.counts.assign(bins, 0);
    for (double v : values) {
        if (std::isnan(v)) continue;
        int bin;
        if (v <= 0) {
            bin = 0;
        } else {
            bin = static_cast<int>(std::ceil(v * bins)) - 1;  // right-closed bins
            bin = std::clamp(bin, 0, bins - 1);
        }
        ++h.counts[bin];
    }
    return h;
}

DiversityReport aggregate(const NewsfeedState& state, const UserGraph& graph,
                          const RecommendationPolicy* policy, int bins) {
    const int n = state.n_users;
    const int S = state.n_parties;
    DiversityReport rep;
    rep.phi.assign(n, std::numeric_limits<double>::quiet_NaN());
    rep.echo = compute_echo_profile(state, graph);
    rep.content_share.assign(S, 0.0);

    double phi_sum = 0, echo_sum = 0;
    for (int u = 0; u < n; ++u) {
        if (!state.row_valid(u)) {
            ++rep.masked_rows;
            continue;
        }
        rep.phi[u] = phi(state.row(u));
        phi_sum += rep.phi[u];
        echo_sum += rep.echo[u];
        for (int s = 0; s < S; ++s) rep.content_share[s] += state.at(u, s);
        ++rep.valid_rows;
    }
    if (rep.valid_rows == 0) throw DataError("aggregate: all rows are masked");
    rep.phi_bar = phi_sum / rep.valid_rows;
    rep.mean_echo = echo_sum / rep.valid_rows;
    for (double& v : rep.content_share) v /= rep.valid_rows;

    if (policy) {
        if (policy->n_users != n || policy->n_parties != S)
            throw ConfigError("aggregate: policy shape mismatch");
        rep.recommended_share.assign(S, 0.0);
        int counted = 0;
        for (int u = 0; u < n; ++u) {
            double total = policy->row_sum(u);
            if (!(total > 0)) continue;  // no recommendations for this user
            for (int s = 0; s < S; ++s) rep.recommended_share[s] += policy->at(u, s) / total;
            ++counted;
        }
        if (counted > 0)
            for (double& v : rep.recommended_share) v /= counted;
        else
            rep.recommended_share.clear();
    }

    rep.phi_hist = histogram_unit(rep.phi, bins);
    rep.echo_hist = histogram_unit(rep.echo, bins);
    return rep;
}

ComparisonStats compare(const NewsfeedState& a, const NewsfeedState& b, const UserGraph& graph) {
    if (a.n_users != b.n_users || a.n_parties != b.n_parties)
        throw DataError("compare: state shapes differ");
    const int n = a.n_users;
    const int S = a.n_parties;

    ComparisonStats st;
    double err_sum = 0;
    long err_count = 0;
    for (int u = 0; u < n; ++u) {
        if (!a.row_valid(u) || !b.row_valid(u)) continue;
        for (int s = 0; s < S; ++s) {
            err_sum += std::abs(a.at(u, s) - b.at(u, s));
            ++err_count;
        }
    }
    st.mean_abs_error = err_count ? err_sum / err_count : 0.0;

    st.pearson.resize(S);
    for (int s = 0; s < S; ++s) {
        double ma = 0, mb = 0;
        int count = 0;
        for (int u = 0; u < n; ++u) {
            if (!a.row_valid(u) || !b.row_valid(u)) continue;
            ma += a.at(u, s);
            mb += b.at(u, s);
            ++count;
        }
        if (count < 2) continue;
        ma /= count;
        mb /= count;
        double cov = 0, va = 0, vb = 0;
        for (int u = 0; u < n; ++u) {
            if (!a.row_valid(u) || !b.row_valid(u)) continue;
            const double da = a.at(u, s) - ma;
            const double db = b.at(u, s) - mb;
            cov += da * db;
            va += da * da;
            vb += db * db;
        }
        // Zero variance on either side leaves the correlation undefined.
        if (va > 0 && vb > 0) st.pearson[s] = cov / std::sqrt(va * vb);
    }

    auto mean_echo = [&](const NewsfeedState& state) {
        auto echo = compute_echo_profile(state, graph);
        double sum = 0;
        int count = 0;
        for (double e : echo) {
            if (std::isnan(e)) continue;
            sum += e;
            ++count;
        }
        return count ? sum / count : 0.0;
    };
    st.mean_echo_a = mean_echo(a);
    st.mean_echo_b = mean_echo(b);
    return st;
}

}  // namespace feedflow
