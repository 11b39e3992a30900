#include "polyvol/analytics.hpp"

#include "polyvol/exact.hpp"
#include "polyvol/truncated.hpp"
#include "polyvol/walks.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <thread>

namespace polyvol {

namespace {

unsigned worker_count(std::size_t jobs)
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("POLYVOL_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) n = static_cast<unsigned>(v);
    }
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

template <typename F>
void parallel_for(std::size_t jobs, F&& body)
{
    const unsigned workers = worker_count(jobs);
    if (workers <= 1) {
        for (std::size_t i = 0; i < jobs; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto run = [&] {
        for (std::size_t i; !failed && (i = next++) < jobs;) {
            try {
                body(i);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

// Bin of each value at its empirical m-quantile; ties keep input order.
std::vector<Index> quantile_bins(const Vec<double>& values, Index m)
{
    const Index n = values.size();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index(0));
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return values(a) < values(b); });
    std::vector<Index> bin(static_cast<std::size_t>(n));
    for (Index k = 0; k < n; ++k) bin[std::size_t(order[std::size_t(k)])] = k * m / n;
    return bin;
}

void check_psd(const Mat<double>& S, Index d)
{
    require(S.rows() == d && S.cols() == d, "copula: sigma must be d x d");
    const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
    require((S - S.transpose()).cwiseAbs().maxCoeff() <= 1e-8 * scale, "copula: sigma is not symmetric");
    Eigen::SelfAdjointEigenSolver<Mat<double>> es(S, Eigen::EigenvaluesOnly);
    require(es.eigenvalues().minCoeff() >= -1e-8 * scale, "copula: sigma is not positive semidefinite");
}

}  // namespace

std::string to_string(MarketState s)
{
    switch (s) {
    case MarketState::normal: return "normal";
    case MarketState::warning: return "warning";
    case MarketState::crisis: return "crisis";
    }
    return "?";
}

Vec<double> compound_return(const Mat<double>& window)
{
    require(window.rows() >= 1, "compound_return: empty window");
    return (window.array() + 1.0).colwise().prod().transpose() - Vec<double>::Ones(window.cols()).array();
}

Mat<double> sample_covariance(const Mat<double>& rows)
{
    const Index W = rows.rows();
    if (W < 2) return Mat<double>::Zero(rows.cols(), rows.cols());
    Mat<double> centered = rows.rowwise() - rows.colwise().mean();
    return centered.transpose() * centered / double(W - 1);
}

CopulaGrid copula_from_points(const Mat<double>& points, const Vec<double>& r1, const std::optional<Vec<double>>& r2,
                              const std::optional<Mat<double>>& sigma, Index m)
{
    const Index d = r1.size(), n = points.rows();
    require(r2.has_value() != sigma.has_value(), "copula: give exactly one of r2 and sigma");
    require(m >= 2, "copula: grid size must be at least 2");
    require(n >= m * m, "copula: need at least m^2 points");
    require(points.cols() == d, "copula: points and returns disagree on dimension");
    if (r2) require(r2->size() == d, "copula: r1 and r2 disagree on dimension");
    if (sigma) check_psd(*sigma, d);

    Vec<double> u = points * r1;
    Vec<double> w;
    if (r2)
        w = points * *r2;
    else
        w = (points * *sigma).cwiseProduct(points).rowwise().sum();

    std::vector<Index> bu = quantile_bins(u, m), bw = quantile_bins(w, m);
    Mat<Index> counts = Mat<Index>::Zero(m, m);
    for (std::size_t k = 0; k < bu.size(); ++k) ++counts(bu[k], bw[k]);
    CopulaGrid g;
    g.m = m;
    g.mass = counts.cast<double>() / double(n);
    return g;
}

CopulaGrid copula(const Vec<double>& r1, const std::optional<Vec<double>>& r2,
                  const std::optional<Mat<double>>& sigma, Index m, Index n, Rng& rng)
{
    require(r1.size() >= 2, "copula: need at least two assets");
    SampleMatrix<double> pts = direct_sampling<double>(DirectBody::canonical_simplex, r1.size(), 1.0, n, rng);
    return copula_from_points(pts.points, r1, r2, sigma, m);
}

double indicator_from_copula(const CopulaGrid& grid, double band_frac, bool swap_bands)
{
    const Index m = grid.m;
    require(m >= 5, "indicator: grid size must be at least 5");
    require(band_frac > 0 && band_frac < 0.5, "indicator: band fraction must lie in (0, 0.5)");
    const Index w = static_cast<Index>(std::floor(band_frac * double(m)));
    double blue = 0, red = 0;
    // 1-based bins: main band |i - j| <= w, anti band |i + j - (m + 1)| <= w
    for (Index i = 1; i <= m; ++i)
        for (Index j = 1; j <= m; ++j) {
            const double v = grid.mass(i - 1, j - 1);
            if (std::abs(i - j) <= w) blue += v;
            if (std::abs(i + j - (m + 1)) <= w) red += v;
        }
    if (swap_bands) std::swap(blue, red);
    if (blue < 1e-12) return std::numeric_limits<double>::infinity();
    return red / blue;
}

std::vector<MarketState> market_states(const std::vector<double>& indicators, int nwarning, int ncrisis)
{
    require(nwarning >= 1 && ncrisis >= 1, "market_states: thresholds must be at least 1");
    std::vector<MarketState> states(indicators.size(), MarketState::normal);
    std::size_t i = 0;
    while (i < indicators.size()) {
        if (!(indicators[i] >= 1)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < indicators.size() && indicators[j] >= 1) ++j;
        const std::size_t run = j - i;
        MarketState s = MarketState::normal;
        if (run >= std::size_t(ncrisis))
            s = MarketState::crisis;
        else if (run >= std::size_t(nwarning))
            s = MarketState::warning;
        std::fill(states.begin() + std::ptrdiff_t(i), states.begin() + std::ptrdiff_t(j), s);
        i = j;
    }
    return states;
}

MarketTimeline compute_indicators(const ReturnsMatrix& returns, Index win_len, Index m, Index n, int nwarning,
                                  int ncrisis, Rng& rng, double band_frac)
{
    const Index T = returns.rows(), d = returns.assets();
    require(win_len >= 1, "indicators: window length must be positive");
    require(T >= win_len, "indicators: fewer rows than the window length");
    require(nwarning >= 1 && ncrisis >= 1, "indicators: thresholds must be at least 1");
    require(returns.dates.empty() || Index(returns.dates.size()) == T, "indicators: one date per row expected");

    const Mat<double> points = direct_sampling<double>(DirectBody::canonical_simplex, d, 1.0, n, rng).points;
    const Index windows = T - win_len + 1;
    MarketTimeline tl;
    tl.window = win_len;
    tl.nwarning = nwarning;
    tl.ncrisis = ncrisis;
    tl.indicators.resize(std::size_t(windows));
    std::vector<char> ridged(std::size_t(windows), 0);

    parallel_for(std::size_t(windows), [&](std::size_t t) {
        Mat<double> rows = returns.values.middleRows(Index(t), win_len);
        Vec<double> r1 = compound_return(rows);
        Mat<double> sigma = sample_covariance(rows);
        if ((sigma.diagonal().array() <= 0).any()) {
            sigma += 1e-10 * Mat<double>::Identity(d, d);
            ridged[t] = 1;
        }
        CopulaGrid g = copula_from_points(points, r1, std::nullopt, sigma, m);
        tl.indicators[t] = indicator_from_copula(g, band_frac);
    });

    for (Index t = 0; t < windows; ++t) {
        if (ridged[std::size_t(t)]) tl.degenerate_windows.push_back(t);
        if (!returns.dates.empty()) tl.dates.push_back(returns.dates[std::size_t(t + win_len - 1)]);
    }
    tl.states = market_states(tl.indicators, nwarning, ncrisis);
    return tl;
}

Zonotope<double> pca_reduce(const Zonotope<double>& Z)
{
    const Index d = Z.dimension();
    Eigen::ColPivHouseholderQR<Mat<double>> qr(Z.G);
    require(qr.rank() == d, "pca_reduce: generators do not span the space");
    BoxGauge<double> box = pca_box(Z);
    Mat<double> G = box.half_widths.asDiagonal() * box.U.transpose();
    return Zonotope<double>(std::move(G), std::exp(box.log_volume()));
}

ZonotopeApproximation zonotope_approximation(const Zonotope<double>& Z, bool fit_ratio,
                                             const VolumeSettings<double>& settings)
{
    ZonotopeApproximation out{pca_reduce(Z), std::nullopt};
    if (!fit_ratio) return out;
    const Index d = Z.dimension();
    VolumeSettings<double> s = settings;
    s.algorithm = VolumeAlgorithm::CB;
    const double v = volume(Polytope<double>(Z), s);
    const double log_box = double(d) * std::log(2.0) + pca_box(Z).half_widths.array().log().sum();
    out.fit_ratio = std::exp((log_box - std::log(v)) / double(d));
    return out;
}

double integrate_polytope(const Polytope<double>& P, const std::function<double(const Vec<double>&)>& f, Index n,
                          const VolumeSettings<double>& settings, Rng& rng)
{
    require(n >= 1, "integrate: need at least one sample");
    const double vol = volume(P, settings);
    SampleMatrix<double> pts =
        std::visit([&](const auto& q) { return sample_points(q, n, TargetDistribution<double>{}, rng); }, P);
    double sum = 0;
    for (Index i = 0; i < n; ++i) sum += f(pts.points.row(i).transpose());
    return vol * (sum / double(n));
}

HPolytope<double> order_polytope(const Dag& g)
{
    const Index n = g.n;
    require(n >= 1, "order_polytope: need at least one node");
    std::vector<std::vector<Index>> out(static_cast<std::size_t>(n));
    std::vector<Index> indeg(static_cast<std::size_t>(n), 0);
    for (auto [i, j] : g.edges) {
        require(i >= 0 && i < n && j >= 0 && j < n, "order_polytope: edge endpoint out of range");
        require(i != j, "order_polytope: self loop");
        out[std::size_t(i)].push_back(j);
        ++indeg[std::size_t(j)];
    }
    // Kahn: every node is removed iff the graph is acyclic
    std::vector<Index> ready;
    for (Index v = 0; v < n; ++v)
        if (indeg[std::size_t(v)] == 0) ready.push_back(v);
    Index removed = 0;
    while (!ready.empty()) {
        Index v = ready.back();
        ready.pop_back();
        ++removed;
        for (Index w : out[std::size_t(v)])
            if (--indeg[std::size_t(w)] == 0) ready.push_back(w);
    }
    require(removed == n, "order_polytope: the graph has a cycle");

    const Index E = Index(g.edges.size());
    Mat<double> A = Mat<double>::Zero(E + 2 * n, n);
    Vec<double> b = Vec<double>::Zero(E + 2 * n);
    for (Index e = 0; e < E; ++e) {
        auto [i, j] = g.edges[std::size_t(e)];
        A(e, j) = 1;
        A(e, i) = -1;
    }
    for (Index k = 0; k < n; ++k) {
        A(E + k, k) = 1;
        b(E + k) = 1;
        A(E + n + k, k) = -1;
    }
    return HPolytope<double>(std::move(A), std::move(b));
}

double count_linear_extensions(const Dag& g, double eps, std::uint64_t seed)
{
    require(g.n <= 170, "count_linear_extensions: n! overflows above 170 nodes");
    HPolytope<double> P = order_polytope(g);
    VolumeSettings<double> s;
    s.error = eps;
    s.seed = seed;
    const double vol = volume(Polytope<double>(P), s);
    return std::exp(std::log(vol) + std::lgamma(double(g.n) + 1));
}

}  // namespace polyvol
