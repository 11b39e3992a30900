#pragma once

// Applications built on the samplers and volume engines: return copulas and
// crisis indicators, zonotope over-approximation, integration over a
// polytope and linear-extension counting.

#include "polyvol/polytope.hpp"
#include "polyvol/rng.hpp"
#include "polyvol/volume.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace polyvol {

struct ReturnsMatrix {
    Mat<double> values;  // T x d daily simple returns
    std::vector<std::string> dates;

    Index rows() const { return values.rows(); }
    Index assets() const { return values.cols(); }
};

/// mass(i, j): share of portfolios whose return falls in quantile bin i and
/// whose second coordinate (volatility or second return) falls in bin j.
struct CopulaGrid {
    Mat<double> mass;
    Index m = 0;
};

enum class MarketState { normal, warning, crisis };

std::string to_string(MarketState s);

struct MarketTimeline {
    std::vector<double> indicators;
    std::vector<MarketState> states;
    std::vector<std::string> dates;  // date of the last row of each window
    Index window = 0;
    int nwarning = 0;
    int ncrisis = 0;
    // windows whose covariance needed the ridge
    std::vector<Index> degenerate_windows;
};

/// Nodes are 0-based; an edge (i, j) means x_i >= x_j in the order polytope.
struct Dag {
    Index n = 0;
    std::vector<std::pair<Index, Index>> edges;
};

/// Π_k (1 + r_kj) - 1 per column.
Vec<double> compound_return(const Mat<double>& window);

/// Sample covariance with the 1/(W-1) normalization (zero for W = 1).
Mat<double> sample_covariance(const Mat<double>& rows);

/// Exactly one of r2 and sigma must be given. Portfolios are n uniform
/// points of the canonical simplex; both axes are cut at their empirical
/// m-quantiles.
CopulaGrid copula(const Vec<double>& r1, const std::optional<Vec<double>>& r2,
                  const std::optional<Mat<double>>& sigma, Index m, Index n, Rng& rng);

/// Same, on a fixed set of portfolios (one per row).
CopulaGrid copula_from_points(const Mat<double>& points, const Vec<double>& r1, const std::optional<Vec<double>>& r2,
                              const std::optional<Mat<double>>& sigma, Index m);

/// Anti-diagonal band mass over main-diagonal band mass; both bands have
/// half-width floor(band_frac * m). +inf when the main band is empty.
/// swap_bands exchanges the two bands.
double indicator_from_copula(const CopulaGrid& grid, double band_frac = 0.2, bool swap_bands = false);

/// A run of at least nwarning consecutive indicators >= 1 is warning on every
/// day of the run; a run of at least ncrisis is crisis.
std::vector<MarketState> market_states(const std::vector<double>& indicators, int nwarning, int ncrisis);

/// Indicator of every window of win_len consecutive rows. All windows share
/// one set of n simplex points, so identical windows give identical
/// indicators. Windows run on up to POLYVOL_THREADS threads.
MarketTimeline compute_indicators(const ReturnsMatrix& returns, Index win_len, Index m, Index n, int nwarning,
                                  int ncrisis, Rng& rng, double band_frac = 0.2);

/// Interval hull of Z in its principal frame, as a zonotope with d generators.
/// Its known_volume is set to the exact box volume.
Zonotope<double> pca_reduce(const Zonotope<double>& Z);

struct ZonotopeApproximation {
    Zonotope<double> reduced;
    std::optional<double> fit_ratio;  // (vol(reduced) / vol(Z))^(1/d)
};

/// With fit_ratio the denominator is a CB estimate under settings.
ZonotopeApproximation zonotope_approximation(const Zonotope<double>& Z, bool fit_ratio,
                                             const VolumeSettings<double>& settings = {});

/// volume(P, settings) times the mean of f over n uniform samples.
double integrate_polytope(const Polytope<double>& P, const std::function<double(const Vec<double>&)>& f, Index n,
                          const VolumeSettings<double>& settings, Rng& rng);

/// Rows: one x_j - x_i <= 0 per edge i -> j in input order, then x_k <= 1,
/// then -x_k <= 0.
HPolytope<double> order_polytope(const Dag& g);

/// vol(order polytope) * n!.
double count_linear_extensions(const Dag& g, double eps, std::uint64_t seed);

}  // namespace polyvol
