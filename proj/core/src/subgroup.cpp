#include "inner/subgroup.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "inner/errors.hpp"

namespace inner::subgroup {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double quantile_sorted(const Vector& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

// Log likelihood of a normal(mu, sigma) truncated to [a, b], evaluated on
// the band observations. The truncation correction is what lets the central
// band recover the full null spread.
double truncated_normal_loglik(std::span<const double> band, double a, double b, double mu,
                               double sigma) {
    const double za = (a - mu) / sigma;
    const double zb = (b - mu) / sigma;
    const double mass = normal_cdf(zb) - normal_cdf(za);
    if (mass <= 0.0) return -1e300;
    double ll = 0.0;
    for (double x : band) {
        const double z = (x - mu) / sigma;
        ll += -0.5 * z * z;
    }
    ll -= static_cast<double>(band.size()) * (std::log(sigma) + std::log(mass));
    return ll;
}

// Lindsey's method: Poisson log-linear fit of histogram counts on a
// polynomial basis. The smooth exponential-family tails keep isolated
// extreme observations from punching bumps into the density the way a
// kernel estimate does.
class PolyDensity {
public:
    PolyDensity(std::span<const double> sorted, std::size_t bins, int degree) {
        lo_ = sorted.front();
        hi_ = sorted.back();
        const double width = hi_ - lo_;
        lo_ -= 0.01 * width;
        hi_ += 0.01 * width;
        mid_ = (lo_ + hi_) / 2.0;
        half_ = (hi_ - lo_) / 2.0;
        bin_width_ = (hi_ - lo_) / static_cast<double>(bins);
        n_ = static_cast<double>(sorted.size());

        Vector counts(bins, 0.0);
        for (double v : sorted) {
            auto k = static_cast<std::size_t>((v - lo_) / bin_width_);
            if (k >= bins) k = bins - 1;
            counts[k] += 1.0;
        }

        const std::size_t dim = static_cast<std::size_t>(degree) + 1;
        coef_.assign(dim, 0.0);
        double mean_count = n_ / static_cast<double>(bins);
        coef_[0] = std::log(std::max(mean_count, 0.1));

        // IRLS for the Poisson log-linear model; the log likelihood is
        // concave, so convergence is routine.
        Vector basis(dim);
        for (int iter = 0; iter < 60; ++iter) {
            Matrix xtwx(dim, dim, 0.0);
            Vector score(dim, 0.0);
            for (std::size_t k = 0; k < bins; ++k) {
                const double center = lo_ + (static_cast<double>(k) + 0.5) * bin_width_;
                fill_basis(center, basis);
                double eta = 0.0;
                for (std::size_t j = 0; j < dim; ++j) eta += coef_[j] * basis[j];
                const double mu = std::exp(std::min(eta, 40.0));
                const double resid = counts[k] - mu;
                for (std::size_t a = 0; a < dim; ++a) {
                    score[a] += resid * basis[a];
                    for (std::size_t b = 0; b < dim; ++b)
                        xtwx(a, b) += mu * basis[a] * basis[b];
                }
            }
            for (std::size_t a = 0; a < dim; ++a) xtwx(a, a) += 1e-10;
            Vector delta = score;
            if (!solve_normal(xtwx, delta)) break;
            double worst = 0.0;
            for (std::size_t j = 0; j < dim; ++j) {
                coef_[j] += delta[j];
                worst = std::max(worst, std::abs(delta[j]));
            }
            if (worst < 1e-10) break;
        }
    }

    double operator()(double z) const {
        Vector basis(coef_.size());
        fill_basis(std::clamp(z, lo_, hi_), basis);
        double eta = 0.0;
        for (std::size_t j = 0; j < coef_.size(); ++j) eta += coef_[j] * basis[j];
        return std::exp(std::min(eta, 40.0)) / (n_ * bin_width_);
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }

private:
    void fill_basis(double z, Vector& basis) const {
        const double t = (z - mid_) / half_;
        double p = 1.0;
        for (auto& b : basis) {
            b = p;
            p *= t;
        }
    }

    static bool solve_normal(Matrix& a, Vector& b) {
        const std::size_t k = b.size();
        for (std::size_t col = 0; col < k; ++col) {
            std::size_t pivot = col;
            for (std::size_t r = col + 1; r < k; ++r)
                if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
            if (std::abs(a(pivot, col)) < 1e-14) return false;
            if (pivot != col) {
                for (std::size_t c = 0; c < k; ++c) std::swap(a(col, c), a(pivot, c));
                std::swap(b[col], b[pivot]);
            }
            for (std::size_t r = col + 1; r < k; ++r) {
                const double factor = a(r, col) / a(col, col);
                for (std::size_t c = col; c < k; ++c) a(r, c) -= factor * a(col, c);
                b[r] -= factor * b[col];
            }
        }
        for (std::size_t col = k; col-- > 0;) {
            for (std::size_t r = 0; r < col; ++r) b[r] -= a(r, col) / a(col, col) * b[col];
            b[col] /= a(col, col);
        }
        return true;
    }

    double lo_ = 0.0, hi_ = 0.0, mid_ = 0.0, half_ = 1.0, bin_width_ = 1.0, n_ = 0.0;
    Vector coef_;
};

// Golden-section maximization of a unimodal 1-d function.
template <typename F>
double golden_max(F f, double lo, double hi, int iters = 80) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - phi * (hi - lo);
    double x2 = lo + phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        }
    }
    return (lo + hi) / 2.0;
}

}  // namespace

double LfdrModel::lfdr(double raw) const {
    const double z = std::clamp(z_score(raw), grid_.front(), grid_.back());
    const double step = grid_[1] - grid_[0];
    std::size_t idx = static_cast<std::size_t>((z - grid_.front()) / step);
    if (idx >= grid_.size() - 1) idx = grid_.size() - 2;
    const double frac = (z - grid_[idx]) / step;
    return grid_lfdr_[idx] * (1.0 - frac) + grid_lfdr_[idx + 1] * frac;
}

LfdrModel fit_lfdr(std::span<const double> scores) {
    if (scores.size() < 200)
        throw ContractError("fit_lfdr: need at least 200 scores for density estimation");

    LfdrModel model;
    const double n = static_cast<double>(scores.size());
    double mean = 0.0;
    for (double s : scores) mean += s;
    mean /= n;
    double ss = 0.0;
    for (double s : scores) ss += (s - mean) * (s - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    if (sd == 0.0) throw DegenerateDataError("fit_lfdr: scores have zero spread");
    model.shift_ = mean;
    model.spread_ = sd;

    Vector z(scores.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = (scores[i] - mean) / sd;
    Vector sorted = z;
    std::sort(sorted.begin(), sorted.end());

    // Central matching band: the central 80% of the sample. The band must be
    // wide enough to carry curvature information about the null sd (the
    // central half alone pins sigma0 only to within ~0.13 at n = 10^4) yet
    // still exclude the tails where non-null mass lives.
    const double band_lo_q = 0.10, band_hi_q = 0.90;
    const double lo_edge = quantile_sorted(sorted, band_lo_q);
    const double hi_edge = quantile_sorted(sorted, band_hi_q);
    if (!(hi_edge > lo_edge)) throw DegenerateDataError("fit_lfdr: degenerate central band");
    Vector band;
    band.reserve(sorted.size());
    for (double v : sorted)
        if (v >= lo_edge && v <= hi_edge) band.push_back(v);

    // Truncated-normal MLE on the band via coordinate-wise golden section.
    double mu = quantile_sorted(sorted, 0.5);
    double sigma = std::max((hi_edge - lo_edge) / 2.5631, 1e-6);
    for (int round = 0; round < 6; ++round) {
        mu = golden_max(
            [&](double m) { return truncated_normal_loglik(band, lo_edge, hi_edge, m, sigma); },
            lo_edge, hi_edge);
        sigma = golden_max(
            [&](double s) { return truncated_normal_loglik(band, lo_edge, hi_edge, mu, s); },
            sigma * 0.3, sigma * 3.0);
    }
    model.null_mean_ = mu;
    model.null_sd_ = sigma;

    const double band_mass =
        static_cast<double>(band.size()) / static_cast<double>(sorted.size());
    const double null_band_mass =
        normal_cdf((hi_edge - mu) / sigma) - normal_cdf((lo_edge - mu) / sigma);
    model.pi0_ = std::min(1.0, band_mass / std::max(null_band_mass, 1e-12));

    // Smooth marginal density and the lfdr grid.
    const PolyDensity density(sorted, 120, 4);
    const std::size_t grid_points = 1024;
    model.grid_.resize(grid_points);
    model.grid_lfdr_.resize(grid_points);
    const double glo = density.lo(), ghi = density.hi();
    const double step = (ghi - glo) / static_cast<double>(grid_points - 1);
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double zi = glo + step * static_cast<double>(i);
        model.grid_[i] = zi;
        const double f = std::max(density(zi), 1e-300);
        const double f0 = normal_pdf((zi - mu) / sigma) / sigma;
        model.grid_lfdr_[i] = std::clamp(model.pi0_ * f0 / f, 0.0, 1.0);
    }
    // Monotonize outward from the null mean: a more extreme score is never
    // less of a discovery.
    std::size_t center = 0;
    for (std::size_t i = 1; i < grid_points; ++i)
        if (std::abs(model.grid_[i] - mu) < std::abs(model.grid_[center] - mu)) center = i;
    for (std::size_t i = center + 1; i < grid_points; ++i)
        model.grid_lfdr_[i] = std::min(model.grid_lfdr_[i], model.grid_lfdr_[i - 1]);
    for (std::size_t i = center; i-- > 0;)
        model.grid_lfdr_[i] = std::min(model.grid_lfdr_[i], model.grid_lfdr_[i + 1]);
    return model;
}

std::string to_string(TailClass c) {
    switch (c) {
        case TailClass::Low: return "low";
        case TailClass::Normal: return "normal";
        case TailClass::High: return "high";
    }
    return "normal";
}

std::vector<TendencyScore> score_cohort(const InnerModel& model,
                                        std::span<const Subject> cohort) {
    std::vector<TendencyScore> scores;
    scores.reserve(cohort.size());
    for (const Subject& s : cohort) scores.push_back(tendency(model, s.covariates));
    return scores;
}

std::vector<SubgroupAssignment> assign_subgroups(std::span<const TendencyScore> scores,
                                                 double q) {
    if (!(q > 0.0 && q < 1.0)) throw ContractError("assign_subgroups: q must lie in (0,1)");
    Vector log_bot(scores.size()), log_pot(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        log_bot[i] = scores[i].log_bot;
        log_pot[i] = scores[i].log_pot;
    }
    const LfdrModel bot_model = fit_lfdr(log_bot);
    const LfdrModel pot_model = fit_lfdr(log_pot);

    auto classify = [q](const LfdrModel& m, double raw, double& lfdr_out) {
        lfdr_out = m.lfdr(raw);
        if (lfdr_out < q)
            return m.z_score(raw) > m.null_mean() ? TailClass::High : TailClass::Low;
        return TailClass::Normal;
    };

    std::vector<SubgroupAssignment> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i].bot_class = classify(bot_model, scores[i].log_bot, out[i].lfdr_bot);
        out[i].pot_class = classify(pot_model, scores[i].log_pot, out[i].lfdr_pot);
    }
    return out;
}

std::vector<RiskCurve> risk_curves(const InnerModel& model, std::span<const Subject> cohort,
                                   std::span<const SubgroupAssignment> assignments) {
    if (cohort.size() != assignments.size())
        throw ContractError("risk_curves: cohort/assignment length mismatch");

    Vector grid;
    for (int i = 0; i <= 100; ++i) grid.push_back(static_cast<double>(i) * 0.1);

    // Tendency per member once; the grid sweep is then a closed form.
    std::vector<TendencyScore> scores = score_cohort(model, cohort);

    std::vector<RiskCurve> curves;
    for (TailClass bot : {TailClass::Normal, TailClass::High, TailClass::Low}) {
        for (TailClass pot : {TailClass::Low, TailClass::Normal, TailClass::High}) {
            std::vector<std::size_t> members;
            for (std::size_t i = 0; i < assignments.size(); ++i)
                if (assignments[i].bot_class == bot && assignments[i].pot_class == pot)
                    members.push_back(i);
            if (members.empty()) continue;

            RiskCurve curve;
            curve.bot_class = bot;
            curve.pot_class = pot;
            curve.member_count = members.size();
            curve.pain_grid = grid;
            curve.mean_prob.resize(grid.size());
            for (std::size_t gi = 0; gi < grid.size(); ++gi) {
                double acc = 0.0;
                for (std::size_t m : members) {
                    const double l = std::clamp(
                        scores[m].log_bot + scores[m].log_pot * grid[gi], -kLogitClamp,
                        kLogitClamp);
                    acc += nn::sigmoid(l);
                }
                curve.mean_prob[gi] = acc / static_cast<double>(members.size());
            }
            for (std::size_t gi = 0; gi < grid.size(); ++gi) {
                if (curve.mean_prob[gi] >= 0.5) {
                    if (gi == 0) {
                        curve.crossing_pain = 0.0;
                    } else {
                        const double m0 = curve.mean_prob[gi - 1];
                        const double m1 = curve.mean_prob[gi];
                        curve.crossing_pain =
                            grid[gi - 1] + 0.1 * (0.5 - m0) / (m1 - m0);
                    }
                    break;
                }
            }
            curves.push_back(std::move(curve));
        }
    }
    return curves;
}

namespace {

// Solves the (k+1)x(k+1) normal equations by Gaussian elimination with
// partial pivoting; returns false when singular.
bool solve_inplace(Matrix& a, Vector& b) {
    const std::size_t k = b.size();
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        if (std::abs(a(pivot, col)) < 1e-12) return false;
        if (pivot != col) {
            for (std::size_t c = 0; c < k; ++c) std::swap(a(col, c), a(pivot, c));
            std::swap(b[col], b[pivot]);
        }
        for (std::size_t r = col + 1; r < k; ++r) {
            const double factor = a(r, col) / a(col, col);
            for (std::size_t c = col; c < k; ++c) a(r, c) -= factor * a(col, c);
            b[r] -= factor * b[col];
        }
    }
    for (std::size_t col = k; col-- > 0;) {
        for (std::size_t r = 0; r < col; ++r) {
            b[r] -= a(r, col) / a(col, col) * b[col];
            a(r, col) = 0.0;
        }
        b[col] /= a(col, col);
    }
    return true;
}

std::optional<double> block_r2(const Vector& y, const Matrix& design,
                               std::span<const std::size_t> cols) {
    const std::size_t n = y.size();
    const std::size_t k = cols.size() + 1;  // intercept first

    bool any_variance = false;
    for (std::size_t c : cols) {
        const double first = design(0, c);
        for (std::size_t i = 1; i < n; ++i)
            if (design(i, c) != first) {
                any_variance = true;
                break;
            }
        if (any_variance) break;
    }
    if (!any_variance) return std::nullopt;

    // X'X and X'y with X = [1 | block columns].
    Matrix xtx(k, k, 0.0);
    Vector xty(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        Vector row(k);
        row[0] = 1.0;
        for (std::size_t j = 0; j < cols.size(); ++j) row[j + 1] = design(i, cols[j]);
        for (std::size_t a = 0; a < k; ++a) {
            xty[a] += row[a] * y[i];
            for (std::size_t b = 0; b < k; ++b) xtx(a, b) += row[a] * row[b];
        }
    }
    Vector coef = xty;
    if (!solve_inplace(xtx, coef)) return std::nullopt;

    double y_mean = 0.0;
    for (double v : y) y_mean += v;
    y_mean /= static_cast<double>(n);
    double sst = 0.0, sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double fit = coef[0];
        for (std::size_t j = 0; j < cols.size(); ++j) fit += coef[j + 1] * design(i, cols[j]);
        sse += (y[i] - fit) * (y[i] - fit);
        sst += (y[i] - y_mean) * (y[i] - y_mean);
    }
    if (sst <= 0.0) return 0.0;
    return std::clamp(1.0 - sse / sst, 0.0, 1.0);
}

}  // namespace

std::vector<R2Entry> covariate_r2(std::span<const TendencyScore> scores, const Matrix& design,
                                  std::span<const CovariateBlock> blocks) {
    if (scores.size() != design.rows())
        throw ContractError("covariate_r2: score/design row mismatch");
    if (scores.empty()) throw ContractError("covariate_r2: empty cohort");

    Vector log_bot(scores.size()), log_pot(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        log_bot[i] = scores[i].log_bot;
        log_pot[i] = scores[i].log_pot;
    }
    std::vector<R2Entry> out;
    out.reserve(blocks.size());
    for (const auto& block : blocks) {
        for (std::size_t c : block.columns)
            if (c >= design.cols()) throw ContractError("covariate_r2: column index out of range");
        R2Entry entry;
        entry.name = block.name;
        entry.r2_bot = block_r2(log_bot, design, block.columns);
        entry.r2_pot = block_r2(log_pot, design, block.columns);
        out.push_back(std::move(entry));
    }
    return out;
}

std::vector<CovariateBlock> column_blocks(std::size_t p) {
    std::vector<CovariateBlock> blocks;
    blocks.reserve(p);
    for (std::size_t j = 0; j < p; ++j)
        blocks.push_back({"z" + std::to_string(j + 1), {j}});
    return blocks;
}

}  // namespace inner::subgroup
