#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "inner/linalg.hpp"
#include "inner/model.hpp"

namespace inner::subgroup {

// Empirical-null local false discovery rate model for one score dimension.
// Scores are standardized internally; the null (mu0, sigma0) is a truncated
// normal maximum-likelihood fit on the central band of the sample, the
// marginal density a smooth Poisson log-polynomial histogram fit, and pi0
// the central-band mass ratio capped at one. The resulting lfdr is
// monotonized outward from the null mean.
class LfdrModel {
public:
    double null_mean() const { return null_mean_; }
    double null_sd() const { return null_sd_; }
    double pi0() const { return pi0_; }

    // Standardized coordinate of a raw score.
    double z_score(double raw) const { return (raw - shift_) / spread_; }

    // pi0 * f0(z) / f(z), clipped to [0,1].
    double lfdr(double raw) const;

    friend LfdrModel fit_lfdr(std::span<const double> scores);

private:
    double shift_ = 0.0, spread_ = 1.0;  // standardization of the raw scores
    double null_mean_ = 0.0, null_sd_ = 1.0;
    double pi0_ = 1.0;
    Vector grid_;       // evaluation grid (standardized scale)
    Vector grid_lfdr_;  // monotonized lfdr values on the grid
};

// Fits the empirical-null lfdr model; needs at least 200 scores with
// non-degenerate spread.
LfdrModel fit_lfdr(std::span<const double> scores);

enum class TailClass { Low, Normal, High };

std::string to_string(TailClass c);

struct SubgroupAssignment {
    TailClass bot_class = TailClass::Normal;
    TailClass pot_class = TailClass::Normal;
    double lfdr_bot = 1.0;
    double lfdr_pot = 1.0;
};

// Eval-mode tendency scores for every cohort member, order preserved.
std::vector<TendencyScore> score_cohort(const InnerModel& model,
                                        std::span<const Subject> cohort);

// Classifies each subject on the BOT and POT dimensions: a discovery
// (lfdr < q) above the null mean is High, below it Low, everything else
// Normal. Fits one lfdr model per dimension on the log scores.
std::vector<SubgroupAssignment> assign_subgroups(std::span<const TendencyScore> scores,
                                                 double q = 0.2);

struct RiskCurve {
    TailClass bot_class = TailClass::Normal;
    TailClass pot_class = TailClass::Normal;
    std::size_t member_count = 0;
    Vector pain_grid;
    Vector mean_prob;
    // Pain where the curve first reaches 0.5 (linear interpolation between
    // grid points; 0 when already at or above 0.5 at the grid start).
    std::optional<double> crossing_pain;
};

// Mean predicted probability per subgroup over the pain grid 0..10 step 0.1,
// each member scored with its pain overridden by the grid value. Empty
// subgroups are omitted.
std::vector<RiskCurve> risk_curves(const InnerModel& model, std::span<const Subject> cohort,
                                   std::span<const SubgroupAssignment> assignments);

struct CovariateBlock {
    std::string name;
    std::vector<std::size_t> columns;
};

struct R2Entry {
    std::string name;
    // Unset when the covariate block has no variance.
    std::optional<double> r2_bot;
    std::optional<double> r2_pot;
};

// Coefficient of determination from an ordinary least squares fit of log BOT
// (and log POT) on each covariate block alone, intercept included.
std::vector<R2Entry> covariate_r2(std::span<const TendencyScore> scores, const Matrix& design,
                                  std::span<const CovariateBlock> blocks);

// One block per covariate column, names z1..zp.
std::vector<CovariateBlock> column_blocks(std::size_t p);

}  // namespace inner::subgroup
