#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tpes/error.hpp"
#include "tpes/milp.hpp"

// Primal revised simplex with variable bounds. The constraint matrix is held
// in scaled computational form (structural columns + one slack per row); the
// basis is kept as a dense LU factorization plus a product-form eta file,
// refactorized every kRefactorInterval pivots. Phase 1 uses artificial
// columns that are fixed to zero once they leave the basis. Dantzig pricing
// with a switch to Bland's rule after a run of degenerate steps.

namespace tpes {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr int kRefactorInterval = 100;
constexpr double kPivotTol = 1e-8;
constexpr double kReducedCostTol = 1e-9;
constexpr double kDegenerateStep = 1e-11;
constexpr int kStallLimit = 200;

enum class VStat : unsigned char { basic, at_lb, at_ub, nb_free };

struct Workspace {
    int m = 0;        // rows
    int nstruct = 0;  // structural columns
    int ncols = 0;    // structural + slack + artificial
    // CSC of structural + slack columns
    std::vector<int> cptr, cidx;
    std::vector<double> cval;
    std::vector<double> lb, ub;    // per column (incl. slack, artificial)
    std::vector<double> rhs;       // scaled
    std::vector<double> art_sign;  // per row

    int art_col(int row) const { return nstruct + m + row; }
    bool is_artificial(int j) const { return j >= nstruct + m; }

    template <typename F>
    void for_column(int j, F&& f) const {
        if (is_artificial(j)) {
            f(j - nstruct - m, art_sign[j - nstruct - m]);
        } else {
            for (int p = cptr[j]; p < cptr[j + 1]; ++p) f(cidx[p], cval[p]);
        }
    }
};

class Basis {
  public:
    void init(int m) {
        m_ = m;
        etas_.clear();
    }

    void refactor(const Workspace& w, const std::vector<int>& basis) {
        MatrixXd B = MatrixXd::Zero(m_, m_);
        for (int pos = 0; pos < m_; ++pos)
            w.for_column(basis[pos], [&](int i, double v) { B(i, pos) += v; });
        lu_.compute(B);
        etas_.clear();
    }

    VectorXd ftran(VectorXd v) const {
        v = lu_.solve(v);
        for (const auto& e : etas_) {
            double t = v[e.r] / e.alpha[e.r];
            v -= t * e.alpha;
            v[e.r] = t;
        }
        return v;
    }

    VectorXd btran(VectorXd v) const {
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            double zr = (v[it->r] - it->alpha.dot(v) + it->alpha[it->r] * v[it->r]) / it->alpha[it->r];
            v[it->r] = zr;
        }
        return lu_.transpose().solve(v);
    }

    void push_eta(int r, VectorXd alpha) { etas_.push_back({r, std::move(alpha)}); }
    int eta_count() const { return static_cast<int>(etas_.size()); }

  private:
    struct Eta {
        int r;
        VectorXd alpha;
    };
    int m_ = 0;
    Eigen::PartialPivLU<MatrixXd> lu_;
    std::vector<Eta> etas_;
};

class Simplex {
  public:
    Simplex(const MilpModel& model, const SolveLimits& limits) : model_(model), limits_(limits) { build(); }

    Solution run() {
        Solution sol;
        if (w_.m == 0) return solve_without_rows();

        init_basis();

        // phase 1: minimize the artificial sum
        std::vector<double> c1(w_.ncols, 0.0);
        for (int i = 0; i < w_.m; ++i) c1[w_.art_col(i)] = 1.0;
        SolveStatus st = iterate(c1, true);
        if (st == SolveStatus::iteration_limit) return finish(sol, st);
        double infeas = 0;
        for (int i = 0; i < w_.m; ++i) infeas += std::abs(x_[w_.art_col(i)]);
        if (infeas > 1e-7 * (1.0 + rhs_scale_)) return finish(sol, SolveStatus::infeasible);
        purge_artificials();

        // phase 2: the real objective
        st = iterate(cost_, false);
        return finish(sol, st);
    }

  private:
    const MilpModel& model_;
    const SolveLimits& limits_;
    Workspace w_;
    std::vector<double> cost_;       // scaled phase-2 costs
    std::vector<double> col_scale_;  // structural columns only
    double rhs_scale_ = 1.0;

    std::vector<double> x_;
    std::vector<VStat> vstat_;
    std::vector<int> basis_;
    Basis fac_;
    long iters_used_ = 0;

    void build() {
        const auto& vars = model_.vars();
        const auto& rows = model_.rows();
        w_.m = static_cast<int>(rows.size());
        w_.nstruct = static_cast<int>(vars.size());
        w_.ncols = w_.nstruct + 2 * w_.m;

        // row-major copy for scaling passes
        std::vector<std::vector<std::pair<int, double>>> rmaj(w_.m);
        for (int r = 0; r < w_.m; ++r) rmaj[r] = rows[r].coeffs;

        std::vector<double> rscale(w_.m, 1.0), cscale(w_.nstruct, 1.0);
        auto pow2 = [](double s) {
            if (!(s > 0) || !std::isfinite(s)) return 1.0;
            return std::exp2(std::round(std::log2(s)));
        };
        for (int pass = 0; pass < 2; ++pass) {
            for (int r = 0; r < w_.m; ++r) {
                double lo = kInf, hi = 0;
                for (auto& [c, v] : rmaj[r]) {
                    double a = std::abs(v) * cscale[c] * rscale[r];
                    if (a > 0) {
                        lo = std::min(lo, a);
                        hi = std::max(hi, a);
                    }
                }
                if (hi > 0) rscale[r] *= pow2(1.0 / std::sqrt(lo * hi));
            }
            std::vector<double> clo(w_.nstruct, kInf), chi(w_.nstruct, 0.0);
            for (int r = 0; r < w_.m; ++r)
                for (auto& [c, v] : rmaj[r]) {
                    double a = std::abs(v) * cscale[c] * rscale[r];
                    if (a > 0) {
                        clo[c] = std::min(clo[c], a);
                        chi[c] = std::max(chi[c], a);
                    }
                }
            for (int c = 0; c < w_.nstruct; ++c)
                if (chi[c] > 0) cscale[c] *= pow2(1.0 / std::sqrt(clo[c] * chi[c]));
        }
        col_scale_ = cscale;

        // CSC for structural columns (scaled), then unit slack columns
        std::vector<int> count(w_.nstruct + w_.m, 0);
        for (int r = 0; r < w_.m; ++r)
            for (auto& [c, v] : rmaj[r]) ++count[c];
        for (int r = 0; r < w_.m; ++r) ++count[w_.nstruct + r];
        w_.cptr.assign(w_.nstruct + w_.m + 1, 0);
        for (int j = 0; j < w_.nstruct + w_.m; ++j) w_.cptr[j + 1] = w_.cptr[j] + count[j];
        w_.cidx.resize(w_.cptr.back());
        w_.cval.resize(w_.cptr.back());
        std::vector<int> fill(w_.cptr.begin(), w_.cptr.end() - 1);
        for (int r = 0; r < w_.m; ++r)
            for (auto& [c, v] : rmaj[r]) {
                w_.cidx[fill[c]] = r;
                w_.cval[fill[c]] = v * rscale[r] * cscale[c];
                ++fill[c];
            }
        for (int r = 0; r < w_.m; ++r) {
            int j = w_.nstruct + r;
            w_.cidx[fill[j]] = r;
            w_.cval[fill[j]] = 1.0;
        }

        // bounds: structural scaled by 1/cscale, slack per row sense
        w_.lb.assign(w_.ncols, 0.0);
        w_.ub.assign(w_.ncols, kInf);
        for (int j = 0; j < w_.nstruct; ++j) {
            w_.lb[j] = vars[j].lb / cscale[j];
            w_.ub[j] = vars[j].ub / cscale[j];
        }
        for (int r = 0; r < w_.m; ++r) {
            int j = w_.nstruct + r;
            switch (rows[r].sense) {
                case Sense::le:
                    w_.lb[j] = 0;
                    w_.ub[j] = kInf;
                    break;
                case Sense::ge:
                    w_.lb[j] = -kInf;
                    w_.ub[j] = 0;
                    break;
                case Sense::eq:
                    w_.lb[j] = 0;
                    w_.ub[j] = 0;
                    break;
            }
        }
        for (int r = 0; r < w_.m; ++r) {
            w_.lb[w_.art_col(r)] = 0;
            w_.ub[w_.art_col(r)] = kInf;
        }

        w_.rhs.resize(w_.m);
        for (int r = 0; r < w_.m; ++r) {
            w_.rhs[r] = rows[r].rhs * rscale[r];
            rhs_scale_ = std::max(rhs_scale_, std::abs(w_.rhs[r]));
        }
        w_.art_sign.assign(w_.m, 1.0);

        cost_.assign(w_.ncols, 0.0);
        double sign = model_.minimize ? 1.0 : -1.0;
        for (auto& [j, c] : model_.objective()) cost_[j] += sign * c * cscale[j];
    }

    Solution solve_without_rows() {
        Solution sol;
        std::vector<double> x(w_.nstruct, 0.0);
        for (int j = 0; j < w_.nstruct; ++j) {
            double c = cost_[j];
            if (c > 0) {
                if (!std::isfinite(w_.lb[j])) return status_only(SolveStatus::unbounded);
                x[j] = w_.lb[j];
            } else if (c < 0) {
                if (!std::isfinite(w_.ub[j])) return status_only(SolveStatus::unbounded);
                x[j] = w_.ub[j];
            } else {
                x[j] = std::isfinite(w_.lb[j]) ? w_.lb[j] : (std::isfinite(w_.ub[j]) ? w_.ub[j] : 0.0);
            }
            x[j] *= col_scale_[j];
        }
        sol.status = SolveStatus::optimal;
        sol.values = std::move(x);
        sol.objective = model_.eval_objective(sol.values);
        sol.row_activity.clear();
        return sol;
    }

    Solution status_only(SolveStatus st) {
        Solution sol;
        sol.status = st;
        return sol;
    }

    void init_basis() {
        x_.assign(w_.ncols, 0.0);
        vstat_.assign(w_.ncols, VStat::at_lb);
        for (int j = 0; j < w_.nstruct + w_.m; ++j) {
            if (std::isfinite(w_.lb[j])) {
                x_[j] = w_.lb[j];
                vstat_[j] = VStat::at_lb;
            } else if (std::isfinite(w_.ub[j])) {
                x_[j] = w_.ub[j];
                vstat_[j] = VStat::at_ub;
            } else {
                x_[j] = 0;
                vstat_[j] = VStat::nb_free;
            }
        }
        std::vector<double> resid(w_.rhs);
        for (int j = 0; j < w_.nstruct + w_.m; ++j) {
            if (x_[j] == 0.0) continue;
            w_.for_column(j, [&](int i, double v) { resid[i] -= v * x_[j]; });
        }
        basis_.resize(w_.m);
        for (int r = 0; r < w_.m; ++r) {
            w_.art_sign[r] = resid[r] >= 0 ? 1.0 : -1.0;
            int j = w_.art_col(r);
            x_[j] = std::abs(resid[r]);
            vstat_[j] = VStat::basic;
            basis_[r] = j;
        }
        fac_.init(w_.m);
        fac_.refactor(w_, basis_);
    }

    void recompute_basics() {
        VectorXd rhs(w_.m);
        for (int r = 0; r < w_.m; ++r) rhs[r] = w_.rhs[r];
        for (int j = 0; j < w_.ncols; ++j) {
            if (vstat_[j] == VStat::basic || x_[j] == 0.0) continue;
            w_.for_column(j, [&](int i, double v) { rhs[i] -= v * x_[j]; });
        }
        VectorXd xb = fac_.ftran(rhs);
        for (int r = 0; r < w_.m; ++r) x_[basis_[r]] = xb[r];
    }

    double reduced_cost(const std::vector<double>& c, const VectorXd& y, int j) const {
        double d = c[j];
        w_.for_column(j, [&](int i, double v) { d -= y[i] * v; });
        return d;
    }

    // one simplex phase; returns optimal / unbounded / iteration_limit
    SolveStatus iterate(const std::vector<double>& c, bool phase1) {
        bool bland = false;
        int stall = 0;
        double ctol = kReducedCostTol;
        for (double v : c) ctol = std::max(ctol, kReducedCostTol * std::abs(v));

        while (true) {
            if (iters_used_ >= limits_.max_iterations) return SolveStatus::iteration_limit;

            VectorXd cb(w_.m);
            for (int r = 0; r < w_.m; ++r) cb[r] = c[basis_[r]];
            VectorXd y = fac_.btran(cb);

            int q = -1, dir = 0;
            double best = ctol;
            int limit = phase1 ? w_.ncols : w_.nstruct + w_.m;
            for (int j = 0; j < limit; ++j) {
                if (vstat_[j] == VStat::basic) continue;
                if (w_.lb[j] == w_.ub[j]) continue;  // fixed, never enters
                double d = reduced_cost(c, y, j);
                int dj = 0;
                if (vstat_[j] == VStat::at_lb && d < -ctol) dj = 1;
                else if (vstat_[j] == VStat::at_ub && d > ctol) dj = -1;
                else if (vstat_[j] == VStat::nb_free && std::abs(d) > ctol) dj = d < 0 ? 1 : -1;
                if (!dj) continue;
                if (bland) {
                    q = j;
                    dir = dj;
                    break;
                }
                if (std::abs(d) > best) {
                    best = std::abs(d);
                    q = j;
                    dir = dj;
                }
            }
            if (q < 0) {
                // confirm on a fresh factorization; drift can fake optimality
                if (fac_.eta_count() > 0) {
                    fac_.refactor(w_, basis_);
                    recompute_basics();
                    VectorXd cb2(w_.m);
                    for (int r = 0; r < w_.m; ++r) cb2[r] = c[basis_[r]];
                    VectorXd y2 = fac_.btran(cb2);
                    bool any = false;
                    for (int j = 0; j < limit && !any; ++j) {
                        if (vstat_[j] == VStat::basic || w_.lb[j] == w_.ub[j]) continue;
                        double d = reduced_cost(c, y2, j);
                        if ((vstat_[j] == VStat::at_lb && d < -ctol) || (vstat_[j] == VStat::at_ub && d > ctol) ||
                            (vstat_[j] == VStat::nb_free && std::abs(d) > ctol))
                            any = true;
                    }
                    if (any) continue;
                }
                return SolveStatus::optimal;
            }

            VectorXd col = VectorXd::Zero(w_.m);
            w_.for_column(q, [&](int i, double v) { col[i] += v; });
            VectorXd alpha = fac_.ftran(col);

            // ratio test
            double t_best = kInf;
            int leave = -1;
            double sigma = dir;
            for (int r = 0; r < w_.m; ++r) {
                double a = sigma * alpha[r];
                int bj = basis_[r];
                double t;
                if (a > kPivotTol) {
                    if (!std::isfinite(w_.lb[bj])) continue;
                    t = (x_[bj] - w_.lb[bj]) / a;
                } else if (a < -kPivotTol) {
                    if (!std::isfinite(w_.ub[bj])) continue;
                    t = (x_[bj] - w_.ub[bj]) / a;
                } else {
                    continue;
                }
                if (t < 0) t = 0;
                bool better;
                if (bland) {
                    better = t < t_best - 1e-12 || (t <= t_best + 1e-12 && (leave < 0 || bj < basis_[leave]));
                } else {
                    better = t < t_best - 1e-12 ||
                             (t <= t_best + 1e-12 && (leave < 0 || std::abs(alpha[r]) > std::abs(alpha[leave])));
                }
                if (better) {
                    t_best = t;
                    leave = r;
                }
            }
            double t_flip = kInf;
            if (std::isfinite(w_.lb[q]) && std::isfinite(w_.ub[q])) t_flip = w_.ub[q] - w_.lb[q];

            double t = std::min(t_best, t_flip);
            if (!std::isfinite(t)) return SolveStatus::unbounded;

            ++iters_used_;
            if (t <= kDegenerateStep) {
                if (++stall > kStallLimit) bland = true;
            } else {
                stall = 0;
                bland = false;
            }

            for (int r = 0; r < w_.m; ++r) x_[basis_[r]] -= sigma * t * alpha[r];

            if (t_flip <= t_best) {
                x_[q] = dir > 0 ? w_.ub[q] : w_.lb[q];
                vstat_[q] = dir > 0 ? VStat::at_ub : VStat::at_lb;
                continue;
            }

            int lv = basis_[leave];
            double a_leave = sigma * alpha[leave];
            if (a_leave > 0) {
                x_[lv] = w_.lb[lv];
                vstat_[lv] = VStat::at_lb;
            } else {
                x_[lv] = w_.ub[lv];
                vstat_[lv] = VStat::at_ub;
            }
            x_[q] = (vstat_[q] == VStat::at_lb ? w_.lb[q] : vstat_[q] == VStat::at_ub ? w_.ub[q] : 0.0) + dir * t;
            vstat_[q] = VStat::basic;
            basis_[leave] = q;
            if (phase1 && w_.is_artificial(lv)) {
                w_.lb[lv] = w_.ub[lv] = 0;  // never comes back
                x_[lv] = 0;
            }
            fac_.push_eta(leave, std::move(alpha));
            if (fac_.eta_count() >= kRefactorInterval) {
                fac_.refactor(w_, basis_);
                recompute_basics();
            }
        }
    }

    // pivot leftover artificials out of the basis; redundant rows keep a
    // fixed artificial as a placeholder
    void purge_artificials() {
        for (int r = 0; r < w_.m; ++r) {
            int bj = basis_[r];
            if (!w_.is_artificial(bj)) continue;
            VectorXd e = VectorXd::Zero(w_.m);
            e[r] = 1.0;
            VectorXd rho = fac_.btran(e);
            int found = -1;
            for (int j = 0; j < w_.nstruct + w_.m; ++j) {
                if (vstat_[j] == VStat::basic) continue;
                if (w_.lb[j] == w_.ub[j]) continue;
                double piv = 0;
                w_.for_column(j, [&](int i, double v) { piv += rho[i] * v; });
                if (std::abs(piv) > 1e-7) {
                    found = j;
                    break;
                }
            }
            if (found < 0) {
                w_.lb[bj] = w_.ub[bj] = 0;  // redundant row
                continue;
            }
            VectorXd col = VectorXd::Zero(w_.m);
            w_.for_column(found, [&](int i, double v) { col[i] += v; });
            VectorXd alpha = fac_.ftran(col);
            if (std::abs(alpha[r]) < kPivotTol) {
                w_.lb[bj] = w_.ub[bj] = 0;
                continue;
            }
            vstat_[found] = VStat::basic;
            basis_[r] = found;
            w_.lb[bj] = w_.ub[bj] = 0;
            x_[bj] = 0;
            vstat_[bj] = VStat::at_lb;
            fac_.push_eta(r, std::move(alpha));
            if (fac_.eta_count() >= kRefactorInterval) {
                fac_.refactor(w_, basis_);
                recompute_basics();
            }
        }
        for (int i = 0; i < w_.m; ++i) {
            int j = w_.art_col(i);
            w_.lb[j] = w_.ub[j] = 0;
            if (vstat_[j] != VStat::basic) x_[j] = 0;
        }
        fac_.refactor(w_, basis_);
        recompute_basics();
    }

    Solution finish(Solution sol, SolveStatus st) {
        sol.status = st;
        sol.iterations = iters_used_;
        sol.values.resize(w_.nstruct);
        for (int j = 0; j < w_.nstruct; ++j) sol.values[j] = x_[j] * col_scale_[j];
        if (st == SolveStatus::optimal || st == SolveStatus::iteration_limit) {
            sol.objective = model_.eval_objective(sol.values);
            sol.best_bound = sol.objective;
            sol.row_activity = model_.row_activities(sol.values);
        }
        return sol;
    }
};

}  // namespace

Solution solve_lp(const MilpModel& model, const SolveLimits& limits) {
    Simplex s(model, limits);
    Solution sol = s.run();
    return sol;
}

}  // namespace tpes
