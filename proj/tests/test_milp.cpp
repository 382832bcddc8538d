#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "tpes/error.hpp"
#include "tpes/milp.hpp"

using namespace tpes;

namespace {

double u01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// ---- feasible-vertex enumeration oracle for small bounded LPs ----------

struct DenseLP {
    int n = 0;
    std::vector<double> c;
    std::vector<std::vector<double>> a;  // rows
    std::vector<Sense> sense;
    std::vector<double> b;
    std::vector<double> lb, ub;  // finite
};

bool solve_square(std::vector<std::vector<double>> m, std::vector<double>& rhs) {
    const int n = static_cast<int>(rhs.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        if (std::abs(m[piv][col]) < 1e-11) return false;
        std::swap(m[piv], m[col]);
        std::swap(rhs[piv], rhs[col]);
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = m[r][col] / m[col][col];
            if (f == 0.0) continue;
            for (int k = col; k < n; ++k) m[r][k] -= f * m[col][k];
            rhs[r] -= f * rhs[col];
        }
    }
    for (int i = 0; i < n; ++i) rhs[i] /= m[i][i];
    return true;
}

bool feasible(const DenseLP& lp, const std::vector<double>& x, double tol = 1e-8) {
    for (int j = 0; j < lp.n; ++j)
        if (x[j] < lp.lb[j] - tol || x[j] > lp.ub[j] + tol) return false;
    for (std::size_t r = 0; r < lp.a.size(); ++r) {
        double act = 0;
        for (int j = 0; j < lp.n; ++j) act += lp.a[r][j] * x[j];
        if (lp.sense[r] == Sense::le && act > lp.b[r] + tol) return false;
        if (lp.sense[r] == Sense::ge && act < lp.b[r] - tol) return false;
        if (lp.sense[r] == Sense::eq && std::abs(act - lp.b[r]) > tol) return false;
    }
    return true;
}

// enumerate all choices of n active hyperplanes (rows + bounds)
bool vertex_enum_optimum(const DenseLP& lp, double& best) {
    const int n = lp.n;
    std::vector<std::vector<double>> planes;
    std::vector<double> rhs;
    for (std::size_t r = 0; r < lp.a.size(); ++r) {
        planes.push_back(lp.a[r]);
        rhs.push_back(lp.b[r]);
    }
    for (int j = 0; j < n; ++j) {
        std::vector<double> row(n, 0.0);
        row[j] = 1.0;
        planes.push_back(row);
        rhs.push_back(lp.lb[j]);
        planes.push_back(row);
        rhs.push_back(lp.ub[j]);
    }
    const int total = static_cast<int>(planes.size());
    std::vector<int> pick(n);
    for (int i = 0; i < n; ++i) pick[i] = i;
    bool found = false;
    best = std::numeric_limits<double>::infinity();
    while (true) {
        std::vector<std::vector<double>> m(n, std::vector<double>(n));
        std::vector<double> r(n);
        for (int i = 0; i < n; ++i) {
            m[i] = planes[pick[i]];
            r[i] = rhs[pick[i]];
        }
        if (solve_square(m, r) && feasible(lp, r)) {
            double obj = 0;
            for (int j = 0; j < n; ++j) obj += lp.c[j] * r[j];
            if (obj < best) best = obj;
            found = true;
        }
        int i = n - 1;
        while (i >= 0 && pick[i] == total - n + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (int j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
    }
    return found;
}

MilpModel to_model(const DenseLP& lp) {
    MilpModel m;
    for (int j = 0; j < lp.n; ++j) {
        m.add_var("x" + std::to_string(j), lp.lb[j], lp.ub[j]);
        if (lp.c[j] != 0) m.add_objective_term(j, lp.c[j]);
    }
    for (std::size_t r = 0; r < lp.a.size(); ++r) {
        std::vector<std::pair<int, double>> coeffs;
        for (int j = 0; j < lp.n; ++j)
            if (lp.a[r][j] != 0) coeffs.emplace_back(j, lp.a[r][j]);
        m.add_row("r" + std::to_string(r), coeffs, lp.sense[r], lp.b[r]);
    }
    return m;
}

DenseLP random_lp(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    DenseLP lp;
    lp.n = 2 + static_cast<int>(rng() % 5);           // 2..6
    int m = 1 + static_cast<int>(rng() % 8);          // 1..8
    lp.c.resize(lp.n);
    lp.lb.resize(lp.n);
    lp.ub.resize(lp.n);
    for (int j = 0; j < lp.n; ++j) {
        lp.c[j] = -2.0 + 4.0 * u01(rng);
        lp.lb[j] = (rng() % 3 == 0) ? -1.0 : 0.0;
        lp.ub[j] = lp.lb[j] + 0.5 + 2.5 * u01(rng);
    }
    for (int r = 0; r < m; ++r) {
        std::vector<double> row(lp.n, 0.0);
        int nnz = 1 + static_cast<int>(rng() % lp.n);
        for (int k = 0; k < nnz; ++k) row[rng() % lp.n] = -2.0 + 4.0 * u01(rng);
        unsigned s = rng() % 4;  // bias toward inequalities
        lp.sense.push_back(s == 0 ? Sense::ge : s == 1 ? Sense::eq : Sense::le);
        lp.b.push_back(-1.5 + 4.0 * u01(rng));
        lp.a.push_back(row);
    }
    return lp;
}

}  // namespace

TEST_CASE("lp: one-variable floor") {
    MilpModel m;
    m.add_var("x", 0, kInf);
    m.add_objective_term(0, 1.0);
    m.add_row("floor", {{0, 1.0}}, Sense::ge, 3.0);
    Solution s = solve_lp(m);
    REQUIRE(s.status == SolveStatus::optimal);
    CHECK(s.objective == doctest::Approx(3.0));
    CHECK(s.values[0] == doctest::Approx(3.0));
    CHECK(s.row_activity[0] == doctest::Approx(3.0));
}

TEST_CASE("lp: optimal face, any vertex on x+y=4") {
    MilpModel m;
    m.add_var("x", 0, 3);
    m.add_var("y", 0, 3);
    m.add_objective_term(0, -1.0);
    m.add_objective_term(1, -1.0);
    m.add_row("cap", {{0, 1.0}, {1, 1.0}}, Sense::le, 4.0);
    Solution s = solve_lp(m);
    REQUIRE(s.status == SolveStatus::optimal);
    CHECK(s.objective == doctest::Approx(-4.0));
    CHECK(s.values[0] + s.values[1] == doctest::Approx(4.0));
}

TEST_CASE("lp: conflicting bounds are infeasible") {
    MilpModel m;
    m.add_var("x", 0, kInf);
    m.add_row("lo", {{0, 1.0}}, Sense::ge, 2.0);
    m.add_row("hi", {{0, 1.0}}, Sense::le, 1.0);
    Solution s = solve_lp(m);
    CHECK(s.status == SolveStatus::infeasible);
}

TEST_CASE("lp: unbounded direction is detected") {
    MilpModel m;
    m.add_var("x", 0, kInf);
    m.add_objective_term(0, -1.0);
    Solution s = solve_lp(m);
    CHECK(s.status == SolveStatus::unbounded);

    MilpModel m2;
    m2.add_var("x", 0, kInf);
    m2.add_var("y", 0, kInf);
    m2.add_objective_term(0, -1.0);
    m2.add_row("r", {{0, 1.0}, {1, -1.0}}, Sense::le, 1.0);
    CHECK(solve_lp(m2).status == SolveStatus::unbounded);
}

TEST_CASE("lp: free variables and equalities") {
    MilpModel m;
    m.add_var("x", -kInf, kInf);
    m.add_var("y", -kInf, kInf);
    m.add_objective_term(0, 1.0);
    m.add_objective_term(1, 2.0);
    m.add_row("e1", {{0, 1.0}, {1, 1.0}}, Sense::eq, 5.0);
    m.add_row("e2", {{0, 1.0}, {1, -1.0}}, Sense::eq, 1.0);
    Solution s = solve_lp(m);
    REQUIRE(s.status == SolveStatus::optimal);
    CHECK(s.values[0] == doctest::Approx(3.0));
    CHECK(s.values[1] == doctest::Approx(2.0));
}

TEST_CASE("lp: maximize flips the sense") {
    MilpModel m;
    m.minimize = false;
    m.add_var("x", 0, 2);
    m.add_objective_term(0, 5.0);
    Solution s = solve_lp(m);
    REQUIRE(s.status == SolveStatus::optimal);
    CHECK(s.objective == doctest::Approx(10.0));
}

TEST_CASE("lp: redundant equality rows are handled") {
    MilpModel m;
    m.add_var("x", 0, 10);
    m.add_var("y", 0, 10);
    m.add_objective_term(0, 1.0);
    m.add_objective_term(1, 1.0);
    m.add_row("e1", {{0, 1.0}, {1, 1.0}}, Sense::eq, 4.0);
    m.add_row("e2", {{0, 2.0}, {1, 2.0}}, Sense::eq, 8.0);  // same plane
    Solution s = solve_lp(m);
    REQUIRE(s.status == SolveStatus::optimal);
    CHECK(s.objective == doctest::Approx(4.0));
}

TEST_CASE("lp: objective offset is reported") {
    MilpModel m;
    m.add_var("x", 1, 5);
    m.add_objective_term(0, 2.0);
    m.objective_offset = 7.0;
    Solution s = solve_lp(m);
    CHECK(s.objective == doctest::Approx(9.0));
}

TEST_CASE("lp oracle: simplex equals vertex enumeration on 200 seeded LPs") {
    int optimal_seen = 0, infeasible_seen = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        DenseLP lp = random_lp(seed);
        MilpModel m = to_model(lp);
        Solution s = solve_lp(m);
        double best;
        bool any = vertex_enum_optimum(lp, best);
        INFO("seed ", seed);
        if (any) {
            REQUIRE(s.status == SolveStatus::optimal);
            CHECK(s.objective == doctest::Approx(best).epsilon(1e-7));
            CHECK(m.max_violation(s.values) <= 1e-7);
            ++optimal_seen;
        } else {
            CHECK(s.status == SolveStatus::infeasible);
            ++infeasible_seen;
        }
    }
    // the family must exercise both outcomes
    CHECK(optimal_seen > 50);
    CHECK(infeasible_seen > 5);
}

TEST_CASE("lp oracle: weak duality spot check") {
    for (std::uint64_t seed = 300; seed < 330; ++seed) {
        DenseLP lp = random_lp(seed);
        Solution s = solve_lp(to_model(lp));
        if (s.status != SolveStatus::optimal) continue;
        std::mt19937_64 rng(seed * 31);
        // random multipliers, constraints relaxed into the objective, box kept
        for (int trial = 0; trial < 5; ++trial) {
            double bound = 0.0;
            std::vector<double> adj = lp.c;
            for (std::size_t r = 0; r < lp.a.size(); ++r) {
                double y = u01(rng);
                double sgn;
                if (lp.sense[r] == Sense::le) sgn = y;          // y*(ax-b) <= 0
                else if (lp.sense[r] == Sense::ge) sgn = -y;    // -y*(ax-b) <= 0
                else sgn = (u01(rng) < 0.5 ? y : -y);           // either sign for equalities
                for (int j = 0; j < lp.n; ++j) adj[j] += sgn * lp.a[r][j];
                bound -= sgn * lp.b[r];
            }
            for (int j = 0; j < lp.n; ++j) bound += std::min(adj[j] * lp.lb[j], adj[j] * lp.ub[j]);
            CHECK(s.objective >= bound - 1e-7);
        }
    }
}

TEST_CASE("milp: all binaries fixed collapses to the LP") {
    MilpModel m;
    int d = m.add_binary("d");
    m.set_var_bounds(d, 1, 1);
    int x = m.add_var("x", 0, 10);
    m.add_objective_term(d, 3.0);
    m.add_objective_term(x, 1.0);
    m.add_row("r", {{x, 1.0}}, Sense::ge, 2.0);
    Solution milp_sol = solve_milp(m);
    Solution lp_sol = solve_lp(m);
    REQUIRE(milp_sol.status == SolveStatus::optimal);
    CHECK(milp_sol.objective == doctest::Approx(lp_sol.objective));
    CHECK(milp_sol.objective == doctest::Approx(5.0));
}

TEST_CASE("milp: big-M toy from first principles") {
    // min 10 d + 2x st x <= 5d, x >= 3, d binary -> d=1, x=3, obj 16
    MilpModel m;
    int d = m.add_binary("d");
    int x = m.add_var("x", 0, kInf);
    m.add_objective_term(d, 10.0);
    m.add_objective_term(x, 2.0);
    m.add_row("bigm", {{x, 1.0}, {d, -5.0}}, Sense::le, 0.0);
    m.add_row("need", {{x, 1.0}}, Sense::ge, 3.0);
    Solution s = solve_milp(m);
    REQUIRE(s.status == SolveStatus::optimal);
    CHECK(s.objective == doctest::Approx(16.0));
    CHECK(s.values[d] == doctest::Approx(1.0));
    CHECK(s.values[x] == doctest::Approx(3.0));
}

namespace {

// enumerate all binary fixings, solve the LP per leaf
double milp_enum_oracle(const MilpModel& model, bool& any_feasible) {
    std::vector<int> binaries;
    for (std::size_t j = 0; j < model.n_vars(); ++j)
        if (model.vars()[j].kind == VarKind::binary) binaries.push_back(static_cast<int>(j));
    MilpModel work = model;
    double best = std::numeric_limits<double>::infinity();
    any_feasible = false;
    for (unsigned long mask = 0; mask < (1ul << binaries.size()); ++mask) {
        for (std::size_t k = 0; k < binaries.size(); ++k) {
            double v = (mask >> k) & 1;
            work.set_var_bounds(binaries[k], v, v);
        }
        Solution s = solve_lp(work);
        if (s.status == SolveStatus::optimal && s.objective < best) {
            best = s.objective;
            any_feasible = true;
        }
    }
    return best;
}

MilpModel random_milp(std::uint64_t seed, int nbin) {
    std::mt19937_64 rng(seed);
    MilpModel m;
    std::vector<int> bins, conts;
    for (int k = 0; k < nbin; ++k) bins.push_back(m.add_binary("d" + std::to_string(k)));
    int nc = 1 + static_cast<int>(rng() % 3);
    for (int k = 0; k < nc; ++k) conts.push_back(m.add_var("x" + std::to_string(k), 0.0, 1.0 + 2.0 * u01(rng)));
    for (int b : bins) m.add_objective_term(b, -3.0 + 6.0 * u01(rng));
    for (int x : conts) m.add_objective_term(x, -3.0 + 6.0 * u01(rng));
    int mrows = 2 + static_cast<int>(rng() % 4);
    for (int r = 0; r < mrows; ++r) {
        std::vector<std::pair<int, double>> coeffs;
        for (int b : bins)
            if (rng() % 2) coeffs.emplace_back(b, -2.0 + 4.0 * u01(rng));
        for (int x : conts)
            if (rng() % 2) coeffs.emplace_back(x, -2.0 + 4.0 * u01(rng));
        if (coeffs.empty()) coeffs.emplace_back(bins[0], 1.0);
        m.add_row("r" + std::to_string(r), coeffs, rng() % 2 ? Sense::le : Sense::ge, -1.0 + 3.0 * u01(rng));
    }
    return m;
}

}  // namespace

TEST_CASE("milp oracle: branch-and-bound equals full binary enumeration") {
    for (std::uint64_t seed = 40; seed < 70; ++seed) {
        int nbin = 1 + static_cast<int>(seed % 10);  // 1..10
        MilpModel m = random_milp(seed, nbin);
        bool any;
        double best = milp_enum_oracle(m, any);
        Solution s = solve_milp(m);
        INFO("seed ", seed, " nbin ", nbin);
        if (any) {
            REQUIRE(s.status == SolveStatus::optimal);
            CHECK(s.objective == doctest::Approx(best).epsilon(1e-9).scale(1.0));
            for (std::size_t j = 0; j < m.n_vars(); ++j)
                if (m.vars()[j].kind == VarKind::binary)
                    CHECK(std::min(std::abs(s.values[j]), std::abs(1.0 - s.values[j])) <= tol::integrality);
        } else {
            CHECK(s.status == SolveStatus::infeasible);
        }
    }
}

TEST_CASE("milp: binary cap points to the export path") {
    MilpModel m;
    for (int k = 0; k < 33; ++k) m.add_binary("d" + std::to_string(k));
    m.add_objective_term(0, 1.0);
    CHECK_THROWS_WITH_AS(solve_milp(m), doctest::Contains("external solver"), Error);
}

TEST_CASE("lp: iteration limit reports its status") {
    MilpModel m;
    for (int j = 0; j < 8; ++j) m.add_var("x" + std::to_string(j), 0.0, 10.0);
    for (int j = 0; j < 8; ++j) m.add_objective_term(j, -1.0);
    for (int r = 0; r < 6; ++r) {
        std::vector<std::pair<int, double>> coeffs;
        for (int j = 0; j < 8; ++j) coeffs.emplace_back(j, (j + r) % 3 + 1.0);
        m.add_row("r" + std::to_string(r), coeffs, Sense::le, 8.0);
    }
    SolveLimits limits;
    limits.max_iterations = 1;
    Solution s = solve_lp(m, limits);
    CHECK(s.status == SolveStatus::iteration_limit);
}

TEST_CASE("model bookkeeping: duplicate names and merged coefficients") {
    MilpModel m;
    m.add_var("x", 0, 1);
    CHECK_THROWS_AS(m.add_var("x", 0, 1), Error);
    m.add_row("r", {{0, 1.0}, {0, 2.0}}, Sense::le, 1.0);
    CHECK(m.rows()[0].coeffs.size() == 1);
    CHECK(m.rows()[0].coeffs[0].second == doctest::Approx(3.0));
    CHECK_THROWS_AS(m.add_row("r", {{0, 1.0}}, Sense::le, 1.0), Error);
}
